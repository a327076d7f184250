//! Switching networks built from 1-switches and 2-switches.
//!
//! Wires `0..inputs` are the network inputs and switch `s` drives wires
//! `inputs + 2s` and `inputs + 2s + 1`, so the switch list is already in
//! topological order. A 2-switch with selection `(s0, s1)` outputs
//! `(x[s0], x[s1])`; a 1-switch is the special case `s1 = !s0`.

use std::fmt::Write as _;

use super::PfeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchKind {
    One,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Switch {
    pub kind: SwitchKind,
    pub inputs: [usize; 2],
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Selection {
    pub s0: bool,
    pub s1: bool,
}

impl Selection {
    pub const STRAIGHT: Selection = Selection { s0: false, s1: true };
    pub const CROSSED: Selection = Selection { s0: true, s1: false };

    pub fn one(crossed: bool) -> Selection {
        Selection { s0: crossed, s1: !crossed }
    }

    pub fn is_permutation(self) -> bool {
        self.s0 != self.s1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchingNetwork {
    pub inputs: usize,
    pub switches: Vec<Switch>,
    /// Wire carrying each network output.
    pub outputs: Vec<usize>,
}

impl SwitchingNetwork {
    pub fn wire_count(&self) -> usize {
        self.inputs + 2 * self.switches.len()
    }

    pub fn switch_outputs(&self, s: usize) -> [usize; 2] {
        [self.inputs + 2 * s, self.inputs + 2 * s + 1]
    }

    pub fn count(&self, kind: SwitchKind) -> usize {
        self.switches.iter().filter(|s| s.kind == kind).count()
    }

    /// Longest chain of switches from an input to an output.
    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.wire_count()];
        for (s, sw) in self.switches.iter().enumerate() {
            let v = 1 + d[sw.inputs[0]].max(d[sw.inputs[1]]);
            let [o0, o1] = self.switch_outputs(s);
            d[o0] = v;
            d[o1] = v;
        }
        self.outputs.iter().map(|&w| d[w]).max().unwrap_or(0)
    }

    pub fn check_selections(&self, sels: &[Selection]) -> Result<(), PfeError> {
        if sels.len() != self.switches.len() {
            return Err(PfeError::Shape(format!("{} selections for {} switches", sels.len(), self.switches.len())));
        }
        if let Some(s) = (0..sels.len()).find(|&s| self.switches[s].kind == SwitchKind::One && !sels[s].is_permutation()) {
            return Err(PfeError::Shape(format!("1-switch {s} given a replicating selection")));
        }
        Ok(())
    }

    /// Plain evaluation.
    pub fn evaluate<T: Clone>(&self, sels: &[Selection], inputs: &[T]) -> Result<Vec<T>, PfeError> {
        self.check_selections(sels)?;
        if inputs.len() != self.inputs {
            return Err(PfeError::Shape(format!("{} inputs for a {}-input network", inputs.len(), self.inputs)));
        }
        let mut w: Vec<T> = Vec::with_capacity(self.wire_count());
        w.extend_from_slice(inputs);
        for (sw, sel) in self.switches.iter().zip(sels) {
            let y0 = w[sw.inputs[sel.s0 as usize]].clone();
            let y1 = w[sw.inputs[sel.s1 as usize]].clone();
            w.push(y0);
            w.push(y1);
        }
        Ok(self.outputs.iter().map(|&o| w[o].clone()).collect())
    }

    /// Switch-list text: a header line `SN1 <inputs> <switches> <outputs>`,
    /// one line `<1|2> <in0> <in1>` per switch and a final line of output wires.
    pub fn to_text(&self) -> String {
        let mut s = format!("SN1 {} {} {}\n", self.inputs, self.switches.len(), self.outputs.len());
        for sw in &self.switches {
            let k = if sw.kind == SwitchKind::One { 1 } else { 2 };
            let _ = writeln!(s, "{k} {} {}", sw.inputs[0], sw.inputs[1]);
        }
        let outs: Vec<String> = self.outputs.iter().map(usize::to_string).collect();
        s.push_str(&outs.join(" "));
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self, PfeError> {
        let bad = |msg: &str| PfeError::Shape(format!("switch list: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if head.len() != 4 || head[0] != "SN1" {
            return Err(bad("bad header"));
        }
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad("bad number"));
        let (inputs, count, nout) = (num(head[1])?, num(head[2])?, num(head[3])?);
        let mut switches = Vec::with_capacity(count);
        for s in 0..count {
            let f: Vec<&str> = lines.next().ok_or_else(|| bad("missing switch"))?.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad("bad switch line"));
            }
            let kind = match f[0] {
                "1" => SwitchKind::One,
                "2" => SwitchKind::Two,
                _ => return Err(bad("bad switch kind")),
            };
            let ins = [num(f[1])?, num(f[2])?];
            if ins.iter().any(|&w| w >= inputs + 2 * s) {
                return Err(bad("switch reads a later wire"));
            }
            switches.push(Switch { kind, inputs: ins });
        }
        let outputs: Vec<usize> = match lines.next() {
            Some(l) => l.split_whitespace().map(num).collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        if outputs.len() != nout || outputs.iter().any(|&w| w >= inputs + 2 * count) {
            return Err(bad("bad outputs"));
        }
        Ok(SwitchingNetwork { inputs, switches, outputs })
    }
}

struct Builder {
    inputs: usize,
    switches: Vec<Switch>,
}

impl Builder {
    fn switch(&mut self, kind: SwitchKind, a: usize, b: usize) -> [usize; 2] {
        let s = self.switches.len();
        self.switches.push(Switch { kind, inputs: [a, b] });
        [self.inputs + 2 * s, self.inputs + 2 * s + 1]
    }
}

fn check_pow2(n: usize) -> Result<(), PfeError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(PfeError::NotPowerOfTwo(n));
    }
    Ok(())
}

fn inverse(perm: &[usize]) -> Result<Vec<usize>, PfeError> {
    let mut inv = vec![usize::MAX; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        if y >= perm.len() || inv[y] != usize::MAX {
            return Err(PfeError::NotPermutation);
        }
        inv[y] = x;
    }
    Ok(inv)
}

/// Subnetwork choice per input (true = lower half) by the looping algorithm.
/// The last output pair is wired straight, so output `n - 1` always comes
/// from the lower subnetwork.
fn route(perm: &[usize], inv: &[usize]) -> Vec<bool> {
    let n = perm.len();
    let mut sub: Vec<Option<bool>> = vec![None; n];
    let mut start = Some((inv[n - 1], true));
    loop {
        let (mut x, side) = match start.take() {
            Some(s) => s,
            None => match (0..n).find(|&x| sub[x].is_none()) {
                Some(x) => (x, false),
                None => break,
            },
        };
        while sub[x].is_none() {
            sub[x] = Some(side);
            let partner = x ^ 1;
            debug_assert!(sub[partner].is_none());
            sub[partner] = Some(!side);
            x = inv[perm[partner] ^ 1];
        }
        debug_assert_eq!(sub[x], Some(side));
    }
    sub.into_iter().map(Option::unwrap).collect()
}

/// Emits a Waksman network over `ins`. With `perm`, also appends the
/// selections realising it: input `x` ends up on output `perm[x]`.
fn waksman_emit(b: &mut Builder, ins: &[usize], perm: Option<&[usize]>, sels: &mut Vec<Selection>) -> Vec<usize> {
    let n = ins.len();
    if n == 1 {
        return ins.to_vec();
    }
    if n == 2 {
        sels.push(Selection::one(perm.is_some_and(|p| p[0] == 1)));
        return b.switch(SwitchKind::One, ins[0], ins[1]).to_vec();
    }
    let half = n / 2;
    let routed = perm.map(|p| {
        let inv = inverse(p).expect("checked by caller");
        (route(p, &inv), inv)
    });

    let (mut top_in, mut bot_in) = (Vec::with_capacity(half), Vec::with_capacity(half));
    for i in 0..half {
        let crossed = routed.as_ref().is_some_and(|(sub, _)| sub[2 * i]);
        sels.push(Selection::one(crossed));
        let [o0, o1] = b.switch(SwitchKind::One, ins[2 * i], ins[2 * i + 1]);
        top_in.push(o0);
        bot_in.push(o1);
    }
    let sub_perms = routed.as_ref().map(|(sub, _)| {
        let p = perm.unwrap();
        let (mut tp, mut bp) = (vec![0; half], vec![0; half]);
        for x in 0..n {
            if sub[x] {
                bp[x / 2] = p[x] / 2;
            } else {
                tp[x / 2] = p[x] / 2;
            }
        }
        (tp, bp)
    });
    let top_out = waksman_emit(b, &top_in, sub_perms.as_ref().map(|(t, _)| t.as_slice()), sels);
    let bot_out = waksman_emit(b, &bot_in, sub_perms.as_ref().map(|(_, t)| t.as_slice()), sels);

    let mut out = vec![0; n];
    for i in 0..half - 1 {
        let crossed = routed.as_ref().is_some_and(|(sub, inv)| sub[inv[2 * i]]);
        sels.push(Selection::one(crossed));
        let [o0, o1] = b.switch(SwitchKind::One, top_out[i], bot_out[i]);
        out[2 * i] = o0;
        out[2 * i + 1] = o1;
    }
    out[n - 2] = top_out[half - 1];
    out[n - 1] = bot_out[half - 1];
    out
}

pub fn waksman_build(n: usize) -> Result<SwitchingNetwork, PfeError> {
    check_pow2(n)?;
    let mut b = Builder { inputs: n, switches: Vec::new() };
    let ins: Vec<usize> = (0..n).collect();
    let outputs = waksman_emit(&mut b, &ins, None, &mut Vec::new());
    Ok(SwitchingNetwork { inputs: n, switches: b.switches, outputs })
}

/// Selections for [`waksman_build`]`(perm.len())` so that `y[perm[x]] = x[x]`.
pub fn waksman_program(perm: &[usize]) -> Result<Vec<Selection>, PfeError> {
    check_pow2(perm.len())?;
    inverse(perm)?;
    let mut b = Builder { inputs: perm.len(), switches: Vec::new() };
    let ins: Vec<usize> = (0..perm.len()).collect();
    let mut sels = Vec::new();
    waksman_emit(&mut b, &ins, Some(perm), &mut sels);
    Ok(sels)
}

/// A map from `m` sources onto `inv.len()` sinks; sink `j` reads source `inv[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedPermutation {
    pub m: usize,
    pub inv: Vec<usize>,
}

impl ExtendedPermutation {
    pub fn new(m: usize, inv: Vec<usize>) -> Result<Self, PfeError> {
        if m == 0 || inv.is_empty() {
            return Err(PfeError::InvalidEp("empty domain or range".into()));
        }
        if let Some(j) = inv.iter().position(|&i| i >= m) {
            return Err(PfeError::InvalidEp(format!("sink {j} reads source {} of {m}", inv[j])));
        }
        Ok(ExtendedPermutation { m, inv })
    }

    pub fn n(&self) -> usize {
        self.inv.len()
    }

    pub fn apply<T: Clone>(&self, x: &[T]) -> Vec<T> {
        self.inv.iter().map(|&i| x[i].clone()).collect()
    }
}

/// Placement Waksman, replication chain, permutation Waksman.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpNetwork {
    /// Power-of-two width covering both the sources and the sinks.
    pub width: usize,
    pub network: SwitchingNetwork,
}

impl EpNetwork {
    pub fn placement(&self) -> std::ops::Range<usize> {
        0..waksman_switches(self.width)
    }

    pub fn replication(&self) -> std::ops::Range<usize> {
        let p = waksman_switches(self.width);
        p..p + self.width - 1
    }

    pub fn permutation(&self) -> std::ops::Range<usize> {
        let r = self.replication().end;
        r..self.network.switches.len()
    }
}

fn waksman_switches(n: usize) -> usize {
    let t = n.trailing_zeros() as usize;
    n * t + 1 - n
}

/// Network shape for extended permutations with `m` sources and `n` sinks.
/// Sources sit on inputs `0..m`; sinks are outputs `0..n`. Extra inputs and
/// outputs pad the width to a power of two.
pub fn ep_network_build(m: usize, n: usize) -> EpNetwork {
    let width = m.max(n).max(1).next_power_of_two();
    let mut b = Builder { inputs: width, switches: Vec::new() };
    let ins: Vec<usize> = (0..width).collect();
    let placed = waksman_emit(&mut b, &ins, None, &mut Vec::new());
    let replicated = replication_emit(&mut b, &placed);
    let outputs = waksman_emit(&mut b, &replicated, None, &mut Vec::new());
    EpNetwork { width, network: SwitchingNetwork { inputs: width, switches: b.switches, outputs } }
}

fn replication_emit(b: &mut Builder, placed: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(placed.len());
    let mut carry = placed[0];
    for &w in &placed[1..] {
        let [o0, o1] = b.switch(SwitchKind::Two, carry, w);
        out.push(o0);
        carry = o1;
    }
    out.push(carry);
    out
}

/// Programs [`ep_network_build`]`(ep.m, ep.n())` to realise `ep`.
pub fn ep_program(ep: &ExtendedPermutation) -> Result<(EpNetwork, Vec<Selection>), PfeError> {
    let net = ep_network_build(ep.m, ep.n());
    let w = net.width;
    // padding sinks copy the source of sink 0; they are never revealed
    let mut sinks: Vec<Vec<usize>> = vec![Vec::new(); ep.m];
    for (j, &i) in ep.inv.iter().enumerate() {
        sinks[i].push(j);
    }
    sinks[ep.inv[0]].extend(ep.n()..w);

    let mut place = vec![usize::MAX; w];
    let mut is_start = vec![false; w];
    let mut final_perm = vec![0; w];
    let mut cursor = 0;
    for (i, js) in sinks.iter().enumerate() {
        if js.is_empty() {
            continue;
        }
        place[i] = cursor;
        is_start[cursor] = true;
        for (r, &j) in js.iter().enumerate() {
            final_perm[cursor + r] = j;
        }
        cursor += js.len();
    }
    debug_assert_eq!(cursor, w);
    let mut free = (0..w).filter(|&p| !is_start[p]);
    for p in place.iter_mut().filter(|p| **p == usize::MAX) {
        *p = free.next().expect("filler count matches");
    }

    let mut sels = waksman_program(&place)?;
    for &start in &is_start[1..] {
        sels.push(Selection { s0: false, s1: start });
    }
    sels.extend(waksman_program(&final_perm)?);
    debug_assert_eq!(sels.len(), net.network.switches.len());
    Ok((net, sels))
}

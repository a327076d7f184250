//! Yao's protocol with a hidden NAND circuit.
//!
//! The function holder (evaluator) knows the circuit. The garbler learns only
//! `(n, m, g)`, the input ownership and a [`GateGrouping`], and obtains
//! blinded label pairs for every incoming wire from one fused OSN run whose
//! strings are `v | p | q`: the permute bit of the outgoing pair and the two
//! labels ordered by lsb. The holder's final swap layer reorders each pair by
//! a secret bit `v'`, and the garbler undoes the combined swap with
//! `v'' = v ^ v'`.
//!
//! Frame order: OSN frames, `PFE_GROUPING` (holder to garbler), `GC_BULK`
//! with four `k/8`-byte rows per gate, `INPUT_LABELS`, one OT batch for the
//! holder's inputs, `OUTPUT_LABELS`, then `OUTPUT_PLAIN` or `ABORT`.

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::channel::{mem_pair, Channel, Recorder, Tag, Transcript};
use crate::circuit::{Circuit, TruthTable};
use crate::dkc::{dkc_decrypt, dkc_encrypt, DkcVariant, Tweak};
use crate::label::Label;
use crate::ot::{ot_receive_labels, ot_send_labels};
use crate::runtime::{Ownership, ABORT_AUTHENTICITY};

use super::mapping::circuit_mapping;
use super::network::{ep_network_build, ep_program, ExtendedPermutation};
use super::osn::{osn_holder, osn_owner, OsnShape, OsnStats};
use super::PfeError;

/// What both parties know about the hidden circuit.
#[derive(Clone, Debug)]
pub struct PfePublic {
    pub n: usize,
    pub m: usize,
    pub g: usize,
    pub ownership: Ownership,
    pub dkc: DkcVariant,
}

impl PfePublic {
    pub fn for_circuit(c: &Circuit, ownership: Ownership, dkc: DkcVariant) -> Self {
        PfePublic { n: c.n(), m: c.m(), g: c.q(), ownership, dkc }
    }

    /// Outgoing wires: inputs and non-output gate outputs.
    pub fn ow(&self) -> usize {
        self.n + self.g - self.m
    }

    /// Incoming wires: two per gate.
    pub fn iw(&self) -> usize {
        2 * self.g
    }

    fn k(&self) -> usize {
        self.dkc.k
    }

    fn shape(&self) -> OsnShape {
        let k8 = self.k() / 8;
        OsnShape { network: ep_network_build(self.ow(), self.iw()).network, string_bytes: 1 + 2 * k8, reveal: self.iw(), lane: Some(k8) }
    }

    fn check(&self) -> Result<(), PfeError> {
        if self.m == 0 || self.m > self.g || self.ownership.n() != self.n || self.n == 0 {
            return Err(PfeError::Shape(format!("n = {}, m = {}, g = {}", self.n, self.m, self.g)));
        }
        Ok(())
    }
}

/// Per gate: its two incoming wires and its outgoing wire. Outgoing wires at
/// or past `ow` denote circuit output `out - ow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateGrouping {
    pub gates: Vec<(u32, u32, u32)>,
}

impl GateGrouping {
    fn for_public(p: &PfePublic) -> Self {
        let ow = p.ow() as u32;
        let first_out = (p.g - p.m) as u32;
        let gates = (0..p.g as u32)
            .map(|g| (2 * g, 2 * g + 1, if g < first_out { p.n as u32 + g } else { ow + g - first_out }))
            .collect();
        GateGrouping { gates }
    }

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 * self.gates.len());
        for &(a, b, o) in &self.gates {
            for v in [a, b, o] {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    fn decode(bytes: &[u8], p: &PfePublic) -> Result<Self, PfeError> {
        if bytes.len() != 12 * p.g {
            return Err(PfeError::Protocol("PFE_GROUPING length".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
        let gates: Vec<_> = (0..p.g).map(|g| (word(3 * g), word(3 * g + 1), word(3 * g + 2))).collect();
        let mut seen_iw = vec![false; p.iw()];
        let mut seen_out = vec![false; p.ow() + p.m];
        for &(a, b, o) in &gates {
            for w in [a as usize, b as usize] {
                if w >= p.iw() || std::mem::replace(&mut seen_iw[w], true) {
                    return Err(PfeError::Protocol("incoming wire grouped twice".into()));
                }
            }
            let o = o as usize;
            if o < p.n || o >= seen_out.len() || std::mem::replace(&mut seen_out[o], true) {
                return Err(PfeError::Protocol("bad outgoing wire in grouping".into()));
            }
        }
        Ok(GateGrouping { gates })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfeReport {
    pub output: Vec<bool>,
    pub osn: OsnStats,
    /// 1-out-of-2 transfers for the holder's input labels.
    pub input_ots: usize,
}

impl PfeReport {
    pub fn total_ots(&self) -> usize {
        self.osn.ot_1of2 + self.osn.ot_1of4 + self.input_ots
    }
}

fn labels_bytes(labels: &[Label], k: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(labels.len() * k / 8);
    for l in labels {
        l.write_bytes(k, &mut out);
    }
    out
}

fn labels_from(bytes: &[u8], k: usize, count: usize) -> Result<Vec<Label>, PfeError> {
    if bytes.len() != count * k / 8 {
        return Err(PfeError::Protocol(format!("{} bytes for {count} labels", bytes.len())));
    }
    Ok(bytes.chunks(k / 8).map(|c| Label::from_bytes(c, k)).collect())
}

fn await_plain<C: Channel + ?Sized>(ch: &mut C, m: usize) -> Result<Vec<bool>, PfeError> {
    let f = ch.recv()?;
    match f.tag {
        Tag::OutputPlain if f.payload.len() == m && f.payload.iter().all(|&b| b <= 1) => Ok(f.payload.iter().map(|&b| b == 1).collect()),
        Tag::Abort => Err(PfeError::Aborted),
        t => Err(PfeError::Protocol(format!("unexpected {t}"))),
    }
}

fn random_pair<R: Rng>(rng: &mut R, k: usize) -> (Label, Label) {
    let w0 = Label::random(rng, k);
    let w1 = Label::random(rng, k).with_lsb(!w0.lsb());
    (w0, w1)
}

/// Garbler side. Never sees the circuit wiring.
pub fn pfe_garbler<C: Channel + ?Sized>(ch: &mut C, public: &PfePublic, x: &[bool], seed: u64) -> Result<PfeReport, PfeError> {
    public.check()?;
    let own = public.ownership.garbler_wires();
    if x.len() != own.len() {
        return Err(PfeError::Input { expected: own.len(), got: x.len() });
    }
    let k = public.k();
    let k8 = k / 8;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    // outgoing pairs W^0, W^1 with v = lsb W^0; p has lsb 0, q lsb 1
    let pairs: Vec<(Label, Label)> = (0..public.ow()).map(|_| random_pair(&mut rng, k)).collect();
    let strings: Vec<Vec<u8>> = pairs
        .iter()
        .map(|&(w0, w1)| {
            let v = w0.lsb();
            let (p, q) = if v { (w1, w0) } else { (w0, w1) };
            let mut s = vec![v as u8];
            p.write_bytes(k, &mut s);
            q.write_bytes(k, &mut s);
            s
        })
        .collect();
    let (blinded, osn) = osn_owner(ch, &public.shape(), &strings, &mut rng)?;

    // blinded pair per incoming wire, indexed by truth value
    let mut hat = Vec::with_capacity(public.iw());
    for s in &blinded {
        if s[0] > 1 {
            return Err(PfeError::Protocol("blinded permute bit out of range".into()));
        }
        let a = Label::from_bytes(&s[1..1 + k8], k);
        let b = Label::from_bytes(&s[1 + k8..], k);
        hat.push(if s[0] == 1 { (b, a) } else { (a, b) });
    }

    let grouping = GateGrouping::decode(&ch.expect(Tag::PfeGrouping)?, public)?;
    let mut outputs = vec![(Label::ZERO, Label::ZERO); public.m];
    let mut rows = Vec::with_capacity(4 * public.g * k8);
    for (g, &(ia, ib, o)) in grouping.gates.iter().enumerate() {
        let out = match (o as usize).checked_sub(public.ow()) {
            None => pairs[o as usize],
            Some(j) => {
                outputs[j] = random_pair(&mut rng, k);
                outputs[j]
            }
        };
        let (a, b) = (hat[ia as usize], hat[ib as usize]);
        let mut ct = [Label::ZERO; 4];
        for va in [false, true] {
            for vb in [false, true] {
                let (ka, kb) = (if va { a.1 } else { a.0 }, if vb { b.1 } else { b.0 });
                let row = 2 * ka.lsb() as u8 + kb.lsb() as u8;
                let msg = if TruthTable::NAND.eval(va, vb) { out.1 } else { out.0 };
                ct[row as usize] = dkc_encrypt(&public.dkc, ka, kb, Tweak::new(g as u64 + 1, row), msg).expect("labels fit in k bits");
            }
        }
        for c in ct {
            c.write_bytes(k, &mut rows);
        }
    }
    ch.send(Tag::GcBulk, rows)?;

    let mine: Vec<Label> = own.iter().zip(x).map(|(&w, &bit)| if bit { pairs[w].1 } else { pairs[w].0 }).collect();
    ch.send(Tag::InputLabels, labels_bytes(&mine, k))?;
    let theirs: Vec<(Label, Label)> = public.ownership.evaluator_wires().iter().map(|&w| pairs[w]).collect();
    if !theirs.is_empty() {
        ot_send_labels(ch, k, &theirs)?;
    }

    let y = labels_from(&ch.expect(Tag::OutputLabels)?, k, public.m)?;
    let mut bits = Vec::with_capacity(public.m);
    for (j, (l, &(w0, w1))) in y.iter().zip(&outputs).enumerate() {
        if *l == w0 {
            bits.push(false);
        } else if *l == w1 {
            bits.push(true);
        } else {
            ch.send(Tag::Abort, vec![ABORT_AUTHENTICITY])?;
            return Err(PfeError::Authenticity(j));
        }
    }
    ch.send(Tag::OutputPlain, bits.iter().map(|&b| b as u8).collect())?;
    Ok(PfeReport { output: bits, osn, input_ots: 0 })
}

/// Function holder side; `circuit` must be NAND-only.
pub fn pfe_holder<C: Channel + ?Sized>(ch: &mut C, public: &PfePublic, circuit: &Circuit, x: &[bool], seed: u64) -> Result<PfeReport, PfeError> {
    public.check()?;
    if (circuit.n(), circuit.m(), circuit.q()) != (public.n, public.m, public.g) {
        return Err(PfeError::Shape("circuit does not match public parameters".into()));
    }
    if let Some(g) = circuit.gates().iter().position(|g| g.truth_table != TruthTable::NAND) {
        return Err(PfeError::NotNand { gate: g });
    }
    let evw = public.ownership.evaluator_wires();
    if x.len() != evw.len() {
        return Err(PfeError::Input { expected: evw.len(), got: x.len() });
    }
    let k = public.k();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    let mapping = circuit_mapping(circuit);
    let ep = ExtendedPermutation::new(public.ow(), mapping.inv.clone())?;
    let (_, sels) = ep_program(&ep)?;
    let swap: Vec<bool> = (0..public.iw()).map(|_| rng.gen()).collect();
    let mut t = Vec::with_capacity(public.iw());
    let mut blinding = Vec::with_capacity(public.iw());
    for &v in &swap {
        let t0 = Label::random(&mut rng, k);
        let t1 = Label::random(&mut rng, k).with_lsb(t0.lsb());
        let mut s = vec![v as u8];
        t0.write_bytes(k, &mut s);
        t1.write_bytes(k, &mut s);
        blinding.push(s);
        t.push((t0, t1));
    }
    let osn = osn_holder(ch, &public.shape(), &sels, &blinding, Some(&swap))?;
    ch.send(Tag::PfeGrouping, GateGrouping::for_public(public).encode())?;

    let rows = labels_from(&ch.expect(Tag::GcBulk)?, k, 4 * public.g)?;
    let given = labels_from(&ch.expect(Tag::InputLabels)?, k, public.ownership.garbler_wires().len())?;
    let chosen = if evw.is_empty() { Vec::new() } else { ot_receive_labels(ch, k, x)? };
    let mut wires = vec![Label::ZERO; public.ow()];
    for (&w, l) in public.ownership.garbler_wires().iter().zip(given) {
        wires[w] = l;
    }
    for (&w, l) in evw.iter().zip(chosen) {
        wires[w] = l;
    }

    let key = |wires: &[Label], j: usize| {
        let l = wires[mapping.inv[j]];
        l ^ if l.lsb() { t[j].1 } else { t[j].0 }
    };
    let first_out = public.g - public.m;
    let mut y = Vec::with_capacity(public.m);
    for g in 0..public.g {
        let (ka, kb) = (key(&wires, 2 * g), key(&wires, 2 * g + 1));
        let row = 2 * ka.lsb() as u8 + kb.lsb() as u8;
        let out = dkc_decrypt(&public.dkc, ka, kb, Tweak::new(g as u64 + 1, row), rows[4 * g + row as usize]).expect("labels fit in k bits");
        if g < first_out {
            wires[public.n + g] = out;
        } else {
            y.push(out);
        }
    }
    ch.send(Tag::OutputLabels, labels_bytes(&y, k))?;
    let output = await_plain(ch, public.m)?;
    Ok(PfeReport { output, osn, input_ots: evw.len() })
}

#[derive(Clone, Debug)]
pub struct PfeSession {
    pub garbler: PfeReport,
    pub holder: PfeReport,
    pub garbler_transcript: Transcript,
    pub holder_transcript: Transcript,
}

/// Runs both sides in-process. `x_garbler` and `x_holder` follow the
/// ownership map in `public`.
pub fn pfe_run(public: &PfePublic, circuit: &Circuit, x_garbler: &[bool], x_holder: &[bool], seed: u64) -> Result<PfeSession, PfeError> {
    let (a, b) = mem_pair();
    let (g, h) = thread::scope(|s| {
        let g = s.spawn(|| {
            let mut ch = Recorder::new(a);
            let r = pfe_garbler(&mut ch, public, x_garbler, seed);
            (r, ch.into_parts().1)
        });
        let mut ch = Recorder::new(b);
        let r = pfe_holder(&mut ch, public, circuit, x_holder, seed ^ 0x5eed);
        let (_, ht) = ch.into_parts();
        (g.join().expect("garbler thread panicked"), (r, ht))
    });
    match (g, h) {
        ((Ok(gr), gt), (Ok(hr), ht)) => Ok(PfeSession { garbler: gr, holder: hr, garbler_transcript: gt, holder_transcript: ht }),
        ((Err(e @ PfeError::Authenticity(_)), _), _) => Err(e),
        ((_, _), (Err(e), _)) if !matches!(e, PfeError::Channel(_)) => Err(e),
        ((Err(e), _), _) | (_, (Err(e), _)) => Err(e),
    }
}

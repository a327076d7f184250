//! Single-gate garbling and evaluation routines.
//!
//! Rows are always indexed by pointer bits: `2 * pa + pb`, where a pointer
//! bit is the label's lsb for point-and-permute schemes and the external
//! value for the row-reduction-by-interpolation schemes.

use rand::Rng;

use crate::circuit::{OddParams, Side, TruthTable};
use crate::dkc::{kdf_raw, DkcVariant, Tweak};
use crate::gf2k::Gf2k;
use crate::label::Label;

use super::GateBlob;

/// Tweak position used for the single row of a unary gate.
pub const UNARY_POS: u8 = 0x10;
/// Tweak position used by the hash-based output decoding.
pub const DECODE_POS: u8 = 0xFF;

/// Both labels of a wire and the pointer bit of the FALSE label.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WirePair {
    pub w0: Label,
    pub w1: Label,
    /// Pointer bit carried by `w0`; `w1` carries its negation.
    pub e0: bool,
}

impl WirePair {
    /// A pair whose pointer bits are the label lsbs.
    pub fn from_lsb(w0: Label, w1: Label) -> WirePair {
        debug_assert_ne!(w0.lsb(), w1.lsb());
        WirePair { w0, w1, e0: w0.lsb() }
    }

    #[inline]
    pub fn label(&self, v: bool) -> Label {
        if v {
            self.w1
        } else {
            self.w0
        }
    }

    #[inline]
    pub fn ptr(&self, v: bool) -> bool {
        self.e0 ^ v
    }

    /// Truth value whose label carries pointer bit `p`.
    #[inline]
    pub fn value_at(&self, p: bool) -> bool {
        self.e0 ^ p
    }

    pub fn offset(&self) -> Label {
        self.w0 ^ self.w1
    }

    /// Pair whose FALSE label is this pair's TRUE label.
    pub fn negated(self) -> WirePair {
        WirePair { w0: self.w1, w1: self.w0, e0: !self.e0 }
    }
}

/// What the evaluator holds for one wire.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WireValue {
    pub label: Label,
    pub ptr: bool,
}

impl WireValue {
    pub fn from_lsb(label: Label) -> WireValue {
        WireValue { label, ptr: label.lsb() }
    }
}

/// How a scheme completes the pair once one output label is fixed.
#[derive(Clone, Copy, Debug)]
pub enum Completion {
    /// Other label is `label ^ R`.
    Offset(Label),
    /// Other label is random with the opposite lsb.
    FreshLsb,
}

impl Completion {
    fn pair_from<R: Rng + ?Sized>(self, v: bool, label: Label, k: usize, rng: &mut R) -> WirePair {
        let other = match self {
            Completion::Offset(r) => label ^ r,
            Completion::FreshLsb => Label::random(rng, k).with_lsb(!label.lsb()),
        };
        if v {
            WirePair::from_lsb(other, label)
        } else {
            WirePair::from_lsb(label, other)
        }
    }
}

#[inline]
pub(crate) fn h1(k: usize, x: Label, t: Tweak) -> Label {
    kdf_raw(k, &[x], t, false).v
}

/// Garbles a 4-row point-and-permute table, or a 3-row table with the
/// `(0,0)` row implied when `reduce` is set. Returns the output pair and the
/// shipped rows in pointer order.
#[allow(clippy::too_many_arguments)]
pub fn garble_table<R: Rng + ?Sized>(
    dkc: &DkcVariant,
    a: &WirePair,
    b: &WirePair,
    tt: TruthTable,
    gate_id: u64,
    reduce: bool,
    completion: Completion,
    rng: &mut R,
) -> (WirePair, Vec<Label>) {
    let k = dkc.k;
    let mut pads = [Label::ZERO; 4];
    let mut vals = [false; 4];
    for r in 0..4 {
        let (pa, pb) = (r >> 1 == 1, r & 1 == 1);
        let (va, vb) = (a.value_at(pa), b.value_at(pb));
        pads[r] = dkc.pad(a.label(va), b.label(vb), Tweak::new(gate_id, r as u8));
        vals[r] = tt.eval(va, vb);
    }
    let out = if reduce {
        completion.pair_from(vals[0], pads[0], k, rng)
    } else {
        fresh_lsb_pair(k, completion, rng)
    };
    let first = reduce as usize;
    let rows = (first..4).map(|r| pads[r] ^ out.label(vals[r])).collect();
    (out, rows)
}

/// The three-row table; the omitted row decrypts to zero.
pub fn garble_gate_grr3<R: Rng + ?Sized>(
    dkc: &DkcVariant,
    a: &WirePair,
    b: &WirePair,
    tt: TruthTable,
    gate_id: u64,
    completion: Completion,
    rng: &mut R,
) -> (WirePair, [Label; 3]) {
    let (out, rows) = garble_table(dkc, a, b, tt, gate_id, true, completion, rng);
    (out, [rows[0], rows[1], rows[2]])
}

/// Evaluates a 4- or 3-row table.
pub fn eval_table(dkc: &DkcVariant, a: Label, b: Label, rows: &[Label], gate_id: u64) -> Label {
    let r = ((a.lsb() as usize) << 1) | b.lsb() as usize;
    let pad = dkc.pad(a, b, Tweak::new(gate_id, r as u8));
    match rows.len() {
        4 => pad ^ rows[r],
        _ if r == 0 => pad,
        _ => pad ^ rows[r - 1],
    }
}

pub(crate) fn fresh_lsb_pair<R: Rng + ?Sized>(k: usize, completion: Completion, rng: &mut R) -> WirePair {
    let w0 = Label::random(rng, k);
    completion.pair_from(false, w0, k, rng)
}

/// A garbled GRR2-style gate: the output pair and the shipped blob.
#[derive(Clone, Debug)]
pub struct Grr2Gate {
    pub out: WirePair,
    pub blob: GateBlob,
}

/// Interpolation-based row reduction.
///
/// `keys[r]` and `masks[r]` are the row key and external-value mask for
/// pointer row `r`, `values[r]` the gate output on that row, and `c0` the
/// external value assigned to the output's FALSE label. Row `r` sits at
/// node `r + 1`; the shipped points are taken at nodes 5 and 6 and labels
/// are read off at node 0.
pub fn garble_gate_grr2(
    field: &Gf2k,
    keys: [Label; 4],
    masks: [bool; 4],
    values: [bool; 4],
    even: bool,
    c0: bool,
) -> Grr2Gate {
    let node = |r: usize| (r + 1) as u8;
    let mut bits = 0u8;
    for r in 0..4 {
        bits |= ((c0 ^ values[r] ^ masks[r]) as u8) << r;
    }
    let (w0, w1, points) = if even {
        let mut lines = [[0u128; 2]; 2];
        for v in [false, true] {
            let pts: Vec<(u8, u128)> = (0..4).filter(|r| values[*r] == v).map(|r| (node(r), keys[r].0)).collect();
            debug_assert_eq!(pts.len(), 2, "even gate has two rows per value");
            lines[v as usize] = [field.interpolate_small(&pts, 0), field.interpolate_small(&pts, 5)];
        }
        let mut points = [Label::ZERO; 2];
        points[c0 as usize] = Label(lines[0][1]);
        points[!c0 as usize] = Label(lines[1][1]);
        (Label(lines[0][0]), Label(lines[1][0]), points)
    } else {
        let maj_val = values.iter().filter(|v| **v).count() >= 2;
        let maj: Vec<(u8, u128)> =
            (0..4).filter(|r| values[*r] == maj_val).map(|r| (node(r), keys[r].0)).collect();
        debug_assert!(maj.len() == 3, "odd gate has three majority rows");
        let minority = (0..4).find(|r| values[*r] != maj_val).expect("odd gate");
        let p5 = field.interpolate_small(&maj, 5);
        let p6 = field.interpolate_small(&maj, 6);
        let p0 = field.interpolate_small(&maj, 0);
        let q0 = field.interpolate_small(&[(node(minority), keys[minority].0), (5, p5), (6, p6)], 0);
        let (w0, w1) = if maj_val { (Label(q0), Label(p0)) } else { (Label(p0), Label(q0)) };
        (w0, w1, [Label(p5), Label(p6)])
    };
    Grr2Gate {
        out: WirePair { w0, w1, e0: c0 },
        blob: GateBlob::Grr2 { even, points, bits },
    }
}

/// Recovers the output label and external value from one row.
pub fn eval_gate_grr2(field: &Gf2k, even: bool, points: &[Label; 2], bits: u8, row: usize, key: Label, mask: bool) -> WireValue {
    let ext = ((bits >> row) & 1 == 1) ^ mask;
    let node = (row + 1) as u8;
    let label = if even {
        field.interpolate_small(&[(node, key.0), (5, points[ext as usize].0)], 0)
    } else {
        field.interpolate_small(&[(node, key.0), (5, points[0].0), (6, points[1].0)], 0)
    };
    WireValue { label: Label(label), ptr: ext }
}

/// Row keys and masks for interpolation-based gates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RowKeys {
    /// Keys from the dual-key cipher decrypting zero, masks from the key derivation.
    Dkc,
    /// Keys and masks from one `k + 1` bit key derivation of both labels.
    Kdf,
}

#[inline]
pub(crate) fn row_key(dkc: &DkcVariant, mode: RowKeys, a: Label, b: Label, gate_id: u64, row: usize) -> (Label, bool) {
    let t = Tweak::new(gate_id, row as u8);
    match mode {
        RowKeys::Dkc => {
            let key = dkc.pad(a, b, t);
            let m = kdf_raw(dkc.k, &[a, b], t, true).m.expect("extra bit requested");
            (key, m)
        }
        RowKeys::Kdf => {
            let out = kdf_raw(dkc.k, &[a, b], t, true);
            (out.v, out.m.expect("extra bit requested"))
        }
    }
}

/// Half-gates garbling of `((a ^ alpha_a) & (b ^ alpha_b)) ^ alpha_c`.
/// Returns `(W^0, T_G, T_E)`; AND is the all-false parameter set.
pub fn gb_and_halfgates(k: usize, wa0: Label, wb0: Label, r: Label, gate_index: u64, p: OddParams) -> (Label, Label, Label) {
    let (j, j2) = (Tweak::new(2 * gate_index, 0), Tweak::new(2 * gate_index + 1, 0));
    let (wa1, wb1) = (wa0 ^ r, wb0 ^ r);
    let (pa, pb) = (wa0.lsb(), wb0.lsb());
    let f_g = |x: bool, y: bool| ((x ^ p.alpha_a) & (y ^ p.alpha_b)) ^ p.alpha_c;

    let (ha0, ha1) = (h1(k, wa0, j), h1(k, wa1, j));
    let tg = ha0 ^ ha1 ^ r.select(pb ^ p.alpha_b);
    let wg0 = if pa { ha1 } else { ha0 } ^ r.select(f_g(pa, pb));

    let (hb0, hb1) = (h1(k, wb0, j2), h1(k, wb1, j2));
    let te = hb0 ^ hb1 ^ if p.alpha_a { wa1 } else { wa0 };
    let we0 = if pb { hb1 } else { hb0 };

    (wg0 ^ we0, tg, te)
}

pub fn ev_and_halfgates(k: usize, wa: Label, wb: Label, tg: Label, te: Label, gate_index: u64) -> Label {
    let (j, j2) = (Tweak::new(2 * gate_index, 0), Tweak::new(2 * gate_index + 1, 0));
    let wg = h1(k, wa, j) ^ tg.select(wa.lsb());
    let we = h1(k, wb, j2) ^ (te ^ wa).select(wb.lsb());
    wg ^ we
}

/// Translation of wire `a` onto wire `b`'s offset before a free XOR.
/// Returns the translated FALSE label of `a` and the one shipped ciphertext.
pub fn flexor_translate(k: usize, a: &WirePair, delta_b: Label, gate_id: u64) -> (Label, Label) {
    let t = Tweak::new(gate_id, 0);
    if !a.e0 {
        let xa0 = h1(k, a.w0, t);
        let xa1 = xa0 ^ delta_b;
        (xa0, h1(k, a.w1, t) ^ xa1)
    } else {
        let xa1 = h1(k, a.w1, t);
        let xa0 = xa1 ^ delta_b;
        (xa0, h1(k, a.w0, t) ^ xa0)
    }
}

pub fn flexor_eval_translate(k: usize, a: WireValue, ct: Label, gate_id: u64) -> Label {
    let h = h1(k, a.label, Tweak::new(gate_id, 0));
    if a.ptr {
        h ^ ct
    } else {
        h
    }
}

/// Unary gate: output `input ^ negated`. The pointer-0 row is implied.
/// `ext` selects whether an extra external-value bit is derived and shipped.
#[allow(clippy::too_many_arguments)]
pub fn garble_unary<R: Rng + ?Sized>(
    k: usize,
    input: &WirePair,
    side: Side,
    negated: bool,
    gate_id: u64,
    completion: Completion,
    ext: bool,
    rng: &mut R,
) -> (WirePair, GateBlob) {
    let t = Tweak::new(gate_id, UNARY_POS);
    let v0 = input.value_at(false);
    let d0 = kdf_raw(k, &[input.label(v0)], t, ext);
    let d1 = kdf_raw(k, &[input.label(!v0)], t, ext);
    let o0 = v0 ^ negated;
    if ext {
        let m0 = d0.m.expect("extra bit");
        let other = Label::random(rng, k);
        let (w0, w1) = if o0 { (other, d0.v) } else { (d0.v, other) };
        let out = WirePair { w0, w1, e0: m0 ^ o0 };
        let ct = d1.v ^ other;
        let bit = d1.m.expect("extra bit") ^ !m0;
        (out, GateBlob::Unary { side, ct, bit: Some(bit) })
    } else {
        let out = completion.pair_from(o0, d0.v, k, rng);
        let ct = d1.v ^ out.label(!o0);
        (out, GateBlob::Unary { side, ct, bit: None })
    }
}

pub fn eval_unary(k: usize, input: WireValue, ct: Label, bit: Option<bool>, gate_id: u64) -> WireValue {
    let d = kdf_raw(k, &[input.label], Tweak::new(gate_id, UNARY_POS), bit.is_some());
    let (label, m) = if input.ptr { (d.v ^ ct, d.m.map(|m| m ^ bit.unwrap())) } else { (d.v, d.m) };
    match m {
        Some(ptr) => WireValue { label, ptr },
        None => WireValue::from_lsb(label),
    }
}

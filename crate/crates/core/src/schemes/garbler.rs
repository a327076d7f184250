use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::circuit::{validate, Circuit, GateKind, Side};
use crate::gf2k::Gf2k;
use crate::label::Label;

use super::gates::{self, Completion, RowKeys, WirePair};
use super::{gate_tweak_id, output_hash, DecodingInfo, EncodingInfo, GarbleParams, GateBlob, SchemeError, SchemeKind};

/// Produces garbled gates one at a time in topological order.
///
/// Running it to completion yields exactly what [`super::gb`] returns for
/// the same seed, which is what lets streamed and bulk transfers agree.
pub struct Garbler<'c> {
    params: GarbleParams,
    circuit: &'c Circuit,
    rng: ChaCha20Rng,
    field: &'static Gf2k,
    r: Label,
    wires: Vec<WirePair>,
    next: usize,
}

impl<'c> Garbler<'c> {
    pub fn new(params: GarbleParams, circuit: &'c Circuit, seed: u64) -> Result<Self, SchemeError> {
        validate(circuit)?;
        let k = params.k();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let field = Gf2k::get(k).expect("supported width");
        let r = Label::random(&mut rng, k).with_lsb(true);
        let mut wires = Vec::with_capacity(circuit.wire_count());
        for _ in 0..circuit.n() {
            let w0 = Label::random(&mut rng, k);
            let w1 = if params.kind().uses_global_offset() {
                w0 ^ r
            } else {
                Label::random(&mut rng, k).with_lsb(!w0.lsb())
            };
            wires.push(WirePair::from_lsb(w0, w1));
        }
        Ok(Garbler { params, circuit, rng, field, r, wires, next: 0 })
    }

    pub fn params(&self) -> GarbleParams {
        self.params
    }

    pub fn encoding(&self) -> EncodingInfo {
        let inputs = &self.wires[..self.circuit.n()];
        if self.params.kind().uses_global_offset() {
            EncodingInfo::Offset { w0: inputs.iter().map(|p| p.w0).collect(), r: self.r }
        } else {
            EncodingInfo::Pairs(inputs.iter().map(|p| (p.w0, p.w1)).collect())
        }
    }

    /// Label pairs of every wire garbled so far.
    pub fn wire_pairs(&self) -> &[WirePair] {
        &self.wires
    }

    /// Global offset; meaningful for free-XOR and half gates.
    pub fn offset(&self) -> Label {
        self.r
    }

    pub fn remaining(&self) -> usize {
        self.circuit.q() - self.next
    }

    fn completion(&self) -> Completion {
        if self.params.kind().uses_global_offset() {
            Completion::Offset(self.r)
        } else {
            Completion::FreshLsb
        }
    }

    fn fresh_pair(&mut self) -> WirePair {
        let k = self.params.k();
        let completion = self.completion();
        let mut p = gates::fresh_lsb_pair(k, completion, &mut self.rng);
        if self.params.kind().uses_external_values() {
            p.e0 = rand::Rng::gen(&mut self.rng);
        }
        p
    }

    /// Garbles the next gate, or returns `None` once all gates are done.
    pub fn next_gate(&mut self) -> Option<GateBlob> {
        let g = self.next;
        if g == self.circuit.q() {
            return None;
        }
        self.next += 1;
        let spec = *self.circuit.gate(g);
        let wire = spec.out;
        let gid = gate_tweak_id(wire);
        let a = self.wires[spec.in_a];
        let b = self.wires[spec.in_b];
        let k = self.params.k();
        let kind = self.params.kind();
        let ext = kind.uses_external_values();
        let completion = self.completion();
        let tt = spec.truth_table;

        let (out, blob) = match tt.kind() {
            GateKind::Constant(c) => {
                let p = self.fresh_pair();
                (p, GateBlob::Constant { label: p.label(c), bit: ext.then(|| p.ptr(c)) })
            }
            GateKind::Unary { input, negated } => {
                let src = if input == Side::A { a } else { b };
                gates::garble_unary(k, &src, input, negated, gid, completion, ext, &mut self.rng)
            }
            GateKind::Xor { negated } if kind.uses_global_offset() => {
                let w0 = a.w0 ^ b.w0 ^ self.r.select(negated);
                (WirePair::from_lsb(w0, w0 ^ self.r), GateBlob::Free)
            }
            GateKind::Xor { negated } if kind == SchemeKind::FlexorGrr2 => {
                let delta_b = b.offset();
                let (out, blob) = if a.offset() == delta_b {
                    (WirePair { w0: a.w0 ^ b.w0, w1: a.w0 ^ b.w1, e0: a.e0 ^ b.e0 }, GateBlob::Free)
                } else {
                    let (xa0, ct) = gates::flexor_translate(k, &a, delta_b, gid);
                    (WirePair { w0: xa0 ^ b.w0, w1: xa0 ^ b.w1, e0: a.e0 ^ b.e0 }, GateBlob::Buffer(ct))
                };
                (if negated { out.negated() } else { out }, blob)
            }
            GateKind::Odd(p) if kind == SchemeKind::HalfGates => {
                let (w0, tg, te) = gates::gb_and_halfgates(k, a.w0, b.w0, self.r, g as u64, p);
                (WirePair::from_lsb(w0, w0 ^ self.r), GateBlob::Half { tg, te })
            }
            kind_of_gate => match kind {
                SchemeKind::ClassicPP | SchemeKind::Grr3 | SchemeKind::FreeXor => {
                    let reduce = kind != SchemeKind::ClassicPP;
                    let (out, rows) =
                        gates::garble_table(&self.params.dkc, &a, &b, tt, gid, reduce, completion, &mut self.rng);
                    (out, GateBlob::Rows(rows))
                }
                SchemeKind::Grr2 | SchemeKind::FlexorGrr2 => {
                    let mode = if kind == SchemeKind::Grr2 { RowKeys::Dkc } else { RowKeys::Kdf };
                    let mut keys = [Label::ZERO; 4];
                    let mut masks = [false; 4];
                    let mut values = [false; 4];
                    for r in 0..4 {
                        let (va, vb) = (a.value_at(r >> 1 == 1), b.value_at(r & 1 == 1));
                        (keys[r], masks[r]) = gates::row_key(&self.params.dkc, mode, a.label(va), b.label(vb), gid, r);
                        values[r] = tt.eval(va, vb);
                    }
                    let even = matches!(kind_of_gate, GateKind::Xor { .. });
                    let c0 = rand::Rng::gen(&mut self.rng);
                    let gg = gates::garble_gate_grr2(self.field, keys, masks, values, even, c0);
                    (gg.out, gg.blob)
                }
                SchemeKind::HalfGates => unreachable!("handled above"),
            },
        };
        debug_assert_eq!(self.wires.len(), wire);
        self.wires.push(out);
        Some(blob)
    }

    /// Decoding information, garbling first any gates not yet produced.
    pub fn finish(mut self) -> DecodingInfo {
        self.decoding()
    }

    pub fn decoding(&mut self) -> DecodingInfo {
        while self.next_gate().is_some() {}
        let outs = &self.wires[self.circuit.first_output()..];
        match self.params.kind() {
            SchemeKind::HalfGates if self.params.scheme.authenticity_decode => {
                let k = self.params.k();
                let first = self.circuit.first_output() as u64;
                DecodingInfo::Hashes {
                    k,
                    first_output: first,
                    pairs: outs
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (output_hash(k, first + i as u64, p.w0), output_hash(k, first + i as u64, p.w1)))
                        .collect(),
                }
            }
            SchemeKind::HalfGates => DecodingInfo::Lsb(outs.iter().map(|p| p.w0.lsb()).collect()),
            _ => DecodingInfo::Pairs(outs.iter().map(|p| (p.w0, p.w1)).collect()),
        }
    }
}

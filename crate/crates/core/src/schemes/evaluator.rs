use std::collections::VecDeque;

use crate::circuit::{Side, Topology};
use crate::gf2k::Gf2k;
use crate::label::Label;

use super::gates::{self, RowKeys, WireValue};
use super::{gate_tweak_id, GarbleParams, GateBlob, SchemeError, SchemeKind};

/// Evaluates garbled gates one at a time.
///
/// Blobs handed over with [`Evaluator::accept`] are queued until
/// [`Evaluator::run_pending`]; the queue's high-water mark is what
/// [`Evaluator::peak_retained`] reports.
pub struct Evaluator<'t> {
    params: GarbleParams,
    topology: &'t Topology,
    field: &'static Gf2k,
    wires: Vec<WireValue>,
    next: usize,
    pending: VecDeque<GateBlob>,
    peak: usize,
}

impl<'t> Evaluator<'t> {
    pub fn new(params: GarbleParams, topology: &'t Topology, inputs: &[Label]) -> Result<Self, SchemeError> {
        if inputs.len() != topology.n {
            return Err(SchemeError::Length { expected: topology.n, got: inputs.len() });
        }
        let mut wires = Vec::with_capacity(topology.wire_count());
        wires.extend(inputs.iter().map(|l| WireValue::from_lsb(*l)));
        Ok(Evaluator {
            params,
            topology,
            field: Gf2k::get(params.k()).expect("supported width"),
            wires,
            next: 0,
            pending: VecDeque::new(),
            peak: 0,
        })
    }

    pub fn is_done(&self) -> bool {
        self.next == self.topology.q()
    }

    /// Everything the evaluator currently knows, one value per evaluated wire.
    pub fn wire_values(&self) -> &[WireValue] {
        &self.wires
    }

    pub fn accept(&mut self, blob: GateBlob) {
        self.pending.push_back(blob);
        self.peak = self.peak.max(self.pending.len());
    }

    pub fn run_pending(&mut self) -> Result<(), SchemeError> {
        while let Some(blob) = self.pending.pop_front() {
            self.eval_next(&blob)?;
        }
        Ok(())
    }

    /// Largest number of blobs queued at once.
    pub fn peak_retained(&self) -> usize {
        self.peak
    }

    pub fn eval_next(&mut self, blob: &GateBlob) -> Result<(), SchemeError> {
        let g = self.next;
        if g == self.topology.q() {
            return Err(SchemeError::Malformed("more blobs than gates".into()));
        }
        let (ia, ib) = self.topology.wires[g];
        let wire = self.topology.n + g;
        let gid = gate_tweak_id(wire);
        let (a, b) = (self.wires[ia], self.wires[ib]);
        let k = self.params.k();
        let kind = self.params.kind();
        let bad = |what: &str| SchemeError::Malformed(format!("gate {}: {what} under {kind}", wire + 1));

        let ext = kind.uses_external_values();
        let out = match blob {
            GateBlob::Constant { label, bit } => {
                if bit.is_some() != ext {
                    return Err(bad("constant blob"));
                }
                WireValue { label: *label, ptr: bit.unwrap_or(label.lsb()) }
            }
            GateBlob::Unary { side, ct, bit } => {
                if bit.is_some() != ext {
                    return Err(bad("unary blob"));
                }
                let src = if *side == Side::A { a } else { b };
                gates::eval_unary(k, src, *ct, *bit, gid)
            }
            GateBlob::Free if kind.uses_global_offset() => WireValue::from_lsb(a.label ^ b.label),
            GateBlob::Free if kind == SchemeKind::FlexorGrr2 => WireValue { label: a.label ^ b.label, ptr: a.ptr ^ b.ptr },
            GateBlob::Buffer(ct) if kind == SchemeKind::FlexorGrr2 => {
                let xa = gates::flexor_eval_translate(k, a, *ct, gid);
                WireValue { label: xa ^ b.label, ptr: a.ptr ^ b.ptr }
            }
            GateBlob::Rows(rows) => {
                let expect = if kind == SchemeKind::ClassicPP { 4 } else { 3 };
                if !matches!(kind, SchemeKind::ClassicPP | SchemeKind::Grr3 | SchemeKind::FreeXor) || rows.len() != expect {
                    return Err(bad("row table"));
                }
                WireValue::from_lsb(gates::eval_table(&self.params.dkc, a.label, b.label, rows, gid))
            }
            GateBlob::Grr2 { even, points, bits } if ext => {
                if kind == SchemeKind::FlexorGrr2 && *even {
                    return Err(bad("interpolated XOR"));
                }
                let mode = if kind == SchemeKind::Grr2 { RowKeys::Dkc } else { RowKeys::Kdf };
                let row = ((a.ptr as usize) << 1) | b.ptr as usize;
                let (key, mask) = gates::row_key(&self.params.dkc, mode, a.label, b.label, gid, row);
                gates::eval_gate_grr2(self.field, *even, points, *bits, row, key, mask)
            }
            GateBlob::Half { tg, te } if kind == SchemeKind::HalfGates => {
                WireValue::from_lsb(gates::ev_and_halfgates(k, a.label, b.label, *tg, *te, g as u64))
            }
            _ => return Err(bad("unexpected blob")),
        };
        self.wires.push(out);
        self.next += 1;
        Ok(())
    }

    /// Output labels. Only meaningful once every gate has been evaluated.
    pub fn outputs(&self) -> Vec<Label> {
        self.wires[self.topology.first_output()..].iter().map(|w| w.label).collect()
    }
}

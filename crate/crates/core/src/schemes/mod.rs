//! Garbling schemes behind one `gb` / `en` / `ev` / `de` interface.
//!
//! | scheme       | odd gate        | XOR gate         |
//! |--------------|-----------------|------------------|
//! | `ClassicPP`  | 4 rows          | 4 rows           |
//! | `Grr3`       | 3 rows          | 3 rows           |
//! | `FreeXor`    | 3 rows          | free             |
//! | `Grr2`       | 2 points + 4 b  | 2 points + 4 b   |
//! | `FlexorGrr2` | 2 points + 4 b  | 0 or 1 row       |
//! | `HalfGates`  | 2 rows          | free             |
//!
//! Constant and unary gates cost one row (or one label) everywhere.

mod compat;
mod evaluator;
mod flexor;
mod garbler;
pub mod gates;
pub mod gcf;
mod size;

use std::fmt;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Side, Topology};
use crate::dkc::{kdf_raw, DkcError, DkcKind, DkcVariant, Tweak};
use crate::label::{Label, SUPPORTED_K};

pub use compat::{compatibility, compatible, Compat, Technique};
pub use evaluator::Evaluator;
pub use flexor::{flexor_offset_classes, OffsetClasses};
pub use garbler::Garbler;
pub use gates::{WirePair, WireValue};
pub use size::{garbled_size, BlobKind, GarbledSize};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SchemeKind {
    ClassicPP,
    Grr3,
    FreeXor,
    Grr2,
    FlexorGrr2,
    HalfGates,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 6] = [
        SchemeKind::ClassicPP,
        SchemeKind::Grr3,
        SchemeKind::FreeXor,
        SchemeKind::Grr2,
        SchemeKind::FlexorGrr2,
        SchemeKind::HalfGates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ClassicPP => "classic-pp",
            SchemeKind::Grr3 => "grr3",
            SchemeKind::FreeXor => "free-xor",
            SchemeKind::Grr2 => "grr2",
            SchemeKind::FlexorGrr2 => "flexor-grr2",
            SchemeKind::HalfGates => "half-gates",
        }
    }

    pub fn from_name(s: &str) -> Option<SchemeKind> {
        SchemeKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub(crate) fn tag(self) -> u8 {
        SchemeKind::ALL.iter().position(|k| *k == self).unwrap() as u8
    }

    pub(crate) fn from_tag(t: u8) -> Option<SchemeKind> {
        SchemeKind::ALL.get(t as usize).copied()
    }

    /// Pointer bits travel beside the labels instead of inside them.
    pub fn uses_external_values(self) -> bool {
        matches!(self, SchemeKind::Grr2 | SchemeKind::FlexorGrr2)
    }

    /// All wires share one global offset.
    pub fn uses_global_offset(self) -> bool {
        matches!(self, SchemeKind::FreeXor | SchemeKind::HalfGates)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SchemeId {
    pub kind: SchemeKind,
    /// Hash-pair output decoding that rejects forged labels. Half gates only.
    pub authenticity_decode: bool,
}

impl SchemeId {
    pub const fn new(kind: SchemeKind) -> SchemeId {
        SchemeId { kind, authenticity_decode: false }
    }

    pub const fn half_gates_authenticated() -> SchemeId {
        SchemeId { kind: SchemeKind::HalfGates, authenticity_decode: true }
    }
}

impl From<SchemeKind> for SchemeId {
    fn from(kind: SchemeKind) -> Self {
        SchemeId::new(kind)
    }
}

/// Everything both parties must agree on before garbling.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GarbleParams {
    pub scheme: SchemeId,
    pub dkc: DkcVariant,
}

impl GarbleParams {
    /// Fixed-key AES at the given label width.
    pub fn new(scheme: impl Into<SchemeId>, k: usize) -> Result<Self, SchemeError> {
        Self::with_dkc(scheme, DkcKind::FixedKeyAes, k)
    }

    pub fn with_dkc(scheme: impl Into<SchemeId>, dkc: DkcKind, k: usize) -> Result<Self, SchemeError> {
        let scheme = scheme.into();
        if !SUPPORTED_K.contains(&k) {
            return Err(SchemeError::Dkc(DkcError::UnsupportedWidth(k)));
        }
        if scheme.authenticity_decode && scheme.kind != SchemeKind::HalfGates {
            return Err(SchemeError::Unsupported(format!(
                "authenticity decoding is only defined for half gates, not {}",
                scheme.kind
            )));
        }
        Ok(GarbleParams { scheme, dkc: DkcVariant::new(dkc, k)? })
    }

    pub fn k(&self) -> usize {
        self.dkc.k
    }

    pub fn kind(&self) -> SchemeKind {
        self.scheme.kind
    }
}

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Dkc(#[from] DkcError),
    #[error("{0}")]
    Unsupported(String),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("malformed garbled data: {0}")]
    Malformed(String),
}

/// Garbled material for one gate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GateBlob {
    /// XOR under a shared offset.
    Free,
    /// Ciphertexts in pointer order: 4, or 3 with the first row implied.
    Rows(Vec<Label>),
    /// Interpolation points at nodes 5 and 6 (odd) or the two line values at
    /// node 5 ordered by output external value (even), and one masked
    /// external value per row.
    Grr2 { even: bool, points: [Label; 2], bits: u8 },
    Half { tg: Label, te: Label },
    /// Offset translation ciphertext for an XOR with unequal offsets.
    Buffer(Label),
    Unary { side: Side, ct: Label, bit: Option<bool> },
    Constant { label: Label, bit: Option<bool> },
}

impl GateBlob {
    pub fn ciphertexts(&self) -> usize {
        match self {
            GateBlob::Free => 0,
            GateBlob::Rows(r) => r.len(),
            GateBlob::Grr2 { .. } | GateBlob::Half { .. } => 2,
            GateBlob::Buffer(_) | GateBlob::Unary { .. } | GateBlob::Constant { .. } => 1,
        }
    }

    pub fn payload_bits(&self, k: usize) -> usize {
        match self {
            GateBlob::Grr2 { .. } => 2 * k + 4,
            GateBlob::Unary { bit, .. } | GateBlob::Constant { bit, .. } => k + bit.is_some() as usize,
            other => other.ciphertexts() * k,
        }
    }

    pub fn payload_bytes(&self, k: usize) -> usize {
        self.payload_bits(k).div_ceil(8)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GarbledCircuit {
    pub params: GarbleParams,
    pub topology: Topology,
    pub blobs: Vec<GateBlob>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EncodingInfo {
    /// Both labels of every input wire.
    Pairs(Vec<(Label, Label)>),
    /// FALSE labels and the global offset.
    Offset { w0: Vec<Label>, r: Label },
}

impl EncodingInfo {
    pub fn n(&self) -> usize {
        match self {
            EncodingInfo::Pairs(p) => p.len(),
            EncodingInfo::Offset { w0, .. } => w0.len(),
        }
    }

    pub fn label(&self, i: usize, bit: bool) -> Label {
        match self {
            EncodingInfo::Pairs(p) => {
                if bit {
                    p[i].1
                } else {
                    p[i].0
                }
            }
            EncodingInfo::Offset { w0, r } => w0[i] ^ r.select(bit),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DecodingInfo {
    /// Both labels of every output wire.
    Pairs(Vec<(Label, Label)>),
    /// Lsb of every output FALSE label.
    Lsb(Vec<bool>),
    /// Hashes of both labels of every output wire. `first_output` is the
    /// zero-based wire index of the first output, which feeds the tweaks.
    Hashes { k: usize, first_output: u64, pairs: Vec<(Label, Label)> },
}

impl DecodingInfo {
    pub fn m(&self) -> usize {
        match self {
            DecodingInfo::Pairs(p) | DecodingInfo::Hashes { pairs: p, .. } => p.len(),
            DecodingInfo::Lsb(b) => b.len(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("output {0} carries an unrecognized label")]
    Bottom(usize),
    #[error("expected {expected} output labels, got {got}")]
    Length { expected: usize, got: usize },
}

/// Wire id of the gate driving `wire` as used in tweaks: the one-based
/// wire number.
#[inline]
pub(crate) fn gate_tweak_id(wire: usize) -> u64 {
    wire as u64 + 1
}

pub(crate) fn output_hash(k: usize, wire: u64, label: Label) -> Label {
    kdf_raw(k, &[label], Tweak::new(wire + 1, gates::DECODE_POS), false).v
}

/// Garbles the whole circuit.
pub fn gb(params: GarbleParams, circuit: &Circuit, seed: u64) -> Result<(GarbledCircuit, EncodingInfo, DecodingInfo), SchemeError> {
    let mut g = Garbler::new(params, circuit, seed)?;
    let e = g.encoding();
    let mut blobs = Vec::with_capacity(circuit.q());
    while let Some(b) = g.next_gate() {
        blobs.push(b);
    }
    let d = g.finish();
    Ok((GarbledCircuit { params, topology: circuit.topology(), blobs }, e, d))
}

/// Picks one label per input bit.
pub fn en(e: &EncodingInfo, x: &[bool]) -> Result<Vec<Label>, SchemeError> {
    if x.len() != e.n() {
        return Err(SchemeError::Length { expected: e.n(), got: x.len() });
    }
    Ok(x.iter().enumerate().map(|(i, b)| e.label(i, *b)).collect())
}

/// Evaluates the garbled circuit on garbled input, returning output labels.
pub fn ev(f: &GarbledCircuit, x: &[Label]) -> Result<Vec<Label>, SchemeError> {
    let mut ev = Evaluator::new(f.params, &f.topology, x)?;
    for blob in &f.blobs {
        ev.eval_next(blob)?;
    }
    Ok(ev.outputs())
}

/// Maps output labels to bits, or reports the first unrecognized label.
pub fn de(d: &DecodingInfo, y: &[Label]) -> Result<Vec<bool>, DecodeError> {
    if y.len() != d.m() {
        return Err(DecodeError::Length { expected: d.m(), got: y.len() });
    }
    match d {
        DecodingInfo::Pairs(pairs) => pairs
            .iter()
            .zip(y)
            .enumerate()
            .map(|(i, ((w0, w1), l))| {
                if l == w0 {
                    Ok(false)
                } else if l == w1 {
                    Ok(true)
                } else {
                    Err(DecodeError::Bottom(i))
                }
            })
            .collect(),
        DecodingInfo::Lsb(bits) => Ok(bits.iter().zip(y).map(|(d, l)| d ^ l.lsb()).collect()),
        DecodingInfo::Hashes { k, first_output, pairs } => pairs
            .iter()
            .zip(y)
            .enumerate()
            .map(|(i, ((h0, h1), l))| {
                let h = output_hash(*k, first_output + i as u64, *l);
                if h == *h0 {
                    Ok(false)
                } else if h == *h1 {
                    Ok(true)
                } else {
                    Err(DecodeError::Bottom(i))
                }
            })
            .collect(),
    }
}

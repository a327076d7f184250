//! Gate-level boolean circuits.
//!
//! Wires are numbered from zero internally: inputs occupy `0..n` and gate `g`
//! drives wire `n + g`. The text format in [`scd`] uses one-based numbering.

pub mod random;
pub mod scd;

use std::fmt;

use thiserror::Error;

pub use scd::{parse_scd, serialize_scd};

/// Zero-based wire index.
pub type WireId = usize;

/// A 2-input truth table. Bit `2a + b` holds the output for inputs `(a, b)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TruthTable(u8);

impl TruthTable {
    pub const AND: TruthTable = TruthTable(0b1000);
    pub const NAND: TruthTable = TruthTable(0b0111);
    pub const OR: TruthTable = TruthTable(0b1110);
    pub const NOR: TruthTable = TruthTable(0b0001);
    pub const XOR: TruthTable = TruthTable(0b0110);
    pub const XNOR: TruthTable = TruthTable(0b1001);

    /// Builds a table from its low four bits; higher bits are ignored.
    pub const fn from_bits(bits: u8) -> Self {
        TruthTable(bits & 0xF)
    }

    /// Builds a table from outputs listed in the order (0,0), (0,1), (1,0), (1,1).
    pub fn from_rows(rows: [bool; 4]) -> Self {
        let mut bits = 0;
        for (i, r) in rows.iter().enumerate() {
            bits |= (*r as u8) << i;
        }
        TruthTable(bits)
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn eval(self, a: bool, b: bool) -> bool {
        (self.0 >> ((a as u8) << 1 | b as u8)) & 1 == 1
    }

    pub fn kind(self) -> GateKind {
        let t = self.0;
        match t.count_ones() {
            0 => GateKind::Constant(false),
            4 => GateKind::Constant(true),
            1 | 3 => {
                // The single cell whose value differs from the other three.
                let minority = if t.count_ones() == 1 { t } else { !t & 0xF };
                let cell = minority.trailing_zeros() as u8;
                let (i, j) = (cell >> 1 == 1, cell & 1 == 1);
                GateKind::Odd(OddParams {
                    alpha_a: !i,
                    alpha_b: !j,
                    alpha_c: t.count_ones() == 3,
                })
            }
            _ => match t {
                0b0110 => GateKind::Xor { negated: false },
                0b1001 => GateKind::Xor { negated: true },
                0b1100 => GateKind::Unary { input: Side::A, negated: false },
                0b0011 => GateKind::Unary { input: Side::A, negated: true },
                0b1010 => GateKind::Unary { input: Side::B, negated: false },
                0b0101 => GateKind::Unary { input: Side::B, negated: true },
                _ => unreachable!(),
            },
        }
    }

    pub fn class(self) -> GateClass {
        match self.kind() {
            GateKind::Xor { negated: false } => GateClass::Xor,
            GateKind::Xor { negated: true } => GateClass::Xnor,
            GateKind::Odd(_) if self == Self::AND => GateClass::And,
            GateKind::Odd(_) => GateClass::OtherOdd,
            GateKind::Constant(_) | GateKind::Unary { .. } => GateClass::Trivial,
        }
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..4 {
            write!(f, "{}", (self.0 >> i) & 1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    A,
    B,
}

/// An odd gate written as `((a ^ alpha_a) & (b ^ alpha_b)) ^ alpha_c`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OddParams {
    pub alpha_a: bool,
    pub alpha_b: bool,
    pub alpha_c: bool,
}

impl OddParams {
    /// The input pair whose output differs from the other three.
    pub fn minority_cell(self) -> (bool, bool) {
        (!self.alpha_a, !self.alpha_b)
    }

    pub fn eval(self, a: bool, b: bool) -> bool {
        ((a ^ self.alpha_a) & (b ^ self.alpha_b)) ^ self.alpha_c
    }
}

/// Structural decomposition of a truth table.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GateKind {
    Constant(bool),
    Unary { input: Side, negated: bool },
    Xor { negated: bool },
    Odd(OddParams),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GateClass {
    Xor,
    Xnor,
    And,
    OtherOdd,
    Trivial,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GateSpec {
    pub out: WireId,
    pub in_a: WireId,
    pub in_b: WireId,
    pub truth_table: TruthTable,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, Debug)]
pub struct GateStats {
    pub xor_count: usize,
    pub xnor_count: usize,
    pub and_count: usize,
    pub other_odd_count: usize,
    pub trivial_count: usize,
}

impl GateStats {
    pub fn total(&self) -> usize {
        self.xor_count + self.xnor_count + self.and_count + self.other_odd_count + self.trivial_count
    }

    pub fn odd_count(&self) -> usize {
        self.and_count + self.other_odd_count
    }

    pub fn even_count(&self) -> usize {
        self.xor_count + self.xnor_count
    }

    pub fn record(&mut self, class: GateClass) {
        match class {
            GateClass::Xor => self.xor_count += 1,
            GateClass::Xnor => self.xnor_count += 1,
            GateClass::And => self.and_count += 1,
            GateClass::OtherOdd => self.other_odd_count += 1,
            GateClass::Trivial => self.trivial_count += 1,
        }
    }
}

/// Errors carry one-based wire numbers so they line up with SCD text.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("gate {gate}: {message}")]
    Constraint { gate: usize, message: String },
    #[error("gate {gate}: wire {wire} does not exist")]
    DanglingWire { gate: usize, wire: usize },
    #[error("gate {gate}: reads output wire {wire}")]
    OutputFeedsGate { gate: usize, wire: usize },
    #[error("expected {expected} input bits, got {got}")]
    InputLength { expected: usize, got: usize },
}

/// A validated circuit `f = (n, m, q, A, B, G)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Circuit {
    n: usize,
    m: usize,
    gates: Vec<GateSpec>,
}

impl Circuit {
    /// Builds and validates a circuit. `gates[g].out` must equal `n + g`.
    pub fn new(n: usize, m: usize, gates: Vec<GateSpec>) -> Result<Self, CircuitError> {
        let c = Circuit { n, m, gates };
        validate(&c)?;
        Ok(c)
    }

    /// Builds a circuit without checking it. Everything downstream assumes
    /// validity, so this exists only to exercise [`validate`].
    pub fn new_unchecked(n: usize, m: usize, gates: Vec<GateSpec>) -> Self {
        Circuit { n, m, gates }
    }

    /// Convenience constructor from `(in_a, in_b, table)` triples in gate order.
    pub fn from_gates(
        n: usize,
        m: usize,
        gates: impl IntoIterator<Item = (WireId, WireId, TruthTable)>,
    ) -> Result<Self, CircuitError> {
        let gates = gates
            .into_iter()
            .enumerate()
            .map(|(g, (a, b, tt))| GateSpec { out: n + g, in_a: a, in_b: b, truth_table: tt })
            .collect();
        Self::new(n, m, gates)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.gates.len()
    }

    pub fn wire_count(&self) -> usize {
        self.n + self.gates.len()
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn gate(&self, g: usize) -> &GateSpec {
        &self.gates[g]
    }

    /// First output wire; outputs are `first_output()..wire_count()`.
    pub fn first_output(&self) -> WireId {
        self.wire_count() - self.m
    }

    pub fn is_output(&self, w: WireId) -> bool {
        w >= self.first_output() && w < self.wire_count()
    }

    pub fn output_wires(&self) -> std::ops::Range<WireId> {
        self.first_output()..self.wire_count()
    }

    /// Wiring without truth tables.
    pub fn topology(&self) -> Topology {
        Topology {
            n: self.n,
            m: self.m,
            wires: self.gates.iter().map(|g| (g.in_a, g.in_b)).collect(),
        }
    }
}

/// The public part of a circuit: `(n, m, q, A, B)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Topology {
    pub n: usize,
    pub m: usize,
    pub wires: Vec<(WireId, WireId)>,
}

impl Topology {
    pub fn q(&self) -> usize {
        self.wires.len()
    }

    pub fn wire_count(&self) -> usize {
        self.n + self.wires.len()
    }

    pub fn first_output(&self) -> WireId {
        self.wire_count() - self.m
    }
}

/// Checks every structural invariant.
///
/// `A(g) = B(g)` is accepted so that unary gates can be written with one
/// input. Circuits with a single input are accepted with a warning.
pub fn validate(c: &Circuit) -> Result<(), CircuitError> {
    let (n, m, q) = (c.n, c.m, c.gates.len());
    if n == 0 {
        return Err(CircuitError::Shape("circuit needs at least one input".into()));
    }
    if m == 0 {
        return Err(CircuitError::Shape("circuit needs at least one output".into()));
    }
    if q == 0 {
        return Err(CircuitError::Shape("circuit needs at least one gate".into()));
    }
    if m > q {
        return Err(CircuitError::Shape(format!("{m} outputs but only {q} gates")));
    }
    if n < 2 {
        log::warn!("circuit has a single input wire");
    }
    let r = n + q;
    let first_out = r - m;
    for (g, spec) in c.gates.iter().enumerate() {
        let w = n + g;
        let gate = w + 1;
        if spec.out != w {
            return Err(CircuitError::Constraint {
                gate,
                message: format!("drives wire {} instead of {}", spec.out + 1, gate),
            });
        }
        for x in [spec.in_a, spec.in_b] {
            if x >= r {
                return Err(CircuitError::DanglingWire { gate, wire: x + 1 });
            }
        }
        if spec.in_a > spec.in_b {
            return Err(CircuitError::Constraint {
                gate,
                message: format!("A = {} exceeds B = {}", spec.in_a + 1, spec.in_b + 1),
            });
        }
        if spec.in_b >= w {
            return Err(CircuitError::Constraint {
                gate,
                message: format!("B = {} is not an earlier wire", spec.in_b + 1),
            });
        }
        for x in [spec.in_a, spec.in_b] {
            if x >= first_out {
                return Err(CircuitError::OutputFeedsGate { gate, wire: x + 1 });
            }
        }
    }
    Ok(())
}

/// Evaluates the circuit gate by gate on cleartext bits.
pub fn evaluate_plain(c: &Circuit, x: &[bool]) -> Result<Vec<bool>, CircuitError> {
    if x.len() != c.n {
        return Err(CircuitError::InputLength { expected: c.n, got: x.len() });
    }
    let mut v = Vec::with_capacity(c.wire_count());
    v.extend_from_slice(x);
    for spec in &c.gates {
        debug_assert!(spec.in_a < v.len() && spec.in_b < v.len());
        let bit = spec.truth_table.eval(v[spec.in_a], v[spec.in_b]);
        v.push(bit);
    }
    Ok(v.split_off(c.first_output()))
}

pub fn gate_stats(c: &Circuit) -> GateStats {
    let mut s = GateStats::default();
    for g in &c.gates {
        s.record(g.truth_table.class());
    }
    s
}

/// Little-endian bit decomposition of `value`, `len` bits long.
pub fn bits_of(value: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| i < 64 && (value >> i) & 1 == 1).collect()
}

//! The wiring of a circuit as a map from outgoing to incoming wires.
//!
//! Outgoing wires are the circuit inputs followed by the outputs of the
//! non-output gates, so outgoing wire `i` is simply wire `i`. Incoming wire
//! `2g` is the first input of gate `g` and `2g + 1` its second.

use num_bigint::{BigInt, BigUint};

use crate::circuit::{Circuit, CircuitError, TruthTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitMapping {
    /// Number of outgoing wires, `n + g - m`.
    pub ow: usize,
    /// Source outgoing wire of every incoming wire; length `2g`.
    pub inv: Vec<usize>,
}

impl CircuitMapping {
    pub fn iw(&self) -> usize {
        self.inv.len()
    }

    /// Incoming wires fed by each outgoing wire, ascending.
    pub fn forward(&self) -> Vec<Vec<usize>> {
        let mut f = vec![Vec::new(); self.ow];
        for (j, &i) in self.inv.iter().enumerate() {
            f[i].push(j);
        }
        f
    }
}

pub fn circuit_mapping(c: &Circuit) -> CircuitMapping {
    let inv = c.gates().iter().flat_map(|g| [g.in_a, g.in_b]).collect();
    CircuitMapping { ow: c.first_output(), inv }
}

/// Inverse of [`circuit_mapping`] given the gate functions in order.
pub fn rebuild_circuit(n: usize, m: usize, mapping: &CircuitMapping, tables: &[TruthTable]) -> Result<Circuit, CircuitError> {
    if mapping.iw() != 2 * tables.len() {
        return Err(CircuitError::Shape(format!("{} incoming wires for {} gates", mapping.iw(), tables.len())));
    }
    Circuit::from_gates(n, m, tables.iter().enumerate().map(|(g, tt)| (mapping.inv[2 * g], mapping.inv[2 * g + 1], *tt)))
}

/// Number of onto maps from `n` incoming to `m` outgoing wires, by
/// inclusion-exclusion. This assumes every outgoing wire is used.
pub fn count_mappings(m: usize, n: usize) -> BigUint {
    let mut sum = BigInt::from(0);
    let mut binom = BigInt::from(1);
    for i in 0..=m {
        let term = &binom * BigInt::from(m - i).pow(n as u32);
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        binom = binom * (m - i) / (i + 1);
    }
    sum.to_biguint().expect("inclusion-exclusion sum is non-negative")
}

//! Seeded random circuits for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{Circuit, GateStats, TruthTable};

#[derive(Clone, Debug)]
pub struct RandomCircuitConfig {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    /// Probability that a gate is XOR or XNOR.
    pub xor_fraction: f64,
    /// Among even gates, the share that are XNOR.
    pub xnor_share: f64,
    /// Among odd gates, the share that are plain AND; the rest are drawn
    /// uniformly from the other seven odd tables.
    pub and_share: f64,
    /// Probability that a gate is constant or unary.
    pub trivial_fraction: f64,
    /// Gates per layer. Each gate reads at least one wire from the previous layer.
    pub layer_width: usize,
}

impl RandomCircuitConfig {
    pub fn new(n: usize, m: usize, q: usize, xor_fraction: f64) -> Self {
        RandomCircuitConfig {
            n,
            m,
            q,
            xor_fraction,
            xnor_share: 0.1,
            and_share: 0.5,
            trivial_fraction: 0.0,
            layer_width: n.max(8),
        }
    }
}

/// A generated circuit along with the gate classes the generator drew.
#[derive(Clone, Debug)]
pub struct Generated {
    pub circuit: Circuit,
    pub draws: GateStats,
}

const OTHER_ODD: [u8; 7] = [0b0001, 0b0010, 0b0100, 0b0111, 0b1011, 0b1101, 0b1110];
const TRIVIAL: [u8; 6] = [0b0000, 0b1111, 0b0011, 0b0101, 0b1010, 0b1100];

pub fn random_circuit(cfg: &RandomCircuitConfig, seed: u64) -> Generated {
    assert!(cfg.n >= 1 && cfg.m >= 1 && cfg.q >= cfg.m, "bad random circuit shape");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (n, q) = (cfg.n, cfg.q);
    let first_out = n + q - cfg.m;
    let width = cfg.layer_width.max(1);
    let mut draws = GateStats::default();
    let mut gates = Vec::with_capacity(q);

    for g in 0..q {
        let layer = g / width;
        let layer_start = n + layer * width;
        let avail = layer_start.min(first_out).min(n + g);
        let prev_start = if layer == 0 { 0 } else { n + (layer - 1) * width };
        let prev_start = prev_start.min(avail.saturating_sub(1));

        let (a, b) = if avail == 1 {
            (0, 0)
        } else {
            let x = rng.gen_range(prev_start..avail);
            let mut y = rng.gen_range(0..avail);
            while y == x {
                y = rng.gen_range(0..avail);
            }
            (x.min(y), x.max(y))
        };

        let roll: f64 = rng.gen();
        let bits = if roll < cfg.trivial_fraction {
            TRIVIAL[rng.gen_range(0..TRIVIAL.len())]
        } else if roll < cfg.trivial_fraction + cfg.xor_fraction * (1.0 - cfg.trivial_fraction) {
            if rng.gen_bool(cfg.xnor_share) {
                TruthTable::XNOR.bits()
            } else {
                TruthTable::XOR.bits()
            }
        } else if rng.gen_bool(cfg.and_share) {
            TruthTable::AND.bits()
        } else {
            OTHER_ODD[rng.gen_range(0..OTHER_ODD.len())]
        };
        let tt = TruthTable::from_bits(bits);
        draws.record(tt.class());
        gates.push((a, b, tt));
    }

    let circuit = Circuit::from_gates(n, cfg.m, gates).expect("generator emits valid circuits");
    Generated { circuit, draws }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gate_stats;

    #[test]
    fn draws_match_stats() {
        let mut cfg = RandomCircuitConfig::new(6, 4, 1000, 0.5);
        cfg.trivial_fraction = 0.1;
        let g = random_circuit(&cfg, 7);
        let s = gate_stats(&g.circuit);
        assert_eq!(s, g.draws);
        assert_eq!(s.total(), 1000);
        assert!(s.trivial_count > 0 && s.xnor_count > 0 && s.other_odd_count > 0);
    }

    #[test]
    fn deterministic() {
        let cfg = RandomCircuitConfig::new(3, 2, 50, 0.82);
        assert_eq!(random_circuit(&cfg, 1).circuit, random_circuit(&cfg, 1).circuit);
        assert_ne!(random_circuit(&cfg, 1).circuit, random_circuit(&cfg, 2).circuit);
    }

    #[test]
    fn single_input() {
        let cfg = RandomCircuitConfig::new(1, 1, 5, 0.0);
        let g = random_circuit(&cfg, 3);
        assert_eq!(g.circuit.gate(0).in_a, 0);
        assert_eq!(g.circuit.gate(0).in_b, 0);
    }
}

use garblekit::circuit::random::{random_circuit, RandomCircuitConfig};
use garblekit::circuit::{bits_of, evaluate_plain, gate_stats, parse_scd, serialize_scd, validate, Circuit};
use proptest::prelude::*;

#[test]
fn scd_round_trip_on_random_circuits() {
    for seed in 0..100 {
        let mut cfg = RandomCircuitConfig::new(2 + seed as usize % 7, 1 + seed as usize % 4, 10 + 7 * seed as usize, 0.5);
        cfg.trivial_fraction = 0.1;
        let c = random_circuit(&cfg, seed).circuit;
        let text = serialize_scd(&c);
        let back = parse_scd(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(serialize_scd(&back), text);
        assert!(validate(&back).is_ok());
    }
}

/// Direct simulation written independently of `evaluate_plain`.
fn simulate(c: &Circuit, x: &[bool]) -> Vec<bool> {
    let mut w = vec![false; c.wire_count()];
    w[..c.n()].copy_from_slice(x);
    for g in c.gates() {
        let idx = (w[g.in_a] as u8) * 2 + w[g.in_b] as u8;
        let row = g.truth_table.to_string().as_bytes()[idx as usize];
        w[g.out] = row == b'1';
    }
    w[c.first_output()..].to_vec()
}

#[test]
fn stats_agree_with_generator_draws() {
    let mut cfg = RandomCircuitConfig::new(8, 8, 1000, 0.4);
    cfg.trivial_fraction = 0.05;
    let g = random_circuit(&cfg, 99);
    assert_eq!(gate_stats(&g.circuit), g.draws);
    assert_eq!(g.draws.total(), 1000);
}

proptest! {
    #[test]
    fn plain_evaluation_matches_simulation(seed in any::<u64>(), n in 1usize..=4, q in 1usize..40, xor in 0.0f64..1.0) {
        let mut cfg = RandomCircuitConfig::new(n, 1 + (seed as usize % q.min(4)), q, xor);
        cfg.trivial_fraction = 0.2;
        let c = random_circuit(&cfg, seed).circuit;
        for x in 0..1u64 << n {
            let bits = bits_of(x, n);
            prop_assert_eq!(evaluate_plain(&c, &bits).unwrap(), simulate(&c, &bits));
        }
    }

    #[test]
    fn scd_text_is_canonical(seed in any::<u64>(), q in 1usize..80) {
        let c = random_circuit(&RandomCircuitConfig::new(3, 1, q, 0.5), seed).circuit;
        let s = serialize_scd(&c);
        prop_assert_eq!(serialize_scd(&parse_scd(&s).unwrap()), s);
    }
}

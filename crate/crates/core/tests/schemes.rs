use garblekit::circuit::random::{random_circuit, RandomCircuitConfig};
use garblekit::circuit::{bits_of, evaluate_plain, gate_stats, parse_scd, Circuit, GateKind, TruthTable};
use garblekit::dkc::DkcKind;
use garblekit::label::Label;
use garblekit::schemes::gates::{eval_gate_grr2, garble_gate_grr2};
use garblekit::schemes::{
    de, en, ev, flexor_offset_classes, garbled_size, gb, BlobKind, DecodeError, EncodingInfo, Evaluator, GarbleParams,
    Garbler, GateBlob, SchemeId, SchemeKind,
};
use garblekit::gf2k::Gf2k;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Three inputs, six gates: OR, NAND, NOT, XOR, AND, NAND.
const SIX_GATE: &str = "SCD1 3 1 6
4 1 2 0111
5 1 2 1110
6 3 3 1100
7 4 5 0110
8 4 6 0001
9 7 8 1110
";

fn check_all_inputs(params: GarbleParams, c: &Circuit, seed: u64) {
    let (f, e, d) = gb(params, c, seed).unwrap();
    let n = c.n();
    let xs: Vec<u64> = if n <= 10 {
        (0..1u64 << n).collect()
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..64).map(|_| rng.gen::<u64>()).collect()
    };
    for x in xs {
        let bits = bits_of(x, n);
        let y = de(&d, &ev(&f, &en(&e, &bits).unwrap()).unwrap()).unwrap();
        assert_eq!(y, evaluate_plain(c, &bits).unwrap(), "{:?} x={x:b}", params.scheme);
    }
}

#[test]
fn six_gate_circuit_matches_hand_table() {
    let c = parse_scd(SIX_GATE.as_bytes()).unwrap();
    assert_eq!(c.q(), 6);
    for x in 0..8u64 {
        let (a, b, cc) = (x & 1 == 1, x & 2 == 2, x & 4 == 4);
        let d = a | b;
        let e = !(a & b);
        let f = !cc;
        let h = d ^ e;
        let k = d & f;
        let o = !h | !k;
        assert_eq!(evaluate_plain(&c, &[a, b, cc]).unwrap(), vec![o]);
    }
    assert_eq!(parse_scd(&garblekit::circuit::serialize_scd(&c)).unwrap(), c);
    for kind in SchemeKind::ALL {
        check_all_inputs(GarbleParams::new(kind, 128).unwrap(), &c, 1);
    }
}

#[test]
fn every_scheme_cipher_and_width() {
    let mut cfg = RandomCircuitConfig::new(5, 3, 120, 0.5);
    cfg.trivial_fraction = 0.15;
    for seed in 0..4 {
        let c = random_circuit(&cfg, seed).circuit;
        for kind in SchemeKind::ALL {
            for dkc in DkcKind::ALL {
                for k in [16, 32, 64, 128] {
                    check_all_inputs(GarbleParams::with_dkc(kind, dkc, k).unwrap(), &c, seed);
                }
            }
        }
        check_all_inputs(GarbleParams::new(SchemeId::half_gates_authenticated(), 128).unwrap(), &c, seed);
    }
}

#[test]
fn degenerate_wiring_and_single_input() {
    // NOT as NAND(x, x), then AND(x, x) and XOR(x, x) on the same wire.
    let c = Circuit::from_gates(
        1,
        3,
        [(0, 0, TruthTable::NAND), (0, 1, TruthTable::AND), (1, 1, TruthTable::XOR), (0, 1, TruthTable::XNOR)],
    )
    .unwrap();
    for kind in SchemeKind::ALL {
        check_all_inputs(GarbleParams::new(kind, 128).unwrap(), &c, 2);
    }
}

#[test]
fn point_and_permute_bits_differ() {
    let c = random_circuit(&RandomCircuitConfig::new(4, 2, 200, 0.5), 5).circuit;
    for kind in SchemeKind::ALL {
        let params = GarbleParams::new(kind, 128).unwrap();
        let mut g = Garbler::new(params, &c, 9).unwrap();
        g.decoding();
        for p in g.wire_pairs() {
            assert_ne!(p.w0, p.w1);
            if !kind.uses_external_values() {
                assert_ne!(p.w0.lsb(), p.w1.lsb(), "{kind}");
                assert_eq!(p.e0, p.w0.lsb());
            }
            if kind.uses_global_offset() {
                assert_eq!(p.w0 ^ p.w1, g.offset());
                assert!(g.offset().lsb());
            }
        }
    }
}

#[test]
fn evaluator_holds_one_label_per_wire() {
    let mut cfg = RandomCircuitConfig::new(4, 2, 150, 0.6);
    cfg.trivial_fraction = 0.1;
    let c = random_circuit(&cfg, 21).circuit;
    for kind in SchemeKind::ALL {
        let params = GarbleParams::new(kind, 128).unwrap();
        let mut g = Garbler::new(params, &c, 4).unwrap();
        let e = g.encoding();
        g.decoding();
        let pairs = g.wire_pairs().to_vec();
        let (f, _, _) = gb(params, &c, 4).unwrap();
        for x in 0..16u64 {
            let bits = bits_of(x, 4);
            let mut ev = Evaluator::new(params, &f.topology, &en(&e, &bits).unwrap()).unwrap();
            for b in &f.blobs {
                ev.eval_next(b).unwrap();
            }
            // cleartext value of every wire
            let mut vals = bits.clone();
            for s in c.gates() {
                vals.push(s.truth_table.eval(vals[s.in_a], vals[s.in_b]));
            }
            for (w, held) in ev.wire_values().iter().enumerate() {
                let p = pairs[w];
                assert_eq!(held.label, p.label(vals[w]), "{kind} wire {w}");
                assert_ne!(held.label, p.label(!vals[w]));
                assert_eq!(held.ptr, p.ptr(vals[w]));
            }
        }
    }
}

#[test]
fn encoding_examples() {
    let c = random_circuit(&RandomCircuitConfig::new(6, 1, 20, 0.5), 3).circuit;
    let (_, e, _) = gb(GarbleParams::new(SchemeKind::HalfGates, 128).unwrap(), &c, 1).unwrap();
    let EncodingInfo::Offset { w0, r } = &e else { panic!("offset encoding expected") };
    assert_eq!(&en(&e, &[false; 6]).unwrap(), w0);
    let one = en(&e, &[false, false, true, false, false, false]).unwrap();
    let diff: Vec<usize> = (0..6).filter(|i| one[*i] != w0[*i]).collect();
    assert_eq!(diff, vec![2]);
    assert_eq!(one[2], w0[2] ^ *r);
    assert!(en(&e, &[true]).is_err());
}

#[test]
fn scoreboard_counts() {
    // 10 AND + 90 XOR
    let mut gates: Vec<(usize, usize, TruthTable)> = vec![(0, 1, TruthTable::AND)];
    for i in 1..10 {
        gates.push((i % 4, 3 + i, TruthTable::AND));
    }
    for i in 0..90 {
        gates.push((i % 4, 13 + i, TruthTable::XOR));
    }
    let c = Circuit::from_gates(4, 1, gates).unwrap();
    let s = gate_stats(&c);
    assert_eq!((s.and_count, s.xor_count), (10, 90));
    let ct = |kind| garbled_size(&gb(GarbleParams::new(kind, 128).unwrap(), &c, 0).unwrap().0).ciphertexts;
    assert_eq!(ct(SchemeKind::HalfGates), 20);
    assert_eq!(ct(SchemeKind::FreeXor), 30);
    assert_eq!(ct(SchemeKind::ClassicPP), 400);
    assert_eq!(ct(SchemeKind::Grr3), 300);
    assert_eq!(ct(SchemeKind::Grr2), 200);
    let size = garbled_size(&gb(GarbleParams::new(SchemeKind::Grr2, 128).unwrap(), &c, 0).unwrap().0);
    assert_eq!(size.payload_bits, 100 * (2 * 128 + 4));
    assert_eq!(size.bytes, 100 * 33);
}

#[test]
fn flexor_buffers_follow_offset_classes() {
    for seed in 0..10 {
        let c = random_circuit(&RandomCircuitConfig::new(5, 2, 300, 0.7), seed).circuit;
        let classes = flexor_offset_classes(&c);
        let (f, _, _) = gb(GarbleParams::new(SchemeKind::FlexorGrr2, 128).unwrap(), &c, seed).unwrap();
        let size = garbled_size(&f);
        let buffers = size.per_kind.iter().find(|e| e.0 == BlobKind::Buffer).map_or(0, |e| e.2);
        assert_eq!(buffers, classes.total_cost());
        let xors = gate_stats(&c).even_count();
        assert!(classes.total_cost() <= 2 * xors);
        for (g, cost) in &classes.xor_cost {
            let expect = if *cost == 0 { GateBlob::Free.ciphertexts() } else { 1 };
            assert_eq!(f.blobs[*g].ciphertexts(), expect);
        }
    }
}

#[test]
fn half_gates_rejects_forged_label() {
    let c = random_circuit(&RandomCircuitConfig::new(4, 4, 100, 0.5), 8).circuit;
    let params = GarbleParams::new(SchemeId::half_gates_authenticated(), 128).unwrap();
    let (f, e, d) = gb(params, &c, 8).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let y = ev(&f, &en(&e, &[true, false, true, true]).unwrap()).unwrap();
    assert!(de(&d, &y).is_ok());
    for _ in 0..100 {
        let mut forged = y.clone();
        let i = rng.gen_range(0..forged.len());
        forged[i] = Label::random(&mut rng, 128);
        assert_eq!(de(&d, &forged), Err(DecodeError::Bottom(i)));
    }
    // the plain variant cannot notice
    let (f, e, d) = gb(GarbleParams::new(SchemeKind::HalfGates, 128).unwrap(), &c, 8).unwrap();
    let mut y = ev(&f, &en(&e, &[true, false, true, true]).unwrap()).unwrap();
    y[0] = Label::random(&mut rng, 128);
    assert!(de(&d, &y).is_ok());
}

#[test]
fn grr2_every_row_recovers_its_label() {
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    let field = Gf2k::get(128).unwrap();
    for bits in 0..16u8 {
        let tt = TruthTable::from_bits(bits);
        let even = match tt.kind() {
            GateKind::Xor { .. } => true,
            GateKind::Odd(_) => false,
            _ => continue,
        };
        for _ in 0..20 {
            let keys = [0; 4].map(|_| Label::random(&mut rng, 128));
            let masks = [0; 4].map(|_| rng.gen::<bool>());
            let (ea, eb) = (rng.gen::<bool>(), rng.gen::<bool>());
            let values: [bool; 4] = std::array::from_fn(|r| tt.eval(ea ^ (r >> 1 == 1), eb ^ (r & 1 == 1)));
            let c0 = rng.gen();
            let g = garble_gate_grr2(field, keys, masks, values, even, c0);
            let GateBlob::Grr2 { points, bits, .. } = g.blob else { unreachable!() };
            for r in 0..4 {
                let got = eval_gate_grr2(field, even, &points, bits, r, keys[r], masks[r]);
                assert_eq!(got.label, g.out.label(values[r]));
                assert_eq!(got.ptr, g.out.ptr(values[r]));
            }
        }
    }
}

#[test]
fn garbling_is_deterministic() {
    let c = random_circuit(&RandomCircuitConfig::new(4, 2, 80, 0.5), 1).circuit;
    for kind in SchemeKind::ALL {
        let params = GarbleParams::new(kind, 64).unwrap();
        assert_eq!(gb(params, &c, 5).unwrap(), gb(params, &c, 5).unwrap());
        assert_ne!(gb(params, &c, 5).unwrap().0, gb(params, &c, 6).unwrap().0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn correctness_on_random_circuits(
        seed in any::<u64>(),
        n in 1usize..6,
        q in 1usize..60,
        xor in prop::sample::select(vec![0.0, 0.5, 0.82, 1.0]),
        kind in prop::sample::select(SchemeKind::ALL.to_vec()),
    ) {
        let m = 1 + (seed as usize % q.min(3));
        let mut cfg = RandomCircuitConfig::new(n, m, q, xor);
        cfg.trivial_fraction = 0.1;
        let c = random_circuit(&cfg, seed).circuit;
        check_all_inputs(GarbleParams::new(kind, 64).unwrap(), &c, seed);
    }
}

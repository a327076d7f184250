use std::net::{TcpListener, TcpStream};
use std::thread;

use garblekit::channel::{mem_pair, Channel, ChannelError, Frame, MemChannel, Recorder, StreamChannel, Tag};
use garblekit::circuit::random::{random_circuit, RandomCircuitConfig};
use garblekit::circuit::{bits_of, evaluate_plain, Circuit, GateClass, GateSpec, TruthTable};
use garblekit::ot::{ot_receive, ot_send, OtBatch};
use garblekit::runtime::{run_2pc, run_evaluator, run_garbler, Mode, Ownership, ProtocolConfig, Reveal, RuntimeError};
use garblekit::schemes::{GarbleParams, SchemeId, SchemeKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn cfg(scheme: impl Into<SchemeId>, mode: Mode, reveal: Reveal, own: Ownership) -> ProtocolConfig {
    ProtocolConfig { params: GarbleParams::new(scheme, 128).unwrap(), mode, reveal, ownership: own }
}

fn split_inputs(own: &Ownership, x: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let g = own.garbler_wires().iter().map(|&w| x[w]).collect();
    let e = own.evaluator_wires().iter().map(|&w| x[w]).collect();
    (g, e)
}

#[test]
fn every_scheme_mode_and_reveal() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for (i, kind) in SchemeKind::ALL.into_iter().enumerate() {
        let mut c = RandomCircuitConfig::new(5, 3, 120, 0.5);
        c.trivial_fraction = 0.05;
        let circuit = random_circuit(&c, i as u64).circuit;
        for mode in [Mode::Monolithic, Mode::Pipelined] {
            for reveal in [Reveal::GarblerDecodes, Reveal::ShipDecoding] {
                let own = Ownership::from_mask((0..5).map(|_| rng.gen()).collect());
                let cfg = cfg(kind, mode, reveal, own.clone());
                for x in 0..32 {
                    let bits = bits_of(x, 5);
                    let (xg, xe) = split_inputs(&own, &bits);
                    let s = run_2pc(&cfg, &circuit, &xg, &xe, x).unwrap();
                    let want = evaluate_plain(&circuit, &bits).unwrap();
                    assert_eq!(s.garbler.output, want, "{kind} {mode:?} {reveal:?}");
                    assert_eq!(s.evaluator.output, want);
                }
            }
        }
    }
}

#[test]
fn pipelined_matches_monolithic_and_streams() {
    let circuit = random_circuit(&RandomCircuitConfig::new(16, 8, 10_000, 0.6), 5).circuit;
    let own = Ownership::split(16, 8);
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let x: Vec<bool> = (0..16).map(|_| rng.gen()).collect();
    let (xg, xe) = split_inputs(&own, &x);
    let mono = run_2pc(&cfg(SchemeKind::HalfGates, Mode::Monolithic, Reveal::GarblerDecodes, own.clone()), &circuit, &xg, &xe, 9).unwrap();
    let pipe = run_2pc(&cfg(SchemeKind::HalfGates, Mode::Pipelined, Reveal::GarblerDecodes, own), &circuit, &xg, &xe, 9).unwrap();
    assert_eq!(mono.evaluator.output, pipe.evaluator.output);
    assert_eq!(mono.evaluator.output, evaluate_plain(&circuit, &x).unwrap());
    assert_eq!(mono.garbler.garbled_bytes, pipe.garbler.garbled_bytes);
    assert_eq!(pipe.evaluator.garbled_bytes, pipe.garbler.garbled_bytes);
    assert_eq!(pipe.evaluator.peak_retained, 1);
    assert_eq!(pipe.garbler.peak_retained, 1);
    assert_eq!(mono.evaluator.peak_retained, 10_000);
    assert_eq!(pipe.transcript().count(Tag::GcGate), 10_000);
    assert_eq!(mono.transcript().count(Tag::GcBulk), 1);
}

#[test]
fn transcripts_are_deterministic_and_input_independent() {
    let circuit = random_circuit(&RandomCircuitConfig::new(4, 2, 60, 0.5), 3).circuit;
    let own = Ownership::split(4, 2);
    for kind in SchemeKind::ALL {
        let cfg = cfg(kind, Mode::Pipelined, Reveal::GarblerDecodes, own.clone());
        let first = run_2pc(&cfg, &circuit, &[false, true], &[true, true], 7).unwrap();
        let again = run_2pc(&cfg, &circuit, &[false, true], &[true, true], 7).unwrap();
        assert_eq!(first.evaluator_transcript, again.evaluator_transcript);
        assert_eq!(first.garbler_transcript, again.garbler_transcript);
        for x in 0..16 {
            let bits = bits_of(x, 4);
            let s = run_2pc(&cfg, &circuit, &bits[..2], &bits[2..], 100 + x).unwrap();
            assert_eq!(s.evaluator_transcript, first.evaluator_transcript, "{kind} input {x}");
        }
    }
}

/// Same topology, every odd table replaced by another random odd table.
fn sibling(c: &Circuit, seed: u64) -> Circuit {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let odd: Vec<TruthTable> = (0..16u8).map(TruthTable::from_bits).filter(|t| matches!(t.class(), GateClass::And | GateClass::OtherOdd)).collect();
    let gates = c.gates().iter().map(|g| match g.truth_table.class() {
        GateClass::And | GateClass::OtherOdd => (g.in_a, g.in_b, odd[rng.gen_range(0..odd.len())]),
        _ => (g.in_a, g.in_b, g.truth_table),
    });
    Circuit::from_gates(c.n(), c.m(), gates).unwrap()
}

#[test]
fn classic_pp_lengths_depend_only_on_shape() {
    for seed in 0..10 {
        let a = random_circuit(&RandomCircuitConfig::new(4, 2, 50, 0.3), seed).circuit;
        let b = sibling(&a, seed + 50);
        assert_ne!(a.gates().iter().map(|g: &GateSpec| g.truth_table).collect::<Vec<_>>(), b.gates().iter().map(|g| g.truth_table).collect::<Vec<_>>());
        let cfg = cfg(SchemeKind::ClassicPP, Mode::Pipelined, Reveal::GarblerDecodes, Ownership::split(4, 2));
        let ta = run_2pc(&cfg, &a, &[true, false], &[false, false], 1).unwrap();
        let tb = run_2pc(&cfg, &b, &[false, true], &[true, false], 2).unwrap();
        assert_eq!(ta.transcript().lengths(), tb.transcript().lengths());
    }
}

/// Flips one bit of the first OUTPUT_LABELS frame.
struct Tamper(MemChannel);

impl Channel for Tamper {
    fn send(&mut self, tag: Tag, mut payload: Vec<u8>) -> Result<(), ChannelError> {
        if tag == Tag::OutputLabels {
            payload[3] ^= 0x10;
        }
        self.0.send(tag, payload)
    }
    fn recv(&mut self) -> Result<Frame, ChannelError> {
        self.0.recv()
    }
}

#[test]
fn forged_output_label_aborts() {
    let circuit = random_circuit(&RandomCircuitConfig::new(4, 2, 40, 0.5), 11).circuit;
    let cfg = cfg(SchemeId::half_gates_authenticated(), Mode::Monolithic, Reveal::GarblerDecodes, Ownership::split(4, 2));
    let (a, b) = mem_pair();
    let circ = &circuit;
    let cfg_ref = &cfg;
    let (g, e) = thread::scope(|s| {
        let g = s.spawn(move || run_garbler(cfg_ref, circ, &[true, true], 1, &mut { a }));
        let e = run_evaluator(cfg_ref, circ, &[false, true], &mut Tamper(b));
        (g.join().unwrap(), e)
    });
    assert!(matches!(g, Err(RuntimeError::Authenticity(0))));
    assert!(matches!(e, Err(RuntimeError::Aborted)));

    let ok = run_2pc(&cfg, &circuit, &[true, true], &[false, true], 1).unwrap();
    assert_eq!(ok.evaluator.output, evaluate_plain(&circuit, &bits_of(0b1011, 4)).unwrap());
}

#[test]
fn runs_over_tcp() {
    let circuit = random_circuit(&RandomCircuitConfig::new(6, 2, 300, 0.5), 4).circuit;
    let cfg = cfg(SchemeKind::Grr2, Mode::Pipelined, Reveal::ShipDecoding, Ownership::split(6, 3));
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let (c2, cfg2) = (circuit.clone(), cfg.clone());
    let h = thread::spawn(move || {
        let (s, _) = listener.accept().unwrap();
        run_garbler(&cfg2, &c2, &[true, false, true], 3, &mut StreamChannel::new(s)).unwrap()
    });
    let e = run_evaluator(&cfg, &circuit, &[true, true, false], &mut StreamChannel::new(TcpStream::connect(addr).unwrap())).unwrap();
    let g = h.join().unwrap();
    let want = evaluate_plain(&circuit, &[true, false, true, true, true, false]).unwrap();
    assert_eq!(e.output, want);
    assert_eq!(g.output, want);
}

#[test]
fn wrong_input_length_rejected() {
    let c = Circuit::from_gates(2, 1, [(0, 1, TruthTable::AND)]).unwrap();
    let cfg = cfg(SchemeKind::FreeXor, Mode::Monolithic, Reveal::GarblerDecodes, Ownership::split(2, 1));
    assert!(matches!(run_2pc(&cfg, &c, &[true, true], &[], 0), Err(RuntimeError::Input { .. })));
}

/// Channel that keeps every payload it delivers.
struct Capture(Recorder<MemChannel>, Vec<Vec<u8>>);

impl Channel for Capture {
    fn send(&mut self, tag: Tag, payload: Vec<u8>) -> Result<(), ChannelError> {
        self.0.send(tag, payload)
    }
    fn recv(&mut self) -> Result<Frame, ChannelError> {
        let f = self.0.recv()?;
        self.1.push(f.payload.clone());
        Ok(f)
    }
}

#[test]
fn one_of_four_over_many_batches() {
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    let (mut s, r) = mem_pair();
    let mut r = Capture(Recorder::new(r), Vec::new());
    let batches: Vec<(usize, Vec<Vec<u8>>)> = (0..1000)
        .map(|_| {
            let count = rng.gen_range(1..6);
            (count, (0..4 * count).map(|_| rng.gen::<[u8; 16]>().to_vec()).collect())
        })
        .collect();
    let sent = batches.clone();
    let h = thread::spawn(move || {
        for (count, msgs) in &sent {
            ot_send(&mut s, &OtBatch::new(4, *count, 128).unwrap(), msgs).unwrap();
        }
    });
    for (count, msgs) in &batches {
        let got = ot_receive(&mut r, &OtBatch::new(4, *count, 128).unwrap(), &vec![2; *count]).unwrap();
        for t in 0..*count {
            assert_eq!(got[t], msgs[t * 4 + 2]);
        }
    }
    h.join().unwrap();
    assert_eq!(r.0.transcript().count(Tag::OtReq), 1000);
    assert_eq!(r.0.transcript().count(Tag::OtResp), 1000);
    // nothing but the chosen message ever reaches the receiver
    let delivered: Vec<u8> = r.1.concat();
    for (count, msgs) in &batches {
        for t in 0..*count {
            for j in [0, 1, 3] {
                assert!(!delivered.windows(16).any(|w| w == msgs[t * 4 + j].as_slice()));
            }
        }
    }
}

#[test]
fn large_batch_is_one_round() {
    let q = 500;
    let (mut s, r) = mem_pair();
    let mut r = Recorder::new(r);
    let msgs: Vec<Vec<u8>> = (0..2 * q * 2).map(|i| vec![i as u8, (i >> 8) as u8]).collect();
    let batch = OtBatch::new(2, 2 * q, 16).unwrap();
    let m2 = msgs.clone();
    let h = thread::spawn(move || ot_send(&mut s, &batch, &m2).unwrap());
    let idx: Vec<usize> = (0..2 * q).map(|t| t % 2).collect();
    let got = ot_receive(&mut r, &batch, &idx).unwrap();
    h.join().unwrap();
    assert_eq!(r.transcript().entries.len(), 2);
    for t in 0..2 * q {
        assert_eq!(got[t], msgs[2 * t + idx[t]]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn protocol_matches_plain(seed in any::<u64>(), kind in prop::sample::select(SchemeKind::ALL.to_vec()), pipelined in any::<bool>(), mask in prop::collection::vec(any::<bool>(), 6), x in prop::collection::vec(any::<bool>(), 6)) {
        let circuit = random_circuit(&RandomCircuitConfig::new(6, 3, 80, 0.5), seed).circuit;
        let own = Ownership::from_mask(mask);
        let mode = if pipelined { Mode::Pipelined } else { Mode::Monolithic };
        let (xg, xe) = split_inputs(&own, &x);
        let s = run_2pc(&cfg(kind, mode, Reveal::GarblerDecodes, own), &circuit, &xg, &xe, seed).unwrap();
        let want = evaluate_plain(&circuit, &x).unwrap();
        prop_assert_eq!(&s.garbler.output, &want);
        prop_assert_eq!(&s.evaluator.output, &want);
    }
}

use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use garblekit::circuit::random::{random_circuit, RandomCircuitConfig};
use garblekit::circuit::{bits_of, evaluate_plain, parse_scd, serialize_scd};
use garblekit::schemes::gcf::read_gcf;
use garblekit::schemes::{garbled_size, gb, GarbleParams, SchemeKind};
use garblekit_cli::{bench, format_bits};
use tempfile::TempDir;

const AND: &str = "SCD1 2 1 1\n3 1 2 0001\n";
const XOR_ONLY: &str = "SCD1 3 1 2\n4 1 2 0110\n5 3 4 1001\n";
const NAND: &str = "SCD1 2 1 1\n3 1 2 1110\n";

fn garblekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_garblekit")).args(args).env_remove("GARBLEKIT_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

fn circuit_file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn free_port() -> String {
    let l = TcpListener::bind("127.0.0.1:0").unwrap();
    l.local_addr().unwrap().to_string()
}

#[test]
fn garble_and_with_half_gates_gives_one_two_ciphertext_blob() {
    let dir = TempDir::new().unwrap();
    let c = circuit_file(&dir, "and.scd", AND);
    let out = dir.path().join("and.gcf");
    stdout(&garblekit(&["garble", s(&c), "--scheme", "half-gates", "--out", s(&out)]));
    let bytes = std::fs::read(&out).unwrap();
    assert_eq!(&bytes[..4], b"GCF1");
    let f = read_gcf(&bytes).unwrap();
    assert_eq!(f.blobs.len(), 1);
    assert_eq!(garbled_size(&f).ciphertexts, 2);
    assert!(dir.path().join("and.gcd").exists() && dir.path().join("and.gce").exists());
    for x in 0..4u64 {
        let bits = bits_of(x, 2);
        let y = stdout(&garblekit(&["eval", s(&out), "--input", &format_bits(&bits)]));
        assert_eq!(y, if x == 3 { "1" } else { "0" });
    }
}

#[test]
fn garbling_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let c = circuit_file(&dir, "and.scd", AND);
    let files: Vec<Vec<u8>> = ["a.gcf", "b.gcf"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            stdout(&garblekit(&["garble", s(&c), "--scheme", "grr3", "--seed", "9", "--out", s(&out)]));
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(files[0], files[1]);

    let out = dir.path().join("env.gcf");
    let o = Command::new(env!("CARGO_BIN_EXE_garblekit"))
        .args(["garble", s(&c), "--scheme", "grr3", "--seed", "9", "--out", s(&out)])
        .env("GARBLEKIT_SEED", "10")
        .output()
        .unwrap();
    stdout(&o);
    assert_ne!(std::fs::read(out).unwrap(), files[0]);
}

#[test]
fn free_xor_on_xor_only_circuit_has_no_gate_ciphertexts() {
    let dir = TempDir::new().unwrap();
    let c = circuit_file(&dir, "x.scd", XOR_ONLY);
    let out = dir.path().join("x.gcf");
    stdout(&garblekit(&["garble", s(&c), "--scheme", "free-xor", "--out", s(&out)]));
    let f = read_gcf(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(garbled_size(&f).ciphertexts, 0);
    assert_eq!(stdout(&garblekit(&["eval", s(&out), "--input", "110"])), "1");
}

#[test]
fn tampered_garbled_file_fails_authenticity() {
    let dir = TempDir::new().unwrap();
    let c = circuit_file(&dir, "and.scd", AND);
    let out = dir.path().join("and.gcf");
    stdout(&garblekit(&["garble", s(&c), "--scheme", "half-gates-auth", "--out", s(&out)]));
    let mut bytes = std::fs::read(&out).unwrap();
    // last byte belongs to the second ciphertext of the only gate
    *bytes.last_mut().unwrap() ^= 0x40;
    std::fs::write(&out, bytes).unwrap();
    // evaluator row (1,1) reads both ciphertexts of a half-gates AND
    let o = garblekit(&["eval", s(&out), "--input", "11"]);
    let o2 = garblekit(&["eval", s(&out), "--input", "00"]);
    let codes = [o.status.code(), o2.status.code()];
    assert!(codes.contains(&Some(4)), "{codes:?}");
}

#[test]
fn run_local_and_modes() {
    let dir = TempDir::new().unwrap();
    let c = circuit_file(&dir, "and.scd", AND);
    let y = stdout(&garblekit(&["run", s(&c), "--local", "--garbler-input", "1", "--evaluator-input", "1"]));
    assert_eq!(y, "1");

    let r = random_circuit(&RandomCircuitConfig::new(10, 6, 400, 0.5), 3).circuit;
    let rc = circuit_file(&dir, "r.scd", &String::from_utf8(serialize_scd(&r)).unwrap());
    let x = bits_of(0b1011001110, 10);
    let want = format_bits(&evaluate_plain(&r, &x).unwrap());
    for scheme in ["classic-pp", "grr2", "flexor-grr2", "half-gates"] {
        let base = ["run", s(&rc), "--local", "--scheme", scheme, "--garbler-inputs", "4", "--garbler-input"];
        let (xg, xe) = (format_bits(&x[..4]), format_bits(&x[4..]));
        let mono = stdout(&garblekit(&[&base[..], &[&xg, "--evaluator-input", &xe]].concat()));
        let pipe = stdout(&garblekit(&[&base[..], &[&xg, "--evaluator-input", &xe, "--pipelined", "--ship-decoding"]].concat()));
        assert_eq!(mono, want, "{scheme}");
        assert_eq!(pipe, mono, "{scheme}");
    }
}

#[test]
fn run_usage_errors() {
    let dir = TempDir::new().unwrap();
    let c = circuit_file(&dir, "and.scd", AND);
    let o = garblekit(&["run", s(&c), "--local", "--garbler-input", "10", "--evaluator-input", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(garblekit(&["run", s(&c), "--scheme", "grr9", "--local"]).status.code(), Some(2));
    assert_eq!(garblekit(&["run", s(&c)]).status.code(), Some(2));
}

#[test]
fn run_two_processes_over_tcp() {
    let dir = TempDir::new().unwrap();
    let c = circuit_file(&dir, "and.scd", AND);
    let ep = free_port();
    let bin = env!("CARGO_BIN_EXE_garblekit");
    let garbler = Command::new(bin).args(["run", s(&c), "--role", "garbler", "--endpoint", &ep, "--input", "1", "--pipelined"]).stdout(Stdio::piped()).spawn().unwrap();
    let evaluator = std::thread::spawn({
        let (c, ep) = (c.clone(), ep.clone());
        move || Command::new(bin).args(["run", s(&c), "--role", "evaluator", "--endpoint", &ep, "--input", "1", "--pipelined"]).output().unwrap()
    });
    assert_eq!(stdout(&garbler.wait_with_output().unwrap()), "1");
    assert_eq!(stdout(&evaluator.join().unwrap()), "1");
}

#[test]
fn pfe_hidden_nand_and_and() {
    let dir = TempDir::new().unwrap();
    let nand = circuit_file(&dir, "nand.scd", NAND);
    assert_eq!(stdout(&garblekit(&["pfe", "--local", "--circuit", s(&nand), "--garbler-input", "1", "--holder-input", "1"])), "0");
    let and = circuit_file(&dir, "and.scd", AND);
    for x in 0..4u64 {
        let b = bits_of(x, 2);
        let y = stdout(&garblekit(&["pfe", "--local", "--circuit", s(&and), "--garbler-input", &format_bits(&b[..1]), "--holder-input", &format_bits(&b[1..])]));
        assert_eq!(y, if x == 3 { "1" } else { "0" });
    }
}

#[test]
fn pfe_two_processes_over_tcp() {
    let dir = TempDir::new().unwrap();
    let and = circuit_file(&dir, "and.scd", AND);
    let ep = free_port();
    let bin = env!("CARGO_BIN_EXE_garblekit");
    let holder = std::thread::spawn({
        let ep = ep.clone();
        move || Command::new(bin).args(["pfe", "--role", "holder", "--circuit", s(&and), "--endpoint", &ep, "--input", "1"]).output().unwrap()
    });
    // AND becomes two NANDs
    let g = Command::new(bin).args(["pfe", "--role", "garbler", "--shape", "2,1,2", "--endpoint", &ep, "--input", "1"]).output().unwrap();
    assert_eq!(stdout(&g), "1");
    assert_eq!(stdout(&holder.join().unwrap()), "1");
}

#[test]
fn pfe_holder_without_circuit_is_usage_error() {
    let o = garblekit(&["pfe", "--role", "holder", "--endpoint", "127.0.0.1:1", "--input", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn count_mappings_values() {
    for (m, n, want) in [("1", "5", "1"), ("3", "3", "6"), ("3", "4", "36")] {
        assert_eq!(stdout(&garblekit(&["count-mappings", m, n])), want);
    }
}

#[test]
fn bench_records_match_garbled_size() {
    let c = random_circuit(&RandomCircuitConfig::new(8, 4, 300, 0.5), 5).circuit;
    let report = bench(&c, &SchemeKind::ALL, 128, 3, 1).unwrap();
    for row in &report.rows {
        let (f, ..) = gb(GarbleParams::new(row.scheme, 128).unwrap(), &c, 1).unwrap();
        let size = garbled_size(&f);
        assert_eq!((row.ciphertexts, row.bytes), (size.ciphertexts, size.bytes), "{}", row.scheme);
    }
    let bytes = |k| report.rows.iter().find(|r| r.scheme == k).unwrap().bytes;
    assert!(bytes(SchemeKind::HalfGates) <= bytes(SchemeKind::FreeXor));
    assert_eq!(report.records().len(), 6);
}

#[test]
fn bench_command_prints_key_value_lines() {
    let dir = TempDir::new().unwrap();
    let r = random_circuit(&RandomCircuitConfig::new(6, 3, 120, 0.82), 8).circuit;
    let p = circuit_file(&dir, "r.scd", &String::from_utf8(serialize_scd(&r)).unwrap());
    let out = stdout(&garblekit(&["bench", s(&p), "--schemes", "free-xor", "half-gates", "-r", "3", "--machine"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let c = parse_scd(serialize_scd(&r).as_slice()).unwrap();
    for (line, kind) in lines.iter().zip([SchemeKind::FreeXor, SchemeKind::HalfGates]) {
        let kv: std::collections::HashMap<&str, &str> = line.split_whitespace().skip(1).filter_map(|f| f.split_once('=')).collect();
        let (f, ..) = gb(GarbleParams::new(kind, 128).unwrap(), &c, 0).unwrap();
        assert_eq!(kv["scheme"], kind.name());
        assert_eq!(kv["ct"].parse::<usize>().unwrap(), garbled_size(&f).ciphertexts);
        assert_eq!(kv["reps"], "3");
    }
}

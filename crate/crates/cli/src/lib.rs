//! Support code for the `garblekit` binary: error-to-exit-code mapping, input
//! parsing and the benchmark report.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::time::{Duration, Instant};

use garblekit::circuit::{gate_stats, parse_scd, serialize_scd, Circuit, GateStats};
use garblekit::pfe::PfeError;
use garblekit::runtime::RuntimeError;
use garblekit::schemes::{de, en, ev, garbled_size, gb, DecodeError, GarbleParams, SchemeKind};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ABORT: i32 = 3;
pub const EXIT_AUTHENTICITY: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: msg.into() }
    }

    pub fn failure(msg: impl fmt::Display) -> Self {
        CliError { code: EXIT_FAILURE, message: msg.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<RuntimeError> for CliError {
    fn from(e: RuntimeError) -> Self {
        let code = match e {
            RuntimeError::Authenticity(_) => EXIT_AUTHENTICITY,
            RuntimeError::Input { .. } => EXIT_USAGE,
            _ => EXIT_ABORT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<PfeError> for CliError {
    fn from(e: PfeError) -> Self {
        let code = match e {
            PfeError::Authenticity(_) => EXIT_AUTHENTICITY,
            PfeError::Input { .. } | PfeError::NotNand { .. } => EXIT_USAGE,
            _ => EXIT_ABORT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        let code = match e {
            DecodeError::Bottom(_) => EXIT_AUTHENTICITY,
            _ => EXIT_FAILURE,
        };
        CliError { code, message: e.to_string() }
    }
}

/// `GARBLEKIT_SEED` wins over whatever was passed on the command line.
pub fn effective_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var("GARBLEKIT_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::usage(format!("GARBLEKIT_SEED is not an integer: {s:?}"))),
        Err(_) => Ok(flag),
    }
}

/// Parses a bit string such as `0110`; the first character is the first input.
pub fn parse_bits(s: &str) -> Result<Vec<bool>, CliError> {
    s.chars()
        .filter(|c| *c != '_')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::usage(format!("input {s:?} is not a bit string"))),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn expect_len(bits: &[bool], want: usize, what: &str) -> Result<(), CliError> {
    if bits.len() != want {
        return Err(CliError::usage(format!("{what} needs {want} bits, got {}", bits.len())));
    }
    Ok(())
}

pub fn load_circuit(path: &Path) -> Result<Circuit, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
    parse_scd(&bytes).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

/// Hex SHA-256 of the canonical SCD text.
pub fn circuit_hash(c: &Circuit) -> String {
    Sha256::digest(serialize_scd(c)).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub scheme: SchemeKind,
    pub ciphertexts: usize,
    pub bytes: usize,
    pub bytes_per_gate: f64,
    pub garble: Duration,
    pub eval: Duration,
    /// Median garbling cycles per gate; `None` without a cycle counter.
    pub cycles_per_gate: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub hash: String,
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub stats: GateStats,
    pub k: usize,
    pub repetitions: usize,
    pub rows: Vec<BenchRow>,
}

#[cfg(target_arch = "x86_64")]
fn cycles() -> Option<u64> {
    // SAFETY: rdtsc has no preconditions on x86_64.
    Some(unsafe { core::arch::x86_64::_rdtsc() })
}

#[cfg(not(target_arch = "x86_64"))]
fn cycles() -> Option<u64> {
    None
}

pub fn cycle_counter_available() -> bool {
    cycles().is_some()
}

fn median<T: Ord + Copy>(mut v: Vec<T>) -> T {
    v.sort_unstable();
    v[v.len() / 2]
}

pub fn bench(c: &Circuit, schemes: &[SchemeKind], k: usize, repetitions: usize, seed: u64) -> Result<BenchReport, CliError> {
    if repetitions == 0 {
        return Err(CliError::usage("repetitions must be at least 1"));
    }
    let x = vec![false; c.n()];
    let mut rows = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let params = GarbleParams::new(scheme, k).map_err(|e| CliError::usage(e.to_string()))?;
        let (mut gt, mut et, mut cyc) = (Vec::new(), Vec::new(), Vec::new());
        let mut size = None;
        for r in 0..repetitions {
            let c0 = cycles();
            let t0 = Instant::now();
            let (f, e, d) = gb(params, c, seed.wrapping_add(r as u64)).map_err(CliError::failure)?;
            gt.push(t0.elapsed());
            if let (Some(a), Some(b)) = (c0, cycles()) {
                cyc.push(b.wrapping_sub(a));
            }
            let input = en(&e, &x).map_err(CliError::failure)?;
            let t1 = Instant::now();
            let y = ev(&f, &input).map_err(CliError::failure)?;
            et.push(t1.elapsed());
            de(&d, &y)?;
            size.get_or_insert_with(|| garbled_size(&f));
        }
        let size = size.unwrap();
        let q = c.q().max(1) as f64;
        rows.push(BenchRow {
            scheme,
            ciphertexts: size.ciphertexts,
            bytes: size.bytes,
            bytes_per_gate: size.bytes_per_gate(),
            garble: median(gt),
            eval: median(et),
            cycles_per_gate: (!cyc.is_empty()).then(|| median(cyc) as f64 / q),
        });
    }
    Ok(BenchReport { hash: circuit_hash(c), n: c.n(), m: c.m(), q: c.q(), stats: gate_stats(c), k, repetitions, rows })
}

impl BenchReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let st = &self.stats;
        let _ = writeln!(s, "circuit {} n={} m={} q={} (xor {}, xnor {}, and {}, odd {}, trivial {})", &self.hash[..16], self.n, self.m, self.q, st.xor_count, st.xnor_count, st.and_count, st.other_odd_count, st.trivial_count);
        let _ = writeln!(s, "k={} repetitions={} (times are medians)", self.k, self.repetitions);
        let _ = writeln!(s, "{:<12} {:>10} {:>12} {:>8} {:>12} {:>12} {:>8}", "scheme", "ct", "bytes", "bpg", "garble", "eval", "cpg");
        for r in &self.rows {
            let cpg = r.cycles_per_gate.map_or("-".to_string(), |c| format!("{c:.1}"));
            let _ = writeln!(s, "{:<12} {:>10} {:>12} {:>8.3} {:>12.3?} {:>12.3?} {:>8}", r.scheme.name(), r.ciphertexts, r.bytes, r.bytes_per_gate, r.garble, r.eval, cpg);
        }
        if !cycle_counter_available() {
            s.push_str("no cycle counter on this platform; cpg omitted\n");
        }
        s
    }

    /// One `key=value` record per scheme.
    pub fn records(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                let mut s = format!(
                    "bench circuit={} n={} m={} q={} k={} reps={} scheme={} ct={} bytes={} bpg={:.4} garble_ns={} eval_ns={}",
                    self.hash, self.n, self.m, self.q, self.k, self.repetitions, r.scheme.name(), r.ciphertexts, r.bytes, r.bytes_per_gate, r.garble.as_nanos(), r.eval.as_nanos()
                );
                if let Some(c) = r.cycles_per_gate {
                    let _ = write!(s, " cpg={c:.2}");
                }
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_strings() {
        assert_eq!(parse_bits("10_1").unwrap(), vec![true, false, true]);
        assert!(parse_bits("12").is_err());
        assert_eq!(format_bits(&[false, true]), "01");
        assert!(parse_bits("").unwrap().is_empty());
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3, 1, 2]), 2);
        assert_eq!(median(vec![4, 1, 3, 2]), 3);
    }
}

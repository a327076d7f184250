use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use garblekit::channel::StreamChannel;
use garblekit::circuit::random::{random_circuit, RandomCircuitConfig};
use garblekit::circuit::Circuit;
use garblekit::dkc::{DkcKind, DkcVariant};
use garblekit::pfe::{count_mappings, nand_normalize, pfe_garbler, pfe_holder, pfe_run, PfePublic};
use garblekit::runtime::{run_2pc, run_evaluator, run_garbler, Mode, Ownership, ProtocolConfig, Reveal};
use garblekit::schemes::gcf::{read_decoding, read_encoding, read_gcf, write_decoding, write_encoding, write_gcf};
use garblekit::schemes::{compatibility, de, en, ev, gb, Compat, GarbleParams, SchemeId, SchemeKind, Technique};
use garblekit_cli::*;

#[derive(Parser)]
#[command(name = "garblekit", version, about = "Garbled circuits, two-party computation and PFE")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Garble an SCD circuit into GCF1 plus encoding and decoding files.
    Garble(GarbleArgs),
    /// Evaluate a garbled circuit on plaintext inputs encoded with its GCE1 file.
    Eval(EvalArgs),
    /// Run a two-party Yao session.
    Run(RunArgs),
    /// Run private function evaluation; the holder's circuit stays hidden.
    Pfe(PfeArgs),
    /// Measure garbled size and timings per scheme.
    Bench(BenchArgs),
    /// Print the pairwise compatibility of the garbling techniques.
    Compat,
    /// Number of onto mappings from N incoming to M outgoing wires.
    CountMappings { m: usize, n: usize },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    ClassicPp,
    Grr3,
    FreeXor,
    Grr2,
    FlexorGrr2,
    HalfGates,
    /// Half gates with hash-pair output decoding.
    HalfGatesAuth,
}

impl Scheme {
    fn id(self) -> SchemeId {
        match self {
            Scheme::ClassicPp => SchemeKind::ClassicPP.into(),
            Scheme::Grr3 => SchemeKind::Grr3.into(),
            Scheme::FreeXor => SchemeKind::FreeXor.into(),
            Scheme::Grr2 => SchemeKind::Grr2.into(),
            Scheme::FlexorGrr2 => SchemeKind::FlexorGrr2.into(),
            Scheme::HalfGates => SchemeKind::HalfGates.into(),
            Scheme::HalfGatesAuth => SchemeId::half_gates_authenticated(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dkc {
    FixedKeyAes,
    KeyedAes256,
    SingleHash,
    TwoPrf,
}

impl From<Dkc> for DkcKind {
    fn from(d: Dkc) -> Self {
        match d {
            Dkc::FixedKeyAes => DkcKind::FixedKeyAes,
            Dkc::KeyedAes256 => DkcKind::KeyedAes256,
            Dkc::SingleHash => DkcKind::SingleHash,
            Dkc::TwoPrf => DkcKind::TwoPrf,
        }
    }
}

#[derive(Args)]
struct CipherArgs {
    #[arg(long, value_enum, default_value = "half-gates")]
    scheme: Scheme,
    #[arg(long, value_enum, default_value = "fixed-key-aes")]
    dkc: Dkc,
    /// Label length in bits.
    #[arg(short, long, default_value_t = 128)]
    k: usize,
}

impl CipherArgs {
    fn params(&self) -> Result<GarbleParams, CliError> {
        GarbleParams::with_dkc(self.scheme.id(), self.dkc.into(), self.k).map_err(|e| CliError::usage(e.to_string()))
    }
}

#[derive(Args)]
struct GarbleArgs {
    circuit: PathBuf,
    #[command(flatten)]
    cipher: CipherArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// GCF1 output; the decoding and encoding files default to `.gcd` and `.gce` beside it.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    decoding: Option<PathBuf>,
    #[arg(long)]
    encoding: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    garbled: PathBuf,
    #[arg(long)]
    input: String,
    #[arg(long)]
    decoding: Option<PathBuf>,
    #[arg(long)]
    encoding: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Role {
    Garbler,
    Evaluator,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PfeRole {
    Garbler,
    Holder,
}

#[derive(Args)]
struct RunArgs {
    circuit: PathBuf,
    #[command(flatten)]
    cipher: CipherArgs,
    /// Run both parties in this process.
    #[arg(long, conflicts_with_all = ["role", "endpoint", "input"])]
    local: bool,
    #[arg(long, value_enum, requires = "endpoint")]
    role: Option<Role>,
    /// host:port; the garbler listens, the evaluator connects.
    #[arg(long)]
    endpoint: Option<String>,
    /// This party's input bits.
    #[arg(long)]
    input: Option<String>,
    #[arg(long, requires = "local")]
    garbler_input: Option<String>,
    #[arg(long, requires = "local")]
    evaluator_input: Option<String>,
    /// The first this-many circuit inputs belong to the garbler. Defaults to n/2.
    #[arg(long)]
    garbler_inputs: Option<usize>,
    /// Stream one frame per gate instead of one bulk frame.
    #[arg(long)]
    pipelined: bool,
    /// Send the decoding data to the evaluator instead of output labels to the garbler.
    #[arg(long)]
    ship_decoding: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PfeArgs {
    #[arg(long, value_enum, required_unless_present = "local")]
    role: Option<PfeRole>,
    #[arg(long)]
    local: bool,
    /// Hidden circuit, required for the holder. Gates are rewritten to NAND first.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Public shape `n,m,g` of the NAND circuit, for the garbler.
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    garbler_input: Option<String>,
    #[arg(long)]
    holder_input: Option<String>,
    /// The first this-many inputs belong to the garbler. Defaults to n/2.
    #[arg(long)]
    garbler_inputs: Option<usize>,
    #[arg(long, value_enum, default_value = "fixed-key-aes")]
    dkc: Dkc,
    #[arg(short, long, default_value_t = 128)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// SCD circuit; omit to use `--random`.
    circuit: Option<PathBuf>,
    /// Random circuit `n,m,q,xor_fraction`.
    #[arg(long, conflicts_with = "circuit")]
    random: Option<String>,
    /// Schemes to measure; all six by default.
    #[arg(long, value_enum, num_args = 1..)]
    schemes: Vec<Scheme>,
    #[arg(short, long, default_value_t = 5)]
    repetitions: usize,
    #[arg(short, long, default_value_t = 128)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print only the key=value records.
    #[arg(long)]
    machine: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Garble(a) => cmd_garble(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Pfe(a) => cmd_pfe(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Compat => cmd_compat(),
        Cmd::CountMappings { m, n } => {
            println!("{}", count_mappings(m, n));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("garblekit: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

fn sibling(path: &Path, given: Option<PathBuf>, ext: &str) -> PathBuf {
    given.unwrap_or_else(|| path.with_extension(ext))
}

fn cmd_garble(a: GarbleArgs) -> Result<(), CliError> {
    let c = load_circuit(&a.circuit)?;
    let params = a.cipher.params()?;
    let (f, e, d) = gb(params, &c, effective_seed(a.seed)?).map_err(|e| CliError::usage(e.to_string()))?;
    write_file(&a.out, &write_gcf(&f))?;
    write_file(&sibling(&a.out, a.decoding, "gcd"), &write_decoding(&d, params.k()))?;
    write_file(&sibling(&a.out, a.encoding, "gce"), &write_encoding(&e, params.k()))?;
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<(), CliError> {
    let f = read_gcf(&read_file(&a.garbled)?).map_err(CliError::failure)?;
    let (e, _) = read_encoding(&read_file(&sibling(&a.garbled, a.encoding, "gce"))?).map_err(CliError::failure)?;
    let d = read_decoding(&read_file(&sibling(&a.garbled, a.decoding, "gcd"))?).map_err(CliError::failure)?;
    let x = parse_bits(&a.input)?;
    expect_len(&x, f.topology.n, "--input")?;
    let y = ev(&f, &en(&e, &x).map_err(CliError::failure)?).map_err(CliError::failure)?;
    println!("{}", format_bits(&de(&d, &y)?));
    Ok(())
}

fn ownership(n: usize, garbler_inputs: Option<usize>) -> Result<Ownership, CliError> {
    let g = garbler_inputs.unwrap_or(n / 2);
    if g > n {
        return Err(CliError::usage(format!("--garbler-inputs {g} exceeds the {n} circuit inputs")));
    }
    Ok(Ownership::split(n, g))
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::usage(format!("{flag} is required")))
}

/// The garbler side binds; the other side retries until the listener is up.
fn connect(endpoint: &str, listen: bool) -> Result<TcpStream, CliError> {
    if listen {
        let l = TcpListener::bind(endpoint).map_err(|e| CliError::failure(format!("bind {endpoint}: {e}")))?;
        return l.accept().map(|(s, _)| s).map_err(CliError::failure);
    }
    let deadline = Instant::now() + Duration::from_secs(10);
    loop {
        match TcpStream::connect(endpoint) {
            // a retry loop on loopback can connect a socket to itself
            Ok(s) if s.local_addr().ok() == s.peer_addr().ok() => drop(s),
            Ok(s) => return Ok(s),
            Err(e) if Instant::now() > deadline => return Err(CliError { code: EXIT_ABORT, message: format!("connect {endpoint}: {e}") }),
            Err(_) => std::thread::sleep(Duration::from_millis(50)),
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<(), CliError> {
    let c = load_circuit(&a.circuit)?;
    let own = ownership(c.n(), a.garbler_inputs)?;
    let (ng, ne) = (own.garbler_wires().len(), own.evaluator_wires().len());
    let cfg = ProtocolConfig {
        params: a.cipher.params()?,
        mode: if a.pipelined { Mode::Pipelined } else { Mode::Monolithic },
        reveal: if a.ship_decoding { Reveal::ShipDecoding } else { Reveal::GarblerDecodes },
        ownership: own,
    };
    let seed = effective_seed(a.seed)?;
    if a.local {
        let xg = parse_bits(a.garbler_input.as_deref().unwrap_or(""))?;
        let xe = parse_bits(a.evaluator_input.as_deref().unwrap_or(""))?;
        expect_len(&xg, ng, "--garbler-input")?;
        expect_len(&xe, ne, "--evaluator-input")?;
        let s = run_2pc(&cfg, &c, &xg, &xe, seed)?;
        println!("{}", format_bits(&s.evaluator.output));
        return Ok(());
    }
    let role = a.role.ok_or_else(|| CliError::usage("either --local or --role with --endpoint is required"))?;
    let endpoint = required(&a.endpoint, "--endpoint")?;
    let x = parse_bits(a.input.as_deref().unwrap_or(""))?;
    expect_len(&x, if role == Role::Garbler { ng } else { ne }, "--input")?;
    let mut ch = StreamChannel::new(connect(endpoint, role == Role::Garbler)?);
    let report = match role {
        Role::Garbler => run_garbler(&cfg, &c, &x, seed, &mut ch)?,
        Role::Evaluator => run_evaluator(&cfg, &c, &x, &mut ch)?,
    };
    println!("{}", format_bits(&report.output));
    Ok(())
}

fn parse_shape(s: &str) -> Result<(usize, usize, usize), CliError> {
    let v: Vec<usize> = s.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| CliError::usage(format!("bad shape {s:?}")))?;
    match v[..] {
        [n, m, g] => Ok((n, m, g)),
        _ => Err(CliError::usage("--shape takes n,m,g")),
    }
}

fn cmd_pfe(a: PfeArgs) -> Result<(), CliError> {
    let dkc = DkcVariant::new(a.dkc.into(), a.k).map_err(|e| CliError::usage(e.to_string()))?;
    let seed = effective_seed(a.seed)?;
    let hidden = |path: &Option<PathBuf>| -> Result<Circuit, CliError> {
        let path = path.as_ref().ok_or_else(|| CliError::usage("the holder needs --circuit"))?;
        let c = nand_normalize(&load_circuit(path)?);
        eprintln!("shape {},{},{}", c.n(), c.m(), c.q());
        Ok(c)
    };
    if a.local {
        let c = hidden(&a.circuit)?;
        let public = PfePublic::for_circuit(&c, ownership(c.n(), a.garbler_inputs)?, dkc);
        let xg = parse_bits(a.garbler_input.as_deref().unwrap_or(""))?;
        let xh = parse_bits(a.holder_input.as_deref().unwrap_or(""))?;
        expect_len(&xg, public.ownership.garbler_wires().len(), "--garbler-input")?;
        expect_len(&xh, public.ownership.evaluator_wires().len(), "--holder-input")?;
        let s = pfe_run(&public, &c, &xg, &xh, seed)?;
        println!("{}", format_bits(&s.holder.output));
        return Ok(());
    }
    let endpoint = required(&a.endpoint, "--endpoint")?;
    let x = parse_bits(a.input.as_deref().unwrap_or(""))?;
    let report = match a.role {
        Some(PfeRole::Holder) => {
            let c = hidden(&a.circuit)?;
            let public = PfePublic::for_circuit(&c, ownership(c.n(), a.garbler_inputs)?, dkc);
            expect_len(&x, public.ownership.evaluator_wires().len(), "--input")?;
            let mut ch = StreamChannel::new(connect(endpoint, false)?);
            pfe_holder(&mut ch, &public, &c, &x, seed)?
        }
        _ => {
            let (n, m, g) = parse_shape(required(&a.shape, "--shape")?)?;
            let public = PfePublic { n, m, g, ownership: ownership(n, a.garbler_inputs)?, dkc };
            expect_len(&x, public.ownership.garbler_wires().len(), "--input")?;
            let mut ch = StreamChannel::new(connect(endpoint, true)?);
            pfe_garbler(&mut ch, &public, &x, seed)?
        }
    };
    println!("{}", format_bits(&report.output));
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    let seed = effective_seed(a.seed)?;
    let c = match (&a.circuit, &a.random) {
        (Some(p), _) => load_circuit(p)?,
        (None, Some(spec)) => {
            let p: Vec<&str> = spec.split(',').collect();
            let bad = || CliError::usage(format!("--random takes n,m,q,xor_fraction, got {spec:?}"));
            let [n, m, q, x] = p[..] else { return Err(bad()) };
            let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
            let xor: f64 = x.trim().parse().map_err(|_| bad())?;
            let cfg = RandomCircuitConfig::new(num(n)?, num(m)?, num(q)?, xor);
            random_circuit(&cfg, seed).circuit
        }
        (None, None) => return Err(CliError::usage("bench needs a circuit file or --random")),
    };
    let schemes: Vec<SchemeKind> = if a.schemes.is_empty() { SchemeKind::ALL.to_vec() } else { a.schemes.iter().map(|s| s.id().kind).collect() };
    let report = bench(&c, &schemes, a.k, a.repetitions, seed)?;
    if !a.machine {
        print!("{}", report.table());
    }
    for r in report.records() {
        println!("{r}");
    }
    Ok(())
}

fn cmd_compat() -> Result<(), CliError> {
    let short = ["P&P", "GRR3", "FreeXOR", "GRR2", "fleXOR", "HalfG"];
    print!("{:>8}", "");
    for s in short {
        print!("{s:>8}");
    }
    println!();
    for (i, a) in Technique::ALL.into_iter().enumerate() {
        print!("{:>8}", short[i]);
        for (j, b) in Technique::ALL.into_iter().enumerate() {
            let cell = if i == j {
                "-"
            } else {
                match compatibility(a, b) {
                    Compat::Yes => "yes",
                    Compat::ViaExternalValue => "ext",
                    Compat::No => "no",
                }
            };
            print!("{cell:>8}");
        }
        println!();
    }
    Ok(())
}

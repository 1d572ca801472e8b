use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use duality_core::cc_duality::verify_cc_identifications;
use duality_core::flows::evolve_manybody;
use duality_core::generate::{exact_multipole, exact_point, float_multipole, float_point, rng_for};
use duality_core::io::{lax_to_json, point_to_json, vec_to_json, AnyLax, AnyPoint, JsonScalar};
use duality_core::manybody::ModelKind;
use duality_core::pq_duality::dualize;
use duality_core::spectral_duality::{compare_curves, dual_of, spectral_poly};
use duality_core::spectral_models::{MultiPoleLax, SpectralKind};
use duality_core::suite::{run_suite, Backend, SizeRange, SuiteConfig};
use duality_core::{Error, Result};

#[derive(Parser)]
#[command(name = "duality-lab", version, about = "Checks for action-angle and spectral dualities of integrable systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a report.
    Verify(VerifyArgs),
    /// Apply the action-angle duality map to a phase point.
    Map(InputArgs),
    /// Spectral dual of a multi-pole Lax matrix, with the curve comparison.
    Dualize(InputArgs),
    /// Spectral polynomial of a multi-pole Lax matrix.
    Curve(InputArgs),
    /// Integrate the Hamiltonian flow of a many-body phase point.
    Flow(FlowArgs),
    /// Gaudin and Schlesinger Hamiltonians of a rational CM phase point.
    Ccduality(InputArgs),
    /// Generate a random instance descriptor.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    suite: Option<String>,
    /// Matrix sizes, `k` or `lo..hi`.
    #[arg(long)]
    n: Option<SizeRange>,
    /// Pole or site counts, `k` or `lo..hi`.
    #[arg(long)]
    m: Option<SizeRange>,
    /// Instances per check.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Tolerance for every floating check.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads (defaults to DUALITY_LAB_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
    /// JSON file with a suite configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct InputArgs {
    /// Descriptor file, or `-` for standard input.
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    io: InputArgs,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Record a sample every this many steps.
    #[arg(long, default_value_t = 100)]
    sample_every: usize,
}

#[derive(Args)]
struct GenArgs {
    /// Many-body kind (rational_cm, trig_cms, rational_rs, trig_rs) or Lax kind
    /// (rational_gaudin, trig_gaudin_reduced, xxx_chain, xxz_chain).
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure kinds mapped to exit codes.
enum Fail {
    /// Bad input or arguments: exit 2.
    Usage(String),
    /// A check or computation failed: exit 1.
    Check(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e {
            Error::Invalid(_) | Error::UnknownSuite(_) | Error::Dimension(_) | Error::WrongKind { .. } => {
                Fail::Usage(e.to_string())
            }
            other => Fail::Check(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Fail>;

fn read_json(path: &Path) -> CliResult<Value> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Fail::Usage(format!("reading stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Fail::Usage(format!("reading {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("parsing {}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail::Usage(format!("writing {}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            match writeln!(stdout, "{}", text.trim_end()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Fail::Usage(format!("writing output: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn emit_json(v: &Value, out: Option<&Path>) -> CliResult<()> {
    emit(&serde_json::to_string_pretty(v).expect("serializable"), out)
}

fn verify(a: VerifyArgs) -> CliResult<bool> {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_value::<SuiteConfig>(read_json(p)?)
            .map_err(|e| Fail::Usage(format!("config {}: {e}", p.display())))?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = a.suite {
        cfg.suite = s;
    }
    cfg.n = a.n.or(cfg.n);
    cfg.m = a.m.or(cfg.m);
    cfg.trials = a.trials.or(cfg.trials);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.backend = a.backend.map(Backend::from).or(cfg.backend);
    cfg.tol = a.tol.or(cfg.tol);
    cfg.threads = a.threads.or(cfg.threads);
    cfg.timing |= a.timing;
    let report = run_suite(&cfg)?;
    let text = match a.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
        Format::Text => report.to_text(),
    };
    emit(&text, a.out.as_deref())?;
    if a.out.is_some() {
        eprint!("{}", report.to_text());
    }
    Ok(report.pass)
}

fn map(a: InputArgs) -> CliResult<bool> {
    let input = read_json(&a.input)?;
    let point = AnyPoint::from_json(&input)?;
    let kind = point.kind();
    let d = dualize(kind, &point.to_c64())?;
    let mut v = point_to_json(d.dual_kind, &d.dual);
    v["dual_of"] = input;
    v["residual"] = json!(d.relative_residual());
    emit_json(&v, a.out.as_deref())?;
    Ok(true)
}

fn dualize_lax<T: JsonScalar>(l: &MultiPoleLax<T>) -> Result<Value> {
    let d = dual_of(l)?;
    let c = compare_curves(l, &d)?;
    let mut v = lax_to_json(&d);
    v["dual_of"] = lax_to_json(l);
    v["curve_max_diff"] = json!(c.max_diff);
    v["curves_coincide"] = json!(c.max_diff == 0.0 || (!T::EXACT && c.max_diff < 1e-9));
    Ok(v)
}

fn dualize_cmd(a: InputArgs) -> CliResult<bool> {
    let v = match AnyLax::from_json(&read_json(&a.input)?)? {
        AnyLax::Rational(l) => dualize_lax(&l)?,
        AnyLax::Gaussian(l) => dualize_lax(&l)?,
        AnyLax::Float(l) => dualize_lax(&l)?,
    };
    let ok = v["curves_coincide"].as_bool().unwrap_or(false);
    emit_json(&v, a.out.as_deref())?;
    Ok(ok)
}

fn curve_json<T: JsonScalar>(l: &MultiPoleLax<T>) -> Result<Value> {
    let p = spectral_poly(l)?;
    Ok(json!({
        "kind": l.kind.name(),
        "layout": "coeffs[i][j] multiplies lambda^i z^j",
        "coeffs": p.coeffs.iter().map(|r| vec_to_json(r)).collect::<Vec<_>>(),
    }))
}

fn curve_cmd(a: InputArgs) -> CliResult<bool> {
    let v = match AnyLax::from_json(&read_json(&a.input)?)? {
        AnyLax::Rational(l) => curve_json(&l)?,
        AnyLax::Gaussian(l) => curve_json(&l)?,
        AnyLax::Float(l) => curve_json(&l)?,
    };
    emit_json(&v, a.out.as_deref())?;
    Ok(true)
}

fn flow(a: FlowArgs) -> CliResult<bool> {
    let point = AnyPoint::from_json(&read_json(&a.io.input)?)?;
    let kind = point.kind();
    let r = evolve_manybody(kind, &point.to_c64(), a.t_end, a.dt, a.sample_every)?;
    let v = json!({
        "kind": kind.name(),
        "order": r.order,
        "dt": r.dt,
        "steps": r.steps,
        "invariant_drift": r.drift,
        "hamiltonian_drift": r.hamiltonian_drift,
        "samples": r.samples,
        "final": point_to_json(kind, &r.final_point),
    });
    emit_json(&v, a.io.out.as_deref())?;
    Ok(true)
}

fn cc_json<T: JsonScalar>(x: &duality_core::manybody::PhasePoint<T>) -> Result<(Value, bool)> {
    let r = verify_cc_identifications(x)?;
    let ok = r.all_hold();
    let v = json!({
        "h0": r.h0.to_json(),
        "cm_hamiltonian": r.cm_hamiltonian.to_json(),
        "gaudin_casimirs": vec_to_json(&r.gaudin.casimirs),
        "gaudin_hamiltonians": vec_to_json(&r.gaudin.hamiltonians),
        "schlesinger_casimirs": vec_to_json(&r.schlesinger.casimirs),
        "schlesinger_hamiltonians": vec_to_json(&r.schlesinger.hamiltonians),
        "minus_p": vec_to_json(&r.expected_schlesinger),
        "h0_matches": r.h0_matches(),
        "gaudin_vanishes": r.gaudin_vanishes(),
        "schlesinger_matches": r.schlesinger_matches(),
        "canonical": r.canonical(),
    });
    Ok((v, ok))
}

fn ccduality(a: InputArgs) -> CliResult<bool> {
    let point = AnyPoint::from_json(&read_json(&a.input)?)?;
    if point.kind() != ModelKind::RationalCm {
        return Err(Fail::Usage(format!("ccduality needs a rational_cm point, got {}", point.kind())));
    }
    let (v, ok) = match &point {
        AnyPoint::Rational(_, x) => cc_json(x)?,
        AnyPoint::Gaussian(_, x) => cc_json(x)?,
        AnyPoint::Float(_, x) => cc_json(x)?,
    };
    emit_json(&v, a.out.as_deref())?;
    Ok(ok)
}

fn gen(a: GenArgs) -> CliResult<bool> {
    if a.n == 0 || a.m == 0 {
        return Err(Fail::Usage("sizes must be positive".into()));
    }
    let mut rng = rng_for(a.seed, &a.kind, 0);
    let backend: Backend = a.backend.into();
    let v = if let Some(kind) = ModelKind::from_name(&a.kind) {
        match backend {
            Backend::Exact => point_to_json(kind, &exact_point(kind, a.n, &mut rng)),
            Backend::Float => point_to_json(kind, &float_point(kind, a.n, &mut rng)),
        }
    } else if let Some(kind) = SpectralKind::from_name(&a.kind) {
        match backend {
            Backend::Exact => lax_to_json(&exact_multipole(kind, a.n, a.m, &mut rng)),
            Backend::Float => lax_to_json(&float_multipole(kind, a.n, a.m, &mut rng)?),
        }
    } else {
        return Err(Fail::Usage(format!("unknown kind `{}`", a.kind)));
    };
    emit_json(&v, a.out.as_deref())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Map(a) => map(a),
        Command::Dualize(a) => dualize_cmd(a),
        Command::Curve(a) => curve_cmd(a),
        Command::Flow(a) => flow(a),
        Command::Ccduality(a) => ccduality(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

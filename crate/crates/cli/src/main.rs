//! `ssmp`: evaluate, invert, simulate and verify extinction-time laws from the command line.

mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};
use ssmp::mellin::{density, persistence_report, smoothness_index, survival, DensityMethod, MellinLaw, TimeChange};
use ssmp::model_spec::ModelSpec;
use ssmp::monte_carlo::jumps::LevyStepper;
use ssmp::monte_carlo::{
    sample_chi, sample_exponential_functional, sample_extinction, sample_inverse_subordinator,
    sample_inverse_subordinator_path, sample_positive_stable, EmpiricalLaw, SimConfig,
};
use ssmp::output::format_sig17;
use ssmp::verify::{theorem3_suite, verify_mc, verify_theorem1, verify_wphi, SuiteReport};
use ssmp::wphi::w_phi;
use ssmp::{BernsteinFunction, Error};

use table::{float, normalize_floats, Cell, Table};

/// Jump rates above this get a warning: paths will be slow.
const JUMP_RATE_WARNING: f64 = 1e5;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{label}: {source}", label = label(source))]
    Core {
        #[from]
        source: Error,
    },
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("checks failed: {0}")]
    ChecksFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source } if source.is_precondition() => 2,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn label(e: &Error) -> &'static str {
    match e {
        Error::Pole { .. } => "pole",
        Error::Domain(_) => "domain",
        Error::Strip { .. } => "strip",
        Error::Integration { .. } => "integration",
        Error::NonConvergence { .. } => "non-convergence",
        Error::Truncation { .. } => "truncation",
        Error::Membership { .. } => "membership",
        Error::Indeterminate(_) => "indeterminate",
        Error::Precondition(_) => "precondition",
        Error::Radius { .. } => "radius",
        Error::Negativity { .. } => "negativity",
        Error::DensityNotAvailable { .. } => "density-not-available",
        Error::InsufficientSamples { .. } => "insufficient-samples",
        Error::Invalid(_) => "invalid",
        Error::Parse { .. } => "parse",
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "ssmp", version, about = "Extinction times of time-changed self-similar Markov processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// φ(u) and W_φ(u) on a grid of real parts.
    Phi(PhiArgs),
    /// Mellin transform E[V^z] of one of the laws.
    Mellin(MellinArgs),
    /// Density by series or Mellin–Barnes inversion.
    Density(DensityArgs),
    /// Survival function against the persistence power law.
    Tail(TailArgs),
    /// Monte Carlo samples of one of the laws.
    Simulate(SimulateArgs),
    /// Run a verification suite; exit 0 iff every check passes.
    Verify(VerifyArgs),
    /// Summary of the model: strips, indices and tail constants.
    Table(TableArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Model spec: a file path, or inline `key=value` entries.
    #[arg(long, short = 'm')]
    model: Option<String>,
    /// Override one entry of the model spec (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Expected self-similarity index; an error if the model disagrees.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
struct Grid(Vec<f64>);

/// `START:STOP:COUNT[:linear|log]`, a comma list, or a single number.
fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{t}` is not a finite number"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>().map(Grid),
        3 | 4 => {
            let (start, stop) = (num(parts[0])?, num(parts[1])?);
            let count = parse_count(parts[2])?;
            let log = match parts.get(3).map(|p| p.trim()) {
                None | Some("linear") => false,
                Some("log") => true,
                Some(other) => return Err(format!("grid spacing must be linear or log, got `{other}`")),
            };
            if log && !(start > 0.0 && stop > 0.0) {
                return Err("a log grid needs positive end points".into());
            }
            let at = |j: usize| {
                if count == 1 {
                    return start;
                }
                let f = j as f64 / (count - 1) as f64;
                if log {
                    (start.ln() + f * (stop.ln() - start.ln())).exp()
                } else {
                    start + f * (stop - start)
                }
            };
            let mut pts: Vec<f64> = (0..count).map(at).collect();
            if count > 1 {
                pts[count - 1] = stop;
            }
            Ok(Grid(pts))
        }
        _ => Err(format!("grid must be START:STOP:COUNT[:linear|log], got `{s}`")),
    }
}

/// A positive count, also accepting forms like `1e4`.
fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(v >= 1.0 && v.fract() == 0.0 && v <= 1e12) {
        return Err(format!("count must be a positive integer, got `{s}`"));
    }
    Ok(v as usize)
}

#[derive(Args, Debug)]
struct PhiArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Real parts of u.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "0.5:3:6")]
    grid: Grid,
    /// Imaginary part of u.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    imag: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LawArg {
    /// T, the extinction time of the Markov process.
    T,
    /// χ₁.
    Chi,
    /// λ_t.
    Lambda,
    /// 𝕋, the extinction time after the time change.
    Extinction,
    /// F_β(φ).
    Frechet,
    /// The positive β-stable law with Laplace transform e^{−q^β}.
    Stable,
}

#[derive(Args, Debug)]
struct MellinArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum, default_value = "extinction")]
    law: LawArg,
    /// Real parts of z.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-0.4:0.4:5")]
    grid: Grid,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    imag: f64,
    /// Level t of λ_t.
    #[arg(long, default_value_t = 1.0)]
    time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Series,
    MellinBarnes,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum, default_value = "extinction")]
    law: LawArg,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "0.5:5:10")]
    grid: Grid,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    /// Add a Monte Carlo density estimate from this many exact-route samples.
    #[arg(long, value_parser = parse_count)]
    mc: Option<usize>,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct TailArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
    /// extinction for pair models, frechet for Bernstein-function models.
    #[arg(long, value_enum)]
    law: Option<LawArg>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "100:1000:4:log")]
    grid: Grid,
}

#[derive(Args, Debug, Clone, Default)]
struct SimArgs {
    /// Number of paths (accepts forms like 1e4).
    #[arg(long, value_parser = parse_count)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Time horizon of the exponential functional; automatic when absent.
    #[arg(long)]
    horizon: Option<f64>,
    /// Jump cutoff ε: smaller jumps are compensated.
    #[arg(long)]
    eps: Option<f64>,
    /// Replace the removed small jumps by a matching Brownian term.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    gaussian_small_jumps: Option<bool>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "SSMP_WORKERS")]
    workers: Option<usize>,
}

impl SimArgs {
    fn config(&self, base: SimConfig) -> SimConfig {
        SimConfig {
            seed: self.seed.unwrap_or(base.seed),
            n_paths: self.n.unwrap_or(base.n_paths),
            dt: self.dt.unwrap_or(base.dt),
            horizon: self.horizon.or(base.horizon),
            jump_cutoff: self.eps.unwrap_or(base.jump_cutoff),
            gaussian_small_jumps: self.gaussian_small_jumps.unwrap_or(base.gaussian_small_jumps),
            workers: self.workers.filter(|&w| w > 0).or(base.workers),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Route {
    Exact,
    Path,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum, default_value = "extinction")]
    law: LawArg,
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    /// Route for λ_t: exact scaling of χ₁, or a simulated subordinator path.
    #[arg(long, value_enum, default_value = "exact")]
    route: Route,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Wphi,
    Theorem1,
    Theorem3,
    Mc,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum)]
    suite: Suite,
    /// Times at which the persistence plateau is checked.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "100:1000:4:log")]
    plateau_grid: Grid,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
}

impl ModelArgs {
    fn spec(&self) -> CliResult<ModelSpec> {
        let text = match &self.model {
            None => String::new(),
            Some(m) if Path::new(m).is_file() => std::fs::read_to_string(m)?,
            Some(m) if m.contains('=') => m.clone(),
            Some(m) => return Err(CliError::Usage(format!("model file `{m}` not found"))),
        };
        let mut spec = ModelSpec::parse_entries(&text)?;
        for (key, value) in [
            ("a", &self.a),
            ("rho", &self.rho),
            ("b", &self.b),
            ("beta", &self.beta),
            ("x", &self.x),
        ] {
            if let Some(v) = value {
                spec.set(key, v)?;
            }
        }
        for entry in &self.set {
            let (k, v) = entry
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{entry}`")))?;
            spec.set(k.trim(), v.trim())?;
        }
        spec.validate()?;
        if let Some(alpha) = self.alpha {
            let model_alpha = if spec.is_pair() { spec.pair()?.alpha } else { 1.0 };
            if (model_alpha - alpha).abs() > 1e-12 * alpha.abs().max(1.0) {
                return Err(Error::Invalid(format!("--alpha {alpha} disagrees with the model's α = {model_alpha}")).into());
            }
        }
        Ok(spec)
    }
}

fn open_output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn model_json(spec: &ModelSpec) -> Value {
    let map: serde_json::Map<String, Value> = spec
        .echo()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
        .collect();
    Value::Object(map)
}

fn write_json(out: &OutArgs, value: Value) -> CliResult<()> {
    let mut w = open_output(&out.output)?;
    serde_json::to_writer_pretty(&mut w, &normalize_floats(value))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit_table(out: &OutArgs, spec: &ModelSpec, command: &str, table: &Table) -> CliResult<()> {
    match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = open_output(&out.output)?;
            table.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => write_json(
            out,
            json!({ "command": command, "model": model_json(spec), "rows": table.to_json() }),
        ),
    }
}

fn frechet_law(spec: &ModelSpec) -> CliResult<(BernsteinFunction, MellinLaw)> {
    let phi = spec.phi()?;
    let law = MellinLaw::gen_frechet(&phi, spec.beta()?)?;
    Ok((phi, law))
}

fn law_of(spec: &ModelSpec, law: LawArg, time: f64) -> CliResult<MellinLaw> {
    Ok(match law {
        LawArg::T => MellinLaw::markov_t(&spec.pair()?, spec.x()?)?,
        LawArg::Chi => MellinLaw::chi(&spec.time_change()?),
        LawArg::Lambda => MellinLaw::lambda(&spec.time_change()?, time)?,
        LawArg::Extinction => MellinLaw::extinction(&spec.pair()?, &spec.time_change()?, spec.x()?)?,
        LawArg::Frechet => frechet_law(spec)?.1,
        LawArg::Stable => MellinLaw::chi(&TimeChange::stable(spec.beta()?)?),
    })
}

fn cmd_phi(args: &PhiArgs) -> CliResult<()> {
    let spec = args.model.spec()?;
    let phi = spec.phi()?;
    let mut t = Table::new(&["u_re", "u_im", "phi_re", "phi_im", "w_re", "w_im"]);
    for &re in &args.grid.0 {
        let u = Complex64::new(re, args.imag);
        let p = phi.eval(u)?;
        let w = w_phi(&phi, u)?;
        t.push(vec![re.into(), args.imag.into(), p.re.into(), p.im.into(), w.re.into(), w.im.into()]);
    }
    emit_table(&args.out, &spec, "phi", &t)
}

fn cmd_mellin(args: &MellinArgs) -> CliResult<()> {
    let spec = args.model.spec()?;
    let law = law_of(&spec, args.law, args.time)?;
    let mut t = Table::new(&["z_re", "z_im", "mellin_re", "mellin_im"]);
    for &re in &args.grid.0 {
        let m = law.eval(Complex64::new(re, args.imag))?;
        t.push(vec![re.into(), args.imag.into(), m.re.into(), m.im.into()]);
    }
    emit_table(&args.out, &spec, "mellin", &t)
}

fn method_name(m: DensityMethod) -> &'static str {
    match m {
        DensityMethod::Series => "series",
        DensityMethod::MellinBarnes => "mellin_barnes",
        DensityMethod::Auto => "auto",
    }
}

fn sample_law(spec: &ModelSpec, law: LawArg, time: f64, route: Route, cfg: &SimConfig) -> CliResult<Sampled> {
    if matches!(law, LawArg::T | LawArg::Extinction) {
        warn_jump_rate(spec, cfg)?;
    }
    if route == Route::Path && law != LawArg::Lambda {
        return Err(CliError::Usage("--route path applies to --law lambda only".into()));
    }
    Ok(match law {
        LawArg::T => sample_exponential_functional(&spec.pair()?, spec.x()?, cfg)?.into(),
        LawArg::Extinction => sample_extinction(&spec.pair()?, &spec.time_change()?, spec.x()?, cfg)?.into(),
        LawArg::Chi => sample_chi(&spec.time_change()?, cfg)?.into(),
        LawArg::Lambda => {
            let tc = spec.time_change()?;
            match route {
                Route::Exact => sample_inverse_subordinator(&tc, time, cfg)?.into(),
                Route::Path => {
                    if tc != TimeChange::stable(tc.beta)? {
                        return Err(Error::Precondition("the path route needs time_change=stable".into()).into());
                    }
                    sample_inverse_subordinator_path(tc.beta, time, cfg)?.into()
                }
            }
        }
        LawArg::Stable => sample_positive_stable(spec.beta()?, cfg)?.into(),
        LawArg::Frechet => {
            return Err(Error::Invalid("no sampler for the generalized Fréchet law".into()).into());
        }
    })
}

/// Samples with the path diagnostics of the exponential functional, when there are any.
struct Sampled {
    law: EmpiricalLaw,
    horizon: Option<(f64, usize, usize)>,
}

impl From<EmpiricalLaw> for Sampled {
    fn from(law: EmpiricalLaw) -> Self {
        Sampled { law, horizon: None }
    }
}

impl From<ssmp::monte_carlo::FunctionalSample> for Sampled {
    fn from(f: ssmp::monte_carlo::FunctionalSample) -> Self {
        Sampled {
            law: f.law,
            horizon: Some((f.horizon, f.extended, f.flagged)),
        }
    }
}

fn warn_jump_rate(spec: &ModelSpec, cfg: &SimConfig) -> CliResult<()> {
    let pair = spec.pair()?;
    if let Ok(triple) = pair.levy_triple() {
        let stepper = LevyStepper::two_sided(triple, cfg.jump_cutoff, cfg.gaussian_small_jumps)?;
        if stepper.jump_rate() > JUMP_RATE_WARNING {
            eprintln!(
                "ssmp: warning: {} jumps per unit time at eps = {}; consider a larger --eps with --gaussian-small-jumps",
                format_sig17(stepper.jump_rate()),
                cfg.jump_cutoff
            );
        }
    }
    Ok(())
}

fn cmd_density(args: &DensityArgs) -> CliResult<()> {
    let spec = args.model.spec()?;
    if args.law == LawArg::Chi || args.law == LawArg::Stable {
        return Err(CliError::Usage("density supports --law t, lambda, extinction or frechet".into()));
    }
    let law = law_of(&spec, args.law, args.time)?;
    let method = match args.method {
        MethodArg::Auto => DensityMethod::Auto,
        MethodArg::Series => DensityMethod::Series,
        MethodArg::MellinBarnes => DensityMethod::MellinBarnes,
    };
    let values = density(&law, &args.grid.0, method)?;
    let mc = match args.mc {
        Some(n) => {
            let cfg = args.sim.config(SimConfig::default().with_paths(n));
            Some(sample_law(&spec, args.law, args.time, Route::Exact, &cfg)?.law)
        }
        None => None,
    };
    let mut header = vec!["t", "density", "method", "error"];
    if mc.is_some() {
        header.extend(["mc_density", "mc_se"]);
    }
    let mut t = Table::new(&header);
    for v in &values {
        let mut row: Vec<Cell> = vec![v.t.into(), v.value.into(), method_name(v.method).into(), v.error.into()];
        if let Some(emp) = &mc {
            // window of ±5% around t
            let h = 0.05 * v.t;
            let p = emp.ecdf(v.t + h) - emp.ecdf(v.t - h);
            let n = emp.len() as f64;
            row.push((p / (2.0 * h)).into());
            row.push(((p * (1.0 - p) / n).sqrt() / (2.0 * h)).into());
        }
        t.push(row);
    }
    emit_table(&args.out, &spec, "density", &t)
}

fn cmd_tail(args: &TailArgs) -> CliResult<()> {
    let spec = args.model.spec()?;
    let law_arg = args
        .law
        .unwrap_or(if spec.is_pair() { LawArg::Extinction } else { LawArg::Frechet });
    let (law, exponent, limit) = match law_arg {
        LawArg::Extinction => {
            let (pair, tc, x) = (spec.pair()?, spec.time_change()?, spec.x()?);
            let report = persistence_report(&pair, &tc, x)?;
            (MellinLaw::extinction(&pair, &tc, x)?, report.tail_exponent, report.limit_constant)
        }
        LawArg::Frechet => {
            let (phi, law) = frechet_law(&spec)?;
            (law, spec.beta()?, 1.0 / phi.eval_real(1.0)?)
        }
        _ => return Err(CliError::Usage("tail supports --law extinction or frechet".into())),
    };
    let surv = survival(&law, &args.grid.0)?;
    let mut t = Table::new(&["t", "survival", "plateau", "limit_constant"]);
    for (&ti, &s) in args.grid.0.iter().zip(&surv) {
        t.push(vec![ti.into(), s.into(), (ti.powf(exponent) * s).into(), limit.into()]);
    }
    emit_table(&args.out, &spec, "tail", &t)
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let spec = args.model.spec()?;
    let cfg = args.sim.config(SimConfig::default());
    let sampled = sample_law(&spec, args.law, args.time, args.route, &cfg)?;
    let law = &sampled.law;
    if let Some((horizon, extended, flagged)) = sampled.horizon {
        eprintln!(
            "ssmp: horizon {}, extended {extended} / {} paths, flagged {flagged}",
            format_sig17(horizon),
            cfg.n_paths
        );
    }
    match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = open_output(&args.out.output)?;
            law.write_csv(&mut w, &cfg)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let mean = law.mean()?;
            let mut summary = json!({
                "command": "simulate",
                "law": format!("{:?}", args.law).to_lowercase(),
                "model": model_json(&spec),
                "config": serde_json::to_value(&cfg)?,
                "config_sha256": cfg.hash(),
                "n": law.len(),
                "mean": float(mean.value),
                "mean_se": float(mean.se),
                "median": float(law.quantile(0.5)),
                "samples": law.samples().iter().map(|&s| float(s)).collect::<Vec<_>>(),
            });
            if let Some((horizon, extended, flagged)) = sampled.horizon {
                summary["horizon"] = float(horizon);
                summary["extended"] = json!(extended);
                summary["flagged"] = json!(flagged);
            }
            write_json(&args.out, summary)
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let spec = args.model.spec()?;
    let report: SuiteReport = match args.suite {
        Suite::Wphi => verify_wphi(&spec.phi()?)?,
        Suite::Theorem1 => verify_theorem1(&spec.pair()?, &spec.time_change()?, spec.x()?, &args.plateau_grid.0)?,
        Suite::Theorem3 => theorem3_suite(&spec.pair()?, spec.beta()?, spec.x()?)?,
        Suite::Mc => {
            let base = SimConfig {
                dt: 0.002,
                jump_cutoff: 0.05,
                gaussian_small_jumps: true,
                ..SimConfig::default()
            };
            let cfg = args.sim.config(base);
            warn_jump_rate(&spec, &cfg)?;
            verify_mc(&spec.pair()?, &spec.time_change()?, spec.x()?, &cfg)?
        }
    };
    match args.out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(&report)?;
            v["model_spec"] = model_json(&spec);
            v["all_pass"] = json!(report.all_pass());
            write_json(&args.out, v)?;
        }
        Format::Csv => {
            let mut t = Table::new(&["check", "discrepancy", "tolerance", "pass"]);
            for c in &report.checks {
                t.push(vec![
                    c.name.clone().into(),
                    c.discrepancy.into(),
                    c.tolerance.into(),
                    c.pass.to_string().into(),
                ]);
            }
            emit_table(&args.out, &spec, "verify", &t)?;
        }
    }
    if report.all_pass() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(CliError::ChecksFailed(failed.join(", ")))
    }
}

fn or_text(v: ssmp::Result<f64>) -> Cell {
    match v {
        Ok(x) => x.into(),
        Err(e) => format!("unavailable: {e}").into(),
    }
}

fn cmd_table(args: &TableArgs) -> CliResult<()> {
    let spec = args.model.spec()?;
    let mut t = Table::new(&["quantity", "value"]);
    let mut row = |name: &str, v: Cell| t.push(vec![name.into(), v]);
    row("kind", spec.kind()?.into());
    row("x", spec.x()?.into());
    row("beta", spec.beta()?.into());
    if spec.is_pair() {
        let (pair, tc, x) = (spec.pair()?, spec.time_change()?, spec.x()?);
        row("alpha", pair.alpha.into());
        row("phi_minus_at_zero", pair.minus.at_zero().into());
        row("phi_plus_at_zero", pair.plus.at_zero().into());
        row("c_alpha", pair.plus.abscissa_a_star().into());
        row("phi_beta_prime_at_zero", tc.phi_beta_prime().into());
        let law = MellinLaw::extinction(&pair, &tc, x)?;
        let (lo, hi) = law.strip();
        row("extinction_strip_lower", lo.into());
        row("extinction_strip_upper", hi.into());
        match smoothness_index(&pair, &tc) {
            Ok(idx) => {
                row("smoothness_n_phi_beta", idx.n_phi_beta.into());
                row("smoothness_n_psi", idx.n_psi.into());
                row("smoothness_n", idx.n.into());
            }
            Err(e) => row("smoothness_n", format!("unavailable: {e}").into()),
        }
        match persistence_report(&pair, &tc, x) {
            Ok(p) => {
                row("tail_exponent", p.tail_exponent.into());
                row("limit_constant", p.limit_constant.into());
            }
            Err(e) => row("tail_exponent", format!("unavailable: {e}").into()),
        }
        row("extinction_mean", or_text(law.eval_real(1.0)));
    } else {
        let phi = spec.phi()?;
        let (a, a_star) = phi.abscissas();
        row("phi_at_zero", phi.at_zero().into());
        row("phi_prime_at_zero", phi.phi_prime_at_zero().into());
        row("phi_at_infinity", phi.at_infinity().into());
        row("abscissa_a", a.into());
        row("abscissa_a_star", a_star.into());
        let law = MellinLaw::gen_frechet(&phi, spec.beta()?)?;
        let (lo, hi) = law.strip();
        row("frechet_strip_lower", lo.into());
        row("frechet_strip_upper", hi.into());
        row("frechet_tail_exponent", spec.beta()?.into());
        row("frechet_limit_constant", or_text(phi.eval_real(1.0).map(|p| 1.0 / p)));
    }
    emit_table(&args.out, &spec, "table", &t)
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Phi(a) => cmd_phi(a),
        Command::Mellin(a) => cmd_mellin(a),
        Command::Density(a) => cmd_density(a),
        Command::Tail(a) => cmd_tail(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Table(a) => cmd_table(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ssmp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("2.5").unwrap(), Grid(vec![2.5]));
        assert_eq!(parse_grid("1,2,4").unwrap(), Grid(vec![1.0, 2.0, 4.0]));
        assert_eq!(parse_grid("0:1:3").unwrap(), Grid(vec![0.0, 0.5, 1.0]));
        let g = parse_grid("1:100:3:log").unwrap();
        assert!((g.0[1] - 10.0).abs() < 1e-12 && g.0[2] == 100.0);
        assert_eq!(parse_grid("3:7:1").unwrap(), Grid(vec![3.0]));
        for bad in ["1:2", "1:2:0", "0:1:3:log", "1:2:3:cubic", "a"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e4").unwrap(), 10_000);
        assert_eq!(parse_count("250").unwrap(), 250);
        assert!(parse_count("0").is_err() && parse_count("2.5").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::DensityNotAvailable { index: 0.5 }).exit_code(), 2);
        assert_eq!(CliError::from(Error::Truncation { what: "w".into(), bound: 1.0 }).exit_code(), 1);
        assert!(CliError::from(Error::DensityNotAvailable { index: 0.5 })
            .to_string()
            .starts_with("density-not-available"));
    }
}

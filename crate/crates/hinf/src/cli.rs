//! The `hinf` command line: `norm`, `approx`, `bench` and `gain-curve`.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hinf_core::pencil::DEFAULT_BAND_TOL;
use hinf_core::system::DEFAULT_TOL_CTRB;
use hinf_core::transfer::gain;
use hinf_core::{hinf_approx_local, hinf_norm, AlgoConfig, Domain, Frequency, OptimizerConfig, StateSpaceSystem, Storage, Variant};

use crate::error::{Error, Result};
use crate::manifest::{load_system, parse_domain};
use crate::random::{random_systems, RandomSpec};
use crate::report::{csv_float, csv_text, NormReport};

#[derive(Debug, Parser)]
#[command(name = "hinf", version, about = "H-infinity norms of continuous- and discrete-time descriptor systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Global norm with a level-set certificate.
    Norm(NormArgs),
    /// Local approximation from seeds (works on sparse systems).
    Approx(ApproxArgs),
    /// Runs variants over manifests or random systems and writes counters as CSV.
    Bench(BenchArgs),
    /// Samples the gain on a uniform grid and writes CSV.
    GainCurve(GainCurveArgs),
}

#[derive(Debug, Clone, Args)]
struct Tuning {
    /// Intervals (or seeds) optimized per round.
    #[arg(long, default_value_t = 1)]
    phi: usize,
    #[arg(long, visible_alias = "tol-band", default_value_t = DEFAULT_BAND_TOL)]
    band_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    opt_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    level_bump: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_CTRB)]
    ctrb_tol: f64,
    /// File with one starting frequency per line.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Use only the seeds file, not the spectrum of (A, E).
    #[arg(long)]
    no_spectrum_seeds: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Args)]
struct NormArgs {
    manifest: PathBuf,
    #[arg(long, default_value = "hybrid-newton-interp", value_parser = parse_variant)]
    variant: Variant,
    #[command(flatten)]
    tuning: Tuning,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    manifest: PathBuf,
    #[command(flatten)]
    tuning: Tuning,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// System manifest (repeatable).
    #[arg(long = "manifest")]
    manifests: Vec<PathBuf>,
    /// Random suite, e.g. `5x(n=20,m=4,p=4,density=1,seed=0,domain=continuous)`.
    #[arg(long)]
    random: Option<String>,
    /// Comma-separated variant names, or `all` for the six exact ones.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    variants: Vec<String>,
    #[command(flatten)]
    tuning: Tuning,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GainCurveArgs {
    manifest: PathBuf,
    /// `LO,HI`; `pi` multiples such as `2pi` are accepted.
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    Variant::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Variant::EXACT.iter().chain([Variant::LocalOnly].iter()).map(|v| v.name()).collect();
        format!("unknown variant `{s}` (one of {})", names.join(", "))
    })
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().ansi().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Norm(a) => cmd_norm(&a, out),
        Command::Approx(a) => cmd_approx(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::GainCurve(a) => cmd_gain_curve(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

/// One real frequency per line; blank lines and `#` comments are skipped.
pub fn read_seeds(path: &Path, domain: Domain) -> Result<Vec<Frequency>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let t = line.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t.parse().map_err(|e| Error::Parse { origin: path.display().to_string(), line: k + 1, msg: format!("bad frequency `{t}`: {e}") })?;
        if !v.is_finite() {
            return Err(Error::Parse { origin: path.display().to_string(), line: k + 1, msg: "frequency must be finite".into() });
        }
        out.push(Frequency::new(domain, v));
    }
    Ok(out)
}

fn config(t: &Tuning, variant: Variant, domain: Domain) -> Result<AlgoConfig> {
    let seeds = match &t.seeds {
        Some(p) => read_seeds(p, domain)?,
        None => Vec::new(),
    };
    Ok(AlgoConfig {
        variant,
        phi: t.phi,
        band_tol: t.band_tol,
        level_bump: t.level_bump,
        optimizer: OptimizerConfig { opt_tol: t.opt_tol, ..OptimizerConfig::default() },
        tol_ctrb: t.ctrb_tol,
        seeds,
        spectrum_seeds: !t.no_spectrum_seeds,
        threads: t.threads.max(1),
        ..AlgoConfig::default()
    })
}

/// Exact variants need full eigensolves, so sparse inputs are densified.
fn densified(sys: StateSpaceSystem) -> Result<StateSpaceSystem> {
    if sys.storage() == Storage::Dense {
        return Ok(sys);
    }
    let e = sys.e().map(|e| e.to_dense());
    Ok(StateSpaceSystem::new(sys.a().to_dense(), sys.b().clone(), sys.c().clone(), sys.d().clone(), e, sys.domain())?)
}

fn cmd_norm(a: &NormArgs, out: &mut dyn Write) -> Result<()> {
    let (_, sys) = load_system(&a.manifest)?;
    let cfg = config(&a.tuning, a.variant, sys.domain())?;
    let sys = if a.variant == Variant::LocalOnly { sys } else { densified(sys)? };
    let r = hinf_norm(&sys, &cfg)?;
    emit(a.output.as_deref(), &(NormReport::new(&r, a.variant).to_json() + "\n"), out)
}

fn cmd_approx(a: &ApproxArgs, out: &mut dyn Write) -> Result<()> {
    let (_, sys) = load_system(&a.manifest)?;
    let cfg = config(&a.tuning, Variant::LocalOnly, sys.domain())?;
    let r = hinf_approx_local(&sys, &cfg)?;
    emit(a.output.as_deref(), &(NormReport::new(&r, Variant::LocalOnly).to_json() + "\n"), out)
}

/// `COUNTx(key=value,...)` with keys `n`, `m`, `p`, `density`, `seed`,
/// `domain` and `descriptor`.
pub fn parse_random_spec(s: &str) -> Result<(usize, u64, RandomSpec)> {
    let bad = |msg: &str| Error::Invalid(format!("bad --random spec `{s}`: {msg}"));
    let (count, rest) = s.split_once('x').ok_or_else(|| bad("expected COUNTx(...)"))?;
    let count: usize = count.trim().parse().map_err(|_| bad("count is not an integer"))?;
    let body = rest.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| bad("parameters must be in parentheses"))?;
    let mut spec = RandomSpec::dense(0, 1, 1, Domain::Continuous);
    let mut seed = 0u64;
    for kv in body.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let (k, v) = (k.trim(), v.trim());
        let int = |v: &str| v.parse::<usize>().map_err(|_| bad(&format!("`{k}` needs an integer")));
        match k {
            "n" => spec.n = int(v)?,
            "m" => spec.m = int(v)?,
            "p" => spec.p = int(v)?,
            "density" => spec.density = v.parse().map_err(|_| bad("density must be a number"))?,
            "seed" => seed = v.parse().map_err(|_| bad("seed must be an integer"))?,
            "domain" => spec.domain = parse_domain(v)?,
            "descriptor" => spec.descriptor = v.parse().map_err(|_| bad("descriptor must be true or false"))?,
            _ => return Err(bad(&format!("unknown key `{k}`"))),
        }
    }
    if spec.n == 0 || spec.m == 0 || spec.p == 0 {
        return Err(bad("n, m and p must be positive"));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(bad("density must lie in (0, 1]"));
    }
    Ok((count, seed, spec))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub problem: String,
    pub variant: Variant,
    pub gamma: Option<f64>,
    pub frequency: Option<Frequency>,
    pub certified_global: bool,
    pub pencil_eig_count: usize,
    pub gain_eval_count: usize,
    pub wall_time_seconds: f64,
    pub error: Option<String>,
}

pub const BENCH_HEADER: &str = "problem,variant,gamma,frequency,at_infinity,certified_global,pencil_eig_count,gain_eval_count,wall_time_seconds,error";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        let gamma = self.gamma.map(csv_float).unwrap_or_default();
        let (freq, inf) = match self.frequency {
            Some(f) if f.at_infinity => (String::new(), "true"),
            Some(f) => (csv_float(f.value), "false"),
            None => (String::new(), ""),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            csv_text(&self.problem),
            self.variant.name(),
            gamma,
            freq,
            inf,
            self.certified_global,
            self.pencil_eig_count,
            self.gain_eval_count,
            csv_float(self.wall_time_seconds),
            csv_text(self.error.as_deref().unwrap_or(""))
        )
    }
}

/// Runs every variant on one problem; failures are recorded in the row.
pub fn bench_problem(name: &str, sys: &StateSpaceSystem, variants: &[Variant], base: &AlgoConfig) -> Vec<BenchRecord> {
    variants
        .iter()
        .map(|&v| {
            let cfg = AlgoConfig { variant: v, threads: 1, ..base.clone() };
            let t = Instant::now();
            let r = hinf_norm(sys, &cfg);
            let wall = t.elapsed().as_secs_f64();
            match r {
                Ok(r) => BenchRecord {
                    problem: name.to_string(),
                    variant: v,
                    gamma: Some(r.gamma),
                    frequency: Some(r.frequency),
                    certified_global: r.certified_global,
                    pencil_eig_count: r.pencil_eig_count,
                    gain_eval_count: r.gain_eval_count,
                    wall_time_seconds: wall,
                    error: None,
                },
                Err(e) => BenchRecord {
                    problem: name.to_string(),
                    variant: v,
                    gamma: None,
                    frequency: None,
                    certified_global: false,
                    pencil_eig_count: 0,
                    gain_eval_count: 0,
                    wall_time_seconds: wall,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let mut variants = Vec::new();
    for name in a.variants.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        if name == "all" {
            variants.extend(Variant::EXACT);
        } else {
            variants.push(parse_variant(name).map_err(Error::Invalid)?);
        }
    }
    if variants.is_empty() {
        return Err(Error::Invalid("no variants given".into()));
    }

    let mut problems: Vec<(String, StateSpaceSystem)> = Vec::new();
    for m in &a.manifests {
        let (manifest, sys) = load_system(m)?;
        let sys = densified(sys)?;
        problems.push((manifest.name, sys));
    }
    if let Some(spec) = &a.random {
        let (count, seed, spec) = parse_random_spec(spec)?;
        for (k, sys) in random_systems(seed, count, &spec)?.into_iter().enumerate() {
            problems.push((format!("random-{k:03}"), densified(sys)?));
        }
    }
    if problems.is_empty() {
        return Err(Error::Invalid("no problems: pass --manifest or --random".into()));
    }

    let base = config(&a.tuning, variants[0], problems[0].1.domain())?;
    let rows = hinf_core::par::map(&problems, a.tuning.threads.max(1), |(name, sys)| bench_problem(name, sys, &variants, &base));
    let mut text = String::from(BENCH_HEADER);
    text.push('\n');
    for r in rows.iter().flatten() {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    emit(a.output.as_deref(), &text, out)
}

fn parse_range_value(s: &str) -> Option<f64> {
    let t = s.trim();
    if let Some(k) = t.strip_suffix("pi") {
        let k = k.trim().trim_end_matches('*');
        let factor = match k {
            "" | "+" => 1.0,
            "-" => -1.0,
            k => k.parse::<f64>().ok()?,
        };
        return Some(factor * PI);
    }
    t.parse().ok()
}

/// Sample frequencies for `[lo, hi]`; a full discrete period `[lo, lo + 2π]`
/// leaves out the duplicate end point.
pub fn curve_frequencies(domain: Domain, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let full_circle = domain == Domain::Discrete && ((hi - lo) - TAU).abs() <= 1e-12 * TAU;
    let steps = if full_circle { samples } else { samples - 1 };
    let h = (hi - lo) / steps as f64;
    (0..samples).map(|k| if !full_circle && k == samples - 1 { hi } else { lo + k as f64 * h }).collect()
}

fn cmd_gain_curve(a: &GainCurveArgs, out: &mut dyn Write) -> Result<()> {
    let bad = || Error::Invalid(format!("bad --range `{}` (expected LO,HI with LO < HI, both finite)", a.range));
    let (lo, hi) = a.range.split_once(',').ok_or_else(bad)?;
    let (lo, hi) = (parse_range_value(lo).ok_or_else(bad)?, parse_range_value(hi).ok_or_else(bad)?);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    if a.samples < 2 {
        return Err(Error::Invalid("--samples must be at least 2".into()));
    }
    let (_, sys) = load_system(&a.manifest)?;
    let mut text = String::from("frequency,gain\n");
    for w in curve_frequencies(sys.domain(), lo, hi, a.samples) {
        // poles give an empty gain field
        let g = gain(&sys, Frequency::new(sys.domain(), w)).map(csv_float).unwrap_or_default();
        text.push_str(&format!("{},{}\n", csv_float(w), g));
    }
    emit(a.output.as_deref(), &text, out)
}

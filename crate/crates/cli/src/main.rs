use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use geostable::gslaw::{gamma_density, gs_charfn, GammaParams, StableParams};
use geostable::sampling::{sample_first_passage_gamma_barrier, sample_gamma, sample_gs, sample_isotropic_gs, sample_stable, SampleBatch};
use geostable::spectral::{invert_charfn_with, DensityField, Grid1D, InversionOptions, Provenance};
use geostable::verify::{run_selected, summary, EquationId, SuiteConfig, DEFAULT_MC_N, DEFAULT_SEED};
use geostable::Error;

/// Geometric stable laws: densities, samples and equation checks.
#[derive(Parser)]
#[command(name = "geostable", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (density, sample) or directory (verify).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Format for density and sample output. Reports are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Density of a law on a uniform grid.
    Density(DensityArgs),
    /// Seeded draws from a law.
    Sample(SampleArgs),
    /// Residual checks for the equation set.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawKind {
    Gs,
    Stable,
    Gamma,
    GsSubordinator,
    FirstPassage,
    IsotropicGs,
}

#[derive(Args)]
struct LawArgs {
    #[arg(long, value_enum, default_value_t = LawKind::Gs)]
    law: LawKind,
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t: f64,
    /// Rate of the gamma law.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Dimension of the isotropic law (sampling only).
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    xmax: f64,
    #[arg(long, default_value_t = 16384)]
    n: usize,
    /// Aliased spectral copies folded into each FFT bin.
    #[arg(long, default_value_t = 400)]
    fold: usize,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long, default_value_t = 100_000)]
    count: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or a single equation id.
    #[arg(long, default_value = "all")]
    eq: String,
    /// Monte Carlo sample size for the sampling cross-checks.
    #[arg(long, default_value_t = DEFAULT_MC_N)]
    mc_n: usize,
}

/// Parameters that cannot be used; reported with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn lib(e: Error) -> anyhow::Error {
    match e {
        Error::InvalidParameter(m) | Error::Unsupported(m) => usage(m),
        other => anyhow!(other),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(usage("jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().context("thread pool")?;
    }
    match &cli.command {
        Command::Density(a) => density(&cli, a).map(|_| true),
        Command::Sample(a) => sample(&cli, a).map(|_| true),
        Command::Verify(a) => verify(&cli, a),
    }
}

fn stable_params(l: &LawArgs) -> anyhow::Result<StableParams> {
    StableParams::new(l.alpha, l.beta, l.sigma).map_err(lib)
}

fn subordinator_params(l: &LawArgs) -> anyhow::Result<StableParams> {
    if !(l.alpha > 0.0 && l.alpha < 1.0) {
        return Err(usage(format!("gs-subordinator requires 0 < alpha < 1, got {}", l.alpha)));
    }
    StableParams::new(l.alpha, 1.0, l.sigma).map_err(lib)
}

fn check_t(t: f64) -> anyhow::Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("t must be positive and finite, got {t}")))
    }
}

fn density(cli: &Cli, a: &DensityArgs) -> anyhow::Result<()> {
    let l = &a.law;
    check_t(l.t)?;
    let grid = Grid1D::new(a.xmin, a.xmax, a.n).map_err(lib)?;
    let opts = InversionOptions { filter: None, alias_fold: a.fold };
    let gs_field = |p: StableParams| invert_charfn_with(|th| gs_charfn(&p, th, l.t), &grid, l.t, &opts).map_err(lib);
    let field = match l.law {
        LawKind::Gs => gs_field(stable_params(l)?)?,
        LawKind::GsSubordinator => gs_field(subordinator_params(l)?)?,
        LawKind::FirstPassage => gs_field(StableParams::new(0.5, 1.0, 1.0).map_err(lib)?)?,
        LawKind::IsotropicGs => {
            // the one-dimensional marginal, (1 + |θ|^α)^{-t}
            if l.alpha == 1.0 || !(l.alpha > 0.0 && l.alpha <= 2.0) {
                return Err(usage(format!("isotropic-gs requires alpha in (0, 2] other than 1, got {}", l.alpha)));
            }
            gs_field(StableParams::symmetric(l.alpha, 1.0).map_err(lib)?)?
        }
        LawKind::Stable => {
            let p = stable_params(l)?;
            invert_charfn_with(|th| geostable::gslaw::stable_charfn(&p, th, l.t), &grid, l.t, &opts).map_err(lib)?
        }
        LawKind::Gamma => {
            let g = GammaParams::new(l.b).map_err(lib)?;
            // parameter errors surface here; after that every point is valid
            gamma_density(&g, 1.0, l.t).map_err(lib)?;
            DensityField::from_fn(grid, l.t, Provenance::ClosedForm, |x| gamma_density(&g, x, l.t).unwrap_or(f64::NAN))
        }
    };
    let out = cli.out.clone().unwrap_or_else(|| default_out("density", cli.format));
    match cli.format {
        Format::Csv => write_atomic(&out, |w| field.write_csv(w).map_err(Into::into)),
        Format::Json => write_atomic(&out, |w| serde_json::to_writer(w, &field).map_err(Into::into)),
    }
}

fn sample(cli: &Cli, a: &SampleArgs) -> anyhow::Result<()> {
    let l = &a.law;
    check_t(l.t)?;
    if a.count == 0 {
        return Err(usage("count must be at least 1"));
    }
    let (n, seed) = (a.count, cli.seed);
    let batch = match l.law {
        LawKind::Gs => sample_gs(&stable_params(l)?, l.t, n, seed),
        LawKind::GsSubordinator => sample_gs(&subordinator_params(l)?, l.t, n, seed),
        LawKind::Stable => sample_stable(&stable_params(l)?, l.t, n, seed),
        LawKind::Gamma => sample_gamma(&GammaParams::new(l.b).map_err(lib)?, l.t, n, seed),
        LawKind::FirstPassage => sample_first_passage_gamma_barrier(l.t, n, seed),
        LawKind::IsotropicGs => sample_isotropic_gs(l.alpha, l.dim, l.t, n, seed),
    }
    .map_err(lib)?;
    let out = cli.out.clone().unwrap_or_else(|| default_out("sample", cli.format));
    match cli.format {
        Format::Csv => {
            write_atomic(&out, |w| batch.write_csv(w).map_err(Into::into))?;
            let side = out.with_extension("json");
            write_atomic(&side, |w| write_json(w, &batch.sidecar()))
        }
        Format::Json => write_atomic(&out, |w| write_json(w, &batch_json(&batch))),
    }
}

fn batch_json(b: &SampleBatch) -> serde_json::Value {
    let mut v = b.sidecar();
    v["values"] = serde_json::json!(b.values);
    v
}

fn verify(cli: &Cli, a: &VerifyArgs) -> anyhow::Result<bool> {
    let ids: Vec<EquationId> = if a.eq == "all" { EquationId::ALL.to_vec() } else { vec![EquationId::from_str(&a.eq).map_err(lib)?] };
    if a.mc_n < 1000 {
        return Err(usage(format!("mc-n must be at least 1000, got {}", a.mc_n)));
    }
    let cfg = SuiteConfig { seed: cli.seed, mc_n: a.mc_n, ..SuiteConfig::default() };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("reports"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let reports = run_selected(&ids, &cfg);
    for r in &reports {
        let path = dir.join(format!("{}.json", r.equation));
        let json = r.to_json().map_err(lib)?;
        write_atomic(&path, |w| Ok(w.write_all(json.as_bytes())?))?;
        eprintln!("{} {} linf={:.3e} tol={:.1e}", if r.pass { "PASS" } else { "FAIL" }, r.equation, r.linf, r.tolerance);
    }
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let metadata = serde_json::json!({
        "timestamp_unix": timestamp,
        "seed": cfg.seed,
        "mc_n": cfg.mc_n,
        "jobs": rayon::current_num_threads(),
        "grid": cfg.grid,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let s = summary(&reports, &ids, metadata);
    write_atomic(&dir.join("verification_summary.json"), |w| write_json(w, &s))?;
    Ok(s["pass"].as_bool().unwrap_or(false))
}

fn default_out(stem: &str, f: Format) -> PathBuf {
    PathBuf::from(format!("{stem}.{}", if f == Format::Csv { "csv" } else { "json" }))
}

fn write_json(w: &mut dyn Write, v: &serde_json::Value) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)?;
    Ok(())
}

/// Write through a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).with_context(|| format!("creating {}", parent.display()))?;
    let tmp = tempfile::NamedTempFile::new_in(&parent)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

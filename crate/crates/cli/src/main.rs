use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

use gmm_modes::arrangement::generic_arrangement;
use gmm_modes::bounds::{bound_table, BoundSet, BoundTable};
use gmm_modes::constructions::{
    arrangement_scenario, catalog_scenario, cross_example, duistermaat_triangle, scenario_catalog, select_delta,
    seven_mode_probe, single_gaussian, triangle_product, univariate_pair, DeltaSearch, ScenarioMetadata,
};
use gmm_modes::modes::{default_starts, find_critical_points_with, AscentOptions, CriticalKind, ModeReport, ASCENT_SLACK};
use gmm_modes::ridgeline::{ridgeline_point, verify_ridgeline_membership};
use gmm_modes::{Execution, Mixture, Scenario, SearchBox};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const MAX_RESOLUTION: usize = 2000;

#[derive(Parser)]
#[command(name = "gmm-modes", version, about = "Modes of Gaussian mixture densities")]
struct Cli {
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunFlags {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Start budget for the multistart search.
    #[arg(long, global = true, default_value_t = 500)]
    starts: usize,
    #[arg(long, global = true)]
    dedup_radius: Option<f64>,
    /// Tolerance on the scale-free gradient norm.
    #[arg(long, global = true)]
    grad_tol: Option<f64>,
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Run every start on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named mixture and its metadata sidecar.
    Construct(ConstructArgs),
    /// Find and classify the critical points of a mixture file.
    Modes { mixture: PathBuf },
    /// Mode-count bounds for one (d, k) or a whole table.
    Bounds {
        #[arg(long, requires = "k", conflicts_with = "table")]
        d: Option<u64>,
        #[arg(long, requires = "d")]
        k: Option<u64>,
        /// Table for 1..=D_MAX by 1..=K_MAX.
        #[arg(long, num_args = 2, value_names = ["D_MAX", "K_MAX"])]
        table: Option<Vec<u64>>,
    },
    /// Log-density on a regular grid (d <= 2) as CSV.
    Scan {
        mixture: PathBuf,
        /// Box as lo,hi per axis, e.g. -0.5,1.5,-0.5,1.5.
        #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
        bounds: Option<Vec<f64>>,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
    },
    /// Run the scenario catalog and check every expectation.
    Verify {
        #[arg(long)]
        only: Option<String>,
    },
    /// Sample the ridgeline curve of a two-component mixture as CSV.
    Ridgeline {
        mixture: PathBuf,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },
}

#[derive(Args)]
struct ConstructArgs {
    /// Scenario: cross, duistermaat, univariate-pair, single-gaussian,
    /// seven-probe, arrangement, product, or any catalog name.
    name: String,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Arrangement width; chosen by search when omitted.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    mu1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu2: Option<f64>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    sigma_t: Option<f64>,
    #[arg(long)]
    sigma_n: Option<f64>,
}

/// Provenance block embedded in every artifact.
#[derive(Serialize)]
struct RunInfo {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    start_budget: usize,
    options: AscentOptions,
}

impl RunFlags {
    fn options(&self) -> Result<AscentOptions> {
        let mut o = AscentOptions::default();
        if let Some(r) = self.dedup_radius {
            o.dedup_radius = Some(r);
        }
        if let Some(g) = self.grad_tol {
            o.gradient_tolerance = g;
        }
        o.validate()?;
        Ok(o)
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn info(&self, command: &'static str) -> Result<RunInfo> {
        Ok(RunInfo {
            tool: "gmm-modes",
            version: VERSION,
            command,
            seed: self.seed,
            start_budget: self.starts,
            options: self.options()?,
        })
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GMM_MODES_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("GMM_MODES_THREADS={v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn sidecar_path(mixture: &Path) -> PathBuf {
    let stem = mixture.file_stem().and_then(|s| s.to_str()).unwrap_or("mixture");
    mixture.with_file_name(format!("{stem}.meta.json"))
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mixture: Mixture =
        serde_json::from_str(&text).with_context(|| format!("invalid mixture file {}", path.display()))?;
    let meta = sidecar_path(path);
    if meta.exists() {
        let text = fs::read_to_string(&meta).with_context(|| format!("reading {}", meta.display()))?;
        let meta: ScenarioMetadata =
            serde_json::from_str(&text).with_context(|| format!("invalid metadata file {}", meta.display()))?;
        return Ok(Scenario::from_parts(mixture, meta)?);
    }
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("mixture");
    Ok(Scenario::from_mixture(name, mixture))
}

fn need<T>(v: Option<T>, flag: &str, scenario: &str) -> Result<T> {
    v.with_context(|| format!("{scenario} needs --{flag}"))
}

fn construct(a: &ConstructArgs, run: &RunFlags) -> Result<Scenario> {
    let s = match a.name.as_str() {
        "cross" => cross_example(),
        "duistermaat" => duistermaat_triangle(a.sigma.unwrap_or(0.72))?,
        "univariate-pair" => univariate_pair(
            a.mu1.unwrap_or(0.0),
            a.sigma1.unwrap_or(1.0),
            need(a.mu2, "mu2", "univariate-pair")?,
            a.sigma2.unwrap_or(1.0),
            a.alpha.unwrap_or(0.5),
        )?,
        "single-gaussian" => single_gaussian(a.d.unwrap_or(2)),
        "seven-probe" => seven_mode_probe(
            need(a.sigma_t, "sigma-t", "seven-probe")?,
            need(a.sigma_n, "sigma-n", "seven-probe")?,
        )?,
        "product" => triangle_product(a.n.unwrap_or(2))?,
        "arrangement" => {
            let d = need(a.d, "d", "arrangement")?;
            let k = need(a.k, "k", "arrangement")?;
            let arr = generic_arrangement(d, k, run.seed)?;
            let delta = match a.delta {
                Some(delta) => delta,
                None => {
                    let search = DeltaSearch {
                        budget: run.starts,
                        seed: run.seed,
                        ascent: run.options()?,
                        execution: run.execution(),
                        ..DeltaSearch::default()
                    };
                    select_delta(&arr, &search)?.delta
                }
            };
            arrangement_scenario(&arr, delta)?
        }
        other => catalog_scenario(other)?,
    };
    Ok(s)
}

fn cmd_construct(a: &ConstructArgs, run: &RunFlags) -> Result<()> {
    let s = construct(a, run)?;
    let path = run.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.json", s.name)));
    let mixture = serde_json::to_string_pretty(&s.mixture)? + "\n";
    fs::write(&path, mixture).with_context(|| format!("writing {}", path.display()))?;
    #[derive(Serialize)]
    struct Sidecar<'a> {
        run: RunInfo,
        #[serde(flatten)]
        meta: ScenarioMetadata,
        mixture_digest: &'a str,
    }
    let digest = s.mixture.digest();
    let side = Sidecar {
        run: run.info("construct")?,
        meta: s.metadata(),
        mixture_digest: &digest,
    };
    let meta_path = sidecar_path(&path);
    fs::write(&meta_path, serde_json::to_string_pretty(&side)? + "\n")
        .with_context(|| format!("writing {}", meta_path.display()))?;
    println!(
        "wrote {} ({} components, d={}) and {}",
        path.display(),
        s.mixture.len(),
        s.mixture.dim(),
        meta_path.display()
    );
    Ok(())
}

fn find_modes(s: &Scenario, run: &RunFlags) -> Result<ModeReport> {
    let starts = default_starts(s, run.starts, run.seed);
    Ok(find_critical_points_with(&s.mixture, &starts, &run.options()?, run.execution()))
}

fn report_text(report: &ModeReport) -> String {
    let mut out = report.summary_line() + "\n";
    for p in &report.critical_points {
        let loc: Vec<String> = p.location.iter().map(|v| format!("{v:.9}")).collect();
        out += &format!(
            "{:<11} [{}] log_density={:.9} min_eigenvalue={:.3e} from={}\n",
            p.kind.to_string(),
            loc.join(", "),
            p.log_density,
            p.min_eigenvalue(),
            p.converged_from
        );
    }
    out
}

fn cmd_modes(path: &Path, run: &RunFlags) -> Result<()> {
    let s = load_scenario(path)?;
    let report = find_modes(&s, run)?;
    let body = match run.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                run: RunInfo,
                scenario: &'a str,
                report: &'a ModeReport,
            }
            serde_json::to_string_pretty(&Doc {
                run: run.info("modes")?,
                scenario: &s.name,
                report: &report,
            })? + "\n"
        }
        Format::Csv => {
            let info = run.info("modes")?;
            format!(
                "# {} {} seed={} starts={} options={}\n{}",
                info.tool,
                info.version,
                info.seed,
                info.start_budget,
                serde_json::to_string(&info.options)?,
                report.to_csv()?
            )
        }
        Format::Text => report_text(&report),
    };
    match &run.output {
        Some(_) => {
            run.emit(&body)?;
            println!("{}", report.summary_line());
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_bounds(d: Option<u64>, k: Option<u64>, table: Option<Vec<u64>>, run: &RunFlags) -> Result<()> {
    let table = match (d, k, table) {
        (_, _, Some(t)) => bound_table(t[0].max(1), t[1].max(1)),
        (Some(d), Some(k), None) => {
            if d == 0 || k == 0 {
                bail!("d and k must be positive");
            }
            BoundTable {
                rows: vec![vec![BoundSet::new(d, k)]],
            }
        }
        _ => bail!("give --d and --k, or --table D_MAX K_MAX"),
    };
    let body = match run.format {
        Format::Json => serde_json::to_string_pretty(&table)? + "\n",
        Format::Csv => table.to_csv()?,
        Format::Text => table.to_text(),
    };
    run.emit(&body)
}

fn cmd_scan(path: &Path, bounds: Option<Vec<f64>>, resolution: usize, run: &RunFlags) -> Result<()> {
    let s = load_scenario(path)?;
    let d = s.mixture.dim();
    if d > 2 {
        return Err(gmm_modes::Error::UnsupportedDimension(d).into());
    }
    if !(2..=MAX_RESOLUTION).contains(&resolution) {
        bail!("resolution must lie in 2..={MAX_RESOLUTION}");
    }
    let bx = match bounds {
        Some(b) => {
            if b.len() != 2 * d {
                bail!("--box needs {} numbers (lo,hi per axis), got {}", 2 * d, b.len());
            }
            SearchBox {
                lo: b.iter().step_by(2).copied().collect(),
                hi: b.iter().skip(1).step_by(2).copied().collect(),
            }
        }
        None => s.search_box.clone(),
    };
    let axis = |j: usize| -> Vec<f64> {
        (0..resolution)
            .map(|i| bx.lo[j] + (bx.hi[j] - bx.lo[j]) * i as f64 / (resolution - 1) as f64)
            .collect()
    };
    let mut out = String::with_capacity(resolution.pow(d as u32) * 40);
    let digest = s.mixture.digest();
    out += &format!("# gmm-modes {VERSION} scan seed={} mixture={digest} resolution={resolution}\n", run.seed);
    if d == 1 {
        out += "x,log_density\n";
        for x in axis(0) {
            let v = s.mixture.log_density(&DVector::from_vec(vec![x]));
            out += &format!("{x},{v}\n");
        }
    } else {
        out += "x,y,log_density\n";
        let (xs, ys) = (axis(0), axis(1));
        for &x in &xs {
            for &y in &ys {
                let v = s.mixture.log_density(&DVector::from_vec(vec![x, y]));
                out += &format!("{x},{y},{v}\n");
            }
        }
    }
    run.emit(&out)
}

fn cmd_ridgeline(path: &Path, samples: usize, run: &RunFlags) -> Result<()> {
    let s = load_scenario(path)?;
    if s.mixture.len() != 2 {
        return Err(gmm_modes::Error::ComponentCount {
            expected: 2,
            found: s.mixture.len(),
        }
        .into());
    }
    if samples < 2 {
        bail!("need at least 2 samples");
    }
    let d = s.mixture.dim();
    let mut out = format!("# gmm-modes {VERSION} ridgeline seed={} mixture={}\n", run.seed, s.mixture.digest());
    let cols: Vec<String> = (1..=d).map(|i| format!("x_{i}")).collect();
    out += &format!("alpha,{},log_density\n", cols.join(","));
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let x = ridgeline_point(&s.mixture, &[t, 1.0 - t])?;
        let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        out += &format!("{t},{},{}\n", xs.join(","), s.mixture.log_density(&x));
    }
    run.emit(&out)
}

#[derive(Serialize)]
struct Verdict {
    scenario: String,
    expected_modes: Option<usize>,
    measured_modes: usize,
    degenerate_maxima: usize,
    summary: String,
    failures: Vec<String>,
}

fn check_scenario(s: &Scenario, run: &RunFlags) -> Result<Verdict> {
    let opts = run.options()?;
    let report = find_modes(s, run)?;
    let mut failures = Vec::new();
    if let Some(e) = s.expected_modes {
        if report.maxima_count() != e {
            failures.push(format!("expected {e} modes, measured {}", report.maxima_count()));
        }
    }
    let diam = s.search_box.diameter();
    for p in &report.critical_points {
        if p.gradient_norm > opts.gradient_tolerance {
            failures.push(format!("gradient {:.2e} at {:?}", p.gradient_norm, p.location));
        }
        if p.kind == CriticalKind::Mode {
            let largest = p.hessian_eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if p.hessian_eigenvalues.iter().any(|v| *v >= -opts.degenerate_eigen_tolerance * largest) {
                failures.push(format!("mode at {:?} has a non-negative eigenvalue", p.location));
            }
        }
        let residual = verify_ridgeline_membership(&s.mixture, p);
        if residual > 1e-8 * diam {
            failures.push(format!("ridgeline residual {residual:.2e} at {:?}", p.location));
        }
    }
    if report.max_ascent_log_decrease > ASCENT_SLACK {
        failures.push(format!("ascent lost {:.2e} in log-density", report.max_ascent_log_decrease));
    }
    if report.is_numerical_failure() {
        failures.push("mode count exceeds the upper bound".into());
    }
    Ok(Verdict {
        scenario: s.name.clone(),
        expected_modes: s.expected_modes,
        measured_modes: report.maxima_count(),
        degenerate_maxima: report.degenerate_maxima,
        summary: report.summary_line(),
        failures,
    })
}

fn cmd_verify(only: Option<&str>, run: &RunFlags) -> Result<bool> {
    let scenarios = match only {
        Some(name) => vec![catalog_scenario(name)?],
        None => scenario_catalog(),
    };
    let verdicts = scenarios
        .iter()
        .map(|s| check_scenario(s, run))
        .collect::<Result<Vec<_>>>()?;
    let ok = verdicts.iter().all(|v| v.failures.is_empty());
    let body = match run.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                run: RunInfo,
                passed: bool,
                scenarios: &'a [Verdict],
            }
            serde_json::to_string_pretty(&Doc {
                run: run.info("verify")?,
                passed: ok,
                scenarios: &verdicts,
            })? + "\n"
        }
        Format::Csv => {
            let mut s = String::from("scenario,expected_modes,measured_modes,passed\n");
            for v in &verdicts {
                let exp = v.expected_modes.map(|e| e.to_string()).unwrap_or_default();
                s += &format!("{},{exp},{},{}\n", v.scenario, v.measured_modes, v.failures.is_empty());
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for v in &verdicts {
                let status = if v.failures.is_empty() { "PASS" } else { "FAIL" };
                let exp = v.expected_modes.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
                s += &format!("{status} {:<28} expected={exp:<3} {}", v.scenario, v.summary);
                if v.degenerate_maxima > 0 {
                    s += &format!(" (degenerate maxima={})", v.degenerate_maxima);
                }
                s.push('\n');
                for f in &v.failures {
                    s += &format!("     {f}\n");
                }
            }
            let passed = verdicts.iter().filter(|v| v.failures.is_empty()).count();
            s += &format!("{passed}/{} scenarios passed\n", verdicts.len());
            s
        }
    };
    run.emit(&body)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Construct(a) => cmd_construct(a, &cli.run).map(|_| true),
        Command::Modes { mixture } => cmd_modes(mixture, &cli.run).map(|_| true),
        Command::Bounds { d, k, table } => cmd_bounds(*d, *k, table.clone(), &cli.run).map(|_| true),
        Command::Scan {
            mixture,
            bounds,
            resolution,
        } => cmd_scan(mixture, bounds.clone(), *resolution, &cli.run).map(|_| true),
        Command::Verify { only } => cmd_verify(only.as_deref(), &cli.run),
        Command::Ridgeline { mixture, samples } => cmd_ridgeline(mixture, *samples, &cli.run).map(|_| true),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

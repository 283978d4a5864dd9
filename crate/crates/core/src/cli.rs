//! Batch driver behind the `stokes-ext` binary: configuration, study
//! dispatch, pass/fail flags and artifact output.
//!
//! A run is described by a [`RunConfig`], parsed from flags and an optional
//! JSON file (`--config`); flags override the file. `STOKES_EXT_OUT` sets the
//! output directory unless `--out-dir` is given.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{
    assemble_monolithic, assemble_reduced_3block, check_alpha, recover_auxiliary, solve_monolithic, solve_reduced,
    ExtendedSpaces, ExtendedState, StokesData, ZMode,
};
use crate::mesh::{build_structured_mesh, Domain, PointLocator};
use crate::verify::algebra::{negative_control, solvability_sweep};
use crate::verify::cases::{manufactured_stokes, ManufacturedCase};
use crate::verify::rates::{RateFit, RATE_CSV_HEADER};
use crate::verify::studies::{alpha_sweep, convergence_study, dual_norm_study, operator_rate_study, AlphaSweep};
use crate::verify::thresholds::*;

/// Environment variable that sets the output directory.
pub const OUT_DIR_ENV: &str = "STOKES_EXT_OUT";

/// Random points sampled per spot check.
pub const SPOT_CHECK_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Dirichlet Poisson solver rates, scalar and vector.
    PoissonConv,
    /// Rates of the full operator catalog and the dual-norm estimate.
    OperatorTests,
    /// Stokes convergence of the extended system on a manufactured case.
    #[default]
    StokesConv,
    /// Pairwise differences between members of the α family.
    AlphaSweep,
    /// Factorization and conditioning over an (α, n, z-mode) grid.
    SolvabilitySweep,
    /// Writes the monolithic matrix and its block layout.
    DumpSystem,
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

#[derive(Debug, Parser)]
#[command(name = "stokes-ext", version, about = "Equal-order P1 Stokes solver via the extended system")]
struct Args {
    /// Study to run.
    #[arg(value_enum)]
    command: Option<Command>,
    /// JSON file with any of the fields below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Manufactured case: stream4, trig or bubble8.
    #[arg(long)]
    case: Option<String>,
    /// Parameter values, comma separated (α = 1 is not allowed).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    /// Mesh resolutions, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Space of z_h: full or interior.
    #[arg(long)]
    z_mode: Option<ZMode>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seed for the random spot-check points.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            Self::One(v) => vec![v],
            Self::Many(v) => v,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    case: Option<String>,
    alpha: Option<OneOrMany<f64>>,
    n: Option<OneOrMany<usize>>,
    z_mode: Option<ZMode>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
}

/// Which grid fields were set explicitly rather than defaulted; the sweeps
/// substitute their own default grids for the rest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Explicit {
    pub alpha: bool,
    pub n: bool,
    pub z_mode: bool,
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub case: String,
    pub alpha: Vec<f64>,
    pub n: Vec<usize>,
    pub z_mode: ZMode,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub explicit: Explicit,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::default(),
            case: "stream4".into(),
            alpha: vec![0.0],
            n: vec![8, 16, 32],
            z_mode: ZMode::Interior,
            out_dir: PathBuf::from("out"),
            seed: 0,
            explicit: Explicit::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        manufactured_stokes(&self.case)?;
        if self.alpha.is_empty() {
            return Err(Error::InvalidArgument("alpha list is empty".into()));
        }
        for &a in &self.alpha {
            check_alpha(a)?;
        }
        if self.n.is_empty() {
            return Err(Error::InvalidArgument("n list is empty".into()));
        }
        let min_n = match self.command {
            Command::PoissonConv | Command::OperatorTests => 1,
            _ => 2,
        };
        if let Some(&n) = self.n.iter().find(|&&n| n < min_n) {
            return Err(Error::InvalidArgument(format!("{} needs n >= {min_n}, got {n}", self.command)));
        }
        Ok(())
    }
}

/// Parses `args` (program name first) with `STOKES_EXT_OUT` from the
/// environment.
pub fn parse_config<I, S>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    parse_config_with_env(args, std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}

/// [`parse_config`] with an explicit value for `STOKES_EXT_OUT`.
///
/// Precedence, highest first: flags, `STOKES_EXT_OUT` (output directory
/// only), the JSON file, built-in defaults.
pub fn parse_config_with_env<I, S>(args: I, env_out: Option<PathBuf>) -> Result<RunConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let a = Args::try_parse_from(args).map_err(|e| Error::Parse(e.to_string()))?;
    let file = match &a.config {
        Some(path) => serde_json::from_str::<ConfigFile>(&std::fs::read_to_string(path)?)?,
        None => ConfigFile::default(),
    };
    let d = RunConfig::default();
    let alpha = a.alpha.or(file.alpha.map(OneOrMany::into_vec));
    let n = a.n.or(file.n.map(OneOrMany::into_vec));
    let z_mode = a.z_mode.or(file.z_mode);
    let cfg = RunConfig {
        command: a.command.or(file.command).unwrap_or(d.command),
        case: a.case.or(file.case).unwrap_or(d.case),
        explicit: Explicit {
            alpha: alpha.is_some(),
            n: n.is_some(),
            z_mode: z_mode.is_some(),
        },
        alpha: alpha.unwrap_or(d.alpha),
        n: n.unwrap_or(d.n),
        z_mode: z_mode.unwrap_or(d.z_mode),
        out_dir: a.out_dir.or(env_out).or(file.out_dir).unwrap_or(d.out_dir),
        seed: a.seed.or(file.seed).unwrap_or(d.seed),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// One pass/fail check together with the threshold it was checked against.
#[derive(Debug, Clone, Serialize)]
pub struct Flag {
    pub name: String,
    /// `None` when the quantity is undefined, e.g. a non-monotone rate.
    pub value: Option<f64>,
    pub relation: &'static str,
    pub threshold: f64,
    /// Key of the threshold in the versioned table.
    pub threshold_key: &'static str,
    pub passed: bool,
    pub note: Option<String>,
}

impl Flag {
    fn check(name: impl Into<String>, value: Option<f64>, threshold_key: &'static str) -> Self {
        let (_, relation, threshold) = threshold_rows()
            .into_iter()
            .find(|r| r.0 == threshold_key)
            .expect("threshold key from the table");
        let passed = value.is_some_and(|v| match relation {
            ">=" => v >= threshold,
            ">" => v > threshold,
            "<=" => v <= threshold,
            _ => v < threshold,
        });
        Self {
            name: name.into(),
            value,
            relation,
            threshold,
            threshold_key,
            passed,
            note: None,
        }
    }

    fn line(&self) -> String {
        let v = self.value.map_or("undefined".into(), |v| format!("{v:.4e}"));
        let mut s = format!(
            "[{}] {}: {v} {} {:e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.relation,
            self.threshold,
            self.threshold_key
        );
        if let Some(n) = &self.note {
            s += &format!(" {n}");
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdEntry {
    pub key: &'static str,
    pub relation: &'static str,
    pub value: f64,
}

/// Everything a run produced; also written to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub thresholds_version: u32,
    pub thresholds: Vec<ThresholdEntry>,
    pub flags: Vec<Flag>,
    pub timings: Vec<Timing>,
    pub artifacts: Vec<PathBuf>,
    /// Study outputs (rate tables, sweep matrices) as JSON.
    pub results: serde_json::Value,
}

impl RunReport {
    fn new(config: &RunConfig) -> Self {
        Self {
            config: config.clone(),
            thresholds_version: THRESHOLDS_VERSION,
            thresholds: threshold_rows()
                .into_iter()
                .map(|(key, relation, value)| ThresholdEntry { key, relation, value })
                .collect(),
            flags: Vec::new(),
            timings: Vec::new(),
            artifacts: Vec::new(),
            results: serde_json::Value::Null,
        }
    }

    pub fn passed(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }

    /// Thresholds table, flags, timings and artifacts as plain text.
    pub fn render(&self) -> String {
        let mut s = thresholds_table();
        let _ = writeln!(s, "command {}", self.config.command);
        for f in &self.flags {
            let _ = writeln!(s, "{}", f.line());
        }
        for t in &self.timings {
            let _ = writeln!(s, "time {}: {:.2}s", t.stage, t.seconds);
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "wrote {}", a.display());
        }
        let failed = self.flags.iter().filter(|f| !f.passed).count();
        let _ = writeln!(s, "{}/{} flags passed", self.flags.len() - failed, self.flags.len());
        s
    }

    fn timed<T>(&mut self, stage: impl Into<String>, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        self.timings.push(Timing {
            stage: stage.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        Ok(out)
    }

    fn write(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| io_context(e, &path))?;
        self.artifacts.push(path);
        Ok(())
    }
}

fn io_context(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn rate_flag(name: String, fit: &RateFit, key: &'static str) -> Flag {
    let mut f = Flag::check(name, fit.order(), key);
    if !fit.monotone {
        f.note = Some("errors not monotone".into());
    }
    f
}

/// Executes the study named by `config`, writes its artifacts into
/// `config.out_dir` and returns the report (also written as
/// `summary.json`).
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| io_context(e, dir))?;
    let mut report = RunReport::new(config);
    match config.command {
        Command::PoissonConv => run_operator_rates(config, &mut report, false)?,
        Command::OperatorTests => run_operator_rates(config, &mut report, true)?,
        Command::StokesConv => run_stokes_conv(config, &mut report)?,
        Command::AlphaSweep => run_alpha_sweep(config, &mut report)?,
        Command::SolvabilitySweep => run_solvability(config, &mut report)?,
        Command::DumpSystem => run_dump_system(config, &mut report)?,
    }
    let summary = dir.join("summary.json");
    report.artifacts.push(summary.clone());
    std::fs::write(&summary, serde_json::to_string_pretty(&report)?).map_err(|e| io_context(e, &summary))?;
    Ok(report)
}

fn run_operator_rates(config: &RunConfig, report: &mut RunReport, full: bool) -> Result<()> {
    let mut rates = report.timed("operator rates", || operator_rate_study(&config.n))?;
    if !full {
        rates.retain(|r| r.operator.starts_with("dirichlet_poisson"));
    }
    let mut csv = String::from("operator,norm,n,h,error\n");
    for r in &rates {
        for (&n, e) in r.n_list.iter().zip(&r.errors) {
            let _ = writeln!(csv, "{},{},{n},{:e},{e:e}", r.operator, r.norm, 2f64.sqrt() / n as f64);
        }
        let key = if r.operator == "l2_projection" {
            "projection_l2_order"
        } else {
            "operator_h1_order"
        };
        report.flags.push(rate_flag(format!("{} {} order", r.operator, r.norm), &r.fit, key));
    }
    let mut results = serde_json::json!({ "operators": rates });
    if full {
        let dual = report.timed("dual-norm study", || dual_norm_study(&config.n))?;
        for d in &dual {
            for (&n, e) in d.n_list.iter().zip(&d.refined) {
                let _ = writeln!(csv, "dual_norm_{},H-1,{n},{:e},{e:e}", d.field, 2f64.sqrt() / n as f64);
            }
            let name = format!("dual_norm {} order", d.field);
            report.flags.push(rate_flag(name.clone(), &d.fit, "dual_norm_order_min"));
            report.flags.push(rate_flag(name, &d.fit, "dual_norm_order_max"));
        }
        results["dual_norm"] = serde_json::to_value(&dual)?;
    }
    report.write(&config.out_dir, "rates.csv", &csv)?;
    report.results = results;
    Ok(())
}

/// Solves the finest mesh again and keeps the full extended state.
fn extended_state(case: &ManufacturedCase, alpha: f64, n: usize, mode: ZMode) -> Result<ExtendedState> {
    let sp = ExtendedSpaces::new(std::sync::Arc::new(build_structured_mesh(n, Domain::UnitSquare)?))?;
    let data = StokesData::stokes(case.f.clone(), alpha)?;
    match mode {
        ZMode::Interior => {
            let sol = solve_reduced(&assemble_reduced_3block(&data, &sp)?)?;
            recover_auxiliary(&sol, &data, &sp)
        }
        ZMode::Full => Ok(solve_monolithic(&assemble_monolithic(&data, &sp, mode)?)?.0),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpotCheck {
    pub x: [f64; 2],
    pub u_h: Vec<f64>,
    pub u: [f64; 2],
    pub p_h: f64,
    pub p: f64,
}

/// Point values of `u_h` and `p_h` against the exact pair at
/// [`SPOT_CHECK_POINTS`] seeded random points.
pub fn spot_checks(state: &ExtendedState, case: &ManufacturedCase, seed: u64) -> Vec<SpotCheck> {
    let mesh = state.u.space().mesh().clone();
    let locator = PointLocator::new(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..SPOT_CHECK_POINTS)
        .filter_map(|_| {
            let x = [rng.random::<f64>(), rng.random::<f64>()];
            Some(SpotCheck {
                x,
                u_h: state.u.evaluate(&locator, x)?,
                u: (case.u)(x),
                p_h: state.p.evaluate(&locator, x)?[0],
                p: (case.p)(x),
            })
        })
        .collect()
}

fn run_stokes_conv(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let case = manufactured_stokes(&config.case)?;
    let mut csv = format!("alpha,{RATE_CSV_HEADER}\n");
    let mut tables = Vec::new();
    for &alpha in &config.alpha {
        let t = report.timed(format!("convergence alpha={alpha}"), || {
            convergence_study(&case, alpha, &config.n, config.z_mode)
        })?;
        for line in t.to_csv().lines().skip(1) {
            let _ = writeln!(csv, "{alpha},{line}");
        }
        let r = &t.rates;
        for (norm, fit) in [("u_H1", &r.err_u_h1), ("p_L2", &r.err_p_l2), ("div_u_L2", &r.div_u_l2)] {
            report
                .flags
                .push(rate_flag(format!("alpha={alpha} {norm} order"), fit, "stokes_order"));
        }
        tables.push(serde_json::json!({ "alpha": alpha, "table": t }));
    }
    report.write(&config.out_dir, "rates.csv", &csv)?;
    let finest = *config.n.iter().max().expect("validated nonempty");
    let state = report.timed("finest-mesh fields", || {
        extended_state(&case, config.alpha[0], finest, config.z_mode)
    })?;
    report.write(&config.out_dir, "fields_scalar.csv", &state.to_csv(false))?;
    report.write(&config.out_dir, "fields_vector.csv", &state.to_csv(true))?;
    let spots = spot_checks(&state, &case, config.seed);
    report.results = serde_json::json!({
        "convergence": tables,
        "spot_checks": { "n": finest, "alpha": config.alpha[0], "seed": config.seed, "points": spots },
    });
    Ok(())
}

/// `α` values of the alpha sweep when none are given.
pub const DEFAULT_SWEEP_ALPHAS: [f64; 2] = [0.0, 2.0];

fn run_alpha_sweep(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let case = manufactured_stokes(&config.case)?;
    let alphas = if config.explicit.alpha {
        config.alpha.clone()
    } else {
        DEFAULT_SWEEP_ALPHAS.to_vec()
    };
    if alphas.len() < 2 {
        return Err(Error::InvalidArgument("alpha-sweep needs at least two alpha values".into()));
    }
    let sweep = report.timed("alpha sweep", || alpha_sweep(&case, &config.n, &alphas))?;
    let mut csv = String::from("n,alpha_i,alpha_j,p_diff_L2,u_diff_H1\n");
    for (k, &n) in sweep.n_list.iter().enumerate() {
        for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                let (p, u) = (sweep.p_diff[k][i][j], sweep.u_diff[k][i][j]);
                let _ = writeln!(csv, "{n},{},{},{p:e},{u:e}", alphas[i], alphas[j]);
            }
        }
    }
    for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            let pair = format!("alpha {} vs {}", alphas[i], alphas[j]);
            let d = sweep.p_pair(i, j);
            report.flags.push(Flag::check(
                format!("{pair} p difference n={}", sweep.n_list[0]),
                Some(d[0]),
                "alpha_difference_coarse",
            ));
            for (k, red) in AlphaSweep::reductions(&d).into_iter().enumerate() {
                let name = format!("{pair} reduction n={}->{}", sweep.n_list[k], sweep.n_list[k + 1]);
                report
                    .flags
                    .push(Flag::check(name, Some(red).filter(|r| r.is_finite()), "alpha_reduction_per_doubling"));
            }
        }
    }
    report.write(&config.out_dir, "alpha_sweep.csv", &csv)?;
    report.results = serde_json::to_value(&sweep)?;
    Ok(())
}

/// Default grid of the solvability sweep.
pub const DEFAULT_SOLVABILITY_ALPHAS: [f64; 6] = [-2.0, -1.0, 0.0, 0.5, 2.0, 5.0];
pub const DEFAULT_SOLVABILITY_N: [usize; 4] = [4, 8, 16, 32];
/// Mesh of the unstabilized negative control.
pub const NEGATIVE_CONTROL_N: usize = 8;

fn run_solvability(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let case = manufactured_stokes(&config.case)?;
    let alphas = if config.explicit.alpha {
        config.alpha.clone()
    } else {
        DEFAULT_SOLVABILITY_ALPHAS.to_vec()
    };
    let n_list = if config.explicit.n {
        config.n.clone()
    } else {
        DEFAULT_SOLVABILITY_N.to_vec()
    };
    let modes = if config.explicit.z_mode {
        vec![config.z_mode]
    } else {
        vec![ZMode::Interior, ZMode::Full]
    };
    let pts = report.timed("solvability sweep", || solvability_sweep(&case, &alphas, &n_list, &modes))?;
    let mut csv = String::from("mode,alpha,n,dim,factorized,residual,sigma_ratio,numerically_singular,passed\n");
    for p in &pts {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{:e},{:e},{},{}",
            p.mode,
            p.alpha,
            p.n,
            p.dim,
            p.factorized,
            p.residual,
            p.sigma_ratio,
            p.numerically_singular,
            p.passed()
        );
        let mut f = Flag::check(
            format!("solve mode={} alpha={} n={}", p.mode, p.alpha, p.n),
            Some(p.residual).filter(|r| r.is_finite()),
            "solve_residual",
        );
        if p.numerically_singular {
            f.passed = false;
            f.note = Some(format!("numerically singular (sigma ratio {:.1e})", p.sigma_ratio));
        }
        if let Some(e) = &p.error {
            f.note = Some(e.clone());
        }
        report.flags.push(f);
    }
    let neg = report.timed("negative control", || {
        negative_control(NEGATIVE_CONTROL_N, NEGATIVE_CONTROL_RATIO_MAX)
    })?;
    let mut f = Flag::check(
        format!("unstabilized P1/P1 sigma ratio n={NEGATIVE_CONTROL_N}"),
        Some(neg.ratio),
        "negative_control_sigma_ratio",
    );
    f.note = Some(format!("{} null modes", neg.null_dimension));
    report.flags.push(f);
    report.write(&config.out_dir, "solvability.csv", &csv)?;
    report.results = serde_json::json!({ "points": pts, "negative_control": neg });
    Ok(())
}

fn run_dump_system(config: &RunConfig, report: &mut RunReport) -> Result<()> {
    let case = manufactured_stokes(&config.case)?;
    let (alpha, n) = (config.alpha[0], config.n[0]);
    let sys = report.timed("assembly", || {
        let sp = ExtendedSpaces::new(std::sync::Arc::new(build_structured_mesh(n, Domain::UnitSquare)?))?;
        assemble_monolithic(&StokesData::stokes(case.f.clone(), alpha)?, &sp, config.z_mode)
    })?;
    let path = config.out_dir.join("system.mtxt");
    sys.matrix.write_text(&path)?;
    report.artifacts.push(path);
    report.write(&config.out_dir, "layout.txt", &sys.layout.describe())?;
    let rhs: String = sys.rhs.iter().map(|v| format!("{v:e}\n")).collect();
    report.write(&config.out_dir, "rhs.txt", &rhs)?;
    report.results = serde_json::json!({
        "alpha": alpha,
        "n": n,
        "z_mode": config.z_mode,
        "dim": sys.dim(),
        "nnz": sys.matrix.nnz(),
        "layout": sys.layout,
    });
    Ok(())
}

/// Full command-line entry point; returns the process exit code: 0 when
/// every flag passes, 1 when some flag fails, 2 on a usage or solve error.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    if let Err(e) = Args::try_parse_from(&args) {
        if !e.use_stderr() {
            // --help and --version
            let _ = e.print();
            return 0;
        }
    }
    let config = match parse_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("stokes-ext: {e}");
            return 2;
        }
    };
    match run(&config) {
        Ok(report) => {
            print!("{}", report.render());
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("stokes-ext: {} failed: {e}", config.command);
            2
        }
    }
}

//! Command-line front end: density-evolution trajectories, growth-bound
//! threshold curves, trapping-set reports, and Monte-Carlo decoder statistics
//! as CSV, each accompanied by a JSON manifest that reproduces the run.
//!
//! Output conventions: comma-separated CSV with a mandatory header row, `.`
//! decimal separator, floating-point fields at 9 significant digits. With
//! `--out PATH` the CSV goes to PATH and the manifest to
//! `PATH.manifest.json`; without it the CSV goes to stdout and the manifest
//! to stderr. Exit codes: 0 on success, 2 on validation/domain errors, 3 on
//! numerical non-convergence.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use defloor::{
    build_state_space, construct_margulis, de_trajectory, load_alist, monte_carlo_run, phi,
    phi_bounds, snr_llr_threshold_curve, snr_threshold_breakout, CurveSolve, DecoderConfig,
    EnsembleSpec, GrowthQuery, ParityCheckMatrix, TrappingSetTopology,
};

#[derive(Parser)]
#[command(name = "defloor", version, about = "Density-evolution and error-floor analysis")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the Gaussian-DE phi function and its sandwich bounds.
    Phi(PhiArgs),
    /// Density-evolution mean trajectory for an ensemble.
    De(DeArgs),
    /// SNR/LLR threshold curves and breakout thresholds.
    Thresholds(ThresholdArgs),
    /// Report on a trapping-set topology file.
    Ts(TsArgs),
    /// Monte-Carlo decoder simulation with per-iteration statistics.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct EnsembleArgs {
    /// Regular ensemble as dv:dc, e.g. 3:6.
    #[arg(long, value_name = "DV:DC", conflicts_with_all = ["dv", "rho"])]
    ensemble: Option<String>,
    /// Variable degree for an irregular ensemble (with --rho).
    #[arg(long, requires = "rho")]
    dv: Option<u32>,
    /// Edge-perspective check-degree distribution, e.g. "2:0.1,6:0.9".
    #[arg(long, value_name = "J:FRAC,...", requires = "dv")]
    rho: Option<String>,
}

impl EnsembleArgs {
    fn build(&self) -> Result<EnsembleSpec, CliError> {
        match (&self.ensemble, self.dv, &self.rho) {
            (Some(spec), None, None) => {
                let (dv, dc) = spec
                    .split_once(':')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                    .ok_or_else(|| {
                        CliError::usage(format!("--ensemble expects dv:dc, got {spec:?}"))
                    })?;
                Ok(EnsembleSpec::regular(dv, dc)?)
            }
            (None, Some(dv), Some(rho)) => {
                let mut pairs = Vec::new();
                for part in rho.split(',') {
                    let (j, f) = part
                        .split_once(':')
                        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                        .ok_or_else(|| {
                            CliError::usage(format!("--rho expects j:frac pairs, got {part:?}"))
                        })?;
                    pairs.push((j, f));
                }
                Ok(EnsembleSpec::irregular(dv, &pairs)?)
            }
            _ => Err(CliError::usage("specify either --ensemble dv:dc or --dv N --rho ...")),
        }
    }

    fn describe(&self, params: &mut BTreeMap<String, String>) {
        if let Some(e) = &self.ensemble {
            params.insert("ensemble".into(), e.clone());
        }
        if let Some(dv) = self.dv {
            params.insert("dv".into(), dv.to_string());
        }
        if let Some(rho) = &self.rho {
            params.insert("rho".into(), rho.clone());
        }
    }
}

#[derive(Args)]
struct PhiArgs {
    /// Single evaluation point (alternative to a sweep).
    #[arg(long, conflicts_with_all = ["x_min", "x_max", "step"])]
    x: Option<f64>,
    /// Sweep start (inclusive).
    #[arg(long, requires_all = ["x_max", "step"])]
    x_min: Option<f64>,
    /// Sweep end (inclusive).
    #[arg(long)]
    x_max: Option<f64>,
    /// Sweep step.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeArgs {
    #[command(flatten)]
    ens: EnsembleArgs,
    #[arg(long)]
    ebn0_db: f64,
    /// Iteration budget (the trajectory may stop earlier at the ceiling).
    #[arg(long)]
    iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    ens: EnsembleArgs,
    /// Spectral radii for the curve series, e.g. "1.696,1.761".
    #[arg(long, value_name = "R,...", default_value = "1.696,1.761")]
    r_list: String,
    /// Smallest prior mean on the curve grid.
    #[arg(long, default_value_t = 2.0)]
    m_min: f64,
    /// Largest prior mean on the curve grid.
    #[arg(long, default_value_t = 100.0)]
    m_max: f64,
    /// Number of geometrically spaced grid points.
    #[arg(long, default_value_t = 40)]
    m_steps: usize,
    /// Fractions delta for breakout-threshold rows (repeatable).
    #[arg(long, value_name = "DELTA", default_values_t = [1.0])]
    breakout_delta: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TsArgs {
    /// Trapping-set topology JSON file.
    #[arg(long, value_name = "PATH")]
    ts: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Use the algebraic (2640, 1320) construction as H.
    #[arg(long, conflicts_with = "alist")]
    margulis: bool,
    /// Load H from an alist file.
    #[arg(long, value_name = "PATH")]
    alist: Option<PathBuf>,
    #[arg(long)]
    ebn0_db: f64,
    #[arg(long)]
    frames: u64,
    #[arg(long)]
    iters: u32,
    /// Saturate propagated messages to [-L, L].
    #[arg(long, value_name = "L")]
    saturate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Reproduction record written next to every CSV.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    version: String,
    parameters: BTreeMap<String, String>,
    output: Option<String>,
}

impl RunManifest {
    fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            parameters: BTreeMap::new(),
            output: None,
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }
}

enum CliError {
    Usage(String),
    Lib(defloor::Error),
    Io(std::io::Error),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Lib(e) => match e {
                defloor::Error::NonConvergence(_) => 3,
                _ => 2,
            },
        }
    }
}

impl From<defloor::Error> for CliError {
    fn from(e: defloor::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

/// A float at 9 significant digits, the documented CSV precision.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Writes the CSV to `--out` (manifest to `<out>.manifest.json`) or to
/// stdout (manifest to stderr).
fn emit(csv: &str, manifest: &mut RunManifest, out: Option<&Path>) -> Result<(), CliError> {
    manifest.output = out.map(|p| p.display().to_string());
    let manifest_json =
        serde_json::to_string_pretty(manifest).expect("manifest serialization cannot fail");
    match out {
        Some(path) => {
            std::fs::write(path, csv)?;
            let mut mpath = path.as_os_str().to_owned();
            mpath.push(".manifest.json");
            std::fs::write(PathBuf::from(mpath), manifest_json)?;
        }
        None => {
            print!("{csv}");
            eprintln!("{manifest_json}");
        }
    }
    Ok(())
}

fn cmd_phi(args: &PhiArgs) -> Result<(), CliError> {
    let xs: Vec<f64> = match (args.x, args.x_min, args.x_max, args.step) {
        (Some(x), None, None, None) => vec![x],
        (None, Some(lo), Some(hi), Some(step)) => {
            if !(step > 0.0 && step.is_finite()) || hi < lo {
                return Err(CliError::usage(format!(
                    "sweep needs x_max >= x_min and step > 0, got [{lo}, {hi}] step {step}"
                )));
            }
            let count = ((hi - lo) / step).round() as usize + 1;
            (0..count).map(|i| lo + i as f64 * step).filter(|&x| x <= hi + 1e-9 * step).collect()
        }
        _ => return Err(CliError::usage("specify --x or the sweep --x-min --x-max --step")),
    };

    let mut csv = String::from("x,phi,lower,upper\n");
    for &x in &xs {
        let p = phi(x)?;
        let (lo, hi) = phi_bounds(x)?;
        writeln!(csv, "{},{},{},{}", sig9(x), sig9(p), sig9(lo), sig9(hi)).unwrap();
    }

    let mut manifest = RunManifest::new("phi");
    match (args.x, args.x_min, args.x_max, args.step) {
        (Some(x), ..) => {
            manifest.param("x", x);
        }
        (_, Some(lo), Some(hi), Some(step)) => {
            manifest.param("x_min", lo).param("x_max", hi).param("step", step);
        }
        _ => unreachable!("validated above"),
    }
    emit(&csv, &mut manifest, args.out.as_deref())
}

fn cmd_de(args: &DeArgs) -> Result<(), CliError> {
    let ens = args.ens.build()?;
    let ch = defloor::ChannelCondition::new(args.ebn0_db, ens.rate())?;
    let traj = de_trajectory(&ens, &ch, args.iters)?;

    let mut csv = String::from("iteration,mean,variance\n");
    for (idx, &m) in traj.means().iter().enumerate() {
        writeln!(csv, "{},{},{}", idx + 1, sig9(m), sig9(2.0 * m)).unwrap();
    }

    let mut manifest = RunManifest::new("de");
    args.ens.describe(&mut manifest.parameters);
    manifest.param("ebn0_db", args.ebn0_db).param("iters", args.iters);
    emit(&csv, &mut manifest, args.out.as_deref())
}

fn cmd_thresholds(args: &ThresholdArgs) -> Result<(), CliError> {
    let ens = args.ens.build()?;
    let mut rs = Vec::new();
    for part in args.r_list.split(',') {
        let r: f64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("--r-list entry {part:?} is not a number")))?;
        rs.push(r);
    }
    rs.sort_by(|a, b| a.total_cmp(b));
    if args.m_steps < 2 || !(args.m_min > 0.0) || args.m_max <= args.m_min {
        return Err(CliError::usage(format!(
            "grid needs 0 < m_min < m_max and m_steps >= 2, got [{}, {}] x {}",
            args.m_min, args.m_max, args.m_steps
        )));
    }
    let log_lo = args.m_min.ln();
    let log_hi = args.m_max.ln();
    let grid: Vec<f64> = (0..args.m_steps)
        .map(|i| (log_lo + (log_hi - log_lo) * i as f64 / (args.m_steps - 1) as f64).exp())
        .collect();

    // Curve series ordered by r, then breakout rows; unsolved grid points
    // keep their row with an empty threshold field.
    let mut csv = String::from("series,param,m_prev,ebn0_db\n");
    for &r in &rs {
        let q = GrowthQuery::new(ens.clone(), r)?;
        for point in snr_llr_threshold_curve(&q, ens.rate(), &grid)? {
            let ebn0 = match point.solve {
                CurveSolve::Solved { ebn0_db, .. } => sig9(ebn0_db),
                CurveSolve::BelowBracket | CurveSolve::NotBracketed => String::new(),
            };
            writeln!(csv, "curve,{},{},{}", sig9(r), sig9(point.m_prev), ebn0).unwrap();
        }
    }
    for &delta in &args.breakout_delta {
        let ebn0 = snr_threshold_breakout(&ens, delta)?;
        writeln!(csv, "breakout,{},,{}", sig9(delta), sig9(ebn0)).unwrap();
    }

    let mut manifest = RunManifest::new("thresholds");
    args.ens.describe(&mut manifest.parameters);
    manifest
        .param("r_list", args.r_list.trim())
        .param("m_min", args.m_min)
        .param("m_max", args.m_max)
        .param("m_steps", args.m_steps)
        .param(
            "breakout_delta",
            args.breakout_delta.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
        );
    emit(&csv, &mut manifest, args.out.as_deref())
}

fn cmd_ts(args: &TsArgs) -> Result<(), CliError> {
    let ts = TrappingSetTopology::load(&args.ts)?;
    let model = build_state_space(&ts)?;
    let r = model.r_detail();

    let mut csv = String::from("a,b,n_states,r,method\n");
    writeln!(
        csv,
        "{},{},{},{},{:?}",
        ts.a,
        ts.b(),
        model.n_states(),
        sig9(r.value),
        r.method
    )
    .unwrap();

    let mut manifest = RunManifest::new("ts");
    manifest.param("ts", args.ts.display());
    emit(&csv, &mut manifest, args.out.as_deref())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let h: ParityCheckMatrix = match (&args.alist, args.margulis) {
        (Some(path), false) => load_alist(path)?,
        (None, true) => construct_margulis(),
        _ => return Err(CliError::usage("specify exactly one H source: --margulis or --alist")),
    };
    let rate = 1.0 - h.m() as f64 / h.n() as f64;

    let mut cfg = DecoderConfig::new(args.iters)?;
    if let Some(l) = args.saturate {
        cfg = cfg.with_saturation(l)?;
    }
    let report = monte_carlo_run(&h, args.ebn0_db, rate, args.frames, &cfg, args.seed)?;

    let mut csv = String::from("iteration,mean,variance,var_over_mean,var_over_mean_sq,beta_prime\n");
    for (idx, s) in report.stats.summaries().iter().enumerate() {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            idx + 1,
            sig9(s.mean),
            sig9(s.variance),
            sig9(s.variance / s.mean),
            sig9(s.variance / (s.mean * s.mean)),
            sig9(s.mean / s.variance.sqrt()),
        )
        .unwrap();
    }
    eprintln!(
        "frames={} frame_errors={} bit_errors={}",
        report.frames, report.frame_errors, report.bit_errors
    );

    let mut manifest = RunManifest::new("simulate");
    if args.margulis {
        manifest.param("margulis", true);
    }
    if let Some(path) = &args.alist {
        manifest.param("alist", path.display());
    }
    if let Some(l) = args.saturate {
        manifest.param("saturate", l);
    }
    manifest
        .param("ebn0_db", args.ebn0_db)
        .param("rate", rate)
        .param("frames", args.frames)
        .param("iters", args.iters)
        .param("seed", args.seed);
    emit(&csv, &mut manifest, args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Phi(a) => cmd_phi(a),
        Cmd::De(a) => cmd_de(a),
        Cmd::Thresholds(a) => cmd_thresholds(a),
        Cmd::Ts(a) => cmd_ts(a),
        Cmd::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

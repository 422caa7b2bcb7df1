mod plot;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use accelflow::bounds::{self, Check, ConstantsReport, Relation};
use accelflow::estimators;
use accelflow::experiments::{self, ExperimentConfig};
use accelflow::grid::GridSpec;
use accelflow::linalg;
use accelflow::oracle;
use accelflow::risk;
use accelflow::shrinkage;
use accelflow::special;
use accelflow::{Error, FixedSignal, FlowKind, PriorSignal, SignalModel, Spectrum};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "accelflow",
    version,
    about = "Risk of gradient, accelerated and heavy-ball flows for least squares"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the inflation and parameter-error constants; exits 1 on any failure.
    VerifyConstants {
        /// Tolerance on the two min-max constants.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact bias, variance and risk along a grid of times or ridge strengths.
    RiskCurve(RiskCurveArgs),
    /// Coefficients of one estimator on a concrete (X, y).
    Estimate(EstimateArgs),
    /// Compare RK4 trajectories against the closed forms on seeded instances.
    OracleCheck(OracleArgs),
    /// Run a figure sweep from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Override every design seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Prior-averaged curves instead of one drawn signal.
        #[arg(long)]
        bayes: bool,
    },
    /// Evaluate one shrinkage factor and its complement.
    Shrink {
        #[arg(long)]
        kind: FlowKind,
        #[arg(long)]
        s: f64,
        /// Smallest eigenvalue, needed by heavy ball.
        #[arg(long)]
        mu: Option<f64>,
        /// Time for flows, λ for ridge.
        #[arg(long)]
        param: f64,
    },
    /// Evaluate a special function at a point or over a grid (two-column CSV).
    SpecialEval(SpecialArgs),
    /// Render CSV curves to a self-contained SVG.
    Plot {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        logx: bool,
        #[arg(long)]
        logy: bool,
        /// Column of a risk curve to plot: bias_sq, variance or risk.
        #[arg(long)]
        column: Option<String>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_enum)]
    scale: Option<Scale>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scale {
    Log,
    Linear,
}

impl GridArgs {
    fn spec(&self, default: GridSpec) -> GridSpec {
        GridSpec {
            lo: self.lo.unwrap_or(default.lo),
            hi: self.hi.unwrap_or(default.hi),
            count: self.count.unwrap_or(default.count),
            log: self.scale.map_or(default.log, |s| s == Scale::Log),
        }
    }
}

#[derive(Args)]
struct RiskCurveArgs {
    #[arg(long)]
    kind: FlowKind,
    /// Headerless n×p design matrix CSV.
    #[arg(long, conflicts_with = "eigenvalues")]
    design: Option<PathBuf>,
    /// Eigenvalues of XᵀX/n, one per line (the eigenbasis is taken as the identity).
    #[arg(long, requires = "n")]
    eigenvalues: Option<PathBuf>,
    /// Sample size, required with --eigenvalues.
    #[arg(long)]
    n: Option<usize>,
    /// True coefficients; drawn from --seed when absent.
    #[arg(long, conflicts_with = "bayes")]
    beta0: Option<PathBuf>,
    #[arg(long)]
    bayes: bool,
    /// ‖β₀‖²/σ² (r²/σ² under --bayes).
    #[arg(long, default_value_t = 1.0)]
    snr: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_sq: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    kind: FlowKind,
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    response: PathBuf,
    /// Time for flows, λ for ridge.
    #[arg(long)]
    param: f64,
    /// Report the gap to ridge at λ = 1/t² as JSON instead of the coefficients.
    #[arg(long)]
    coupling: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 50.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecialFn {
    J1,
    J1Ratio,
    J1RatioComplement,
    HKappa,
}

impl SpecialFn {
    fn name(self) -> &'static str {
        match self {
            SpecialFn::J1 => "j1",
            SpecialFn::J1Ratio => "j1_ratio",
            SpecialFn::J1RatioComplement => "j1_ratio_complement",
            SpecialFn::HKappa => "h_kappa",
        }
    }

    fn eval(self, x: f64) -> accelflow::Result<f64> {
        match self {
            SpecialFn::J1 => special::bessel_j1(x),
            SpecialFn::J1Ratio => special::j1_ratio(x),
            SpecialFn::J1RatioComplement => special::j1_ratio_complement(x),
            SpecialFn::HKappa => bounds::h_kappa(x),
        }
    }
}

#[derive(Args)]
struct SpecialArgs {
    #[arg(long = "fn", value_enum)]
    function: SpecialFn,
    #[arg(long, conflicts_with_all = ["lo", "hi", "count"])]
    x: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Verification,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)
        }
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn json<T: Serialize>(v: &T) -> std::result::Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn report_outcome(report: &ConstantsReport) -> Outcome {
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "FAIL {}: value {} vs {} (tol {})",
            c.name,
            num(c.value),
            num(c.paper_value),
            c.tolerance
        );
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn verify_constants(tol: f64, out: Option<&Path>) -> Outcome {
    let report = bounds::verify_constants(tol)?;
    emit(out, &json(&report)?)?;
    report_outcome(&report)
}

fn risk_curve(a: &RiskCurveArgs) -> Outcome {
    let default = if a.kind == FlowKind::Ridge {
        experiments::default_ridge_grid()
    } else {
        experiments::default_t_grid()
    };
    let grid = a.grid.spec(default);
    grid.validate()?;
    let (spectrum, n, basis_design) = match (&a.design, &a.eigenvalues) {
        (Some(path), _) => {
            let d = linalg::design_decompose(&linalg::read_matrix_csv(path)?)?;
            (d.spectrum.clone(), d.n, Some(d))
        }
        (None, Some(path)) => {
            let s = Spectrum::new(linalg::read_vector_csv(path)?)?;
            (s, a.n.unwrap_or(0), None)
        }
        (None, None) => return Err(Failure::Usage("one of --design or --eigenvalues is required".into())),
    };
    let p = spectrum.len();
    let signal = if a.bayes {
        SignalModel::Prior(PriorSignal {
            r_sq: a.snr * a.sigma_sq,
            sigma_sq: a.sigma_sq,
            n,
            p,
        })
    } else {
        let beta0 = match &a.beta0 {
            Some(path) => linalg::read_vector_csv(path)?,
            None => experiments::gen_signal(p, a.snr, a.sigma_sq, a.seed)?.0,
        };
        let beta0_rotated = match &basis_design {
            Some(d) => d.rotate(&beta0)?,
            None => beta0,
        };
        SignalModel::Fixed(FixedSignal {
            beta0_rotated,
            sigma_sq: a.sigma_sq,
            n,
        })
    };
    let curve = risk::risk_curve(&spectrum, &signal, a.kind, &grid.points())?;
    if curve.len() >= 3 {
        let osc = risk::oscillation_report(&curve)?;
        info!(
            "local maxima: {}, max rebound: {}",
            osc.num_local_maxima,
            num(osc.max_rebound)
        );
    }
    let mut buf = Vec::new();
    risk::write_curve_csv(&mut buf, a.kind, &curve)?;
    emit(a.out.as_deref(), &String::from_utf8_lossy(&buf))?;
    Ok(())
}

fn estimate(a: &EstimateArgs) -> Outcome {
    let x = linalg::read_matrix_csv(&a.design)?;
    let y = linalg::read_vector_csv(&a.response)?;
    let d = linalg::attach_response(linalg::design_decompose(&x)?, &x, &y)?;
    let text = if a.coupling {
        json(&estimators::coupling_gap(&d, a.kind, a.param)?)?
    } else {
        let beta = if a.kind == FlowKind::Ridge {
            estimators::ridge_estimate(&d, a.param)?
        } else {
            estimators::flow_estimate(&d, a.kind, a.param)?
        };
        beta.iter().map(|&b| num(b) + "\n").collect()
    };
    emit(a.out.as_deref(), &text)?;
    Ok(())
}

fn oracle_check(a: &OracleArgs) -> Outcome {
    if !(a.t_end > 0.0 && a.t_end.is_finite()) {
        return Err(Failure::Usage("--t-end must be positive".into()));
    }
    let instances = oracle::oracle_instances(a.seed, a.instances)?;
    let grid = GridSpec::linear(0.0, a.t_end, 101).points();
    let start = Instant::now();
    let gaps = oracle::oracle_equivalence(&instances, &grid, a.step)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let checks = gaps
        .iter()
        .map(|g| {
            let name = format!("rk4_vs_closed_form_{}", g.kind.short_name());
            Check::new(&name, g.sup_error, 0.0, a.tol, Relation::AtMost, ms)
        })
        .collect();
    let report = ConstantsReport { checks };
    emit(a.out.as_deref(), &json(&report)?)?;
    report_outcome(&report)
}

fn simulate(config: &Path, seed: Option<u64>, out: Option<PathBuf>, bayes: bool) -> Outcome {
    let text = fs::read_to_string(config).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
    let mut cfg =
        ExperimentConfig::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
    if let Some(s) = seed {
        cfg = cfg.with_seed(s);
    }
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    cfg.bayes |= bayes;
    let manifest = experiments::run_sweep(&cfg)?;
    for name in manifest.files.keys() {
        println!("{}", cfg.output_dir.join(name).display());
    }
    Ok(())
}

fn shrink(kind: FlowKind, s: f64, mu: Option<f64>, param: f64) -> Outcome {
    let mu = match (kind, mu) {
        (FlowKind::HeavyBallFlow, None) => return Err(Failure::Usage("heavy ball needs --mu".into())),
        (_, m) => m.unwrap_or(0.0),
    };
    let sh = shrinkage::shrink(kind, s, mu, param)?;
    println!("factor,complement");
    println!("{},{}", num(sh.factor), num(sh.complement));
    Ok(())
}

fn special_eval(a: &SpecialArgs) -> Outcome {
    let name = a.function.name();
    if let Some(x) = a.x {
        println!("{}", num(a.function.eval(x)?));
        return Ok(());
    }
    let default = match a.function {
        SpecialFn::HKappa => GridSpec::linear(1.0, 100.0, 400),
        _ => GridSpec::linear(0.0, 20.0, 401),
    };
    let grid = a.grid.spec(default);
    grid.validate()?;
    let mut text = format!("x,{name}\n");
    for x in grid.points() {
        text.push_str(&format!("{},{}\n", num(x), num(a.function.eval(x)?)));
    }
    emit(a.out.as_deref(), &text)?;
    Ok(())
}

fn plot_cmd(inputs: &[PathBuf], out: &Path, logx: bool, logy: bool, column: Option<&str>) -> Outcome {
    let data = plot::load(inputs, column).map_err(Failure::Usage)?;
    let svg = plot::render_svg(&data, plot::Axes { logx, logy }).map_err(Failure::Usage)?;
    emit(Some(out), &svg)?;
    Ok(())
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(v) = std::env::var("ACCELFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("ACCELFLOW_THREADS must be a nonnegative integer, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::VerifyConstants { tol, out } => verify_constants(tol, out.as_deref()),
        Command::RiskCurve(a) => risk_curve(&a),
        Command::Estimate(a) => estimate(&a),
        Command::OracleCheck(a) => oracle_check(&a),
        Command::Simulate {
            config,
            seed,
            out,
            bayes,
        } => simulate(&config, seed, out, bayes),
        Command::Shrink { kind, s, mu, param } => shrink(kind, s, mu, param),
        Command::SpecialEval(a) => special_eval(&a),
        Command::Plot {
            inputs,
            out,
            logx,
            logy,
            column,
        } => plot_cmd(&inputs, &out, logx, logy, column.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

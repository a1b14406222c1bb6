use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use rci_secrecy::asymptotics::{large_system_point, secrecy_rate_deq_perfect};
use rci_secrecy::fdd::{rate_gap, FddPlan, GapMode};
use rci_secrecy::harness::{
    ergodic_secrecy_rate_mc_with, load_spec, run_recipe, run_selftest, run_sweep, write_csv,
    CsitSource, Recipe, SweepResult, DEFAULT_TRIALS,
};
use rci_secrecy::tdd::{cubic_relative_residual, optimal_training_grid, QReference, TddConfig};
use rci_secrecy::{optimal_regularizer, Error, SystemConfig};

#[derive(Parser)]
#[command(name = "rcisec", version, about = "Secrecy rates of regularized channel inversion under imperfect CSIT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Large-system SINRs and secrecy rate at one operating point.
    Deq {
        #[command(flatten)]
        common: Common,
        /// Regularizer; defaults to the secrecy-optimal value for (β, ρ).
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Ergodic Monte Carlo secrecy sum-rate.
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Feedback bits per user for a target rate gap of log2(b) under RVQ.
    FddBits {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        b: f64,
    },
    /// Optimal uplink training length: grid search and cubic approximation.
    TddTrain {
        #[command(flatten)]
        common: Common,
        /// Coherence interval length in channel uses.
        #[arg(long = "T", default_value_t = 100)]
        coherence: usize,
        /// Downlink-to-uplink SNR ratio.
        #[arg(long, default_value_t = 10.0)]
        c: f64,
        /// Evaluate the cubic's rate reference at this SNR instead of the operating one.
        #[arg(long)]
        q_ref_db: Option<f64>,
    },
    /// Parameter sweep from a built-in recipe or a TOML spec file.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, conflicts_with = "spec", required_unless_present = "spec")]
        recipe: Option<RecipeArg>,
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Worker threads; the output does not depend on this.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long = "M", default_value_t = 10)]
    m: usize,
    #[arg(long = "K", default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    rho_db: f64,
    #[arg(long, default_value_t = 0.0)]
    tau2: f64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write results here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecipeArg {
    Fig1,
    Fig2,
    Fig3,
}

impl From<RecipeArg> for Recipe {
    fn from(r: RecipeArg) -> Self {
        match r {
            RecipeArg::Fig1 => Recipe::Fig1,
            RecipeArg::Fig2 => Recipe::Fig2,
            RecipeArg::Fig3 => Recipe::Fig3,
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(PathBuf, io::Error),
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(e) if e.is_io() => 3,
            Failure::Lib(e) if e.is_numeric() => 2,
            Failure::Lib(_) => 1,
            Failure::Io(..) => 3,
            Failure::Checks(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Checks(n) => write!(f, "{n} self-test check(s) failed"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Deq { common, xi } => {
            let cfg = system(&common)?;
            let xi = match xi {
                Some(x) => x,
                None => optimal_regularizer(cfg.beta(), cfg.rho())?,
            };
            let p = large_system_point(cfg.beta(), cfg.rho(), cfg.tau2(), xi)?;
            let mut r = Map::new();
            r.insert("beta".into(), json!(p.beta));
            r.insert("rho".into(), json!(p.rho));
            r.insert("tau2".into(), json!(p.tau2));
            r.insert("xi".into(), json!(p.xi));
            r.insert("g".into(), json!(p.g));
            r.insert("rho_tilde".into(), json!(p.rho_tilde));
            r.insert("xi_tilde".into(), json!(p.xi_tilde));
            r.insert("sinr".into(), json!(p.sinr_intended_deq));
            r.insert("sinr_eve".into(), json!(p.sinr_eve_deq));
            r.insert("log_ratio".into(), json!(p.log_ratio));
            r.insert("rate_per_user".into(), json!(p.rate_per_user));
            r.insert("rate_per_antenna".into(), json!(p.sum_rate(cfg.k()) / cfg.m() as f64));
            r.insert("sum_rate".into(), json!(p.sum_rate(cfg.k())));
            r.insert(
                "rate_per_user_perfect".into(),
                json!(secrecy_rate_deq_perfect(cfg.beta(), cfg.rho())?),
            );
            emit_report(&common, r)
        }
        Command::Mc { common, xi } => {
            let cfg = system(&common)?;
            let trials = common.trials.unwrap_or(DEFAULT_TRIALS);
            let xi = match xi {
                Some(x) => x,
                None => optimal_regularizer(cfg.beta(), cfg.rho())?,
            };
            let est = ergodic_secrecy_rate_mc_with(
                &cfg,
                trials,
                common.seed.unwrap_or(0),
                xi,
                CsitSource::ErrorModel,
            )?;
            let (lo, hi) = est.ci95();
            let mut r = Map::new();
            r.insert("M".into(), json!(cfg.m()));
            r.insert("K".into(), json!(cfg.k()));
            r.insert("xi".into(), json!(xi));
            r.insert("trials".into(), json!(est.trials));
            r.insert("mean".into(), json!(est.mean));
            r.insert("std_error".into(), json!(est.std_error));
            r.insert("ci95_low".into(), json!(lo));
            r.insert("ci95_high".into(), json!(hi));
            r.insert("mean_per_antenna".into(), json!(est.mean / cfg.m() as f64));
            r.insert("mean_sinr".into(), json!(est.mean_sinr));
            r.insert("mean_sinr_eve".into(), json!(est.mean_sinr_eve));
            emit_report(&common, r)
        }
        Command::FddBits { common, b } => {
            let cfg = system(&common)?;
            let plan = FddPlan::new(cfg.m(), cfg.beta(), common.rho_db, b)?;
            let tau2 = plan.tau2(cfg.rho());
            let mut r = Map::new();
            r.insert("regime".into(), json!(format!("{:?}", plan.beta_regime)));
            r.insert("b".into(), json!(b));
            r.insert("C".into(), json!(plan.c));
            r.insert("bits".into(), json!(plan.bits.approx));
            r.insert("bits_exact".into(), json!(plan.bits.exact));
            r.insert("bits_rounded".into(), json!(plan.bits.rounded()));
            r.insert("tau2".into(), json!(tau2));
            r.insert(
                "gap_at_rho".into(),
                json!(rate_gap(cfg.beta(), cfg.rho(), tau2, GapMode::Unclamped)?),
            );
            emit_report(&common, r)
        }
        Command::TddTrain { common, coherence, c, q_ref_db } => {
            let tdd = TddConfig::new(common.m, common.k, db(common.rho_db), c, coherence)?;
            let sol = optimal_training_grid(&tdd)?;
            let reference = match q_ref_db {
                Some(v) => QReference::FixedDb(v),
                None => QReference::Operating,
            };
            let cubic = match reference {
                QReference::Operating => sol.t_opt_cubic,
                _ => rci_secrecy::tdd::solve_training_cubic_with(&tdd, reference).ok(),
            };
            let mut r = Map::new();
            r.insert("T".into(), json!(coherence));
            r.insert("t_opt_grid".into(), json!(sol.t_opt_grid));
            r.insert("fraction_grid".into(), json!(sol.t_opt_grid as f64 / coherence as f64));
            r.insert("rate_at_grid_opt".into(), json!(sol.rate_at_grid_opt));
            r.insert("q".into(), json!(sol.q));
            r.insert("t_opt_cubic".into(), json!(cubic));
            if let Some(t) = cubic {
                r.insert("fraction_cubic".into(), json!(t / coherence as f64));
                r.insert(
                    "cubic_residual".into(),
                    json!(cubic_relative_residual(&tdd, reference, t)?),
                );
                r.insert(
                    "relative_difference".into(),
                    json!((t - sol.t_opt_grid as f64).abs() / sol.t_opt_grid as f64),
                );
            }
            emit_report(&common, r)
        }
        Command::Sweep { common, recipe, spec, threads } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
            }
            let start = Instant::now();
            let mut result = match (recipe, spec) {
                (Some(r), _) => run_recipe(
                    r.into(),
                    common.seed.unwrap_or(0),
                    common.trials.unwrap_or(DEFAULT_TRIALS),
                )?,
                (None, Some(path)) => {
                    let mut s = load_spec(&path)?;
                    if let Some(t) = common.trials {
                        s.trials = t;
                    }
                    if let Some(seed) = common.seed {
                        s.master_seed = seed;
                    }
                    run_sweep(&s)?
                }
                (None, None) => return Err(Failure::Usage("give --recipe or --spec".into())),
            };
            result.meta.wall_time_s = start.elapsed().as_secs_f64();
            emit_sweep(&common, &result)
        }
        Command::Selftest { common } => {
            let checks = run_selftest();
            let failed = checks.iter().filter(|c| !c.passed).count();
            let mut r = Map::new();
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                r.insert(c.name.into(), json!(format!("{status} ({})", c.detail)));
            }
            emit_report(&common, r)?;
            if failed > 0 {
                return Err(Failure::Checks(failed));
            }
            Ok(())
        }
    }
}

fn db(v: f64) -> f64 {
    10f64.powf(v / 10.0)
}

fn system(c: &Common) -> Result<SystemConfig, Failure> {
    Ok(SystemConfig::with_rho_db(c.m, c.k, c.rho_db, c.tau2)?)
}

fn emit_report(common: &Common, report: Map<String, Value>) -> Result<(), Failure> {
    let text = match common.format {
        Format::Json => serde_json::to_string_pretty(&Value::Object(report)).expect("finite JSON") + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, v) in &report {
                let v = match v {
                    Value::String(s) => s.clone(),
                    Value::Null => "NaN".into(),
                    other => other.to_string(),
                };
                w.write_record([k.as_str(), v.as_str()]).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
    };
    write_output(common.out.as_deref(), text.as_bytes())
}

fn emit_sweep(common: &Common, result: &SweepResult) -> Result<(), Failure> {
    let mut body = Vec::new();
    match common.format {
        Format::Csv => write_csv(result, &mut body)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut body, &result.rows).expect("rows serialize");
            body.push(b'\n');
        }
    }
    write_output(common.out.as_deref(), &body)?;
    if let Some(out) = &common.out {
        let mut meta = out.clone().into_os_string();
        meta.push(".meta.json");
        let meta = PathBuf::from(meta);
        let text = serde_json::to_string_pretty(&result.meta).expect("meta serializes");
        fs::write(&meta, text).map_err(|e| Failure::Io(meta, e))?;
    }
    Ok(())
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Io(p.to_path_buf(), e)),
        None => io::stdout().write_all(bytes).map_err(|e| Failure::Io("<stdout>".into(), e)),
    }
}

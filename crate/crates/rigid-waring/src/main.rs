use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rigid_waring::config::{ExperimentConfig, ExperimentKind, RSpec};
use rigid_waring::experiments;

#[derive(Parser)]
#[command(
    name = "rigid-waring",
    version,
    about = "Experiment driver for certified homotopy continuation of Waring-form systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certified-tracking summary statistics over random systems.
    #[command(name = "table1")]
    Table1(CommonArgs),
    /// Mean squared gamma estimates across a Waring length sweep.
    #[command(name = "gamma_sweep")]
    GammaSweep(CommonArgs),
    /// Constant-step heuristic success rates against certified endpoints.
    #[command(name = "heuristic_compare")]
    HeuristicCompare(CommonArgs),
    /// Per-step trace of a single certified path.
    #[command(name = "trace")]
    Trace(CommonArgs),
    /// Monte Carlo validation of the average conditioning bound.
    #[command(name = "bound_check")]
    BoundCheck(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Number of equations; solutions live in projective n-space.
    #[arg(long)]
    n: usize,

    /// Common polynomial degree.
    #[arg(long = "D")]
    degree: usize,

    /// Waring length: a single value or an inclusive range A..B.
    #[arg(long)]
    r: String,

    /// Trials per configuration (Monte Carlo draws for bound_check).
    #[arg(long, default_value_t = 100)]
    trials: usize,

    /// Base seed; all randomness derives from (seed, r, trial) substreams.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Failure budget of the certified tracker (estimator budget elsewhere).
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,

    /// Step budget per tracked path; defaults to 1e6 for n = 1, 1e7 above.
    #[arg(long = "max-steps")]
    max_steps: Option<usize>,

    /// Heuristic step exponents (step 10^-j), comma separated.
    #[arg(long = "j-list", value_delimiter = ',', default_values_t = [1u32, 2, 3, 4, 5])]
    j_list: Vec<u32>,

    /// Output CSV path; the metadata sidecar lands at <out>.meta.json.
    #[arg(long)]
    out: PathBuf,

    /// Coordinate snapshot cadence in trace rows.
    #[arg(long = "trace-stride", default_value_t = 100)]
    trace_stride: usize,
}

fn to_config(kind: ExperimentKind, a: CommonArgs) -> anyhow::Result<ExperimentConfig> {
    let r: RSpec = a.r.parse()?;
    let max_steps = a.max_steps.unwrap_or_else(|| ExperimentConfig::default_max_steps(a.n));
    let cfg = ExperimentConfig {
        experiment: kind,
        n: a.n,
        degree: a.degree,
        r,
        trials: a.trials,
        seed: a.seed,
        epsilon: a.epsilon,
        max_steps,
        j_list: a.j_list,
        out: a.out,
        trace_stride: a.trace_stride,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.cmd {
        Cmd::Table1(a) => (ExperimentKind::Table1, a),
        Cmd::GammaSweep(a) => (ExperimentKind::GammaSweep, a),
        Cmd::HeuristicCompare(a) => (ExperimentKind::HeuristicCompare, a),
        Cmd::Trace(a) => (ExperimentKind::Trace, a),
        Cmd::BoundCheck(a) => (ExperimentKind::BoundCheck, a),
    };
    let cfg = match to_config(kind, args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    match experiments::run(&cfg) {
        Ok(s) if s.rows_written == s.rows_requested => {
            println!(
                "wrote {} row(s) to {} (meta: {})",
                s.rows_written,
                s.csv_path.display(),
                s.meta_path.display()
            );
            ExitCode::SUCCESS
        }
        Ok(s) => {
            eprintln!("produced {} of {} requested rows", s.rows_written, s.rows_requested);
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

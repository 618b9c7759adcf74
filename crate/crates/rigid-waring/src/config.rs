//! Experiment configuration: the CLI surface mapped onto a validated struct.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, ensure, Result};
use serde::Serialize;

/// The five experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Table1,
    GammaSweep,
    HeuristicCompare,
    Trace,
    BoundCheck,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Table1 => "table1",
            ExperimentKind::GammaSweep => "gamma_sweep",
            ExperimentKind::HeuristicCompare => "heuristic_compare",
            ExperimentKind::Trace => "trace",
            ExperimentKind::BoundCheck => "bound_check",
        }
    }
}

/// Waring length request: a single value or an inclusive range `A..B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RSpec {
    pub lo: usize,
    pub hi: usize,
}

impl RSpec {
    pub fn single(r: usize) -> Self {
        RSpec { lo: r, hi: r }
    }

    pub fn is_single(&self) -> bool {
        self.lo == self.hi
    }

    pub fn values(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }

    pub fn count(&self) -> usize {
        self.hi - self.lo + 1
    }
}

impl FromStr for RSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = if let Some((lo, hi)) = s.split_once("..") {
            RSpec { lo: lo.trim().parse()?, hi: hi.trim().parse()? }
        } else {
            RSpec::single(s.trim().parse()?)
        };
        ensure!(spec.lo >= 1, "r must be at least 1");
        ensure!(spec.lo <= spec.hi, "r range must be increasing, got {spec}");
        Ok(spec)
    }
}

impl fmt::Display for RSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

/// Validated configuration of one experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Number of equations; points live in projective n-space.
    pub n: usize,
    /// Common degree of every polynomial.
    pub degree: usize,
    pub r: RSpec,
    pub trials: usize,
    pub seed: u64,
    /// Failure budget of the certified tracker.
    pub epsilon: f64,
    /// Step budget per tracked path.
    pub max_steps: usize,
    /// Heuristic step exponents; step size is `10^-j`.
    pub j_list: Vec<u32>,
    pub out: PathBuf,
    /// Coordinate snapshot cadence in trace output (rows always cover every
    /// accepted step).
    pub trace_stride: usize,
}

impl ExperimentConfig {
    /// Paper-scale step budget when none is requested: `1e6` on the projective
    /// line, `1e7` above it.
    pub fn default_max_steps(n: usize) -> usize {
        if n == 1 {
            1_000_000
        } else {
            10_000_000
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.n >= 1, "n must be at least 1");
        ensure!(self.degree >= 2, "degree must be at least 2");
        ensure!(self.trials >= 1, "trials must be at least 1");
        ensure!(
            self.epsilon.is_finite() && self.epsilon > 0.0,
            "epsilon must be positive and finite"
        );
        ensure!(self.max_steps >= 1, "max-steps must be at least 1");
        ensure!(self.trace_stride >= 1, "trace-stride must be at least 1");
        match self.experiment {
            ExperimentKind::HeuristicCompare => {
                ensure!(!self.j_list.is_empty(), "heuristic_compare needs a nonempty j-list");
                if let Some(j) = self.j_list.iter().find(|&&j| j == 0 || j > 12) {
                    bail!("heuristic exponent {j} out of range 1..=12");
                }
                ensure!(self.r.is_single(), "heuristic_compare takes a single r, not a range");
            }
            ExperimentKind::Trace => {
                ensure!(self.r.is_single(), "trace takes a single r, not a range");
            }
            _ => {}
        }
        Ok(())
    }
}

//! Exact, branch-and-bound and greedy solvers for both coverage objectives.
//!
//! | algorithm | objective | method |
//! |-----------|-----------|--------|
//! | `E-IC-TA`   | max `cov_ic` | enumeration of quota-respecting subsets |
//! | `ILP-IC-TA` | max `cov_ic` | branch-and-bound over the 0/1 model |
//! | `A-IC-TA`   | max `cov_ic` | greedy, one tag per step |
//! | `E-DC-TA`   | min `theta_dc` and max `cov_dc` | enumeration |
//! | `ILP-DC-TA` | max `cov_dc` | branch-and-bound over the two-sided linearization |
//! | `A-DC-TA`   | min `theta_dc` | greedy, one cross pair per step, then single fills |

mod bnb;
mod exact;
mod greedy;
pub mod lp;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::coverage::DummyPolicy;
use crate::error::{Error, Result};
use crate::model::{Instance, Params, Selection};
use crate::relevance::{meets_bound, rel_total, RelBenchmark};

pub use bnb::{bnb_dc, bnb_ic, dc_linearized_value};
pub use exact::{exact_dc, exact_ic};
pub use greedy::{greedy_dc, greedy_ic};

/// Default instance-size limit for the exact solvers.
pub const DEFAULT_EXACT_CAP: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    ExactIc,
    BnbIc,
    GreedyIc,
    ExactDc,
    BnbDc,
    GreedyDc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::ExactIc,
        Algorithm::BnbIc,
        Algorithm::GreedyIc,
        Algorithm::ExactDc,
        Algorithm::BnbDc,
        Algorithm::GreedyDc,
    ];

    /// Short command-line name, e.g. `a-ic`.
    pub fn cli_name(self) -> &'static str {
        match self {
            Algorithm::ExactIc => "e-ic",
            Algorithm::BnbIc => "bnb-ic",
            Algorithm::GreedyIc => "a-ic",
            Algorithm::ExactDc => "e-dc",
            Algorithm::BnbDc => "bnb-dc",
            Algorithm::GreedyDc => "a-dc",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::ExactIc => "E-IC-TA",
            Algorithm::BnbIc => "ILP-IC-TA",
            Algorithm::GreedyIc => "A-IC-TA",
            Algorithm::ExactDc => "E-DC-TA",
            Algorithm::BnbDc => "ILP-DC-TA",
            Algorithm::GreedyDc => "A-DC-TA",
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Algorithm::GreedyIc | Algorithm::GreedyDc)
    }

    pub fn is_dependent(self) -> bool {
        matches!(self, Algorithm::ExactDc | Algorithm::BnbDc | Algorithm::GreedyDc)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.cli_name() == lower || a.display_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown algorithm {s:?}")))
    }
}

/// How the branch-and-bound DC solver reads the coverage constraint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DcLinearization {
    /// `y_j <= Σ x⁺` and `y_j <= Σ x⁻` over augmented coverers; the objective equals `cov_dc`.
    #[default]
    TwoSided,
    /// `2·y_j <= Σ x` over all augmented coverers regardless of polarity, `y_j ∈ {0, 1}`.
    /// Lets two same-polarity tags cover a value; kept for comparison only.
    AsPrinted,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Exact and branch-and-bound solvers refuse instances with more tags than this.
    pub exact_cap: usize,
    pub dummy_policy: DummyPolicy,
    pub dc_linearization: DcLinearization,
    /// Restricts greedy DC pair candidates to the top-`b` relevance tags of each polarity.
    /// Off by default; enabling it departs from the exhaustive pair scan.
    pub dc_beam: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            exact_cap: DEFAULT_EXACT_CAP,
            dummy_policy: DummyPolicy::default(),
            dc_linearization: DcLinearization::default(),
            dc_beam: None,
        }
    }
}

/// Result of one solver run.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub selection: Selection,
    pub objective_value: u32,
    pub rel_total: f64,
    /// `beta * rel_max(k1, k2)`.
    pub threshold: f64,
    pub wall_time: Duration,
    /// Subsets evaluated (enumeration) or search nodes entered (branch-and-bound); 0 for greedy.
    pub nodes_explored: u64,
    /// Greedy stalled before filling the budget; `selection` is partial.
    pub dead_end: bool,
    /// `E-DC-TA` only: the `cov_dc`-maximizing selection alongside the `theta_dc` optimum.
    pub alternate: Option<Selection>,
}

impl SolveReport {
    pub fn feasible(&self) -> bool {
        self.selection.feasible
    }
}

/// Runs `algorithm` on `instance`.
pub fn solve(algorithm: Algorithm, instance: &Instance, params: &Params, config: &SolverConfig) -> Result<SolveReport> {
    match algorithm {
        Algorithm::ExactIc => exact_ic(instance, params, config),
        Algorithm::BnbIc => bnb_ic(instance, params, config),
        Algorithm::GreedyIc => greedy_ic(instance, params, config),
        Algorithm::ExactDc => exact_dc(instance, params, config),
        Algorithm::BnbDc => bnb_dc(instance, params, config),
        Algorithm::GreedyDc => greedy_dc(instance, params, config),
    }
}

/// Checks quotas and the relevance bound of `ids` against `params`.
pub fn is_feasible(instance: &Instance, params: &Params, ids: &[usize]) -> bool {
    let pos = ids.iter().filter(|&&id| id < instance.n_pos()).count();
    if pos != params.k1 || ids.len() - pos != params.k2 {
        return false;
    }
    let Ok(best) = RelBenchmark::new(instance).rel_max(params.k1, params.k2) else {
        return false;
    };
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len() == ids.len() && meets_bound(rel_total(instance, sorted), params.beta, best)
}

/// Shared preamble: quota check and relevance threshold.
struct Prepared {
    bench: RelBenchmark,
    rel_max: f64,
}

fn prepare(instance: &Instance, params: &Params) -> Result<Prepared> {
    params.check(instance)?;
    let bench = RelBenchmark::new(instance);
    let rel_max = bench.rel_max(params.k1, params.k2)?;
    Ok(Prepared { bench, rel_max })
}

fn check_cap(instance: &Instance, config: &SolverConfig) -> Result<()> {
    if instance.len() > config.exact_cap {
        return Err(Error::TooLarge {
            n: instance.len(),
            cap: config.exact_cap,
        });
    }
    Ok(())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

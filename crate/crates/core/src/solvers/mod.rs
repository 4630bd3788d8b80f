//! Sum-of-costs optimal solvers.
//!
//! All SAT-based solvers share one outer loop: starting from the sum of the
//! agents' shortest-path costs, the bound is raised one unit at a time
//! together with the horizon until the inner procedure finds a plan or the
//! cost cap is passed. They differ in the candidate paths they encode and in
//! whether collisions are excluded up front or on demand.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::diagrams::DiagramError;
use crate::encoding::EncodingError;
use crate::instance::{MapfInstance, Solution};
use crate::satif::Interrupt;

mod cbs;
mod lazy;
pub mod oracle;

pub use lazy::{heuristic_fixed, FixedOutcome};
pub use oracle::{brute_force_oracle, OracleResult};

/// Source of elapsed wall-clock time for a run.
pub trait Clock {
    /// Seconds since the run started.
    fn elapsed_s(&self) -> f64;
}

/// A clock that never advances; runs under it cannot time out.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_s(&self) -> f64 {
        0.0
    }
}

/// Time budget of one run, doubling as a SAT interrupt.
pub struct Deadline<'a> {
    clock: &'a dyn Clock,
    limit_s: f64,
}

impl<'a> Deadline<'a> {
    pub fn new(clock: &'a dyn Clock, limit_s: f64) -> Self {
        Deadline { clock, limit_s }
    }

    pub fn expired(&self) -> bool {
        self.clock.elapsed_s() >= self.limit_s
    }

    pub fn elapsed_s(&self) -> f64 {
        self.clock.elapsed_s()
    }
}

impl Interrupt for Deadline<'_> {
    fn interrupted(&self) -> bool {
        self.expired()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Cbs,
    MddSat,
    SmtCbs,
    SparseSmtCbs,
    HeuristicSmtCbs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Cbs,
        Algorithm::MddSat,
        Algorithm::SmtCbs,
        Algorithm::SparseSmtCbs,
        Algorithm::HeuristicSmtCbs,
    ];

    /// Short name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cbs => "cbs",
            Algorithm::MddSat => "mddsat",
            Algorithm::SmtCbs => "smtcbs",
            Algorithm::SparseSmtCbs => "sparse",
            Algorithm::HeuristicSmtCbs => "heuristic",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown algorithm `{0}` (expected cbs, mddsat, smtcbs, sparse or heuristic)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownAlgorithm(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub timeout_s: f64,
    /// Largest sum of costs tried before reporting infeasibility. `None`
    /// means the shortest-path lower bound plus `|V| * k`.
    pub cost_cap: Option<usize>,
    /// Number of conflict subsets examined per agent by OR-path extension.
    pub or_subset_cap: usize,
    /// OR-path subsets range over the conflicts found in the latest round
    /// instead of all accumulated ones.
    pub or_new_conflicts_only: bool,
    /// Before accepting UNSAT from a sparse model, retry with full diagrams.
    pub sparse_unsat_fallback: bool,
    /// Record per-agent sparse and full diagram sizes at every model build.
    pub trace_diagrams: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::HeuristicSmtCbs,
            timeout_s: 128.0,
            cost_cap: None,
            or_subset_cap: 64,
            or_new_conflicts_only: false,
            sparse_unsat_fallback: true,
            trace_diagrams: false,
        }
    }
}

impl SolverConfig {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        SolverConfig {
            algorithm,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Solved,
    Timeout,
    InfeasibleAtCap,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Solved => "solved",
            SolveStatus::Timeout => "timeout",
            SolveStatus::InfeasibleAtCap => "infeasible",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One encoded model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelRecord {
    pub soc: usize,
    pub horizon: usize,
    pub decision_vars: usize,
    /// Diagram nodes summed over agents.
    pub diagram_nodes: usize,
    /// Whether any agent used a sparse diagram.
    pub sparse: bool,
}

/// Sizes of one agent's diagrams at one model build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramTrace {
    pub soc: usize,
    pub horizon: usize,
    pub agent: u32,
    pub used_nodes: usize,
    pub full_nodes: usize,
    /// The agent had been switched to its full diagram.
    pub promoted: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub sat_calls: usize,
    /// Distinct collisions discovered (CBS: constraint-tree branchings).
    pub conflicts: usize,
    /// Cost bounds tried, as (soc, horizon).
    pub iterations: Vec<(usize, usize)>,
    pub models: Vec<ModelRecord>,
    pub diagram_traces: Vec<DiagramTrace>,
    /// Nodes of sparse diagrams, summed over agents, at every model build of
    /// the sparse solvers.
    pub smdd_nodes_per_iter: Vec<usize>,
    pub ct_nodes: usize,
    pub runtime_s: f64,
    pub encode_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solution: Option<Solution>,
    pub soc: Option<usize>,
    pub makespan: Option<usize>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("internal fault: {0}")]
    Fault(String),
}

/// Runs the configured algorithm.
pub fn solve(instance: &MapfInstance, config: &SolverConfig, clock: &dyn Clock) -> Result<SolveOutcome, SolverError> {
    let deadline = Deadline::new(clock, config.timeout_s);
    let mut outcome = match config.algorithm {
        Algorithm::Cbs => cbs::solve_cbs(instance, config, &deadline)?,
        Algorithm::MddSat => lazy::solve_mdd_sat(instance, config, &deadline)?,
        Algorithm::SmtCbs => lazy::solve_smt_cbs(instance, config, &deadline)?,
        Algorithm::SparseSmtCbs => lazy::solve_sparse_smt_cbs(instance, config, &deadline)?,
        Algorithm::HeuristicSmtCbs => lazy::solve_heuristic_smt_cbs(instance, config, &deadline)?,
    };
    outcome.stats.runtime_s = clock.elapsed_s();
    if let Some(sol) = &outcome.solution {
        let collisions = crate::instance::validate_solution(instance, sol);
        if !collisions.is_empty() {
            return Err(SolverError::Fault(alloc::format!("returned plan has collision {:?}", collisions[0])));
        }
        outcome.soc = Some(sol.sum_of_costs(instance).map_err(|e| SolverError::Fault(alloc::format!("{e}")))?);
        outcome.makespan = Some(sol.makespan(instance).map_err(|e| SolverError::Fault(alloc::format!("{e}")))?);
    }
    Ok(outcome)
}

/// Shared bounds of a run.
pub(crate) struct Bounds {
    pub xi: Vec<usize>,
    pub lower: usize,
    pub max_xi: usize,
    pub cap: usize,
}

impl Bounds {
    /// `None` when some goal is unreachable.
    pub(crate) fn new(instance: &MapfInstance, planner: &crate::pathing::Planner<'_>, config: &SolverConfig) -> Option<Self> {
        let xi = planner.shortest_costs().ok()?;
        let lower = xi.iter().sum();
        let max_xi = xi.iter().copied().max().unwrap_or(0);
        let cap = config
            .cost_cap
            .unwrap_or(lower + instance.graph().vertex_count() * instance.agent_count())
            .max(lower);
        Some(Bounds { xi, lower, max_xi, cap })
    }

    pub(crate) fn horizon(&self, soc: usize) -> usize {
        self.max_xi + (soc - self.lower)
    }
}

pub(crate) fn finished(status: SolveStatus, solution: Option<Solution>, stats: SolveStats) -> SolveOutcome {
    SolveOutcome {
        status,
        solution,
        soc: None,
        makespan: None,
        stats,
    }
}

//! Solution JSON and CNF debugging exports.

use serde::{Deserialize, Serialize};

use mapf_core::diagrams::build_mdd;
use mapf_core::encoding::{BooleanModel, VarRole};
use mapf_core::pathing::{ConflictSet, Planner};
use mapf_core::satif::{CdclSolver, ClauseLog};
use mapf_core::solvers::{Algorithm, SolveOutcome, SolverError};
use mapf_core::{MapfInstance, ModelMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportStats {
    pub sat_calls: usize,
    pub conflicts: usize,
    pub smdd_nodes_per_iter: Vec<usize>,
    pub runtime_s: f64,
    pub encode_time_s: f64,
    pub iterations: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub instance: String,
    pub algorithm: String,
    pub status: String,
    pub soc: Option<usize>,
    pub makespan: Option<usize>,
    /// Vertex ids per agent, padded to a common length.
    pub paths: Vec<Vec<u32>>,
    pub stats: ReportStats,
}

impl SolutionReport {
    pub fn new(instance: &str, algorithm: Algorithm, outcome: &SolveOutcome) -> Self {
        let paths = outcome
            .solution
            .as_ref()
            .map(|s| s.paths().iter().map(|p| p.positions().iter().map(|v| v.0).collect()).collect())
            .unwrap_or_default();
        SolutionReport {
            instance: instance.to_owned(),
            algorithm: algorithm.name().to_owned(),
            status: outcome.status.name().to_owned(),
            soc: outcome.soc,
            makespan: outcome.makespan,
            paths,
            stats: ReportStats {
                sat_calls: outcome.stats.sat_calls,
                conflicts: outcome.stats.conflicts,
                smdd_nodes_per_iter: outcome.stats.smdd_nodes_per_iter.clone(),
                runtime_s: outcome.stats.runtime_s,
                encode_time_s: outcome.stats.encode_time_s,
                iterations: outcome.stats.iterations.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VarEntry {
    Node { var: u32, agent: u32, vertex: u32, time: usize },
    Edge { var: u32, agent: u32, from: u32, to: u32, time: usize },
    Cost { var: u32, agent: u32, time: usize },
    Aux { var: u32 },
}

/// DIMACS text plus variable map of the model over full diagrams at `soc`.
pub fn export_model(instance: &MapfInstance, soc: usize, mode: ModelMode) -> Result<(String, Vec<VarEntry>), SolverError> {
    let planner = Planner::new(instance);
    let xi = planner
        .shortest_costs()
        .map_err(|a| SolverError::Fault(format!("goal of {a} is unreachable")))?;
    let lower: usize = xi.iter().sum();
    let slack = soc
        .checked_sub(lower)
        .ok_or_else(|| SolverError::Fault(format!("sum of costs {soc} is below the lower bound {lower}")))?;
    let horizon = xi.iter().copied().max().unwrap_or(0) + slack;
    let diagrams = instance
        .agent_ids()
        .map(|a| build_mdd(&planner, a, horizon, xi[a.index()] + slack))
        .collect::<Result<Vec<_>, _>>()?;
    let conflicts = ConflictSet::new(instance.agent_count());
    let model = BooleanModel::build(ClauseLog::new(CdclSolver::new()), &diagrams, &xi, &conflicts, soc, mode)?;
    let entries = model
        .variables()
        .describe(model.num_vars())
        .into_iter()
        .map(|(var, role)| {
            let var = var.index();
            match role {
                VarRole::Node { agent, vertex, time } => VarEntry::Node {
                    var,
                    agent: agent.0,
                    vertex: vertex.0,
                    time,
                },
                VarRole::Edge { agent, from, to, time } => VarEntry::Edge {
                    var,
                    agent: agent.0,
                    from: from.0,
                    to: to.0,
                    time,
                },
                VarRole::Cost { agent, time } => VarEntry::Cost { var, agent: agent.0, time },
                VarRole::Auxiliary => VarEntry::Aux { var },
            }
        })
        .collect();
    Ok((model.solver().to_dimacs(), entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mapf_core::fixtures;
    use mapf_core::solvers::{solve, NoClock, SolverConfig};

    #[test]
    fn report_json_shape() {
        let inst = fixtures::square_swap();
        let out = solve(&inst, &SolverConfig::with_algorithm(Algorithm::SmtCbs), &NoClock).unwrap();
        let report = SolutionReport::new("square", Algorithm::SmtCbs, &out);
        let json: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(json["status"], "solved");
        assert_eq!(json["soc"], 4);
        assert_eq!(json["paths"].as_array().unwrap().len(), 2);
        for key in ["sat_calls", "conflicts", "smdd_nodes_per_iter", "runtime_s"] {
            assert!(json["stats"].get(key).is_some(), "{key}");
        }
        let back: SolutionReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn dimacs_export_of_single_agent() {
        let (cnf, vars) = export_model(&fixtures::path_three(), 2, ModelMode::Incomplete).unwrap();
        assert!(cnf.starts_with("p cnf 5 "), "{cnf}");
        assert_eq!(vars.iter().filter(|v| matches!(v, VarEntry::Node { .. })).count(), 3);
        assert_eq!(vars.iter().filter(|v| matches!(v, VarEntry::Edge { .. })).count(), 2);
    }
}

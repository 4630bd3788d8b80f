//! SAT-based solvers: the complete encoding, lazy refinement over full
//! diagrams, and lazy refinement over sparse candidate sets.

use alloc::vec;
use alloc::vec::Vec;

use super::{
    finished, Bounds, Deadline, DiagramTrace, ModelRecord, SolveOutcome, SolveStats, SolveStatus, SolverConfig,
    SolverError,
};
use crate::diagrams::{build_mdd, build_smdd, Mdd};
use crate::encoding::{BooleanModel, EncodingError, ModelMode};
use crate::instance::{validate_solution, AgentId, Collision, MapfInstance, Path, Solution};
use crate::pathing::{new_and_path, new_or_paths, AgentConflicts, AndPath, ConflictSet, Planner};
use crate::satif::{CdclSolver, SatError};

/// Outcome of one fixed-cost procedure.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedOutcome {
    Solved(Solution),
    Unsat,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extension {
    And,
    Or,
}

struct Run<'a, 'd> {
    instance: &'a MapfInstance,
    planner: Planner<'a>,
    config: &'a SolverConfig,
    deadline: &'a Deadline<'d>,
    bounds: Bounds,
    stats: SolveStats,
}

type Step<T> = Result<Option<T>, SolverError>;

impl<'a, 'd> Run<'a, 'd> {
    fn new(instance: &'a MapfInstance, config: &'a SolverConfig, deadline: &'a Deadline<'d>) -> Option<Self> {
        let planner = Planner::new(instance);
        let bounds = Bounds::new(instance, &planner, config)?;
        Some(Run {
            instance,
            planner,
            config,
            deadline,
            bounds,
            stats: SolveStats::default(),
        })
    }

    fn cost_bound(&self, agent: AgentId, soc: usize) -> usize {
        self.bounds.xi[agent.index()] + (soc - self.bounds.lower)
    }

    fn full_diagram(&self, agent: AgentId, soc: usize) -> Result<Mdd, SolverError> {
        let horizon = self.bounds.horizon(soc);
        Ok(build_mdd(&self.planner, agent, horizon, self.cost_bound(agent, soc))?)
    }

    fn full_diagrams(&self, soc: usize) -> Result<Vec<Mdd>, SolverError> {
        self.instance.agent_ids().map(|a| self.full_diagram(a, soc)).collect()
    }

    /// Encodes and records model statistics. `None` on timeout.
    fn encode(
        &mut self,
        diagrams: &[Mdd],
        conflicts: &ConflictSet,
        soc: usize,
        mode: ModelMode,
        sparse: bool,
    ) -> Step<BooleanModel<CdclSolver>> {
        let t0 = self.deadline.elapsed_s();
        let model = BooleanModel::build(CdclSolver::new(), diagrams, &self.bounds.xi, conflicts, soc, mode)?;
        self.stats.encode_time_s += self.deadline.elapsed_s() - t0;
        self.stats.models.push(ModelRecord {
            soc,
            horizon: self.bounds.horizon(soc),
            decision_vars: model.decision_var_count(),
            diagram_nodes: diagrams.iter().map(Mdd::node_count).sum(),
            sparse,
        });
        if self.deadline.expired() {
            return Ok(None);
        }
        Ok(Some(model))
    }

    /// `Ok(None)` on timeout, `Ok(Some(None))` on UNSAT.
    fn sat(&mut self, model: &mut BooleanModel<CdclSolver>) -> Step<Option<Solution>> {
        self.stats.sat_calls += 1;
        match model.solve(self.deadline) {
            Ok(r) => Ok(Some(r)),
            Err(EncodingError::Sat(SatError::Interrupted)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Outer cost loop. `fixed` returns `Ok(None)` on timeout.
    fn cost_loop(
        mut self,
        mut fixed: impl FnMut(&mut Self, usize) -> Step<Option<Solution>>,
    ) -> Result<SolveOutcome, SolverError> {
        for soc in self.bounds.lower..=self.bounds.cap {
            if self.deadline.expired() {
                return Ok(finished(SolveStatus::Timeout, None, self.stats));
            }
            self.stats.iterations.push((soc, self.bounds.horizon(soc)));
            match fixed(&mut self, soc)? {
                None => return Ok(finished(SolveStatus::Timeout, None, self.stats)),
                Some(Some(sol)) => return Ok(finished(SolveStatus::Solved, Some(sol), self.stats)),
                Some(None) => {}
            }
        }
        Ok(finished(SolveStatus::InfeasibleAtCap, None, self.stats))
    }
}

fn unreachable_outcome() -> SolveOutcome {
    finished(SolveStatus::InfeasibleAtCap, None, SolveStats::default())
}

/// Complete model over full diagrams, one fresh solver per cost bound.
pub(crate) fn solve_mdd_sat(
    instance: &MapfInstance,
    config: &SolverConfig,
    deadline: &Deadline<'_>,
) -> Result<SolveOutcome, SolverError> {
    let Some(run) = Run::new(instance, config, deadline) else {
        return Ok(unreachable_outcome());
    };
    let empty = ConflictSet::new(instance.agent_count());
    run.cost_loop(|run, soc| {
        let diagrams = run.full_diagrams(soc)?;
        let Some(mut model) = run.encode(&diagrams, &empty, soc, ModelMode::Complete, false)? else {
            return Ok(None);
        };
        let Some(answer) = run.sat(&mut model)? else {
            return Ok(None);
        };
        if let Some(sol) = &answer {
            if !validate_solution(run.instance, sol).is_empty() {
                return Err(SolverError::Fault("complete model admitted a collision".into()));
            }
        }
        Ok(Some(answer))
    })
}

/// Incomplete model over full diagrams; collisions are excluded on demand in
/// the same solver instance.
pub(crate) fn solve_smt_cbs(
    instance: &MapfInstance,
    config: &SolverConfig,
    deadline: &Deadline<'_>,
) -> Result<SolveOutcome, SolverError> {
    let Some(run) = Run::new(instance, config, deadline) else {
        return Ok(unreachable_outcome());
    };
    let mut conflicts = ConflictSet::new(instance.agent_count());
    run.cost_loop(|run, soc| {
        let diagrams = run.full_diagrams(soc)?;
        let Some(mut model) = run.encode(&diagrams, &conflicts, soc, ModelMode::Incomplete, false)? else {
            return Ok(None);
        };
        loop {
            let Some(answer) = run.sat(&mut model)? else {
                return Ok(None);
            };
            let Some(sol) = answer else {
                return Ok(Some(None));
            };
            let collisions = validate_solution(run.instance, &sol);
            if collisions.is_empty() {
                return Ok(Some(Some(sol)));
            }
            record(&mut conflicts, &collisions, &mut run.stats);
            model.add_conflict_clauses(&collisions)?;
        }
    })
}

fn record(conflicts: &mut ConflictSet, collisions: &[Collision], stats: &mut SolveStats) {
    for c in collisions {
        if conflicts.record(c) {
            stats.conflicts += 1;
        }
    }
}

pub(crate) fn solve_sparse_smt_cbs(
    instance: &MapfInstance,
    config: &SolverConfig,
    deadline: &Deadline<'_>,
) -> Result<SolveOutcome, SolverError> {
    solve_sparse(instance, config, deadline, Extension::Or)
}

pub(crate) fn solve_heuristic_smt_cbs(
    instance: &MapfInstance,
    config: &SolverConfig,
    deadline: &Deadline<'_>,
) -> Result<SolveOutcome, SolverError> {
    solve_sparse(instance, config, deadline, Extension::And)
}

fn solve_sparse(
    instance: &MapfInstance,
    config: &SolverConfig,
    deadline: &Deadline<'_>,
    extension: Extension,
) -> Result<SolveOutcome, SolverError> {
    let Some(run) = Run::new(instance, config, deadline) else {
        return Ok(unreachable_outcome());
    };
    let mut candidates: Vec<Vec<Path>> = Vec::with_capacity(instance.agent_count());
    for a in instance.agent_ids() {
        let p = run
            .planner
            .shortest_path(a)
            .ok_or_else(|| SolverError::Fault("unreachable goal".into()))?;
        candidates.push(vec![p]);
    }
    let mut conflicts = ConflictSet::new(instance.agent_count());
    run.cost_loop(|run, soc| sparse_fixed(run, &mut candidates, &mut conflicts, soc, extension))
}

/// One fixed-cost round of the sparse solvers. Candidate sets and conflicts
/// persist across rounds; promotion to full diagrams does not.
fn sparse_fixed(
    run: &mut Run<'_, '_>,
    candidates: &mut [Vec<Path>],
    conflicts: &mut ConflictSet,
    soc: usize,
    extension: Extension,
) -> Step<Option<Solution>> {
    let k = run.instance.agent_count();
    let horizon = run.bounds.horizon(soc);
    let mut full = vec![false; k];
    'rebuild: loop {
        let mut diagrams = Vec::with_capacity(k);
        let mut sparse_nodes = 0;
        for a in run.instance.agent_ids() {
            let i = a.index();
            let d = if full[i] {
                run.full_diagram(a, soc)?
            } else {
                let d = build_smdd(a, run.instance.goal(a), &candidates[i], horizon)?;
                sparse_nodes += d.node_count();
                d
            };
            if run.config.trace_diagrams {
                let full_nodes = if full[i] {
                    d.node_count()
                } else {
                    run.full_diagram(a, soc)?.node_count()
                };
                run.stats.diagram_traces.push(DiagramTrace {
                    soc,
                    horizon,
                    agent: a.0,
                    used_nodes: d.node_count(),
                    full_nodes,
                    promoted: full[i],
                });
            }
            diagrams.push(d);
        }
        let any_sparse = full.iter().any(|f| !f);
        run.stats.smdd_nodes_per_iter.push(sparse_nodes);
        let Some(mut model) = run.encode(&diagrams, conflicts, soc, ModelMode::Incomplete, any_sparse)? else {
            return Ok(None);
        };

        loop {
            let Some(answer) = run.sat(&mut model)? else {
                return Ok(None);
            };
            let Some(sol) = answer else {
                if any_sparse && run.config.sparse_unsat_fallback {
                    full = vec![true; k];
                    continue 'rebuild;
                }
                return Ok(Some(None));
            };
            let collisions = validate_solution(run.instance, &sol);
            if collisions.is_empty() {
                return Ok(Some(Some(sol)));
            }
            let before: Vec<AgentConflicts> = run.instance.agent_ids().map(|a| conflicts.for_agent(a).clone()).collect();
            model.add_conflict_clauses(&collisions)?;
            record(conflicts, &collisions, &mut run.stats);

            let mut changed = false;
            for a in run.instance.agent_ids() {
                let i = a.index();
                // a promoted agent keeps collecting candidates for later
                // cost bounds; its current diagram already holds them
                let promoted = full[i];
                let bound = run.cost_bound(a, soc);
                let mine = conflicts.for_agent(a);
                match extension {
                    Extension::And => match new_and_path(&run.planner, a, &candidates[i], mine, horizon, bound) {
                        AndPath::New(p) => {
                            if !mine.avoided_by(&p) {
                                return Err(SolverError::Fault("AND-path violates a conflict".into()));
                            }
                            candidates[i].push(p);
                            changed |= !promoted;
                        }
                        AndPath::Represented => {}
                        AndPath::Infeasible => {
                            changed |= !promoted;
                            full[i] = true;
                        }
                    },
                    Extension::Or => {
                        if mine.is_empty() {
                            continue;
                        }
                        let scope = if run.config.or_new_conflicts_only {
                            AgentConflicts::from_entries(
                                mine.entries().into_iter().filter(|e| !before[i].contains(e)),
                            )
                        } else {
                            mine.clone()
                        };
                        let found = new_or_paths(&run.planner, a, &scope, horizon, bound, run.config.or_subset_cap);
                        if found.is_empty() && !scope.is_empty() {
                            changed |= !promoted;
                            full[i] = true;
                        }
                        for p in found {
                            if !candidates[i].contains(&p) {
                                candidates[i].push(p);
                                changed |= !promoted;
                            }
                        }
                    }
                }
            }
            if changed {
                continue 'rebuild;
            }
            if run.deadline.expired() {
                return Ok(None);
            }
        }
    }
}

/// The fixed-cost procedure of the AND-path solver on its own: candidate
/// sets in `candidates` (one or more paths per agent) and `conflicts` are
/// extended in place.
pub fn heuristic_fixed(
    instance: &MapfInstance,
    config: &SolverConfig,
    deadline: &Deadline<'_>,
    candidates: &mut [Vec<Path>],
    conflicts: &mut ConflictSet,
    soc: usize,
) -> Result<(FixedOutcome, SolveStats), SolverError> {
    let Some(mut run) = Run::new(instance, config, deadline) else {
        return Ok((FixedOutcome::Unsat, SolveStats::default()));
    };
    if soc < run.bounds.lower {
        return Ok((FixedOutcome::Unsat, run.stats));
    }
    let out = match sparse_fixed(&mut run, candidates, conflicts, soc, Extension::And)? {
        None => FixedOutcome::Timeout,
        Some(None) => FixedOutcome::Unsat,
        Some(Some(sol)) => FixedOutcome::Solved(sol),
    };
    Ok((out, run.stats))
}

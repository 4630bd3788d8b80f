//! Conflict-based search: best-first over a binary constraint tree.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::{finished, Bounds, Deadline, SolveOutcome, SolveStats, SolveStatus, SolverConfig, SolverError};
use crate::instance::{validate_solution, CollisionKind, MapfInstance, Path, Solution};
use crate::pathing::{AgentConflicts, Planner};

struct Node {
    constraints: Vec<AgentConflicts>,
    paths: Vec<Path>,
    costs: Vec<usize>,
}

pub(crate) fn solve_cbs(
    instance: &MapfInstance,
    config: &SolverConfig,
    deadline: &Deadline<'_>,
) -> Result<SolveOutcome, SolverError> {
    let planner = Planner::new(instance);
    let mut stats = SolveStats::default();
    let Some(bounds) = Bounds::new(instance, &planner, config) else {
        return Ok(finished(SolveStatus::InfeasibleAtCap, None, stats));
    };
    let horizon = bounds.horizon(bounds.cap);
    let k = instance.agent_count();

    let mut paths = Vec::with_capacity(k);
    for a in instance.agent_ids() {
        paths.push(planner.shortest_path(a).ok_or_else(|| SolverError::Fault("unreachable goal".into()))?);
    }
    let root = Node {
        constraints: (0..k).map(|_| AgentConflicts::new()).collect(),
        costs: bounds.xi.clone(),
        paths,
    };

    let mut nodes = Vec::new();
    let mut open = BinaryHeap::new();
    let mut seen = BTreeSet::new();
    seen.insert(root.constraints.clone());
    open.push(Reverse((bounds.lower, 0usize)));
    nodes.push(Some(root));

    while let Some(Reverse((cost, id))) = open.pop() {
        if deadline.expired() {
            return Ok(finished(SolveStatus::Timeout, None, stats));
        }
        stats.ct_nodes += 1;
        let node = nodes[id].take().expect("node expanded once");
        let solution = Solution::new(node.paths.clone());
        let collisions = validate_solution(instance, &solution);
        let Some(first) = collisions.first() else {
            stats.iterations.push((cost, solution.horizon()));
            return Ok(finished(SolveStatus::Solved, Some(solution), stats));
        };
        stats.conflicts += 1;

        for (agent, entry_vertex) in [(first.first, true), (first.second, false)] {
            let mut constraints = node.constraints.clone();
            let added = match first.kind {
                CollisionKind::Vertex(v) => constraints[agent.index()].add_vertex(v, first.time),
                CollisionKind::Edge(u, v) if entry_vertex => constraints[agent.index()].add_edge(u, v, first.time),
                CollisionKind::Edge(u, v) => constraints[agent.index()].add_edge(v, u, first.time),
            };
            if !added || seen.contains(&constraints) {
                continue;
            }
            let others = cost - node.costs[agent.index()];
            let Some(budget) = bounds.cap.checked_sub(others) else {
                continue;
            };
            let Some(path) = planner.constrained_shortest_path(agent, &constraints[agent.index()], horizon, budget) else {
                continue;
            };
            let new_cost = path.cost(instance.goal(agent)).map_err(|e| SolverError::Fault(alloc::format!("{e}")))?;
            let mut paths = node.paths.clone();
            let mut costs = node.costs.clone();
            paths[agent.index()] = path;
            costs[agent.index()] = new_cost;
            seen.insert(constraints.clone());
            let child_cost = others + new_cost;
            open.push(Reverse((child_cost, nodes.len())));
            nodes.push(Some(Node {
                constraints,
                paths,
                costs,
            }));
        }
    }
    Ok(finished(SolveStatus::InfeasibleAtCap, None, stats))
}

//! Time-expanded decision diagrams over one agent's candidate paths.
//!
//! A full MDD holds every path that fits the horizon and the agent's cost
//! bound. A sparse MDD is assembled from an explicit path set; because paths
//! share nodes it usually represents more paths than it was built from.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

use crate::instance::{AgentId, Path, VertexId};
use crate::pathing::Planner;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("goal of {0} is unreachable")]
    UnreachableGoal(AgentId),
    #[error("{agent} has no path within horizon {horizon} and cost bound {cost_bound}")]
    NoPathWithinBounds {
        agent: AgentId,
        horizon: usize,
        cost_bound: usize,
    },
    #[error("candidate path of {0} does not end at its goal")]
    PathMissesGoal(AgentId),
    #[error("candidate path of {0} does not start where the others do")]
    StartMismatch(AgentId),
    #[error("candidate path of {agent} has {len} steps, horizon is {horizon}")]
    PathTooLong { agent: AgentId, len: usize, horizon: usize },
    #[error("no candidate paths for {0}")]
    EmptyPathSet(AgentId),
}

/// Leveled DAG of space-time nodes `v^t`, `t = 0..=horizon`, with a single
/// root at level 0 and a single sink at level `horizon`. Every node lies on a
/// root-to-sink path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdd {
    agent: AgentId,
    horizon: usize,
    levels: Vec<Vec<VertexId>>,
    /// `succ[t][i]`: sorted indices into `levels[t + 1]` of the successors of
    /// `levels[t][i]`.
    succ: Vec<Vec<Vec<u32>>>,
}

impl Mdd {
    pub fn agent(&self) -> AgentId {
        self.agent
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn root(&self) -> VertexId {
        self.levels[0][0]
    }

    pub fn sink(&self) -> VertexId {
        self.levels[self.horizon][0]
    }

    /// Sorted vertices at level `t`.
    pub fn level(&self, t: usize) -> &[VertexId] {
        &self.levels[t]
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().flatten().map(Vec::len).sum()
    }

    pub fn contains(&self, v: VertexId, t: usize) -> bool {
        t <= self.horizon && self.levels[t].binary_search(&v).is_ok()
    }

    pub fn successors(&self, t: usize, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let idx = if t < self.horizon {
            self.levels[t].binary_search(&v).ok()
        } else {
            None
        };
        idx.into_iter()
            .flat_map(move |i| self.succ[t][i].iter().map(move |&j| self.levels[t + 1][j as usize]))
    }

    pub fn contains_edge(&self, t: usize, u: VertexId, v: VertexId) -> bool {
        self.successors(t, u).any(|w| w == v)
    }

    /// All nodes as `(t, v)`.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, VertexId)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(t, l)| l.iter().map(move |&v| (t, v)))
    }

    /// All edges as `(t, u, v)` meaning `u^t -> v^(t+1)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, VertexId, VertexId)> + '_ {
        self.succ.iter().enumerate().flat_map(move |(t, lists)| {
            lists.iter().enumerate().flat_map(move |(i, list)| {
                let u = self.levels[t][i];
                list.iter().map(move |&j| (t, u, self.levels[t + 1][j as usize]))
            })
        })
    }

    /// Whether the path, padded with goal waits to the horizon, is a
    /// root-to-sink path of this diagram.
    pub fn represents(&self, path: &Path) -> bool {
        if path.len() > self.horizon || path.first() != self.root() || path.last() != self.sink() {
            return false;
        }
        (0..self.horizon).all(|t| self.contains_edge(t, path.at(t), path.at(t + 1)))
    }

    /// Text dump: one line per level, then the edges grouped by level.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mdd {} horizon {}", self.agent, self.horizon);
        for (t, level) in self.levels.iter().enumerate() {
            let _ = write!(out, "{t}:");
            for v in level {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out.push_str("edges:\n");
        for t in 0..self.horizon {
            let _ = write!(out, "{t}:");
            for (_, u, v) in self.edges().filter(|e| e.0 == t) {
                let _ = write!(out, " {u}->{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Keeps only nodes on some root-to-sink path and compacts the indices.
    fn assemble(
        agent: AgentId,
        horizon: usize,
        root: VertexId,
        sink: VertexId,
        levels: Vec<Vec<VertexId>>,
        edges: &BTreeSet<(usize, VertexId, VertexId)>,
    ) -> Option<Mdd> {
        let find = |t: usize, v: VertexId| levels[t].binary_search(&v).ok();
        let mut fwd: Vec<Vec<bool>> = levels.iter().map(|l| vec![false; l.len()]).collect();
        let mut bwd = fwd.clone();
        fwd[0][find(0, root)?] = true;
        for &(t, u, v) in edges.iter() {
            if let (Some(i), Some(j)) = (find(t, u), find(t + 1, v)) {
                if fwd[t][i] {
                    fwd[t + 1][j] = true;
                }
            }
        }
        bwd[horizon][find(horizon, sink)?] = true;
        for &(t, u, v) in edges.iter().rev() {
            if let (Some(i), Some(j)) = (find(t, u), find(t + 1, v)) {
                if bwd[t + 1][j] && fwd[t + 1][j] {
                    bwd[t][i] = true;
                }
            }
        }
        if !(fwd[horizon][find(horizon, sink)?] && bwd[0][find(0, root)?]) {
            return None;
        }
        let keep = |t: usize, i: usize| fwd[t][i] && bwd[t][i];
        let kept: Vec<Vec<VertexId>> = levels
            .iter()
            .enumerate()
            .map(|(t, l)| l.iter().enumerate().filter(|&(i, _)| keep(t, i)).map(|(_, &v)| v).collect())
            .collect();
        let mut succ: Vec<Vec<Vec<u32>>> = kept.iter().take(horizon).map(|l| vec![Vec::new(); l.len()]).collect();
        for &(t, u, v) in edges.iter() {
            if let (Ok(i), Ok(j)) = (kept[t].binary_search(&u), kept[t + 1].binary_search(&v)) {
                succ[t][i].push(j as u32);
            }
        }
        for list in succ.iter_mut().flatten() {
            list.sort_unstable();
            list.dedup();
        }
        Some(Mdd {
            agent,
            horizon,
            levels: kept,
            succ,
        })
    }
}

/// Full MDD: `v^t` is kept when `v` is reachable from the start in `t` steps
/// and either `t + dist(v, goal) <= cost_bound` or `v` is the goal (so waits
/// at the goal stay free). Dead nodes are pruned.
pub fn build_mdd(
    planner: &Planner<'_>,
    agent: AgentId,
    horizon: usize,
    cost_bound: usize,
) -> Result<Mdd, DiagramError> {
    let instance = planner.instance();
    let graph = instance.graph();
    let start = instance.start(agent);
    let goal = instance.goal(agent);
    let to_goal = planner.goal_distances(agent);
    if to_goal.get(start).is_none() {
        return Err(DiagramError::UnreachableGoal(agent));
    }
    let admits = |v: VertexId, t: usize| v == goal || to_goal.get(v).is_some_and(|d| t + d <= cost_bound);
    let no_path = DiagramError::NoPathWithinBounds {
        agent,
        horizon,
        cost_bound,
    };

    let mut levels: Vec<Vec<VertexId>> = vec![vec![start]];
    let mut edges = BTreeSet::new();
    let mut stamp = vec![usize::MAX; graph.vertex_count()];
    for t in 0..horizon {
        let mut next = Vec::new();
        for &u in &levels[t] {
            for &w in core::iter::once(&u).chain(graph.neighbors(u)) {
                if !admits(w, t + 1) {
                    continue;
                }
                edges.insert((t, u, w));
                if stamp[w.index()] != t + 1 {
                    stamp[w.index()] = t + 1;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        levels.push(next);
    }
    Mdd::assemble(agent, horizon, start, goal, levels, &edges).ok_or(no_path)
}

/// Sparse MDD over an explicit candidate set; each path is padded with goal
/// waits to `horizon`.
pub fn build_smdd(agent: AgentId, goal: VertexId, paths: &[Path], horizon: usize) -> Result<Mdd, DiagramError> {
    let first = paths.first().ok_or(DiagramError::EmptyPathSet(agent))?;
    let start = first.first();
    let mut nodes: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); horizon + 1];
    let mut edges = BTreeSet::new();
    for p in paths {
        if p.last() != goal {
            return Err(DiagramError::PathMissesGoal(agent));
        }
        if p.first() != start {
            return Err(DiagramError::StartMismatch(agent));
        }
        if p.len() > horizon {
            return Err(DiagramError::PathTooLong {
                agent,
                len: p.len(),
                horizon,
            });
        }
        for t in 0..=horizon {
            nodes[t].insert(p.at(t));
            if t < horizon {
                edges.insert((t, p.at(t), p.at(t + 1)));
            }
        }
    }
    let levels = nodes.into_iter().map(|s| s.into_iter().collect()).collect();
    Ok(Mdd::assemble(agent, horizon, start, goal, levels, &edges).expect("every node lies on an input path"))
}

/// Number of root-to-sink paths, saturating at `u128::MAX`.
pub fn count_represented_paths(mdd: &Mdd) -> u128 {
    let h = mdd.horizon;
    let mut ways = vec![1u128; mdd.levels[h].len()];
    for t in (0..h).rev() {
        ways = mdd.succ[t]
            .iter()
            .map(|list| list.iter().fold(0u128, |acc, &j| acc.saturating_add(ways[j as usize])))
            .collect();
    }
    ways[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::Graph;
    use crate::MapfInstance;

    const A0: AgentId = AgentId(0);

    fn vs(ids: &[u32]) -> Vec<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn full_mdd_examples() {
        let inst = fixtures::path_three();
        let p = Planner::new(&inst);
        let m = build_mdd(&p, A0, 2, 2).unwrap();
        assert_eq!(m.nodes().collect::<Vec<_>>(), vec![(0, VertexId(0)), (1, VertexId(1)), (2, VertexId(2))]);
        assert_eq!(m.edge_count(), 2);
        assert_eq!(count_represented_paths(&m), 1);

        let m = build_mdd(&p, A0, 3, 3).unwrap();
        assert_eq!(m.node_count(), 6);
        for (t, v) in [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2)] {
            assert!(m.contains(VertexId(v), t), "missing v{v}^{t}");
        }
        assert_eq!(count_represented_paths(&m), 3);
    }

    #[test]
    fn start_is_goal() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let inst = MapfInstance::new(g, vec![(VertexId(1), VertexId(1))]).unwrap();
        let p = Planner::new(&inst);
        let m = build_mdd(&p, A0, 0, 0).unwrap();
        assert_eq!((m.node_count(), m.edge_count()), (1, 0));
        assert_eq!(count_represented_paths(&m), 1);
    }

    #[test]
    fn infeasible_bounds_and_unreachable_goal() {
        let inst = fixtures::path_three();
        let p = Planner::new(&inst);
        assert!(matches!(build_mdd(&p, A0, 3, 1), Err(DiagramError::NoPathWithinBounds { .. })));
        assert!(matches!(build_mdd(&p, A0, 1, 3), Err(DiagramError::NoPathWithinBounds { .. })));
        let g = Graph::new(3, [(0, 1)]).unwrap();
        let inst = MapfInstance::new(g, vec![(VertexId(0), VertexId(2))]).unwrap();
        let p = Planner::new(&inst);
        assert_eq!(build_mdd(&p, A0, 3, 3), Err(DiagramError::UnreachableGoal(A0)));
    }

    #[test]
    fn crossing_paths_smdd() {
        let (_, paths) = fixtures::crossing_paths();
        let m = build_smdd(A0, VertexId(4), &paths, 4).unwrap();
        assert_eq!(m.node_count(), 7);
        assert_eq!(m.edge_count(), 8);
        assert_eq!(count_represented_paths(&m), 4);
        for p in &paths {
            assert!(m.represents(p));
        }
    }

    #[test]
    fn smdd_goal_padding() {
        let p = Path::new(A0, vs(&[0, 1, 2]));
        let m = build_smdd(A0, VertexId(2), core::slice::from_ref(&p), 2).unwrap();
        assert_eq!((m.node_count(), m.edge_count()), (3, 2));
        let m = build_smdd(A0, VertexId(2), core::slice::from_ref(&p), 3).unwrap();
        assert_eq!((m.node_count(), m.edge_count()), (4, 3));
        assert!(m.contains(VertexId(2), 3));
        assert_eq!(build_smdd(A0, VertexId(1), core::slice::from_ref(&p), 3), Err(DiagramError::PathMissesGoal(A0)));
        assert!(matches!(build_smdd(A0, VertexId(2), &[p], 1), Err(DiagramError::PathTooLong { .. })));
    }

    #[test]
    fn dump_format() {
        let inst = fixtures::path_three();
        let p = Planner::new(&inst);
        let m = build_mdd(&p, A0, 3, 3).unwrap();
        let want = "mdd a0 horizon 3\n\
                    0: v0\n\
                    1: v0 v1\n\
                    2: v1 v2\n\
                    3: v2\n\
                    edges:\n\
                    0: v0->v0 v0->v1\n\
                    1: v0->v1 v1->v1 v1->v2\n\
                    2: v1->v2 v2->v2\n";
        assert_eq!(m.dump(), want);
    }
}

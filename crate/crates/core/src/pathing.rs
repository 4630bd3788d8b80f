//! Single-agent machinery: BFS distance tables, conflict-avoiding
//! space-time search and candidate path generation.
//!
//! The space-time search expands the time-expanded graph one layer at a time.
//! All actions take one timestep, so the first layer that holds the goal (and
//! lies past every conflict on the goal vertex) gives the minimum cost. The
//! returned path is the lexicographically smallest vertex sequence among all
//! minimum-cost paths, which makes every query deterministic.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{AgentId, Collision, CollisionKind, Graph, MapfInstance, Path, VertexId};

/// Hop distances from one source vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    source: VertexId,
    dist: Vec<Option<u32>>,
}

impl DistanceTable {
    pub fn source(&self) -> VertexId {
        self.source
    }

    /// `None` when `v` cannot be reached.
    #[inline]
    pub fn get(&self, v: VertexId) -> Option<usize> {
        self.dist[v.index()].map(|d| d as usize)
    }

    /// Reachable vertices with their distances.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, usize)> + '_ {
        self.dist
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (VertexId(i as u32), d as usize)))
    }
}

pub fn bfs_distances(graph: &Graph, source: VertexId) -> DistanceTable {
    let mut dist = vec![None; graph.vertex_count()];
    let mut queue = VecDeque::new();
    dist[source.index()] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let d = dist[u.index()].unwrap();
        for &v in graph.neighbors(u) {
            if dist[v.index()].is_none() {
                dist[v.index()] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    DistanceTable { source, dist }
}

/// One forbidden space-time element of a single agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConflictEntry {
    /// Must not be on `v` at `t`.
    Vertex { v: VertexId, t: usize },
    /// Must not move `from -> to` between `t` and `t + 1`.
    Edge { from: VertexId, to: VertexId, t: usize },
}

/// Space-time elements one agent has to avoid.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentConflicts {
    vertices: BTreeSet<(usize, VertexId)>,
    edges: BTreeSet<(usize, VertexId, VertexId)>,
}

impl AgentConflicts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ConflictEntry>) -> Self {
        let mut out = Self::new();
        for e in entries {
            out.insert(e);
        }
        out
    }

    /// Returns `false` if the entry was already present.
    pub fn insert(&mut self, entry: ConflictEntry) -> bool {
        match entry {
            ConflictEntry::Vertex { v, t } => self.vertices.insert((t, v)),
            ConflictEntry::Edge { from, to, t } => self.edges.insert((t, from, to)),
        }
    }

    pub fn add_vertex(&mut self, v: VertexId, t: usize) -> bool {
        self.insert(ConflictEntry::Vertex { v, t })
    }

    pub fn add_edge(&mut self, from: VertexId, to: VertexId, t: usize) -> bool {
        self.insert(ConflictEntry::Edge { from, to, t })
    }

    #[inline]
    pub fn forbids_vertex(&self, v: VertexId, t: usize) -> bool {
        !self.vertices.is_empty() && self.vertices.contains(&(t, v))
    }

    #[inline]
    pub fn forbids_move(&self, from: VertexId, to: VertexId, t: usize) -> bool {
        !self.edges.is_empty() && self.edges.contains(&(t, from, to))
    }

    pub fn contains(&self, entry: &ConflictEntry) -> bool {
        match *entry {
            ConflictEntry::Vertex { v, t } => self.forbids_vertex(v, t),
            ConflictEntry::Edge { from, to, t } => self.forbids_move(from, to, t),
        }
    }

    /// Latest timestep at which `v` is forbidden.
    pub fn last_vertex_time(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().rev().find(|&&(_, w)| w == v).map(|&(t, _)| t)
    }

    pub fn len(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    /// Vertex entries first, each group ordered by time.
    pub fn entries(&self) -> Vec<ConflictEntry> {
        self.vertices
            .iter()
            .map(|&(t, v)| ConflictEntry::Vertex { v, t })
            .chain(self.edges.iter().map(|&(t, from, to)| ConflictEntry::Edge { from, to, t }))
            .collect()
    }

    /// Whether `path` (padded with goal waits) touches none of the entries.
    pub fn avoided_by(&self, path: &Path) -> bool {
        let horizon_v = self.vertices.iter().map(|&(t, _)| t).max().unwrap_or(0);
        let horizon_e = self.edges.iter().map(|&(t, _, _)| t + 1).max().unwrap_or(0);
        let horizon = horizon_v.max(horizon_e).max(path.len());
        (0..=horizon).all(|t| {
            !self.forbids_vertex(path.at(t), t)
                && (t == horizon || !self.forbids_move(path.at(t), path.at(t + 1), t) || path.at(t) == path.at(t + 1))
        })
    }
}

/// Conflicts accumulated during a solver run: the collisions seen so far and,
/// derived from them, what each agent must avoid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConflictSet {
    per_agent: Vec<AgentConflicts>,
    collisions: BTreeSet<Collision>,
}

impl ConflictSet {
    pub fn new(agent_count: usize) -> Self {
        ConflictSet {
            per_agent: vec![AgentConflicts::new(); agent_count],
            collisions: BTreeSet::new(),
        }
    }

    /// Records a collision; `false` if it was already known.
    pub fn record(&mut self, c: &Collision) -> bool {
        if !self.collisions.insert(*c) {
            return false;
        }
        match c.kind {
            CollisionKind::Vertex(v) => {
                self.per_agent[c.first.index()].add_vertex(v, c.time);
                self.per_agent[c.second.index()].add_vertex(v, c.time);
            }
            CollisionKind::Edge(u, v) => {
                self.per_agent[c.first.index()].add_edge(u, v, c.time);
                self.per_agent[c.second.index()].add_edge(v, u, c.time);
            }
        }
        true
    }

    pub fn for_agent(&self, agent: AgentId) -> &AgentConflicts {
        &self.per_agent[agent.index()]
    }

    pub fn collisions(&self) -> impl Iterator<Item = &Collision> + '_ {
        self.collisions.iter()
    }

    pub fn contains(&self, c: &Collision) -> bool {
        self.collisions.contains(c)
    }

    /// Number of recorded collisions.
    pub fn len(&self) -> usize {
        self.collisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.collisions.is_empty()
    }

    pub fn agent_count(&self) -> usize {
        self.per_agent.len()
    }
}

/// Per-instance single-agent search with cached goal distance tables.
#[derive(Debug, Clone)]
pub struct Planner<'a> {
    instance: &'a MapfInstance,
    to_goal: Vec<DistanceTable>,
}

impl<'a> Planner<'a> {
    pub fn new(instance: &'a MapfInstance) -> Self {
        let to_goal = instance
            .agents()
            .iter()
            .map(|a| bfs_distances(instance.graph(), a.goal))
            .collect();
        Planner { instance, to_goal }
    }

    pub fn instance(&self) -> &'a MapfInstance {
        self.instance
    }

    pub fn goal_distances(&self, agent: AgentId) -> &DistanceTable {
        &self.to_goal[agent.index()]
    }

    /// Unconstrained shortest-path cost `ξ` of an agent; `None` when its goal
    /// is unreachable.
    pub fn shortest_cost(&self, agent: AgentId) -> Option<usize> {
        self.to_goal[agent.index()].get(self.instance.start(agent))
    }

    /// Per-agent `ξ` values, or the first agent whose goal is unreachable.
    pub fn shortest_costs(&self) -> Result<Vec<usize>, AgentId> {
        self.instance
            .agent_ids()
            .map(|a| self.shortest_cost(a).ok_or(a))
            .collect()
    }

    pub fn shortest_path(&self, agent: AgentId) -> Option<Path> {
        let xi = self.shortest_cost(agent)?;
        self.constrained_shortest_path(agent, &AgentConflicts::new(), xi, xi)
    }

    /// Minimum-cost path of at most `horizon` steps and cost at most
    /// `cost_bound` that avoids every entry of `avoid`, including after the
    /// final arrival. The path ends on its final arrival at the goal.
    pub fn constrained_shortest_path(
        &self,
        agent: AgentId,
        avoid: &AgentConflicts,
        horizon: usize,
        cost_bound: usize,
    ) -> Option<Path> {
        let graph = self.instance.graph();
        let start = self.instance.start(agent);
        let goal = self.instance.goal(agent);
        let to_goal = &self.to_goal[agent.index()];
        let limit = horizon.min(cost_bound);
        if to_goal.get(start)? > limit || avoid.forbids_vertex(start, 0) {
            return None;
        }
        let min_arrival = avoid.last_vertex_time(goal).map_or(0, |t| t + 1);
        if min_arrival > limit {
            return None;
        }

        let mut layers: Vec<Vec<VertexId>> = vec![vec![start]];
        let mut stamp = vec![usize::MAX; graph.vertex_count()];
        let arrival = loop {
            let t = layers.len() - 1;
            if t >= min_arrival && layers[t].binary_search(&goal).is_ok() {
                break t;
            }
            if t == limit {
                return None;
            }
            let mut next = Vec::new();
            for &v in &layers[t] {
                for &w in core::iter::once(&v).chain(graph.neighbors(v)) {
                    if stamp[w.index()] == t + 1 {
                        continue;
                    }
                    match to_goal.get(w) {
                        Some(d) if t + 1 + d <= limit => {}
                        _ => continue,
                    }
                    if avoid.forbids_vertex(w, t + 1) || (w != v && avoid.forbids_move(v, w, t)) {
                        continue;
                    }
                    stamp[w.index()] = t + 1;
                    next.push(w);
                }
            }
            if next.is_empty() {
                return None;
            }
            next.sort_unstable();
            layers.push(next);
        };

        let allowed = |v: VertexId, w: VertexId, t: usize| v == w || !avoid.forbids_move(v, w, t);
        let mut alive: Vec<Vec<VertexId>> = vec![Vec::new(); arrival + 1];
        alive[arrival].push(goal);
        for t in (0..arrival).rev() {
            let (head, tail) = alive.split_at_mut(t + 1);
            let succ = &tail[0];
            head[t] = layers[t]
                .iter()
                .copied()
                .filter(|&v| {
                    core::iter::once(&v)
                        .chain(graph.neighbors(v))
                        .any(|&w| succ.binary_search(&w).is_ok() && allowed(v, w, t))
                })
                .collect();
        }

        let mut positions = Vec::with_capacity(arrival + 1);
        let mut cur = start;
        positions.push(cur);
        for t in 0..arrival {
            cur = core::iter::once(&cur)
                .chain(graph.neighbors(cur))
                .copied()
                .filter(|&w| alive[t + 1].binary_search(&w).is_ok() && allowed(cur, w, t))
                .min()
                .expect("a live successor exists");
            positions.push(cur);
        }
        Some(Path::new(agent, positions))
    }
}

/// Free-function form of [`Planner::constrained_shortest_path`].
pub fn constrained_shortest_path(
    instance: &MapfInstance,
    agent: AgentId,
    avoid: &AgentConflicts,
    horizon: usize,
    cost_bound: usize,
) -> Option<Path> {
    Planner::new(instance).constrained_shortest_path(agent, avoid, horizon, cost_bound)
}

/// Result of an AND-path query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AndPath {
    /// A path avoiding every conflict that is not yet a candidate.
    New(Path),
    /// The best avoiding path is already among the candidates.
    Represented,
    /// No path avoids all conflicts within the bounds.
    Infeasible,
}

/// Shortest path that avoids all of the agent's conflicts at once.
pub fn new_and_path(
    planner: &Planner<'_>,
    agent: AgentId,
    candidates: &[Path],
    conflicts: &AgentConflicts,
    horizon: usize,
    cost_bound: usize,
) -> AndPath {
    match planner.constrained_shortest_path(agent, conflicts, horizon, cost_bound) {
        None => AndPath::Infeasible,
        Some(p) if candidates.iter().any(|c| c.trimmed() == p) => AndPath::Represented,
        Some(p) => AndPath::New(p),
    }
}

/// For each nonempty subset of `conflicts`, smallest subsets first and at most
/// `subset_cap` of them, the shortest path avoiding exactly that subset.
/// Duplicates are dropped; the order of first discovery is kept.
pub fn new_or_paths(
    planner: &Planner<'_>,
    agent: AgentId,
    conflicts: &AgentConflicts,
    horizon: usize,
    cost_bound: usize,
    subset_cap: usize,
) -> Vec<Path> {
    let entries = conflicts.entries();
    let n = entries.len();
    let mut out: Vec<Path> = Vec::new();
    let mut budget = subset_cap;
    for size in 1..=n {
        // lexicographic k-combinations of 0..n
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if budget == 0 {
                return out;
            }
            budget -= 1;
            let subset = AgentConflicts::from_entries(idx.iter().map(|&i| entries[i]));
            if let Some(p) = planner.constrained_shortest_path(agent, &subset, horizon, cost_bound) {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
            let Some(pos) = (0..size).rev().find(|&i| idx[i] < n - size + i) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn vs(ids: &[u32]) -> Vec<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    const A0: AgentId = AgentId(0);

    #[test]
    fn bfs_examples() {
        let inst = fixtures::path_three();
        let d = bfs_distances(inst.graph(), VertexId(0));
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![(VertexId(0), 0), (VertexId(1), 1), (VertexId(2), 2)]);

        let inst = fixtures::square_swap();
        let d = bfs_distances(inst.graph(), VertexId(0));
        assert_eq!(
            d.iter().map(|(_, d)| d).collect::<Vec<_>>(),
            vec![0, 1, 1, 2] // v00 v01 v10 v11
        );

        let g = Graph::new(3, [(0, 1)]).unwrap();
        let d = bfs_distances(&g, VertexId(0));
        assert_eq!(d.get(VertexId(2)), None);
    }

    #[test]
    fn constrained_examples() {
        let inst = fixtures::path_three();
        let p = Planner::new(&inst);
        let avoid = AgentConflicts::from_entries([ConflictEntry::Vertex { v: VertexId(1), t: 1 }]);
        assert_eq!(
            p.constrained_shortest_path(A0, &avoid, 3, 3).unwrap().positions(),
            vs(&[0, 0, 1, 2]).as_slice()
        );
        let mut avoid2 = avoid.clone();
        avoid2.add_vertex(VertexId(1), 2);
        assert_eq!(p.constrained_shortest_path(A0, &avoid2, 3, 3), None);
        assert_eq!(
            p.constrained_shortest_path(A0, &AgentConflicts::new(), 2, 2).unwrap().positions(),
            vs(&[0, 1, 2]).as_slice()
        );
    }

    #[test]
    fn goal_conflicts_delay_arrival() {
        let inst = fixtures::path_three();
        let p = Planner::new(&inst);
        let mut avoid = AgentConflicts::new();
        avoid.add_vertex(VertexId(2), 3);
        let path = p.constrained_shortest_path(A0, &avoid, 10, 10).unwrap();
        assert_eq!(path.cost(VertexId(2)).unwrap(), 4);
        assert!(avoid.avoided_by(&path));
    }

    #[test]
    fn edge_conflicts_are_respected() {
        let inst = fixtures::path_three();
        let p = Planner::new(&inst);
        let mut avoid = AgentConflicts::new();
        avoid.add_edge(VertexId(0), VertexId(1), 0);
        let path = p.constrained_shortest_path(A0, &avoid, 5, 5).unwrap();
        assert_eq!(path.positions(), vs(&[0, 0, 1, 2]).as_slice());
    }

    #[test]
    fn lexicographic_tie_break() {
        let inst = fixtures::square_swap();
        let p = Planner::new(&inst);
        assert_eq!(p.shortest_path(A0).unwrap().positions(), vs(&[0, 1, 3]).as_slice());
        assert_eq!(p.shortest_path(AgentId(1)).unwrap().positions(), vs(&[3, 1, 0]).as_slice());
    }

    #[test]
    fn and_path_examples() {
        let inst = fixtures::path_three();
        let p = Planner::new(&inst);
        let shortest = p.shortest_path(A0).unwrap();
        let one = AgentConflicts::from_entries([ConflictEntry::Vertex { v: VertexId(1), t: 1 }]);
        assert_eq!(
            new_and_path(&p, A0, core::slice::from_ref(&shortest), &one, 3, 3),
            AndPath::New(Path::new(A0, vs(&[0, 0, 1, 2])))
        );
        let mut two = one.clone();
        two.add_vertex(VertexId(1), 2);
        assert_eq!(new_and_path(&p, A0, core::slice::from_ref(&shortest), &two, 3, 3), AndPath::Infeasible);
        assert_eq!(new_and_path(&p, A0, &[], &AgentConflicts::new(), 3, 3), AndPath::New(shortest.clone()));
        assert_eq!(
            new_and_path(&p, A0, &[shortest], &AgentConflicts::new(), 3, 3),
            AndPath::Represented
        );
    }

    #[test]
    fn or_path_examples() {
        let inst = fixtures::path_three();
        let p = Planner::new(&inst);
        let mut c = AgentConflicts::new();
        c.add_vertex(VertexId(1), 1);
        c.add_vertex(VertexId(1), 2);
        let got: Vec<_> = new_or_paths(&p, A0, &c, 4, 4, 64).into_iter().map(|p| p.padded(4)).collect();
        let want: Vec<_> = [vs(&[0, 0, 1, 2]), vs(&[0, 1, 2, 2]), vs(&[0, 0, 0, 1, 2])]
            .into_iter()
            .map(|v| Path::new(A0, v).padded(4))
            .collect();
        assert_eq!(got, want);

        assert!(new_or_paths(&p, A0, &AgentConflicts::new(), 4, 4, 64).is_empty());
        let single = AgentConflicts::from_entries([ConflictEntry::Vertex { v: VertexId(1), t: 1 }]);
        assert!(new_or_paths(&p, A0, &single, 4, 4, 64).len() <= 1);
        // cap limits the enumerated subsets
        assert_eq!(new_or_paths(&p, A0, &c, 4, 4, 1).len(), 1);
    }

    #[test]
    fn conflict_set_records_both_sides() {
        let mut cs = ConflictSet::new(2);
        assert!(cs.record(&Collision::edge(AgentId(0), AgentId(1), VertexId(0), VertexId(1), 3)));
        assert!(!cs.record(&Collision::edge(AgentId(0), AgentId(1), VertexId(0), VertexId(1), 3)));
        assert!(cs.for_agent(AgentId(0)).forbids_move(VertexId(0), VertexId(1), 3));
        assert!(cs.for_agent(AgentId(1)).forbids_move(VertexId(1), VertexId(0), 3));
        assert_eq!(cs.len(), 1);
    }
}

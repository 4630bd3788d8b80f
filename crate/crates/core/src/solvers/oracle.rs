//! Exhaustive reference solver for tiny instances.
//!
//! Deliberately shares nothing with the search and encoding code beyond the
//! instance types: distances, path enumeration and the collision test are
//! all local.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{AgentId, MapfInstance, Path, Solution, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Optimal { soc: usize, witness: Solution },
    InfeasibleAtCap,
}

impl OracleResult {
    pub fn soc(&self) -> Option<usize> {
        match self {
            OracleResult::Optimal { soc, .. } => Some(*soc),
            OracleResult::InfeasibleAtCap => None,
        }
    }
}

fn distances_to(instance: &MapfInstance, target: VertexId) -> Vec<Option<usize>> {
    let g = instance.graph();
    let mut dist = vec![None; g.vertex_count()];
    dist[target.index()] = Some(0);
    let mut queue = VecDeque::from([target]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u.index()].unwrap();
        for &w in g.neighbors(u) {
            if dist[w.index()].is_none() {
                dist[w.index()] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Every walk from `start` whose final arrival at `goal` happens at exactly
/// `cost` steps, ending on that arrival.
fn walks_of_cost(instance: &MapfInstance, agent: AgentId, cost: usize, dist: &[Option<usize>]) -> Vec<Vec<VertexId>> {
    let g = instance.graph();
    let start = instance.start(agent);
    let goal = instance.goal(agent);
    let mut out = Vec::new();
    if cost == 0 {
        if start == goal {
            out.push(vec![start]);
        }
        return out;
    }
    let mut prefix = vec![start];
    fn rec(
        g: &crate::instance::Graph,
        goal: VertexId,
        cost: usize,
        dist: &[Option<usize>],
        prefix: &mut Vec<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        let t = prefix.len() - 1;
        let here = *prefix.last().unwrap();
        if t == cost {
            if here == goal && prefix[t - 1] != goal {
                out.push(prefix.clone());
            }
            return;
        }
        let mut options = vec![here];
        options.extend_from_slice(g.neighbors(here));
        for next in options {
            match dist[next.index()] {
                Some(d) if t + 1 + d <= cost => {}
                _ => continue,
            }
            // arriving at the goal before the end is allowed only if it leaves again
            prefix.push(next);
            rec(g, goal, cost, dist, prefix, out);
            prefix.pop();
        }
    }
    rec(g, goal, cost, dist, &mut prefix, &mut out);
    out
}

fn position(p: &[VertexId], t: usize) -> VertexId {
    p[t.min(p.len() - 1)]
}

fn compatible(p: &[VertexId], q: &[VertexId]) -> bool {
    let horizon = p.len().max(q.len());
    for t in 0..horizon {
        if position(p, t) == position(q, t) {
            return false;
        }
        if t + 1 < horizon
            && position(p, t) == position(q, t + 1)
            && position(p, t + 1) == position(q, t)
            && position(p, t) != position(p, t + 1)
        {
            return false;
        }
    }
    true
}

/// Smallest sum of costs up to `cost_cap`, with a witness plan.
pub fn brute_force_oracle(instance: &MapfInstance, cost_cap: usize) -> OracleResult {
    let k = instance.agent_count();
    let mut xi = Vec::with_capacity(k);
    let mut dists = Vec::with_capacity(k);
    for a in instance.agent_ids() {
        let d = distances_to(instance, instance.goal(a));
        match d[instance.start(a).index()] {
            Some(x) => xi.push(x),
            None => return OracleResult::InfeasibleAtCap,
        }
        dists.push(d);
    }
    let lower: usize = xi.iter().sum();
    if cost_cap < lower {
        return OracleResult::InfeasibleAtCap;
    }
    // by_cost[a][c - xi[a]]: walks of agent a with cost exactly c
    let mut by_cost: Vec<Vec<Vec<Vec<VertexId>>>> = vec![Vec::new(); k];
    for soc in lower..=cost_cap {
        let slack = soc - lower;
        for a in instance.agent_ids() {
            let i = a.index();
            while by_cost[i].len() <= slack {
                let c = xi[i] + by_cost[i].len();
                by_cost[i].push(walks_of_cost(instance, a, c, &dists[i]));
            }
        }
        let mut chosen: Vec<&[VertexId]> = Vec::with_capacity(k);
        if search(&by_cost, 0, slack, &mut chosen) {
            let paths = chosen
                .iter()
                .enumerate()
                .map(|(i, p)| Path::new(AgentId(i as u32), p.to_vec()))
                .collect();
            return OracleResult::Optimal {
                soc,
                witness: Solution::new(paths),
            };
        }
    }
    OracleResult::InfeasibleAtCap
}

/// Assigns agents `agent..` paths using exactly `slack` extra cost in total.
fn search<'p>(by_cost: &'p [Vec<Vec<Vec<VertexId>>>], agent: usize, slack: usize, chosen: &mut Vec<&'p [VertexId]>) -> bool {
    if agent == by_cost.len() {
        return slack == 0;
    }
    for extra in 0..=slack {
        if agent + 1 == by_cost.len() && extra != slack {
            continue;
        }
        for walk in &by_cost[agent][extra] {
            if chosen.iter().all(|q| compatible(walk, q)) {
                chosen.push(walk);
                if search(by_cost, agent + 1, slack - extra, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::validate_solution;

    #[test]
    fn fixture_optima() {
        assert_eq!(brute_force_oracle(&fixtures::path_three(), 12).soc(), Some(2));
        assert_eq!(brute_force_oracle(&fixtures::square_swap(), 12).soc(), Some(4));
        let r = brute_force_oracle(&fixtures::corridor_with_spur(), 12);
        assert_eq!(r.soc(), Some(8));
        if let OracleResult::Optimal { witness, .. } = r {
            let inst = fixtures::corridor_with_spur();
            assert!(validate_solution(&inst, &witness).is_empty());
            assert_eq!(witness.sum_of_costs(&inst).unwrap(), 8);
        }
        assert_eq!(brute_force_oracle(&fixtures::corridor_swap(), 10), OracleResult::InfeasibleAtCap);
    }

    #[test]
    fn walk_counts() {
        // three-vertex path at cost 3: wait-move-move, move-wait-move
        let inst = fixtures::path_three();
        let d = distances_to(&inst, VertexId(2));
        assert_eq!(walks_of_cost(&inst, AgentId(0), 3, &d).len(), 2);
        assert_eq!(walks_of_cost(&inst, AgentId(0), 2, &d).len(), 1);
    }
}

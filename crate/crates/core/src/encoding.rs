//! CNF compilation of per-agent decision diagrams.
//!
//! Variables: `X(a, v, t)` for every diagram node, `E(a, u, v, t)` for every
//! diagram edge (waits included) and `C(a, t)` for `t` in `[xi_a, mu)`, which
//! is true exactly when agent `a` has not yet settled at its goal for good at
//! time `t`. The number of true `C` variables of an agent therefore equals its
//! path cost minus its shortest-path cost, and one cardinality constraint over
//! all of them bounds the sum of costs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::diagrams::Mdd;
use crate::instance::{AgentId, Collision, CollisionKind, Path, Solution, VertexId};
use crate::pathing::ConflictSet;
use crate::satif::{Assignment, Interrupt, Lit, SatBackend, SatError, SolveResult, Var};

/// Whether collision avoidance is part of the formula up front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelMode {
    /// Every pairwise vertex and swap exclusion is emitted.
    Complete,
    /// Only exclusions for recorded conflicts are emitted.
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("expected one diagram per agent ({expected}), got {found}")]
    AgentCount { expected: usize, found: usize },
    #[error("diagram of {agent} has horizon {found}, expected {expected}")]
    HorizonMismatch { agent: AgentId, expected: usize, found: usize },
    #[error("sum of costs {soc} is below the lower bound {lower}")]
    NegativeSlack { soc: usize, lower: usize },
    #[error("model for {agent} has {count} true position variables at time {time}")]
    Soundness { agent: AgentId, time: usize, count: usize },
    #[error(transparent)]
    Sat(#[from] SatError),
}

/// What a solver variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarRole {
    Node { agent: AgentId, vertex: VertexId, time: usize },
    Edge { agent: AgentId, from: VertexId, to: VertexId, time: usize },
    Cost { agent: AgentId, time: usize },
    Auxiliary,
}

/// Per-agent lookup from diagram elements to variables.
#[derive(Debug, Clone, Default)]
pub struct VariableMap {
    /// `x[a][t]`: sorted by vertex.
    x: Vec<Vec<Vec<(VertexId, Var)>>>,
    /// `e[a][t]`: sorted by (from, to).
    e: Vec<Vec<Vec<((VertexId, VertexId), Var)>>>,
    /// `c[a]` holds `C(a, t)` for `t = first_cost[a]..horizon`.
    c: Vec<Vec<Var>>,
    first_cost: Vec<usize>,
    decision: usize,
}

impl VariableMap {
    pub fn node(&self, agent: AgentId, v: VertexId, t: usize) -> Option<Var> {
        let level = self.x.get(agent.index())?.get(t)?;
        level.binary_search_by_key(&v, |&(u, _)| u).ok().map(|i| level[i].1)
    }

    pub fn edge(&self, agent: AgentId, from: VertexId, to: VertexId, t: usize) -> Option<Var> {
        let level = self.e.get(agent.index())?.get(t)?;
        level.binary_search_by_key(&(from, to), |&(k, _)| k).ok().map(|i| level[i].1)
    }

    pub fn cost(&self, agent: AgentId, t: usize) -> Option<Var> {
        let first = *self.first_cost.get(agent.index())?;
        t.checked_sub(first).and_then(|i| self.c[agent.index()].get(i).copied())
    }

    pub fn node_vars(&self) -> usize {
        self.x.iter().flatten().map(Vec::len).sum()
    }

    pub fn edge_vars(&self) -> usize {
        self.e.iter().flatten().map(Vec::len).sum()
    }

    pub fn cost_vars(&self) -> usize {
        self.c.iter().map(Vec::len).sum()
    }

    /// Node, edge and cost variables; auxiliary counter variables excluded.
    pub fn decision_vars(&self) -> usize {
        self.decision
    }

    /// Every variable with its role, ordered by variable index. Indices not
    /// listed as node, edge or cost variables are auxiliary.
    pub fn describe(&self, num_vars: usize) -> Vec<(Var, VarRole)> {
        let mut roles = vec![VarRole::Auxiliary; num_vars];
        for (a, levels) in self.x.iter().enumerate() {
            for (t, level) in levels.iter().enumerate() {
                for &(vertex, var) in level {
                    roles[var.index() as usize - 1] = VarRole::Node {
                        agent: AgentId(a as u32),
                        vertex,
                        time: t,
                    };
                }
            }
        }
        for (a, levels) in self.e.iter().enumerate() {
            for (t, level) in levels.iter().enumerate() {
                for &((from, to), var) in level {
                    roles[var.index() as usize - 1] = VarRole::Edge {
                        agent: AgentId(a as u32),
                        from,
                        to,
                        time: t,
                    };
                }
            }
        }
        for (a, vars) in self.c.iter().enumerate() {
            for (i, &var) in vars.iter().enumerate() {
                roles[var.index() as usize - 1] = VarRole::Cost {
                    agent: AgentId(a as u32),
                    time: self.first_cost[a] + i,
                };
            }
        }
        roles.into_iter().enumerate().map(|(i, r)| (Var::new(i as u32 + 1), r)).collect()
    }
}

/// Groups of at most this many literals use the pairwise encoding.
const PAIRWISE_LIMIT: usize = 5;

/// At most `k` of `lits` are true (sequential counter). Returns the number of
/// auxiliary variables allocated.
pub fn cardinality_le<B: SatBackend + ?Sized>(solver: &mut B, lits: &[Lit], k: usize) -> Result<usize, SatError> {
    let n = lits.len();
    if k >= n {
        return Ok(0);
    }
    if k == 0 {
        for &l in lits {
            solver.add_lits(&[!l])?;
        }
        return Ok(0);
    }
    // s[i][j]: at least j+1 of lits[0..=i] are true
    let s: Vec<Vec<Var>> = (0..n - 1).map(|_| (0..k).map(|_| solver.new_var()).collect()).collect();
    solver.add_lits(&[!lits[0], s[0][0].pos()])?;
    for j in 1..k {
        solver.add_lits(&[s[0][j].neg()])?;
    }
    for i in 1..n - 1 {
        solver.add_lits(&[!lits[i], s[i][0].pos()])?;
        solver.add_lits(&[s[i - 1][0].neg(), s[i][0].pos()])?;
        for j in 1..k {
            solver.add_lits(&[!lits[i], s[i - 1][j - 1].neg(), s[i][j].pos()])?;
            solver.add_lits(&[s[i - 1][j].neg(), s[i][j].pos()])?;
        }
        solver.add_lits(&[!lits[i], s[i - 1][k - 1].neg()])?;
    }
    solver.add_lits(&[!lits[n - 1], s[n - 2][k - 1].neg()])?;
    Ok((n - 1) * k)
}

/// At most one of `lits` is true.
pub fn at_most_one<B: SatBackend + ?Sized>(solver: &mut B, lits: &[Lit]) -> Result<usize, SatError> {
    if lits.len() <= PAIRWISE_LIMIT {
        for i in 0..lits.len() {
            for j in i + 1..lits.len() {
                solver.add_lits(&[!lits[i], !lits[j]])?;
            }
        }
        Ok(0)
    } else {
        cardinality_le(solver, lits, 1)
    }
}

/// Bounds a model was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelBounds {
    pub horizon: usize,
    pub soc: usize,
    pub slack: usize,
}

/// A solver instance loaded with the encoding of one (SoC, horizon) pair.
#[derive(Debug)]
pub struct BooleanModel<B: SatBackend> {
    solver: B,
    vars: VariableMap,
    mode: ModelMode,
    bounds: ModelBounds,
    goals: Vec<VertexId>,
    conflicts: ConflictSet,
    /// Recorded collisions whose exclusion holds in this model, either by a
    /// clause or because one side lacks the variable.
    enforced: BTreeSet<Collision>,
    conflict_clauses: usize,
}

impl<B: SatBackend> BooleanModel<B> {
    /// Encodes `diagrams` (one per agent, in agent order, sharing a horizon)
    /// into `solver`, bounding the sum of costs by `soc`. `lower_bounds` holds
    /// each agent's shortest-path cost. All collisions in `conflicts` are
    /// excluded.
    pub fn build(
        mut solver: B,
        diagrams: &[Mdd],
        lower_bounds: &[usize],
        conflicts: &ConflictSet,
        soc: usize,
        mode: ModelMode,
    ) -> Result<Self, EncodingError> {
        let k = lower_bounds.len();
        if diagrams.len() != k || conflicts.agent_count() != k {
            return Err(EncodingError::AgentCount {
                expected: k,
                found: diagrams.len(),
            });
        }
        let horizon = diagrams.first().map_or(0, Mdd::horizon);
        for d in diagrams {
            if d.horizon() != horizon {
                return Err(EncodingError::HorizonMismatch {
                    agent: d.agent(),
                    expected: horizon,
                    found: d.horizon(),
                });
            }
        }
        let lower: usize = lower_bounds.iter().sum();
        let slack = soc.checked_sub(lower).ok_or(EncodingError::NegativeSlack { soc, lower })?;

        let mut vars = VariableMap::default();
        for (d, &xi) in diagrams.iter().zip(lower_bounds) {
            let x: Vec<Vec<(VertexId, Var)>> = (0..=horizon)
                .map(|t| d.level(t).iter().map(|&v| (v, solver.new_var())).collect())
                .collect();
            let mut e: Vec<Vec<((VertexId, VertexId), Var)>> = vec![Vec::new(); horizon];
            for (t, u, v) in d.edges() {
                e[t].push(((u, v), solver.new_var()));
            }
            for level in &mut e {
                level.sort_unstable_by_key(|&(key, _)| key);
            }
            let c = (xi.min(horizon)..horizon).map(|_| solver.new_var()).collect();
            vars.x.push(x);
            vars.e.push(e);
            vars.c.push(c);
            vars.first_cost.push(xi);
        }
        vars.decision = vars.node_vars() + vars.edge_vars() + vars.cost_vars();

        let goals: Vec<VertexId> = diagrams.iter().map(Mdd::sink).collect();
        for (i, d) in diagrams.iter().enumerate() {
            let a = AgentId(i as u32);
            encode_agent(&mut solver, &vars, d, a, goals[i])?;
        }

        let cost_lits: Vec<Lit> = vars.c.iter().flatten().map(|v| v.pos()).collect();
        cardinality_le(&mut solver, &cost_lits, slack)?;

        if mode == ModelMode::Complete {
            encode_all_exclusions(&mut solver, &vars, horizon)?;
        }

        let mut model = BooleanModel {
            solver,
            vars,
            mode,
            bounds: ModelBounds { horizon, soc, slack },
            goals,
            conflicts: ConflictSet::new(k),
            enforced: BTreeSet::new(),
            conflict_clauses: 0,
        };
        let recorded: Vec<Collision> = conflicts.collisions().copied().collect();
        model.add_conflict_clauses(&recorded)?;
        Ok(model)
    }

    /// Records `collisions` and excludes each of them with a binary clause.
    /// Returns the number of clauses emitted; a collision on a node or edge
    /// missing from one agent's diagram needs none.
    pub fn add_conflict_clauses(&mut self, collisions: &[Collision]) -> Result<usize, EncodingError> {
        let mut emitted = 0;
        for c in collisions {
            self.conflicts.record(c);
            if self.enforced.contains(c) {
                continue;
            }
            let pair = match c.kind {
                CollisionKind::Vertex(v) => (
                    self.vars.node(c.first, v, c.time),
                    self.vars.node(c.second, v, c.time),
                ),
                CollisionKind::Edge(u, v) => (
                    self.vars.edge(c.first, u, v, c.time),
                    self.vars.edge(c.second, v, u, c.time),
                ),
            };
            if let (Some(p), Some(q)) = pair {
                self.solver.add_lits(&[p.neg(), q.neg()])?;
                emitted += 1;
            }
            self.enforced.insert(*c);
        }
        self.conflict_clauses += emitted;
        Ok(emitted)
    }

    /// Whether the exclusion of `collision` holds in this model.
    pub fn has_conflict_clause(&self, collision: &Collision) -> bool {
        self.enforced.contains(collision)
    }

    pub fn solve(&mut self, interrupt: &dyn Interrupt) -> Result<Option<Solution>, EncodingError> {
        match self.solve_assignment(interrupt)? {
            Some(assignment) => self.extract_solution(&assignment).map(Some),
            None => Ok(None),
        }
    }

    /// Raw satisfying assignment, if any.
    pub fn solve_assignment(&mut self, interrupt: &dyn Interrupt) -> Result<Option<Assignment>, EncodingError> {
        match self.solver.solve(interrupt)? {
            SolveResult::Sat(assignment) => Ok(Some(assignment)),
            SolveResult::Unsat => Ok(None),
        }
    }

    /// Reads the unique true node variable of every level into a path of
    /// `horizon` steps per agent.
    pub fn extract_solution(&self, assignment: &Assignment) -> Result<Solution, EncodingError> {
        let mut paths = Vec::with_capacity(self.vars.x.len());
        for (a, levels) in self.vars.x.iter().enumerate() {
            let agent = AgentId(a as u32);
            let mut positions = Vec::with_capacity(levels.len());
            for (t, level) in levels.iter().enumerate() {
                let mut chosen = level.iter().filter(|&&(_, var)| assignment.value(var));
                let first = chosen.next();
                let extra = chosen.count();
                match first {
                    Some(&(v, _)) if extra == 0 => positions.push(v),
                    _ => {
                        return Err(EncodingError::Soundness {
                            agent,
                            time: t,
                            count: usize::from(first.is_some()) + extra,
                        })
                    }
                }
            }
            paths.push(Path::new(agent, positions));
        }
        Ok(Solution::new(paths))
    }

    /// Number of true cost indicators of `agent` under `assignment`.
    pub fn true_cost_indicators(&self, agent: AgentId, assignment: &Assignment) -> usize {
        self.vars.c[agent.index()].iter().filter(|&&v| assignment.value(v)).count()
    }

    pub fn variables(&self) -> &VariableMap {
        &self.vars
    }

    pub fn decision_var_count(&self) -> usize {
        self.vars.decision_vars()
    }

    pub fn num_vars(&self) -> usize {
        self.solver.num_vars()
    }

    pub fn mode(&self) -> ModelMode {
        self.mode
    }

    pub fn bounds(&self) -> ModelBounds {
        self.bounds
    }

    pub fn goals(&self) -> &[VertexId] {
        &self.goals
    }

    pub fn conflicts(&self) -> &ConflictSet {
        &self.conflicts
    }

    pub fn conflict_clause_count(&self) -> usize {
        self.conflict_clauses
    }

    pub fn solver(&self) -> &B {
        &self.solver
    }

    pub fn into_solver(self) -> B {
        self.solver
    }
}

fn encode_agent<B: SatBackend>(
    solver: &mut B,
    vars: &VariableMap,
    d: &Mdd,
    a: AgentId,
    goal: VertexId,
) -> Result<(), SatError> {
    let horizon = d.horizon();
    let node = |v: VertexId, t: usize| vars.node(a, v, t).expect("diagram node has a variable");
    let edge = |u: VertexId, v: VertexId, t: usize| vars.edge(a, u, v, t).expect("diagram edge has a variable");

    solver.add_lits(&[node(d.root(), 0).pos()])?;
    solver.add_lits(&[node(goal, horizon).pos()])?;

    for t in 0..=horizon {
        let level: Vec<Lit> = d.level(t).iter().map(|&v| node(v, t).pos()).collect();
        at_most_one(solver, &level)?;
        if t == horizon {
            break;
        }
        for &u in d.level(t) {
            let x = node(u, t);
            let outs: Vec<Lit> = d.successors(t, u).map(|v| edge(u, v, t).pos()).collect();
            let mut leave = vec![x.neg()];
            leave.extend(&outs);
            solver.add_lits(&leave)?;
            at_most_one(solver, &outs)?;
            for v in d.successors(t, u) {
                let e = edge(u, v, t);
                solver.add_lits(&[e.neg(), x.pos()])?;
                solver.add_lits(&[e.neg(), node(v, t + 1).pos()])?;
            }
        }
    }

    let Some(&first) = vars.first_cost.get(a.index()) else {
        return Ok(());
    };
    for t in first..horizon {
        let c = vars.cost(a, t).expect("cost indicator in range");
        for &v in d.level(t) {
            if v != goal {
                solver.add_lits(&[node(v, t).neg(), c.pos()])?;
            }
        }
        let next = vars.cost(a, t + 1);
        if let Some(n) = next {
            solver.add_lits(&[n.neg(), c.pos()])?;
        }
        // at the goal and not counted afterwards means settled
        if let Some(g) = vars.node(a, goal, t) {
            let mut clause = vec![c.neg(), g.neg()];
            if let Some(n) = next {
                clause.push(n.pos());
            }
            solver.add_lits(&clause)?;
        }
    }
    Ok(())
}

fn encode_all_exclusions<B: SatBackend>(solver: &mut B, vars: &VariableMap, horizon: usize) -> Result<(), SatError> {
    for t in 0..=horizon {
        let mut occupants: BTreeMap<VertexId, Vec<Lit>> = BTreeMap::new();
        for levels in &vars.x {
            for &(v, var) in &levels[t] {
                occupants.entry(v).or_default().push(var.pos());
            }
        }
        for lits in occupants.values().filter(|l| l.len() > 1) {
            at_most_one(solver, lits)?;
        }
    }
    for t in 0..horizon {
        for (i, ei) in vars.e.iter().enumerate() {
            for &((u, v), var) in &ei[t] {
                if u == v {
                    continue;
                }
                for ej in &vars.e[i + 1..] {
                    let level = &ej[t];
                    if let Ok(k) = level.binary_search_by_key(&(v, u), |&(key, _)| key) {
                        solver.add_lits(&[var.neg(), level[k].1.neg()])?;
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{build_mdd, build_smdd};
    use crate::fixtures;
    use crate::instance::{validate_solution, MapfInstance};
    use crate::pathing::Planner;
    use crate::satif::{CdclSolver, Clause, NoInterrupt};

    fn full_model(inst: &MapfInstance, soc: usize, mode: ModelMode, conflicts: &ConflictSet) -> BooleanModel<CdclSolver> {
        let planner = Planner::new(inst);
        let xi = planner.shortest_costs().unwrap();
        let slack = soc - xi.iter().sum::<usize>();
        let mu = xi.iter().max().unwrap() + slack;
        let diagrams: Vec<Mdd> = inst
            .agent_ids()
            .map(|a| build_mdd(&planner, a, mu, xi[a.index()] + slack).unwrap())
            .collect();
        BooleanModel::build(CdclSolver::new(), &diagrams, &xi, conflicts, soc, mode).unwrap()
    }

    #[test]
    fn single_agent_counts() {
        let inst = fixtures::path_three();
        let mut m = full_model(&inst, 2, ModelMode::Incomplete, &ConflictSet::new(1));
        assert_eq!(m.variables().node_vars(), 3);
        assert_eq!(m.variables().edge_vars(), 2);
        assert_eq!(m.variables().cost_vars(), 0);
        let sol = m.solve(&NoInterrupt).unwrap().unwrap();
        assert_eq!(sol.paths()[0].positions(), &[VertexId(0), VertexId(1), VertexId(2)]);
    }

    #[test]
    fn forced_shared_vertex_is_unsat() {
        // both agents restricted to the single route through v01
        let a = Path::new(AgentId(0), vec![VertexId(0), VertexId(1), VertexId(3)]);
        let b = Path::new(AgentId(1), vec![VertexId(3), VertexId(1), VertexId(0)]);
        let diagrams = vec![
            build_smdd(AgentId(0), VertexId(3), &[a], 2).unwrap(),
            build_smdd(AgentId(1), VertexId(0), &[b], 2).unwrap(),
        ];
        let mut conflicts = ConflictSet::new(2);
        conflicts.record(&Collision::vertex(AgentId(0), AgentId(1), VertexId(1), 1));
        let mut m = BooleanModel::build(CdclSolver::new(), &diagrams, &[2, 2], &conflicts, 4, ModelMode::Incomplete).unwrap();
        assert_eq!(m.conflict_clause_count(), 1);
        assert_eq!(m.solve(&NoInterrupt).unwrap(), None);
    }

    #[test]
    fn complete_model_square() {
        let inst = fixtures::square_swap();
        let mut m = full_model(&inst, 4, ModelMode::Complete, &ConflictSet::new(2));
        let sol = m.solve(&NoInterrupt).unwrap().unwrap();
        assert!(validate_solution(&inst, &sol).is_empty());
        assert_eq!(sol.sum_of_costs(&inst).unwrap(), 4);
    }

    #[test]
    fn conflict_clause_shapes() {
        let inst = fixtures::square_swap();
        let mut m = full_model(&inst, 4, ModelMode::Incomplete, &ConflictSet::new(2));
        let before = m.num_vars();
        let v = Collision::vertex(AgentId(0), AgentId(1), VertexId(2), 1);
        assert_eq!(m.add_conflict_clauses(&[v]).unwrap(), 1);
        assert!(m.has_conflict_clause(&v));
        // v00 is not in agent 0's diagram at t = 2 (it cannot return in time)
        let absent = Collision::vertex(AgentId(0), AgentId(1), VertexId(0), 2);
        assert_eq!(m.add_conflict_clauses(&[absent]).unwrap(), 0);
        assert!(m.conflicts().contains(&absent));
        assert_eq!(m.num_vars(), before);

        let inst = fixtures::path_three();
        let two = MapfInstance::new(inst.graph().clone(), vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(0))]).unwrap();
        let mut m = full_model(&two, 2, ModelMode::Incomplete, &ConflictSet::new(2));
        let e = Collision::edge(AgentId(0), AgentId(1), VertexId(0), VertexId(1), 0);
        assert_eq!(m.add_conflict_clauses(&[e]).unwrap(), 1);
        assert_eq!(m.solve(&NoInterrupt).unwrap(), None);
    }

    #[test]
    fn start_equals_goal() {
        let g = crate::instance::Graph::new(1, []).unwrap();
        let inst = MapfInstance::new(g, vec![(VertexId(0), VertexId(0))]).unwrap();
        let mut m = full_model(&inst, 0, ModelMode::Incomplete, &ConflictSet::new(1));
        let sol = m.solve(&NoInterrupt).unwrap().unwrap();
        assert_eq!(sol.paths()[0].positions(), &[VertexId(0)]);
    }

    #[test]
    fn rejects_bad_bounds() {
        let inst = fixtures::path_three();
        let planner = Planner::new(&inst);
        let d = build_mdd(&planner, AgentId(0), 2, 2).unwrap();
        let err = BooleanModel::build(CdclSolver::new(), &[d], &[2], &ConflictSet::new(1), 1, ModelMode::Complete).unwrap_err();
        assert_eq!(err, EncodingError::NegativeSlack { soc: 1, lower: 2 });
    }

    /// Does some extension of `fixed` over the auxiliary variables satisfy
    /// every clause?
    fn extendable(num_vars: usize, clauses: &[Clause], fixed: &[bool]) -> bool {
        let free = num_vars - fixed.len();
        (0u32..1 << free).any(|bits| {
            let mut values = fixed.to_vec();
            values.extend((0..free).map(|i| bits >> i & 1 == 1));
            let a = Assignment::from_values(values);
            clauses.iter().all(|c| c.is_satisfied_by(&a))
        })
    }

    #[test]
    fn cardinality_exhaustive() {
        use crate::satif::ClauseLog;
        for n in 1..=5usize {
            for k in 0..=n {
                let mut log = ClauseLog::new(CdclSolver::new());
                let lits: Vec<Lit> = (0..n).map(|_| log.new_var().pos()).collect();
                cardinality_le(&mut log, &lits, k).unwrap();
                for mask in 0u32..1 << n {
                    let fixed: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                    let ok = extendable(log.num_vars(), log.clauses(), &fixed);
                    assert_eq!(ok, (mask.count_ones() as usize) <= k, "n={n} k={k} mask={mask:b}");
                }
            }
        }
    }

    #[test]
    fn cost_indicators_match_path_cost() {
        for (inst, soc) in [(fixtures::corridor_with_spur(), 8), (fixtures::square_swap(), 5), (fixtures::path_three(), 4)] {
            let xi = Planner::new(&inst).shortest_costs().unwrap();
            let mut m = full_model(&inst, soc, ModelMode::Complete, &ConflictSet::new(inst.agent_count()));
            let a = m.solve_assignment(&NoInterrupt).unwrap().unwrap();
            let sol = m.extract_solution(&a).unwrap();
            assert!(validate_solution(&inst, &sol).is_empty());
            let costs = sol.costs(&inst).unwrap();
            assert!(costs.iter().sum::<usize>() <= soc);
            for agent in inst.agent_ids() {
                assert_eq!(m.true_cost_indicators(agent, &a), costs[agent.index()] - xi[agent.index()]);
            }
        }
    }
}

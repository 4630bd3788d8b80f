use std::collections::BTreeSet;

use mapf_core::diagrams::{build_mdd, build_smdd, count_represented_paths};
use mapf_core::encoding::{BooleanModel, ModelMode};
use mapf_core::fixtures::{grid_instance, is_connected};
use mapf_core::instance::{path_cost, validate_solution, AgentId, Graph, MapfInstance, Path, VertexId};
use mapf_core::pathing::{bfs_distances, new_and_path, AgentConflicts, AndPath, ConflictEntry, ConflictSet, Planner};
use mapf_core::satif::{CdclSolver, NoInterrupt};
use mapf_core::solvers::{brute_force_oracle, solve, Algorithm, NoClock, SolveStatus, SolverConfig};
use proptest::prelude::*;

fn small_grid() -> impl Strategy<Value = MapfInstance> {
    (2u32..=4, 2u32..=4, 2usize..=3)
        .prop_flat_map(|(w, h, k)| {
            let cells = (w * h) as usize;
            (
                Just((w, h, k)),
                proptest::collection::vec(proptest::bool::weighted(0.8), cells),
                proptest::collection::vec(0usize..64, 2 * k),
            )
        })
        .prop_filter_map("disconnected or crowded", |((w, h, k), passable, picks)| {
            grid_instance(w, h, &passable, k, &picks)
        })
}

/// All walks of exactly `horizon` steps from `start`.
fn walks(graph: &Graph, start: VertexId, horizon: usize) -> Vec<Vec<VertexId>> {
    let mut out = vec![vec![start]];
    for _ in 0..horizon {
        out = out
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                std::iter::once(last)
                    .chain(graph.neighbors(last).iter().copied())
                    .map(move |n| {
                        let mut x = w.clone();
                        x.push(n);
                        x
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=6)
        .prop_flat_map(|n| {
            let pairs: Vec<(u32, u32)> = (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| (a, b))).collect();
            let m = pairs.len();
            (Just((n, pairs)), proptest::collection::vec(any::<bool>(), m))
        })
        .prop_map(|((n, pairs), keep)| {
            let edges: Vec<(u32, u32)> = pairs.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
            Graph::new(n, edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn every_solver_matches_the_oracle(inst in small_grid()) {
        let lower: usize = Planner::new(&inst).shortest_costs().unwrap().iter().sum();
        let oracle = brute_force_oracle(&inst, lower + 4).soc();
        prop_assume!(oracle.is_some());
        for algorithm in Algorithm::ALL {
            let config = SolverConfig { trace_diagrams: true, ..SolverConfig::with_algorithm(algorithm) };
            let out = solve(&inst, &config, &NoClock).unwrap();
            prop_assert_eq!(out.status, SolveStatus::Solved);
            prop_assert_eq!(out.soc, oracle, "{}", algorithm);
            prop_assert!(validate_solution(&inst, out.solution.as_ref().unwrap()).is_empty());
            for t in out.stats.diagram_traces.iter().filter(|t| !t.promoted) {
                prop_assert!(t.used_nodes <= t.full_nodes);
            }
        }
    }

    #[test]
    fn full_mdd_is_the_union_of_bounded_paths(
        graph in small_graph().prop_filter("connected", is_connected),
        s in 0usize..6, g in 0usize..6, horizon in 0usize..=5, extra in 0usize..=2,
    ) {
        let n = graph.vertex_count();
        let (start, goal) = (VertexId((s % n) as u32), VertexId((g % n) as u32));
        let inst = MapfInstance::new(graph.clone(), vec![(start, goal)]).unwrap();
        let planner = Planner::new(&inst);
        let xi = planner.shortest_cost(AgentId(0)).unwrap();
        let bound = xi + extra;
        let mut nodes = BTreeSet::new();
        let mut edges = BTreeSet::new();
        let mut count = 0u128;
        for w in walks(&graph, start, horizon) {
            let p = Path::new(AgentId(0), w.clone());
            if *w.last().unwrap() != goal || path_cost(&p, goal).unwrap() > bound {
                continue;
            }
            count += 1;
            for t in 0..=horizon {
                nodes.insert((t, w[t]));
                if t < horizon {
                    edges.insert((t, w[t], w[t + 1]));
                }
            }
        }
        match build_mdd(&planner, AgentId(0), horizon, bound) {
            Ok(mdd) => {
                prop_assert_eq!(mdd.nodes().collect::<BTreeSet<_>>(), nodes);
                prop_assert_eq!(mdd.edges().collect::<BTreeSet<_>>(), edges);
                prop_assert_eq!(count_represented_paths(&mdd), count);
            }
            Err(_) => prop_assert_eq!(count, 0),
        }
    }

    #[test]
    fn constrained_paths_respect_their_inputs(
        inst in small_grid(),
        raw in proptest::collection::vec((0u32..16, 0usize..6), 0..5),
        horizon in 0usize..8, bound in 0usize..8,
    ) {
        let planner = Planner::new(&inst);
        let a = AgentId(0);
        let n = inst.graph().vertex_count() as u32;
        let avoid = AgentConflicts::from_entries(raw.into_iter().map(|(v, t)| ConflictEntry::Vertex { v: VertexId(v % n), t }));
        let shortest = bfs_distances(inst.graph(), inst.start(a)).get(inst.goal(a)).unwrap();
        let free = planner.constrained_shortest_path(a, &AgentConflicts::new(), shortest, shortest).unwrap();
        prop_assert_eq!(free.cost(inst.goal(a)).unwrap(), shortest);
        if let Some(p) = planner.constrained_shortest_path(a, &avoid, horizon, bound) {
            p.check(inst.graph(), inst.start(a), inst.goal(a)).unwrap();
            prop_assert!(p.len() <= horizon);
            prop_assert!(p.cost(inst.goal(a)).unwrap() <= bound);
            prop_assert!(avoid.avoided_by(&p));
            let again = planner.constrained_shortest_path(a, &avoid, horizon, bound).unwrap();
            prop_assert_eq!(again, p);
        }
        if let AndPath::New(p) = new_and_path(&planner, a, &[], &avoid, horizon, bound) {
            prop_assert!(avoid.avoided_by(&p));
        }
    }

    #[test]
    fn smdd_represents_its_paths(inst in small_grid(), extra in 0usize..=2) {
        let planner = Planner::new(&inst);
        let a = AgentId(0);
        let xi = planner.shortest_cost(a).unwrap();
        let horizon = xi + extra;
        let full = build_mdd(&planner, a, horizon, horizon).unwrap();
        let mut paths = Vec::new();
        for w in walks(inst.graph(), inst.start(a), horizon).into_iter().step_by(7).take(5) {
            if *w.last().unwrap() == inst.goal(a) {
                paths.push(Path::new(a, w).trimmed());
            }
        }
        prop_assume!(!paths.is_empty());
        let smdd = build_smdd(a, inst.goal(a), &paths, horizon).unwrap();
        for p in &paths {
            prop_assert!(smdd.represents(p));
        }
        let distinct: BTreeSet<_> = paths.iter().collect();
        prop_assert!(count_represented_paths(&smdd) >= distinct.len() as u128);
        for node in smdd.nodes() {
            prop_assert!(full.contains(node.1, node.0));
        }
        for (t, u, v) in smdd.edges() {
            prop_assert!(full.contains_edge(t, u, v));
        }
    }

    #[test]
    fn incomplete_model_is_sat_when_a_plan_exists(inst in small_grid(), extra in 0usize..=1) {
        let planner = Planner::new(&inst);
        let xi = planner.shortest_costs().unwrap();
        let lower: usize = xi.iter().sum();
        let soc = lower + extra;
        let mu = xi.iter().max().unwrap() + extra;
        let oracle = brute_force_oracle(&inst, soc).soc();
        let diagrams: Vec<_> = inst.agent_ids().map(|a| build_mdd(&planner, a, mu, xi[a.index()] + extra).unwrap()).collect();
        let conflicts = ConflictSet::new(inst.agent_count());
        let mut m = BooleanModel::build(CdclSolver::new(), &diagrams, &xi, &conflicts, soc, ModelMode::Incomplete).unwrap();
        let answer = m.solve(&NoInterrupt).unwrap();
        if oracle.is_some() {
            prop_assert!(answer.is_some());
        }
        if let Some(sol) = answer {
            prop_assert!(sol.sum_of_costs(&inst).unwrap() <= soc);
            for (p, d) in sol.paths().iter().zip(&diagrams) {
                prop_assert!(d.represents(p));
            }
        }
    }
}

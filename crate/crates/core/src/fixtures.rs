//! Small reference instances used across tests, examples and the CLI.
//!
//! Vertex ids follow the order the vertices are listed in, so `v1` of the
//! path fixtures is `VertexId(0)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{AgentId, Graph, MapfInstance, Path, VertexId};

/// Path graph `v1 - v2 - v3` with one agent going `v1 -> v3`.
pub fn path_three() -> MapfInstance {
    let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    MapfInstance::new(g, vec![(VertexId(0), VertexId(2))]).unwrap()
}

/// 2x2 grid `v00 v01 / v10 v11` (ids 0..4 in that order), agents swapping
/// opposite corners: `v00 -> v11` and `v11 -> v00`.
pub fn square_swap() -> MapfInstance {
    let g = Graph::new(4, [(0, 1), (1, 3), (3, 2), (2, 0)]).unwrap();
    MapfInstance::new(g, vec![(VertexId(0), VertexId(3)), (VertexId(3), VertexId(0))]).unwrap()
}

/// Path `v1 - v2 - v3 - v4` with a spur `v5` on `v2`; agents swap the ends.
/// The spur is the only passing place.
pub fn corridor_with_spur() -> MapfInstance {
    let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (1, 4)]).unwrap();
    MapfInstance::new(g, vec![(VertexId(0), VertexId(3)), (VertexId(3), VertexId(0))]).unwrap()
}

/// Two agents swapping the ends of `v1 - v2 - v3`; unsolvable.
pub fn corridor_swap() -> MapfInstance {
    let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    MapfInstance::new(g, vec![(VertexId(0), VertexId(2)), (VertexId(2), VertexId(0))]).unwrap()
}

/// The two crossing paths `[v1,v2,v3,v4,v5]` and `[v1,v6,v3,v7,v5]` over a
/// seven vertex graph, together with that graph's single-agent instance.
pub fn crossing_paths() -> (MapfInstance, Vec<Path>) {
    let g = Graph::new(7, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 5), (5, 2), (2, 6), (6, 4)]).unwrap();
    let inst = MapfInstance::new(g, vec![(VertexId(0), VertexId(4))]).unwrap();
    let a = AgentId(0);
    let paths = vec![
        Path::new(a, [0, 1, 2, 3, 4].map(VertexId).to_vec()),
        Path::new(a, [0, 5, 2, 6, 4].map(VertexId).to_vec()),
    ];
    (inst, paths)
}

/// Whether every vertex is reachable from every other.
pub fn is_connected(graph: &Graph) -> bool {
    let n = graph.vertex_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![VertexId(0)];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &w in graph.neighbors(u) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Grid instance driven by externally drawn choices. `passable` is the
/// row-major cell mask; starts and then goals are drawn without replacement
/// from the passable vertices, `picks[i]` selecting among those still free.
/// `None` if the free cells are disconnected or too few.
pub fn grid_instance(width: u32, height: u32, passable: &[bool], agents: usize, picks: &[usize]) -> Option<MapfInstance> {
    let graph = Graph::from_grid(width, height, passable);
    let n = graph.vertex_count();
    if n < agents || !is_connected(&graph) || picks.len() < 2 * agents {
        return None;
    }
    let draw = |offset: usize| -> Vec<VertexId> {
        let mut pool: Vec<u32> = (0..n as u32).collect();
        (0..agents)
            .map(|i| VertexId(pool.remove(picks[offset + i] % pool.len())))
            .collect()
    };
    let starts = draw(0);
    let goals = draw(agents);
    MapfInstance::new(graph, starts.into_iter().zip(goals).collect()).ok()
}

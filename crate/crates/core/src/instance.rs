//! MAPF instances, paths and solutions, movingai `.map` / `.scen` parsing,
//! cost accounting and collision validation.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Dense vertex index into a [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Agent index; agents are numbered in instance order from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(u32),
    #[error("edge endpoint {0} is not a vertex")]
    UnknownVertex(u32),
}

/// Cell bookkeeping for graphs that came from a 4-connected grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayout {
    width: u32,
    height: u32,
    cells: Vec<Option<VertexId>>,
    coords: Vec<(u32, u32)>,
}

impl GridLayout {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Vertex of the passable cell at column `x`, row `y`.
    pub fn vertex_at(&self, x: u32, y: u32) -> Option<VertexId> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.cells[(y * self.width + x) as usize]
    }

    /// `(x, y)` of a vertex.
    pub fn coords(&self, v: VertexId) -> (u32, u32) {
        self.coords[v.index()]
    }

    pub fn is_passable(&self, x: u32, y: u32) -> bool {
        self.vertex_at(x, y).is_some()
    }
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    edge_count: usize,
    grid: Option<GridLayout>,
}

impl Graph {
    /// Builds a graph over vertices `0..vertex_count`. Duplicate edges are merged.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        let mut adjacency = alloc::vec![Vec::new(); vertex_count];
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for w in [u, v] {
                if w as usize >= vertex_count {
                    return Err(GraphError::UnknownVertex(w));
                }
            }
            adjacency[u as usize].push(VertexId(v));
            adjacency[v as usize].push(VertexId(u));
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Graph {
            adjacency,
            edge_count: edge_count / 2,
            grid: None,
        })
    }

    /// 4-connected grid graph; vertices are numbered in row-major order of
    /// the passable cells.
    pub fn from_grid(width: u32, height: u32, passable: &[bool]) -> Self {
        assert_eq!(passable.len(), (width * height) as usize);
        let mut cells = Vec::with_capacity(passable.len());
        let mut coords = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if passable[(y * width + x) as usize] {
                    cells.push(Some(VertexId(coords.len() as u32)));
                    coords.push((x, y));
                } else {
                    cells.push(None);
                }
            }
        }
        let layout = GridLayout {
            width,
            height,
            cells,
            coords,
        };
        let mut edges = Vec::new();
        for (i, &(x, y)) in layout.coords.iter().enumerate() {
            if let Some(r) = layout.vertex_at(x + 1, y) {
                edges.push((i as u32, r.0));
            }
            if let Some(d) = layout.vertex_at(x, y + 1) {
                edges.push((i as u32, d.0));
            }
        }
        let mut graph = Graph::new(layout.coords.len(), edges).expect("grid edges are well formed");
        graph.grid = Some(layout);
        graph
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.adjacency.len() as u32).map(VertexId)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.adjacency.len()
    }

    /// Sorted neighbours of `v` (excluding `v` itself).
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.index()]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.contains(u) && self.adjacency[u.index()].binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn grid(&self) -> Option<&GridLayout> {
        self.grid.as_ref()
    }

    /// Whether an agent may go from `u` to `v` in one step (move or wait).
    #[inline]
    pub fn is_step(&self, u: VertexId, v: VertexId) -> bool {
        u == v || self.has_edge(u, v)
    }
}

// ---------------------------------------------------------------------------
// movingai map format

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("map line {line}, column {column}: {kind}")]
pub struct MapParseError {
    pub line: usize,
    pub column: usize,
    pub kind: MapErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapErrorKind {
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("malformed header `{0}`")]
    BadHeader(String),
    #[error("expected {expected} map rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("expected row width {expected}, found {found}")]
    RowWidth { expected: usize, found: usize },
    #[error("unknown cell character {0:?}")]
    UnknownCell(char),
}

fn cell_passable(c: char) -> Option<bool> {
    match c {
        '.' | 'G' | 'S' => Some(true),
        '@' | 'O' | 'T' | 'W' => Some(false),
        _ => None,
    }
}

/// Parses a movingai `.map` file into a 4-connected grid graph.
pub fn parse_map(text: &str) -> Result<Graph, MapParseError> {
    let err = |line: usize, column: usize, kind| MapParseError { line, column, kind };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let mut height = None;
    let mut width = None;
    let mut saw_type = false;
    let mut last_line = 0;
    loop {
        let Some((no, line)) = lines.next() else {
            let missing = if !saw_type {
                "type"
            } else if height.is_none() {
                "height"
            } else if width.is_none() {
                "width"
            } else {
                "map"
            };
            return Err(err(last_line + 1, 1, MapErrorKind::MissingHeader(missing)));
        };
        last_line = no;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut words = trimmed.split_whitespace();
        let key = words.next().unwrap_or_default();
        let value = words.next();
        match (key, value) {
            ("type", Some(_)) if !saw_type => saw_type = true,
            ("height", Some(v)) => {
                height = Some(v.parse::<u32>().map_err(|_| err(no, 1, MapErrorKind::BadHeader(trimmed.to_string())))?)
            }
            ("width", Some(v)) => {
                width = Some(v.parse::<u32>().map_err(|_| err(no, 1, MapErrorKind::BadHeader(trimmed.to_string())))?)
            }
            ("map", None) => break,
            _ => return Err(err(no, 1, MapErrorKind::BadHeader(trimmed.to_string()))),
        }
        if words.next().is_some() {
            return Err(err(no, 1, MapErrorKind::BadHeader(trimmed.to_string())));
        }
    }
    if !saw_type {
        return Err(err(last_line, 1, MapErrorKind::MissingHeader("type")));
    }
    let height = height.ok_or_else(|| err(last_line, 1, MapErrorKind::MissingHeader("height")))?;
    let width = width.ok_or_else(|| err(last_line, 1, MapErrorKind::MissingHeader("width")))?;

    let mut passable = Vec::with_capacity((width * height) as usize);
    let mut rows = 0usize;
    for (no, line) in lines {
        if rows == height as usize {
            if line.trim().is_empty() {
                continue;
            }
            return Err(err(
                no,
                1,
                MapErrorKind::RowCount {
                    expected: height as usize,
                    found: rows + 1,
                },
            ));
        }
        let found = line.chars().count();
        if found != width as usize {
            return Err(err(
                no,
                found.min(width as usize) + 1,
                MapErrorKind::RowWidth {
                    expected: width as usize,
                    found,
                },
            ));
        }
        for (col, c) in line.chars().enumerate() {
            passable.push(cell_passable(c).ok_or_else(|| err(no, col + 1, MapErrorKind::UnknownCell(c)))?);
        }
        rows += 1;
        last_line = no;
    }
    if rows != height as usize {
        return Err(err(
            last_line + 1,
            1,
            MapErrorKind::RowCount {
                expected: height as usize,
                found: rows,
            },
        ));
    }
    Ok(Graph::from_grid(width, height, &passable))
}

/// Writes a grid graph back out in movingai format (`.` passable, `@`
/// blocked). `None` for graphs without grid layout.
pub fn render_map(graph: &Graph) -> Option<String> {
    use core::fmt::Write;
    let grid = graph.grid()?;
    let mut out = String::new();
    let _ = write!(out, "type octile\nheight {}\nwidth {}\nmap\n", grid.height, grid.width);
    for y in 0..grid.height {
        for x in 0..grid.width {
            out.push(if grid.is_passable(x, y) { '.' } else { '@' });
        }
        out.push('\n');
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// movingai scenario format

/// One line of a `.scen` file.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub bucket: u32,
    pub map_name: String,
    pub map_width: u32,
    pub map_height: u32,
    /// `(x, y)` of the start cell.
    pub start: (u32, u32),
    /// `(x, y)` of the goal cell.
    pub goal: (u32, u32),
    /// Advisory only; never used by the solvers.
    pub optimal_length: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("scenario line {line}: {kind}")]
pub struct ScenParseError {
    pub line: usize,
    pub kind: ScenErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenErrorKind {
    #[error("missing `version` line")]
    MissingVersion,
    #[error("unsupported version `{0}`")]
    UnsupportedVersion(String),
    #[error("expected 9 fields, found {0}")]
    FieldCount(usize),
    #[error("invalid {field} `{value}`")]
    BadNumber { field: &'static str, value: String },
}

/// Parses a movingai `.scen` file. Fields may be tab or space separated.
pub fn parse_scen(text: &str) -> Result<Vec<AgentSpec>, ScenParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let Some((no, first)) = lines.next() else {
        return Err(ScenParseError {
            line: 1,
            kind: ScenErrorKind::MissingVersion,
        });
    };
    let version = first.strip_prefix("version").ok_or(ScenParseError {
        line: no,
        kind: ScenErrorKind::MissingVersion,
    })?;
    let version = version.trim();
    if version != "1" && version != "1.0" {
        return Err(ScenParseError {
            line: no,
            kind: ScenErrorKind::UnsupportedVersion(version.to_string()),
        });
    }

    let mut specs = Vec::new();
    for (no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(ScenParseError {
                line: no,
                kind: ScenErrorKind::FieldCount(fields.len()),
            });
        }
        let num = |idx: usize, field: &'static str| -> Result<u32, ScenParseError> {
            fields[idx].parse().map_err(|_| ScenParseError {
                line: no,
                kind: ScenErrorKind::BadNumber {
                    field,
                    value: fields[idx].to_string(),
                },
            })
        };
        let optimal_length = fields[8].parse::<f64>().map_err(|_| ScenParseError {
            line: no,
            kind: ScenErrorKind::BadNumber {
                field: "optimal length",
                value: fields[8].to_string(),
            },
        })?;
        specs.push(AgentSpec {
            bucket: num(0, "bucket")?,
            map_name: fields[1].to_string(),
            map_width: num(2, "map width")?,
            map_height: num(3, "map height")?,
            start: (num(4, "start x")?, num(5, "start y")?),
            goal: (num(6, "goal x")?, num(7, "goal y")?),
            optimal_length,
        });
    }
    Ok(specs)
}

// ---------------------------------------------------------------------------
// instances

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("requested {requested} agents but only {available} are available")]
    TooFewSpecs { requested: usize, available: usize },
    #[error("graph has no grid layout to resolve cells against")]
    NoGridLayout,
    #[error("agent {agent}: cell ({x},{y}) is outside the map")]
    CellOutOfBounds { agent: usize, x: u32, y: u32 },
    #[error("agent {agent}: cell ({x},{y}) is blocked")]
    BlockedCell { agent: usize, x: u32, y: u32 },
    #[error("agent {agent}: vertex {vertex} is not in the graph")]
    UnknownVertex { agent: usize, vertex: VertexId },
    #[error("agents {first} and {second} share a start vertex")]
    DuplicateStart { first: usize, second: usize },
    #[error("agents {first} and {second} share a goal vertex")]
    DuplicateGoal { first: usize, second: usize },
    #[error("path of {agent} does not end at its goal")]
    PathMissesGoal { agent: AgentId },
    #[error("path of {agent} does not begin at its start")]
    PathMissesStart { agent: AgentId },
    #[error("path of {agent} jumps from {from} to {to} at t={time}")]
    NonAdjacentStep {
        agent: AgentId,
        from: VertexId,
        to: VertexId,
        time: usize,
    },
    #[error("solution has {found} paths for {expected} agents")]
    PathCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Agent {
    pub start: VertexId,
    pub goal: VertexId,
}

/// A graph plus one start and goal vertex per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapfInstance {
    graph: Graph,
    agents: Vec<Agent>,
}

impl MapfInstance {
    pub fn new(graph: Graph, agents: Vec<(VertexId, VertexId)>) -> Result<Self, InstanceError> {
        let mut starts = BTreeMap::new();
        let mut goals = BTreeMap::new();
        for (i, &(s, g)) in agents.iter().enumerate() {
            for v in [s, g] {
                if !graph.contains(v) {
                    return Err(InstanceError::UnknownVertex { agent: i, vertex: v });
                }
            }
            if let Some(&first) = starts.get(&s) {
                return Err(InstanceError::DuplicateStart { first, second: i });
            }
            if let Some(&first) = goals.get(&g) {
                return Err(InstanceError::DuplicateGoal { first, second: i });
            }
            starts.insert(s, i);
            goals.insert(g, i);
        }
        Ok(MapfInstance {
            graph,
            agents: agents.into_iter().map(|(start, goal)| Agent { start, goal }).collect(),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len() as u32).map(AgentId)
    }

    pub fn start(&self, agent: AgentId) -> VertexId {
        self.agents[agent.index()].start
    }

    pub fn goal(&self, agent: AgentId) -> VertexId {
        self.agents[agent.index()].goal
    }
}

/// Builds an instance from the first `n` scenario lines.
pub fn build_instance(graph: Graph, specs: &[AgentSpec], n: usize) -> Result<MapfInstance, InstanceError> {
    if n > specs.len() {
        return Err(InstanceError::TooFewSpecs {
            requested: n,
            available: specs.len(),
        });
    }
    let grid = graph.grid().ok_or(InstanceError::NoGridLayout)?;
    let resolve = |agent: usize, (x, y): (u32, u32)| {
        if x >= grid.width() || y >= grid.height() {
            return Err(InstanceError::CellOutOfBounds { agent, x, y });
        }
        grid.vertex_at(x, y).ok_or(InstanceError::BlockedCell { agent, x, y })
    };
    let agents = specs[..n]
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((resolve(i, s.start)?, resolve(i, s.goal)?)))
        .collect::<Result<Vec<_>, InstanceError>>()?;
    MapfInstance::new(graph, agents)
}

// ---------------------------------------------------------------------------
// paths and solutions

/// Vertex sequence of one agent, `positions[t]` being its location at time `t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    agent: AgentId,
    positions: Vec<VertexId>,
}

impl Path {
    /// # Panics
    /// On an empty position list.
    pub fn new(agent: AgentId, positions: Vec<VertexId>) -> Self {
        assert!(!positions.is_empty(), "a path has at least one position");
        Path { agent, positions }
    }

    pub fn agent(&self) -> AgentId {
        self.agent
    }

    pub fn positions(&self) -> &[VertexId] {
        &self.positions
    }

    /// Number of timesteps (`positions.len() - 1`).
    pub fn len(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.positions.len() == 1
    }

    /// Position at `t`, staying at the last vertex past the end.
    pub fn at(&self, t: usize) -> VertexId {
        self.positions[t.min(self.positions.len() - 1)]
    }

    pub fn first(&self) -> VertexId {
        self.positions[0]
    }

    pub fn last(&self) -> VertexId {
        self.positions[self.positions.len() - 1]
    }

    pub fn cost(&self, goal: VertexId) -> Result<usize, InstanceError> {
        path_cost(self, goal)
    }

    /// Extends with trailing waits up to `horizon` timesteps; longer paths are
    /// returned unchanged.
    pub fn padded(&self, horizon: usize) -> Path {
        let mut positions = self.positions.clone();
        let last = self.last();
        positions.resize(positions.len().max(horizon + 1), last);
        Path {
            agent: self.agent,
            positions,
        }
    }

    /// Drops trailing waits so the path ends on its final arrival.
    pub fn trimmed(&self) -> Path {
        let last = self.last();
        let keep = self.positions.iter().rposition(|&v| v != last).map_or(1, |i| i + 2);
        Path {
            agent: self.agent,
            positions: self.positions[..keep].to_vec(),
        }
    }

    /// Checks adjacency of every step, then the endpoints.
    pub fn check(&self, graph: &Graph, start: VertexId, goal: VertexId) -> Result<(), InstanceError> {
        if self.first() != start {
            return Err(InstanceError::PathMissesStart { agent: self.agent });
        }
        for (t, w) in self.positions.windows(2).enumerate() {
            if !graph.is_step(w[0], w[1]) {
                return Err(InstanceError::NonAdjacentStep {
                    agent: self.agent,
                    from: w[0],
                    to: w[1],
                    time: t,
                });
            }
        }
        if self.last() != goal {
            return Err(InstanceError::PathMissesGoal { agent: self.agent });
        }
        Ok(())
    }
}

/// Timesteps until the final arrival at `goal`; waiting at the goal after
/// that is free, while leaving it earlier is paid for.
pub fn path_cost(path: &Path, goal: VertexId) -> Result<usize, InstanceError> {
    if path.last() != goal {
        return Err(InstanceError::PathMissesGoal { agent: path.agent });
    }
    Ok(path.positions.iter().rposition(|&v| v != goal).map_or(0, |t| t + 1))
}

/// One path per agent, all padded to a common horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    paths: Vec<Path>,
}

impl Solution {
    /// Pads every path to the longest one. Paths must be given in agent order.
    pub fn new(paths: Vec<Path>) -> Self {
        let horizon = paths.iter().map(Path::len).max().unwrap_or(0);
        Solution {
            paths: paths.into_iter().map(|p| p.padded(horizon)).collect(),
        }
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn horizon(&self) -> usize {
        self.paths.first().map_or(0, Path::len)
    }

    /// Checks path count, adjacency and endpoints against `instance`.
    pub fn check(&self, instance: &MapfInstance) -> Result<(), InstanceError> {
        if self.paths.len() != instance.agent_count() {
            return Err(InstanceError::PathCount {
                expected: instance.agent_count(),
                found: self.paths.len(),
            });
        }
        for (path, agent) in self.paths.iter().zip(instance.agents()) {
            path.check(instance.graph(), agent.start, agent.goal)?;
        }
        Ok(())
    }

    pub fn costs(&self, instance: &MapfInstance) -> Result<Vec<usize>, InstanceError> {
        self.paths
            .iter()
            .zip(instance.agents())
            .map(|(p, a)| path_cost(p, a.goal))
            .collect()
    }

    pub fn sum_of_costs(&self, instance: &MapfInstance) -> Result<usize, InstanceError> {
        Ok(self.costs(instance)?.iter().sum())
    }

    /// Latest final arrival over all agents.
    pub fn makespan(&self, instance: &MapfInstance) -> Result<usize, InstanceError> {
        Ok(self.costs(instance)?.into_iter().max().unwrap_or(0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CollisionKind {
    /// Both agents occupy the vertex at `time`.
    Vertex(VertexId),
    /// `first` moves `u -> v` while `second` moves `v -> u` between `time`
    /// and `time + 1`.
    Edge(VertexId, VertexId),
}

/// A pairwise rule violation, `first < second`. Orders by time, then agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Collision {
    pub time: usize,
    pub first: AgentId,
    pub second: AgentId,
    pub kind: CollisionKind,
}

impl Collision {
    pub fn vertex(first: AgentId, second: AgentId, v: VertexId, time: usize) -> Self {
        Collision {
            time,
            first,
            second,
            kind: CollisionKind::Vertex(v),
        }
    }

    pub fn edge(first: AgentId, second: AgentId, from: VertexId, to: VertexId, time: usize) -> Self {
        Collision {
            time,
            first,
            second,
            kind: CollisionKind::Edge(from, to),
        }
    }
}

/// All vertex and swap collisions of `solution`, sorted and deduplicated.
pub fn validate_solution(_instance: &MapfInstance, solution: &Solution) -> Vec<Collision> {
    let paths = solution.paths();
    let horizon = paths.iter().map(Path::len).max().unwrap_or(0);
    let mut out = Vec::new();
    let mut occupants: BTreeMap<VertexId, Vec<AgentId>> = BTreeMap::new();
    for t in 0..=horizon {
        occupants.clear();
        for p in paths {
            occupants.entry(p.at(t)).or_default().push(p.agent());
        }
        for (&v, agents) in &occupants {
            for (i, &a) in agents.iter().enumerate() {
                for &b in &agents[i + 1..] {
                    let (first, second) = if a < b { (a, b) } else { (b, a) };
                    out.push(Collision::vertex(first, second, v, t));
                }
            }
        }
        if t == horizon {
            break;
        }
        // swaps: agent at u moving to v while the agent at v moves to u
        for p in paths {
            let (u, v) = (p.at(t), p.at(t + 1));
            if u == v {
                continue;
            }
            if let Some(others) = occupants.get(&v) {
                for &o in others {
                    let q = &paths.iter().find(|q| q.agent() == o).expect("occupant has a path");
                    if p.agent() < o && q.at(t + 1) == u {
                        out.push(Collision::edge(p.agent(), o, u, v, t));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn vs(ids: &[u32]) -> Vec<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn parse_small_maps() {
        let g = parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n.@\n").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
        let g = parse_map("type octile\nheight 1\nwidth 1\nmap\n.\n").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        let g = parse_map("type octile\nheight 1\nwidth 3\nmap\n...\n").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
        assert!(g.has_edge(VertexId(0), VertexId(1)) && g.has_edge(VertexId(1), VertexId(2)));
    }

    #[test]
    fn map_blocked_and_passable_chars() {
        let g = parse_map("type octile\nheight 1\nwidth 7\nmap\n.GS@OTW\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn map_errors_name_position() {
        let e = parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n.x\n").unwrap_err();
        assert_eq!((e.line, e.column), (6, 2));
        assert_eq!(e.kind, MapErrorKind::UnknownCell('x'));

        let e = parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n...\n").unwrap_err();
        assert_eq!(e.line, 6);
        assert!(matches!(e.kind, MapErrorKind::RowWidth { expected: 2, found: 3 }));

        let e = parse_map("type octile\nheight 3\nwidth 2\nmap\n..\n..\n").unwrap_err();
        assert!(matches!(e.kind, MapErrorKind::RowCount { expected: 3, found: 2 }));

        let e = parse_map("type octile\nheight two\nwidth 2\nmap\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(matches!(e.kind, MapErrorKind::BadHeader(_)));

        let e = parse_map("type octile\nwidth 2\n").unwrap_err();
        assert!(matches!(e.kind, MapErrorKind::MissingHeader(_)));
    }

    #[test]
    fn render_round_trips() {
        let text = "type octile\nheight 3\nwidth 4\nmap\n.@..\n....\n@@.@\n";
        let g = parse_map(text).unwrap();
        assert_eq!(render_map(&g).unwrap(), text);
    }

    #[test]
    fn scen_parsing() {
        let specs = parse_scen("version 1\n0\tm.map\t2\t2\t0\t0\t1\t0\t1\n").unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].start, (0, 0));
        assert_eq!(specs[0].goal, (1, 0));
        assert_eq!(specs[0].map_name, "m.map");

        assert!(parse_scen("version 1\n").unwrap().is_empty());

        let specs = parse_scen("version 1\n0 m.map 2 2 0 0 1 0 1\n0 m.map 2 2 1 1 0 1 1.5\n").unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[1].start, (1, 1));
        assert_eq!(specs[1].optimal_length, 1.5);
    }

    #[test]
    fn scen_errors() {
        let e = parse_scen("version 2\n").unwrap_err();
        assert!(matches!(e.kind, ScenErrorKind::UnsupportedVersion(_)));
        let e = parse_scen("0 m.map 2 2 0 0 1 0 1\n").unwrap_err();
        assert_eq!(e.kind, ScenErrorKind::MissingVersion);
        let e = parse_scen("version 1\n0 m.map 2 2 0 0 1 0\n").unwrap_err();
        assert_eq!((e.line, e.kind), (2, ScenErrorKind::FieldCount(8)));
        let e = parse_scen("version 1\n0 m.map 2 2 0 0 1 0 1\n0 m.map 2 2 a 0 1 0 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ScenErrorKind::BadNumber { field: "start x", .. }));
    }

    fn two_by_two() -> Graph {
        parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n..\n").unwrap()
    }

    fn spec(start: (u32, u32), goal: (u32, u32)) -> AgentSpec {
        AgentSpec {
            bucket: 0,
            map_name: "m.map".into(),
            map_width: 2,
            map_height: 2,
            start,
            goal,
            optimal_length: 0.0,
        }
    }

    #[test]
    fn build_instances() {
        let specs = vec![spec((0, 0), (1, 1)), spec((1, 1), (0, 0))];
        let inst = build_instance(two_by_two(), &specs, 2).unwrap();
        assert_eq!(inst.agent_count(), 2);
        assert_eq!(inst.start(AgentId(1)), VertexId(3));
        let inst = build_instance(two_by_two(), &specs, 1).unwrap();
        assert_eq!(inst.agent_count(), 1);

        let blocked = parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n.@\n").unwrap();
        let e = build_instance(blocked, &specs, 1).unwrap_err();
        assert_eq!(e, InstanceError::BlockedCell { agent: 0, x: 1, y: 1 });

        let dup = vec![spec((0, 0), (1, 1)), spec((0, 0), (1, 0))];
        assert!(matches!(
            build_instance(two_by_two(), &dup, 2),
            Err(InstanceError::DuplicateStart { first: 0, second: 1 })
        ));
        let dup = vec![spec((0, 0), (1, 1)), spec((1, 0), (1, 1))];
        assert!(matches!(build_instance(two_by_two(), &dup, 2), Err(InstanceError::DuplicateGoal { .. })));
        assert!(matches!(
            build_instance(two_by_two(), &specs, 3),
            Err(InstanceError::TooFewSpecs { .. })
        ));
        let far = vec![spec((5, 0), (1, 1))];
        assert!(matches!(
            build_instance(two_by_two(), &far, 1),
            Err(InstanceError::CellOutOfBounds { .. })
        ));
    }

    #[test]
    fn cost_examples() {
        let a = AgentId(0);
        assert_eq!(path_cost(&Path::new(a, vs(&[1, 2, 3, 3])), VertexId(3)), Ok(2));
        assert_eq!(path_cost(&Path::new(a, vs(&[3, 3])), VertexId(3)), Ok(0));
        assert_eq!(path_cost(&Path::new(a, vs(&[1, 2, 3, 2, 3])), VertexId(3)), Ok(4));
        assert!(path_cost(&Path::new(a, vs(&[1, 2])), VertexId(3)).is_err());
    }

    #[test]
    fn trim_and_pad() {
        let p = Path::new(AgentId(0), vs(&[1, 2, 3, 3, 3]));
        assert_eq!(p.trimmed().positions(), vs(&[1, 2, 3]).as_slice());
        assert_eq!(p.trimmed().padded(4), p);
        let still = Path::new(AgentId(0), vs(&[3, 3]));
        assert_eq!(still.trimmed().positions(), vs(&[3]).as_slice());
    }

    fn fix_b() -> MapfInstance {
        // v00=0, v01=1, v10=2, v11=3
        MapfInstance::new(two_by_two(), vec![(VertexId(0), VertexId(3)), (VertexId(3), VertexId(0))]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let inst = fix_b();
        let sol = Solution::new(vec![
            Path::new(AgentId(0), vs(&[0, 2, 3])),
            Path::new(AgentId(1), vs(&[3, 2, 0])),
        ]);
        assert_eq!(
            validate_solution(&inst, &sol),
            vec![Collision::vertex(AgentId(0), AgentId(1), VertexId(2), 1)]
        );

        let sol = Solution::new(vec![
            Path::new(AgentId(0), vs(&[0, 1, 3])),
            Path::new(AgentId(1), vs(&[3, 2, 0])),
        ]);
        assert!(validate_solution(&inst, &sol).is_empty());

        let line = Graph::new(2, [(0, 1)]).unwrap();
        let inst = MapfInstance::new(line, vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(0))]).unwrap();
        let sol = Solution::new(vec![
            Path::new(AgentId(0), vs(&[0, 1])),
            Path::new(AgentId(1), vs(&[1, 0])),
        ]);
        assert_eq!(
            validate_solution(&inst, &sol),
            vec![Collision::edge(AgentId(0), AgentId(1), VertexId(0), VertexId(1), 0)]
        );
    }

    #[test]
    fn collisions_after_arrival_are_reported() {
        // a0 parks on v1 at t=1, a1 passes through v1 at t=2
        let line = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let inst = MapfInstance::new(line, vec![(VertexId(0), VertexId(1)), (VertexId(2), VertexId(0))]).unwrap();
        let sol = Solution::new(vec![
            Path::new(AgentId(0), vs(&[0, 1])),
            Path::new(AgentId(1), vs(&[2, 2, 1, 0])),
        ]);
        assert_eq!(
            validate_solution(&inst, &sol),
            vec![Collision::vertex(AgentId(0), AgentId(1), VertexId(1), 2)]
        );
    }

    #[test]
    fn graph_rejects_bad_edges() {
        assert_eq!(Graph::new(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(Graph::new(2, [(0, 2)]), Err(GraphError::UnknownVertex(2)));
        let g = Graph::new(3, [(0, 1), (1, 0), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(2))]);
    }
}

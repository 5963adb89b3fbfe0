//! Graph rewrites for Pauli measurements on graph states.
//!
//! Graphs are tracked up to local Clifford equivalence, so each rule
//! implements one canonical outcome. The rules are used to show that cluster
//! states on the square-octagon, cross and star lattices reduce to a cluster
//! state on the honeycomb.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::GraphError;
use crate::lattice::{brick_shape, brick_wall, build_lattice, Boundary, Lattice, LatticeKind};

/// An undirected simple graph with stable vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: BTreeMap<u32, BTreeSet<u32>>,
}

impl SimpleGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Vertices `0..n` and the given edges; self-loops are ignored and
    /// repeated edges collapse.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Self {
        let mut g = SimpleGraph::new();
        for v in 0..n {
            g.add_vertex(v);
        }
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn from_lattice(lattice: &Lattice) -> Self {
        Self::from_edges(lattice.n_sites() as u32, lattice.edges())
    }

    pub fn add_vertex(&mut self, v: u32) {
        self.adj.entry(v).or_default();
    }

    /// Adds `a -- b`, creating missing endpoints. Self-loops are ignored.
    pub fn add_edge(&mut self, a: u32, b: u32) {
        if a == b {
            return;
        }
        self.adj.entry(a).or_default().insert(b);
        self.adj.entry(b).or_default().insert(a);
    }

    /// Flips the presence of edge `a -- b` between existing vertices.
    pub fn toggle_edge(&mut self, a: u32, b: u32) {
        if a == b {
            return;
        }
        let present = self.adj.get_mut(&a).is_some_and(|s| {
            if s.remove(&b) {
                true
            } else {
                s.insert(b);
                false
            }
        });
        if let Some(s) = self.adj.get_mut(&b) {
            if present {
                s.remove(&a);
            } else {
                s.insert(a);
            }
        }
    }

    /// Removes `v` and its edges; returns whether it existed.
    pub fn remove_vertex(&mut self, v: u32) -> bool {
        match self.adj.remove(&v) {
            Some(nb) => {
                for w in nb {
                    if let Some(s) = self.adj.get_mut(&w) {
                        s.remove(&v);
                    }
                }
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn neighbors(&self, v: u32) -> Result<&BTreeSet<u32>, GraphError> {
        self.adj.get(&v).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.adj.keys().copied()
    }

    /// Edges `(a, b)` with `a < b` in lexicographic order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        self.adj
            .iter()
            .flat_map(|(&a, s)| s.range(a + 1..).map(move |&b| (a, b)))
            .collect()
    }

    /// Copy with vertices renamed `0..n` in ascending id order, and the old
    /// id of each new vertex.
    pub fn compacted(&self) -> (SimpleGraph, Vec<u32>) {
        let old: Vec<u32> = self.vertices().collect();
        let index: BTreeMap<u32, u32> = old.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let edges: Vec<(u32, u32)> = self.edges().iter().map(|&(a, b)| (index[&a], index[&b])).collect();
        (SimpleGraph::from_edges(old.len() as u32, &edges), old)
    }

    /// Copy with every vertex `v` renamed `f(v)`; `f` must be injective.
    pub fn relabeled(&self, f: impl Fn(u32) -> u32) -> SimpleGraph {
        let mut g = SimpleGraph::new();
        for v in self.vertices() {
            g.add_vertex(f(v));
        }
        for (a, b) in self.edges() {
            g.add_edge(f(a), f(b));
        }
        g
    }

    fn local_complement_in_place(&mut self, v: u32) -> Result<(), GraphError> {
        let nb: Vec<u32> = self.neighbors(v)?.iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
        Ok(())
    }

    fn measure_in_place(&mut self, v: u32, basis: Pauli) -> Result<(), GraphError> {
        match basis {
            Pauli::Z => {}
            Pauli::Y => self.local_complement_in_place(v)?,
            Pauli::X => {
                let special = self.neighbors(v)?.iter().next().copied();
                if let Some(b) = special {
                    return self.measure_x_in_place(v, b);
                }
            }
        }
        if !self.remove_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        Ok(())
    }

    fn measure_x_in_place(&mut self, v: u32, special: u32) -> Result<(), GraphError> {
        if !self.neighbors(v)?.contains(&special) {
            return Err(GraphError::UnknownVertex(special));
        }
        self.local_complement_in_place(special)?;
        self.local_complement_in_place(v)?;
        self.remove_vertex(v);
        self.local_complement_in_place(special)
    }
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "graph with {} vertices and {} edges",
            self.n_vertices(),
            self.n_edges()
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Complements the edges among the neighbors of `v`.
pub fn local_complement(graph: &SimpleGraph, v: u32) -> Result<SimpleGraph, GraphError> {
    let mut g = graph.clone();
    g.local_complement_in_place(v)?;
    Ok(g)
}

/// Graph after measuring `v` in `basis` and removing it.
///
/// Z deletes `v`. Y complements the neighborhood of `v`, then deletes it. X
/// uses the lowest-id neighbor `b` of `v`: complement at `b`, apply the Y
/// rule at `v`, complement at `b` again. An isolated `v` is simply deleted.
pub fn measure_pauli(graph: &SimpleGraph, v: u32, basis: Pauli) -> Result<SimpleGraph, GraphError> {
    let mut g = graph.clone();
    g.measure_in_place(v, basis)?;
    Ok(g)
}

/// The X rule with an explicit special neighbor `special` of `v`.
pub fn measure_x_with(graph: &SimpleGraph, v: u32, special: u32) -> Result<SimpleGraph, GraphError> {
    let mut g = graph.clone();
    g.measure_x_in_place(v, special)?;
    Ok(g)
}

/// Removes every vertex of degree two while keeping the graph connected the
/// same way.
///
/// Two adjacent degree-2 vertices `v -- u` on a path `a -- v -- u -- c` are
/// removed together by an X measurement of `v` with `u` as special neighbor,
/// which leaves `u` pendant on `a` and toggles `a -- c`, followed by a Z
/// measurement of `u`. A degree-2 vertex whose neighbors both have other
/// degrees is removed by a Y measurement, which toggles the edge between its
/// neighbors. Each step removes vertices, so the loop terminates.
pub fn suppress_degree2(graph: &SimpleGraph) -> SimpleGraph {
    let mut g = graph.clone();
    let mut queue: BTreeSet<u32> = g.vertices().filter(|&v| g.degree(v) == 2).collect();
    while let Some(v) = queue.pop_first() {
        if g.degree(v) != 2 {
            continue;
        }
        let nb: Vec<u32> = g.adj[&v].iter().copied().collect();
        let partner = nb.iter().copied().find(|&u| g.degree(u) == 2);
        let touched: Vec<u32> = match partner {
            Some(u) => {
                let a = if nb[0] == u { nb[1] } else { nb[0] };
                let c = g.adj[&u].iter().copied().find(|&w| w != v);
                g.measure_x_in_place(v, u).expect("u is a neighbor of v");
                g.remove_vertex(u);
                let mut t = vec![a];
                t.extend(c);
                t
            }
            None => {
                g.measure_in_place(v, Pauli::Y).expect("v is present");
                nb
            }
        };
        for w in touched {
            if g.degree(w) == 2 {
                queue.insert(w);
            }
        }
    }
    g
}

/// Ordered single-qubit Pauli measurements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeasurementPattern {
    steps: Vec<(u32, Pauli)>,
}

impl MeasurementPattern {
    pub fn new(steps: Vec<(u32, Pauli)>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for &(v, _) in &steps {
            if !seen.insert(v) {
                return Err(GraphError::RepeatedVertex(v));
            }
        }
        Ok(MeasurementPattern { steps })
    }

    pub fn steps(&self) -> &[(u32, Pauli)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn apply(&self, graph: &SimpleGraph) -> Result<SimpleGraph, GraphError> {
        let mut g = graph.clone();
        for &(v, basis) in &self.steps {
            g.measure_in_place(v, basis)?;
        }
        Ok(g)
    }
}

/// Z pattern for the cross lattice, one bit per hexagon site `2k + s` for
/// base vertices whose vertical bond points up (first entry) or down. Both
/// remove the hexagon edge between ports 0 and 1, which leaves each hexagon a
/// path hanging off its third port.
pub const CROSS_Z_PATTERN: [u8; 2] = [0b000110, 0b000110];

/// Measurement pattern taking the cluster state on `lattice` to a honeycomb
/// with degree-2 decorations.
///
/// Square-octagon: Z on the top site of every plaquette with even
/// `cx + cy` and the bottom site of every odd one. Star: Y on the triangle
/// site bridged to the right-hand neighbor. Cross: Z on the hexagon sites
/// selected by [`CROSS_Z_PATTERN`].
pub fn honeycomb_pattern(lattice: &Lattice) -> Result<MeasurementPattern, GraphError> {
    let kind = match lattice.kind() {
        Some(k) if k != LatticeKind::Honeycomb => k,
        Some(k) => return Err(GraphError::NoReduction(k)),
        None => return Err(GraphError::UnknownVertex(0)),
    };
    let nx = lattice.n_columns();
    let mut steps = Vec::new();
    match kind {
        LatticeKind::SquareOctagon => {
            for cell in 0..lattice.n_sites() as u32 / 4 {
                let (cx, cy) = (cell % nx, cell / nx);
                let k = if (cx + cy) % 2 == 0 { 3 } else { 1 };
                steps.push((4 * cell + k, Pauli::Z));
            }
        }
        LatticeKind::Star => {
            for v in 0..lattice.n_sites() as u32 / 3 {
                // Ports are ordered counterclockwise from the +x axis.
                let k = if up_vertex(v, nx) { 2 } else { 0 };
                steps.push((3 * v + k, Pauli::Y));
            }
        }
        LatticeKind::Cross => {
            for v in 0..lattice.n_sites() as u32 / 6 {
                let bits = CROSS_Z_PATTERN[usize::from(!up_vertex(v, nx))];
                for j in 0..6 {
                    if bits >> j & 1 == 1 {
                        steps.push((6 * v + j, Pauli::Z));
                    }
                }
            }
        }
        LatticeKind::Honeycomb => unreachable!(),
    }
    MeasurementPattern::new(steps)
}

/// A brick-wall base vertex whose vertical bond points up.
fn up_vertex(v: u32, hx: u32) -> bool {
    (v % hx + v / hx).is_multiple_of(2)
}

/// Structural invariants of a candidate honeycomb torus.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HoneycombCheck {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub cubic: bool,
    pub connected: bool,
    pub bipartite: bool,
    /// Length of the shortest cycle, if any.
    pub girth: Option<u32>,
    /// Number of 6-cycles; `n/2` hexagonal faces on a large torus.
    pub hexagons: usize,
    /// Brick-wall shape `(hx, hy)` the graph is isomorphic to.
    pub shape: Option<(u32, u32)>,
}

impl HoneycombCheck {
    pub fn isomorphic(&self) -> bool {
        self.shape.is_some()
    }
}

/// Result of reducing a lattice cluster state toward the honeycomb.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub kind: LatticeKind,
    pub size: u32,
    pub pattern: MeasurementPattern,
    /// Graph after the pattern, before degree-2 suppression.
    pub measured: SimpleGraph,
    pub reduced: SimpleGraph,
    pub check: HoneycombCheck,
}

impl Reduction {
    pub fn isomorphic(&self) -> bool {
        self.check.isomorphic()
    }
}

/// Builds the torus lattice, applies its honeycomb pattern, suppresses
/// degree-2 vertices and tests the result against honeycomb tori.
pub fn reduce_to_honeycomb(kind: LatticeKind, size: u32) -> Result<Reduction, GraphError> {
    if kind == LatticeKind::Honeycomb {
        return Err(GraphError::NoReduction(kind));
    }
    let lattice = build_lattice(kind, size, Boundary::Torus)?;
    let pattern = honeycomb_pattern(&lattice)?;
    reduce_with_pattern(&lattice, pattern)
}

/// [`reduce_to_honeycomb`] with an explicit pattern.
pub fn reduce_with_pattern(lattice: &Lattice, pattern: MeasurementPattern) -> Result<Reduction, GraphError> {
    let kind = lattice.kind().ok_or(GraphError::UnknownVertex(0))?;
    let measured = pattern.apply(&SimpleGraph::from_lattice(lattice))?;
    let reduced = suppress_degree2(&measured);
    let check = check_honeycomb(&reduced);
    Ok(Reduction {
        kind,
        size: lattice.size(),
        pattern,
        measured,
        reduced,
        check,
    })
}

/// Computes the structural invariants and searches for an isomorphism to a
/// brick-wall honeycomb torus with the same number of vertices.
pub fn check_honeycomb(graph: &SimpleGraph) -> HoneycombCheck {
    let (g, _) = graph.compacted();
    let n = g.n_vertices();
    let adj: Vec<Vec<u32>> = (0..n as u32).map(|v| g.adj[&v].iter().copied().collect()).collect();
    let mut check = HoneycombCheck {
        n_vertices: n,
        n_edges: g.n_edges(),
        cubic: adj.iter().all(|a| a.len() == 3),
        ..Default::default()
    };
    let (connected, bipartite) = components_and_bipartite(&adj);
    check.connected = connected;
    check.bipartite = bipartite;
    check.girth = girth(&adj);
    check.hexagons = count_cycles6(&adj);
    if check.cubic && check.connected && n > 0 {
        let cells = n as u64;
        let mut hx = 4;
        while u64::from(hx) <= cells {
            if cells.is_multiple_of(u64::from(hx)) {
                let hy = (cells / u64::from(hx)) as u32;
                if hx % 2 == 0 && hy.is_multiple_of(2) && hy >= 2 && isomorphic_to_brick(&adj, hx, hy) {
                    check.shape = Some((hx, hy));
                    break;
                }
            }
            hx += 2;
        }
    }
    check
}

/// Brick-wall shape the honeycomb of `kind` at `size` is built on, if any.
pub fn base_shape(kind: LatticeKind, size: u32) -> Option<(u32, u32)> {
    let cells = u64::from(size) * u64::from(size) / u64::from(kind.sites_per_cell());
    brick_shape(kind, cells)
}

fn components_and_bipartite(adj: &[Vec<u32>]) -> (bool, bool) {
    let n = adj.len();
    let mut color = vec![u8::MAX; n];
    let mut components = 0;
    let mut bipartite = true;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        components += 1;
        color[s] = 0;
        queue.push_back(s as u32);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u as usize] {
                if color[w as usize] == u8::MAX {
                    color[w as usize] = 1 - color[u as usize];
                    queue.push_back(w);
                } else if color[w as usize] == color[u as usize] {
                    bipartite = false;
                }
            }
        }
    }
    (components <= 1, bipartite)
}

/// Shortest cycle length by breadth-first search from every vertex.
fn girth(adj: &[Vec<u32>]) -> Option<u32> {
    let n = adj.len();
    let mut best = u32::MAX;
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[s] = 0;
        parent[s] = u32::MAX;
        queue.clear();
        queue.push_back(s as u32);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u as usize] + 1 >= best {
                break;
            }
            for &w in &adj[u as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    parent[w as usize] = u;
                    queue.push_back(w);
                } else if parent[u as usize] != w {
                    best = best.min(dist[u as usize] + dist[w as usize] + 1);
                }
            }
        }
    }
    (best != u32::MAX).then_some(best)
}

/// Number of simple 6-cycles, each counted once.
fn count_cycles6(adj: &[Vec<u32>]) -> usize {
    // Count closed walks starting at their smallest vertex, in both
    // directions, then halve.
    fn extend(adj: &[Vec<u32>], start: u32, path: &mut Vec<u32>, count: &mut usize) {
        let last = *path.last().unwrap();
        for &w in &adj[last as usize] {
            if path.len() == 6 {
                if w == start {
                    *count += 1;
                }
            } else if w > start && !path.contains(&w) {
                path.push(w);
                extend(adj, start, path, count);
                path.pop();
            }
        }
    }
    let mut count = 0;
    let mut path = Vec::with_capacity(6);
    for s in 0..adj.len() as u32 {
        path.clear();
        path.push(s);
        extend(adj, s, &mut path, &mut count);
    }
    count / 2
}

/// Exact isomorphism test against the `hx × hy` brick wall.
fn isomorphic_to_brick(adj: &[Vec<u32>], hx: u32, hy: u32) -> bool {
    let brick = brick_wall(hx, hy);
    let n = adj.len();
    if brick.coords.len() != n {
        return false;
    }
    let mut badj = vec![Vec::with_capacity(3); n];
    for &(u, v, _) in &brick.edges {
        badj[u as usize].push(v);
        badj[v as usize].push(u);
    }
    if badj.iter().any(|a| a.len() != 3) {
        return false;
    }
    isomorphic(adj, &badj)
}

/// Isomorphism of two connected graphs of equal order and size, by
/// backtracking along a breadth-first order of the first.
fn isomorphic(a: &[Vec<u32>], b: &[Vec<u32>]) -> bool {
    let n = a.len();
    if b.len() != n {
        return false;
    }
    let ea: usize = a.iter().map(Vec::len).sum();
    let eb: usize = b.iter().map(Vec::len).sum();
    if ea != eb || n == 0 {
        return ea == eb;
    }
    // Breadth-first order of `a` with the parent of each vertex.
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![u32::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    order.push(0u32);
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        for &w in &a[u as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                parent[w as usize] = u;
                order.push(w);
            }
        }
        i += 1;
    }
    if order.len() != n {
        return false;
    }
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; n];
    for start in 0..n as u32 {
        if b[start as usize].len() != a[0].len() {
            continue;
        }
        map[0] = start;
        used[start as usize] = true;
        if extend_map(a, b, &order, &parent, 1, &mut map, &mut used) {
            return true;
        }
        used[start as usize] = false;
    }
    false
}

fn extend_map(
    a: &[Vec<u32>],
    b: &[Vec<u32>],
    order: &[u32],
    parent: &[u32],
    depth: usize,
    map: &mut [u32],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let pv = map[parent[v as usize] as usize];
    for &cand in &b[pv as usize] {
        if used[cand as usize] || b[cand as usize].len() != a[v as usize].len() {
            continue;
        }
        // Every already-mapped neighbor of v must map to a neighbor of cand,
        // and the number of mapped neighbors must agree on both sides.
        let mut ok = true;
        let mut mapped = 0;
        for &w in &a[v as usize] {
            let mw = map[w as usize];
            if mw != u32::MAX {
                mapped += 1;
                if !b[cand as usize].contains(&mw) {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || b[cand as usize].iter().filter(|&&x| used[x as usize]).count() != mapped {
            continue;
        }
        map[v as usize] = cand;
        used[cand as usize] = true;
        if extend_map(a, b, order, parent, depth + 1, map, used) {
            return true;
        }
        map[v as usize] = u32::MAX;
        used[cand as usize] = false;
    }
    false
}

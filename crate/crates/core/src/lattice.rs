//! The four trivalent Archimedean lattices, generated on rectilinear grids.
//!
//! Every lattice is built from a rectangular arrangement of cells so that
//! neighbor lookup is O(1) and site ids follow row-major cell order. The
//! honeycomb is laid out as a brick wall; the star (3,12²) and cross (4,6,12)
//! lattices are decorations of that brick wall in which each honeycomb vertex
//! is replaced by a triangle or a hexagon. The square-octagon (4,8²) lattice
//! is a square grid of diamond-shaped plaquettes.
//!
//! For a linear size `L` every kind has `N = L²` sites. The cell grid is the
//! factorization of the cell count whose physical aspect ratio is closest to
//! one.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::LatticeError;

/// Marker for "no triangle" in [`Lattice::triangle_of`].
pub const NO_TRIANGLE: u32 = u32::MAX;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeKind {
    /// (6³)
    Honeycomb,
    /// (4,8²)
    SquareOctagon,
    /// (4,6,12)
    Cross,
    /// (3,12²)
    Star,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 4] = [
        LatticeKind::Honeycomb,
        LatticeKind::SquareOctagon,
        LatticeKind::Cross,
        LatticeKind::Star,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Honeycomb => "honeycomb",
            LatticeKind::SquareOctagon => "square-octagon",
            LatticeKind::Cross => "cross",
            LatticeKind::Star => "star",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Smallest admissible step of `L`.
    pub fn size_step(self) -> u32 {
        match self {
            LatticeKind::Honeycomb | LatticeKind::SquareOctagon => 2,
            LatticeKind::Star => 6,
            LatticeKind::Cross => 12,
        }
    }

    /// Sites per rectangular cell of the generated grid.
    pub fn sites_per_cell(self) -> u32 {
        match self {
            // brick-wall rows are counted per honeycomb site
            LatticeKind::Honeycomb => 1,
            LatticeKind::SquareOctagon => 4,
            LatticeKind::Star => 3,
            LatticeKind::Cross => 6,
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Periodic in both directions.
    Torus,
    /// Periodic in y, open in x. Used for left-right spanning.
    Cylinder,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Torus => "torus",
            Boundary::Cylinder => "cylinder-open-x",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "torus" => Some(Boundary::Torus),
            "cylinder" | "cylinder-open-x" => Some(Boundary::Cylinder),
            _ => None,
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An undirected lattice graph with an embedding and boundary metadata.
///
/// Edges are stored as `(u, v)` pairs with a winding vector: the number of
/// times the straight segment from `u` to `v` crosses the periodic boundary in
/// x and y. Adjacency is kept in compressed-row form.
#[derive(Clone, Debug)]
pub struct Lattice {
    kind: Option<LatticeKind>,
    size: u32,
    boundary: Boundary,
    edges: Vec<(u32, u32)>,
    wrap: Vec<[i8; 2]>,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    incident: Vec<u32>,
    coords: Vec<[f64; 2]>,
    extent: [f64; 2],
    triangles: Vec<[u32; 3]>,
    triangle_of: Vec<u32>,
    column: Vec<u32>,
    n_columns: u32,
    left: Vec<u32>,
    right: Vec<u32>,
}

impl Lattice {
    pub fn kind(&self) -> Option<LatticeKind> {
        self.kind
    }

    /// The linear size `L` (zero for hand-built graphs).
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn n_sites(&self) -> usize {
        self.coords.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> (u32, u32) {
        self.edges[id as usize]
    }

    /// Winding of edge `id` traversed from its first to its second endpoint.
    pub fn edge_wrap(&self, id: u32) -> [i8; 2] {
        self.wrap[id as usize]
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.neighbors[lo..hi]
    }

    /// Edge ids incident on `v`, aligned with [`Lattice::neighbors`].
    #[inline]
    pub fn incident_edges(&self, v: u32) -> &[u32] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.incident[lo..hi]
    }

    pub fn degree(&self, v: u32) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    /// Size of the periodic box in embedding units.
    pub fn extent(&self) -> [f64; 2] {
        self.extent
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Index into [`Lattice::triangles`] of the triangle containing `v`, or
    /// [`NO_TRIANGLE`].
    #[inline]
    pub fn triangle_of(&self, v: u32) -> u32 {
        self.triangle_of[v as usize]
    }

    /// Grid column of each site; the open axis of a cylinder runs along it.
    pub fn column(&self, v: u32) -> u32 {
        self.column[v as usize]
    }

    pub fn n_columns(&self) -> u32 {
        self.n_columns
    }

    /// Sites in the leftmost grid column.
    pub fn left_boundary(&self) -> &[u32] {
        &self.left
    }

    /// Sites in the rightmost grid column.
    pub fn right_boundary(&self) -> &[u32] {
        &self.right
    }

    /// Builds a lattice from an explicit edge list, for small test graphs.
    ///
    /// Such a lattice has no kind, no embedding and no boundary columns.
    pub fn from_edges(n_sites: usize, edges: &[(u32, u32)], triangles: &[[u32; 3]]) -> Result<Self, LatticeError> {
        let mut b = Builder::new(None, 0, Boundary::Torus);
        for _ in 0..n_sites {
            b.vertex([0.0, 0.0], 0);
        }
        for &(u, v) in edges {
            if u as usize >= n_sites || v as usize >= n_sites {
                return Err(LatticeError::InvalidGraph("edge endpoint out of range"));
            }
            b.edge(u, v, [0, 0]);
        }
        b.triangles = triangles.to_vec();
        b.n_columns = 1;
        b.finish()
    }
}

/// Generates a lattice of the given kind with `N = L²` sites.
pub fn build_lattice(kind: LatticeKind, size: u32, boundary: Boundary) -> Result<Lattice, LatticeError> {
    if size == 0 || !size.is_multiple_of(kind.size_step()) {
        return Err(LatticeError::IncompatibleSize { kind, size });
    }
    let sites = u64::from(size) * u64::from(size);
    if sites > u64::from(u32::MAX / 4) {
        return Err(LatticeError::TooLarge { kind, size });
    }
    let cells = sites / u64::from(kind.sites_per_cell());
    match kind {
        LatticeKind::SquareOctagon => {
            let (nx, ny) = grid_shape(cells, 1.0, 2, 2, false).ok_or(LatticeError::TooSmall { kind, size })?;
            Ok(square_octagon(size, nx, ny, boundary))
        }
        LatticeKind::Honeycomb | LatticeKind::Star | LatticeKind::Cross => {
            let (hx, hy) = brick_shape(kind, cells).ok_or(LatticeError::TooSmall { kind, size })?;
            let base = brick_wall(hx, hy);
            Ok(match kind {
                LatticeKind::Honeycomb => base.into_lattice(kind, size, boundary),
                LatticeKind::Star => decorate_star(&base, size, boundary),
                _ => decorate_cross(&base, size, boundary),
            })
        }
    }
}

/// Finds the 3-cycles of the lattice graph, each as an ascending triple, in
/// ascending order. On a trivalent lattice of at least two cells per axis
/// these are exactly the triangular faces.
pub fn enumerate_triangles(lattice: &Lattice) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for u in 0..lattice.n_sites() as u32 {
        let nb = lattice.neighbors(u);
        for (i, &v) in nb.iter().enumerate() {
            for &w in &nb[i + 1..] {
                if v > u && w > u && lattice.neighbors(v).contains(&w) {
                    out.push([u, v.min(w), v.max(w)]);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Brick-wall grid underlying a honeycomb, star or cross lattice with
/// `cells` base vertices.
pub(crate) fn brick_shape(kind: LatticeKind, cells: u64) -> Option<(u32, u32)> {
    // Physical width of a brick-wall column over the height of a row.
    let ratio = (SQRT3 / 2.0) / 1.5;
    let min_rows = if kind == LatticeKind::Honeycomb { 4 } else { 2 };
    grid_shape(cells, ratio, 4, min_rows, true)
}

/// Picks `nx · ny = cells` with the aspect `nx·ratio / ny` closest to one.
fn grid_shape(cells: u64, ratio: f64, min_x: u64, min_y: u64, even: bool) -> Option<(u32, u32)> {
    let mut best: Option<(f64, u64, u64)> = None;
    let mut nx = 1;
    while nx <= cells {
        if cells.is_multiple_of(nx) {
            let ny = cells / nx;
            let ok = nx >= min_x && ny >= min_y && (!even || (nx % 2 == 0 && ny.is_multiple_of(2)));
            if ok {
                let score = libm::fabs(libm::log(nx as f64 * ratio / ny as f64));
                if best.is_none_or(|(s, _, _)| score < s - 1e-12) {
                    best = Some((score, nx, ny));
                }
            }
        }
        nx += 1;
    }
    best.map(|(_, x, y)| (x as u32, y as u32))
}

struct Builder {
    kind: Option<LatticeKind>,
    size: u32,
    boundary: Boundary,
    coords: Vec<[f64; 2]>,
    column: Vec<u32>,
    edges: Vec<(u32, u32)>,
    wrap: Vec<[i8; 2]>,
    triangles: Vec<[u32; 3]>,
    extent: [f64; 2],
    n_columns: u32,
}

impl Builder {
    fn new(kind: Option<LatticeKind>, size: u32, boundary: Boundary) -> Self {
        Builder {
            kind,
            size,
            boundary,
            coords: Vec::new(),
            column: Vec::new(),
            edges: Vec::new(),
            wrap: Vec::new(),
            triangles: Vec::new(),
            extent: [0.0, 0.0],
            n_columns: 0,
        }
    }

    fn vertex(&mut self, pos: [f64; 2], column: u32) -> u32 {
        self.coords.push(pos);
        self.column.push(column);
        (self.coords.len() - 1) as u32
    }

    /// Adds an edge unless it wraps across the open axis of a cylinder.
    fn edge(&mut self, u: u32, v: u32, wrap: [i8; 2]) {
        if self.boundary == Boundary::Cylinder && wrap[0] != 0 {
            return;
        }
        self.edges.push((u, v));
        self.wrap.push(wrap);
    }

    fn finish(self) -> Result<Lattice, LatticeError> {
        let n = self.coords.len();
        let mut degree = vec![0u32; n];
        for &(u, v) in &self.edges {
            if u == v {
                return Err(LatticeError::InvalidGraph("self-loop"));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill: Vec<u32> = offsets[..n].to_vec();
        let total = *offsets.last().unwrap() as usize;
        let mut neighbors = vec![0u32; total];
        let mut incident = vec![0u32; total];
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            for (a, b) in [(u, v), (v, u)] {
                let slot = fill[a as usize] as usize;
                neighbors[slot] = b;
                incident[slot] = id as u32;
                fill[a as usize] += 1;
            }
        }
        for v in 0..n {
            let s = &neighbors[offsets[v] as usize..offsets[v + 1] as usize];
            for i in 0..s.len() {
                if s[i + 1..].contains(&s[i]) {
                    return Err(LatticeError::InvalidGraph("parallel edges"));
                }
            }
        }
        let mut triangle_of = vec![NO_TRIANGLE; n];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if triangle_of[v as usize] != NO_TRIANGLE {
                    return Err(LatticeError::InvalidGraph("vertex in two triangles"));
                }
                triangle_of[v as usize] = t as u32;
            }
        }
        let last = self.n_columns.saturating_sub(1);
        let mut left = Vec::new();
        let mut right = Vec::new();
        if self.kind.is_some() {
            for (v, &c) in self.column.iter().enumerate() {
                if c == 0 {
                    left.push(v as u32);
                }
                if c == last {
                    right.push(v as u32);
                }
            }
        }
        Ok(Lattice {
            kind: self.kind,
            size: self.size,
            boundary: self.boundary,
            edges: self.edges,
            wrap: self.wrap,
            offsets,
            neighbors,
            incident,
            coords: self.coords,
            extent: self.extent,
            triangles: self.triangles,
            triangle_of,
            column: self.column,
            n_columns: self.n_columns,
            left,
            right,
        })
    }
}

fn square_octagon(size: u32, nx: u32, ny: u32, boundary: Boundary) -> Lattice {
    // Unit bond length: diamond half-diagonal h, cell pitch 2h + 1.
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let pitch = 2.0 * h + 1.0;
    let mut b = Builder::new(Some(LatticeKind::SquareOctagon), size, boundary);
    b.extent = [nx as f64 * pitch, ny as f64 * pitch];
    b.n_columns = nx;
    let site = |cx: u32, cy: u32, k: u32| (cy * nx + cx) * 4 + k;
    const W: u32 = 0;
    const S: u32 = 1;
    const E: u32 = 2;
    const N: u32 = 3;
    for cy in 0..ny {
        for cx in 0..nx {
            let x0 = (cx as f64 + 0.5) * pitch;
            let y0 = (cy as f64 + 0.5) * pitch;
            b.vertex([x0 - h, y0], cx);
            b.vertex([x0, y0 - h], cx);
            b.vertex([x0 + h, y0], cx);
            b.vertex([x0, y0 + h], cx);
        }
    }
    for cy in 0..ny {
        for cx in 0..nx {
            b.edge(site(cx, cy, W), site(cx, cy, S), [0, 0]);
            b.edge(site(cx, cy, S), site(cx, cy, E), [0, 0]);
            b.edge(site(cx, cy, E), site(cx, cy, N), [0, 0]);
            b.edge(site(cx, cy, N), site(cx, cy, W), [0, 0]);
            let (rx, wx) = if cx + 1 == nx { (0, 1) } else { (cx + 1, 0) };
            b.edge(site(cx, cy, E), site(rx, cy, W), [wx, 0]);
            let (uy, wy) = if cy + 1 == ny { (0, 1) } else { (cy + 1, 0) };
            b.edge(site(cx, cy, N), site(cx, uy, S), [0, wy]);
        }
    }
    b.finish().expect("square-octagon construction is simple")
}

/// A brick-wall honeycomb on the torus, kept as a template for decoration.
pub(crate) struct BrickWall {
    pub hx: u32,
    pub coords: Vec<[f64; 2]>,
    pub edges: Vec<(u32, u32, [i8; 2])>,
    pub extent: [f64; 2],
    /// Incident edges of each vertex in counterclockwise order.
    pub ports: Vec<[u32; 3]>,
}

/// Brick-wall honeycomb with `hx × hy` sites: horizontal bonds everywhere and
/// a vertical bond above every site with `x + y` even.
pub(crate) fn brick_wall(hx: u32, hy: u32) -> BrickWall {
    let n = (hx * hy) as usize;
    let half = SQRT3 / 2.0;
    let mut coords = Vec::with_capacity(n);
    for y in 0..hy {
        for x in 0..hx {
            let lift = if (x + y) % 2 == 0 { 0.25 } else { -0.25 };
            coords.push([x as f64 * half, 1.5 * y as f64 + lift]);
        }
    }
    let id = |x: u32, y: u32| y * hx + x;
    let mut edges = Vec::with_capacity(n * 3 / 2);
    for y in 0..hy {
        for x in 0..hx {
            let (rx, wx) = if x + 1 == hx { (0, 1) } else { (x + 1, 0) };
            edges.push((id(x, y), id(rx, y), [wx, 0]));
            if (x + y) % 2 == 0 {
                let (uy, wy) = if y + 1 == hy { (0, 1) } else { (y + 1, 0) };
                edges.push((id(x, y), id(x, uy), [0, wy]));
            }
        }
    }
    let extent = [hx as f64 * half, 1.5 * hy as f64];
    let mut incident: Vec<Vec<u32>> = vec![Vec::with_capacity(3); n];
    for (e, &(u, v, _)) in edges.iter().enumerate() {
        incident[u as usize].push(e as u32);
        incident[v as usize].push(e as u32);
    }
    let ports = incident
        .into_iter()
        .enumerate()
        .map(|(v, mut inc)| {
            let angle = |e: u32| {
                let d = bond_vector(&coords, &edges, extent, e, v as u32);
                let a = libm::atan2(d[1], d[0]);
                if a < 0.0 {
                    a + 2.0 * PI
                } else {
                    a
                }
            };
            inc.sort_by(|&a, &b| angle(a).partial_cmp(&angle(b)).unwrap());
            [inc[0], inc[1], inc[2]]
        })
        .collect();
    BrickWall {
        hx,
        coords,
        edges,
        extent,
        ports,
    }
}

/// Displacement along base edge `e` as seen from endpoint `from`.
fn bond_vector(coords: &[[f64; 2]], edges: &[(u32, u32, [i8; 2])], extent: [f64; 2], e: u32, from: u32) -> [f64; 2] {
    let (u, v, w) = edges[e as usize];
    let pu = coords[u as usize];
    let pv = coords[v as usize];
    let d = [
        pv[0] + f64::from(w[0]) * extent[0] - pu[0],
        pv[1] + f64::from(w[1]) * extent[1] - pu[1],
    ];
    if from == u {
        d
    } else {
        [-d[0], -d[1]]
    }
}

impl BrickWall {
    fn into_lattice(self, kind: LatticeKind, size: u32, boundary: Boundary) -> Lattice {
        let mut b = Builder::new(Some(kind), size, boundary);
        b.extent = self.extent;
        b.n_columns = self.hx;
        for (v, &p) in self.coords.iter().enumerate() {
            b.vertex(p, v as u32 % self.hx);
        }
        for &(u, v, w) in &self.edges {
            b.edge(u, v, w);
        }
        b.finish().expect("brick wall is simple")
    }

    fn port_of(&self, v: u32, e: u32) -> u32 {
        self.ports[v as usize]
            .iter()
            .position(|&p| p == e)
            .expect("edge incident on vertex") as u32
    }

    fn port_direction(&self, v: u32, port: u32) -> f64 {
        let e = self.ports[v as usize][port as usize];
        let d = bond_vector(&self.coords, &self.edges, self.extent, e, v);
        libm::atan2(d[1], d[0])
    }

    /// Base edges in generation order, grouped by their first endpoint.
    fn edges_from(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.coords.len()];
        for (e, &(u, _, _)) in self.edges.iter().enumerate() {
            out[u as usize].push(e as u32);
        }
        out
    }
}

fn decorate_star(base: &BrickWall, size: u32, boundary: Boundary) -> Lattice {
    // Equal bond lengths: triangle circumradius r with r·√3 = 1 − 2r.
    let r = 1.0 / (2.0 + SQRT3);
    let mut b = Builder::new(Some(LatticeKind::Star), size, boundary);
    b.extent = base.extent;
    b.n_columns = base.hx;
    for (v, p) in base.coords.iter().enumerate() {
        for k in 0..3 {
            let a = base.port_direction(v as u32, k);
            b.vertex([p[0] + r * libm::cos(a), p[1] + r * libm::sin(a)], v as u32 % base.hx);
        }
    }
    let from = base.edges_from();
    for v in 0..base.coords.len() as u32 {
        let t = [3 * v, 3 * v + 1, 3 * v + 2];
        b.edge(t[0], t[1], [0, 0]);
        b.edge(t[1], t[2], [0, 0]);
        b.edge(t[2], t[0], [0, 0]);
        b.triangles.push(t);
        for &e in &from[v as usize] {
            let (u, w, wrap) = base.edges[e as usize];
            b.edge(3 * u + base.port_of(u, e), 3 * w + base.port_of(w, e), wrap);
        }
    }
    b.finish().expect("star decoration is simple")
}

fn decorate_cross(base: &BrickWall, size: u32, boundary: Boundary) -> Lattice {
    // Equal bond lengths: hexagon circumradius r with r = 1 − r·√3.
    let r = 1.0 / (1.0 + SQRT3);
    let tilt = PI / 6.0;
    let mut b = Builder::new(Some(LatticeKind::Cross), size, boundary);
    b.extent = base.extent;
    b.n_columns = base.hx;
    // Sub-site 2k sits clockwise of port k, 2k + 1 counterclockwise of it.
    for (v, p) in base.coords.iter().enumerate() {
        for k in 0..3 {
            let a = base.port_direction(v as u32, k);
            for s in [-tilt, tilt] {
                b.vertex(
                    [p[0] + r * libm::cos(a + s), p[1] + r * libm::sin(a + s)],
                    v as u32 % base.hx,
                );
            }
        }
    }
    let from = base.edges_from();
    for v in 0..base.coords.len() as u32 {
        let h = 6 * v;
        for i in 0..6 {
            b.edge(h + i, h + (i + 1) % 6, [0, 0]);
        }
        for &e in &from[v as usize] {
            let (u, w, wrap) = base.edges[e as usize];
            let pu = 6 * u + 2 * base.port_of(u, e);
            let pw = 6 * w + 2 * base.port_of(w, e);
            b.edge(pu, pw + 1, wrap);
            b.edge(pu + 1, pw, wrap);
        }
    }
    b.finish().expect("cross decoration is simple")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honeycomb_l4_torus_is_cubic() {
        let lat = build_lattice(LatticeKind::Honeycomb, 4, Boundary::Torus).unwrap();
        assert_eq!(lat.n_sites(), 16);
        assert_eq!(lat.n_edges(), 24);
        assert!((0..16).all(|v| lat.degree(v) == 3));
        assert!(enumerate_triangles(&lat).is_empty());
    }

    #[test]
    fn star_l6_triangles_partition_sites() {
        let lat = build_lattice(LatticeKind::Star, 6, Boundary::Torus).unwrap();
        assert_eq!(lat.n_sites(), 36);
        let tris = enumerate_triangles(&lat);
        assert_eq!(tris.len(), 12);
        let mut seen = vec![false; 36];
        for t in &tris {
            for &v in t {
                assert!(!seen[v as usize]);
                seen[v as usize] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn sizes_follow_l_squared() {
        for (kind, l) in [
            (LatticeKind::Honeycomb, 20),
            (LatticeKind::SquareOctagon, 20),
            (LatticeKind::Cross, 24),
            (LatticeKind::Star, 12),
        ] {
            for bc in [Boundary::Torus, Boundary::Cylinder] {
                let lat = build_lattice(kind, l, bc).unwrap();
                assert_eq!(lat.n_sites(), (l * l) as usize, "{kind} {l}");
            }
        }
    }

    #[test]
    fn incompatible_sizes_are_rejected() {
        assert!(matches!(
            build_lattice(LatticeKind::Honeycomb, 5, Boundary::Torus),
            Err(LatticeError::IncompatibleSize { .. })
        ));
        assert!(matches!(
            build_lattice(LatticeKind::Cross, 18, Boundary::Torus),
            Err(LatticeError::IncompatibleSize { .. })
        ));
        assert!(matches!(
            build_lattice(LatticeKind::SquareOctagon, 2, Boundary::Torus),
            Err(LatticeError::TooSmall { .. })
        ));
        assert!(build_lattice(LatticeKind::Star, 0, Boundary::Torus).is_err());
    }

    #[test]
    fn cylinder_only_thins_boundary_columns() {
        for kind in LatticeKind::ALL {
            let l = kind.size_step() * if kind == LatticeKind::Cross { 2 } else { 4 };
            let lat = build_lattice(kind, l, Boundary::Cylinder).unwrap();
            let last = lat.n_columns() - 1;
            for v in 0..lat.n_sites() as u32 {
                if lat.degree(v) < 3 {
                    let c = lat.column(v);
                    assert!(c == 0 || c == last, "{kind}: site {v} in column {c}");
                }
            }
            assert!(!lat.left_boundary().is_empty());
            assert!(!lat.right_boundary().is_empty());
        }
    }

    #[test]
    fn from_edges_rejects_bad_graphs() {
        assert!(Lattice::from_edges(2, &[(0, 0)], &[]).is_err());
        assert!(Lattice::from_edges(2, &[(0, 1), (1, 0)], &[]).is_err());
        assert!(Lattice::from_edges(2, &[(0, 2)], &[]).is_err());
    }
}

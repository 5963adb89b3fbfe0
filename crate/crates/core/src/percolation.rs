//! Spanning clusters and random deletion on domain graphs.
//!
//! Deletion uses coupled randomness: every vertex (site mode) or edge (bond
//! mode) of a graph draws one uniform `u`, and it is deleted at deletion
//! probability `p` iff `u < p`. Spanning is monotone in `p`, so one trial is
//! summarized by its critical value `p_c`, the largest `p` at which the graph
//! still spans. It is found by inserting elements in decreasing `u` and
//! stopping at the first insertion that connects the two sides. A whole
//! curve then costs one sort per trial, and any grid can be evaluated
//! afterwards.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::domain::{build_domain_graph, DomainGraph, DomainPartition};
use crate::error::PercolationError;
use crate::lattice::{Boundary, Lattice};
use crate::sampler::PovmConfig;
use crate::stats::{mean, variance};

/// `p_c` of a trial that never spans, even with nothing deleted.
pub const NEVER_SPANS: f64 = -1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeletionMode {
    Site,
    Bond,
}

impl DeletionMode {
    pub fn name(self) -> &'static str {
        match self {
            DeletionMode::Site => "site",
            DeletionMode::Bond => "bond",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "site" => Some(DeletionMode::Site),
            "bond" => Some(DeletionMode::Bond),
            _ => None,
        }
    }
}

impl fmt::Display for DeletionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What counts as percolating.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpanRule {
    /// A cluster touches both the left and right boundary columns of a
    /// cylinder.
    Cylinder,
    /// A cluster wraps around the periodic x direction of a torus.
    WrapX,
}

impl SpanRule {
    pub fn name(self) -> &'static str {
        match self {
            SpanRule::Cylinder => "cylinder",
            SpanRule::WrapX => "wrap-x",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "cylinder" => Some(SpanRule::Cylinder),
            "wrap-x" => Some(SpanRule::WrapX),
            _ => None,
        }
    }
}

const LEFT: u8 = 1;
const RIGHT: u8 = 2;

/// A domain graph prepared for spanning queries.
///
/// Under [`SpanRule::Cylinder`] each vertex carries flags for the boundary
/// columns it touches. Under [`SpanRule::WrapX`] each edge carries the x
/// winding between the reference sites of its endpoints and a vertex may
/// wrap on its own.
#[derive(Clone, Debug)]
pub struct SpanGraph {
    rule: SpanRule,
    edges: Vec<(u32, u32)>,
    shift: Vec<i32>,
    flags: Vec<u8>,
    self_span: Vec<bool>,
    offsets: Vec<u32>,
    adj: Vec<(u32, u32)>,
}

impl SpanGraph {
    pub fn new(graph: &DomainGraph, lattice: &Lattice, rule: SpanRule) -> Result<Self, PercolationError> {
        let n = graph.n_vertices();
        if graph.domain_of().len() != lattice.n_sites() || graph.witness().len() != graph.n_edges() {
            return Err(PercolationError::ProvenanceMismatch);
        }
        let dom = graph.domain_of();
        for (&(a, b), &e) in graph.edges().iter().zip(graph.witness()) {
            if e as usize >= lattice.n_edges() {
                return Err(PercolationError::ProvenanceMismatch);
            }
            let (u, v) = lattice.edge(e);
            let (du, dv) = (dom[u as usize], dom[v as usize]);
            if (du, dv) != (a, b) && (dv, du) != (a, b) {
                return Err(PercolationError::ProvenanceMismatch);
            }
        }
        let mut flags = vec![0u8; n];
        let mut self_span = vec![false; n];
        let mut shift = vec![0i32; graph.n_edges()];
        match rule {
            SpanRule::Cylinder => {
                if lattice.boundary() != Boundary::Cylinder
                    || lattice.left_boundary().is_empty()
                    || lattice.right_boundary().is_empty()
                {
                    return Err(PercolationError::MissingBoundary);
                }
                for &s in lattice.left_boundary() {
                    flags[dom[s as usize] as usize] |= LEFT;
                }
                for &s in lattice.right_boundary() {
                    flags[dom[s as usize] as usize] |= RIGHT;
                }
                for d in 0..n {
                    self_span[d] = flags[d] == LEFT | RIGHT;
                }
            }
            SpanRule::WrapX => {
                let off = site_windings(graph, lattice, &mut self_span);
                for (i, (&(a, _), &e)) in graph.edges().iter().zip(graph.witness()).enumerate() {
                    let (u, v) = lattice.edge(e);
                    let s = off[u as usize] + i32::from(lattice.edge_wrap(e)[0]) - off[v as usize];
                    shift[i] = if dom[u as usize] == a { s } else { -s };
                }
            }
        }
        Ok(Self::assemble(rule, graph.edges().to_vec(), shift, flags, self_span))
    }

    fn assemble(rule: SpanRule, edges: Vec<(u32, u32)>, shift: Vec<i32>, flags: Vec<u8>, self_span: Vec<bool>) -> Self {
        let n = flags.len();
        let mut offsets = vec![0u32; n + 1];
        for &(a, b) in &edges {
            offsets[a as usize + 1] += 1;
            offsets[b as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0, 0); 2 * edges.len()];
        for (e, &(a, b)) in edges.iter().enumerate() {
            adj[fill[a as usize] as usize] = (b, e as u32);
            fill[a as usize] += 1;
            adj[fill[b as usize] as usize] = (a, e as u32);
            fill[b as usize] += 1;
        }
        SpanGraph {
            rule,
            edges,
            shift,
            flags,
            self_span,
            offsets,
            adj,
        }
    }

    pub fn rule(&self) -> SpanRule {
        self.rule
    }

    pub fn n_vertices(&self) -> usize {
        self.flags.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of deletable elements in `mode`.
    pub fn n_elements(&self, mode: DeletionMode) -> usize {
        match mode {
            DeletionMode::Site => self.n_vertices(),
            DeletionMode::Bond => self.n_edges(),
        }
    }

    fn neighbors(&self, v: u32) -> &[(u32, u32)] {
        &self.adj[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    /// Whether the graph spans with the given vertices and edges present.
    pub fn spans_with(&self, vertex_alive: &[bool], edge_alive: &[bool]) -> bool {
        let mut c = Connector::new(self);
        if vertex_alive
            .iter()
            .zip(&self.self_span)
            .any(|(&alive, &own)| alive && own)
        {
            return true;
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if edge_alive[e] && vertex_alive[a as usize] && vertex_alive[b as usize] && c.link(self, e) {
                return true;
            }
        }
        false
    }

    /// Whether the undeleted graph spans.
    pub fn spans(&self) -> bool {
        self.spans_with(&vec![true; self.n_vertices()], &vec![true; self.n_edges()])
    }

    /// Whether one trial with uniforms `u` spans at deletion probability `p`.
    pub fn spans_after_deletion(&self, mode: DeletionMode, u: &[f64], p: f64) -> bool {
        match mode {
            DeletionMode::Site => {
                let alive: Vec<bool> = u.iter().map(|&x| x >= p).collect();
                self.spans_with(&alive, &vec![true; self.n_edges()])
            }
            DeletionMode::Bond => {
                let alive: Vec<bool> = u.iter().map(|&x| x >= p).collect();
                self.spans_with(&vec![true; self.n_vertices()], &alive)
            }
        }
    }

    /// Largest deletion probability at which the trial with uniforms `u`
    /// still spans, or [`NEVER_SPANS`].
    pub fn critical_deletion(&self, mode: DeletionMode, u: &[f64]) -> f64 {
        let mut order: Vec<u32> = (0..u.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| u[b as usize].total_cmp(&u[a as usize]));
        let mut c = Connector::new(self);
        match mode {
            DeletionMode::Site => {
                let mut present = vec![false; self.n_vertices()];
                for &v in &order {
                    if self.self_span[v as usize] {
                        return u[v as usize];
                    }
                    present[v as usize] = true;
                    for &(w, e) in self.neighbors(v) {
                        if present[w as usize] && c.link(self, e as usize) {
                            return u[v as usize];
                        }
                    }
                }
            }
            DeletionMode::Bond => {
                if self.self_span.iter().any(|&s| s) {
                    return 1.0;
                }
                for &e in &order {
                    if c.link(self, e as usize) {
                        return u[e as usize];
                    }
                }
            }
        }
        NEVER_SPANS
    }

    /// Draws one trial's uniforms and returns its critical value.
    pub fn trial<R: Rng + ?Sized>(&self, mode: DeletionMode, rng: &mut R, scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend((0..self.n_elements(mode)).map(|_| rng.random::<f64>()));
        self.critical_deletion(mode, scratch)
    }
}

/// Union-find over graph vertices tracking boundary flags and the x winding
/// of each vertex relative to its root.
struct Connector {
    parent: Vec<u32>,
    size: Vec<u32>,
    pot: Vec<i32>,
    flags: Vec<u8>,
}

impl Connector {
    fn new(g: &SpanGraph) -> Self {
        let n = g.n_vertices();
        Connector {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            pot: vec![0; n],
            flags: g.flags.clone(),
        }
    }

    /// Root of `v` and the winding of `v` relative to it.
    fn find(&mut self, v: u32) -> (u32, i32) {
        let mut root = v;
        let mut total = 0;
        while self.parent[root as usize] != root {
            total += self.pot[root as usize];
            root = self.parent[root as usize];
        }
        let mut cur = v;
        let mut acc = total;
        while self.parent[cur as usize] != root && cur != root {
            let next = self.parent[cur as usize];
            let step = self.pot[cur as usize];
            self.parent[cur as usize] = root;
            self.pot[cur as usize] = acc;
            acc -= step;
            cur = next;
        }
        (root, total)
    }

    /// Adds edge `e`; true iff this creates a spanning cluster.
    fn link(&mut self, g: &SpanGraph, e: usize) -> bool {
        let (a, b) = g.edges[e];
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        // Winding of b relative to a along the edge.
        let s = g.shift[e];
        if ra == rb {
            return g.rule == SpanRule::WrapX && pb - pa != s;
        }
        let (big, small, d) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb, pa + s - pb)
        } else {
            (rb, ra, pb - s - pa)
        };
        self.parent[small as usize] = big;
        self.pot[small as usize] = d;
        self.size[big as usize] += self.size[small as usize];
        self.flags[big as usize] |= self.flags[small as usize];
        g.rule == SpanRule::Cylinder && self.flags[big as usize] == LEFT | RIGHT
    }
}

/// x winding of every site relative to the first site of its domain.
/// Domains that reach themselves with nonzero winding are marked in
/// `self_span`.
fn site_windings(graph: &DomainGraph, lattice: &Lattice, self_span: &mut [bool]) -> Vec<i32> {
    let dom = graph.domain_of();
    let n = lattice.n_sites();
    let mut off = vec![0i32; n];
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    for start in 0..n as u32 {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        stack.push(start);
        while let Some(u) = stack.pop() {
            let d = dom[u as usize];
            for (&v, &e) in lattice.neighbors(u).iter().zip(lattice.incident_edges(u)) {
                if dom[v as usize] != d {
                    continue;
                }
                let (a, _) = lattice.edge(e);
                let w = i32::from(lattice.edge_wrap(e)[0]);
                let step = if a == u { w } else { -w };
                let expect = off[u as usize] + step;
                if seen[v as usize] {
                    if off[v as usize] != expect {
                        self_span[d as usize] = true;
                    }
                } else {
                    seen[v as usize] = true;
                    off[v as usize] = expect;
                    stack.push(v);
                }
            }
        }
    }
    off
}

/// Whether some connected component of `graph` joins the left and right
/// boundary columns of a cylinder lattice.
pub fn spans(graph: &DomainGraph, lattice: &Lattice) -> Result<bool, PercolationError> {
    Ok(SpanGraph::new(graph, lattice, SpanRule::Cylinder)?.spans())
}

/// Critical deletion values of many trials, grouped by source graph.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSet {
    pub mode: DeletionMode,
    pub size: u32,
    /// One entry per sampled graph, holding one value per trial.
    pub per_sample: Vec<Vec<f64>>,
}

impl CriticalSet {
    pub fn new(mode: DeletionMode, size: u32) -> Self {
        CriticalSet {
            mode,
            size,
            per_sample: Vec::new(),
        }
    }

    /// Runs `trials` deletion trials on one graph.
    pub fn push_graph<R: Rng + ?Sized>(&mut self, graph: &SpanGraph, trials: usize, rng: &mut R) {
        let mut scratch = Vec::new();
        let pcs = (0..trials).map(|_| graph.trial(self.mode, rng, &mut scratch)).collect();
        self.per_sample.push(pcs);
    }

    /// Appends the samples of `other`, keeping order.
    pub fn merge(&mut self, other: CriticalSet) {
        self.per_sample.extend(other.per_sample);
    }

    pub fn n_samples(&self) -> usize {
        self.per_sample.len()
    }

    /// Spanning probability with standard error at every grid point.
    pub fn curve(&self, grid: &[f64]) -> Result<PercolationCurve, PercolationError> {
        if self.per_sample.is_empty() || self.per_sample.iter().any(Vec::is_empty) {
            return Err(PercolationError::EmptyStream);
        }
        for &p in grid {
            if !(0.0..=1.0).contains(&p) {
                return Err(PercolationError::BadProbability(p));
            }
        }
        let n = self.per_sample.len();
        let mut p_span = Vec::with_capacity(grid.len());
        let mut stderr = Vec::with_capacity(grid.len());
        let mut fractions = vec![0.0; n];
        for &p in grid {
            for (f, pcs) in fractions.iter_mut().zip(&self.per_sample) {
                *f = pcs.iter().filter(|&&pc| p <= pc).count() as f64 / pcs.len() as f64;
            }
            p_span.push(mean(&fractions));
            stderr.push(libm::sqrt(variance(&fractions) / n as f64));
        }
        let span_at_zero = {
            for (f, pcs) in fractions.iter_mut().zip(&self.per_sample) {
                *f = pcs.iter().filter(|&&pc| pc >= 0.0).count() as f64 / pcs.len() as f64;
            }
            mean(&fractions)
        };
        Ok(PercolationCurve {
            mode: self.mode,
            size: self.size,
            p_delete: grid.to_vec(),
            p_span,
            stderr,
            span_at_zero,
            n_samples: n,
            n_trials: self.per_sample[0].len(),
        })
    }

    /// The curve on [`default_grid`], refined to steps of 0.005 within 0.02
    /// of its 0.5 crossing when there is one.
    pub fn refined_curve(&self) -> Result<PercolationCurve, PercolationError> {
        let coarse = self.curve(&default_grid())?;
        match coarse.crossing() {
            Ok((p, _)) => self.curve(&refine_grid(&coarse.p_delete, p, 0.02, 0.005)),
            Err(_) => Ok(coarse),
        }
    }
}

/// `0.00, 0.02, …, 0.60`.
pub fn default_grid() -> Vec<f64> {
    (0..=30).map(|i| f64::from(i) * 0.02).collect()
}

/// Adds points of spacing `step` within `half_width` of `center` to `grid`.
pub fn refine_grid(grid: &[f64], center: f64, half_width: f64, step: f64) -> Vec<f64> {
    let mut out = grid.to_vec();
    let lo = libm::ceil((center - half_width) / step - 1e-9) as i64;
    let hi = libm::floor((center + half_width) / step + 1e-9) as i64;
    for k in lo..=hi {
        let p = k as f64 * step;
        if (0.0..=1.0).contains(&p) {
            out.push(p);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| libm::fabs(*a - *b) < 1e-9);
    out
}

/// Spanning probability against deletion probability at one size.
#[derive(Clone, Debug, PartialEq)]
pub struct PercolationCurve {
    pub mode: DeletionMode,
    pub size: u32,
    pub p_delete: Vec<f64>,
    pub p_span: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Spanning probability with nothing deleted.
    pub span_at_zero: f64,
    pub n_samples: usize,
    pub n_trials: usize,
}

impl PercolationCurve {
    /// Deletion probability where the curve first falls through 0.5, by
    /// linear interpolation, with the error implied by the standard errors
    /// of the bracketing points.
    pub fn crossing(&self) -> Result<(f64, f64), PercolationError> {
        let s = &self.p_span;
        for i in 0..s.len().saturating_sub(1) {
            if s[i] >= 0.5 && s[i + 1] < 0.5 {
                let (p0, p1) = (self.p_delete[i], self.p_delete[i + 1]);
                let drop = s[i] - s[i + 1];
                let p = p0 + (s[i] - 0.5) * (p1 - p0) / drop;
                let slope = drop / (p1 - p0);
                let err = self.stderr[i].max(self.stderr[i + 1]) / slope;
                return Ok((p, err));
            }
        }
        Err(PercolationError::NoCrossing {
            size: self.size,
            first: s.first().copied().unwrap_or(f64::NAN),
            last: s.last().copied().unwrap_or(f64::NAN),
        })
    }

    /// Slope `-dp_span/dp` at the crossing.
    pub fn steepness(&self) -> Option<f64> {
        let s = &self.p_span;
        (0..s.len().saturating_sub(1))
            .find(|&i| s[i] >= 0.5 && s[i + 1] < 0.5)
            .map(|i| (s[i] - s[i + 1]) / (self.p_delete[i + 1] - self.p_delete[i]))
    }
}

/// Threshold extracted from curves at several sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    pub mode: DeletionMode,
    /// Critical deletion probability `p*_delete`.
    pub p_delete: f64,
    pub error: f64,
    /// `(L, crossing, interpolation error)` in ascending `L`.
    pub per_size: Vec<(u32, f64, f64)>,
}

impl Threshold {
    /// `p_th = 1 - p*_delete`
    pub fn p_th(&self) -> f64 {
        1.0 - self.p_delete
    }
}

/// The crossing at the largest size, with error the larger of its
/// interpolation error and its distance to the next largest size.
pub fn estimate_threshold(curves: &[PercolationCurve]) -> Result<Threshold, PercolationError> {
    if curves.len() < 2 {
        return Err(PercolationError::TooFewSizes);
    }
    let mut per_size = Vec::with_capacity(curves.len());
    for c in curves {
        let (p, e) = c.crossing()?;
        per_size.push((c.size, p, e));
    }
    per_size.sort_by_key(|t| t.0);
    let (_, p, e) = per_size[per_size.len() - 1];
    let (_, q, _) = per_size[per_size.len() - 2];
    Ok(Threshold {
        mode: curves[0].mode,
        p_delete: p,
        error: e.max(libm::fabs(p - q)),
        per_size,
    })
}

/// Runs deletion trials on a stream of domain graphs of one lattice.
pub fn deletion_sweep<'g, I, R>(
    lattice: &Lattice,
    graphs: I,
    mode: DeletionMode,
    rule: SpanRule,
    grid: &[f64],
    trials_per_sample: usize,
    rng: &mut R,
) -> Result<PercolationCurve, PercolationError>
where
    I: IntoIterator<Item = &'g DomainGraph>,
    R: Rng + ?Sized,
{
    let mut set = CriticalSet::new(mode, lattice.size());
    for g in graphs {
        let sg = SpanGraph::new(g, lattice, rule)?;
        set.push_graph(&sg, trials_per_sample, rng);
    }
    set.curve(grid)
}

/// The lattice itself as a graph: every site its own domain.
pub fn bare_graph(lattice: &Lattice) -> DomainGraph {
    build_domain_graph(lattice, &DomainPartition::identity(lattice))
}

/// Critical values of `trials` independent deletions of the bare lattice,
/// one trial per sample.
pub fn bare_critical_set<R: Rng + ?Sized>(
    graph: &SpanGraph,
    size: u32,
    mode: DeletionMode,
    trials: usize,
    rng: &mut R,
) -> CriticalSet {
    let mut set = CriticalSet::new(mode, size);
    for _ in 0..trials {
        set.push_graph(graph, 1, rng);
    }
    set
}

/// Deletion percolation on the bare lattice.
pub fn bare_lattice_percolation<R: Rng + ?Sized>(
    lattice: &Lattice,
    mode: DeletionMode,
    rule: SpanRule,
    grid: &[f64],
    trials: usize,
    rng: &mut R,
) -> Result<PercolationCurve, PercolationError> {
    let sg = SpanGraph::new(&bare_graph(lattice), lattice, rule)?;
    bare_critical_set(&sg, lattice.size(), mode, trials, rng).curve(grid)
}

/// The Kagome lattice obtained from a star lattice by contracting every edge
/// that joins two triangles. Each domain of the result is one such edge.
pub fn contract_bridges(star: &Lattice) -> Result<DomainGraph, PercolationError> {
    if star.triangles().is_empty() {
        return Err(PercolationError::ProvenanceMismatch);
    }
    let mut domain_of = vec![u32::MAX; star.n_sites()];
    let mut next = 0;
    for &(u, v) in star.edges() {
        if star.triangle_of(u) != star.triangle_of(v) {
            domain_of[u as usize] = next;
            domain_of[v as usize] = next;
            next += 1;
        }
    }
    // On a cylinder the bridges across the open axis are missing; their
    // endpoints stay single sites.
    for d in domain_of.iter_mut().filter(|d| **d == u32::MAX) {
        *d = next;
        next += 1;
    }
    let partition = DomainPartition::from_assignment(star, domain_of);
    Ok(build_domain_graph(star, &partition))
}

/// Fraction of triangle edges removed by the domain reduction, counting a
/// triangle with exactly two equal labels as losing two of its three edges.
/// Uniform allowed triples give 1/2.
pub fn triangle_edge_deletion(lattice: &Lattice, config: &PovmConfig) -> f64 {
    let tris = lattice.triangles();
    if tris.is_empty() {
        return 0.0;
    }
    let pairs = tris
        .iter()
        .filter(|t| {
            let [a, b, c] = t.map(|v| config.get(v));
            (a == b) as u8 + (b == c) as u8 + (a == c) as u8 == 1
        })
        .count();
    (2.0 / 3.0) * pairs as f64 / tris.len() as f64
}

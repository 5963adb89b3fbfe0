//! Domains and the graph of the post-measurement graph state.
//!
//! Sites joined by an edge with equal labels are contracted into one domain.
//! Two domains are adjacent in the resulting graph iff an odd number of
//! lattice edges join them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::StatsError;
use crate::lattice::Lattice;
use crate::sampler::PovmConfig;
use crate::stats::{pooled, Estimate};
use crate::union_find::DisjointSet;

/// Assignment of lattice sites to domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainPartition {
    domain_of: Vec<u32>,
    sizes: Vec<u32>,
    n_internal: usize,
    n_external: usize,
}

impl DomainPartition {
    /// Partition from an explicit site-to-domain map with ids `0..n`.
    ///
    /// Internal edges are lattice edges whose endpoints share a domain.
    pub fn from_assignment(lattice: &Lattice, domain_of: Vec<u32>) -> Self {
        let n = domain_of.iter().map(|&d| d as usize + 1).max().unwrap_or(0);
        let mut sizes = vec![0u32; n];
        for &d in &domain_of {
            sizes[d as usize] += 1;
        }
        let n_internal = lattice
            .edges()
            .iter()
            .filter(|&&(u, v)| domain_of[u as usize] == domain_of[v as usize])
            .count();
        DomainPartition {
            n_external: lattice.n_edges() - n_internal,
            domain_of,
            sizes,
            n_internal,
        }
    }

    /// Every site its own domain; the bare lattice.
    pub fn identity(lattice: &Lattice) -> Self {
        DomainPartition {
            domain_of: (0..lattice.n_sites() as u32).collect(),
            sizes: vec![1; lattice.n_sites()],
            n_internal: 0,
            n_external: lattice.n_edges(),
        }
    }

    pub fn domain_of(&self) -> &[u32] {
        &self.domain_of
    }

    pub fn domain(&self, site: u32) -> u32 {
        self.domain_of[site as usize]
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// |V|
    pub fn n_domains(&self) -> usize {
        self.sizes.len()
    }

    /// |E_I|
    pub fn n_internal_edges(&self) -> usize {
        self.n_internal
    }

    /// Inter-domain edges counted with multiplicity.
    pub fn n_external_edges_multi(&self) -> usize {
        self.n_external
    }

    pub fn largest_domain(&self) -> u32 {
        self.sizes.iter().copied().max().unwrap_or(0)
    }
}

/// Labels domains with a single union-find pass over the lattice edges.
/// Domain ids are assigned in order of each domain's lowest site.
pub fn identify_domains(lattice: &Lattice, config: &PovmConfig) -> DomainPartition {
    let n = lattice.n_sites();
    let mut ds = DisjointSet::new(n);
    let mut n_internal = 0;
    for &(u, v) in lattice.edges() {
        if config.get(u) == config.get(v) {
            ds.union(u, v);
            n_internal += 1;
        }
    }
    let mut compact = vec![u32::MAX; n];
    let mut domain_of = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    for v in 0..n as u32 {
        let r = ds.find(v) as usize;
        if compact[r] == u32::MAX {
            compact[r] = sizes.len() as u32;
            sizes.push(0);
        }
        let d = compact[r];
        sizes[d as usize] += 1;
        domain_of.push(d);
    }
    DomainPartition {
        domain_of,
        sizes,
        n_internal,
        n_external: lattice.n_edges() - n_internal,
    }
}

/// Simple graph on domains with provenance back to lattice sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainGraph {
    n_vertices: usize,
    edges: Vec<(u32, u32)>,
    witness: Vec<u32>,
    domain_of: Vec<u32>,
    member_offsets: Vec<u32>,
    members: Vec<u32>,
}

impl DomainGraph {
    /// Builds a graph from a site-to-domain map and a list of domain edges,
    /// each paired with a lattice edge that realizes it.
    pub fn from_parts(domain_of: Vec<u32>, edges: Vec<(u32, u32)>, witness: Vec<u32>) -> Self {
        let n = domain_of.iter().map(|&d| d as usize + 1).max().unwrap_or(0);
        let mut member_offsets = vec![0u32; n + 1];
        for &d in &domain_of {
            member_offsets[d as usize + 1] += 1;
        }
        for i in 0..n {
            member_offsets[i + 1] += member_offsets[i];
        }
        let mut fill = member_offsets.clone();
        let mut members = vec![0u32; domain_of.len()];
        for (site, &d) in domain_of.iter().enumerate() {
            members[fill[d as usize] as usize] = site as u32;
            fill[d as usize] += 1;
        }
        DomainGraph {
            n_vertices: n,
            edges,
            witness,
            domain_of,
            member_offsets,
            members,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// A lattice edge realizing each graph edge.
    pub fn witness(&self) -> &[u32] {
        &self.witness
    }

    pub fn domain_of(&self) -> &[u32] {
        &self.domain_of
    }

    /// Lattice sites making up domain `d`.
    pub fn members(&self, d: u32) -> &[u32] {
        let lo = self.member_offsets[d as usize] as usize;
        let hi = self.member_offsets[d as usize + 1] as usize;
        &self.members[lo..hi]
    }

    pub fn vertex_weight(&self, d: u32) -> u32 {
        self.member_offsets[d as usize + 1] - self.member_offsets[d as usize]
    }

    pub fn sizes(&self) -> Vec<u32> {
        (0..self.n_vertices as u32).map(|d| self.vertex_weight(d)).collect()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n_vertices];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg
    }
}

/// Reduces a multiset of unordered pairs modulo two: pairs of odd
/// multiplicity survive once, even ones vanish, self-pairs are dropped.
/// Returns sorted `(a, b, index of a first occurrence)`.
pub fn mod2_pairs(pairs: &[(u32, u32)]) -> Vec<(u32, u32, u32)> {
    let mut keyed: Vec<(u32, u32, u32)> = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| a != b)
        .map(|(i, &(a, b))| (a.min(b), a.max(b), i as u32))
        .collect();
    keyed.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        let mut j = i + 1;
        while j < keyed.len() && keyed[j].0 == keyed[i].0 && keyed[j].1 == keyed[i].1 {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(keyed[i]);
        }
        i = j;
    }
    out
}

/// Contracts each domain to a vertex and keeps an inter-domain edge iff its
/// lattice multiplicity is odd.
pub fn build_domain_graph(lattice: &Lattice, partition: &DomainPartition) -> DomainGraph {
    let d = partition.domain_of();
    let pairs: Vec<(u32, u32)> = lattice
        .edges()
        .iter()
        .map(|&(u, v)| (d[u as usize], d[v as usize]))
        .collect();
    let reduced = mod2_pairs(&pairs);
    let edges = reduced.iter().map(|&(a, b, _)| (a, b)).collect();
    let witness = reduced.iter().map(|&(_, _, e)| e).collect();
    DomainGraph::from_parts(d.to_vec(), edges, witness)
}

/// The graph quantities of one sampled configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct GraphSample {
    pub n_sites: u32,
    pub n_domains: u32,
    /// Edges after the modulo-2 reduction.
    pub n_edges: u32,
    /// Inter-domain lattice edges before the reduction.
    pub n_edges_multi: u32,
    pub largest_domain: u32,
    /// Domains left without any edge by the reduction.
    pub n_isolated: u32,
}

impl GraphSample {
    pub fn measure(partition: &DomainPartition, graph: &DomainGraph) -> Self {
        let n_isolated = graph.degrees().iter().filter(|&&d| d == 0).count() as u32;
        GraphSample {
            n_sites: partition.domain_of().len() as u32,
            n_domains: partition.n_domains() as u32,
            n_edges: graph.n_edges() as u32,
            n_edges_multi: partition.n_external_edges_multi() as u32,
            largest_domain: partition.largest_domain(),
            n_isolated,
        }
    }

    /// Partition and mod-2 graph of `config`, reduced to summary numbers.
    pub fn of(lattice: &Lattice, config: &PovmConfig) -> Self {
        let p = identify_domains(lattice, config);
        let g = build_domain_graph(lattice, &p);
        Self::measure(&p, &g)
    }

    pub fn avg_degree(&self) -> f64 {
        2.0 * f64::from(self.n_edges) / f64::from(self.n_domains)
    }

    pub fn avg_domain_size(&self) -> f64 {
        f64::from(self.n_sites) / f64::from(self.n_domains)
    }

    pub fn vertices_per_site(&self) -> f64 {
        f64::from(self.n_domains) / f64::from(self.n_sites)
    }

    pub fn edges_per_site(&self) -> f64 {
        f64::from(self.n_edges) / f64::from(self.n_sites)
    }
}

/// Ensemble averages of the domain graph, each with a standard error.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct GraphStats {
    /// `2|E|/|V|` with `|E|` the mod-2 edge count.
    pub avg_degree: Estimate,
    /// `N/|V|`
    pub avg_domain_size: Estimate,
    pub largest_domain: Estimate,
    pub vertices_per_site: Estimate,
    pub edges_per_site: Estimate,
    /// Inter-domain lattice edges per site, before the reduction.
    pub multi_edges_per_site: Estimate,
    pub isolated_per_site: Estimate,
    pub n_samples: usize,
}

/// Pools per-chain sample series into [`GraphStats`].
pub fn compute_stats(chains: &[Vec<GraphSample>]) -> Result<GraphStats, StatsError> {
    let n_samples: usize = chains.iter().map(Vec::len).sum();
    if n_samples < 2 {
        return Err(StatsError::TooFewSamples {
            need: 2,
            got: n_samples,
        });
    }
    let series = |f: &dyn Fn(&GraphSample) -> f64| -> Result<Estimate, StatsError> {
        let per_chain: Vec<Vec<f64>> = chains.iter().map(|c| c.iter().map(f).collect()).collect();
        pooled(&per_chain)
    };
    Ok(GraphStats {
        avg_degree: series(&GraphSample::avg_degree)?,
        avg_domain_size: series(&GraphSample::avg_domain_size)?,
        largest_domain: series(&|s| f64::from(s.largest_domain))?,
        vertices_per_site: series(&GraphSample::vertices_per_site)?,
        edges_per_site: series(&GraphSample::edges_per_site)?,
        multi_edges_per_site: series(&|s| f64::from(s.n_edges_multi) / f64::from(s.n_sites))?,
        isolated_per_site: series(&|s| f64::from(s.n_isolated) / f64::from(s.n_sites))?,
        n_samples,
    })
}

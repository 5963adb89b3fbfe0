//! Parallel Monte Carlo campaigns.
//!
//! Chains run on a rayon pool and their results are merged in chain order,
//! so output depends only on the configuration and the master seed, never on
//! the number of workers.

use aklt_core::domain::{build_domain_graph, compute_stats, identify_domains, GraphSample, GraphStats};
use aklt_core::lattice::{build_lattice, Boundary, Lattice, LatticeKind};
use aklt_core::percolation::{
    bare_critical_set, bare_graph, contract_bridges, estimate_threshold, triangle_edge_deletion, CriticalSet,
    DeletionMode, PercolationCurve, SpanGraph, SpanRule, Threshold,
};
use aklt_core::sampler::{chain_rng, chain_seed, run_chain, ChainParams, Measurement};
use aklt_core::{LatticeError, PercolationError, SamplerError, StatsError};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Percolation(#[from] PercolationError),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Runs `f(0..n)` on `threads` workers (all cores when `None`) and returns
/// the results in index order.
pub fn par_map<T, F>(n: u32, threads: Option<usize>, f: F) -> Result<Vec<T>, CampaignError>
where
    T: Send,
    F: Fn(u32) -> Result<T, CampaignError> + Sync + Send,
{
    let run = || {
        (0..n)
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<T>, CampaignError>>()
    };
    match threads {
        None => run(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| CampaignError::Pool(e.to_string()))?
            .install(run),
    }
}

/// Graph statistics of one lattice size.
#[derive(Clone, Debug)]
pub struct SizeStats {
    pub size: u32,
    pub n_sites: usize,
    pub acceptance_rate: f64,
    pub max_monochromatic_triangles: usize,
    pub stats: GraphStats,
    pub per_chain: Vec<Vec<GraphSample>>,
}

/// Samples `params.n_chains` chains on `lattice` and measures the domain
/// graph at every measurement.
pub fn sample_stats(
    lattice: &Lattice,
    params: &ChainParams,
    threads: Option<usize>,
) -> Result<SizeStats, CampaignError> {
    params.validate()?;
    let chains = par_map(params.n_chains, threads, |i| {
        let mut samples = Vec::with_capacity(params.measurements() as usize);
        let mut mono = 0;
        let mut obs = |m: &Measurement<'_>| {
            samples.push(GraphSample::of(m.lattice, m.config));
            mono = mono.max(m.config.monochromatic_triangles(m.lattice));
            Ok(())
        };
        let summary = run_chain(lattice, params, i, &mut [&mut obs])?;
        Ok((summary.attempted, summary.accepted, mono, samples))
    })?;
    let attempted: u64 = chains.iter().map(|c| c.0).sum();
    let accepted: u64 = chains.iter().map(|c| c.1).sum();
    let max_mono = chains.iter().map(|c| c.2).max().unwrap_or(0);
    let per_chain: Vec<Vec<GraphSample>> = chains.into_iter().map(|c| c.3).collect();
    let stats = compute_stats(&per_chain)?;
    Ok(SizeStats {
        size: lattice.size(),
        n_sites: lattice.n_sites(),
        acceptance_rate: accepted as f64 / attempted.max(1) as f64,
        max_monochromatic_triangles: max_mono,
        stats,
        per_chain,
    })
}

/// Deletion statistics gathered from sampled domain graphs at one size.
#[derive(Clone, Debug)]
pub struct PercolationRun {
    pub size: u32,
    /// One set per requested mode, in request order.
    pub sets: Vec<CriticalSet>,
    pub n_graphs: usize,
    /// Sampled graphs that span with nothing deleted.
    pub spanning: usize,
    /// Mean of [`triangle_edge_deletion`] over the samples.
    pub triangle_edge_deletion: f64,
    pub max_monochromatic_triangles: usize,
}

impl PercolationRun {
    pub fn spanning_fraction(&self) -> f64 {
        self.spanning as f64 / self.n_graphs.max(1) as f64
    }
}

/// Samples chains on `lattice` and runs `trials` deletion trials per mode
/// on every sampled graph. Trial randomness comes from a separate stream of
/// each chain's generator.
pub fn sample_percolation(
    lattice: &Lattice,
    params: &ChainParams,
    modes: &[DeletionMode],
    trials: usize,
    rule: SpanRule,
    threads: Option<usize>,
) -> Result<PercolationRun, CampaignError> {
    params.validate()?;
    let size = lattice.size();
    let chains = par_map(params.n_chains, threads, |i| {
        let mut rng = chain_rng(chain_seed(params.seed, i), 1);
        let mut sets: Vec<CriticalSet> = modes.iter().map(|&m| CriticalSet::new(m, size)).collect();
        let mut spanning = 0usize;
        let mut n = 0usize;
        let mut tri = 0.0;
        let mut mono = 0;
        let mut failure = None;
        let mut obs = |m: &Measurement<'_>| {
            let partition = identify_domains(m.lattice, m.config);
            let graph = build_domain_graph(m.lattice, &partition);
            let sg = match SpanGraph::new(&graph, m.lattice, rule) {
                Ok(sg) => sg,
                Err(e) => {
                    let msg = e.to_string();
                    failure = Some(e);
                    return Err(msg);
                }
            };
            n += 1;
            spanning += usize::from(sg.spans());
            tri += triangle_edge_deletion(m.lattice, m.config);
            mono = mono.max(m.config.monochromatic_triangles(m.lattice));
            if trials > 0 {
                for set in sets.iter_mut() {
                    set.push_graph(&sg, trials, &mut rng);
                }
            }
            Ok(())
        };
        let result = run_chain(lattice, params, i, &mut [&mut obs]);
        if let Some(e) = failure {
            return Err(e.into());
        }
        result?;
        Ok((sets, n, spanning, tri, mono))
    })?;
    let mut sets: Vec<CriticalSet> = modes.iter().map(|&m| CriticalSet::new(m, size)).collect();
    let mut n_graphs = 0;
    let mut spanning = 0;
    let mut tri = 0.0;
    let mut mono = 0;
    for (chain_sets, n, s, t, m) in chains {
        for (acc, set) in sets.iter_mut().zip(chain_sets) {
            acc.merge(set);
        }
        n_graphs += n;
        spanning += s;
        tri += t;
        mono = mono.max(m);
    }
    Ok(PercolationRun {
        size,
        sets,
        n_graphs,
        spanning,
        triangle_edge_deletion: tri / n_graphs.max(1) as f64,
        max_monochromatic_triangles: mono,
    })
}

/// Graph used for bare-lattice percolation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BareTarget {
    Lattice(LatticeKind),
    /// The star lattice with its inter-triangle bonds contracted.
    Kagome,
}

impl BareTarget {
    pub fn name(self) -> &'static str {
        match self {
            BareTarget::Lattice(k) => k.name(),
            BareTarget::Kagome => "kagome",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        if name == "kagome" {
            Some(BareTarget::Kagome)
        } else {
            LatticeKind::from_name(name).map(BareTarget::Lattice)
        }
    }

    /// Lattice kind the graph is generated from.
    pub fn kind(self) -> LatticeKind {
        match self {
            BareTarget::Lattice(k) => k,
            BareTarget::Kagome => LatticeKind::Star,
        }
    }
}

/// A bare-lattice percolation run at one size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BareRequest {
    pub target: BareTarget,
    pub size: u32,
    pub mode: DeletionMode,
    pub rule: SpanRule,
    pub trials: usize,
    pub seed: u64,
    /// Independent random streams the trials are split across.
    pub chunks: u32,
}

/// Deletion trials on a bare lattice. The split into chunks is fixed by the
/// request, so the result does not depend on the worker count.
pub fn bare_percolation(req: &BareRequest, threads: Option<usize>) -> Result<CriticalSet, CampaignError> {
    let bc = match req.rule {
        SpanRule::Cylinder => Boundary::Cylinder,
        SpanRule::WrapX => Boundary::Torus,
    };
    let lattice = build_lattice(req.target.kind(), req.size, bc)?;
    let graph = match req.target {
        BareTarget::Lattice(_) => bare_graph(&lattice),
        BareTarget::Kagome => contract_bridges(&lattice)?,
    };
    let sg = SpanGraph::new(&graph, &lattice, req.rule)?;
    let chunks = req.chunks.max(1);
    let parts = par_map(chunks, threads, |i| {
        let share = req.trials / chunks as usize + usize::from((i as usize) < req.trials % chunks as usize);
        let mut rng = chain_rng(chain_seed(req.seed, i), 1);
        Ok(bare_critical_set(&sg, req.size, req.mode, share, &mut rng))
    })?;
    let mut set = CriticalSet::new(req.mode, req.size);
    for p in parts {
        set.merge(p);
    }
    Ok(set)
}

/// Curves on the refined default grid (or `grid` when given) and the
/// threshold across sizes.
pub fn curves_and_threshold(
    sets: &[CriticalSet],
    grid: Option<&[f64]>,
) -> Result<(Vec<PercolationCurve>, Result<Threshold, PercolationError>), CampaignError> {
    let curves = sets
        .iter()
        .map(|s| match grid {
            Some(g) => s.curve(g),
            None => s.refined_curve(),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let threshold = estimate_threshold(&curves);
    Ok((curves, threshold))
}

//! Metropolis sampling of POVM outcome configurations.
//!
//! A configuration assigns one of three labels to every site. Its weight is
//! `2^(|V| − |E|)`, where `|V|` counts domains (maximal same-label clusters)
//! and `|E|` counts lattice edges between different domains. Since every
//! lattice edge is either internal or external, this is `2^(|V| + |E_I|)` up
//! to a constant, which is the exponent tracked here.
//!
//! Single-site flips only change domains that touch the flipped site, so the
//! weight ratio is computed from the site's neighborhood: the neighbors that
//! share the old label may split once the site leaves, and the neighbors that
//! share the new label are joined through it. Neighbors with the third label
//! are untouched and cancel.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::identify_domains;
use crate::error::SamplerError;
use crate::lattice::{Lattice, NO_TRIANGLE};

/// Generator used for every Markov chain.
pub type ChainRng = ChaCha8Rng;

/// POVM outcome at one site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum PovmLabel {
    X = 0,
    Y = 1,
    Z = 2,
}

impl PovmLabel {
    pub const ALL: [PovmLabel; 3] = [PovmLabel::X, PovmLabel::Y, PovmLabel::Z];

    #[inline]
    pub fn from_index(i: u8) -> Self {
        match i % 3 {
            0 => PovmLabel::X,
            1 => PovmLabel::Y,
            _ => PovmLabel::Z,
        }
    }

    #[inline]
    pub fn index(self) -> u8 {
        self as u8
    }

    /// One of the two other labels, selected by `bit`.
    #[inline]
    pub fn other(self, bit: bool) -> Self {
        Self::from_index(self as u8 + 1 + bit as u8)
    }

    pub fn as_char(self) -> char {
        match self {
            PovmLabel::X => 'x',
            PovmLabel::Y => 'y',
            PovmLabel::Z => 'z',
        }
    }
}

/// One label per lattice site.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PovmConfig {
    labels: Vec<PovmLabel>,
}

impl PovmConfig {
    pub fn new(labels: Vec<PovmLabel>) -> Self {
        PovmConfig { labels }
    }

    pub fn uniform(n: usize, label: PovmLabel) -> Self {
        PovmConfig { labels: vec![label; n] }
    }

    /// Decodes configuration number `index` in base 3, site 0 least
    /// significant. Used for exhaustive enumeration of small graphs.
    pub fn from_index(n: usize, mut index: u64) -> Self {
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            labels.push(PovmLabel::from_index((index % 3) as u8));
            index /= 3;
        }
        PovmConfig { labels }
    }

    /// Inverse of [`PovmConfig::from_index`].
    pub fn to_index(&self) -> u64 {
        self.labels
            .iter()
            .rev()
            .fold(0u64, |acc, l| acc * 3 + u64::from(l.index()))
    }

    /// Uniformly random labels that respect the triangle constraint: each
    /// triangle is redrawn until it is not monochromatic.
    pub fn random<R: Rng + ?Sized>(lattice: &Lattice, rng: &mut R) -> Self {
        let mut labels: Vec<PovmLabel> = (0..lattice.n_sites())
            .map(|_| PovmLabel::from_index(rng.random_range(0..3u8)))
            .collect();
        for t in lattice.triangles() {
            loop {
                let draw = [0, 1, 2].map(|_| PovmLabel::from_index(rng.random_range(0..3u8)));
                if !(draw[0] == draw[1] && draw[1] == draw[2]) {
                    for (&v, l) in t.iter().zip(draw) {
                        labels[v as usize] = l;
                    }
                    break;
                }
            }
        }
        PovmConfig { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[PovmLabel] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, v: u32) -> PovmLabel {
        self.labels[v as usize]
    }

    #[inline]
    pub fn set(&mut self, v: u32, label: PovmLabel) {
        self.labels[v as usize] = label;
    }

    /// Number of triangles whose three sites share a label.
    pub fn monochromatic_triangles(&self, lattice: &Lattice) -> usize {
        lattice
            .triangles()
            .iter()
            .filter(|t| {
                let a = self.get(t[0]);
                a == self.get(t[1]) && a == self.get(t[2])
            })
            .count()
    }

    pub fn validate(&self, lattice: &Lattice) -> Result<(), SamplerError> {
        if self.len() != lattice.n_sites() {
            return Err(SamplerError::SizeMismatch {
                config: self.len(),
                sites: lattice.n_sites(),
            });
        }
        if self.monochromatic_triangles(lattice) > 0 {
            return Err(SamplerError::Frustrated);
        }
        Ok(())
    }
}

/// `|V| + |E_I|` for the configuration: the log2 of its unnormalized weight
/// relative to `2^|E(L)|`.
pub fn weight_exponent(lattice: &Lattice, config: &PovmConfig) -> Result<i64, SamplerError> {
    if config.len() != lattice.n_sites() {
        return Err(SamplerError::SizeMismatch {
            config: config.len(),
            sites: lattice.n_sites(),
        });
    }
    let p = identify_domains(lattice, config);
    Ok((p.n_domains() + p.n_internal_edges()) as i64)
}

/// Reusable breadth-first workspace for neighborhood domain counting.
#[derive(Clone, Debug)]
pub struct DomainProbe {
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
    old_group: Vec<u32>,
    new_group: Vec<u32>,
}

impl DomainProbe {
    pub fn new(n_sites: usize) -> Self {
        DomainProbe {
            stamp: vec![0; n_sites],
            epoch: 0,
            queue: Vec::new(),
            old_group: Vec::new(),
            new_group: Vec::new(),
        }
    }

    fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    /// Change of `v_c + e_I` when `site` is relabeled to `new`:
    /// `v_c` counts distinct domains among the site and its neighbors and
    /// `e_I` the internal edges incident on the site.
    pub fn flip_delta(&mut self, lattice: &Lattice, labels: &[PovmLabel], site: u32, new: PovmLabel) -> i32 {
        let old = labels[site as usize];
        debug_assert_ne!(old, new);
        self.old_group.clear();
        self.new_group.clear();
        for &n in lattice.neighbors(site) {
            let l = labels[n as usize];
            if l == old {
                self.old_group.push(n);
            } else if l == new {
                self.new_group.push(n);
            }
        }
        let k_old = self.old_group.len() as i32;
        let k_new = self.new_group.len() as i32;
        let old_group = core::mem::take(&mut self.old_group);
        let new_group = core::mem::take(&mut self.new_group);
        // Old-label neighbors are one domain through the site before the
        // flip and `split` domains after; new-label neighbors go the other way.
        let split = self.distinct_domains(lattice, labels, site, &old_group, old);
        let joined = self.distinct_domains(lattice, labels, site, &new_group, new);
        self.old_group = old_group;
        self.new_group = new_group;
        (split - joined) + (k_new - k_old)
    }

    /// Number of distinct `label` domains among `group`, with `site` removed.
    fn distinct_domains(
        &mut self,
        lattice: &Lattice,
        labels: &[PovmLabel],
        site: u32,
        group: &[u32],
        label: PovmLabel,
    ) -> i32 {
        if group.len() < 2 {
            return group.len() as i32;
        }
        let epoch = self.next_epoch();
        self.stamp[site as usize] = epoch;
        let mut count = 0;
        let mut found = 0;
        for &seed in group {
            if self.stamp[seed as usize] == epoch {
                continue;
            }
            count += 1;
            found += 1;
            if found == group.len() {
                break;
            }
            self.stamp[seed as usize] = epoch;
            self.queue.clear();
            self.queue.push(seed);
            let mut head = 0;
            'grow: while head < self.queue.len() {
                let v = self.queue[head];
                head += 1;
                for &w in lattice.neighbors(v) {
                    if self.stamp[w as usize] != epoch && labels[w as usize] == label {
                        self.stamp[w as usize] = epoch;
                        if group.contains(&w) {
                            found += 1;
                            if found == group.len() {
                                break 'grow;
                            }
                        }
                        self.queue.push(w);
                    }
                }
            }
            if found == group.len() {
                break;
            }
        }
        count
    }
}

/// Whether relabeling `site` to `new` would make its triangle monochromatic.
#[inline]
pub fn violates_triangle(lattice: &Lattice, labels: &[PovmLabel], site: u32, new: PovmLabel) -> bool {
    let t = lattice.triangle_of(site);
    if t == NO_TRIANGLE {
        return false;
    }
    lattice.triangles()[t as usize]
        .iter()
        .filter(|&&v| v != site)
        .all(|&v| labels[v as usize] == new)
}

/// `2^delta` for an integer exponent, exact for the range that matters.
pub fn pow2(delta: i32) -> f64 {
    libm::exp2(f64::from(delta))
}

/// Metropolis acceptance probability `min{1, 2^(v_c' + e_I' − v_c − e_I)}`
/// for relabeling `site`. Flips that would create a monochromatic triangle
/// have probability zero.
pub fn local_acceptance(
    lattice: &Lattice,
    config: &PovmConfig,
    site: u32,
    new: PovmLabel,
) -> Result<f64, SamplerError> {
    if config.len() != lattice.n_sites() {
        return Err(SamplerError::SizeMismatch {
            config: config.len(),
            sites: lattice.n_sites(),
        });
    }
    if site as usize >= lattice.n_sites() {
        return Err(SamplerError::SiteOutOfRange(site));
    }
    if config.get(site) == new {
        return Err(SamplerError::SameLabel(site));
    }
    if violates_triangle(lattice, config.labels(), site, new) {
        return Ok(0.0);
    }
    let mut probe = DomainProbe::new(lattice.n_sites());
    let delta = probe.flip_delta(lattice, config.labels(), site, new);
    Ok(pow2(delta).min(1.0))
}

/// Accepts with probability `min{1, 2^delta}` using one 64-bit draw.
#[inline]
fn accept<R: RngCore + ?Sized>(rng: &mut R, delta: i32) -> bool {
    if delta >= 0 {
        return true;
    }
    if delta <= -64 {
        return false;
    }
    rng.next_u64() < 1u64 << (64 + delta)
}

/// A configuration under Metropolis evolution on a fixed lattice.
#[derive(Clone, Debug)]
pub struct Sampler<'a, R = ChainRng> {
    lattice: &'a Lattice,
    config: PovmConfig,
    probe: DomainProbe,
    rng: R,
    exponent: i64,
    attempted: u64,
    accepted: u64,
}

impl<'a, R: Rng> Sampler<'a, R> {
    pub fn new(lattice: &'a Lattice, config: PovmConfig, rng: R) -> Result<Self, SamplerError> {
        config.validate(lattice)?;
        let exponent = weight_exponent(lattice, &config)?;
        Ok(Sampler {
            lattice,
            config,
            probe: DomainProbe::new(lattice.n_sites()),
            rng,
            exponent,
            attempted: 0,
            accepted: 0,
        })
    }

    pub fn config(&self) -> &PovmConfig {
        &self.config
    }

    pub fn into_config(self) -> PovmConfig {
        self.config
    }

    pub fn lattice(&self) -> &'a Lattice {
        self.lattice
    }

    /// Exponent of the current weight, accumulated from accepted flips.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn attempted(&self) -> u64 {
        self.attempted
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    /// One attempted flip at a uniformly random site. Returns whether it was
    /// accepted.
    #[inline]
    pub fn step(&mut self) -> bool {
        let n = self.lattice.n_sites() as u32;
        let site = self.rng.random_range(0..n);
        let current = self.config.get(site);
        let new = current.other(self.rng.next_u32() & 1 == 1);
        self.attempted += 1;
        if violates_triangle(self.lattice, self.config.labels(), site, new) {
            return false;
        }
        let delta = self.probe.flip_delta(self.lattice, self.config.labels(), site, new);
        if accept(&mut self.rng, delta) {
            self.config.set(site, new);
            self.exponent += i64::from(delta);
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    /// `N` attempted flips. Returns the number accepted.
    pub fn sweep(&mut self) -> u64 {
        let before = self.accepted;
        for _ in 0..self.lattice.n_sites() {
            self.step();
        }
        self.accepted - before
    }
}

/// One Metropolis sweep on a borrowed configuration.
///
/// Allocates a fresh workspace; long runs should use [`Sampler`].
pub fn metropolis_sweep<R: Rng>(lattice: &Lattice, config: &mut PovmConfig, rng: &mut R) -> u64 {
    let mut probe = DomainProbe::new(lattice.n_sites());
    let n = lattice.n_sites() as u32;
    let mut accepted = 0;
    for _ in 0..n {
        let site = rng.random_range(0..n);
        let new = config.get(site).other(rng.next_u32() & 1 == 1);
        if violates_triangle(lattice, config.labels(), site, new) {
            continue;
        }
        let delta = probe.flip_delta(lattice, config.labels(), site, new);
        if accept(rng, delta) {
            config.set(site, new);
            accepted += 1;
        }
    }
    accepted
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainParams {
    pub seed: u64,
    pub burn_in_sweeps: u64,
    pub measure_sweeps: u64,
    /// Sweeps between measurements.
    pub measure_interval: u64,
    pub n_chains: u32,
}

impl ChainParams {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.measure_sweeps == 0 {
            return Err(SamplerError::InvalidParams("measure_sweeps must be positive"));
        }
        if self.measure_interval == 0 {
            return Err(SamplerError::InvalidParams("measure_interval must be at least 1"));
        }
        if self.n_chains == 0 {
            return Err(SamplerError::InvalidParams("n_chains must be positive"));
        }
        Ok(())
    }

    /// Measurements per chain.
    pub fn measurements(&self) -> u64 {
        self.measure_sweeps / self.measure_interval
    }
}

/// Seed of chain `index` derived from the master seed: the first word of
/// stream `index` of a generator keyed by `master`. Nearby master seeds
/// therefore never share chains.
pub fn chain_seed(master: u64, index: u32) -> u64 {
    let mut rng = ChainRng::seed_from_u64(master);
    rng.set_stream(u64::from(index));
    rng.next_u64()
}

/// Generator for stream `stream` of the chain seeded with `seed`. Stream 0
/// drives the Markov chain itself; other streams serve analyses attached to
/// it, so they never perturb the chain.
pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChainRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// What an observer sees at each measurement.
#[derive(Clone, Copy, Debug)]
pub struct Measurement<'a> {
    pub chain: u32,
    /// Sweeps completed since the end of burn-in.
    pub sweep: u64,
    pub lattice: &'a Lattice,
    pub config: &'a PovmConfig,
    /// Weight exponent accumulated from accepted flips.
    pub exponent: i64,
}

pub trait Observer {
    fn observe(&mut self, m: &Measurement<'_>) -> Result<(), String>;
}

impl<F> Observer for F
where
    F: FnMut(&Measurement<'_>) -> Result<(), String>,
{
    fn observe(&mut self, m: &Measurement<'_>) -> Result<(), String> {
        self(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainSummary {
    pub chain: u32,
    pub seed: u64,
    pub measurements: u64,
    pub attempted: u64,
    pub accepted: u64,
    pub final_config: PovmConfig,
    pub final_exponent: i64,
}

impl ChainSummary {
    pub fn acceptance_rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempted as f64
        }
    }
}

/// Runs chain `index`: a random valid start, burn-in, then measurement
/// sweeps with the observers called every `measure_interval` sweeps.
pub fn run_chain(
    lattice: &Lattice,
    params: &ChainParams,
    index: u32,
    observers: &mut [&mut dyn Observer],
) -> Result<ChainSummary, SamplerError> {
    params.validate()?;
    let seed = chain_seed(params.seed, index);
    let mut rng = chain_rng(seed, 0);
    let start = PovmConfig::random(lattice, &mut rng);
    let mut sampler = Sampler::new(lattice, start, rng)?;
    for _ in 0..params.burn_in_sweeps {
        sampler.sweep();
    }
    let mut measurements = 0;
    for sweep in 1..=params.measure_sweeps {
        sampler.sweep();
        if sweep % params.measure_interval == 0 {
            let m = Measurement {
                chain: index,
                sweep,
                lattice,
                config: sampler.config(),
                exponent: sampler.exponent(),
            };
            for obs in observers.iter_mut() {
                obs.observe(&m).map_err(SamplerError::Observer)?;
            }
            measurements += 1;
        }
    }
    Ok(ChainSummary {
        chain: index,
        seed,
        measurements,
        attempted: sampler.attempted(),
        accepted: sampler.accepted(),
        final_exponent: sampler.exponent(),
        final_config: sampler.into_config(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, Boundary, LatticeKind};
    use PovmLabel::*;

    fn k4() -> Lattice {
        Lattice::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], &[]).unwrap()
    }

    #[test]
    fn monochromatic_honeycomb_exponent() {
        let lat = build_lattice(LatticeKind::Honeycomb, 4, Boundary::Torus).unwrap();
        let cfg = PovmConfig::uniform(16, Z);
        assert_eq!(weight_exponent(&lat, &cfg).unwrap(), 25);
    }

    #[test]
    fn k4_hand_count() {
        let cfg = PovmConfig::new(vec![X, X, Y, Z]);
        assert_eq!(weight_exponent(&k4(), &cfg).unwrap(), 4);
    }

    #[test]
    fn label_index_round_trip() {
        for i in 0..81 {
            assert_eq!(PovmConfig::from_index(4, i).to_index(), i);
        }
        for l in PovmLabel::ALL {
            assert_ne!(l.other(false), l);
            assert_ne!(l.other(true), l);
            assert_ne!(l.other(true), l.other(false));
        }
    }

    #[test]
    fn figure_four_neighborhood() {
        // c has neighbors 1, 2 (label x, joined elsewhere through 4) and 3 (y).
        // Flipping c from x to z splits nothing and leaves e_I = 0.
        let lat = Lattice::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 5)], &[]).unwrap();
        let cfg = PovmConfig::new(vec![X, X, X, Y, X, Z]);
        let p = local_acceptance(&lat, &cfg, 0, Z).unwrap();
        assert_eq!(p, 0.5);
        // Same picture with 1 and 2 in different domains: c's removal splits.
        let lat2 = Lattice::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 5)], &[]).unwrap();
        let cfg2 = PovmConfig::new(vec![X, X, X, Y, Z, Z]);
        assert_eq!(local_acceptance(&lat2, &cfg2, 0, Z).unwrap(), 1.0);
    }

    #[test]
    fn isolated_site_to_third_label_is_free() {
        let cfg = PovmConfig::new(vec![X, Y, Y, Y]);
        // flipping 0 to Z: no internal edges before or after
        let lat = Lattice::from_edges(4, &[(0, 1), (0, 2), (0, 3)], &[]).unwrap();
        assert_eq!(local_acceptance(&lat, &cfg, 0, Z).unwrap(), 1.0);
    }

    #[test]
    fn contract_violations() {
        let cfg = PovmConfig::new(vec![X, X, Y, Z]);
        assert_eq!(local_acceptance(&k4(), &cfg, 0, X), Err(SamplerError::SameLabel(0)));
        assert_eq!(
            local_acceptance(&k4(), &cfg, 9, Y),
            Err(SamplerError::SiteOutOfRange(9))
        );
        let short = PovmConfig::new(vec![X]);
        assert!(weight_exponent(&k4(), &short).is_err());
    }

    #[test]
    fn frustrated_flip_has_zero_probability() {
        let tri = Lattice::from_edges(3, &[(0, 1), (1, 2), (2, 0)], &[[0, 1, 2]]).unwrap();
        let cfg = PovmConfig::new(vec![X, Y, Y]);
        assert_eq!(local_acceptance(&tri, &cfg, 0, Y).unwrap(), 0.0);
        assert!(local_acceptance(&tri, &cfg, 0, Z).unwrap() > 0.0);
        assert_eq!(PovmConfig::uniform(3, X).validate(&tri), Err(SamplerError::Frustrated));
    }

    #[test]
    fn random_start_respects_triangles() {
        let lat = build_lattice(LatticeKind::Star, 12, Boundary::Torus).unwrap();
        let mut rng = ChainRng::seed_from_u64(3);
        for _ in 0..20 {
            let cfg = PovmConfig::random(&lat, &mut rng);
            assert_eq!(cfg.monochromatic_triangles(&lat), 0);
        }
    }

    #[test]
    fn chain_params_validation() {
        let mut p = ChainParams {
            seed: 1,
            burn_in_sweeps: 0,
            measure_sweeps: 10,
            measure_interval: 1,
            n_chains: 1,
        };
        assert!(p.validate().is_ok());
        p.measure_interval = 0;
        assert!(p.validate().is_err());
        p.measure_interval = 1;
        p.n_chains = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn observer_errors_propagate() {
        let lat = k4();
        let params = ChainParams {
            seed: 7,
            burn_in_sweeps: 1,
            measure_sweeps: 4,
            measure_interval: 2,
            n_chains: 1,
        };
        let mut calls = 0;
        let mut obs = |m: &Measurement<'_>| {
            calls += 1;
            if m.sweep == 4 {
                Err(String::from("boom"))
            } else {
                Ok(())
            }
        };
        let err = run_chain(&lat, &params, 0, &mut [&mut obs]).unwrap_err();
        assert_eq!(err, SamplerError::Observer(String::from("boom")));
        assert_eq!(calls, 2);
    }

    #[test]
    fn chain_seeds_do_not_collide_across_master_seeds() {
        let mut seen = alloc::collections::BTreeSet::new();
        for master in 0..64 {
            for index in 0..64 {
                assert!(seen.insert(chain_seed(master, index)), "{master} {index}");
            }
        }
    }
}

//! Exact enumeration on small graphs, for validating the sampler.

use std::f64::consts::PI;

use aklt_core::lattice::Lattice;
use aklt_core::sampler::{chain_rng, local_acceptance, weight_exponent, PovmConfig, PovmLabel, Sampler};
use aklt_core::SamplerError;

/// Largest graph [`exact_distribution`] accepts.
pub const MAX_ENUMERATED_SITES: usize = 12;

/// Named cubic test graphs.
pub const TEST_GRAPHS: [&str; 4] = ["k4", "prism", "cube", "petersen"];

/// Builds a named test graph. The prism carries its two triangles, so its
/// configurations are frustrated like those of the star lattice.
pub fn test_graph(name: &str) -> Option<Lattice> {
    let (n, edges, triangles): (usize, Vec<(u32, u32)>, Vec<[u32; 3]>) = match name {
        "k4" => (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], vec![]),
        "prism" => (
            6,
            vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
            vec![[0, 1, 2], [3, 4, 5]],
        ),
        "cube" => (
            8,
            vec![
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 0),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 4),
                (0, 4),
                (1, 5),
                (2, 6),
                (3, 7),
            ],
            vec![],
        ),
        "petersen" => (
            10,
            vec![
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 0),
                (0, 5),
                (1, 6),
                (2, 7),
                (3, 8),
                (4, 9),
                (5, 7),
                (7, 9),
                (9, 6),
                (6, 8),
                (8, 5),
            ],
            vec![],
        ),
        _ => return None,
    };
    Lattice::from_edges(n, &edges, &triangles).ok()
}

/// Probability of every configuration, indexed by [`PovmConfig::to_index`].
/// Configurations with a monochromatic triangle get zero.
pub fn exact_distribution(lattice: &Lattice) -> Result<Vec<f64>, SamplerError> {
    let n = lattice.n_sites();
    if n > MAX_ENUMERATED_SITES {
        return Err(SamplerError::InvalidParams("graph too large to enumerate"));
    }
    let states = 3usize.pow(n as u32);
    let mut w = vec![0.0; states];
    for (i, slot) in w.iter_mut().enumerate() {
        let cfg = PovmConfig::from_index(n, i as u64);
        if cfg.monochromatic_triangles(lattice) == 0 {
            *slot = (weight_exponent(lattice, &cfg)? as f64).exp2();
        }
    }
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    Ok(w)
}

/// Visits of every configuration over `sweeps` Metropolis sweeps, recorded
/// after each sweep, starting from a random valid configuration.
pub fn sampled_histogram(lattice: &Lattice, sweeps: u64, seed: u64) -> Result<Vec<u64>, SamplerError> {
    let n = lattice.n_sites();
    if n > MAX_ENUMERATED_SITES {
        return Err(SamplerError::InvalidParams("graph too large to enumerate"));
    }
    let mut rng = chain_rng(seed, 0);
    let start = PovmConfig::random(lattice, &mut rng);
    let mut sampler = Sampler::new(lattice, start, rng)?;
    let mut counts = vec![0u64; 3usize.pow(n as u32)];
    for _ in 0..sweeps {
        sampler.sweep();
        counts[sampler.config().to_index() as usize] += 1;
    }
    Ok(counts)
}

/// Total variation distance between `p` and the empirical distribution of
/// `counts`.
pub fn tv_distance(p: &[f64], counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    0.5 * p
        .iter()
        .zip(counts)
        .map(|(&q, &c)| (q - c as f64 / total as f64).abs())
        .sum::<f64>()
}

/// Expected TV distance of `n` independent draws from `p`, to leading order.
pub fn tv_noise_floor(p: &[f64], n: u64) -> f64 {
    0.5 * p
        .iter()
        .map(|&q| (2.0 * q * (1.0 - q) / (PI * n as f64)).sqrt())
        .sum::<f64>()
}

/// Compares the local acceptance of every flip from every allowed
/// configuration with the global weight ratio. Returns `(checked,
/// mismatches)`.
pub fn check_local_against_global(lattice: &Lattice) -> Result<(u64, u64), SamplerError> {
    let n = lattice.n_sites();
    if n > MAX_ENUMERATED_SITES {
        return Err(SamplerError::InvalidParams("graph too large to enumerate"));
    }
    let mut checked = 0;
    let mut mismatches = 0;
    for i in 0..3u64.pow(n as u32) {
        let cfg = PovmConfig::from_index(n, i);
        if cfg.monochromatic_triangles(lattice) != 0 {
            continue;
        }
        let before = weight_exponent(lattice, &cfg)?;
        for site in 0..n as u32 {
            for new in PovmLabel::ALL {
                if new == cfg.get(site) {
                    continue;
                }
                let mut next = cfg.clone();
                next.set(site, new);
                let global = if next.monochromatic_triangles(lattice) != 0 {
                    0.0
                } else {
                    ((weight_exponent(lattice, &next)? - before) as f64).exp2().min(1.0)
                };
                checked += 1;
                if local_acceptance(lattice, &cfg, site, new)? != global {
                    mismatches += 1;
                }
            }
        }
    }
    Ok((checked, mismatches))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_graphs_are_cubic() {
        for name in TEST_GRAPHS {
            let g = test_graph(name).unwrap();
            assert!((0..g.n_sites() as u32).all(|v| g.degree(v) == 3), "{name}");
        }
        assert!(test_graph("dodecahedron").is_none());
    }

    #[test]
    fn distribution_is_normalized_and_respects_triangles() {
        let prism = test_graph("prism").unwrap();
        let p = exact_distribution(&prism).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let allowed = p.iter().filter(|&&q| q > 0.0).count();
        // 24 allowed labelings per triangle.
        assert_eq!(allowed, 24 * 24);
    }

    #[test]
    fn local_rule_is_exact_on_k4() {
        let (checked, bad) = check_local_against_global(&test_graph("k4").unwrap()).unwrap();
        assert_eq!(checked, 81 * 4 * 2);
        assert_eq!(bad, 0);
    }

    #[test]
    fn noise_floor_shrinks_with_samples() {
        let p = vec![0.25; 4];
        assert!(tv_noise_floor(&p, 100) > tv_noise_floor(&p, 10_000));
        assert_eq!(tv_distance(&p, &[1, 1, 1, 1]), 0.0);
    }
}

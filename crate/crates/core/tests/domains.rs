use std::collections::{BTreeMap, VecDeque};

use aklt_core::domain::{build_domain_graph, identify_domains, DomainPartition, GraphSample};
use aklt_core::lattice::{build_lattice, Boundary, Lattice, LatticeKind};
use aklt_core::sampler::{weight_exponent, PovmConfig, PovmLabel};
use proptest::prelude::*;

fn small(kind_index: usize, cylinder: bool) -> Lattice {
    let kind = LatticeKind::ALL[kind_index];
    let l = match kind {
        LatticeKind::Honeycomb | LatticeKind::SquareOctagon => 8,
        LatticeKind::Star => 6,
        LatticeKind::Cross => 12,
    };
    let bc = if cylinder { Boundary::Cylinder } else { Boundary::Torus };
    build_lattice(kind, l, bc).unwrap()
}

fn config_for(lat: &Lattice, raw: &[u8]) -> PovmConfig {
    PovmConfig::new(
        (0..lat.n_sites())
            .map(|i| PovmLabel::from_index(raw[i % raw.len()] % 3))
            .collect(),
    )
}

/// Same-label components by breadth-first search, as sorted member lists.
fn brute_components(lat: &Lattice, cfg: &PovmConfig) -> Vec<Vec<u32>> {
    let n = lat.n_sites();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n as u32 {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut comp = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in lat.neighbors(v) {
                if !seen[w as usize] && cfg.get(w) == cfg.get(v) {
                    seen[w as usize] = true;
                    comp.push(w);
                    q.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort();
    out
}

fn partition_components(p: &DomainPartition) -> Vec<Vec<u32>> {
    let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (s, &d) in p.domain_of().iter().enumerate() {
        groups.entry(d).or_default().push(s as u32);
    }
    let mut out: Vec<Vec<u32>> = groups.into_values().collect();
    out.sort();
    out
}

fn label_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..3, 1..400)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn domains_are_same_label_components(k in 0usize..4, cyl in any::<bool>(), raw in label_strategy()) {
        let lat = small(k, cyl);
        let cfg = config_for(&lat, &raw);
        let p = identify_domains(&lat, &cfg);
        prop_assert_eq!(partition_components(&p), brute_components(&lat, &cfg));
        let total: u32 = p.sizes().iter().sum();
        prop_assert_eq!(total as usize, lat.n_sites());
        prop_assert_eq!(p.n_internal_edges() + p.n_external_edges_multi(), lat.n_edges());
        // Ids follow the lowest member site.
        let firsts: Vec<u32> = partition_components(&p).iter().map(|c| c[0]).collect();
        let mut by_id = firsts.clone();
        by_id.sort_by_key(|&s| p.domain(s));
        prop_assert_eq!(by_id, { let mut f = firsts; f.sort(); f });
    }

    #[test]
    fn domain_graph_is_multigraph_mod_two(k in 0usize..4, cyl in any::<bool>(), raw in label_strategy()) {
        let lat = small(k, cyl);
        let cfg = config_for(&lat, &raw);
        let p = identify_domains(&lat, &cfg);
        let g = build_domain_graph(&lat, &p);
        let mut mult: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for &(a, b) in lat.edges() {
            let (da, db) = (p.domain(a), p.domain(b));
            if da != db {
                *mult.entry((da.min(db), da.max(db))).or_default() += 1;
            }
        }
        let odd: Vec<(u32, u32)> = mult.iter().filter(|(_, &m)| m % 2 == 1).map(|(&e, _)| e).collect();
        let mut got: Vec<(u32, u32)> = g.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        got.sort_unstable();
        prop_assert_eq!(got, odd);
        prop_assert_eq!(g.n_vertices(), p.n_domains());
        for (i, &(a, b)) in g.edges().iter().enumerate() {
            let (u, v) = lat.edge(g.witness()[i]);
            let (du, dv) = (p.domain(u), p.domain(v));
            prop_assert!((du, dv) == (a, b) || (dv, du) == (a, b));
        }
        let deg_sum: u32 = g.degrees().iter().sum();
        prop_assert_eq!(deg_sum as usize, 2 * g.n_edges());
        let sample = GraphSample::measure(&p, &g);
        if g.n_vertices() > 0 {
            prop_assert!((sample.avg_degree() - 2.0 * g.n_edges() as f64 / g.n_vertices() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn mod_two_reduction_is_idempotent(k in 0usize..4, raw in label_strategy()) {
        let lat = small(k, false);
        let cfg = config_for(&lat, &raw);
        let g = build_domain_graph(&lat, &identify_domains(&lat, &cfg));
        let as_lattice = Lattice::from_edges(g.n_vertices(), g.edges(), &[]).unwrap();
        let again = build_domain_graph(&as_lattice, &DomainPartition::identity(&as_lattice));
        prop_assert_eq!(again.edges(), g.edges());
    }

    #[test]
    fn weight_matches_external_edge_form(k in 0usize..4, raw in label_strategy()) {
        // 2^(|V| + |E_I|) and 2^(|V| - |E|) differ by the constant 2^|E(L)|.
        let lat = small(k, false);
        let cfg = config_for(&lat, &raw);
        let p = identify_domains(&lat, &cfg);
        let external = p.n_external_edges_multi() as i64;
        let exponent = weight_exponent(&lat, &cfg).unwrap();
        prop_assert_eq!(exponent - lat.n_edges() as i64, p.n_domains() as i64 - external);
    }
}

#[test]
fn k4_partitions_against_enumeration() {
    let k4 = Lattice::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], &[]).unwrap();
    for i in 0..81 {
        let cfg = PovmConfig::from_index(4, i);
        let p = identify_domains(&k4, &cfg);
        // On a complete graph domains are exactly the label classes.
        let classes = PovmLabel::ALL.iter().filter(|&&l| cfg.labels().contains(&l)).count();
        assert_eq!(p.n_domains(), classes);
        let g = build_domain_graph(&k4, &p);
        let sizes = p.sizes();
        let expected = (0..sizes.len())
            .flat_map(|a| (a + 1..sizes.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| sizes[a] * sizes[b] % 2 == 1)
            .count();
        assert_eq!(g.n_edges(), expected, "config {i}");
    }
}

#[test]
fn uniform_configuration_is_one_domain() {
    let lat = build_lattice(LatticeKind::Honeycomb, 8, Boundary::Torus).unwrap();
    let p = identify_domains(&lat, &PovmConfig::uniform(64, PovmLabel::X));
    assert_eq!(p.n_domains(), 1);
    assert_eq!(p.largest_domain(), 64);
    assert_eq!(build_domain_graph(&lat, &p).n_edges(), 0);
}

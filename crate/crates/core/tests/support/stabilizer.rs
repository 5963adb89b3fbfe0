//! A small stabilizer-tableau simulator (signs dropped) and local
//! complementation orbits, used as an oracle for the graph rewrite rules.
//!
//! Graphs here have at most 8 vertices and are adjacency bitmasks
//! `adj[v]`, or edge bitmasks over the pairs `(a, b)`, `a < b`.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use aklt_core::graph_rules::{Pauli, SimpleGraph};

/// One Pauli string as X and Z bitmasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Row {
    pub x: u32,
    pub z: u32,
}

impl Row {
    fn mul(self, o: Row) -> Row {
        Row {
            x: self.x ^ o.x,
            z: self.z ^ o.z,
        }
    }

    fn anticommutes(self, o: Row) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) % 2 == 1
    }
}

#[derive(Clone, Debug)]
pub struct Tableau {
    pub n: usize,
    pub rows: Vec<Row>,
}

impl Tableau {
    pub fn graph_state(adj: &[u32]) -> Self {
        Tableau {
            n: adj.len(),
            rows: adj.iter().enumerate().map(|(v, &a)| Row { x: 1 << v, z: a }).collect(),
        }
    }

    /// Measures `basis` on qubit `v` and removes the qubit.
    pub fn measure(&self, v: usize, basis: Pauli) -> Tableau {
        let p = match basis {
            Pauli::X => Row { x: 1 << v, z: 0 },
            Pauli::Y => Row { x: 1 << v, z: 1 << v },
            Pauli::Z => Row { x: 0, z: 1 << v },
        };
        let mut rows = self.rows.clone();
        if let Some(a) = rows.iter().position(|r| r.anticommutes(p)) {
            let pivot = rows[a];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != a && r.anticommutes(p) {
                    *r = r.mul(pivot);
                }
            }
            rows[a] = p;
        }
        // The group now contains ±P_v. Keep the subgroup acting trivially
        // on v: one pivot absorbs the action of every other row on v.
        let bit = 1u32 << v;
        let touches = |r: &Row| (r.x | r.z) & bit != 0;
        let pivot = rows.iter().position(touches).expect("qubit v is stabilized");
        let pr = rows[pivot];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != pivot && touches(r) {
                *r = r.mul(pr);
            }
        }
        rows.remove(pivot);
        let drop = |m: u32| (m & (bit - 1)) | ((m >> 1) & !(bit - 1));
        Tableau {
            n: self.n - 1,
            rows: rows
                .into_iter()
                .map(|r| Row {
                    x: drop(r.x),
                    z: drop(r.z),
                })
                .collect(),
        }
    }

    /// `sqrt(X)` on `v`: Z becomes Y, X is unchanged.
    pub fn sqrt_x(&mut self, v: usize) {
        for r in &mut self.rows {
            if r.z >> v & 1 == 1 {
                r.x ^= 1 << v;
            }
        }
    }

    /// `sqrt(Z)` on `v`: X becomes Y, Z is unchanged.
    pub fn sqrt_z(&mut self, v: usize) {
        for r in &mut self.rows {
            if r.x >> v & 1 == 1 {
                r.z ^= 1 << v;
            }
        }
    }

    /// Row-reduces the X block to the identity and returns the remaining Z
    /// block, or `None` if the X block is singular.
    fn reduced_z(&self) -> Option<Vec<u32>> {
        let mut rows = self.rows.clone();
        let n = self.n;
        for col in 0..n {
            let piv = (col..n).find(|&i| rows[i].x >> col & 1 == 1)?;
            rows.swap(col, piv);
            let pr = rows[col];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != col && r.x >> col & 1 == 1 {
                    *r = r.mul(pr);
                }
            }
        }
        let z: Vec<u32> = rows.iter().map(|r| r.z).collect();
        for a in 0..n {
            for b in 0..n {
                assert_eq!(z[a] >> b & 1, z[b] >> a & 1, "stabilizers must commute");
            }
        }
        Some(z)
    }

    /// The graph if the state is exactly a graph state.
    pub fn as_graph(&self) -> Option<Vec<u32>> {
        let z = self.reduced_z()?;
        z.iter().enumerate().all(|(a, m)| m >> a & 1 == 0).then_some(z)
    }

    /// A graph in the local Clifford class of the state: Hadamards on some
    /// qubits make the X block invertible, then phase gates clear the
    /// diagonal.
    pub fn to_graph_up_to_lc(&self) -> Vec<u32> {
        for h in 0u32..1 << self.n {
            let mut t = self.clone();
            for r in &mut t.rows {
                let (x, z) = (r.x, r.z);
                r.x = (x & !h) | (z & h);
                r.z = (z & !h) | (x & h);
            }
            if let Some(mut z) = t.reduced_z() {
                for (a, m) in z.iter_mut().enumerate() {
                    *m &= !(1 << a);
                }
                return z;
            }
        }
        panic!("no Hadamard layer makes the X block invertible");
    }
}

pub fn n_pairs(n: usize) -> usize {
    n * (n - 1) / 2
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

pub fn adj_to_mask(adj: &[u32]) -> u32 {
    let n = adj.len();
    let mut m = 0;
    for (a, &row) in adj.iter().enumerate() {
        for b in a + 1..n {
            if row >> b & 1 == 1 {
                m |= 1 << pair_index(n, a, b);
            }
        }
    }
    m
}

pub fn mask_to_adj(n: usize, mask: u32) -> Vec<u32> {
    let mut adj = vec![0u32; n];
    for a in 0..n {
        for b in a + 1..n {
            if mask >> pair_index(n, a, b) & 1 == 1 {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
    }
    adj
}

pub fn lc_adj(adj: &[u32], v: usize) -> Vec<u32> {
    let mut out = adj.to_vec();
    let nb = adj[v];
    for (a, row) in out.iter_mut().enumerate() {
        if nb >> a & 1 == 1 {
            *row ^= nb & !(1 << a);
        }
    }
    out
}

/// Every labeled graph on `n` vertices mapped to the id of its local
/// complementation orbit. Practical up to `n = 7`.
pub struct OrbitTable {
    pub n: usize,
    id: Vec<u32>,
}

impl OrbitTable {
    pub fn new(n: usize) -> Self {
        let total = 1usize << n_pairs(n);
        let mut id = vec![u32::MAX; total];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..total {
            if id[start] != u32::MAX {
                continue;
            }
            id[start] = next;
            stack.push(start as u32);
            while let Some(m) = stack.pop() {
                let adj = mask_to_adj(n, m);
                for v in 0..n {
                    let w = adj_to_mask(&lc_adj(&adj, v)) as usize;
                    if id[w] == u32::MAX {
                        id[w] = next;
                        stack.push(w as u32);
                    }
                }
            }
            next += 1;
        }
        OrbitTable { n, id }
    }

    pub fn equivalent(&self, a: &[u32], b: &[u32]) -> bool {
        self.id[adj_to_mask(a) as usize] == self.id[adj_to_mask(b) as usize]
    }
}

/// Local complementation equivalence by exhausting the orbit of `a`.
pub fn lc_equivalent(a: &[u32], b: &[u32]) -> bool {
    let target = adj_to_mask(b);
    let mut seen = BTreeSet::from([adj_to_mask(a)]);
    let mut frontier = vec![a.to_vec()];
    while let Some(g) = frontier.pop() {
        if adj_to_mask(&g) == target {
            return true;
        }
        for v in 0..g.len() {
            let h = lc_adj(&g, v);
            if seen.insert(adj_to_mask(&h)) {
                frontier.push(h);
            }
        }
    }
    false
}

pub fn simple_to_adj(g: &SimpleGraph) -> Vec<u32> {
    let (c, _) = g.compacted();
    let n = c.n_vertices();
    let mut adj = vec![0u32; n];
    for (a, b) in c.edges() {
        adj[a as usize] |= 1 << b;
        adj[b as usize] |= 1 << a;
    }
    adj
}

pub fn adj_to_simple(adj: &[u32]) -> SimpleGraph {
    let n = adj.len();
    let edges: Vec<(u32, u32)> = (0..n)
        .flat_map(|a| {
            (a + 1..n)
                .filter(move |&b| adj[a] >> b & 1 == 1)
                .map(move |b| (a as u32, b as u32))
        })
        .collect();
    SimpleGraph::from_edges(n as u32, &edges)
}

/// Orbit tables built once per vertex count.
#[derive(Default)]
pub struct Orbits {
    tables: HashMap<usize, OrbitTable>,
}

impl Orbits {
    pub fn equivalent(&mut self, a: &[u32], b: &[u32]) -> bool {
        assert_eq!(a.len(), b.len());
        let n = a.len();
        if n <= 1 {
            return true;
        }
        if n <= 7 {
            self.tables
                .entry(n)
                .or_insert_with(|| OrbitTable::new(n))
                .equivalent(a, b)
        } else {
            lc_equivalent(a, b)
        }
    }
}

/// Smallest edge mask over all relabelings.
pub fn canonical_mask(adj: &[u32]) -> u32 {
    let n = adj.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).filter(move |&b| adj[a] >> b & 1 == 1).map(move |b| (a, b)))
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u32::MAX;
    let mut visit = |perm: &[usize]| {
        let m = edges
            .iter()
            .fold(0u32, |m, &(a, b)| m | 1 << pair_index(n, perm[a], perm[b]));
        best = best.min(m);
    };
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// One representative of every isomorphism class of graphs on `n`
/// vertices, built by adding a vertex to each class on `n - 1` vertices.
pub fn isomorphism_classes(n: usize) -> Vec<Vec<u32>> {
    let mut classes = vec![vec![]];
    for k in 1..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for base in &classes {
            for nb in 0u32..1 << (k - 1) {
                let g = extend(base, nb);
                if seen.insert(canonical_mask(&g)) {
                    next.push(g);
                }
            }
        }
        classes = next;
    }
    classes
}

/// `base` plus a new last vertex joined to the vertices in `nb`.
pub fn extend(base: &[u32], nb: u32) -> Vec<u32> {
    let k = base.len();
    let mut g = base.to_vec();
    for (v, a) in g.iter_mut().enumerate() {
        if nb >> v & 1 == 1 {
            *a |= 1 << k;
        }
    }
    g.push(nb);
    g
}

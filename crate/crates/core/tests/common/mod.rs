//! Reference computations for the integration tests. Each one is written
//! independently of the library routine it checks, favouring brute force
//! over speed.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::sample::Index;
use splicekit::equations::{deformation_monomials, WeightFilter};
use splicekit::graph::serialize_graph;
use splicekit::group::{discriminant_action, monomial_character, Character, DiscriminantAction};
use splicekit::semigroup::{admissible_monomials, DEFAULT_CAP};
use splicekit::{linking_table, parse_graph, splice_from_resolution, Monomial, ResolutionGraph};

pub const MAIN: &str = include_str!("../../graphs/main_example.sg");
pub const SEMIGROUP_FAIL: &str = include_str!("../../graphs/semigroup_fail.sg");
pub const CONGRUENCE_FAIL: &str = include_str!("../../graphs/congruence_fail.sg");
pub const E8: &str = include_str!("../../graphs/e8.sg");
pub const STAR_2_2_5: &str = include_str!("../../graphs/star_2_2_5.sg");
pub const SINGLE: &str = include_str!("../../graphs/single.sg");

pub fn fixture(text: &str) -> ResolutionGraph {
    parse_graph(text).expect("fixture parses")
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
            .collect();
        let term = BigInt::from(m[0][j]) * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `−A(Γ)` as plain integers.
pub fn negated_form(g: &ResolutionGraph) -> Vec<Vec<i64>> {
    let n = g.len();
    let mut m = vec![vec![0i64; n]; n];
    for (i, v) in g.vertices().iter().enumerate() {
        m[i][i] = -v.weight;
    }
    for &(a, b) in g.edges() {
        m[a][b] = -1;
        m[b][a] = -1;
    }
    m
}

/// Pivots of `−A(Γ)` when vertices are eliminated leaf by leaf, each leaf
/// folding `1/pivot` into its neighbour's diagonal. This is an `LDLᵀ`
/// factorization in a tree-adapted order. `None` on a zero pivot.
pub fn leaf_pivots(g: &ResolutionGraph) -> Option<Vec<BigRational>> {
    let n = g.len();
    let mut diag: Vec<BigRational> =
        g.vertices().iter().map(|v| BigRational::from_integer(BigInt::from(-v.weight))).collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(a, b) in g.edges() {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut alive = vec![true; n];
    let mut pivots = Vec::with_capacity(n);
    for _ in 0..n {
        let x = (0..n).find(|&i| alive[i] && adj[i].len() <= 1)?;
        let p = diag[x].clone();
        if p.is_zero() {
            return None;
        }
        if let Some(&y) = adj[x].iter().next() {
            diag[y] = &diag[y] - p.recip();
            adj[y].remove(&x);
        }
        adj[x].clear();
        alive[x] = false;
        pivots.push(p);
    }
    Some(pivots)
}

/// Negative definiteness from the signs of the leaf-elimination pivots.
pub fn ldl_negative_definite(g: &ResolutionGraph) -> bool {
    leaf_pivots(g).is_some_and(|p| p.iter().all(Signed::is_positive))
}

/// `det(−A(Γ))` as the product of leaf-elimination pivots.
pub fn schur_det(g: &ResolutionGraph) -> Option<BigInt> {
    let prod = leaf_pivots(g)?.into_iter().fold(BigRational::one(), |acc, p| acc * p);
    assert!(prod.is_integer());
    Some(prod.to_integer())
}

/// Tries every multiplier tuple with `α_i ≤ target / g_i`.
pub fn brute_member(target: u64, gens: &[u64]) -> bool {
    match gens.split_first() {
        None => target == 0,
        Some((&g, rest)) => (0..=target / g).any(|k| brute_member(target - k * g, rest)),
    }
}

/// Every sum `Σ α_i g_i ≤ limit`, marked by walking all such tuples.
pub fn brute_reachable(limit: u64, gens: &[u64]) -> Vec<bool> {
    fn walk(sum: u64, gens: &[u64], limit: u64, out: &mut [bool]) {
        match gens.split_first() {
            None => out[sum as usize] = true,
            Some((&g, rest)) => {
                let mut s = sum;
                while s <= limit {
                    walk(s, rest, limit, out);
                    s += g;
                }
            }
        }
    }
    let mut out = vec![false; limit as usize + 1];
    walk(0, gens, limit, &mut out);
    out
}

/// Exponent vectors over `vars` variables with total degree ≤ `bound`,
/// produced by an odometer over `[0, bound]^vars`.
pub fn brute_monomials(vars: usize, bound: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut e = vec![0u64; vars];
    loop {
        if e.iter().sum::<u64>() <= bound {
            out.push(Monomial::new(e.clone()));
        }
        let mut k = 0;
        loop {
            if k == vars {
                return out;
            }
            if e[k] < bound {
                e[k] += 1;
                break;
            }
            e[k] = 0;
            k += 1;
        }
    }
}

/// Every group element as numerators over the group order, which every
/// coordinate denominator divides.
pub struct ElementTable {
    modulus: u64,
    rows: Vec<Vec<u64>>,
}

impl ElementTable {
    pub fn new(a: &DiscriminantAction) -> Self {
        let modulus = a.order();
        let rows =
            a.elements().map(|g| g.coords().iter().map(|p| p.numer() * (modulus / p.denom())).collect()).collect();
        Self { modulus, rows }
    }

    /// `Σ_k e_k · g_k mod 1` on every element, as numerators.
    pub fn character(&self, m: &Monomial) -> Vec<u64> {
        let l = u128::from(self.modulus);
        self.rows
            .iter()
            .map(|g| {
                let s: u128 = g.iter().zip(m.exponents()).map(|(&x, &e)| u128::from(x) * u128::from(e) % l).sum();
                (s % l) as u64
            })
            .collect()
    }

    pub fn numerators(&self, c: &Character) -> Vec<u64> {
        c.values.iter().map(|p| p.numer() * (self.modulus / p.denom())).collect()
    }
}

/// Decodes a Prüfer sequence over vertices `0..seq.len() + 2`.
pub fn prufer_edges(seq: &[usize]) -> Vec<(usize, usize)> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let last: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((last[0], last[1]));
    edges
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Relabelling-minimal `(weights, sorted edges)` over all vertex permutations.
pub fn brute_canonical(weights: &[i64], edges: &[(usize, usize)]) -> (Vec<i64>, Vec<(usize, usize)>) {
    permutations(weights.len())
        .into_iter()
        .map(|p| {
            let w: Vec<i64> = (0..weights.len()).map(|k| weights[p.iter().position(|&x| x == k).unwrap()]).collect();
            let mut e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
            e.sort_unstable();
            (w, e)
        })
        .min()
        .unwrap()
}

pub fn graph_from(weights: &[i64], edges: &[(usize, usize)]) -> ResolutionGraph {
    let ids: Vec<String> = (1..=weights.len()).map(|i| format!("v{i}")).collect();
    ResolutionGraph::new(
        ids.iter().zip(weights).map(|(id, &w)| (id.as_str(), w)),
        edges.iter().map(|&(a, b)| (ids[a].as_str(), ids[b].as_str())),
    )
    .unwrap()
}

/// Isomorphism classes of negative definite trees on exactly `n` vertices
/// with weights in `[weight_min, -1]`, by labelled enumeration.
pub fn brute_tree_classes(n: usize, weight_min: i64) -> usize {
    let shapes: Vec<Vec<(usize, usize)>> = if n == 1 {
        vec![Vec::new()]
    } else {
        let mut seqs = vec![Vec::new()];
        for _ in 0..n - 2 {
            seqs = seqs
                .into_iter()
                .flat_map(|s: Vec<usize>| {
                    (0..n).map(move |x| {
                        let mut t = s.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        seqs.iter().map(|s| prufer_edges(s)).collect()
    };
    let span = (-weight_min) as usize;
    let mut seen = BTreeSet::new();
    for edges in &shapes {
        for code in 0..span.pow(n as u32) {
            let weights: Vec<i64> = (0..n).map(|i| -1 - ((code / span.pow(i as u32)) % span) as i64).collect();
            let key = brute_canonical(&weights, edges);
            if seen.contains(&key) {
                continue;
            }
            if ldl_negative_definite(&graph_from(&weights, edges)) {
                seen.insert(key);
            }
        }
    }
    seen.len()
}

/// Random weighted trees (not necessarily definite).
pub fn any_tree(max_n: usize, weight_min: i64) -> impl Strategy<Value = ResolutionGraph> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            (proptest::collection::vec(any::<Index>(), n - 1), proptest::collection::vec(weight_min..=-1i64, n))
        })
        .prop_map(|(parents, weights)| {
            let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(k, p)| (p.index(k + 1), k + 1)).collect();
            graph_from(&weights, &edges)
        })
}

/// Random negative definite trees. Indefinite draws are repaired by making
/// every weight at most minus the valence, strictly so at the first vertex,
/// which makes `−A` irreducibly diagonally dominant.
pub fn definite_tree(max_n: usize, weight_min: i64) -> impl Strategy<Value = ResolutionGraph> {
    any_tree(max_n, weight_min).prop_map(|g| {
        if g.is_negative_definite() {
            return g;
        }
        let weights: Vec<i64> = g
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let val = g.valence(i) as i64 + i64::from(i == 0);
                v.weight.min(-val)
            })
            .collect();
        graph_from(&weights, g.edges())
    })
}

/// Random vertex order for a graph of size `n`.
pub fn shuffled(g: &ResolutionGraph, keys: &[u32]) -> ResolutionGraph {
    let mut perm: Vec<usize> = (0..g.len()).collect();
    perm.sort_by_key(|&i| (keys[i % keys.len()].wrapping_mul(i as u32 + 7), i));
    g.reordered(&perm)
}

pub fn round_trip(g: &ResolutionGraph) -> ResolutionGraph {
    parse_graph(&serialize_graph(g)).unwrap()
}

/// Compares `deformation_monomials` with a filter over every monomial up to
/// the bound, for each node, several target characters and both filters.
pub fn check_deformations(g: &ResolutionGraph, bound: u64) -> usize {
    let Ok(d) = splice_from_resolution(g) else { return 0 };
    let lt = linking_table(&d);
    let (_, a) = discriminant_action(g, 1 << 20).unwrap();
    let n = d.num_ends();
    let heavy = |m: &Monomial, v: usize| {
        (0..n).map(|w| u128::from(m.exponent(w)) * u128::from(lt.ell(v, w))).sum::<u128>()
            >= u128::from(lt.node_weight(v))
    };
    let table = ElementTable::new(&a);
    let all = brute_monomials(n, bound);
    let mut checked = 0;
    for &v in d.nodes() {
        let mut targets: Vec<Monomial> = (0..n).map(|w| Monomial::power(n, w, 1)).collect();
        for &e in d.incident(v) {
            targets.extend(admissible_monomials(&d, &lt, v, e, DEFAULT_CAP).unwrap().monomials.first().cloned());
        }
        for t in &targets {
            let target = monomial_character(&a, t);
            let values = table.numerators(&target);
            for filter in [WeightFilter::Node(v), WeightFilter::AllNodes] {
                let ours = deformation_monomials(&d, &lt, &a, &target, filter, bound);
                let mut brute: Vec<Monomial> = all
                    .iter()
                    .filter(|m| match filter {
                        WeightFilter::Node(v) => heavy(m, v),
                        WeightFilter::AllNodes => d.nodes().iter().all(|&u| heavy(m, u)),
                    })
                    .filter(|m| table.character(m) == values)
                    .cloned()
                    .collect();
                brute.sort();
                assert_eq!(ours, brute, "{} node {} target {t:?}", g.canonical_code(), d.id(v));
                checked += 1;
            }
        }
    }
    checked
}

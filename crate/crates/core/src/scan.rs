//! Enumeration of small negative definite weighted trees and a survey of
//! their verdicts.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::congruence::search_congruence;
use crate::graph::{serialize_graph, ResolutionGraph, Vertex};
use crate::group::action_generators;
use crate::linalg::{self, IntMatrix};
use crate::semigroup::{check_semigroup_condition, DEFAULT_CAP};
use crate::splice::{linking_table, splice_from_resolution, SpliceError};

/// Largest tree size accepted by the enumerator.
pub const MAX_VERTICES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScanError {
    #[error("max vertices {0} exceeds the limit of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("max vertices must be at least 1")]
    NoVertices,
    #[error("minimum weight {0} must be ≤ −1")]
    WeightRange(i64),
}

fn check_params(max_vertices: usize, weight_min: i64) -> Result<(), ScanError> {
    if max_vertices == 0 {
        return Err(ScanError::NoVertices);
    }
    if max_vertices > MAX_VERTICES {
        return Err(ScanError::TooManyVertices(max_vertices));
    }
    if weight_min > -1 {
        return Err(ScanError::WeightRange(weight_min));
    }
    Ok(())
}

/// Unlabeled trees on `n` vertices as parent arrays in breadth-first order
/// (`parent[0]` is unused).
fn tree_shapes(n: usize) -> Vec<Vec<usize>> {
    let mut shapes: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for edges in &shapes {
            for attach in 0..size - 1 {
                let mut grown = edges.clone();
                grown.push((attach, size - 1));
                let code = unweighted(size, &grown).canonical_code();
                if seen.insert(code) {
                    next.push(grown);
                }
            }
        }
        shapes = next;
    }
    shapes.into_iter().map(|edges| bfs_parents(n, &edges)).collect()
}

fn unweighted(n: usize, edges: &[(usize, usize)]) -> ResolutionGraph {
    let vertices = (0..n).map(|i| Vertex { id: format!("v{}", i + 1), weight: -2 }).collect();
    ResolutionGraph::from_parts(vertices, edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect())
}

/// Relabels a tree breadth first from vertex 0, returning parents.
fn bfs_parents(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut order = vec![0usize];
    let mut parent_old = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        for &x in &adj[u] {
            if !seen[x] {
                seen[x] = true;
                parent_old[x] = u;
                order.push(x);
            }
        }
        i += 1;
    }
    let mut new_index = vec![0; n];
    for (k, &old) in order.iter().enumerate() {
        new_index[old] = k;
    }
    let mut parents = vec![0; n];
    for (k, &old) in order.iter().enumerate().skip(1) {
        parents[k] = new_index[parent_old[old]];
    }
    parents
}

fn build_graph(weights: &[i64], parents: &[usize]) -> ResolutionGraph {
    let vertices = weights.iter().enumerate().map(|(i, &w)| Vertex { id: format!("v{}", i + 1), weight: w }).collect();
    let mut edges: Vec<(usize, usize)> = (1..weights.len()).map(|k| (parents[k], k)).collect();
    edges.sort_unstable();
    ResolutionGraph::from_parts(vertices, edges)
}

/// Positive-definiteness of `−A` on the first `k` vertices, via the
/// leading principal minor (the earlier minors were checked on the way down).
fn prefix_definite(weights: &[i64], parents: &[usize]) -> bool {
    let k = weights.len();
    let entry = |i: usize, j: usize| -> i64 {
        if i == j {
            -weights[i]
        } else if (j > 0 && parents[j] == i) || (i > 0 && parents[i] == j) {
            -1
        } else {
            0
        }
    };
    match small_determinant(k, entry) {
        Some(det) => det > 0,
        None => {
            let m = IntMatrix::from_fn(k, k, |i, j| entry(i, j).into());
            linalg::determinant(&m).expect("square") > 0.into()
        }
    }
}

/// Bareiss determinant in `i128`; `None` on overflow.
fn small_determinant(n: usize, entry: impl Fn(usize, usize) -> i64) -> Option<i128> {
    let mut a = [[0i128; MAX_VERTICES]; MAX_VERTICES];
    for (i, row) in a.iter_mut().enumerate().take(n) {
        for (j, x) in row.iter_mut().enumerate().take(n) {
            *x = entry(i, j).into();
        }
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let p = (k + 1..n).find(|&i| a[i][k] != 0);
            match p {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    Some(if n == 0 { 1 } else { sign * a[n - 1][n - 1] })
}

/// Every isomorphism class of tree with at most `max_vertices` vertices and
/// weights in `[weight_min, −1]` whose intersection form is negative definite.
///
/// Order: by size, then by shape, then weights from −1 downward in
/// breadth-first vertex order; the first representative of each class is kept.
pub fn enumerate_trees(max_vertices: usize, weight_min: i64) -> Result<Vec<ResolutionGraph>, ScanError> {
    check_params(max_vertices, weight_min)?;
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        for parents in tree_shapes(n) {
            let mut found: Vec<ResolutionGraph> = Vec::new();
            let mut weights = Vec::with_capacity(n);
            assign(&parents, n, weight_min, &mut weights, &mut |w| found.push(build_graph(w, &parents)));
            let mut seen = HashSet::new();
            out.extend(found.into_iter().filter(|g| seen.insert(g.canonical_code())));
        }
    }
    Ok(out)
}

fn assign(parents: &[usize], n: usize, weight_min: i64, weights: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
    if weights.len() == n {
        emit(weights);
        return;
    }
    for w in (weight_min..=-1).rev() {
        weights.push(w);
        if prefix_definite(weights, parents) {
            assign(parents, n, weight_min, weights, emit);
        }
        weights.pop();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictClass {
    /// The graph could not be analysed (validation or a resource limit).
    Invalid,
    NoNodes,
    SemigroupFail,
    CongruenceFail,
    AllPass,
}

impl VerdictClass {
    pub const ALL: [VerdictClass; 5] = [
        VerdictClass::Invalid,
        VerdictClass::NoNodes,
        VerdictClass::SemigroupFail,
        VerdictClass::CongruenceFail,
        VerdictClass::AllPass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerdictClass::Invalid => "invalid",
            VerdictClass::NoNodes => "no-nodes",
            VerdictClass::SemigroupFail => "semigroup-fail",
            VerdictClass::CongruenceFail => "congruence-fail",
            VerdictClass::AllPass => "all-pass",
        }
    }
}

/// Verdict class of one graph, using characters on the generators only.
///
/// A congruence search that was truncated without success counts as
/// `Invalid`, since its failure is not certified.
pub fn classify(g: &ResolutionGraph, cap: usize) -> VerdictClass {
    let d = match splice_from_resolution(g) {
        Ok(d) => d,
        Err(SpliceError::NoNodes) => return VerdictClass::NoNodes,
        Err(_) => return VerdictClass::Invalid,
    };
    let lt = linking_table(&d);
    match check_semigroup_condition(&d, &lt) {
        Ok(v) if !v.holds => return VerdictClass::SemigroupFail,
        Ok(_) => {}
        Err(_) => return VerdictClass::Invalid,
    }
    let Ok(gens) = action_generators(g) else {
        return VerdictClass::Invalid;
    };
    match search_congruence(&d, &lt, &gens.generators, cap) {
        Ok(c) if c.holds => VerdictClass::AllPass,
        Ok(c) if c.exhaustive => VerdictClass::CongruenceFail,
        _ => VerdictClass::Invalid,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exemplar {
    pub code: String,
    pub graph: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub schema: u32,
    pub max_vertices: usize,
    pub weight_min: i64,
    pub total: usize,
    pub counts: BTreeMap<&'static str, usize>,
    pub exemplars: BTreeMap<&'static str, Vec<Exemplar>>,
}

impl ScanSummary {
    pub fn count(&self, class: VerdictClass) -> usize {
        self.counts[class.name()]
    }

    /// Whether a graph with this canonical code is among the class's exemplars.
    pub fn contains(&self, class: VerdictClass, code: &str) -> bool {
        self.exemplars[class.name()].iter().any(|e| e.code == code)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub cap: usize,
    /// Exemplars kept per class; `None` keeps every graph.
    pub exemplar_limit: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP, exemplar_limit: Some(5) }
    }
}

/// Classifies every enumerated tree (in parallel) and tallies the classes in
/// enumeration order.
pub fn scan(max_vertices: usize, weight_min: i64, opts: &ScanOptions) -> Result<ScanSummary, ScanError> {
    let graphs = enumerate_trees(max_vertices, weight_min)?;
    let classes: Vec<VerdictClass> = graphs.par_iter().map(|g| classify(g, opts.cap)).collect();
    let mut counts: BTreeMap<&'static str, usize> = VerdictClass::ALL.iter().map(|c| (c.name(), 0)).collect();
    let mut exemplars: BTreeMap<&'static str, Vec<Exemplar>> =
        VerdictClass::ALL.iter().map(|c| (c.name(), Vec::new())).collect();
    for (g, class) in graphs.iter().zip(&classes) {
        *counts.get_mut(class.name()).expect("all classes present") += 1;
        let list = exemplars.get_mut(class.name()).expect("all classes present");
        if opts.exemplar_limit.is_none_or(|limit| list.len() < limit) {
            list.push(Exemplar { code: g.canonical_code(), graph: serialize_graph(g) });
        }
    }
    Ok(ScanSummary {
        schema: crate::report::SCHEMA_VERSION,
        max_vertices,
        weight_min,
        total: graphs.len(),
        counts,
        exemplars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn shape_counts() {
        // unlabeled trees on 1..=10 vertices
        let counts: Vec<usize> = (1..=10).map(|n| tree_shapes(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
    }

    #[test]
    fn tiny_enumerations() {
        let one = enumerate_trees(1, -2).unwrap();
        let weights: Vec<i64> = one.iter().map(|g| g.vertices()[0].weight).collect();
        assert_eq!(weights, vec![-1, -2]);
        // pairs from {−1, −2} up to swapping, minus (−1)−(−1)
        let two = enumerate_trees(2, -2).unwrap();
        assert_eq!(two.len(), 2 + 2);
        assert!(two.iter().all(|g| g.is_negative_definite()));
    }

    #[test]
    fn guards() {
        assert_eq!(enumerate_trees(11, -2).unwrap_err(), ScanError::TooManyVertices(11));
        assert_eq!(enumerate_trees(3, 0).unwrap_err(), ScanError::WeightRange(0));
        assert_eq!(enumerate_trees(0, -2).unwrap_err(), ScanError::NoVertices);
    }

    #[test]
    fn smallest_scan() {
        let s = scan(1, -2, &ScanOptions::default()).unwrap();
        assert_eq!(s.total, 2);
        assert_eq!(s.count(VerdictClass::NoNodes), 2);
    }

    #[test]
    fn classify_fixtures() {
        let class = |t: &str| classify(&parse_graph(t).unwrap(), DEFAULT_CAP);
        assert_eq!(class(include_str!("../graphs/main_example.sg")), VerdictClass::AllPass);
        assert_eq!(class(include_str!("../graphs/semigroup_fail.sg")), VerdictClass::SemigroupFail);
        assert_eq!(class(include_str!("../graphs/congruence_fail.sg")), VerdictClass::CongruenceFail);
        assert_eq!(class(include_str!("../graphs/single.sg")), VerdictClass::NoNodes);
    }
}

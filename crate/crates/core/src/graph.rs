//! Weighted resolution trees and their intersection forms.
//!
//! Graph file format (line oriented, UTF-8):
//!
//! ```text
//! # comment
//! splicegraph 1
//! vertex <id> <weight>
//! edge <id> <id>
//! ```

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, IntMatrix};

pub const FORMAT_HEADER: &str = "splicegraph 1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge references unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("repeated edge between `{0}` and `{1}`")]
    MultiEdge(String, String),
    #[error("graph has no vertices")]
    Empty,
    #[error("not a tree: {0}")]
    NotATree(&'static str),
    #[error("intersection matrix is not negative definite")]
    NotNegativeDefinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Vertex {
    pub id: String,
    /// Self-intersection number `E_v · E_v`.
    pub weight: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexClass {
    /// valence ≥ 3
    Node,
    /// valence 1
    End,
    /// valence 2
    StringInterior,
    /// valence 0
    Isolated,
}

impl VertexClass {
    pub fn from_valence(valence: usize) -> Self {
        match valence {
            0 => Self::Isolated,
            1 => Self::End,
            2 => Self::StringInterior,
            _ => Self::Node,
        }
    }
}

/// A weighted graph of rational exceptional curves.
///
/// Edges are stored as index pairs `(i, j)` with `i < j`, sorted. Negative
/// definiteness is computed on first use and cached.
#[derive(Debug, Clone)]
pub struct ResolutionGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    definite: OnceLock<bool>,
}

impl PartialEq for ResolutionGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for ResolutionGraph {}

impl ResolutionGraph {
    /// Checks ids and edge endpoints but not the tree shape.
    pub fn new<I, E, S>(vertices: I, edges: E) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (S, i64)>,
        E: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut index = HashMap::new();
        let mut verts = Vec::new();
        for (id, weight) in vertices {
            let id = id.as_ref().to_string();
            if index.insert(id.clone(), verts.len()).is_some() {
                return Err(GraphError::DuplicateVertex(id));
            }
            verts.push(Vertex { id, weight });
        }
        if verts.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| GraphError::UnknownVertex(a.to_string()))?;
            let ib = *index.get(b).ok_or_else(|| GraphError::UnknownVertex(b.to_string()))?;
            if ia == ib {
                return Err(GraphError::SelfLoop(a.to_string()));
            }
            if !edge_set.insert((ia.min(ib), ia.max(ib))) {
                return Err(GraphError::MultiEdge(a.to_string(), b.to_string()));
            }
        }
        Ok(Self::from_parts(verts, edge_set.into_iter().collect()))
    }

    pub(crate) fn from_parts(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Self { vertices, edges, adjacency, definite: OnceLock::new() }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn class(&self, v: usize) -> VertexClass {
        VertexClass::from_valence(self.valence(v))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    /// Vertex indices of valence 1, in vertex order.
    pub fn ends(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.valence(v) == 1).collect()
    }

    /// Vertex indices of valence ≥ 3, in vertex order.
    pub fn nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.valence(v) >= 3).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.reachable_from(0, None).len() == self.len()
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.len() && self.is_connected()
    }

    /// Vertices reachable from `start` without stepping onto `blocked`,
    /// sorted by index.
    pub fn reachable_from(&self, start: usize, blocked: Option<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        if let Some(b) = blocked {
            seen[b] = true;
        }
        let mut queue = VecDeque::from([start]);
        let mut out = vec![start];
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The part of the tree cut off by the edge `from – toward`, on the side
    /// of `toward`.
    pub fn branch(&self, from: usize, toward: usize) -> Vec<usize> {
        self.reachable_from(toward, Some(from))
    }

    /// Intersection matrix `A(Γ)` restricted to the given vertex subset.
    pub fn intersection_submatrix(&self, subset: &[usize]) -> IntMatrix {
        let full = self.intersection_matrix();
        full.select(subset, subset)
    }

    pub fn intersection_matrix(&self) -> IntMatrix {
        let n = self.len();
        IntMatrix::from_fn(n, n, |i, j| {
            if i == j {
                BigInt::from(self.vertices[i].weight)
            } else if self.adjacency[i].binary_search(&j).is_ok() {
                BigInt::from(1)
            } else {
                BigInt::from(0)
            }
        })
    }

    pub fn is_negative_definite(&self) -> bool {
        *self.definite.get_or_init(|| {
            linalg::is_negative_definite(&self.intersection_matrix())
                .expect("intersection matrices are square and symmetric")
        })
    }

    pub fn require_negative_definite(&self) -> Result<(), GraphError> {
        if self.is_negative_definite() {
            Ok(())
        } else {
            Err(GraphError::NotNegativeDefinite)
        }
    }

    /// Full validation: tree shape plus negative definiteness.
    pub fn require_valid(&self) -> Result<(), GraphError> {
        if !self.is_connected() {
            return Err(GraphError::NotATree("graph is disconnected"));
        }
        if !self.is_tree() {
            return Err(GraphError::NotATree("graph contains a cycle"));
        }
        self.require_negative_definite()
    }

    /// Same graph with vertices listed in the order `perm` (`perm[k]` is the
    /// old index of the new k-th vertex).
    pub fn reordered(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len());
        let mut new_index = vec![0; perm.len()];
        for (k, &old) in perm.iter().enumerate() {
            new_index[old] = k;
        }
        let vertices = perm.iter().map(|&old| self.vertices[old].clone()).collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (new_index[a], new_index[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        Self::from_parts(vertices, edges)
    }

    /// Isomorphism-invariant code of the weighted tree.
    ///
    /// The tree is rooted at its center (both centers for a bicentral tree,
    /// keeping the smaller code) and encoded as `(weight child-codes…)` with
    /// child codes sorted.
    pub fn canonical_code(&self) -> String {
        assert!(self.is_tree(), "canonical codes are defined for trees");
        self.centers().into_iter().map(|c| self.rooted_code(c, None)).min().expect("a tree has at least one center")
    }

    pub(crate) fn centers(&self) -> Vec<usize> {
        let n = self.len();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut degree: Vec<usize> = (0..n).map(|v| self.valence(v)).collect();
        let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= leaves.len();
            let mut next = Vec::new();
            for &leaf in &leaves {
                degree[leaf] = 0;
                for &nb in &self.adjacency[leaf] {
                    if degree[nb] > 0 {
                        degree[nb] -= 1;
                        if degree[nb] == 1 {
                            next.push(nb);
                        }
                    }
                }
            }
            leaves = next;
        }
        leaves.sort_unstable();
        leaves
    }

    pub(crate) fn rooted_code(&self, root: usize, parent: Option<usize>) -> String {
        let mut children: Vec<String> = self.adjacency[root]
            .iter()
            .filter(|&&c| Some(c) != parent)
            .map(|&c| self.rooted_code(c, Some(root)))
            .collect();
        children.sort();
        let mut code = format!("({}", self.vertices[root].weight);
        for c in children {
            code.push_str(&c);
        }
        code.push(')');
        code
    }
}

/// Parses the graph file format and checks that the result is a tree.
///
/// Negative definiteness is left to [`validate`].
pub fn parse_graph(text: &str) -> Result<ResolutionGraph, GraphError> {
    let mut seen_header = false;
    let mut vertices: Vec<(String, i64)> = Vec::new();
    let mut vertex_lines: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(String, String)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens = tokenize(raw);
        let syntax = |column: usize, message: String| GraphError::Syntax { line, column, message };
        let (kw_col, keyword) = tokens[0];
        if !seen_header {
            if keyword != "splicegraph" {
                return Err(syntax(kw_col, format!("expected header `{FORMAT_HEADER}`")));
            }
            match tokens.get(1) {
                Some(&(_, "1")) if tokens.len() == 2 => {}
                Some(&(col, v)) => {
                    return Err(syntax(col, format!("unsupported format version `{v}`")));
                }
                None => return Err(syntax(kw_col + keyword.len(), "missing format version".into())),
            }
            seen_header = true;
            continue;
        }
        match keyword {
            "vertex" => {
                if tokens.len() != 3 {
                    let col = tokens.get(3).map_or(raw.trim_end().len() + 1, |t| t.0);
                    return Err(syntax(col, "expected `vertex <id> <integer-weight>`".into()));
                }
                let id = tokens[1].1;
                let (w_col, w) = tokens[2];
                let weight: i64 = w.parse().map_err(|_| syntax(w_col, format!("invalid integer weight `{w}`")))?;
                if vertex_lines.insert(id.to_string(), line).is_some() {
                    return Err(GraphError::DuplicateVertex(id.to_string()));
                }
                vertices.push((id.to_string(), weight));
            }
            "edge" => {
                if tokens.len() != 3 {
                    let col = tokens.get(3).map_or(raw.trim_end().len() + 1, |t| t.0);
                    return Err(syntax(col, "expected `edge <id> <id>`".into()));
                }
                edges.push((tokens[1].1.to_string(), tokens[2].1.to_string()));
            }
            "splicegraph" => return Err(syntax(kw_col, "repeated header".into())),
            other => return Err(syntax(kw_col, format!("unknown directive `{other}`"))),
        }
    }
    if !seen_header {
        return Err(GraphError::Syntax {
            line: text.lines().count().max(1),
            column: 1,
            message: format!("missing header `{FORMAT_HEADER}`"),
        });
    }
    let graph = ResolutionGraph::new(vertices, edges)?;
    if graph.edges().len() >= graph.len() {
        return Err(GraphError::NotATree("graph contains a cycle"));
    }
    if !graph.is_connected() {
        return Err(GraphError::NotATree("graph is disconnected"));
    }
    Ok(graph)
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut col_of = Vec::with_capacity(line.len() + 1);
    for (col, (byte, _)) in line.char_indices().enumerate() {
        col_of.push((byte, col + 1));
    }
    let column = |byte: usize| col_of.iter().find(|(b, _)| *b == byte).map_or(1, |(_, c)| *c);
    for (byte, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(byte),
            (true, Some(s)) => {
                out.push((column(s), &line[s..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((column(s), &line[s..]));
    }
    out
}

/// Canonical text: header, vertices in stored order, then edges with
/// endpoints and lines sorted lexicographically by id.
pub fn serialize_graph(g: &ResolutionGraph) -> String {
    let mut out = String::new();
    writeln!(out, "{FORMAT_HEADER}").unwrap();
    for v in &g.vertices {
        writeln!(out, "vertex {} {}", v.id, v.weight).unwrap();
    }
    let mut edges: Vec<(&str, &str)> = g
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (g.id(a), g.id(b));
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    edges.sort_unstable();
    for (a, b) in edges {
        writeln!(out, "edge {a} {b}").unwrap();
    }
    out
}

/// `d(Γ) = det(−A(Γ))`, the order of the discriminant group.
pub fn graph_determinant(g: &ResolutionGraph) -> Result<BigInt, GraphError> {
    g.require_negative_definite()?;
    Ok(linalg::determinant(&g.intersection_matrix().neg()).expect("square"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub connected: bool,
    pub tree: bool,
    pub negative_definite: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.connected && self.tree && self.negative_definite
    }
}

pub fn validate(g: &ResolutionGraph) -> ValidationReport {
    let connected = g.is_connected();
    ValidationReport {
        connected,
        tree: connected && g.edges().len() + 1 == g.len(),
        negative_definite: g.is_negative_definite(),
    }
}

/// Invariant factors greater than one of `coker A(Γ)`; empty when the group
/// is trivial.
pub fn discriminant_invariants(g: &ResolutionGraph) -> Result<Vec<BigInt>, GraphError> {
    g.require_negative_definite()?;
    Ok(linalg::smith_normal_form(&g.intersection_matrix()).nontrivial_factors())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAIN: &str = "splicegraph 1
vertex w1 -2
vertex w2 -2
vertex v1 -2
vertex m -3
vertex v2 -2
vertex w3 -2
vertex w4 -2
edge w1 v1
edge w2 v1
edge v1 m
edge m v2
edge v2 w3
edge v2 w4
";

    #[test]
    fn single_vertex() {
        let g = parse_graph("splicegraph 1\nvertex a -2\n").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.class(0), VertexClass::Isolated);
        assert_eq!(g.intersection_matrix(), IntMatrix::from_rows([[-2]]).unwrap());
        assert_eq!(graph_determinant(&g).unwrap(), BigInt::from(2));
        assert_eq!(discriminant_invariants(&g).unwrap(), vec![BigInt::from(2)]);
    }

    #[test]
    fn main_example_parses() {
        let g = parse_graph(MAIN).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.nodes(), vec![2, 4]);
        assert_eq!(g.ends(), vec![0, 1, 5, 6]);
        assert_eq!(g.class(3), VertexClass::StringInterior);
        assert!(validate(&g).passed());
        assert_eq!(graph_determinant(&g).unwrap(), BigInt::from(16));
    }

    #[test]
    fn two_vertex_matrix() {
        let g = ResolutionGraph::new([("a", -2), ("b", -3)], [("a", "b")]).unwrap();
        assert_eq!(g.intersection_matrix(), IntMatrix::from_rows([[-2, 1], [1, -3]]).unwrap());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# leading comment\n\nsplicegraph 1\n  # indented comment\nvertex a -3\n\n";
        assert_eq!(parse_graph(text).unwrap().len(), 1);
    }

    #[test]
    fn cycle_rejected() {
        let text = "splicegraph 1\nvertex a -2\nvertex b -2\nvertex c -2\nedge a b\nedge b c\nedge c a\n";
        assert_eq!(parse_graph(text), Err(GraphError::NotATree("graph contains a cycle")));
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_graph("splicegraph 1\nvertex a x\n").unwrap_err();
        assert_eq!(err, GraphError::Syntax { line: 2, column: 10, message: "invalid integer weight `x`".into() });
        let err = parse_graph("vertex a -2\n").unwrap_err();
        assert!(matches!(err, GraphError::Syntax { line: 1, column: 1, .. }));
        let err = parse_graph("splicegraph 2\n").unwrap_err();
        assert!(matches!(err, GraphError::Syntax { line: 1, column: 13, .. }));
        let err = parse_graph("splicegraph 1\n  knot a\n").unwrap_err();
        assert!(matches!(err, GraphError::Syntax { line: 2, column: 3, .. }));
        let err = parse_graph("splicegraph 1\nvertex a -2 extra\n").unwrap_err();
        assert!(matches!(err, GraphError::Syntax { line: 2, column: 13, .. }));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            parse_graph("splicegraph 1\nvertex a -2\nvertex a -3\n"),
            Err(GraphError::DuplicateVertex("a".into()))
        );
        assert_eq!(parse_graph("splicegraph 1\nvertex a -2\nedge a b\n"), Err(GraphError::UnknownVertex("b".into())));
        assert_eq!(parse_graph("splicegraph 1\nvertex a -2\nedge a a\n"), Err(GraphError::SelfLoop("a".into())));
        assert_eq!(
            parse_graph("splicegraph 1\nvertex a -2\nvertex b -2\nedge a b\nedge b a\n"),
            Err(GraphError::MultiEdge("b".into(), "a".into()))
        );
        assert_eq!(parse_graph("splicegraph 1\n"), Err(GraphError::Empty));
    }

    #[test]
    fn validation_failures_are_reported() {
        let g = ResolutionGraph::new([("a", 1)], Vec::<(&str, &str)>::new()).unwrap();
        let r = validate(&g);
        assert!(r.connected && r.tree && !r.negative_definite);
        assert_eq!(graph_determinant(&g), Err(GraphError::NotNegativeDefinite));

        let forest = ResolutionGraph::new([("a", -2), ("b", -2), ("c", -2)], [("a", "b")]).unwrap();
        let r = validate(&forest);
        assert!(!r.connected && !r.tree && !r.passed());
    }

    #[test]
    fn serialization_is_canonical() {
        let text = "splicegraph 1\nvertex z -2\nvertex a -3\nvertex m -2\nedge m z\nedge a z\n";
        let g = parse_graph(text).unwrap();
        let s = serialize_graph(&g);
        assert_eq!(s, "splicegraph 1\nvertex z -2\nvertex a -3\nvertex m -2\nedge a z\nedge m z\n");
        assert_eq!(parse_graph(&s).unwrap(), g);
        assert_eq!(serialize_graph(&parse_graph(&s).unwrap()), s);
    }

    #[test]
    fn canonical_code_ignores_order() {
        let g = parse_graph(MAIN).unwrap();
        let r = g.reordered(&[6, 3, 0, 5, 1, 4, 2]);
        assert_eq!(g.canonical_code(), r.canonical_code());
        assert_eq!(graph_determinant(&r).unwrap(), BigInt::from(16));
    }
}

//! Splice diagrams: the resolution tree with maximal strings collapsed, plus
//! edge determinants at nodes and the linking weights between nodes and ends.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{GraphError, ResolutionGraph};
use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpliceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has no nodes: splice system empty (cyclic quotient case)")]
    NoNodes,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{node}` has no splice edge toward `{toward}`")]
    UnknownEdge { node: String, toward: String },
    #[error("edge weights overflow 64-bit arithmetic")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpliceVertexKind {
    Node,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpliceVertex {
    pub id: String,
    pub kind: SpliceVertexKind,
}

/// An edge of the splice diagram. `weights[i]` is the edge determinant at
/// `endpoints[i]` when that endpoint is a node, and `None` at an end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpliceEdge {
    pub endpoints: [usize; 2],
    pub weights: [Option<u64>; 2],
    /// Ids of the valence-2 vertices of Γ this edge replaces, listed from
    /// `endpoints[0]` to `endpoints[1]`.
    pub string: Vec<String>,
}

impl SpliceEdge {
    pub fn other(&self, v: usize) -> usize {
        if self.endpoints[0] == v {
            self.endpoints[1]
        } else {
            self.endpoints[0]
        }
    }

    pub fn weight_at(&self, v: usize) -> Option<u64> {
        if self.endpoints[0] == v {
            self.weights[0]
        } else if self.endpoints[1] == v {
            self.weights[1]
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpliceDiagram {
    vertices: Vec<SpliceVertex>,
    edges: Vec<SpliceEdge>,
    /// Edge indices at each vertex, ordered by the Γ-neighbor they leave through.
    incident: Vec<Vec<usize>>,
    nodes: Vec<usize>,
    ends: Vec<usize>,
}

/// Builds Δ from a validated resolution tree.
///
/// For each node `v` and Γ-neighbor `u`, the weight on the corresponding
/// splice edge at `v` is `det(−A)` of the branch of Γ beyond `u`.
pub fn splice_from_resolution(g: &ResolutionGraph) -> Result<SpliceDiagram, SpliceError> {
    g.require_valid()?;
    let graph_nodes = g.nodes();
    if graph_nodes.is_empty() {
        return Err(SpliceError::NoNodes);
    }
    // splice vertices keep Γ order
    let mut splice_index = vec![usize::MAX; g.len()];
    let mut vertices = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for v in 0..g.len() {
        let kind = match g.valence(v) {
            1 => SpliceVertexKind::End,
            2 => continue,
            _ => SpliceVertexKind::Node,
        };
        splice_index[v] = vertices.len();
        vertices.push(SpliceVertex { id: g.id(v).to_string(), kind });
    }

    let matrix = g.intersection_matrix().neg();
    let mut edges: Vec<SpliceEdge> = Vec::new();
    let mut incident = vec![Vec::new(); vertices.len()];
    for &v in &graph_nodes {
        for &u in g.neighbors(v) {
            let (far, string) = walk_string(g, v, u);
            let branch = g.branch(v, u);
            let det = linalg::determinant(&matrix.select(&branch, &branch)).expect("square");
            let weight = det.to_u64().ok_or(SpliceError::Overflow)?;
            let (sv, sf) = (splice_index[v], splice_index[far]);
            let existing = edges.iter().position(|e| e.endpoints == [sv.min(sf), sv.max(sf)]);
            let idx = match existing {
                Some(i) => i,
                None => {
                    let (endpoints, string) =
                        if sv < sf { ([sv, sf], string) } else { ([sf, sv], string.into_iter().rev().collect()) };
                    edges.push(SpliceEdge {
                        endpoints,
                        weights: [None, None],
                        string: string.into_iter().map(|x| g.id(x).to_string()).collect(),
                    });
                    let i = edges.len() - 1;
                    if vertices[sf].kind == SpliceVertexKind::End {
                        incident[sf].push(i);
                    }
                    i
                }
            };
            let slot = if edges[idx].endpoints[0] == sv { 0 } else { 1 };
            edges[idx].weights[slot] = Some(weight);
            incident[sv].push(idx);
        }
    }

    let total = edges.iter().flat_map(|e| e.weights.iter().flatten()).try_fold(1u64, |acc, &w| acc.checked_mul(w));
    if total.is_none() {
        return Err(SpliceError::Overflow);
    }

    let nodes = (0..vertices.len()).filter(|&i| vertices[i].kind == SpliceVertexKind::Node).collect();
    let ends = (0..vertices.len()).filter(|&i| vertices[i].kind == SpliceVertexKind::End).collect();
    Ok(SpliceDiagram { vertices, edges, incident, nodes, ends })
}

/// Follows the string starting with the Γ-edge `v – u` until it reaches a
/// vertex of valence ≠ 2. Returns that vertex and the interior vertices.
fn walk_string(g: &ResolutionGraph, v: usize, u: usize) -> (usize, Vec<usize>) {
    let (mut prev, mut cur) = (v, u);
    let mut interior = Vec::new();
    while g.valence(cur) == 2 {
        interior.push(cur);
        let next = g.neighbors(cur).iter().copied().find(|&x| x != prev).expect("valence 2");
        prev = cur;
        cur = next;
    }
    (cur, interior)
}

impl SpliceDiagram {
    pub fn vertices(&self) -> &[SpliceVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[SpliceEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &SpliceEdge {
        &self.edges[e]
    }

    /// Splice-vertex indices of the nodes, in Γ order.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Splice-vertex indices of the ends, in Γ order. End `k` carries the
    /// variable `z_{k+1}`.
    pub fn ends(&self) -> &[usize] {
        &self.ends
    }

    pub fn num_ends(&self) -> usize {
        self.ends.len()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn node_index(&self, id: &str) -> Result<usize, SpliceError> {
        self.index_of(id)
            .filter(|&i| self.vertices[i].kind == SpliceVertexKind::Node)
            .ok_or_else(|| SpliceError::UnknownNode(id.to_string()))
    }

    /// Position of splice vertex `v` in the end order, if it is an end.
    pub fn end_position(&self, v: usize) -> Option<usize> {
        self.ends.iter().position(|&e| e == v)
    }

    /// Incident edges at `v`, in Γ-neighbor order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// The edge at `node` whose other endpoint is `toward`.
    pub fn edge_toward(&self, node: usize, toward: &str) -> Result<usize, SpliceError> {
        self.incident[node]
            .iter()
            .copied()
            .find(|&e| self.id(self.edges[e].other(node)) == toward)
            .ok_or_else(|| SpliceError::UnknownEdge { node: self.id(node).to_string(), toward: toward.to_string() })
    }

    /// `d_ve`, the weight of edge `e` at node `v`.
    pub fn edge_weight(&self, v: usize, e: usize) -> u64 {
        self.edges[e].weight_at(v).expect("edge weight is defined at its node endpoints")
    }

    /// Edge weights around `v` in incident order.
    pub fn weights_at(&self, v: usize) -> Vec<u64> {
        self.incident[v].iter().map(|&e| self.edge_weight(v, e)).collect()
    }

    /// `d_v`: product of the edge weights at node `v`.
    pub fn node_weight_at(&self, v: usize) -> u64 {
        self.weights_at(v).iter().product()
    }

    /// Splice-vertex path from `from` to `to`, both included.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.vertices.len()];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for &e in &self.incident[x] {
                let y = self.edges[e].other(x);
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn edge_between(&self, a: usize, b: usize) -> usize {
        self.incident[a]
            .iter()
            .copied()
            .find(|&e| self.edges[e].other(a) == b)
            .expect("consecutive path vertices are adjacent")
    }

    /// End positions (indices into [`ends`](Self::ends)) lying beyond edge
    /// `e` as seen from node `v`.
    pub fn ends_beyond(&self, v: usize, e: usize) -> Vec<usize> {
        let start = self.edges[e].other(v);
        let mut seen = vec![false; self.vertices.len()];
        seen[v] = true;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut found = Vec::new();
        while let Some(x) = queue.pop_front() {
            if let Some(p) = self.end_position(x) {
                found.push(p);
            }
            for &f in &self.incident[x] {
                let y = self.edges[f].other(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        found.sort_unstable();
        found
    }

    /// Text form: `node <id>`, `end <id>`, then
    /// `edge <id> <id> [weight-at-first] [weight-at-second]` with a node
    /// listed first on node–end edges.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let kw = match v.kind {
                SpliceVertexKind::Node => "node",
                SpliceVertexKind::End => "end",
            };
            writeln!(out, "{kw} {}", v.id).unwrap();
        }
        for e in &self.edges {
            let [a, b] = e.endpoints;
            let (first, second, wf, ws) = if e.weights[0].is_none() {
                (b, a, e.weights[1], e.weights[0])
            } else {
                (a, b, e.weights[0], e.weights[1])
            };
            write!(out, "edge {} {}", self.id(first), self.id(second)).unwrap();
            for w in [wf, ws].into_iter().flatten() {
                write!(out, " {w}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// `d_v` for the node with the given id.
pub fn node_weight(d: &SpliceDiagram, node: &str) -> Result<u64, SpliceError> {
    Ok(d.node_weight_at(d.node_index(node)?))
}

/// Linking weights between every node and every end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingTable {
    nodes: Vec<usize>,
    ends: Vec<usize>,
    ell: Vec<Vec<u64>>,
    ell_prime: Vec<Vec<u64>>,
    first_edge: Vec<Vec<usize>>,
    node_weights: Vec<u64>,
}

/// For node `v` and end `w`, `ℓ_vw` is the product of the edge weights
/// adjacent to but not on the path `v → w`; `ℓ′_vw` omits the weights at `v`.
pub fn linking_table(d: &SpliceDiagram) -> LinkingTable {
    let nodes = d.nodes().to_vec();
    let ends = d.ends().to_vec();
    let mut ell = Vec::with_capacity(nodes.len());
    let mut ell_prime = Vec::with_capacity(nodes.len());
    let mut first_edge = Vec::with_capacity(nodes.len());
    for &v in &nodes {
        let mut row = Vec::with_capacity(ends.len());
        let mut row_prime = Vec::with_capacity(ends.len());
        let mut row_first = Vec::with_capacity(ends.len());
        for &w in &ends {
            let path = d.path(v, w);
            row_first.push(d.edge_between(path[0], path[1]));
            let mut at_v = 1u64;
            let mut beyond_v = 1u64;
            for (i, &u) in path.iter().enumerate() {
                if d.vertices[u].kind != SpliceVertexKind::Node {
                    continue;
                }
                let on_path: Vec<usize> = [i.checked_sub(1), Some(i + 1)]
                    .into_iter()
                    .flatten()
                    .filter(|&j| j < path.len())
                    .map(|j| d.edge_between(u, path[j]))
                    .collect();
                let off: u64 =
                    d.incident[u].iter().filter(|e| !on_path.contains(e)).map(|&e| d.edge_weight(u, e)).product();
                if i == 0 {
                    at_v = off;
                } else {
                    beyond_v *= off;
                }
            }
            row.push(at_v * beyond_v);
            row_prime.push(beyond_v);
        }
        ell.push(row);
        ell_prime.push(row_prime);
        first_edge.push(row_first);
    }
    let node_weights = nodes.iter().map(|&v| d.node_weight_at(v)).collect();
    LinkingTable { nodes, ends, ell, ell_prime, first_edge, node_weights }
}

impl LinkingTable {
    fn node_row(&self, v: usize) -> usize {
        self.nodes.iter().position(|&x| x == v).expect("v is a node of the diagram")
    }

    /// `ℓ_vw` with `v` a splice-vertex index and `w` an end position.
    pub fn ell(&self, v: usize, w: usize) -> u64 {
        self.ell[self.node_row(v)][w]
    }

    /// `ℓ′_vw` with `v` a splice-vertex index and `w` an end position.
    pub fn ell_prime(&self, v: usize, w: usize) -> u64 {
        self.ell_prime[self.node_row(v)][w]
    }

    /// First edge of the path from node `v` to end position `w`.
    pub fn first_edge(&self, v: usize, w: usize) -> usize {
        self.first_edge[self.node_row(v)][w]
    }

    pub fn node_weight(&self, v: usize) -> u64 {
        self.node_weights[self.node_row(v)]
    }

    /// `v`-weights of all end variables, in end order.
    pub fn ell_row(&self, v: usize) -> &[u64] {
        &self.ell[self.node_row(v)]
    }

    /// Lookup by ids; `None` if either id is not a node / end of the table.
    pub fn ell_by_id(&self, d: &SpliceDiagram, node: &str, end: &str) -> Option<(u64, u64)> {
        let v = d.node_index(node).ok()?;
        let w = d.end_position(d.index_of(end)?)?;
        Some((self.ell(v, w), self.ell_prime(v, w)))
    }
}

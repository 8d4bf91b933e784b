//! Numerical semigroup membership, the semigroup condition on splice
//! diagrams, and admissible monomials.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::monomial::Monomial;
use crate::splice::{LinkingTable, SpliceDiagram};

/// Upper bound on the dynamic-programming table (generators × reduced target).
pub const DP_CELL_LIMIT: u64 = 64 * 1024 * 1024;

/// Default number of admissible monomials enumerated per (node, edge).
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("generators must be positive")]
    ZeroGenerator,
    #[error("membership table for target {target} with {generators} generators exceeds the resource limit")]
    TooLarge { target: u64, generators: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Multipliers aligned with the generator list; present iff `member`.
    pub witness: Option<Vec<u64>>,
}

/// Reachability tables for suffixes of a generator list, after dividing out
/// the common gcd.
struct Reach {
    gens: Vec<u64>,
    target: u64,
    // tables[i][t]: t is a combination of gens[i..]
    tables: Vec<Vec<bool>>,
}

impl Reach {
    /// `None` when the target is not a multiple of the generators' gcd.
    fn build(target: u64, generators: &[u64]) -> Result<Option<Self>, SemigroupError> {
        if generators.is_empty() {
            return Err(SemigroupError::EmptyGenerators);
        }
        if generators.contains(&0) {
            return Err(SemigroupError::ZeroGenerator);
        }
        let g = generators.iter().fold(0u64, |acc, &x| acc.gcd(&x));
        if !target.is_multiple_of(g) {
            return Ok(None);
        }
        let gens: Vec<u64> = generators.iter().map(|x| x / g).collect();
        let target = target / g;
        let cells = (target + 1).saturating_mul(gens.len() as u64 + 1);
        if cells > DP_CELL_LIMIT {
            return Err(SemigroupError::TooLarge { target: target * g, generators: gens.len() });
        }
        let width = target as usize + 1;
        let mut tables = vec![vec![false; width]; gens.len() + 1];
        tables[gens.len()][0] = true;
        for i in (0..gens.len()).rev() {
            let step = gens[i] as usize;
            let (head, tail) = tables.split_at_mut(i + 1);
            let (cur, next) = (&mut head[i], &tail[0]);
            for t in 0..width {
                cur[t] = next[t] || (t >= step && cur[t - step]);
            }
        }
        Ok(Some(Self { gens, target, tables }))
    }

    fn reachable(&self, from: usize, t: u64) -> bool {
        self.tables[from][t as usize]
    }
}

/// Decides `target ∈ N⟨generators⟩`.
///
/// The witness gives as much weight as possible to larger generators: the
/// generators are visited in decreasing order (input order among equal
/// values) and each takes the largest multiplier that still leaves a
/// representable remainder.
pub fn semigroup_member(target: u64, generators: &[u64]) -> Result<Membership, SemigroupError> {
    let mut order: Vec<usize> = (0..generators.len()).collect();
    order.sort_by(|&a, &b| generators[b].cmp(&generators[a]));
    let sorted: Vec<u64> = order.iter().map(|&i| generators[i]).collect();
    let Some(reach) = Reach::build(target, &sorted)? else {
        return Ok(Membership { member: false, witness: None });
    };
    if !reach.reachable(0, reach.target) {
        return Ok(Membership { member: false, witness: None });
    }
    let mut witness = vec![0u64; generators.len()];
    let mut rem = reach.target;
    for (k, &orig) in order.iter().enumerate() {
        let g = reach.gens[k];
        let mut m = rem / g;
        while !reach.reachable(k + 1, rem - m * g) {
            m -= 1;
        }
        witness[orig] = m;
        rem -= m * g;
    }
    debug_assert_eq!(rem, 0);
    Ok(Membership { member: true, witness: Some(witness) })
}

/// Semigroup condition at one (node, edge) pair, in both formulations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCondition {
    pub node: String,
    /// Id of the far endpoint of the edge, which names the edge at this node.
    pub toward: String,
    #[serde(skip)]
    pub node_index: usize,
    #[serde(skip)]
    pub edge: usize,
    /// Ends of Δ beyond the edge.
    pub ends: Vec<String>,
    /// `d_ve`
    pub edge_weight: u64,
    /// `ℓ′_vw` for the ends above, same order.
    pub ell_prime: Vec<u64>,
    pub edge_form: Membership,
    /// `d_v`
    pub node_weight: u64,
    /// `ℓ_vw` for the ends above, same order.
    pub ell: Vec<u64>,
    pub node_form: Membership,
}

impl EdgeCondition {
    pub fn holds(&self) -> bool {
        self.edge_form.member && self.node_form.member
    }

    pub fn forms_agree(&self) -> bool {
        self.edge_form.member == self.node_form.member
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemigroupVerdict {
    pub holds: bool,
    pub edges: Vec<EdgeCondition>,
}

impl SemigroupVerdict {
    pub fn failures(&self) -> impl Iterator<Item = &EdgeCondition> {
        self.edges.iter().filter(|c| !c.holds())
    }

    pub fn condition(&self, node: &str, toward: &str) -> Option<&EdgeCondition> {
        self.edges.iter().find(|c| c.node == node && c.toward == toward)
    }
}

/// Checks `d_ve ∈ N⟨ℓ′_vw⟩` and `d_v ∈ N⟨ℓ_vw⟩` (ends `w` beyond `e`) at
/// every node and incident edge.
pub fn check_semigroup_condition(d: &SpliceDiagram, lt: &LinkingTable) -> Result<SemigroupVerdict, SemigroupError> {
    let mut edges = Vec::new();
    for &v in d.nodes() {
        for &e in d.incident(v) {
            let beyond = d.ends_beyond(v, e);
            let ell: Vec<u64> = beyond.iter().map(|&w| lt.ell(v, w)).collect();
            let ell_prime: Vec<u64> = beyond.iter().map(|&w| lt.ell_prime(v, w)).collect();
            let edge_weight = d.edge_weight(v, e);
            let node_weight = lt.node_weight(v);
            edges.push(EdgeCondition {
                node: d.id(v).to_string(),
                toward: d.id(d.edge(e).other(v)).to_string(),
                node_index: v,
                edge: e,
                ends: beyond.iter().map(|&w| d.id(d.ends()[w]).to_string()).collect(),
                edge_form: semigroup_member(edge_weight, &ell_prime)?,
                node_form: semigroup_member(node_weight, &ell)?,
                edge_weight,
                ell_prime,
                node_weight,
                ell,
            });
        }
    }
    let holds = edges.iter().all(EdgeCondition::holds);
    Ok(SemigroupVerdict { holds, edges })
}

/// Admissible monomials at one (node, edge) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleSet {
    pub node: String,
    pub toward: String,
    #[serde(skip)]
    pub node_index: usize,
    #[serde(skip)]
    pub edge: usize,
    /// Ascending lexicographic order of exponent vectors.
    pub monomials: Vec<Monomial>,
    /// The enumeration stopped at the cap with more solutions remaining.
    pub truncated: bool,
}

impl AdmissibleSet {
    /// No admissible monomial exists (the semigroup condition fails here).
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// All `∏ z_w^{α_w}` over ends `w` beyond `e` with `Σ α_w ℓ_vw = d_v`.
pub fn admissible_monomials(
    d: &SpliceDiagram,
    lt: &LinkingTable,
    v: usize,
    e: usize,
    cap: usize,
) -> Result<AdmissibleSet, SemigroupError> {
    let beyond = d.ends_beyond(v, e);
    let weights: Vec<u64> = beyond.iter().map(|&w| lt.ell(v, w)).collect();
    let mut set = AdmissibleSet {
        node: d.id(v).to_string(),
        toward: d.id(d.edge(e).other(v)).to_string(),
        node_index: v,
        edge: e,
        monomials: Vec::new(),
        truncated: false,
    };
    let Some(reach) = Reach::build(lt.node_weight(v), &weights)? else {
        return Ok(set);
    };
    let n = d.num_ends();
    let mut alphas = vec![0u64; beyond.len()];
    let mut more = false;
    enumerate(
        &reach,
        0,
        reach.target,
        &mut alphas,
        cap,
        &mut |alphas| {
            let mut exps = vec![0u64; n];
            for (k, &w) in beyond.iter().enumerate() {
                exps[w] = alphas[k];
            }
            set.monomials.push(Monomial::new(exps));
        },
        &mut more,
    );
    set.truncated = more;
    Ok(set)
}

fn enumerate(
    reach: &Reach,
    i: usize,
    rem: u64,
    alphas: &mut [u64],
    cap: usize,
    emit: &mut dyn FnMut(&[u64]),
    more: &mut bool,
) -> usize {
    if i == reach.gens.len() {
        return if rem == 0 {
            emit(alphas);
            1
        } else {
            0
        };
    }
    let mut count = 0;
    let g = reach.gens[i];
    for a in 0..=rem / g {
        let left = rem - a * g;
        if !reach.reachable(i + 1, left) {
            continue;
        }
        if count == cap {
            *more = true;
            break;
        }
        alphas[i] = a;
        count += enumerate(reach, i + 1, left, alphas, cap - count, emit, more);
        if *more {
            break;
        }
    }
    alphas[i] = 0;
    count
}

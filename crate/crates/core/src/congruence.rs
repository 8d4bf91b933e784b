//! The congruence condition: admissible monomials at each node whose
//! characters under the discriminant group all agree.
//!
//! Congruence is taken to hold when every node admits one admissible
//! monomial per incident edge, all with the same character. Nodes are
//! independent: characters at different nodes need not match.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::equations::EquationSystem;
use crate::group::{character_key, Phase, PhaseVector};
use crate::monomial::Monomial;
use crate::semigroup::{admissible_monomials, SemigroupError};
use crate::splice::{LinkingTable, SpliceDiagram};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("equation system has {system} variables but the group acts on {group}")]
    EndMismatch { system: usize, group: usize },
}

/// A group element scaling two monomials of one equation differently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiInvarianceOffender {
    pub element: PhaseVector,
    pub first: Monomial,
    pub second: Monomial,
    pub first_phase: Phase,
    pub second_phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiInvariance {
    pub node: String,
    pub passes: bool,
    pub offender: Option<SemiInvarianceOffender>,
}

/// Checks each equation for a single character. Characters are homomorphisms,
/// so testing the generators decides equality on the whole group.
pub fn equation_semi_invariance(
    sys: &EquationSystem,
    gens: &[PhaseVector],
) -> Result<Vec<SemiInvariance>, CongruenceError> {
    if let Some(g) = gens.iter().find(|g| g.len() != sys.variables.len()) {
        return Err(CongruenceError::EndMismatch { system: sys.variables.len(), group: g.len() });
    }
    Ok(sys
        .equations
        .iter()
        .map(|eq| {
            let offender = gens.iter().find_map(|g| {
                let (head, rest) = eq.terms.split_first()?;
                let first_phase = g.character_of(&head.monomial);
                rest.iter().find_map(|t| {
                    let second_phase = g.character_of(&t.monomial);
                    (second_phase != first_phase).then(|| SemiInvarianceOffender {
                        element: g.clone(),
                        first: head.monomial.clone(),
                        second: t.monomial.clone(),
                        first_phase,
                        second_phase,
                    })
                })
            });
            SemiInvariance { node: eq.node.clone(), passes: offender.is_none(), offender }
        })
        .collect())
}

/// Admissible monomials sharing one character, per incident edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterClass {
    /// Character values on the generators.
    pub character: Vec<Phase>,
    /// Indexed like the node's incident edges; each list ascending.
    pub monomials: Vec<Vec<Monomial>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeCongruence {
    pub node: String,
    #[serde(skip)]
    pub node_index: usize,
    /// Far endpoint ids of the incident edges, in incident order.
    pub edges: Vec<String>,
    /// Lexicographically first choice, one monomial per edge.
    pub choice: Option<Vec<Monomial>>,
    pub character: Option<Vec<Phase>>,
    /// Every character realized on all incident edges, ascending.
    pub classes: Vec<CharacterClass>,
    /// Edges with no admissible monomial at all.
    pub empty_edges: Vec<String>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceResult {
    pub holds: bool,
    /// No admissible enumeration hit the cap, so a negative verdict is certain.
    pub exhaustive: bool,
    pub nodes: Vec<NodeCongruence>,
}

impl CongruenceResult {
    /// Per-node choices in `d.nodes()` order, when every node has one.
    pub fn assignment(&self) -> Option<Vec<Vec<Monomial>>> {
        self.nodes.iter().map(|n| n.choice.clone()).collect()
    }

    pub fn verdict(&self) -> &'static str {
        match (self.holds, self.exhaustive) {
            (true, _) => "congruence condition holds",
            (false, true) => "congruence condition fails",
            (false, false) => "no congruent choice within the enumeration cap (not exhaustive)",
        }
    }
}

/// Searches each node for admissible monomials, one per incident edge, with a
/// common character on the generators `gens`.
pub fn search_congruence(
    d: &SpliceDiagram,
    lt: &LinkingTable,
    gens: &[PhaseVector],
    cap: usize,
) -> Result<CongruenceResult, SemigroupError> {
    let mut nodes = Vec::new();
    for &v in d.nodes() {
        let incident = d.incident(v);
        let mut truncated = false;
        let mut empty_edges = Vec::new();
        // character → per-edge monomials
        let mut by_character: BTreeMap<Vec<Phase>, Vec<Vec<Monomial>>> = BTreeMap::new();
        for (k, &e) in incident.iter().enumerate() {
            let set = admissible_monomials(d, lt, v, e, cap)?;
            truncated |= set.truncated;
            if set.is_empty() {
                empty_edges.push(set.toward.clone());
            }
            for m in set.monomials {
                let slots =
                    by_character.entry(character_key(gens, &m)).or_insert_with(|| vec![Vec::new(); incident.len()]);
                slots[k].push(m);
            }
        }
        let classes: Vec<CharacterClass> = by_character
            .into_iter()
            .filter(|(_, slots)| slots.iter().all(|s| !s.is_empty()))
            .map(|(character, monomials)| CharacterClass { character, monomials })
            .collect();
        let best = classes
            .iter()
            .map(|c| (c.monomials.iter().map(|s| s[0].clone()).collect::<Vec<_>>(), &c.character))
            .min_by(|a, b| a.0.cmp(&b.0));
        nodes.push(NodeCongruence {
            node: d.id(v).to_string(),
            node_index: v,
            edges: incident.iter().map(|&e| d.id(d.edge(e).other(v)).to_string()).collect(),
            choice: best.as_ref().map(|b| b.0.clone()),
            character: best.map(|b| b.1.clone()),
            classes,
            empty_edges,
            truncated,
        });
    }
    let holds = nodes.iter().all(|n| n.choice.is_some());
    let exhaustive = nodes.iter().all(|n| !n.truncated);
    Ok(CongruenceResult { holds, exhaustive, nodes })
}

//! Splice-diagram-form equation systems, the one-node (Brieskorn) case,
//! the maximal-minor genericity check, and deformation monomials.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::group::{Character, DiscriminantAction, Phase, PhaseVector};
use crate::linalg::{Rational, RationalMatrix};
use crate::monomial::{monomials_up_to_degree, Monomial};
use crate::report::rational_string;
use crate::splice::{LinkingTable, SpliceDiagram};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquationError {
    #[error("expected choices and coefficients for {expected} nodes, got {found}")]
    NodeCount { expected: usize, found: usize },
    #[error("node {node}: expected one monomial per incident edge ({expected}), got {found}")]
    ChoiceCount { node: String, expected: usize, found: usize },
    #[error("monomial {monomial} has {found} variables, diagram has {expected} ends")]
    VariableCount { monomial: String, expected: usize, found: usize },
    #[error("monomial {monomial} at node {node} involves ends not beyond the edge toward {toward}")]
    Support { node: String, toward: String, monomial: String },
    #[error("monomial {monomial} at node {node}: v-weight {weight} differs from d_v = {node_weight}")]
    Inadmissible { node: String, toward: String, monomial: String, weight: u64, node_weight: u64 },
    #[error("coefficient matrix must be {rows}×{cols} with 1 ≤ rows ≤ cols, got {found_rows}×{found_cols}")]
    Shape { rows: usize, cols: usize, found_rows: usize, found_cols: usize },
    #[error("node {node}: coefficient minor on columns {columns:?} is singular")]
    DegenerateCoefficients { node: String, columns: Vec<usize> },
    #[error("diagram has {nodes} nodes; only one-node diagrams have Brieskorn form, use build_equation_system")]
    NotBrieskorn { nodes: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coefficient: Rational,
    pub monomial: Monomial,
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Term", 2)?;
        st.serialize_field("coefficient", &rational_string(&self.coefficient))?;
        st.serialize_field("monomial", &self.monomial)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equation {
    pub node: String,
    #[serde(skip)]
    pub node_index: usize,
    pub terms: Vec<Term>,
    /// Common v-weight of every term (`d_v` of the owning node).
    pub weight: u64,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.terms {
            if t.coefficient.is_zero() {
                continue;
            }
            let negative = t.coefficient.is_negative();
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let c = t.coefficient.abs();
            if !c.is_one() {
                if c.is_integer() {
                    write!(f, "{}", c.numer())?;
                } else {
                    write!(f, "({}/{})", c.numer(), c.denom())?;
                }
                if !t.monomial.is_one() {
                    f.write_str(" ")?;
                }
            }
            if !c.is_one() && t.monomial.is_one() {
                continue;
            }
            write!(f, "{}", t.monomial)?;
        }
        if first {
            f.write_str("0")?;
        }
        f.write_str(" = 0")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquationSystem {
    /// End ids; end `k` is the variable `z_{k+1}`.
    pub variables: Vec<String>,
    /// Grouped by node, `δ_v − 2` per node.
    pub equations: Vec<Equation>,
}

impl EquationSystem {
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn render(&self) -> String {
        self.equations.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// v-weight `Σ_w m_w ℓ_vw` of a monomial (saturating).
pub fn node_weight_of_monomial(lt: &LinkingTable, v: usize, m: &Monomial) -> u64 {
    lt.ell_row(v).iter().zip(m.exponents()).fold(0u64, |acc, (&l, &e)| acc.saturating_add(l.saturating_mul(e)))
}

/// Checks that `m` is admissible for edge `e` at node `v`.
pub fn check_admissible(
    d: &SpliceDiagram,
    lt: &LinkingTable,
    v: usize,
    e: usize,
    m: &Monomial,
) -> Result<(), EquationError> {
    let toward = || d.id(d.edge(e).other(v)).to_string();
    if m.num_vars() != d.num_ends() {
        return Err(EquationError::VariableCount {
            monomial: m.to_string(),
            expected: d.num_ends(),
            found: m.num_vars(),
        });
    }
    let beyond = d.ends_beyond(v, e);
    if m.support().any(|w| !beyond.contains(&w)) {
        return Err(EquationError::Support { node: d.id(v).to_string(), toward: toward(), monomial: m.to_string() });
    }
    let weight = node_weight_of_monomial(lt, v, m);
    if weight != lt.node_weight(v) {
        return Err(EquationError::Inadmissible {
            node: d.id(v).to_string(),
            toward: toward(),
            monomial: m.to_string(),
            weight,
            node_weight: lt.node_weight(v),
        });
    }
    Ok(())
}

/// Result of the maximal-minor test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HammCheck {
    pub nonsingular: bool,
    /// Columns of the first singular maximal minor in lexicographic order.
    pub singular_minor: Option<Vec<usize>>,
}

/// Every `k×k` minor of a `k×m` matrix (`1 ≤ k ≤ m`) must be nonzero.
pub fn hamm_check(coeffs: &RationalMatrix) -> Result<HammCheck, EquationError> {
    let (k, m) = (coeffs.rows(), coeffs.cols());
    if k == 0 || k > m {
        return Err(EquationError::Shape { rows: k.max(1), cols: m.max(k), found_rows: k, found_cols: m });
    }
    let rows: Vec<usize> = (0..k).collect();
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let det = coeffs.select(&rows, &cols).determinant().expect("square minor");
        if det.is_zero() {
            return Ok(HammCheck { nonsingular: false, singular_minor: Some(cols) });
        }
        // next k-combination of 0..m
        let Some(i) = (0..k).rev().find(|&i| cols[i] != i + m - k) else {
            return Ok(HammCheck { nonsingular: true, singular_minor: None });
        };
        cols[i] += 1;
        for j in i + 1..k {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

/// The `k×m` Vandermonde matrix on the nodes `1, …, m`: entry `(i, j)` is `(j+1)^i`.
pub fn generic_coefficients(k: usize, m: usize) -> RationalMatrix {
    RationalMatrix::from_fn(k, m, |i, j| Rational::from_integer(BigInt::from(j + 1).pow(i as u32)))
}

/// Builds the system from one chosen monomial per (node, edge) and one
/// coefficient matrix per node.
///
/// `choices[i]` and `coefficients[i]` belong to `d.nodes()[i]`; monomials are
/// listed in the order of `d.incident(v)` and the coefficient matrix is
/// `(δ_v − 2) × δ_v` with columns in the same order.
pub fn build_equation_system(
    d: &SpliceDiagram,
    lt: &LinkingTable,
    choices: &[Vec<Monomial>],
    coefficients: &[RationalMatrix],
) -> Result<EquationSystem, EquationError> {
    let nodes = d.nodes();
    for found in [choices.len(), coefficients.len()] {
        if found != nodes.len() {
            return Err(EquationError::NodeCount { expected: nodes.len(), found });
        }
    }
    let mut equations = Vec::new();
    for ((&v, chosen), coeffs) in nodes.iter().zip(choices).zip(coefficients) {
        let incident = d.incident(v);
        let valence = incident.len();
        if chosen.len() != valence {
            return Err(EquationError::ChoiceCount {
                node: d.id(v).to_string(),
                expected: valence,
                found: chosen.len(),
            });
        }
        for (&e, m) in incident.iter().zip(chosen) {
            check_admissible(d, lt, v, e, m)?;
        }
        if coeffs.rows() != valence - 2 || coeffs.cols() != valence {
            return Err(EquationError::Shape {
                rows: valence - 2,
                cols: valence,
                found_rows: coeffs.rows(),
                found_cols: coeffs.cols(),
            });
        }
        if let Some(columns) = hamm_check(coeffs)?.singular_minor {
            return Err(EquationError::DegenerateCoefficients { node: d.id(v).to_string(), columns });
        }
        for r in 0..valence - 2 {
            let terms = chosen
                .iter()
                .zip(coeffs.row(r))
                .map(|(m, c)| Term { coefficient: c.clone(), monomial: m.clone() })
                .collect();
            equations.push(Equation { node: d.id(v).to_string(), node_index: v, terms, weight: lt.node_weight(v) });
        }
    }
    Ok(EquationSystem { variables: end_ids(d), equations })
}

/// [`build_equation_system`] with [`generic_coefficients`] at every node.
pub fn build_generic_system(
    d: &SpliceDiagram,
    lt: &LinkingTable,
    choices: &[Vec<Monomial>],
) -> Result<EquationSystem, EquationError> {
    let coefficients: Vec<RationalMatrix> =
        d.nodes().iter().map(|&v| generic_coefficients(d.valence(v) - 2, d.valence(v))).collect();
    build_equation_system(d, lt, choices, &coefficients)
}

fn end_ids(d: &SpliceDiagram) -> Vec<String> {
    d.ends().iter().map(|&w| d.id(w).to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrieskornData {
    /// `p_i`, in end order.
    pub exponents: Vec<u64>,
    /// `(n−2) × n`
    pub coefficients: RationalMatrix,
}

impl Serialize for BrieskornData {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<Vec<String>> = (0..self.coefficients.rows())
            .map(|i| self.coefficients.row(i).iter().map(rational_string).collect())
            .collect();
        let mut st = serializer.serialize_struct("BrieskornData", 2)?;
        st.serialize_field("exponents", &self.exponents)?;
        st.serialize_field("coefficients", &rows)?;
        st.end()
    }
}

/// Exponents and generic coefficients of `Σ_i a_ij z_i^{p_i} = 0` for a
/// one-node diagram.
pub fn brieskorn_form(d: &SpliceDiagram) -> Result<BrieskornData, EquationError> {
    let [v] = d.nodes() else {
        return Err(EquationError::NotBrieskorn { nodes: d.nodes().len() });
    };
    let exponents: Vec<u64> = d
        .ends()
        .iter()
        .map(|&w| {
            let e = d.incident(*v).iter().copied().find(|&e| d.edge(e).other(*v) == w).expect("star");
            d.edge_weight(*v, e)
        })
        .collect();
    let n = exponents.len();
    Ok(BrieskornData { exponents, coefficients: generic_coefficients(n - 2, n) })
}

/// The Brieskorn system itself, `z_w^{p_w}` on each leaf edge.
pub fn brieskorn_system(d: &SpliceDiagram, lt: &LinkingTable) -> Result<EquationSystem, EquationError> {
    let data = brieskorn_form(d)?;
    let v = d.nodes()[0];
    let n = d.num_ends();
    let chosen: Vec<Monomial> = d
        .incident(v)
        .iter()
        .map(|&e| {
            let w = d.end_position(d.edge(e).other(v)).expect("leaf edge");
            Monomial::power(n, w, data.exponents[w])
        })
        .collect();
    // coefficient columns follow incident order
    let cols: Vec<usize> =
        d.incident(v).iter().map(|&e| d.end_position(d.edge(e).other(v)).expect("leaf edge")).collect();
    let rows: Vec<usize> = (0..n - 2).collect();
    let coeffs = data.coefficients.select(&rows, &cols);
    build_equation_system(d, lt, &[chosen], &[coeffs])
}

/// Which nodes' v-weights a deformation monomial must dominate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFilter {
    /// `v`-weight ≥ `d_v` for the node owning the equation.
    Node(usize),
    /// `v`-weight ≥ `d_v` for every node.
    AllNodes,
}

/// Monomials of total degree ≤ `degree_bound`, passing the weight filter and
/// transforming by `target`, in ascending lexicographic order.
pub fn deformation_monomials(
    d: &SpliceDiagram,
    lt: &LinkingTable,
    a: &DiscriminantAction,
    target: &Character,
    filter: WeightFilter,
    degree_bound: u64,
) -> Vec<Monomial> {
    let heavy = |m: &Monomial, v: usize| node_weight_of_monomial(lt, v, m) >= lt.node_weight(v);
    // characters are homomorphisms, so the generators decide equality
    let on_generators: Vec<(&PhaseVector, Phase)> = a
        .generators()
        .iter()
        .map(|g| (g, target.values[a.position(g).expect("generators belong to the group")]))
        .collect();
    monomials_up_to_degree(d.num_ends(), degree_bound)
        .into_iter()
        .filter(|m| match filter {
            WeightFilter::Node(v) => heavy(m, v),
            WeightFilter::AllNodes => d.nodes().iter().all(|&v| heavy(m, v)),
        })
        .filter(|m| on_generators.iter().all(|&(g, value)| g.character_of(m) == value))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::group::{discriminant_action, monomial_character};
    use crate::splice::{linking_table, splice_from_resolution};

    fn diagram(text: &str) -> (SpliceDiagram, LinkingTable) {
        let d = splice_from_resolution(&parse_graph(text).unwrap()).unwrap();
        let lt = linking_table(&d);
        (d, lt)
    }

    fn rat(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_int_rows(rows).unwrap()
    }

    const MAIN: &str = include_str!("../graphs/main_example.sg");

    #[test]
    fn hamm_examples() {
        assert!(hamm_check(&rat(&[&[2, 3, 1]])).unwrap().nonsingular);
        let c = hamm_check(&rat(&[&[1, 1, 1, 0], &[1, 1, 0, 1]])).unwrap();
        assert_eq!(c.singular_minor, Some(vec![0, 1]));
        assert!(hamm_check(&rat(&[&[1, 1, 1, 1], &[1, 2, 3, 4]])).unwrap().nonsingular);
        assert!(hamm_check(&rat(&[&[1, 1, 0]])).unwrap().singular_minor == Some(vec![2]));
        assert!(matches!(hamm_check(&rat(&[&[1], &[2]])), Err(EquationError::Shape { .. })));
    }

    #[test]
    fn hamm_on_two_by_four_is_six_minor_conditions() {
        // maximal minors of [[a,b,1,0],[c,d,0,1]]: ad−bc, −c, a, −d, b, 1
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    for dd in -2i64..=2 {
                        let got = hamm_check(&rat(&[&[a, b, 1, 0], &[c, dd, 0, 1]])).unwrap().nonsingular;
                        let expected = a * dd - b * c != 0 && a != 0 && b != 0 && c != 0 && dd != 0;
                        assert_eq!(got, expected, "{a} {b} {c} {dd}");
                    }
                }
            }
        }
    }

    #[test]
    fn vandermonde_shapes() {
        assert_eq!(generic_coefficients(1, 3), rat(&[&[1, 1, 1]]));
        assert_eq!(generic_coefficients(2, 4), rat(&[&[1, 1, 1, 1], &[1, 2, 3, 4]]));
        assert!(hamm_check(&generic_coefficients(3, 5)).unwrap().nonsingular);
    }

    #[test]
    fn main_example_system() {
        let (d, lt) = diagram(MAIN);
        let z = |e: [u64; 4]| Monomial::new(e.to_vec());
        // incident order at v1 is w1, w2, v2; at v2 it is v1, w3, w4
        let choices = vec![
            vec![z([2, 0, 0, 0]), z([0, 2, 0, 0]), z([0, 0, 1, 3])],
            vec![z([1, 3, 0, 0]), z([0, 0, 2, 0]), z([0, 0, 0, 2])],
        ];
        let sys = build_generic_system(&d, &lt, &choices).unwrap();
        assert_eq!(sys.render(), "z1^2 + z2^2 + z3 z4^3 = 0\nz1 z2^3 + z3^2 + z4^2 = 0\n");
        assert!(sys.equations.iter().all(|e| e.weight == 32));

        let node_weight = |v: usize, m: &Monomial| node_weight_of_monomial(&lt, d.nodes()[v], m);
        assert_eq!(node_weight(0, &z([2, 0, 0, 0])), 32);
        assert_eq!(node_weight(0, &z([0, 0, 2, 2])), 32);
        assert_eq!(node_weight(0, &Monomial::one(4)), 0);

        let mut bad = choices.clone();
        bad[0][2] = z([0, 0, 1, 1]);
        assert!(matches!(
            build_generic_system(&d, &lt, &bad),
            Err(EquationError::Inadmissible { weight: 16, node_weight: 32, .. })
        ));
        bad[0][2] = z([2, 0, 0, 0]);
        assert!(matches!(build_generic_system(&d, &lt, &bad), Err(EquationError::Support { .. })));

        let coeffs = [rat(&[&[1, 1, 0]]), rat(&[&[1, 1, 1]])];
        assert_eq!(
            build_equation_system(&d, &lt, &choices, &coeffs),
            Err(EquationError::DegenerateCoefficients { node: "v1".into(), columns: vec![2] })
        );
        assert_eq!(brieskorn_form(&d), Err(EquationError::NotBrieskorn { nodes: 2 }));
    }

    #[test]
    fn brieskorn_cases() {
        let (d, lt) = diagram(include_str!("../graphs/e8.sg"));
        assert_eq!(brieskorn_form(&d).unwrap().exponents, vec![2, 3, 5]);
        assert_eq!(brieskorn_system(&d, &lt).unwrap().render(), "z1^2 + z2^3 + z3^5 = 0\n");
        let (d, _) = diagram(include_str!("../graphs/star_2_2_5.sg"));
        assert_eq!(brieskorn_form(&d).unwrap().exponents, vec![2, 2, 5]);
    }

    #[test]
    fn deformations() {
        let (d, lt) = diagram(MAIN);
        let g = parse_graph(MAIN).unwrap();
        let (_, a) = discriminant_action(&g, 16).unwrap();
        let target = monomial_character(&a, &Monomial::power(4, 0, 2));
        let v1 = d.nodes()[0];
        let got = deformation_monomials(&d, &lt, &a, &target, WeightFilter::Node(v1), 4);
        for m in [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 3], [0, 0, 3, 1]] {
            assert!(got.contains(&Monomial::new(m.to_vec())), "{m:?}");
        }
        assert!(!got.contains(&Monomial::new(vec![0, 0, 2, 2])));
        let every = deformation_monomials(&d, &lt, &a, &target, WeightFilter::AllNodes, 4);
        assert!(!every.contains(&Monomial::power(4, 0, 2)));
        assert!(every.iter().all(|m| got.contains(m)));

        let (d, lt) = diagram(include_str!("../graphs/e8.sg"));
        let e8 = parse_graph(include_str!("../graphs/e8.sg")).unwrap();
        let (_, a) = discriminant_action(&e8, 1).unwrap();
        let zero = monomial_character(&a, &Monomial::one(3));
        let v = d.nodes()[0];
        assert!(deformation_monomials(&d, &lt, &a, &zero, WeightFilter::Node(v), 0).is_empty());
        let got = deformation_monomials(&d, &lt, &a, &zero, WeightFilter::Node(v), 30);
        assert!(got.contains(&Monomial::power(3, 0, 2)));
        for m in monomials_up_to_degree(3, 30) {
            let [x, y, z] = m.exponents() else { unreachable!() };
            assert_eq!(got.contains(&m), 15 * x + 10 * y + 6 * z >= 30);
        }
    }
}

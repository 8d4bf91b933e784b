//! The discriminant group acting diagonally on the end variables.
//!
//! Group elements are phase vectors: coordinate `q` stands for the scalar
//! `exp(2πi q)` on the corresponding variable, so the group law is
//! coordinatewise addition mod 1.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::{GraphError, ResolutionGraph};
use crate::linalg::{self, IntMatrix, Rational};
use crate::monomial::Monomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("phase vectors have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("group closure exceeded the order bound {0}")]
    BoundExceeded(u64),
    #[error("phase denominators overflow 64-bit arithmetic")]
    Overflow,
    #[error(
        "generated group has order {order} but d(Γ) = {determinant}; the action is expected to be \
         faithful on every negative definite tree, so this graph deserves a closer look"
    )]
    NotFaithful { order: u64, determinant: BigInt },
}

/// A rational number in `[0, 1)`, in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase {
    num: u64,
    den: u64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };

    /// `num / den` reduced mod 1. Panics if `den == 0`.
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let r = num.rem_euclid(den as i128) as u64;
        let g = r.gcd(&den);
        Self { num: r / g, den: den / g }
    }

    pub fn from_rational(q: &Rational) -> Result<Self, GroupError> {
        let den = q.denom().to_u64().ok_or(GroupError::Overflow)?;
        let num = q.numer().mod_floor(q.denom()).to_i128().ok_or(GroupError::Overflow)?;
        Ok(Self::new(num, den))
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Phase) -> Phase {
        let den = self.den.lcm(&other.den);
        let num = self.num as i128 * (den / self.den) as i128 + other.num as i128 * (den / other.den) as i128;
        Phase::new(num, den)
    }

    pub fn scale(self, k: u64) -> Phase {
        Phase::new(self.num as i128 * k as i128, self.den)
    }

    /// Numerator over the given common denominator (which must be a multiple
    /// of this phase's denominator).
    fn over(&self, modulus: u64) -> u64 {
        debug_assert_eq!(modulus % self.den, 0);
        self.num * (modulus / self.den)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A diagonal group element, one phase per end variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PhaseVector {
    coords: Vec<Phase>,
}

impl PhaseVector {
    pub fn new(coords: Vec<Phase>) -> Self {
        Self { coords }
    }

    pub fn zero(len: usize) -> Self {
        Self { coords: vec![Phase::ZERO; len] }
    }

    /// Convenience constructor from `(num, den)` pairs.
    pub fn from_fractions(pairs: &[(i128, u64)]) -> Self {
        Self { coords: pairs.iter().map(|&(n, d)| Phase::new(n, d)).collect() }
    }

    pub fn coords(&self) -> &[Phase] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Phase::is_zero)
    }

    pub fn add(&self, other: &PhaseVector) -> PhaseVector {
        assert_eq!(self.len(), other.len());
        Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(*b)).collect() }
    }

    /// Least common denominator of the coordinates (the element's order).
    pub fn order(&self) -> u64 {
        self.coords.iter().fold(1u64, |acc, p| acc.lcm(&p.den))
    }

    /// Phase by which this element scales the monomial.
    pub fn character_of(&self, m: &Monomial) -> Phase {
        assert_eq!(self.len(), m.num_vars(), "monomial and phase vector lengths");
        self.coords.iter().zip(m.exponents()).fold(Phase::ZERO, |acc, (p, &e)| acc.add(p.scale(e)))
    }
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Generators of the diagonal action, one per end of Γ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionGenerators {
    /// End ids in Γ order; end `k` carries `z_{k+1}`.
    pub ends: Vec<String>,
    pub generators: Vec<PhaseVector>,
    /// `d(Γ)`
    #[serde(serialize_with = "crate::report::bigint_str")]
    pub determinant: BigInt,
    /// Γ has no ends (a single vertex): there are no variables to act on.
    pub degenerate: bool,
}

/// The j-th generator has coordinates `b_{w_j w_k} mod 1` where `b` is the
/// inverse of the positive definite form `−A(Γ)`.
///
/// Using `(−A)^{-1}` rather than `A^{-1}` only inverts each generator; the
/// group and all character comparisons are unchanged.
pub fn action_generators(g: &ResolutionGraph) -> Result<ActionGenerators, GroupError> {
    g.require_valid()?;
    let form = g.intersection_matrix().neg();
    let ends = g.ends();
    if ends.is_empty() {
        let determinant = linalg::determinant(&form).expect("square");
        return Ok(ActionGenerators { ends: Vec::new(), generators: Vec::new(), determinant, degenerate: true });
    }
    let unit_columns = IntMatrix::from_fn(form.rows(), ends.len(), |i, k| BigInt::from(u8::from(i == ends[k])));
    let (delta, scaled) = linalg::solve_scaled(&form, &unit_columns).expect("negative definite forms are invertible");
    let generators = (0..ends.len())
        .map(|j| {
            (0..ends.len())
                .map(|k| Phase::from_rational(&Rational::new(scaled.get(ends[k], j).clone(), delta.clone())))
                .collect::<Result<Vec<_>, _>>()
                .map(PhaseVector::new)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ActionGenerators {
        ends: ends.iter().map(|&e| g.id(e).to_string()).collect(),
        generators,
        determinant: delta.abs(),
        degenerate: false,
    })
}

/// The finite subgroup of `(Q/Z)^n` generated by a set of phase vectors.
#[derive(Debug, Clone)]
pub struct DiscriminantAction {
    generators: Vec<PhaseVector>,
    dim: usize,
    modulus: u64,
    /// Elements as numerators over `modulus`, in breadth-first discovery order.
    elements: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
}

/// Closure of `gens` under addition mod 1, breadth first from the identity.
///
/// Fails once more than `bound` elements have been found.
pub fn generate_group(gens: &[PhaseVector], bound: u64) -> Result<DiscriminantAction, GroupError> {
    let dim = gens.first().map_or(0, PhaseVector::len);
    if let Some(bad) = gens.iter().find(|g| g.len() != dim) {
        return Err(GroupError::LengthMismatch(dim, bad.len()));
    }
    let modulus = gens
        .iter()
        .flat_map(|g| g.coords.iter())
        .try_fold(1u64, |acc, p| {
            let l = acc.lcm(&p.den);
            (l / p.den).checked_mul(p.den).map(|_| l)
        })
        .ok_or(GroupError::Overflow)?;
    let gen_nums: Vec<Vec<u64>> = gens.iter().map(|g| g.coords.iter().map(|p| p.over(modulus)).collect()).collect();

    let identity = vec![0u64; dim];
    let mut elements = vec![identity.clone()];
    let mut index = HashMap::from([(identity, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for gn in &gen_nums {
            let next: Vec<u64> = elements[i].iter().zip(gn).map(|(a, b)| (a + b) % modulus).collect();
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() as u64 >= bound {
                return Err(GroupError::BoundExceeded(bound));
            }
            index.insert(next.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(next);
        }
    }
    Ok(DiscriminantAction { generators: gens.to_vec(), dim, modulus, elements, index })
}

/// Builds the generators and the full group for a graph and checks that the
/// group order equals `d(Γ)`.
pub fn discriminant_action(
    g: &ResolutionGraph,
    bound: u64,
) -> Result<(ActionGenerators, DiscriminantAction), GroupError> {
    let gens = action_generators(g)?;
    let action = generate_group(&gens.generators, bound)?;
    if !gens.degenerate && BigInt::from(action.order()) != gens.determinant {
        return Err(GroupError::NotFaithful { order: action.order(), determinant: gens.determinant });
    }
    Ok((gens, action))
}

impl DiscriminantAction {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[PhaseVector] {
        &self.generators
    }

    fn to_phase_vector(&self, nums: &[u64]) -> PhaseVector {
        PhaseVector::new(nums.iter().map(|&n| Phase::new(n as i128, self.modulus)).collect())
    }

    pub fn element(&self, i: usize) -> PhaseVector {
        self.to_phase_vector(&self.elements[i])
    }

    pub fn elements(&self) -> impl Iterator<Item = PhaseVector> + '_ {
        self.elements.iter().map(|e| self.to_phase_vector(e))
    }

    pub fn contains(&self, x: &PhaseVector) -> bool {
        self.position(x).is_some()
    }

    /// Index of `x` in [`elements`](Self::elements), if it belongs to the group.
    pub fn position(&self, x: &PhaseVector) -> Option<usize> {
        if x.len() != self.dim || x.coords.iter().any(|p| !self.modulus.is_multiple_of(p.den)) {
            return None;
        }
        self.index.get(&x.coords.iter().map(|p| p.over(self.modulus)).collect::<Vec<_>>()).copied()
    }

    /// Invariant factors (> 1, ascending, each dividing the next) read off the
    /// element orders: for each prime `p`, `log_p |G[p^k]|` determines how many
    /// cyclic factors have order at least `p^k`.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let orders: Vec<u64> = self
            .elements
            .iter()
            .map(|e| {
                let g = e.iter().fold(self.modulus, |acc, &x| acc.gcd(&x));
                self.modulus / g
            })
            .collect();
        let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for p in prime_factors(self.order()) {
            // c[k] = log_p #{x : p^k x = 0}
            let mut c = vec![0u32];
            let mut k = 1u32;
            loop {
                let pk = p.pow(k);
                let count = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                let log = ilog_exact(count, p);
                c.push(log);
                if log == c[c.len() - 2] {
                    break;
                }
                k += 1;
            }
            // r[k] = number of cyclic p-factors of order ≥ p^k
            let r: Vec<u32> = (1..c.len()).map(|k| c[k] - c[k - 1]).collect();
            let mut exps = Vec::new();
            for (k, &rk) in r.iter().enumerate() {
                let next = r.get(k + 1).copied().unwrap_or(0);
                exps.extend(std::iter::repeat_n(k as u32 + 1, (rk - next) as usize));
            }
            exps.sort_unstable_by(|a, b| b.cmp(a));
            per_prime.insert(p, exps);
        }
        let len = per_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors: Vec<u64> = (0..len)
            .map(|i| per_prime.iter().map(|(&p, exps)| exps.get(i).map_or(1, |&e| p.pow(e))).product())
            .collect();
        factors.reverse();
        factors
    }
}

fn ilog_exact(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        debug_assert_eq!(n % p, 0, "subgroup orders are prime powers");
        n /= p;
        k += 1;
    }
    k
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invariant factors (> 1, ascending) of the group generated by `gens`,
/// computed from the lattice they span: with `N` a common denominator, the
/// group is `L / N·Z^n` where `L` is spanned by `N·gens` and `N·Z^n`.
pub fn lattice_invariant_factors(gens: &[PhaseVector]) -> Result<Vec<u64>, GroupError> {
    let dim = gens.first().map_or(0, PhaseVector::len);
    if dim == 0 {
        return Ok(Vec::new());
    }
    if let Some(bad) = gens.iter().find(|g| g.len() != dim) {
        return Err(GroupError::LengthMismatch(dim, bad.len()));
    }
    let modulus = gens.iter().map(PhaseVector::order).fold(1u64, |a, b| a.lcm(&b));
    let rows = gens.len() + dim;
    let m = IntMatrix::from_fn(rows, dim, |i, j| {
        if i < gens.len() {
            BigInt::from(gens[i].coords[j].over(modulus))
        } else if i - gens.len() == j {
            BigInt::from(modulus)
        } else {
            BigInt::from(0)
        }
    });
    let snf = linalg::smith_normal_form(&m);
    let mut factors: Vec<u64> = snf
        .invariant_factors
        .iter()
        .map(|s| {
            let s = s.abs().to_u64().expect("divides the modulus");
            modulus / s
        })
        .filter(|&f| f > 1)
        .collect();
    factors.sort_unstable();
    Ok(factors)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreenessCheck {
    pub free: bool,
    /// A non-identity element fixing a coordinate hyperplane pointwise.
    pub offender: Option<PhaseVector>,
}

/// No non-identity element may have all coordinates but one equal to zero.
pub fn check_free_codim1(a: &DiscriminantAction) -> FreenessCheck {
    let offender = a.elements.iter().find(|e| e.iter().filter(|&&x| x != 0).count() == 1).map(|e| a.to_phase_vector(e));
    FreenessCheck { free: offender.is_none(), offender }
}

/// A character of the group, listed on the elements in the action's order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Character {
    pub values: Vec<Phase>,
}

impl Character {
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(Phase::is_zero)
    }
}

/// `χ(g) = Σ_k exponent_k · g_k mod 1` for every element `g`.
pub fn monomial_character(a: &DiscriminantAction, m: &Monomial) -> Character {
    Character { values: a.elements().map(|g| g.character_of(m)).collect() }
}

/// Values of a monomial's character on the generators only; equal keys mean
/// equal characters.
pub fn character_key(gens: &[PhaseVector], m: &Monomial) -> Vec<Phase> {
    gens.iter().map(|g| g.character_of(m)).collect()
}

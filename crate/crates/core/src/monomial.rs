//! Monomials in the end variables `z_1, …, z_n`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

/// Exponent vector over the ends of a splice diagram, in end order.
///
/// Ordering is lexicographic on the exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exponents: Vec<u64>,
}

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Self { exponents: vec![0; num_vars] }
    }

    pub fn new(exponents: Vec<u64>) -> Self {
        Self { exponents }
    }

    /// `z_var^power` (0-based variable index).
    pub fn power(num_vars: usize, var: usize, power: u64) -> Self {
        let mut m = Self::one(num_vars);
        m.exponents[var] = power;
        m
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn num_vars(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponent(&self, var: usize) -> u64 {
        self.exponents[var]
    }

    pub fn degree(&self) -> u64 {
        self.exponents.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Variable indices with nonzero exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exponents.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    /// Weighted degree `Σ exponent_k · weights_k`.
    pub fn weighted_degree(&self, weights: &[u64]) -> u64 {
        assert_eq!(weights.len(), self.exponents.len(), "weight vector length");
        self.exponents.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.num_vars(), other.num_vars());
        Monomial::new(self.exponents.iter().zip(&other.exponents).map(|(a, b)| a + b).collect())
    }

    /// Exponent map keyed by variable name (`z1`, `z2`, …), zero exponents omitted.
    pub fn exponent_map(&self) -> BTreeMap<String, u64> {
        self.support().map(|i| (format!("z{}", i + 1), self.exponents[i])).collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for i in self.support() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            match self.exponents[i] {
                1 => write!(f, "z{}", i + 1)?,
                e => write!(f, "z{}^{}", i + 1, e)?,
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.exponent_map().serialize(serializer)
    }
}

/// All monomials in `num_vars` variables of total degree at most `max_degree`,
/// in ascending lexicographic order.
pub fn monomials_up_to_degree(num_vars: usize, max_degree: u64) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u64>, left: usize, budget: u64, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial::new(prefix.clone()));
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(num_vars), num_vars, max_degree, &mut out);
    out
}

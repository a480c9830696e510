//! Sparse multivariate polynomials over arbitrary-precision integers.
//!
//! Monomials are keyed by exponent vectors in graded-lexicographic order,
//! so equal polynomials have identical term sequences and comparison is
//! structural.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::CoreError;

/// Exponent vector with graded-lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `n` variables with `BigInt` coefficients.
///
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: BigInt) -> Self {
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Exponents(vec![0; n]), c);
        }
        p
    }

    /// The monomial `c * x_j^e`.
    pub fn monomial(n: usize, c: BigInt, exps: Vec<u32>) -> Result<Self, CoreError> {
        if exps.len() != n {
            return Err(CoreError::DimensionMismatch { expected: n, got: exps.len() });
        }
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Exponents(exps), c);
        }
        Ok(p)
    }

    pub fn var(n: usize, j: usize) -> Self {
        let mut exps = vec![0u32; n];
        exps[j] = 1;
        Poly::monomial(n, BigInt::one(), exps).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponents::total_degree).max()
    }

    /// Degree if every monomial has the same total degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Exponents::total_degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn add_term(&mut self, exps: Exponents, c: BigInt) {
        debug_assert_eq!(exps.0.len(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.n, other.n);
        let mut out = Poly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> =
                    ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect();
                out.add_term(Exponents(exps), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        let mut out = Poly::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (e, k) in &self.terms {
            out.terms.insert(e.clone(), k * c);
        }
        out
    }

    pub fn eval(&self, point: &[BigInt]) -> Result<BigInt, CoreError> {
        if point.len() != self.n {
            return Err(CoreError::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    term *= x.pow(k);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to variable `j`.
    pub fn derivative(&self, j: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            let k = e.0[j];
            if k == 0 {
                continue;
            }
            let mut exps = e.0.clone();
            exps[j] = k - 1;
            out.add_term(Exponents(exps), c * BigInt::from(k));
        }
        out
    }

    /// Substitute `x_j -> x_j + h_j`, expanding each monomial binomially.
    pub fn shift(&self, h: &[BigInt]) -> Result<Poly, CoreError> {
        if h.len() != self.n {
            return Err(CoreError::DimensionMismatch { expected: self.n, got: h.len() });
        }
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            let mut partial = Poly::constant(self.n, c.clone());
            for (j, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                // (x_j + h_j)^k = sum_i C(k,i) h_j^(k-i) x_j^i
                let mut factor = Poly::zero(self.n);
                let mut binom = BigInt::one();
                for i in 0..=k {
                    let mut exps = vec![0u32; self.n];
                    exps[j] = i;
                    let coeff = &binom * h[j].pow(k - i);
                    factor.add_term(Exponents(exps), coeff);
                    // C(k, i+1) = C(k, i) * (k-i) / (i+1)
                    binom = binom * BigInt::from(k - i) / BigInt::from(i + 1);
                }
                partial = partial.mul(&factor);
            }
            out = out.add(&partial);
        }
        Ok(out)
    }
}

/// The forward difference `f(x + h) - f(x)`.
///
/// Strictly decreases total degree for non-constant `f`.
pub fn forward_difference(f: &Poly, h: &[BigInt]) -> Result<Poly, CoreError> {
    Ok(f.shift(h)?.sub(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn grlex_orders_by_degree_first() {
        assert!(Exponents(vec![0, 2]) > Exponents(vec![1, 0]));
        assert!(Exponents(vec![1, 1]) < Exponents(vec![2, 0]));
    }

    #[test]
    fn forward_difference_of_square() {
        // f = y^2, h = 1  ->  2y + 1
        let f = Poly::monomial(1, bi(1), vec![2]).unwrap();
        let d = forward_difference(&f, &[bi(1)]).unwrap();
        let mut expect = Poly::zero(1);
        expect.add_term(Exponents(vec![1]), bi(2));
        expect.add_term(Exponents(vec![0]), bi(1));
        assert_eq!(d, expect);
    }

    #[test]
    fn forward_difference_of_product() {
        // f = x1 x2, h = (1,2)  ->  2 x1 + x2 + 2
        let f = Poly::monomial(2, bi(1), vec![1, 1]).unwrap();
        let d = forward_difference(&f, &[bi(1), bi(2)]).unwrap();
        let mut expect = Poly::zero(2);
        expect.add_term(Exponents(vec![1, 0]), bi(2));
        expect.add_term(Exponents(vec![0, 1]), bi(1));
        expect.add_term(Exponents(vec![0, 0]), bi(2));
        assert_eq!(d, expect);
    }

    #[test]
    fn repeated_difference_kills_degree() {
        // d-fold difference of a degree-d form is constant.
        let f = Poly::monomial(2, bi(3), vec![2, 1]).unwrap(); // 3 x1^2 x2, degree 3
        let mut g = f;
        for h in [[bi(1), bi(2)], [bi(3), bi(1)], [bi(2), bi(5)]] {
            g = forward_difference(&g, &h).unwrap();
        }
        assert!(g.degree().unwrap_or(0) == 0);
    }

    #[test]
    fn shift_matches_eval() {
        let f = Poly::monomial(2, bi(7), vec![3, 2]).unwrap();
        let shifted = f.shift(&[bi(4), bi(-3)]).unwrap();
        let lhs = shifted.eval(&[bi(2), bi(5)]).unwrap();
        let rhs = f.eval(&[bi(6), bi(2)]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn homogeneous_degree_detection() {
        let mut p = Poly::zero(2);
        p.add_term(Exponents(vec![2, 0]), bi(1));
        p.add_term(Exponents(vec![0, 2]), bi(-1));
        assert_eq!(p.homogeneous_degree(), Some(2));
        p.add_term(Exponents(vec![1, 0]), bi(1));
        assert_eq!(p.homogeneous_degree(), None);
    }
}

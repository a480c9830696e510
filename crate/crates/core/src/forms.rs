//! Homogeneous integral forms and their multilinear polar forms.
//!
//! The polar form used throughout is the d-fold iterated forward
//! difference of the form, which has integer coefficients by construction
//! and satisfies `Polar(x,...,x) = d! * F(x)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::CoreError;
use crate::poly::{Exponents, Poly};

/// One monomial of a form: coefficient and exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coefficient: BigInt,
    pub exponents: Vec<u32>,
}

/// A nonzero homogeneous polynomial of positive degree with integer
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerForm {
    n: usize,
    degree: u32,
    poly: Poly,
}

impl IntegerForm {
    /// Build a form from monomials, enforcing homogeneity, distinct
    /// exponent vectors and nonzero coefficients.
    pub fn new(n: usize, degree: u32, monomials: Vec<Monomial>) -> Result<Self, CoreError> {
        if degree == 0 {
            return Err(CoreError::Invalid("form degree must be positive".into()));
        }
        if monomials.is_empty() {
            return Err(CoreError::Invalid("the zero form is not allowed".into()));
        }
        let mut poly = Poly::zero(n);
        let mut seen = alloc::collections::BTreeSet::new();
        for (idx, m) in monomials.iter().enumerate() {
            if m.exponents.len() != n {
                return Err(CoreError::DimensionMismatch { expected: n, got: m.exponents.len() });
            }
            if m.coefficient.is_zero() {
                return Err(CoreError::Invalid(alloc::format!(
                    "monomial {idx}: zero coefficient"
                )));
            }
            let total: u32 = m.exponents.iter().sum();
            if total != degree {
                return Err(CoreError::Invalid(alloc::format!(
                    "monomial {idx}: exponent sum {total} != degree {degree}"
                )));
            }
            if !seen.insert(m.exponents.clone()) {
                return Err(CoreError::Invalid(alloc::format!(
                    "monomial {idx}: duplicate exponent vector"
                )));
            }
            poly.add_term(Exponents(m.exponents.clone()), m.coefficient.clone());
        }
        Ok(IntegerForm { n, degree, poly })
    }

    /// Wrap an already-built polynomial, checking it is homogeneous of
    /// positive degree.
    pub fn from_poly(poly: Poly) -> Result<Self, CoreError> {
        match poly.homogeneous_degree() {
            Some(d) if d >= 1 => Ok(IntegerForm { n: poly.n(), degree: d, poly }),
            Some(_) => Err(CoreError::Invalid("form degree must be positive".into())),
            None => Err(CoreError::Invalid(
                "polynomial is zero or not homogeneous".into(),
            )),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.poly.terms().map(|(e, c)| Monomial {
            coefficient: c.clone(),
            exponents: e.0.clone(),
        })
    }

    /// Exact value of the form at an integer point.
    pub fn eval(&self, point: &[BigInt]) -> Result<BigInt, CoreError> {
        self.poly.eval(point)
    }

    /// Gradient as a vector of polynomials.
    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.n).map(|j| self.poly.derivative(j)).collect()
    }

    /// The d-multilinear polar form, normalized so that the diagonal
    /// equals `d! * F`.
    pub fn polar_form(&self) -> MultilinearForm {
        let d = self.degree as usize;
        let mut terms: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e, c) in self.poly.terms() {
            // List of slot variables, one entry per unit of exponent.
            let mut vars: Vec<u32> = Vec::with_capacity(d);
            let mut weight = BigInt::one();
            for (j, &k) in e.0.iter().enumerate() {
                for _ in 0..k {
                    vars.push(j as u32);
                }
                for f in 1..=k {
                    weight *= BigInt::from(f);
                }
            }
            // Each distinct arrangement of the multiset receives the
            // coefficient c * prod(e_j!), so the diagonal sums to d! c x^e.
            let coeff = c * &weight;
            loop {
                terms
                    .entry(vars.clone())
                    .and_modify(|v| *v += &coeff)
                    .or_insert_with(|| coeff.clone());
                if !next_permutation(&mut vars) {
                    break;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MultilinearForm { n: self.n, arity: self.degree, terms }
    }

    /// The row vector `F_(x_1,...,x_{d-1})` with
    /// `Polar(x_1,...,x_d) = F_ . x_d`.
    pub fn polar_row_vector(&self, slots: &[Vec<BigInt>]) -> Result<Vec<BigInt>, CoreError> {
        self.polar_form().row_vector(slots)
    }
}

/// A symmetric multilinear form in `arity` vector slots of dimension `n`.
///
/// Terms map a per-slot variable choice `(j_1,...,j_d)` to a coefficient;
/// each term is linear in every slot by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearForm {
    n: usize,
    arity: u32,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MultilinearForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    /// Check slot-permutation symmetry by comparing each term against the
    /// canonical (sorted) representative of its slot class.
    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(key, c)| {
            let mut sorted = key.clone();
            sorted.sort_unstable();
            // Every arrangement of `sorted` must be present with the same
            // coefficient.
            let mut arr = sorted;
            loop {
                if self.terms.get(&arr) != Some(c) {
                    return false;
                }
                if !next_permutation(&mut arr) {
                    break;
                }
            }
            true
        })
    }

    /// Evaluate at `arity` integer vectors.
    pub fn eval(&self, slots: &[Vec<BigInt>]) -> Result<BigInt, CoreError> {
        if slots.len() != self.arity as usize {
            return Err(CoreError::DimensionMismatch {
                expected: self.arity as usize,
                got: slots.len(),
            });
        }
        for s in slots {
            if s.len() != self.n {
                return Err(CoreError::DimensionMismatch { expected: self.n, got: s.len() });
            }
        }
        let mut acc = BigInt::zero();
        for (key, c) in &self.terms {
            let mut term = c.clone();
            for (slot, &j) in slots.iter().zip(key) {
                term *= &slot[j as usize];
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Contract all slots but the last over integer vectors, producing the
    /// coefficient vector of the final slot.
    pub fn row_vector(&self, slots: &[Vec<BigInt>]) -> Result<Vec<BigInt>, CoreError> {
        if slots.len() + 1 != self.arity as usize {
            return Err(CoreError::DimensionMismatch {
                expected: self.arity as usize - 1,
                got: slots.len(),
            });
        }
        for s in slots {
            if s.len() != self.n {
                return Err(CoreError::DimensionMismatch { expected: self.n, got: s.len() });
            }
        }
        let mut out = vec![BigInt::zero(); self.n];
        for (key, c) in &self.terms {
            let mut term = c.clone();
            for (slot, &j) in slots.iter().zip(key) {
                term *= &slot[j as usize];
            }
            out[*key.last().unwrap() as usize] += term;
        }
        Ok(out)
    }
}

/// In-place next lexicographic permutation; returns false after the last.
fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

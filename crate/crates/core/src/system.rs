//! The central input object: a system of forms grouped by degree,
//! together with its congruence data and counting box.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::CoreError;
use crate::forms::{IntegerForm, MultilinearForm};
use crate::poly::Poly;

/// An axis-aligned box contained in `[-1,1]^n` with nonempty interior on
/// every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    sides: Vec<(f64, f64)>,
}

impl BoxRegion {
    pub fn new(sides: Vec<(f64, f64)>) -> Result<Self, CoreError> {
        for (i, &(a, b)) in sides.iter().enumerate() {
            if !(a.is_finite() && b.is_finite()) {
                return Err(CoreError::Invalid(alloc::format!("box[{i}]: non-finite endpoint")));
            }
            if !(-1.0..=1.0).contains(&a) || !(-1.0..=1.0).contains(&b) {
                return Err(CoreError::Invalid(alloc::format!(
                    "box[{i}]: endpoints must lie in [-1, 1]"
                )));
            }
            if a >= b {
                return Err(CoreError::Invalid(alloc::format!("box[{i}]: requires a < b")));
            }
        }
        Ok(BoxRegion { sides })
    }

    /// The cube `[-1,1]^n`.
    pub fn full_cube(n: usize) -> Self {
        BoxRegion { sides: vec![(-1.0, 1.0); n] }
    }

    pub fn n(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[(f64, f64)] {
        &self.sides
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().map(|(a, b)| b - a).product()
    }

    pub fn contains_origin(&self) -> bool {
        self.sides.iter().all(|&(a, b)| a <= 0.0 && 0.0 <= b)
    }
}

/// The degree multiplicities `r_1..r_D` of a system, with `r_D >= 1`.
///
/// Carries everything the admissibility invariants need: `Delta`, `R`,
/// `D_j` and the total weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    r: Vec<u32>, // r[d-1] = r_d
}

impl DegreeProfile {
    pub fn new(r: Vec<u32>) -> Result<Self, CoreError> {
        match r.last() {
            Some(&last) if last >= 1 => Ok(DegreeProfile { r }),
            _ => Err(CoreError::Invalid("profile requires r_D >= 1".into())),
        }
    }

    /// Profile with `count` forms of a single degree.
    pub fn single_degree(degree: u32, count: u32) -> Result<Self, CoreError> {
        if degree == 0 || count == 0 {
            return Err(CoreError::Invalid("degree and count must be positive".into()));
        }
        let mut r = vec![0u32; degree as usize];
        r[degree as usize - 1] = count;
        DegreeProfile::new(r)
    }

    /// From `(degree, count)` pairs.
    pub fn from_counts(counts: &[(u32, u32)]) -> Result<Self, CoreError> {
        let max = counts
            .iter()
            .filter(|&&(_, c)| c > 0)
            .map(|&(d, _)| d)
            .max()
            .ok_or_else(|| CoreError::Invalid("empty profile".into()))?;
        let mut r = vec![0u32; max as usize];
        for &(d, c) in counts {
            if d == 0 {
                return Err(CoreError::Invalid("degree 0 not allowed".into()));
            }
            r[d as usize - 1] += c;
        }
        DegreeProfile::new(r)
    }

    /// `r_d`, zero outside `1..=D`.
    pub fn r(&self, d: u32) -> u32 {
        if d == 0 {
            0
        } else {
            self.r.get(d as usize - 1).copied().unwrap_or(0)
        }
    }

    /// Maximal degree `D`.
    pub fn max_degree(&self) -> u32 {
        self.r.len() as u32
    }

    /// Total number of forms `R`.
    pub fn total_forms(&self) -> u32 {
        self.r.iter().sum()
    }

    /// `Delta`: degrees with at least one form.
    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.r
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i as u32 + 1)
    }

    /// `D_j = r_1 + 2 r_2 + ... + j r_j` (with `D_0 = 0`).
    pub fn weight_up_to(&self, j: u32) -> u64 {
        (1..=j.min(self.max_degree()))
            .map(|d| u64::from(d) * u64::from(self.r(d)))
            .sum()
    }

    /// Total weight `D = D_D`.
    pub fn weight(&self) -> u64 {
        self.weight_up_to(self.max_degree())
    }
}

/// A full system `{F_{i,d}}` with congruence class `m_0 mod M` and
/// counting box.
#[derive(Debug, Clone, PartialEq)]
pub struct FormSystem {
    n: usize,
    modulus: u64,
    m0: Vec<i64>,
    box_region: BoxRegion,
    forms: BTreeMap<u32, Vec<IntegerForm>>,
}

impl FormSystem {
    pub fn new(
        n: usize,
        modulus: u64,
        m0: Vec<i64>,
        box_region: BoxRegion,
        forms: Vec<IntegerForm>,
    ) -> Result<Self, CoreError> {
        if n == 0 {
            return Err(CoreError::Invalid("n must be positive".into()));
        }
        if modulus == 0 {
            return Err(CoreError::Invalid("M must be positive".into()));
        }
        if m0.len() != n {
            return Err(CoreError::DimensionMismatch { expected: n, got: m0.len() });
        }
        for (i, &c) in m0.iter().enumerate() {
            if c < 0 || c as u64 >= modulus {
                return Err(CoreError::Invalid(alloc::format!(
                    "m0[{i}] = {c} out of [0, M-1]"
                )));
            }
        }
        if box_region.n() != n {
            return Err(CoreError::DimensionMismatch { expected: n, got: box_region.n() });
        }
        if forms.is_empty() {
            return Err(CoreError::Invalid("system must contain at least one form".into()));
        }
        let mut grouped: BTreeMap<u32, Vec<IntegerForm>> = BTreeMap::new();
        for (i, f) in forms.into_iter().enumerate() {
            if f.n() != n {
                return Err(CoreError::Invalid(alloc::format!(
                    "forms[{i}]: variable count {} != n = {n}",
                    f.n()
                )));
            }
            grouped.entry(f.degree()).or_default().push(f);
        }
        Ok(FormSystem { n, modulus, m0, box_region, forms: grouped })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn m0(&self) -> &[i64] {
        &self.m0
    }

    pub fn box_region(&self) -> &BoxRegion {
        &self.box_region
    }

    /// Forms of one degree, in input order.
    pub fn forms_of_degree(&self, d: u32) -> &[IntegerForm] {
        self.forms.get(&d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All forms, grouped by ascending degree.
    pub fn all_forms(&self) -> impl Iterator<Item = (u32, &IntegerForm)> {
        self.forms
            .iter()
            .flat_map(|(&d, fs)| fs.iter().map(move |f| (d, f)))
    }

    pub fn profile(&self) -> DegreeProfile {
        let max = *self.forms.keys().next_back().unwrap();
        let mut r = vec![0u32; max as usize];
        for (&d, fs) in &self.forms {
            r[d as usize - 1] = fs.len() as u32;
        }
        DegreeProfile::new(r).unwrap()
    }

    /// The matrix `J_d(x)` of gradient rows of the degree-`d` forms.
    pub fn jacobian_matrix(&self, d: u32, x: &[BigInt]) -> Result<Vec<Vec<BigInt>>, CoreError> {
        let forms = self.forms.get(&d).ok_or(CoreError::DegreeAbsent(d))?;
        if x.len() != self.n {
            return Err(CoreError::DimensionMismatch { expected: self.n, got: x.len() });
        }
        forms
            .iter()
            .map(|f| {
                f.gradient()
                    .iter()
                    .map(|g| g.eval(x))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect()
    }

    /// The matrix `J^_d(x_1,...,x_{d-1})` of polar row vectors; satisfies
    /// `J^_d(x,...,x) = (d-1)! J_d(x)`.
    pub fn hat_jacobian(
        &self,
        d: u32,
        slots: &[Vec<BigInt>],
    ) -> Result<Vec<Vec<BigInt>>, CoreError> {
        let forms = self.forms.get(&d).ok_or(CoreError::DegreeAbsent(d))?;
        forms.iter().map(|f| f.polar_row_vector(slots)).collect()
    }

    /// Polar forms of every degree-`d` form.
    pub fn polar_forms(&self, d: u32) -> Result<Vec<MultilinearForm>, CoreError> {
        let forms = self.forms.get(&d).ok_or(CoreError::DegreeAbsent(d))?;
        Ok(forms.iter().map(IntegerForm::polar_form).collect())
    }

    /// Replace the system by an equivalent one with the same zero set:
    /// `G_{i,d} = F_{i,d} + sum H_{j,e} F_{j,e}` over sources with
    /// `(e = d, j < i)` or `e < d`, where `H` is homogeneous of degree
    /// `d - e` (a constant when `e = d` is permitted).
    pub fn apply_equivalence(&self, steps: &[EquivalenceStep]) -> Result<FormSystem, CoreError> {
        let mut new_forms: BTreeMap<u32, Vec<Poly>> = self
            .forms
            .iter()
            .map(|(&d, fs)| (d, fs.iter().map(|f| f.poly().clone()).collect()))
            .collect();
        for step in steps {
            let d = step.degree;
            let nforms = self.forms_of_degree(d).len();
            if step.index >= nforms {
                return Err(CoreError::Invalid(alloc::format!(
                    "equivalence target ({}, {}) out of range",
                    step.index,
                    d
                )));
            }
            let mut acc = Poly::zero(self.n);
            for src in &step.sources {
                let e = src.src_degree;
                let allowed = (e == d && src.src_index < step.index) || e < d;
                if !allowed {
                    return Err(CoreError::Invalid(alloc::format!(
                        "equivalence source ({}, {e}) not below target ({}, {d})",
                        src.src_index,
                        step.index
                    )));
                }
                let sources = self.forms_of_degree(e);
                let f = sources.get(src.src_index).ok_or_else(|| {
                    CoreError::Invalid(alloc::format!(
                        "equivalence source index {} out of range for degree {e}",
                        src.src_index
                    ))
                })?;
                let want = d - e;
                if src.multiplier.n() != self.n {
                    return Err(CoreError::DimensionMismatch {
                        expected: self.n,
                        got: src.multiplier.n(),
                    });
                }
                if !src.multiplier.is_zero() {
                    match src.multiplier.homogeneous_degree() {
                        Some(got) if got == want => {}
                        Some(got) => return Err(CoreError::DegreeMismatch { expected: want, got }),
                        None => {
                            return Err(CoreError::Invalid(
                                "equivalence multiplier must be homogeneous".into(),
                            ))
                        }
                    }
                    acc = acc.add(&src.multiplier.mul(f.poly()));
                }
            }
            let target = &mut new_forms.get_mut(&d).unwrap()[step.index];
            *target = target.add(&acc);
        }
        let rebuilt: Vec<IntegerForm> = new_forms
            .into_iter()
            .flat_map(|(_, ps)| ps)
            .map(IntegerForm::from_poly)
            .collect::<Result<_, _>>()?;
        FormSystem::new(
            self.n,
            self.modulus,
            self.m0.clone(),
            self.box_region.clone(),
            rebuilt,
        )
    }

    /// Exact values of every form at an integer point, in `(d, i)` order.
    pub fn eval_all(&self, x: &[BigInt]) -> Result<Vec<BigInt>, CoreError> {
        self.all_forms().map(|(_, f)| f.eval(x)).collect()
    }

    /// True when every form vanishes at the point.
    pub fn vanishes_at(&self, x: &[BigInt]) -> Result<bool, CoreError> {
        for (_, f) in self.all_forms() {
            if !f.eval(x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One replacement `F_{i,d} <- F_{i,d} + sum H * F_src`.
#[derive(Debug, Clone)]
pub struct EquivalenceStep {
    pub degree: u32,
    pub index: usize,
    pub sources: Vec<MultiplierTerm>,
}

/// A single multiplier `H_{j,e}` of degree `d - e`.
#[derive(Debug, Clone)]
pub struct MultiplierTerm {
    pub src_degree: u32,
    pub src_index: usize,
    pub multiplier: Poly,
}

/// Convenience: the diagonal form `sum c_j x_j^degree`.
pub fn diagonal_form(n: usize, degree: u32, coeffs: &[i64]) -> Result<IntegerForm, CoreError> {
    let mut poly = Poly::zero(n);
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut exps = vec![0u32; n];
        exps[j] = degree;
        poly = poly.add(&Poly::monomial(n, BigInt::from(c), exps)?);
    }
    IntegerForm::from_poly(poly)
}

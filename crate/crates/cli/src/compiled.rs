//! Fast evaluation paths shared by the enumeration kernels: forms
//! compiled to flat monomial lists over `i128`, `f64` and `Z/q`, lattice
//! ranges for the dilated box, and detection of the solve-last shape.

use formcount_core::{FormSystem, IntegerForm};
use num_traits::ToPrimitive;

use crate::error::CliError;

/// A form flattened to `(coefficient, [(variable, exponent)])` monomials.
#[derive(Debug, Clone)]
pub struct CompiledForm {
    pub degree: u32,
    pub monomials: Vec<(i128, Vec<(usize, u32)>)>,
}

impl CompiledForm {
    pub fn new(form: &IntegerForm) -> Result<Self, CliError> {
        let monomials = form
            .monomials()
            .map(|m| {
                let c = m.coefficient.to_i128().ok_or_else(|| {
                    CliError::Validation("coefficient exceeds 128-bit range".into())
                })?;
                let vars: Vec<(usize, u32)> = m
                    .exponents
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| (j, e))
                    .collect();
                Ok((c, vars))
            })
            .collect::<Result<_, CliError>>()?;
        Ok(CompiledForm { degree: form.degree(), monomials })
    }

    /// Exact evaluation with overflow checking.
    pub fn eval_i128(&self, x: &[i128]) -> Option<i128> {
        let mut acc: i128 = 0;
        for (c, vars) in &self.monomials {
            let mut t = *c;
            for &(j, e) in vars {
                for _ in 0..e {
                    t = t.checked_mul(x[j])?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    /// An upper bound for |F| over a box, from coefficient magnitudes
    /// and per-axis extremes.
    pub fn sup_bound(&self, sides: &[(f64, f64)]) -> f64 {
        self.monomials
            .iter()
            .map(|(c, vars)| {
                let mut t = (*c as f64).abs();
                for &(j, e) in vars {
                    t *= sides[j].0.abs().max(sides[j].1.abs()).powi(e as i32);
                }
                t
            })
            .sum()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, vars) in &self.monomials {
            let mut t = *c as f64;
            for &(j, e) in vars {
                t *= x[j].powi(e as i32);
            }
            acc += t;
        }
        acc
    }
}

/// Compile every form of the system, in `(d, i)` order.
pub fn compile_system(sys: &FormSystem) -> Result<Vec<CompiledForm>, CliError> {
    sys.all_forms().map(|(_, f)| CompiledForm::new(f)).collect()
}

/// A form reduced mod `q` and grouped by the exponent of one chosen
/// variable, so the inner enumeration loop can evaluate it by Horner.
#[derive(Debug, Clone)]
pub struct ModForm {
    pub q: u64,
    /// `by_exp[k]` holds the monomials carrying `x_pivot^k`, with the
    /// pivot variable removed.
    pub by_exp: Vec<Vec<(u64, Vec<(usize, u32)>)>>,
}

impl ModForm {
    pub fn reduce(form: &CompiledForm, q: u64, pivot: usize) -> Self {
        let qq = q as i128;
        let mut by_exp: Vec<Vec<(u64, Vec<(usize, u32)>)>> = Vec::new();
        for (c, vars) in &form.monomials {
            let r = (c.rem_euclid(qq)) as u64;
            let mut k = 0u32;
            let rest: Vec<(usize, u32)> = vars
                .iter()
                .filter(|&&(j, e)| {
                    if j == pivot {
                        k = e;
                        false
                    } else {
                        true
                    }
                })
                .copied()
                .collect();
            if by_exp.len() <= k as usize {
                by_exp.resize(k as usize + 1, Vec::new());
            }
            if r != 0 {
                by_exp[k as usize].push((r, rest));
            }
        }
        if by_exp.is_empty() {
            by_exp.push(Vec::new());
        }
        ModForm { q, by_exp }
    }

    /// Horner coefficients in the pivot variable at a point of the other
    /// coordinates (indexed by full variable index; the pivot slot is
    /// ignored).
    pub fn coeffs_at(&self, point: &[u64], out: &mut Vec<u64>) {
        let q = self.q;
        out.clear();
        for group in &self.by_exp {
            let mut acc: u64 = 0;
            for (c, vars) in group {
                let mut t = *c;
                for &(j, e) in vars {
                    t = mulmod(t, powmod(point[j], e as u64, q), q);
                }
                acc = (acc + t) % q;
            }
            out.push(acc);
        }
    }

    /// Evaluate from Horner coefficients at a pivot value.
    pub fn horner(coeffs: &[u64], pivot: u64, q: u64) -> u64 {
        let mut acc: u64 = 0;
        for &c in coeffs.iter().rev() {
            acc = (mulmod(acc, pivot, q) + c) % q;
        }
        acc
    }
}

/// Evaluate a compiled form at a point of (Z/q)^n.
pub fn eval_mod(form: &CompiledForm, u: &[u64], q: u64) -> u64 {
    let qq = q as i128;
    let mut acc: u64 = 0;
    for (c, vars) in &form.monomials {
        let mut t = c.rem_euclid(qq) as u64;
        for &(j, e) in vars {
            t = mulmod(t, powmod(u[j], u64::from(e), q), q);
        }
        acc = (acc + t) % q;
    }
    acc
}

pub fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    base %= q;
    let mut acc: u64 = 1 % q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, q);
        }
        base = mulmod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Inclusive ranges of the auxiliary variable `y` with `m0 + M y` in the
/// dilated box `P * B` (closed on both sides).
pub fn y_ranges(sys: &FormSystem, p: f64) -> Result<Vec<(i64, i64)>, CliError> {
    if !(p > 0.0) {
        return Err(CliError::Usage("P must be positive".into()));
    }
    let m = sys.modulus() as f64;
    Ok(sys
        .box_region()
        .sides()
        .iter()
        .zip(sys.m0())
        .map(|(&(a, b), &m0)| {
            let lo = ((p * a - m0 as f64) / m).ceil() as i64;
            let hi = ((p * b - m0 as f64) / m).floor() as i64;
            (lo, hi)
        })
        .collect())
}

/// Number of lattice points in the ranges (0 if any range is empty).
pub fn range_size(ranges: &[(i64, i64)]) -> f64 {
    ranges
        .iter()
        .map(|&(lo, hi)| if hi < lo { 0.0 } else { (hi - lo + 1) as f64 })
        .product()
}

/// The solve-last shape: the last variable appears in exactly one form,
/// and there purely as `c * x_n^d` plus terms free of `x_n`.
#[derive(Debug, Clone)]
pub struct SolveLastShape {
    /// Position of the residual form in `(d, i)` order.
    pub form_pos: usize,
    /// Coefficient `c` of the pure power.
    pub coeff: i128,
    /// Its exponent (= the form's degree).
    pub degree: u32,
}

pub fn detect_solve_last(sys: &FormSystem) -> Option<SolveLastShape> {
    let last = sys.n() - 1;
    let mut found: Option<SolveLastShape> = None;
    for (pos, (_, form)) in sys.all_forms().enumerate() {
        let touching: Vec<_> = form
            .monomials()
            .filter(|m| m.exponents[last] > 0)
            .collect();
        if touching.is_empty() {
            continue;
        }
        if found.is_some() || touching.len() != 1 {
            return None;
        }
        let m = &touching[0];
        if m.exponents[last] != form.degree() {
            return None;
        }
        found = Some(SolveLastShape {
            form_pos: pos,
            coeff: m.coefficient.to_i128()?,
            degree: form.degree(),
        });
    }
    found
}

/// Exact integer solutions of `c * t^d = v`.
pub fn pure_power_roots(c: i128, d: u32, v: i128) -> Vec<i128> {
    debug_assert!(c != 0 && d >= 1);
    if v % c != 0 {
        return Vec::new();
    }
    let w = v / c;
    if w == 0 {
        return vec![0];
    }
    if d % 2 == 0 && w < 0 {
        return Vec::new();
    }
    let mag = w.unsigned_abs();
    let root = integer_nth_root(mag, d);
    if checked_pow_u128(root, d) != Some(mag) {
        return Vec::new();
    }
    let r = root as i128;
    if d % 2 == 1 {
        vec![if w < 0 { -r } else { r }]
    } else if r == 0 {
        vec![0]
    } else {
        vec![r, -r]
    }
}

fn integer_nth_root(v: u128, d: u32) -> u128 {
    if v == 0 {
        return 0;
    }
    let mut guess = (v as f64).powf(1.0 / d as f64) as u128;
    while checked_pow_u128(guess + 1, d).is_some_and(|p| p <= v) {
        guess += 1;
    }
    while guess > 0 && checked_pow_u128(guess, d).map_or(true, |p| p > v) {
        guess -= 1;
    }
    guess
}

fn checked_pow_u128(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Build a rayon pool with the requested worker count (0 = default).
pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use formcount_core::{system::diagonal_form, BoxRegion};

    fn quadric5() -> FormSystem {
        let f = diagonal_form(5, 2, &[1, 1, 1, -1, -1]).unwrap();
        FormSystem::new(5, 1, vec![0; 5], BoxRegion::full_cube(5), vec![f]).unwrap()
    }

    #[test]
    fn ranges_unit_box() {
        let sys = quadric5();
        let r = y_ranges(&sys, 10.0).unwrap();
        assert_eq!(r, vec![(-10, 10); 5]);
        assert_eq!(range_size(&r), 21f64.powi(5));
    }

    #[test]
    fn ranges_with_congruence() {
        let f = diagonal_form(2, 1, &[1, -1]).unwrap();
        let sys = FormSystem::new(2, 2, vec![1, 1], BoxRegion::full_cube(2), vec![f]).unwrap();
        // x = 1 + 2y in [-10, 10]  ->  y in [-5, 4].
        let r = y_ranges(&sys, 10.0).unwrap();
        assert_eq!(r, vec![(-5, 4); 2]);
    }

    #[test]
    fn solve_last_detection() {
        let sys = quadric5();
        let s = detect_solve_last(&sys).unwrap();
        assert_eq!(s.coeff, -1);
        assert_eq!(s.degree, 2);
        assert_eq!(s.form_pos, 0);
    }

    #[test]
    fn solve_last_rejects_mixed_terms() {
        // x1^2 + x1 x2 involves the last variable in a mixed monomial.
        let f = formcount_core::IntegerForm::new(
            2,
            2,
            vec![
                formcount_core::Monomial {
                    coefficient: 1.into(),
                    exponents: vec![2, 0],
                },
                formcount_core::Monomial {
                    coefficient: 1.into(),
                    exponents: vec![1, 1],
                },
            ],
        )
        .unwrap();
        let sys = FormSystem::new(2, 1, vec![0, 0], BoxRegion::full_cube(2), vec![f]).unwrap();
        assert!(detect_solve_last(&sys).is_none());
    }

    #[test]
    fn pure_power_root_extraction() {
        assert_eq!(pure_power_roots(1, 2, 25), vec![5, -5]);
        assert_eq!(pure_power_roots(1, 2, 26), Vec::<i128>::new());
        assert_eq!(pure_power_roots(-1, 2, -49), vec![7, -7]);
        assert_eq!(pure_power_roots(1, 3, -27), vec![-3]);
        assert_eq!(pure_power_roots(2, 3, 16), vec![2]);
        assert_eq!(pure_power_roots(2, 3, 15), Vec::<i128>::new());
        assert_eq!(pure_power_roots(3, 4, 0), vec![0]);
    }

    #[test]
    fn modform_matches_direct_eval() {
        let sys = quadric5();
        let forms = compile_system(&sys).unwrap();
        let mf = ModForm::reduce(&forms[0], 7, 4);
        let point = [3u64, 5, 6, 2, 0];
        let mut coeffs = Vec::new();
        mf.coeffs_at(&point, &mut coeffs);
        for t in 0..7u64 {
            let direct = forms[0]
                .eval_i128(&[3, 5, 6, 2, t as i128])
                .unwrap()
                .rem_euclid(7) as u64;
            assert_eq!(ModForm::horner(&coeffs, t, 7), direct);
        }
    }
}

//! Exact evaluation of the admissibility conditions for systems of forms:
//! singular-locus dimension estimates `B_d`, the partial weights `D_j`,
//! the rationals `s_d`, the integers `t_d` and `n_0(d)`, the classical
//! single-degree threshold, the main admissibility inequality, the crude
//! upper bounds on `n_0`, and the dimension/degree threshold predicates.
//!
//! Every condition is evaluated in exact integer or rational arithmetic;
//! strict inequalities are decided deterministically.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::CoreError;
use crate::gf::{rank_mod_p, ModPoly};
use crate::system::{DegreeProfile, FormSystem};

/// Finite-field point-counting estimate of `B_d = dim S_d`, the dimension
/// of the locus where the degree-`d` Jacobian drops rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularLocusEstimate {
    pub degree: u32,
    /// The estimated dimension, in `[0, n]`.
    pub estimate: u32,
    /// `(p, #{x in F_p^n : rank J_d(x) < r_d})` per tested prime.
    pub per_prime: Vec<(u64, u128)>,
    /// All tested primes produced the same rounded exponent.
    pub confident: bool,
    /// The estimate was supplied by the caller, not sampled.
    pub override_used: bool,
    /// The locus was empty over every tested prime.
    pub empty_over_tested_primes: bool,
    /// `estimate = n`: the degree-`d` forms are everywhere rank-deficient
    /// (e.g. linearly dependent) and the system is excluded.
    pub excluded: bool,
}

/// Count points of `S_d(F_p)` and estimate `dim S_d` as the rounded
/// median of `log_p #S_d(F_p)` over the supplied primes.
///
/// Reduction mod p can only enlarge the rank-deficient locus, so an
/// unlucky prime may overestimate; the median over several primes and the
/// `confident` flag mitigate this. An `override` bypasses sampling
/// entirely (mandatory when `p^n` exceeds the budget).
pub fn estimate_bd(
    sys: &FormSystem,
    d: u32,
    primes: &[u64],
    budget: u128,
    override_value: Option<u32>,
) -> Result<SingularLocusEstimate, CoreError> {
    let n = sys.n();
    let forms = sys.forms_of_degree(d);
    if forms.is_empty() {
        return Err(CoreError::DegreeAbsent(d));
    }
    if let Some(b) = override_value {
        if b as usize > n {
            return Err(CoreError::Invalid(alloc::format!("override B_{d} = {b} exceeds n")));
        }
        return Ok(SingularLocusEstimate {
            degree: d,
            estimate: b,
            per_prime: Vec::new(),
            confident: true,
            override_used: true,
            empty_over_tested_primes: false,
            excluded: b as usize == n,
        });
    }
    if primes.is_empty() {
        return Err(CoreError::Invalid("estimate_bd: no primes supplied".into()));
    }
    for &p in primes {
        let needed = (p as u128)
            .checked_pow(n as u32)
            .ok_or(CoreError::BudgetExceeded { needed: u128::MAX, budget })?;
        if needed > budget {
            return Err(CoreError::BudgetExceeded { needed, budget });
        }
    }
    let r_d = forms.len();
    let mut per_prime = Vec::new();
    let mut exponents: Vec<Option<u32>> = Vec::new();
    for &p in primes {
        // Gradient rows reduced mod p, one row of polynomials per form.
        let grads: Vec<Vec<ModPoly>> = forms
            .iter()
            .map(|f| f.gradient().iter().map(|g| ModPoly::reduce(g, p)).collect())
            .collect();
        let mut count: u128 = 0;
        let mut point = alloc::vec![0u64; n];
        loop {
            let rows: Vec<Vec<u64>> = grads
                .iter()
                .map(|row| row.iter().map(|g| g.eval(&point)).collect())
                .collect();
            if rank_mod_p(rows, p) < r_d {
                count += 1;
            }
            // Odometer over F_p^n.
            let mut j = 0;
            loop {
                if j == n {
                    break;
                }
                point[j] += 1;
                if point[j] < p {
                    break;
                }
                point[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
        }
        per_prime.push((p, count));
        exponents.push(rounded_log(count, p, n as u32));
    }
    let mut known: Vec<u32> = exponents.iter().flatten().copied().collect();
    known.sort_unstable();
    let empty = known.is_empty();
    let estimate = if empty { 0 } else { known[known.len() / 2] };
    let confident = !empty
        && exponents.iter().all(|e| *e == Some(estimate))
        && exponents.len() >= primes.len();
    Ok(SingularLocusEstimate {
        degree: d,
        estimate,
        per_prime,
        confident,
        override_used: false,
        empty_over_tested_primes: empty,
        excluded: estimate as usize == n,
    })
}

/// Nearest integer to `log_p(count)`, capped at `max`, computed exactly:
/// the least `e` with `count^2 <= p^(2e+1)`.
fn rounded_log(count: u128, p: u64, max: u32) -> Option<u32> {
    if count == 0 {
        return None;
    }
    let c2 = BigUint::from(count) * BigUint::from(count);
    let pb = BigUint::from(p);
    for e in 0..=max {
        if c2 <= pb.pow(2 * e + 1) {
            return Some(e);
        }
    }
    Some(max)
}

/// `D_j = r_1 + 2 r_2 + ... + j r_j`, with `D_0 = 0`.
pub fn curly_d(profile: &DegreeProfile, j: u32) -> u64 {
    profile.weight_up_to(j)
}

/// Resolve the `B_d` convention: caller-supplied for `d in Delta`, zero
/// when `r_d = 0` (and for `d = 0`).
fn b_of(profile: &DegreeProfile, b: &BTreeMap<u32, u32>, d: u32) -> u32 {
    if d >= 1 && profile.r(d) >= 1 {
        b.get(&d).copied().unwrap_or(0)
    } else {
        0
    }
}

/// The exact rationals `s_d = sum_{k=d}^D 2^(k-1) (k-1) r_k / (n - B_k)`
/// for `d = 1..D+1` (so `s_{D+1} = 0`). Index `d` maps to `result[d-1]`.
pub fn s_values(
    profile: &DegreeProfile,
    b: &BTreeMap<u32, u32>,
    n: u32,
) -> Result<Vec<BigRational>, CoreError> {
    let dmax = profile.max_degree();
    for k in profile.degrees() {
        let bk = b_of(profile, b, k);
        if n <= bk {
            return Err(CoreError::VariableDeficit { degree: k, n, b: bk });
        }
    }
    let mut out = alloc::vec![BigRational::zero(); dmax as usize + 1];
    // Build from the top: s_d = s_{d+1} + term(d).
    for d in (1..=dmax).rev() {
        let mut s = out[d as usize].clone();
        let rk = profile.r(d);
        if rk >= 1 && d >= 2 {
            let num = BigInt::from(2u32).pow(d - 1) * BigInt::from(d - 1) * BigInt::from(rk);
            let den = BigInt::from(n - b_of(profile, b, d));
            s += BigRational::new(num, den);
        }
        out[d as usize - 1] = s;
    }
    Ok(out)
}

/// Integer tails `t_d = sum_{k=d}^D 2^(k-1) (k-1) r_k` for `d = 1..D+1`.
pub fn t_values(profile: &DegreeProfile) -> Vec<u128> {
    let dmax = profile.max_degree();
    let mut out = alloc::vec![0u128; dmax as usize + 1];
    for d in (1..=dmax).rev() {
        let mut t = out[d as usize];
        if d >= 2 {
            t += (1u128 << (d - 1)) * u128::from(d - 1) * u128::from(profile.r(d));
        }
        out[d as usize - 1] = t;
    }
    out
}

/// The `n_0` data of the simplified admissibility corollary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct N0Values {
    /// `t_d` for `d = 1..D+1` (index `d-1`).
    pub t: Vec<u128>,
    /// `n_0(d)` for `d in Delta union {0}`.
    pub n0_of_d: BTreeMap<u32, u128>,
    /// The threshold `n_0`.
    pub n0: u128,
}

/// Compute `t_d`, `n_0(d) = D_d (2^(d-1) + t_{d+1}) + t_{d+1} +
/// sum_{j>d} t_j r_j`, and `n_0 = max over Delta union {0}`.
///
/// For a purely linear system (`D = 1`) every `t_d` vanishes and `n_0` is
/// taken to be `0`, matching the single-degree closed form
/// `R(R+1)(D-1) 2^(D-1)`; degree-one forms are otherwise assumed to have
/// been eliminated by substitution.
pub fn n0_values(profile: &DegreeProfile) -> N0Values {
    let dmax = profile.max_degree();
    let t = t_values(profile);
    let tail = |d: u32| -> u128 {
        // t_{d+1} with t_{D+1} = 0.
        if d >= dmax {
            0
        } else {
            t[d as usize]
        }
    };
    let mut n0_of_d = BTreeMap::new();
    let mut degrees: Vec<u32> = profile.degrees().collect();
    degrees.insert(0, 0);
    for &d in &degrees {
        let dd = u128::from(curly_d(profile, d));
        let cross: u128 = (d + 1..=dmax)
            .map(|j| t[j as usize - 1] * u128::from(profile.r(j)))
            .sum();
        let pow = if d == 0 { 0 } else { 1u128 << (d - 1) };
        let value = dd * (pow + tail(d)) + tail(d) + cross;
        n0_of_d.insert(d, value);
    }
    let n0 = if dmax == 1 {
        0
    } else {
        n0_of_d.values().copied().max().unwrap_or(0)
    };
    N0Values { t, n0_of_d, n0 }
}

/// Verdict of the classical single-degree threshold
/// `n > B + R(R+1)(D-1) 2^(D-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirchCheck {
    pub threshold: u128,
    pub passes: bool,
}

pub fn check_birch(n: u32, b: u32, r: u32, d: u32) -> BirchCheck {
    let pow = if d == 0 { 0 } else { 1u128 << (d - 1) };
    let threshold =
        u128::from(b) + u128::from(r) * u128::from(r + 1) * u128::from(d.saturating_sub(1)) * pow;
    BirchCheck { threshold, passes: u128::from(n) > threshold }
}

/// Per-degree margins of the main admissibility condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremCheck {
    /// Exact left-hand sides, keyed by `d in Delta union {0}`; the
    /// condition requires every margin `< 1` strictly.
    pub margins: BTreeMap<u32, BigRational>,
    pub passes: bool,
}

/// Evaluate, for `d = 0` and every `d in Delta`, the exact rational
/// `D_d (2^(d-1)/(n - B_d) + s_{d+1}) + s_{d+1} + sum_{j>d} s_j r_j`,
/// and require each to be `< 1`.
pub fn check_theorem_main(
    profile: &DegreeProfile,
    n: u32,
    b: &BTreeMap<u32, u32>,
) -> Result<TheoremCheck, CoreError> {
    let dmax = profile.max_degree();
    let s = s_values(profile, b, n)?;
    // s_d with s_{D+1} = 0.
    let s_at = |d: u32| -> BigRational {
        if d as usize >= s.len() + 1 {
            BigRational::zero()
        } else if d == 0 {
            s[0].clone()
        } else {
            s.get(d as usize - 1).cloned().unwrap_or_else(BigRational::zero)
        }
    };
    let mut degrees: Vec<u32> = profile.degrees().collect();
    degrees.insert(0, 0);
    let one = BigRational::one();
    let mut margins = BTreeMap::new();
    let mut passes = true;
    for &d in &degrees {
        let dd = BigRational::from(BigInt::from(curly_d(profile, d)));
        let s_next = s_at(d + 1);
        let mut lhs = s_next.clone();
        if d >= 1 {
            let bd = b_of(profile, b, d);
            let local = BigRational::new(
                BigInt::from(2u32).pow(d - 1),
                BigInt::from(n - bd),
            );
            lhs += dd * (local + &s_next);
        }
        for j in d + 1..=dmax {
            let rj = profile.r(j);
            if rj >= 1 {
                lhs += s_at(j) * BigRational::from(BigInt::from(rj));
            }
        }
        if lhs >= one {
            passes = false;
        }
        margins.insert(d, lhs);
    }
    Ok(TheoremCheck { margins, passes })
}

/// The two crude upper bounds on `n_0 + R - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrudeBounds {
    pub lhs: u128,
    /// `D^2 2^(D-1)` (total weight squared).
    pub bound_square: BigUint,
    /// `(D - 1) 2^D` in the total weight.
    pub bound_exponential: BigUint,
    pub first_holds: bool,
    pub second_holds: bool,
}

/// Check `n_0 + R - 1 <= D^2 2^(D-1)` and `n_0 + R - 1 <= (D-1) 2^D`,
/// where the bounds are in the total weight and the max degree as in the
/// crude-threshold theorem.
pub fn check_crude_bounds(profile: &DegreeProfile) -> CrudeBounds {
    let n0 = n0_values(profile).n0;
    let r = u128::from(profile.total_forms());
    let lhs = n0 + r - 1;
    let weight = profile.weight();
    let dmax = profile.max_degree();
    let bound_square =
        BigUint::from(weight) * BigUint::from(weight) * (BigUint::one() << (dmax as usize - 1));
    let bound_exponential = BigUint::from(weight - 1) * (BigUint::one() << weight as usize);
    let lhs_big = BigUint::from(lhs);
    CrudeBounds {
        lhs,
        first_holds: lhs_big <= bound_square,
        second_holds: lhs_big <= bound_exponential,
        bound_square,
        bound_exponential,
    }
}

/// Degree of the complete intersection cut out by the system:
/// `prod_d d^(r_d)`.
pub fn variety_degree(profile: &DegreeProfile) -> BigUint {
    let mut acc = BigUint::one();
    for d in profile.degrees() {
        acc *= BigUint::from(d).pow(profile.r(d));
    }
    acc
}

/// Dimension/degree threshold predicates for smooth projective varieties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdPredicates {
    /// `dim >= (deg - 1) 2^deg - 1`.
    pub smooth_theorem: bool,
    /// `dim >= 2 deg - 1`.
    pub conjecture: bool,
    /// The Hartshorne-style complete-intersection inequality, identical in
    /// form to the conjectural threshold.
    pub hartshorne_form: bool,
}

pub fn threshold_predicates(dim: u64, deg: u64) -> ThresholdPredicates {
    let smooth = if deg == 0 || deg == 1 {
        true
    } else {
        let rhs = BigUint::from(deg - 1) * (BigUint::one() << deg as usize);
        // dim >= rhs - 1
        BigUint::from(dim) + BigUint::one() >= rhs
    };
    let linear = dim + 1 >= 2 * deg;
    ThresholdPredicates { smooth_theorem: smooth, conjecture: linear, hartshorne_form: linear }
}

/// Per-degree verdict of the optimal-system bound
/// `B_d <= r_d + ... + r_D - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaImproveCheck {
    /// `(bound, holds)` keyed by `d in Delta`.
    pub per_degree: BTreeMap<u32, (u32, bool)>,
    pub all_hold: bool,
}

pub fn check_lemma_improve(
    profile: &DegreeProfile,
    b: &BTreeMap<u32, u32>,
) -> LemmaImproveCheck {
    let dmax = profile.max_degree();
    let mut per_degree = BTreeMap::new();
    let mut all_hold = true;
    for d in profile.degrees() {
        let bound: u32 = (d..=dmax).map(|k| profile.r(k)).sum::<u32>() - 1;
        let bd = b_of(profile, b, d);
        let ok = bd <= bound;
        all_hold &= ok;
        per_degree.insert(d, (bound, ok));
    }
    LemmaImproveCheck { per_degree, all_hold }
}

/// Everything the `check` verb reports, assembled from the pieces above.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub n: u32,
    /// `B_d` actually used, keyed by `d in Delta`.
    pub b: BTreeMap<u32, u32>,
    /// `D_0..D_D`.
    pub dj: Vec<u64>,
    /// `s_1..s_{D+1}`.
    pub s: Vec<BigRational>,
    /// `t_1..t_{D+1}`.
    pub t: Vec<u128>,
    pub n0_of_d: BTreeMap<u32, u128>,
    pub n0: u128,
    pub theorem_main: TheoremCheck,
    /// Present only for single-degree profiles.
    pub birch: Option<BirchCheck>,
    pub crude: CrudeBounds,
    pub lemma_improve: LemmaImproveCheck,
    pub variety_degree: BigUint,
}

/// Assemble the full report for a profile with known (or estimated)
/// `B_d` values.
pub fn invariant_report(
    profile: &DegreeProfile,
    n: u32,
    b: &BTreeMap<u32, u32>,
) -> Result<InvariantReport, CoreError> {
    let dmax = profile.max_degree();
    let dj: Vec<u64> = (0..=dmax).map(|j| curly_d(profile, j)).collect();
    let s = s_values(profile, b, n)?;
    let n0v = n0_values(profile);
    let theorem_main = check_theorem_main(profile, n, b)?;
    let birch = if profile.degrees().count() == 1 {
        let d = profile.degrees().next().unwrap();
        let bd = b_of(profile, b, d);
        Some(check_birch(n, bd, profile.total_forms(), d))
    } else {
        None
    };
    let crude = check_crude_bounds(profile);
    let lemma_improve = check_lemma_improve(profile, b);
    let used_b: BTreeMap<u32, u32> =
        profile.degrees().map(|d| (d, b_of(profile, b, d))).collect();
    Ok(InvariantReport {
        n,
        b: used_b,
        dj,
        s,
        t: n0v.t,
        n0_of_d: n0v.n0_of_d,
        n0: n0v.n0,
        theorem_main,
        birch,
        crude,
        lemma_improve,
        variety_degree: variety_degree(profile),
    })
}

/// Enumerate every degree profile with total weight at most `max_weight`
/// (all partitions with multiplicities, highest degree carrying at least
/// one form).
pub fn profiles_up_to_weight(max_weight: u32) -> Vec<DegreeProfile> {
    let mut out = Vec::new();
    // Partitions of every m <= max_weight into parts d with multiplicity r_d.
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        for d in (1..=max_part.min(remaining)).rev() {
            current.push(d);
            rec(remaining - d, d, current, out);
            current.pop();
        }
    }
    let mut parts = Vec::new();
    rec(max_weight, max_weight, &mut Vec::new(), &mut parts);
    for partition in parts {
        let dmax = partition[0];
        let mut r = alloc::vec![0u32; dmax as usize];
        for d in partition {
            r[d as usize - 1] += 1;
        }
        out.push(DegreeProfile::new(r).unwrap());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{diagonal_form, BoxRegion, FormSystem};
    use alloc::vec;

    fn profile(counts: &[(u32, u32)]) -> DegreeProfile {
        DegreeProfile::from_counts(counts).unwrap()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn curly_d_examples() {
        let p = profile(&[(2, 2), (3, 1)]);
        assert_eq!(curly_d(&p, 0), 0);
        assert_eq!(curly_d(&p, 2), 4);
        assert_eq!(curly_d(&p, 3), 7);
        let single = DegreeProfile::single_degree(4, 3).unwrap();
        assert_eq!(single.weight(), 12);
    }

    #[test]
    fn s_values_examples() {
        // Single form of degree D with B_D = 0: s_D = 2^(D-1)(D-1)/n.
        let p = DegreeProfile::single_degree(4, 1).unwrap();
        let s = s_values(&p, &BTreeMap::new(), 100).unwrap();
        assert_eq!(s[3], rat(24, 100)); // 2^3 * 3 / 100
        assert_eq!(s[4], BigRational::zero()); // s_{D+1} = 0

        // Quadratic + cubic, B_2 = 1, B_3 = 0, n = 37.
        let p = profile(&[(2, 1), (3, 1)]);
        let b: BTreeMap<u32, u32> = [(2, 1), (3, 0)].into_iter().collect();
        let s = s_values(&p, &b, 37).unwrap();
        assert_eq!(s[2], rat(8, 37));
        assert_eq!(s[1], rat(181, 666));
    }

    #[test]
    fn s_values_variable_deficit() {
        let p = DegreeProfile::single_degree(2, 1).unwrap();
        let b: BTreeMap<u32, u32> = [(2, 5)].into_iter().collect();
        assert!(matches!(
            s_values(&p, &b, 5),
            Err(CoreError::VariableDeficit { degree: 2, .. })
        ));
    }

    #[test]
    fn n0_quadratics_plus_degree_d() {
        // r quadratics + one degree-D form, D >= 3.
        for d in 3u32..=8 {
            for r in 1u32..=8 {
                let p = profile(&[(2, r), (d, 1)]);
                let v = n0_values(&p);
                let two = 1u128 << (d - 1);
                let n0_d = u128::from(d + 2 * r) * two;
                let n0_2 = u128::from(2 + 2 * r) * u128::from(d - 1) * two + 4 * u128::from(r);
                let n0_0 = u128::from(2 + r) * u128::from(d - 1) * two
                    + 2 * u128::from(r) * u128::from(1 + r);
                assert_eq!(v.n0_of_d[&d], n0_d, "n0(D) at D={d} r={r}");
                assert_eq!(v.n0_of_d[&2], n0_2, "n0(2) at D={d} r={r}");
                assert_eq!(v.n0_of_d[&0], n0_0, "n0(0) at D={d} r={r}");
                let expect = if u128::from(r) > u128::from(d - 1) * (1 << (d - 2)) {
                    n0_0
                } else {
                    n0_2
                };
                assert_eq!(v.n0, expect.max(n0_d));
            }
        }
    }

    #[test]
    fn n0_pair_of_degrees() {
        // One degree-D and one degree-E form, D > E >= 2.
        for d in 3u32..=8 {
            for e in 2..d {
                let p = profile(&[(e, 1), (d, 1)]);
                let v = n0_values(&p);
                let expect = u128::from(2 + e) * u128::from(d - 1) * (1u128 << (d - 1))
                    + u128::from(e) * (1u128 << (e - 1));
                assert_eq!(v.n0, expect, "pair D={d} E={e}");
            }
        }
    }

    #[test]
    fn n0_single_degree_matches_classical() {
        for d in 2u32..=8 {
            for r in 1u32..=8 {
                let p = DegreeProfile::single_degree(d, r).unwrap();
                let v = n0_values(&p);
                let expect =
                    u128::from(r) * u128::from(r + 1) * u128::from(d - 1) * (1u128 << (d - 1));
                assert_eq!(v.n0, expect, "single degree D={d} R={r}");
            }
        }
        // Purely linear systems carry no condition.
        let p = DegreeProfile::single_degree(1, 4).unwrap();
        assert_eq!(n0_values(&p).n0, 0);
    }

    #[test]
    fn birch_thresholds() {
        assert!(!check_birch(4, 0, 1, 2).passes);
        assert!(check_birch(5, 0, 1, 2).passes);
        assert!(!check_birch(16, 0, 1, 3).passes);
        assert!(check_birch(17, 0, 1, 3).passes);
        let c = check_birch(12, 0, 2, 2);
        assert_eq!(c.threshold, 12);
        assert!(!c.passes);
        assert!(check_birch(13, 0, 2, 2).passes);
    }

    #[test]
    fn theorem_main_single_quadric() {
        let p = DegreeProfile::single_degree(2, 1).unwrap();
        let b = BTreeMap::new();
        let c = check_theorem_main(&p, 5, &b).unwrap();
        assert_eq!(c.margins[&2], rat(4, 5));
        assert_eq!(c.margins[&0], rat(4, 5));
        assert!(c.passes);
        // n = 4: margin exactly 1, strict failure.
        let c = check_theorem_main(&p, 4, &b).unwrap();
        assert_eq!(c.margins[&2], rat(1, 1));
        assert!(!c.passes);
    }

    #[test]
    fn theorem_main_quadratic_cubic_threshold() {
        let p = profile(&[(2, 1), (3, 1)]);
        let b: BTreeMap<u32, u32> = [(2, 1), (3, 0)].into_iter().collect();
        assert!(check_theorem_main(&p, 37, &b).unwrap().passes);
        assert!(!check_theorem_main(&p, 36, &b).unwrap().passes);
    }

    #[test]
    fn theorem_main_margins_decrease_in_n() {
        let p = profile(&[(2, 2), (4, 1)]);
        let b = BTreeMap::new();
        let mut prev: Option<BTreeMap<u32, BigRational>> = None;
        for n in 60..66 {
            let c = check_theorem_main(&p, n, &b).unwrap();
            if let Some(prev) = prev {
                for (d, m) in &c.margins {
                    assert!(m < &prev[d], "margin at d={d} not decreasing");
                }
            }
            prev = Some(c.margins);
        }
    }

    #[test]
    fn crude_bounds_pair_example() {
        // D=3, E=2: n0 = 36, R = 2, weight 5: 37 <= 100 and 37 <= 128.
        let p = profile(&[(2, 1), (3, 1)]);
        let c = check_crude_bounds(&p);
        assert_eq!(c.lhs, 37);
        assert_eq!(c.bound_square, BigUint::from(100u32));
        assert_eq!(c.bound_exponential, BigUint::from(128u32));
        assert!(c.first_holds && c.second_holds);
        // Linear-only systems hold trivially.
        let p = DegreeProfile::single_degree(1, 3).unwrap();
        let c = check_crude_bounds(&p);
        assert!(c.first_holds && c.second_holds);
    }

    #[test]
    fn variety_degree_examples() {
        assert_eq!(variety_degree(&profile(&[(2, 1), (3, 1)])), BigUint::from(6u32));
        assert_eq!(
            variety_degree(&DegreeProfile::single_degree(2, 4).unwrap()),
            BigUint::from(16u32)
        );
        assert_eq!(
            variety_degree(&DegreeProfile::single_degree(1, 7).unwrap()),
            BigUint::one()
        );
    }

    #[test]
    fn threshold_predicate_examples() {
        assert!(threshold_predicates(3, 2).smooth_theorem);
        assert!(!threshold_predicates(2, 2).smooth_theorem);
        assert!(threshold_predicates(15, 3).smooth_theorem);
        assert!(!threshold_predicates(14, 3).smooth_theorem);
        assert!(threshold_predicates(0, 1).smooth_theorem);
        assert!(threshold_predicates(3, 2).conjecture);
        assert!(!threshold_predicates(2, 2).conjecture);
    }

    #[test]
    fn lemma_improve_examples() {
        // Single nonsingular form: requires B_D = 0.
        let p = DegreeProfile::single_degree(3, 1).unwrap();
        let ok = check_lemma_improve(&p, &[(3, 0)].into_iter().collect());
        assert!(ok.all_hold);
        let bad = check_lemma_improve(&p, &[(3, 1)].into_iter().collect());
        assert!(!bad.all_hold);
    }

    #[test]
    fn estimator_diagonal_cubic() {
        // S_3 of x1^3 + x2^3 + x3^3 is just the origin.
        let f = diagonal_form(3, 3, &[1, 1, 1]).unwrap();
        let sys = FormSystem::new(3, 1, vec![0; 3], BoxRegion::full_cube(3), vec![f]).unwrap();
        let e = estimate_bd(&sys, 3, &[5, 7, 11], 10_000_000, None).unwrap();
        assert_eq!(e.estimate, 0);
        assert!(e.confident);
        assert!(e.per_prime.iter().all(|&(_, c)| c == 1));
    }

    #[test]
    fn estimator_coordinate_hyperplane() {
        // F = x1^2 in n = 3: S_2 = {x1 = 0}, dimension 2.
        let f = diagonal_form(3, 2, &[1, 0, 0]).unwrap();
        let sys = FormSystem::new(3, 1, vec![0; 3], BoxRegion::full_cube(3), vec![f]).unwrap();
        let e = estimate_bd(&sys, 2, &[5, 7, 11], 10_000_000, None).unwrap();
        assert_eq!(e.estimate, 2);
        assert!(e.confident);
        for &(p, c) in &e.per_prime {
            assert_eq!(c, u128::from(p) * u128::from(p));
        }
    }

    #[test]
    fn estimator_dependent_pair_excluded() {
        // {x1^2, 2 x1^2} is rank-deficient everywhere.
        let f1 = diagonal_form(3, 2, &[1, 0, 0]).unwrap();
        let f2 = diagonal_form(3, 2, &[2, 0, 0]).unwrap();
        let sys =
            FormSystem::new(3, 1, vec![0; 3], BoxRegion::full_cube(3), vec![f1, f2]).unwrap();
        let e = estimate_bd(&sys, 2, &[5, 7, 11], 10_000_000, None).unwrap();
        assert_eq!(e.estimate, 3);
        assert!(e.excluded);
    }

    #[test]
    fn estimator_budget_and_override() {
        let f = diagonal_form(3, 2, &[1, 1, 1]).unwrap();
        let sys = FormSystem::new(3, 1, vec![0; 3], BoxRegion::full_cube(3), vec![f]).unwrap();
        assert!(matches!(
            estimate_bd(&sys, 2, &[101], 100, None),
            Err(CoreError::BudgetExceeded { .. })
        ));
        let e = estimate_bd(&sys, 2, &[101], 100, Some(1)).unwrap();
        assert!(e.override_used);
        assert_eq!(e.estimate, 1);
    }

    #[test]
    fn profile_sweep_counts() {
        let ps = profiles_up_to_weight(6);
        // Partitions of 1..6: 1+2+3+5+7+11 = 29.
        assert_eq!(ps.len(), 29);
        assert!(ps.iter().all(|p| p.weight() <= 6 && p.r(p.max_degree()) >= 1));
    }

    #[test]
    fn report_quadratic_cubic_n37() {
        let p = profile(&[(2, 1), (3, 1)]);
        let b: BTreeMap<u32, u32> = [(2, 1), (3, 0)].into_iter().collect();
        let rep = invariant_report(&p, 37, &b).unwrap();
        assert!(rep.theorem_main.passes);
        assert_eq!(rep.n0, 36);
        assert_eq!(rep.dj, vec![0, 0, 2, 5]);
        assert!(rep.birch.is_none());
    }
}

//! Circle-method integrands computed directly: the exponential sum
//! S(alpha), complete sums S(a, q), the truncated singular series S(H),
//! the oscillatory integral J(gamma), the truncated singular integral
//! and major-arc membership.

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;

use formcount_core::FormSystem;

use crate::compiled::{
    compile_system, detect_solve_last, eval_mod, mulmod, range_size, thread_pool, y_ranges,
    CompiledForm, ModForm,
};
use crate::error::CliError;

use core::f64::consts::TAU;

/// Default refinement tolerance for the oscillatory integral J(gamma).
pub const DEFAULT_J_TOL: f64 = 1e-4;
/// Default cap on the total number of quadrature nodes for J(gamma).
pub const DEFAULT_J_NODE_CAP: u64 = 1 << 20;
/// Default refinement tolerance for the outer integral of the truncated
/// singular integral.
pub const DEFAULT_OUTER_TOL: f64 = 1e-3;
/// Default cap on outer quadrature nodes per refinement level.
pub const DEFAULT_OUTER_NODE_CAP: u64 = 1 << 13;
/// Default point budget for exponential-sum lattice scans.
pub const DEFAULT_EXPSUM_BUDGET: f64 = 1e9;

/// e(t) = exp(2 pi i t).
fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

/// One real frequency per form, in the canonical order (degree
/// ascending, then input order).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVector {
    values: Vec<f64>,
}

impl FrequencyVector {
    pub fn new(sys: &FormSystem, values: Vec<f64>) -> Result<Self, CliError> {
        let r = sys.profile().total_forms() as usize;
        if values.len() != r {
            return Err(CliError::Usage(format!(
                "frequency vector has {} entries but the system has {} forms",
                values.len(),
                r
            )));
        }
        Ok(FrequencyVector { values })
    }

    pub fn zeros(sys: &FormSystem) -> Self {
        FrequencyVector {
            values: vec![0.0; sys.profile().total_forms() as usize],
        }
    }

    /// The rational point a / q as a frequency vector.
    pub fn from_rational(sys: &FormSystem, q: u64, a: &[u64]) -> Result<Self, CliError> {
        let values = a.iter().map(|&ai| ai as f64 / q as f64).collect();
        FrequencyVector::new(sys, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// S(alpha) = sum over lattice points x = m0 + M y in P * B of
/// e(sum_j alpha_j F_j(x)).
pub fn s_alpha(
    sys: &FormSystem,
    alpha: &FrequencyVector,
    p: f64,
    budget: f64,
    threads: usize,
) -> Result<Complex64, CliError> {
    let n = sys.n();
    if alpha.values.len() != sys.profile().total_forms() as usize {
        return Err(CliError::Usage("frequency vector does not match the system".into()));
    }
    let ranges = y_ranges(sys, p)?;
    let points = range_size(&ranges);
    if points > budget {
        return Err(CliError::Budget { estimate: points, budget });
    }
    if ranges.iter().any(|&(lo, hi)| hi < lo) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let forms = compile_system(sys)?;
    let m = sys.modulus() as f64;
    let m0 = sys.m0();
    let pool = thread_pool(threads)?;
    let (lo0, hi0) = ranges[0];
    // Per-slice sums are combined sequentially in slice order, so the
    // floating-point result is independent of the worker count.
    let slices: Vec<Complex64> = pool.install(|| {
        (lo0..=hi0)
            .into_par_iter()
            .map(|y0| {
                let mut x = vec![0.0f64; n];
                x[0] = m0[0] as f64 + m * y0 as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                phase_scan(&forms, &alpha.values, &ranges, m, m0, &mut x, 1, &mut acc);
                acc
            })
            .collect()
    });
    Ok(slices.into_iter().sum())
}

#[allow(clippy::too_many_arguments)]
fn phase_scan(
    forms: &[CompiledForm],
    alpha: &[f64],
    ranges: &[(i64, i64)],
    m: f64,
    m0: &[i64],
    x: &mut [f64],
    depth: usize,
    acc: &mut Complex64,
) {
    if depth == ranges.len() {
        let phase: f64 = forms
            .iter()
            .zip(alpha)
            .map(|(f, &a)| a * f.eval_f64(x))
            .sum();
        *acc += e(phase);
        return;
    }
    let (lo, hi) = ranges[depth];
    for y in lo..=hi {
        x[depth] = m0[depth] as f64 + m * y as f64;
        phase_scan(forms, alpha, ranges, m, m0, x, depth + 1, acc);
    }
}

/// Joint distribution of the residue values of all forms: entry
/// `sum_j v_j q^j` counts the x in (Z/q)^n with F_j(m0 + M x) == v_j for
/// every j. The cost of computing it, in visited points, is
/// [`joint_cost`].
pub fn joint_distribution(
    sys: &FormSystem,
    q: u64,
    threads: usize,
) -> Result<Vec<u128>, CliError> {
    let n = sys.n();
    let r = sys.profile().total_forms() as usize;
    let size = (q as u128).checked_pow(r as u32).filter(|&s| s <= 100_000_000);
    let size = size.ok_or_else(|| {
        CliError::Validation(format!("joint residue table of size {q}^{r} is too large"))
    })? as usize;
    let forms = compile_system(sys)?;
    let m0q: Vec<u64> = sys
        .m0()
        .iter()
        .map(|&v| v.rem_euclid(q as i64) as u64)
        .collect();
    let mq = sys.modulus() % q;
    if n == 1 {
        let mut dist = vec![0u128; size];
        let mut values = vec![0u64; forms.len()];
        for x in 0..q {
            let u = [(m0q[0] + mulmod(mq, x, q)) % q];
            for (v, f) in values.iter_mut().zip(&forms) {
                *v = eval_mod(f, &u, q);
            }
            dist[pack(&values, q)] += 1;
        }
        return Ok(dist);
    }
    let fast = detect_solve_last(sys);
    let pool = thread_pool(threads)?;
    let slices: Vec<Vec<u128>> = pool.install(|| {
        (0..q)
            .into_par_iter()
            .map(|x0| {
                let mut u = vec![0u64; n];
                u[0] = (m0q[0] + mulmod(mq, x0, q)) % q;
                let mut dist = vec![0u128; size];
                match &fast {
                    Some(_) => {
                        let mut values = vec![0u64; forms.len()];
                        dist_fast_scan(&forms, q, &m0q, mq, &mut u, 1, &mut values, &mut dist);
                    }
                    None => {
                        let mods: Vec<ModForm> =
                            forms.iter().map(|f| ModForm::reduce(f, q, n - 1)).collect();
                        let mut coeffs = vec![Vec::new(); mods.len()];
                        dist_full_scan(&mods, q, &m0q, mq, &mut u, 1, &mut coeffs, &mut dist);
                    }
                }
                dist
            })
            .collect()
    });
    let mut dist = vec![0u128; size];
    for slice in &slices {
        for (acc, v) in dist.iter_mut().zip(slice) {
            *acc += v;
        }
    }
    if let Some(shape) = fast {
        // The scan left the last coordinate at 0; fold in the pure power
        // c * u_n^d by convolving coordinate `form_pos` of the table
        // with the value distribution of the power.
        let power = power_distribution(shape.coeff, shape.degree, m0q[n - 1], mq, q);
        let stride = (q as u128).pow(shape.form_pos as u32) as usize;
        let qus = q as usize;
        let mut folded = vec![0u128; size];
        for (idx, &c) in dist.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let digit = idx / stride % qus;
            let base = idx - digit * stride;
            for (w, &pw) in power.iter().enumerate() {
                if pw == 0 {
                    continue;
                }
                let nd = (digit + w) % qus;
                folded[base + nd * stride] += c * u128::from(pw);
            }
        }
        dist = folded;
    }
    Ok(dist)
}

/// Points visited when computing [`joint_distribution`].
pub fn joint_cost(sys: &FormSystem, q: u64) -> f64 {
    let n = sys.n() as i32;
    if n == 1 {
        return q as f64;
    }
    (q as f64).powi(if detect_solve_last(sys).is_some() { n - 1 } else { n })
}

/// `table[v]` = number of t in Z/q with c * (m0 + M t)^d == v (mod q).
fn power_distribution(c: i128, d: u32, m0: u64, mq: u64, q: u64) -> Vec<u64> {
    let cq = c.rem_euclid(q as i128) as u64;
    let mut table = vec![0u64; q as usize];
    for t in 0..q {
        let u = (m0 + mulmod(mq, t, q)) % q;
        let v = mulmod(cq, crate::compiled::powmod(u, u64::from(d), q), q);
        table[v as usize] += 1;
    }
    table
}

#[allow(clippy::too_many_arguments)]
fn dist_fast_scan(
    forms: &[CompiledForm],
    q: u64,
    m0q: &[u64],
    mq: u64,
    u: &mut [u64],
    depth: usize,
    values: &mut [u64],
    dist: &mut [u128],
) {
    let n = u.len();
    if depth == n - 1 {
        u[n - 1] = 0;
        for (v, f) in values.iter_mut().zip(forms) {
            *v = eval_mod(f, u, q);
        }
        dist[pack(values, q)] += 1;
        return;
    }
    for x in 0..q {
        u[depth] = (m0q[depth] + mulmod(mq, x, q)) % q;
        dist_fast_scan(forms, q, m0q, mq, u, depth + 1, values, dist);
    }
}

fn dist_full_scan(
    mods: &[ModForm],
    q: u64,
    m0q: &[u64],
    mq: u64,
    u: &mut [u64],
    depth: usize,
    coeffs: &mut [Vec<u64>],
    dist: &mut [u128],
) {
    let n = u.len();
    if depth == n - 1 {
        for (mf, cs) in mods.iter().zip(coeffs.iter_mut()) {
            mf.coeffs_at(u, cs);
        }
        let mut values = vec![0u64; mods.len()];
        for t in 0..q {
            let un = (m0q[n - 1] + mulmod(mq, t, q)) % q;
            for (v, cs) in values.iter_mut().zip(coeffs.iter()) {
                *v = ModForm::horner(cs, un, q);
            }
            dist[pack(&values, q)] += 1;
        }
        return;
    }
    for x in 0..q {
        u[depth] = (m0q[depth] + mulmod(mq, x, q)) % q;
        dist_full_scan(mods, q, m0q, mq, u, depth + 1, coeffs, dist);
    }
}

fn pack(values: &[u64], q: u64) -> usize {
    let mut idx = 0u128;
    for &v in values.iter().rev() {
        idx = idx * u128::from(q) + u128::from(v);
    }
    idx as usize
}

/// S(a, q) = sum over x mod q of e((sum_j a_j F_j(m0 + M x)) / q).
/// Phases are exact residues mod q; no floating arithmetic enters before
/// the final complex exponentials.
pub fn complete_sum(
    sys: &FormSystem,
    q: u64,
    a: &[u64],
    budget: f64,
    threads: usize,
) -> Result<Complex64, CliError> {
    validate_rational_point(sys, q, a)?;
    if q == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let cost = joint_cost(sys, q);
    if cost > budget {
        return Err(CliError::Budget { estimate: cost, budget });
    }
    let dist = joint_distribution(sys, q, threads)?;
    Ok(phased_sum(&dist, q, a))
}

/// sum_v dist[v] e((a . v) / q), with the dot product reduced mod q.
fn phased_sum(dist: &[u128], q: u64, a: &[u64]) -> Complex64 {
    let roots: Vec<Complex64> = (0..q).map(|w| e(w as f64 / q as f64)).collect();
    let r = a.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut digits = vec![0u64; r];
    for (idx, &count) in dist.iter().enumerate() {
        if count == 0 {
            continue;
        }
        unpack(idx, q, &mut digits);
        let mut w = 0u64;
        for (&ai, &vi) in a.iter().zip(&digits) {
            w = (w + mulmod(ai % q, vi, q)) % q;
        }
        acc += roots[w as usize].scale(count as f64);
    }
    acc
}

fn unpack(mut idx: usize, q: u64, digits: &mut [u64]) {
    for d in digits.iter_mut() {
        *d = (idx as u64) % q;
        idx /= q as usize;
    }
}

fn validate_rational_point(sys: &FormSystem, q: u64, a: &[u64]) -> Result<(), CliError> {
    if q == 0 {
        return Err(CliError::Usage("q must be positive".into()));
    }
    if a.len() != sys.profile().total_forms() as usize {
        return Err(CliError::Usage(format!(
            "numerator vector has {} entries but the system has {} forms",
            a.len(),
            sys.profile().total_forms()
        )));
    }
    if a.iter().any(|&ai| ai >= q) && q > 1 {
        return Err(CliError::Usage("numerators must satisfy 0 <= a_j < q".into()));
    }
    let g = a.iter().fold(q, |acc, &ai| acc.gcd(&ai));
    if g != 1 {
        return Err(CliError::Validation(format!(
            "gcd(q, a) = {g}, but the rational point a/q must be in lowest terms"
        )));
    }
    Ok(())
}

/// The truncated singular series S(H) with its per-q breakdown.
#[derive(Debug, Clone)]
pub struct SingularSeries {
    pub h: u64,
    /// Real part of the truncated sum.
    pub value: f64,
    /// Residual imaginary part; conjugate pairing forces it below 1e-9.
    pub imag: f64,
    /// Term for each q = 1..H, in order.
    pub per_q: Vec<f64>,
}

/// S(H) = sum_{q <= H} q^{-n} sum_{a mod q, gcd(q, a) = 1} S(a, q).
/// Terms are accumulated in increasing q and, within q, lexicographic a.
pub fn singular_series(
    sys: &FormSystem,
    h: u64,
    budget: f64,
    threads: usize,
) -> Result<SingularSeries, CliError> {
    if h == 0 {
        return Err(CliError::Usage("H must be at least 1".into()));
    }
    let cost: f64 = (2..=h).map(|q| joint_cost(sys, q)).sum();
    if cost > budget {
        return Err(CliError::Budget { estimate: cost, budget });
    }
    let n = sys.n() as i32;
    let r = sys.profile().total_forms() as usize;
    let mut total = Complex64::new(1.0, 0.0); // the q = 1 term
    let mut per_q = vec![1.0];
    for q in 2..=h {
        let dist = joint_distribution(sys, q, threads)?;
        let roots: Vec<Complex64> = (0..q).map(|w| e(w as f64 / q as f64)).collect();
        let mut term = Complex64::new(0.0, 0.0);
        let mut a = vec![0u64; r];
        let mut digits = vec![0u64; r];
        // Odometer over a in lexicographic order.
        loop {
            let g = a.iter().fold(q, |acc, &ai| acc.gcd(&ai));
            if g == 1 {
                let mut inner = Complex64::new(0.0, 0.0);
                for (idx, &count) in dist.iter().enumerate() {
                    if count == 0 {
                        continue;
                    }
                    unpack(idx, q, &mut digits);
                    let mut w = 0u64;
                    for (&ai, &vi) in a.iter().zip(&digits) {
                        w = (w + mulmod(ai, vi, q)) % q;
                    }
                    inner += roots[w as usize].scale(count as f64);
                }
                term += inner;
            }
            let mut carry = r;
            for (j, aj) in a.iter_mut().enumerate() {
                *aj += 1;
                if *aj < q {
                    carry = j;
                    break;
                }
                *aj = 0;
            }
            if carry == r {
                break;
            }
        }
        let term = term.unscale((q as f64).powi(n));
        per_q.push(term.re);
        total += term;
    }
    Ok(SingularSeries {
        h,
        value: total.re,
        imag: total.im,
        per_q,
    })
}

/// A tensor-product midpoint quadrature value with its refinement state.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub value: Complex64,
    /// Nodes per axis at the final refinement level.
    pub resolution: u64,
    /// Total nodes at the final refinement level.
    pub nodes: u64,
    /// Successive refinements agreed within tolerance before the cap.
    pub converged: bool,
}

/// J(gamma) = integral over B of e(sum_j gamma_j F_j(x)) dx, by midpoint
/// quadrature with doubling refinement until successive values differ by
/// less than `tol` or `node_cap` total nodes would be exceeded.
pub fn j_gamma(
    sys: &FormSystem,
    gamma: &FrequencyVector,
    tol: f64,
    node_cap: u64,
    threads: usize,
) -> Result<Quadrature, CliError> {
    let pool = thread_pool(threads)?;
    j_gamma_in_pool(&pool, sys, gamma, tol, node_cap)
}

/// [`j_gamma`] on a caller-owned pool, so nested quadratures do not
/// rebuild worker threads per evaluation.
pub fn j_gamma_in_pool(
    pool: &rayon::ThreadPool,
    sys: &FormSystem,
    gamma: &FrequencyVector,
    tol: f64,
    node_cap: u64,
) -> Result<Quadrature, CliError> {
    if gamma.values.len() != sys.profile().total_forms() as usize {
        return Err(CliError::Usage("frequency vector does not match the system".into()));
    }
    let forms = compile_system(sys)?;
    let sides = sys.box_region().sides().to_vec();
    let n = sides.len() as u32;
    // Starting resolution from the total phase oscillation across the
    // box: beginning at a single node invites aliasing (at resonant
    // frequencies all coarse dyadic grids can agree on a wrong value).
    let osc: f64 = forms
        .iter()
        .zip(&gamma.values)
        .map(|(f, &g)| g.abs() * f.sup_bound(&sides))
        .sum();
    let target = (4.0 * osc).ceil().max(1.0) as u64;
    let mut resolution: u64 = 1;
    while resolution < target
        && (resolution * 2).checked_pow(n).is_some_and(|total| total <= node_cap)
    {
        resolution *= 2;
    }
    let full_resolution = resolution >= target;
    let mut prev: Option<Complex64> = None;
    loop {
        let value = midpoint_grid(pool, &forms, &gamma.values, &sides, resolution);
        if let Some(p) = prev {
            if (value - p).norm() < tol {
                return Ok(Quadrature {
                    value,
                    resolution,
                    nodes: resolution.pow(n),
                    converged: full_resolution,
                });
            }
        }
        let next = resolution * 2;
        if next.checked_pow(n).is_none_or(|total| total > node_cap) {
            return Ok(Quadrature {
                value,
                resolution,
                nodes: resolution.pow(n),
                converged: false,
            });
        }
        prev = Some(value);
        resolution = next;
    }
}

fn midpoint_grid(
    pool: &rayon::ThreadPool,
    forms: &[CompiledForm],
    gamma: &[f64],
    sides: &[(f64, f64)],
    g: u64,
) -> Complex64 {
    let n = sides.len();
    let steps: Vec<f64> = sides.iter().map(|&(a, b)| (b - a) / g as f64).collect();
    let weight: f64 = steps.iter().product();
    // Slices over the first axis, reduced in index order so the result
    // does not depend on the worker count.
    let slices: Vec<Complex64> = pool.install(|| {
        (0..g)
            .into_par_iter()
            .map(|i0| {
                let mut x = vec![0.0f64; n];
                x[0] = sides[0].0 + (i0 as f64 + 0.5) * steps[0];
                let mut acc = Complex64::new(0.0, 0.0);
                grid_scan(forms, gamma, sides, &steps, g, &mut x, 1, &mut acc);
                acc
            })
            .collect()
    });
    slices.into_iter().sum::<Complex64>() * weight
}

#[allow(clippy::too_many_arguments)]
fn grid_scan(
    forms: &[CompiledForm],
    gamma: &[f64],
    sides: &[(f64, f64)],
    steps: &[f64],
    g: u64,
    x: &mut [f64],
    depth: usize,
    acc: &mut Complex64,
) {
    if depth == sides.len() {
        let phase: f64 = forms
            .iter()
            .zip(gamma)
            .map(|(f, &c)| c * f.eval_f64(x))
            .sum();
        *acc += e(phase);
        return;
    }
    for i in 0..g {
        x[depth] = sides[depth].0 + (i as f64 + 0.5) * steps[depth];
        grid_scan(forms, gamma, sides, steps, g, x, depth + 1, acc);
    }
}

/// The truncated singular integral.
#[derive(Debug, Clone)]
pub struct SingularIntegral {
    pub h: f64,
    pub value: f64,
    /// Magnitude of the last outer refinement increment.
    pub last_increment: f64,
    pub converged: bool,
}

/// I(H) = M^(-n) * integral over [-H, H]^R of J(gamma) d gamma, by
/// midpoint quadrature in gamma with doubling refinement. Inner values
/// of J that fail to converge propagate as a non-convergence error.
pub fn singular_integral(
    sys: &FormSystem,
    h: f64,
    outer_tol: f64,
    threads: usize,
) -> Result<SingularIntegral, CliError> {
    if h < 0.0 {
        return Err(CliError::Usage("H must be non-negative".into()));
    }
    if h == 0.0 {
        return Ok(SingularIntegral { h, value: 0.0, last_increment: 0.0, converged: true });
    }
    let r = sys.profile().total_forms() as u32;
    let n = sys.n() as i32;
    let m_scale = (sys.modulus() as f64).powi(-n);
    let pool = thread_pool(threads)?;
    // J(gamma_j) oscillates at rate up to sup|F_j| per unit of gamma_j;
    // starting coarser than that rate lets the midpoint grid alias (for
    // the linear fixture every coarse node sits on a zero of J).
    let forms = compile_system(sys)?;
    let sides = sys.box_region().sides();
    let sup_max = forms
        .iter()
        .map(|f| f.sup_bound(sides))
        .fold(0.0f64, f64::max);
    let target = (8.0 * h * sup_max).ceil().max(1.0);
    let mut m: u64 = 1;
    while (m as f64) < target {
        m *= 2;
        if m.checked_pow(r).is_none_or(|total| total > DEFAULT_OUTER_NODE_CAP) {
            return Err(CliError::NonConvergence(format!(
                "outer quadrature needs about {target} nodes per axis to resolve the \
                 oscillation of J, beyond the cap of {DEFAULT_OUTER_NODE_CAP} total"
            )));
        }
    }
    let mut prev: Option<f64> = None;
    let mut last_increment = f64::INFINITY;
    loop {
        let value = outer_midpoint(&pool, sys, h, r, m)? * m_scale;
        if let Some(p) = prev {
            last_increment = (value - p).abs();
            if last_increment < outer_tol {
                return Ok(SingularIntegral { h, value, last_increment, converged: true });
            }
        }
        let next = m * 2;
        if next.checked_pow(r).is_none_or(|total| total > DEFAULT_OUTER_NODE_CAP) {
            return Err(CliError::NonConvergence(format!(
                "outer quadrature for the singular integral did not settle below {outer_tol} \
                 (last increment {last_increment:.3e} at {m} nodes per axis)"
            )));
        }
        prev = Some(value);
        m = next;
    }
}

fn outer_midpoint(
    pool: &rayon::ThreadPool,
    sys: &FormSystem,
    h: f64,
    r: u32,
    m: u64,
) -> Result<f64, CliError> {
    let step = 2.0 * h / m as f64;
    let weight = step.powi(r as i32);
    let mut gamma = vec![0.0f64; r as usize];
    let mut idx = vec![0u64; r as usize];
    let mut acc = 0.0;
    loop {
        for (g, &i) in gamma.iter_mut().zip(&idx) {
            *g = -h + (i as f64 + 0.5) * step;
        }
        let fv = FrequencyVector::new(sys, gamma.clone())?;
        let inner = j_gamma_in_pool(pool, sys, &fv, DEFAULT_J_TOL, DEFAULT_J_NODE_CAP)?;
        if !inner.converged {
            return Err(CliError::NonConvergence(format!(
                "J(gamma) did not converge at gamma = {gamma:?} within the node cap"
            )));
        }
        acc += inner.value.re;
        let mut carry = r as usize;
        for (j, ij) in idx.iter_mut().enumerate() {
            *ij += 1;
            if *ij < m {
                carry = j;
                break;
            }
            *ij = 0;
        }
        if carry == r as usize {
            break;
        }
    }
    Ok(acc * weight)
}

/// The major-arc parameters (P, varpi, q, a) around the rational point
/// a / q, with varpi in (0, 1/3) and default 1 / (2R + 4).
#[derive(Debug, Clone)]
pub struct MajorArcParams {
    pub p: f64,
    pub varpi: f64,
    pub q: u64,
    pub a: Vec<u64>,
}

pub fn default_varpi(r: u32) -> f64 {
    1.0 / f64::from(2 * r + 4)
}

impl MajorArcParams {
    pub fn new(
        sys: &FormSystem,
        p: f64,
        q: u64,
        a: Vec<u64>,
        varpi: Option<f64>,
    ) -> Result<Self, CliError> {
        if !(p > 0.0) {
            return Err(CliError::Usage("P must be positive".into()));
        }
        validate_rational_point(sys, q, &a)?;
        let varpi = varpi.unwrap_or_else(|| default_varpi(sys.profile().total_forms()));
        if !(varpi > 0.0 && varpi < 1.0 / 3.0) {
            return Err(CliError::Usage("varpi must lie in (0, 1/3)".into()));
        }
        Ok(MajorArcParams { p, varpi, q, a })
    }
}

/// Whether alpha lies in the major arc around a / q: q <= P^varpi and
/// |alpha_j - a_j / q| <= P^(varpi - d_j) mod 1 for every form.
pub fn major_arc_membership(
    sys: &FormSystem,
    alpha: &FrequencyVector,
    params: &MajorArcParams,
) -> Result<bool, CliError> {
    if alpha.values.len() != sys.profile().total_forms() as usize {
        return Err(CliError::Usage("frequency vector does not match the system".into()));
    }
    if (params.q as f64) > params.p.powf(params.varpi) {
        return Ok(false);
    }
    for (j, (d, _)) in sys.all_forms().enumerate() {
        let center = params.a[j] as f64 / params.q as f64;
        let dist = dist_mod_1(alpha.values[j] - center);
        if dist > params.p.powf(params.varpi - f64::from(d)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distance from x to the nearest integer.
fn dist_mod_1(x: f64) -> f64 {
    (x - x.round()).abs()
}

//! Local densities: the residue count N(q), the p-adic densities
//! sigma_p with their Euler product, the real density sigma_infinity,
//! and the resulting main-term prediction
//! `sigma_infinity * prod_p sigma_p * P^(n - D)`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use formcount_core::FormSystem;

use crate::compiled::{
    compile_system, detect_solve_last, eval_mod, mulmod, powmod, thread_pool, CompiledForm,
    ModForm,
};
use crate::error::CliError;

/// Default point budget for a single residue scan.
pub const DEFAULT_RESIDUE_BUDGET: f64 = 1e9;
/// Default sample count for the Monte Carlo real-density estimate.
pub const DEFAULT_SIGMA_INF_SAMPLES: u64 = 1_000_000;
/// Default thickening schedule for the real density.
pub const DEFAULT_EPSILONS: [f64; 2] = [0.02, 0.01];
/// Fixed number of independent RNG streams; the estimate depends only on
/// the seed and this constant, never on the worker count.
const RNG_STREAMS: u64 = 64;

/// N(q) = #{x in (Z/q)^n : F_i(m0 + M x) == 0 mod q for every form}.
///
/// When the system has the solve-last shape the last coordinate is
/// handled by a precomputed root table (cost about q^(n-1)); otherwise
/// the scan visits all q^n points, evaluating by Horner in the last
/// coordinate.
pub fn count_mod(
    sys: &FormSystem,
    q: u64,
    budget: f64,
    threads: usize,
) -> Result<u128, CliError> {
    if q == 0 {
        return Err(CliError::Usage("modulus q must be positive".into()));
    }
    if q == 1 {
        return Ok(1);
    }
    let n = sys.n();
    let forms = compile_system(sys)?;
    let fast = detect_solve_last(sys);
    let cost = (q as f64).powi(if fast.is_some() { n as i32 - 1 } else { n as i32 });
    if cost > budget {
        return Err(CliError::Budget { estimate: cost, budget });
    }
    let m0q: Vec<u64> = sys.m0().iter().map(|&v| (v as i64).rem_euclid(q as i64) as u64).collect();
    let mq = sys.modulus() % q;
    if n == 1 {
        let mut acc = 0u128;
        for x in 0..q {
            let u = [(m0q[0] + mulmod(mq, x, q)) % q];
            if forms.iter().all(|f| eval_mod(f, &u, q) == 0) {
                acc += 1;
            }
        }
        return Ok(acc);
    }
    let pool = thread_pool(threads)?;
    let per_slice: Vec<u128> = pool.install(|| {
        (0..q)
            .into_par_iter()
            .map(|x0| {
                let mut u = vec![0u64; n];
                u[0] = (m0q[0] + mulmod(mq, x0, q)) % q;
                match &fast {
                    Some(shape) => {
                        let table = root_table(shape.coeff, shape.degree, m0q[n - 1], mq, q);
                        let others: Vec<&CompiledForm> = forms
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != shape.form_pos)
                            .map(|(_, f)| f)
                            .collect();
                        let mut acc = 0u128;
                        residues_fast(&forms[shape.form_pos], &others, &table, q, &m0q, mq, &mut u, 1, &mut acc);
                        acc
                    }
                    None => {
                        let mods: Vec<ModForm> =
                            forms.iter().map(|f| ModForm::reduce(f, q, n - 1)).collect();
                        let mut acc = 0u128;
                        let mut coeffs = vec![Vec::new(); mods.len()];
                        residues_full(&mods, q, &m0q, mq, &mut u, 1, &mut coeffs, &mut acc);
                        acc
                    }
                }
            })
            .collect()
    });
    Ok(per_slice.iter().sum())
}

/// `table[v]` = number of t in Z/q with c * (m0 + M t)^d == v (mod q).
fn root_table(c: i128, d: u32, m0: u64, mq: u64, q: u64) -> Vec<u64> {
    let cq = c.rem_euclid(q as i128) as u64;
    let mut table = vec![0u64; q as usize];
    for t in 0..q {
        let u = (m0 + mulmod(mq, t, q)) % q;
        let v = mulmod(cq, powmod(u, u64::from(d), q), q);
        table[v as usize] += 1;
    }
    table
}

#[allow(clippy::too_many_arguments)]
fn residues_fast(
    residual: &CompiledForm,
    others: &[&CompiledForm],
    table: &[u64],
    q: u64,
    m0q: &[u64],
    mq: u64,
    u: &mut [u64],
    depth: usize,
    acc: &mut u128,
) {
    let n = u.len();
    if depth == n - 1 {
        u[n - 1] = 0;
        if others.iter().any(|f| eval_mod(f, u, q) != 0) {
            return;
        }
        let g = eval_mod(residual, u, q);
        *acc += u128::from(table[((q - g) % q) as usize]);
        return;
    }
    for x in 0..q {
        u[depth] = (m0q[depth] + mulmod(mq, x, q)) % q;
        residues_fast(residual, others, table, q, m0q, mq, u, depth + 1, acc);
    }
}

fn residues_full(
    mods: &[ModForm],
    q: u64,
    m0q: &[u64],
    mq: u64,
    u: &mut [u64],
    depth: usize,
    coeffs: &mut [Vec<u64>],
    acc: &mut u128,
) {
    let n = u.len();
    if depth == n - 1 {
        for (mf, cs) in mods.iter().zip(coeffs.iter_mut()) {
            mf.coeffs_at(u, cs);
        }
        'pivot: for t in 0..q {
            let un = (m0q[n - 1] + mulmod(mq, t, q)) % q;
            for cs in coeffs.iter() {
                if ModForm::horner(cs, un, q) != 0 {
                    continue 'pivot;
                }
            }
            *acc += 1;
        }
        return;
    }
    for x in 0..q {
        u[depth] = (m0q[depth] + mulmod(mq, x, q)) % q;
        residues_full(mods, q, m0q, mq, u, depth + 1, coeffs, acc);
    }
}

/// The p-adic density sigma_p, approximated by the levels
/// `p^(-(n - R) k) N(p^k)` for k = 1..k_max.
#[derive(Debug, Clone)]
pub struct SigmaP {
    pub p: u64,
    pub levels: Vec<BigRational>,
    /// The last computed level.
    pub value: BigRational,
    /// The last two levels agree exactly.
    pub stabilized: bool,
    /// The last levels grow by a constant nonzero step, the signature of
    /// a system that is singular mod p (e.g. x1*x2, whose levels are
    /// k (1 - 1/p) + 1).
    pub diverging: bool,
}

pub fn sigma_p(
    sys: &FormSystem,
    p: u64,
    k_max: u32,
    budget: f64,
    threads: usize,
) -> Result<SigmaP, CliError> {
    if k_max == 0 {
        return Err(CliError::Usage("k_max must be at least 1".into()));
    }
    let n = sys.n() as u32;
    let r = sys.profile().total_forms();
    let mut levels = Vec::with_capacity(k_max as usize);
    let mut q: u64 = 1;
    for k in 1..=k_max {
        q = q.checked_mul(p).ok_or_else(|| {
            CliError::Validation(format!("p^{k} overflows a 64-bit modulus"))
        })?;
        let count = count_mod(sys, q, budget, threads)?;
        let scale = BigUint::from(p).pow((n - r) * k);
        levels.push(BigRational::new(
            BigInt::from(count),
            BigInt::from(scale),
        ));
    }
    let stabilized = levels.len() >= 2 && levels[levels.len() - 1] == levels[levels.len() - 2];
    let diverging = levels.len() >= 3 && {
        let l = &levels;
        let d1 = &l[l.len() - 1] - &l[l.len() - 2];
        let d2 = &l[l.len() - 2] - &l[l.len() - 3];
        d1 == d2 && !d1.is_zero()
    };
    Ok(SigmaP {
        p,
        value: levels.last().cloned().unwrap(),
        levels,
        stabilized,
        diverging,
    })
}

/// The truncated Euler product `prod_{p <= p_max} sigma_p`, with each
/// factor approximated at level k_max.
#[derive(Debug, Clone)]
pub struct EulerProduct {
    pub factors: Vec<SigmaP>,
    pub product: BigRational,
}

pub fn euler_product(
    sys: &FormSystem,
    p_max: u64,
    k_max: u32,
    budget: f64,
    threads: usize,
) -> Result<EulerProduct, CliError> {
    let mut factors = Vec::new();
    let mut product = BigRational::one();
    for p in primes_up_to(p_max) {
        let factor = sigma_p(sys, p, k_max, budget, threads)?;
        if factor.diverging {
            return Err(CliError::NonConvergence(format!(
                "sigma_{p} shows linearly growing levels; the Euler product diverges at p = {p}"
            )));
        }
        product *= &factor.value;
        factors.push(factor);
    }
    Ok(EulerProduct { factors, product })
}

/// Euler product with a per-prime level depth: each factor is refined to
/// the deepest level `k <= k_cap` whose residue scan stays within
/// `level_cost` points. Small primes thus reach their stabilized values
/// while large primes, whose higher levels are unaffordable, stop at the
/// first level (the omitted correction decays like a power of 1/p).
pub fn adaptive_euler_product(
    sys: &FormSystem,
    p_max: u64,
    level_cost: f64,
    k_cap: u32,
    budget: f64,
    threads: usize,
) -> Result<EulerProduct, CliError> {
    if k_cap == 0 {
        return Err(CliError::Usage("k_cap must be at least 1".into()));
    }
    let exp = if detect_solve_last(sys).is_some() { sys.n() - 1 } else { sys.n() } as i32;
    let mut factors = Vec::new();
    let mut product = BigRational::one();
    for p in primes_up_to(p_max) {
        let mut k_max = 1u32;
        while k_max < k_cap && (p as f64).powi(exp * (k_max as i32 + 1)) <= level_cost {
            k_max += 1;
        }
        let factor = sigma_p(sys, p, k_max, budget, threads)?;
        if factor.diverging {
            return Err(CliError::NonConvergence(format!(
                "sigma_{p} shows linearly growing levels; the Euler product diverges at p = {p}"
            )));
        }
        product *= &factor.value;
        factors.push(factor);
    }
    Ok(EulerProduct { factors, product })
}

pub fn primes_up_to(m: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    for c in 2..=m {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            primes.push(c);
        }
    }
    primes
}

/// Monte Carlo estimate of the real density sigma_infinity.
#[derive(Debug, Clone)]
pub struct SigmaInfinity {
    /// Linear extrapolation of the last two thickening levels to eps = 0.
    pub value: f64,
    /// Propagated binomial standard error of `value`.
    pub std_error: f64,
    pub samples: u64,
    pub epsilons: Vec<f64>,
    /// Density estimate at each eps of the schedule.
    pub per_epsilon: Vec<f64>,
}

/// sigma_infinity = M^(-n) lim_{eps -> 0} (2 eps)^(-R)
/// vol{x in B : |F_i(x)| <= eps for all i}, with the volume estimated by
/// uniform sampling of the box and the limit by linear extrapolation over
/// the last two entries of `epsilons` (which must be strictly decreasing).
pub fn sigma_infinity(
    sys: &FormSystem,
    samples: u64,
    epsilons: &[f64],
    seed: u64,
    threads: usize,
) -> Result<SigmaInfinity, CliError> {
    if epsilons.len() < 2 {
        return Err(CliError::Usage("need at least two thickening levels".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) || epsilons.iter().any(|&e| e <= 0.0) {
        return Err(CliError::Usage(
            "thickening levels must be positive and strictly decreasing".into(),
        ));
    }
    if samples == 0 {
        return Err(CliError::Usage("need at least one sample".into()));
    }
    let forms = compile_system(sys)?;
    let sides = sys.box_region().sides().to_vec();
    let box_volume = sys.box_region().volume();
    let n = sys.n() as i32;
    let r = sys.profile().total_forms() as i32;

    let pool = thread_pool(threads)?;
    let per_stream: Vec<Vec<u64>> = pool.install(|| {
        (0..RNG_STREAMS)
            .into_par_iter()
            .map(|stream| {
                let quota = samples / RNG_STREAMS + u64::from(stream < samples % RNG_STREAMS);
                let mut rng = stream_rng(seed, stream);
                let mut hits = vec![0u64; epsilons.len()];
                let mut x = vec![0.0f64; sides.len()];
                for _ in 0..quota {
                    for (xj, &(a, b)) in x.iter_mut().zip(&sides) {
                        *xj = rng.gen_range(a..b);
                    }
                    let mut worst: f64 = 0.0;
                    for f in &forms {
                        worst = worst.max(f.eval_f64(&x).abs());
                    }
                    for (h, &eps) in hits.iter_mut().zip(epsilons) {
                        if worst <= eps {
                            *h += 1;
                        }
                    }
                }
                hits
            })
            .collect()
    });
    let mut hits = vec![0u64; epsilons.len()];
    for stream in &per_stream {
        for (acc, h) in hits.iter_mut().zip(stream) {
            *acc += h;
        }
    }

    let m_scale = (sys.modulus() as f64).powi(-n);
    let mut per_epsilon = Vec::with_capacity(epsilons.len());
    let mut errors = Vec::with_capacity(epsilons.len());
    for (&h, &eps) in hits.iter().zip(epsilons) {
        let phat = h as f64 / samples as f64;
        let scale = m_scale * box_volume * (2.0 * eps).powi(-r);
        per_epsilon.push(scale * phat);
        errors.push(scale * (phat * (1.0 - phat) / samples as f64).sqrt());
    }
    // Linear extrapolation through the last two points to eps = 0.
    let k = epsilons.len();
    let (e1, e2) = (epsilons[k - 2], epsilons[k - 1]);
    let (d1, d2) = (per_epsilon[k - 2], per_epsilon[k - 1]);
    let w = e2 / (e1 - e2);
    let value = d2 + (d2 - d1) * w;
    let std_error = (((1.0 + w) * errors[k - 1]).powi(2) + (w * errors[k - 2]).powi(2)).sqrt();
    Ok(SigmaInfinity {
        value,
        std_error,
        samples,
        epsilons: epsilons.to_vec(),
        per_epsilon,
    })
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

/// The circle-method main term `sigma_infinity * prod_p sigma_p * P^(n - D)`,
/// where D is the total weight of the degree profile.
pub fn predict_main_term(sys: &FormSystem, p: f64, sigma_inf: f64, euler: &BigRational) -> f64 {
    let n = sys.n() as i64;
    let d: i64 = sys
        .profile()
        .weight()
        .to_i64()
        .expect("profile weight fits in i64");
    sigma_inf * rational_to_f64(euler) * p.powi((n - d) as i32)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let numer = r.numer().to_f64().unwrap_or_else(|| {
        if r.numer().is_negative() { f64::NEG_INFINITY } else { f64::INFINITY }
    });
    let denom = r.denom().to_f64().unwrap_or(f64::INFINITY);
    numer / denom
}

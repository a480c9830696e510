//! End-to-end acceptance checks. Each test prints a single summary line
//! (`acceptance <name>: PASS|FAIL`) and panics with details on failure.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use formcount::counting::{count_solutions, Strategy};
use formcount::densities::{
    adaptive_euler_product, predict_main_term, primes_up_to, rational_to_f64, sigma_infinity,
    sigma_p,
};
use formcount::doc::parse_system;
use formcount::expsums::singular_series;
use formcount::harness::{run_command, GlobalFlags, Verb};
use formcount::report::render_json;
use formcount_core::invariants::{
    check_birch, check_crude_bounds, check_theorem_main, estimate_bd, n0_values,
    profiles_up_to_weight,
};
use formcount_core::{
    BoxRegion, DegreeProfile, FormSystem, IntegerForm, Monomial,
};

fn finish(name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {name}: PASS");
    } else {
        println!("acceptance {name}: FAIL");
        for f in &failures {
            println!("  - {f}");
        }
        panic!("acceptance {name} failed with {} issue(s)", failures.len());
    }
}

fn quadric() -> FormSystem {
    parse_system(include_str!("../fixtures/quadric.json"))
        .unwrap()
        .to_form_system()
        .unwrap()
}

fn linear() -> FormSystem {
    parse_system(include_str!("../fixtures/linear.json"))
        .unwrap()
        .to_form_system()
        .unwrap()
}

/// n0 closed forms: r quadratics plus one degree-D form, and (D, E) pairs.
#[test]
fn closed_form_thresholds() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for r in 1u128..=6 {
        for d in 3u32..=8 {
            let profile =
                DegreeProfile::from_counts(&[(2, r as u32), (d, 1)]).unwrap();
            let got = n0_values(&profile).n0;
            let d128 = u128::from(d);
            let pow = 1u128 << (d - 1);
            let want = if r > (d128 - 1) * (1u128 << (d - 2)) {
                (2 + r) * (d128 - 1) * pow + 2 * r * (r + 1)
            } else {
                (2 + 2 * r) * (d128 - 1) * pow + 4 * r
            };
            if got != want {
                failures.push(format!("r={r} quadratics + degree {d}: n0 = {got}, want {want}"));
            }
        }
    }
    for d in 3u32..=8 {
        for e in 2..d {
            let profile = DegreeProfile::from_counts(&[(d, 1), (e, 1)]).unwrap();
            let got = n0_values(&profile).n0;
            let (d128, e128) = (u128::from(d), u128::from(e));
            let want = (2 + e128) * (d128 - 1) * (1u128 << (d - 1)) + e128 * (1u128 << (e - 1));
            if got != want {
                failures.push(format!("pair ({d}, {e}): n0 = {got}, want {want}"));
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 1.0 {
        failures.push(format!("runtime {elapsed:.2}s exceeds 1s"));
    }
    finish("closed-form-thresholds", failures);
}

/// Both crude upper bounds for n0 + R - 1 over every profile of weight <= 20.
#[test]
fn crude_bound_sweep() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let profiles = profiles_up_to_weight(20);
    if profiles.is_empty() {
        failures.push("profile enumeration is empty".into());
    }
    for profile in &profiles {
        let bounds = check_crude_bounds(profile);
        if !bounds.first_holds {
            failures.push(format!(
                "{profile:?}: {} > D^2 2^(D-1) = {}",
                bounds.lhs, bounds.bound_square
            ));
        }
        if !bounds.second_holds {
            failures.push(format!(
                "{profile:?}: {} > (D-1) 2^D = {}",
                bounds.lhs, bounds.bound_exponential
            ));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        failures.push(format!("runtime {elapsed:.2}s exceeds 10s"));
    }
    finish("crude-bound-sweep", failures);
}

/// The quadric experiment: counted N(P) against the predicted main term.
#[test]
fn quadric_main_term() {
    let sys = quadric();
    let mut failures = Vec::new();
    let si = sigma_infinity(&sys, 1_000_000, &[0.02, 0.01], 0, 0).unwrap();
    let ep = adaptive_euler_product(&sys, 100, 2.5e8, 6, 1e9, 0).unwrap();
    if rational_to_f64(&ep.product) <= 0.0 {
        failures.push("Euler product is not positive".into());
    }
    if si.value <= 0.0 {
        failures.push("real density is not positive".into());
    }
    let mut distances = Vec::new();
    for &p in &[20.0, 40.0, 60.0] {
        let report = count_solutions(&sys, p, Strategy::SolveLast, 1e10, 0).unwrap();
        let prediction = predict_main_term(&sys, p, si.value, &ep.product);
        let ratio = report.count as f64 / prediction;
        distances.push((p, ratio, (ratio - 1.0).abs()));
    }
    let (_, last_ratio, last_dist) = *distances.last().unwrap();
    if last_dist > 0.10 {
        failures.push(format!("P=60 ratio {last_ratio:.4} is off by more than 10%"));
    }
    for pair in distances.windows(2) {
        if pair[1].2 > pair[0].2 {
            failures.push(format!(
                "distance grew from {:.4} (P={}) to {:.4} (P={})",
                pair[0].2, pair[0].0, pair[1].2, pair[1].0
            ));
        }
    }
    finish("quadric-main-term", failures);
}

/// Truncated singular series against the truncated Euler product.
#[test]
fn singular_series_cross_check() {
    let sys = quadric();
    let mut failures = Vec::new();
    let series = singular_series(&sys, 50, 1e9, 0).unwrap();
    let ep = adaptive_euler_product(&sys, 50, 2.5e8, 6, 1e9, 0).unwrap();
    let product = rational_to_f64(&ep.product);
    let ratio = series.value / product;
    if (ratio - 1.0).abs() > 0.02 {
        failures.push(format!(
            "series {series_value:.6} vs product {product:.6}: ratio {ratio:.4}",
            series_value = series.value
        ));
    }
    if series.imag.abs() > 1e-9 {
        failures.push(format!("residual imaginary part {} too large", series.imag));
    }
    finish("singular-series-cross-check", failures);
}

/// Exact local densities for the difference of two variables.
#[test]
fn linear_exact_densities() {
    let sys = linear();
    let mut failures = Vec::new();
    for p in primes_up_to(20) {
        let factor = sigma_p(&sys, p, 3, 1e9, 0).unwrap();
        for (k, level) in factor.levels.iter().enumerate() {
            if level != &BigRational::one() {
                failures.push(format!("sigma_{p} level {} is {level}, want 1", k + 1));
            }
        }
    }
    let si = sigma_infinity(&sys, 1_000_000, &[0.02, 0.01], 0, 0).unwrap();
    if (si.value - 2.0).abs() > 0.05 {
        failures.push(format!("real density {:.4} not within 2 +- 0.05", si.value));
    }
    let report = count_solutions(&sys, 10.0, Strategy::Full, 1e10, 0).unwrap();
    if report.count != 21 {
        failures.push(format!("N(10) = {}, want 21", report.count));
    }
    let prediction = predict_main_term(&sys, 10.0, si.value, &BigRational::one());
    let ratio = report.count as f64 / prediction;
    if (ratio - 1.0).abs() > 0.1 {
        failures.push(format!(
            "count {} vs prediction {prediction:.2}: ratio {ratio:.4}",
            report.count
        ));
    }
    finish("linear-exact-densities", failures);
}

fn bi(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Number of monomials of the given degree in `n` variables.
fn monomial_space(n: usize, degree: u32) -> usize {
    // binom(degree + n - 1, n - 1)
    let (mut num, mut den) = (1usize, 1usize);
    for k in 1..n {
        num *= degree as usize + k;
        den *= k;
    }
    num / den
}

fn random_form(rng: &mut StdRng, n: usize, degree: u32) -> IntegerForm {
    let want = rng.gen_range(1..=4usize).min(monomial_space(n, degree));
    let mut seen = BTreeSet::new();
    let mut monomials = Vec::new();
    while monomials.len() < want {
        let mut exps = vec![0u32; n];
        for _ in 0..degree {
            exps[rng.gen_range(0..n)] += 1;
        }
        if !seen.insert(exps.clone()) {
            continue;
        }
        let mut c = 0i64;
        while c == 0 {
            c = rng.gen_range(-9..=9);
        }
        monomials.push(Monomial { coefficient: bi(c), exponents: exps });
    }
    IntegerForm::new(n, degree, monomials).unwrap()
}

fn random_point(rng: &mut StdRng, n: usize) -> Vec<BigInt> {
    (0..n).map(|_| bi(rng.gen_range(-5..=5))).collect()
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, f| acc * BigInt::from(f))
}

/// Exact multilinear-algebra identities over 200 random forms.
#[test]
fn polar_identity_suite() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut failures = Vec::new();
    for case in 0..200 {
        let n = rng.gen_range(1..=5usize);
        let d = rng.gen_range(1..=4u32);
        let f = random_form(&mut rng, n, d);
        let p = f.polar_form();
        let x = random_point(&mut rng, n);

        // Diagonal normalization: Polar(x,...,x) = d! F(x).
        let diag = p.eval(&vec![x.clone(); d as usize]).unwrap();
        if diag != factorial(d) * f.eval(&x).unwrap() {
            failures.push(format!("case {case}: diagonal normalization"));
        }
        // Slot symmetry.
        if !p.is_symmetric() {
            failures.push(format!("case {case}: symmetry"));
        }
        // Multilinearity in a random slot.
        let slot = rng.gen_range(0..d as usize);
        let mut slots: Vec<Vec<BigInt>> =
            (0..d as usize).map(|_| random_point(&mut rng, n)).collect();
        let (u, v) = (random_point(&mut rng, n), random_point(&mut rng, n));
        let (a, b) = (bi(rng.gen_range(-3..=3)), bi(rng.gen_range(-3..=3)));
        slots[slot] = u.iter().zip(&v).map(|(ui, vi)| &a * ui + &b * vi).collect();
        let lhs = p.eval(&slots).unwrap();
        slots[slot] = u;
        let at_u = p.eval(&slots).unwrap();
        slots[slot] = v;
        let at_v = p.eval(&slots).unwrap();
        if lhs != &a * at_u + &b * at_v {
            failures.push(format!("case {case}: multilinearity"));
        }
        // Row-vector identity: Polar(x_1,...,x_d) = F_(x_1,...,x_{d-1}) . x_d.
        let heads: Vec<Vec<BigInt>> =
            (0..d as usize - 1).map(|_| random_point(&mut rng, n)).collect();
        let last = random_point(&mut rng, n);
        let rv = f.polar_row_vector(&heads).unwrap();
        let dot: BigInt = rv.iter().zip(&last).map(|(ri, li)| ri * li).sum();
        let mut full = heads;
        full.push(last);
        if dot != p.eval(&full).unwrap() {
            failures.push(format!("case {case}: row-vector identity"));
        }
        // Hat Jacobian on the diagonal: J^(x,...,x) = (d-1)! J(x).
        let sys = FormSystem::new(
            n,
            1,
            vec![0; n],
            BoxRegion::full_cube(n),
            vec![f.clone()],
        )
        .unwrap();
        let hat = sys.hat_jacobian(d, &vec![x.clone(); d as usize - 1]).unwrap();
        let jac = sys.jacobian_matrix(d, &x).unwrap();
        let scale = factorial(d - 1);
        let matches = hat[0]
            .iter()
            .zip(&jac[0])
            .all(|(h, j)| h == &(&scale * j));
        if !matches {
            failures.push(format!("case {case}: hat Jacobian diagonal"));
        }
    }
    finish("polar-identity-suite", failures);
}

/// Single-form thresholds agree with the classical criterion.
#[test]
fn single_form_threshold_consistency() {
    let mut failures = Vec::new();
    for d in 2u32..=6 {
        let profile = DegreeProfile::single_degree(d, 1).unwrap();
        let b: BTreeMap<u32, u32> = [(d, 0)].into();
        for n in 1u32..=200 {
            let main = check_theorem_main(&profile, n, &b).unwrap();
            let birch = check_birch(n, 0, 1, d);
            if main.passes != birch.passes {
                failures.push(format!(
                    "degree {d}, n = {n}: main verdict {} vs classical {}",
                    main.passes, birch.passes
                ));
            }
        }
    }
    finish("single-form-threshold-consistency", failures);
}

/// Finite-field singular-locus dimension fixtures.
#[test]
fn singular_locus_fixtures() {
    let mut failures = Vec::new();
    let primes = [5u64, 7, 11];
    let budget = 100_000_000u128;

    // Diagonal forms are nonsingular away from the origin: B_d = 0.
    let diag = formcount_core::diagonal_form(3, 3, &[1, 1, 1]).unwrap();
    let sys = FormSystem::new(3, 1, vec![0; 3], BoxRegion::full_cube(3), vec![diag]).unwrap();
    let est = estimate_bd(&sys, 3, &primes, budget, None).unwrap();
    if est.estimate != 0 || est.excluded {
        failures.push(format!("diagonal cubic: estimate {} (want 0)", est.estimate));
    }
    if !est.confident {
        failures.push("diagonal cubic: primes disagree".into());
    }

    // x1^2 in three variables is singular along the plane x1 = 0: B_2 = 2.
    let f = IntegerForm::new(
        3,
        2,
        vec![Monomial { coefficient: bi(1), exponents: vec![2, 0, 0] }],
    )
    .unwrap();
    let sys = FormSystem::new(3, 1, vec![0; 3], BoxRegion::full_cube(3), vec![f]).unwrap();
    let est = estimate_bd(&sys, 2, &primes, budget, None).unwrap();
    if est.estimate != 2 || est.excluded {
        failures.push(format!("x1^2 in n=3: estimate {} (want 2)", est.estimate));
    }
    if !est.confident {
        failures.push("x1^2 in n=3: primes disagree".into());
    }

    // A linearly dependent pair is rank-deficient everywhere: excluded.
    let f1 = formcount_core::diagonal_form(3, 2, &[1, 1, 0]).unwrap();
    let f2 = formcount_core::diagonal_form(3, 2, &[2, 2, 0]).unwrap();
    let sys =
        FormSystem::new(3, 1, vec![0; 3], BoxRegion::full_cube(3), vec![f1, f2]).unwrap();
    let est = estimate_bd(&sys, 2, &primes, budget, None).unwrap();
    if !est.excluded {
        failures.push(format!(
            "dependent pair: estimate {} not flagged as excluded",
            est.estimate
        ));
    }

    // Stability: each prime alone reproduces the pooled estimate.
    for fixture in [
        (formcount_core::diagonal_form(3, 3, &[1, 1, 1]).unwrap(), 3u32, 0u32),
        (
            IntegerForm::new(
                3,
                2,
                vec![Monomial { coefficient: bi(1), exponents: vec![2, 0, 0] }],
            )
            .unwrap(),
            2,
            2,
        ),
    ] {
        let (form, d, want) = fixture;
        let sys =
            FormSystem::new(3, 1, vec![0; 3], BoxRegion::full_cube(3), vec![form]).unwrap();
        for p in primes {
            let est = estimate_bd(&sys, d, &[p], budget, None).unwrap();
            if est.estimate != want {
                failures.push(format!(
                    "degree {d} fixture at p = {p}: estimate {} (want {want})",
                    est.estimate
                ));
            }
        }
    }
    finish("singular-locus-fixtures", failures);
}

/// Identical results across worker counts and byte-identical reports.
#[test]
fn determinism() {
    let mut failures = Vec::new();
    let sysq = quadric();
    let sysl = linear();
    let workers = [1usize, 2, 8];

    let counts: Vec<u64> = workers
        .iter()
        .map(|&t| count_solutions(&sysq, 20.0, Strategy::SolveLast, 1e10, t).unwrap().count)
        .collect();
    if counts.windows(2).any(|w| w[0] != w[1]) {
        failures.push(format!("counts differ across workers: {counts:?}"));
    }

    let levels: Vec<Vec<BigRational>> = workers
        .iter()
        .map(|&t| sigma_p(&sysq, 7, 2, 1e9, t).unwrap().levels)
        .collect();
    if levels.windows(2).any(|w| w[0] != w[1]) {
        failures.push("p-adic density levels differ across workers".into());
    }

    let bits: Vec<(u64, u64)> = workers
        .iter()
        .map(|&t| {
            let si = sigma_infinity(&sysl, 200_000, &[0.02, 0.01], 42, t).unwrap();
            (si.value.to_bits(), si.std_error.to_bits())
        })
        .collect();
    if bits.windows(2).any(|w| w[0] != w[1]) {
        failures.push("Monte-Carlo density bits differ across workers".into());
    }

    let doc = parse_system(include_str!("../fixtures/linear.json")).unwrap();
    let verb = Verb::Predict { p: 10.0, p_max: 20, k_max: 2, samples: 100_000 };
    let render = |threads: usize| {
        let flags = GlobalFlags { threads, seed: Some(1), budget: None, json: true };
        render_json(&run_command(&verb, &doc, &flags).unwrap())
    };
    let reports: Vec<String> = workers.iter().map(|&t| render(t)).collect();
    if reports.windows(2).any(|w| w[0] != w[1]) {
        failures.push("JSON reports differ across workers".into());
    }
    if render(8) != reports[2] {
        failures.push("JSON report differs between repeated runs".into());
    }
    finish("determinism", failures);
}

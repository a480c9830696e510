//! Experiment orchestration: maps CLI verbs onto the library operations
//! and assembles machine-readable reports.

use serde_json::{json, Value};

use formcount_core::invariants::{estimate_bd, invariant_report};
use formcount_core::FormSystem;

use crate::compiled::detect_solve_last;
use crate::counting::{count_solutions, empirical_ratio, CountReport, Strategy, DEFAULT_COUNT_BUDGET};
use crate::densities::{
    euler_product, predict_main_term, rational_to_f64, sigma_infinity, EulerProduct,
    SigmaInfinity, DEFAULT_EPSILONS, DEFAULT_RESIDUE_BUDGET,
};
use crate::doc::SystemDocument;
use crate::error::CliError;
use crate::expsums::{
    complete_sum, major_arc_membership, s_alpha, singular_integral, singular_series,
    FrequencyVector, MajorArcParams, DEFAULT_EXPSUM_BUDGET, DEFAULT_OUTER_TOL,
};
use crate::report::{exact_int, exact_rational, float, float_with_error, Report};

/// Default primes for singular-locus sampling.
pub const LOCUS_PRIMES: [u64; 3] = [5, 7, 11];
/// Default point budget for singular-locus sampling.
pub const DEFAULT_LOCUS_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Default)]
pub struct GlobalFlags {
    /// Worker threads; 0 = library default.
    pub threads: usize,
    /// Overrides the document seed.
    pub seed: Option<u64>,
    /// Overrides every document budget.
    pub budget: Option<f64>,
    /// Emit JSON instead of CSV.
    pub json: bool,
}

#[derive(Debug, Clone)]
pub enum ExpsumMode {
    SAlpha { alpha: Vec<f64>, p: f64 },
    Complete { q: u64, a: Vec<u64> },
    Series { h: u64 },
    Integral { h: f64 },
    Arc { alpha: Vec<f64>, q: u64, a: Vec<u64>, p: f64, varpi: Option<f64> },
}

#[derive(Debug, Clone)]
pub enum Verb {
    Check,
    Count { p: f64, strategy: Option<Strategy> },
    Densities { p_max: u64, k_max: u32, samples: u64 },
    Predict { p: f64, p_max: u64, k_max: u32, samples: u64 },
    Compare { schedule: Vec<f64>, p_max: u64, k_max: u32, samples: u64, strategy: Option<Strategy> },
    Expsum(ExpsumMode),
    Polar { degree: Option<u32> },
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Check => "check",
            Verb::Count { .. } => "count",
            Verb::Densities { .. } => "densities",
            Verb::Predict { .. } => "predict",
            Verb::Compare { .. } => "compare",
            Verb::Expsum(_) => "expsum",
            Verb::Polar { .. } => "polar",
        }
    }
}

struct Context<'a> {
    doc: &'a SystemDocument,
    sys: FormSystem,
    flags: &'a GlobalFlags,
}

impl Context<'_> {
    fn seed(&self) -> u64 {
        self.flags.seed.or(self.doc.seed).unwrap_or(0)
    }

    fn budget(&self, from_doc: Option<f64>, fallback: f64) -> f64 {
        self.flags.budget.or(from_doc).unwrap_or(fallback)
    }

    fn count_budget(&self) -> f64 {
        self.budget(self.doc.budgets.as_ref().and_then(|b| b.count), DEFAULT_COUNT_BUDGET)
    }

    fn residue_budget(&self) -> f64 {
        self.budget(
            self.doc.budgets.as_ref().and_then(|b| b.residues),
            DEFAULT_RESIDUE_BUDGET,
        )
    }

    fn expsum_budget(&self) -> f64 {
        self.budget(self.doc.budgets.as_ref().and_then(|b| b.expsum), DEFAULT_EXPSUM_BUDGET)
    }

    fn locus_budget(&self) -> u128 {
        self.budget(
            self.doc.budgets.as_ref().and_then(|b| b.locus),
            DEFAULT_LOCUS_BUDGET as f64,
        ) as u128
    }

    fn strategy(&self, requested: Option<Strategy>) -> Strategy {
        requested.unwrap_or_else(|| {
            if detect_solve_last(&self.sys).is_some() {
                Strategy::SolveLast
            } else {
                Strategy::Full
            }
        })
    }
}

/// Run one verb against a validated document. Timings land in
/// `Report::timings` (stderr-only); everything serialized is reproducible
/// for a fixed document, flags and seed.
pub fn run_command(
    verb: &Verb,
    doc: &SystemDocument,
    flags: &GlobalFlags,
) -> Result<Report, CliError> {
    let sys = doc.to_form_system()?;
    let ctx = Context { doc, sys, flags };
    let inputs = json!({
        "document": serde_json::to_value(doc).expect("document is serializable"),
        "seed": ctx.seed(),
        "budget": flags.budget,
    });
    let mut report = Report::new(verb.name(), inputs);
    match verb {
        Verb::Check => run_check(&ctx, &mut report)?,
        Verb::Count { p, strategy } => {
            let r = run_count(&ctx, *p, *strategy)?;
            report.timings.push(("count".into(), r.wall_time));
            report.results = count_value(&r);
        }
        Verb::Densities { p_max, k_max, samples } => {
            let (euler, s_inf) = run_densities(&ctx, *p_max, *k_max, *samples)?;
            report.results = json!({
                "euler_product": euler_value(&euler),
                "sigma_infinity": sigma_inf_value(&s_inf),
            });
        }
        Verb::Predict { p, p_max, k_max, samples } => {
            let (euler, s_inf) = run_densities(&ctx, *p_max, *k_max, *samples)?;
            let prediction = predict_main_term(&ctx.sys, *p, s_inf.value, &euler.product);
            report.results = json!({
                "P": float(*p),
                "euler_product": euler_value(&euler),
                "sigma_infinity": sigma_inf_value(&s_inf),
                "prediction": float(prediction),
            });
        }
        Verb::Compare { schedule, p_max, k_max, samples, strategy } => {
            run_compare(&ctx, schedule, *p_max, *k_max, *samples, *strategy, &mut report)?;
        }
        Verb::Expsum(mode) => run_expsum(&ctx, mode, &mut report)?,
        Verb::Polar { degree } => run_polar(&ctx, *degree, &mut report)?,
    }
    Ok(report)
}

fn run_check(ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let profile = ctx.sys.profile();
    let overrides = ctx.doc.overrides.as_ref().map(|o| &o.b);
    let mut b = std::collections::BTreeMap::new();
    let mut estimates = Vec::new();
    for d in profile.degrees() {
        let override_value = overrides.and_then(|m| m.get(&d)).copied();
        let est = estimate_bd(&ctx.sys, d, &LOCUS_PRIMES, ctx.locus_budget(), override_value)?;
        if est.excluded {
            return Err(CliError::Validation(format!(
                "degree {d}: the forms are everywhere rank-deficient; the system is excluded"
            )));
        }
        if !est.confident {
            report.warnings.push(format!(
                "B_{d} estimate varies across the tested primes; consider an override"
            ));
        }
        b.insert(d, est.estimate);
        estimates.push(json!({
            "degree": d,
            "estimate": est.estimate,
            "override_used": est.override_used,
            "confident": est.confident,
            "empty_over_tested_primes": est.empty_over_tested_primes,
            "per_prime": est
                .per_prime
                .iter()
                .map(|&(p, c)| json!({"p": p, "points": exact_int(c)}))
                .collect::<Vec<_>>(),
        }));
    }
    let inv = invariant_report(&profile, ctx.sys.n() as u32, &b)?;
    let margins: serde_json::Map<String, Value> = inv
        .theorem_main
        .margins
        .iter()
        .map(|(&d, m)| (d.to_string(), exact_rational(m)))
        .collect();
    report.results = json!({
        "n": inv.n,
        "profile": profile_value(&profile),
        "B": inv.b,
        "singular_locus": estimates,
        "Dj": inv.dj,
        "s": inv.s.iter().map(exact_rational).collect::<Vec<_>>(),
        "t": inv.t.iter().map(|&t| exact_int(t)).collect::<Vec<_>>(),
        "n0_of_d": inv
            .n0_of_d
            .iter()
            .map(|(&d, &v)| (d.to_string(), exact_int(v)))
            .collect::<serde_json::Map<_, _>>(),
        "n0": exact_int(inv.n0),
        "theorem_main": { "margins": margins, "passes": inv.theorem_main.passes },
        "birch": inv.birch.as_ref().map(|b| json!({
            "threshold": exact_int(b.threshold),
            "passes": b.passes,
        })),
        "crude_bounds": {
            "lhs": exact_int(inv.crude.lhs),
            "bound_square": exact_int(inv.crude.bound_square.clone()),
            "bound_exponential": exact_int(inv.crude.bound_exponential.clone()),
            "first_holds": inv.crude.first_holds,
            "second_holds": inv.crude.second_holds,
        },
        "lemma_improve": {
            "per_degree": inv
                .lemma_improve
                .per_degree
                .iter()
                .map(|(&d, &(bound, ok))| (d.to_string(), json!({"bound": bound, "holds": ok})))
                .collect::<serde_json::Map<_, _>>(),
            "all_hold": inv.lemma_improve.all_hold,
        },
        "variety_degree": exact_int(inv.variety_degree.clone()),
        "verdict": if inv.theorem_main.passes { "pass" } else { "fail" },
    });
    Ok(())
}

fn run_count(ctx: &Context, p: f64, strategy: Option<Strategy>) -> Result<CountReport, CliError> {
    count_solutions(
        &ctx.sys,
        p,
        ctx.strategy(strategy),
        ctx.count_budget(),
        ctx.flags.threads,
    )
}

fn run_densities(
    ctx: &Context,
    p_max: u64,
    k_max: u32,
    samples: u64,
) -> Result<(EulerProduct, SigmaInfinity), CliError> {
    let euler = euler_product(&ctx.sys, p_max, k_max, ctx.residue_budget(), ctx.flags.threads)?;
    let s_inf = sigma_infinity(
        &ctx.sys,
        samples,
        &DEFAULT_EPSILONS,
        ctx.seed(),
        ctx.flags.threads,
    )?;
    Ok((euler, s_inf))
}

#[allow(clippy::too_many_arguments)]
fn run_compare(
    ctx: &Context,
    schedule: &[f64],
    p_max: u64,
    k_max: u32,
    samples: u64,
    strategy: Option<Strategy>,
    report: &mut Report,
) -> Result<(), CliError> {
    if schedule.is_empty() {
        return Err(CliError::Usage("compare needs a non-empty P schedule".into()));
    }
    let (euler, s_inf) = run_densities(ctx, p_max, k_max, samples)?;
    let mut rows = Vec::new();
    for &p in schedule {
        let counted = run_count(ctx, p, strategy)?;
        report.timings.push((format!("count P={p}"), counted.wall_time));
        let prediction = predict_main_term(&ctx.sys, p, s_inf.value, &euler.product);
        let ratio = empirical_ratio(&counted, prediction)?;
        rows.push(json!({
            "P": float(p),
            "count": exact_int(counted.count),
            "prediction": float(prediction),
            "ratio": float(ratio),
        }));
    }
    report.results = json!({
        "euler_product": euler_value(&euler),
        "sigma_infinity": sigma_inf_value(&s_inf),
        "table": rows,
    });
    Ok(())
}

fn run_expsum(ctx: &Context, mode: &ExpsumMode, report: &mut Report) -> Result<(), CliError> {
    let budget = ctx.expsum_budget();
    report.results = match mode {
        ExpsumMode::SAlpha { alpha, p } => {
            let fv = FrequencyVector::new(&ctx.sys, alpha.clone())?;
            let s = s_alpha(&ctx.sys, &fv, *p, budget, ctx.flags.threads)?;
            json!({
                "S_alpha": { "re": float(s.re), "im": float(s.im) },
                "P": float(*p),
            })
        }
        ExpsumMode::Complete { q, a } => {
            let s = complete_sum(&ctx.sys, *q, a, budget, ctx.flags.threads)?;
            json!({
                "S_aq": { "re": float(s.re), "im": float(s.im) },
                "q": *q,
                "a": a,
            })
        }
        ExpsumMode::Series { h } => {
            let s = singular_series(&ctx.sys, *h, budget, ctx.flags.threads)?;
            json!({
                "H": *h,
                "singular_series": float_with_error(s.value, s.imag.abs()),
                "per_q": s.per_q.iter().map(|&t| float(t)).collect::<Vec<_>>(),
            })
        }
        ExpsumMode::Integral { h } => {
            let si = singular_integral(&ctx.sys, *h, DEFAULT_OUTER_TOL, ctx.flags.threads)?;
            json!({
                "H": float(*h),
                "singular_integral": float_with_error(si.value, si.last_increment),
                "converged": si.converged,
            })
        }
        ExpsumMode::Arc { alpha, q, a, p, varpi } => {
            let fv = FrequencyVector::new(&ctx.sys, alpha.clone())?;
            let params = MajorArcParams::new(&ctx.sys, *p, *q, a.clone(), *varpi)?;
            let member = major_arc_membership(&ctx.sys, &fv, &params)?;
            json!({
                "P": float(*p),
                "varpi": float(params.varpi),
                "q": *q,
                "a": a,
                "member": member,
            })
        }
    };
    Ok(())
}

fn run_polar(ctx: &Context, degree: Option<u32>, report: &mut Report) -> Result<(), CliError> {
    let profile = ctx.sys.profile();
    let degrees: Vec<u32> = match degree {
        Some(d) => vec![d],
        None => profile.degrees().collect(),
    };
    let mut listing = Vec::new();
    for d in degrees {
        let polars = ctx.sys.polar_forms(d).map_err(CliError::from)?;
        for (i, polar) in polars.iter().enumerate() {
            let terms: Vec<Value> = polar
                .terms()
                .map(|(vars, c)| {
                    json!({
                        "slots": vars,
                        "coeff": exact_int(c.clone()),
                    })
                })
                .collect();
            listing.push(json!({
                "degree": d,
                "index": i,
                "arity": polar.arity(),
                "symmetric": polar.is_symmetric(),
                "terms": terms,
            }));
        }
    }
    report.results = json!({ "polar_forms": listing });
    Ok(())
}

fn count_value(r: &CountReport) -> Value {
    json!({
        "P": float(r.p),
        "count": exact_int(r.count),
        "points_scanned": exact_int(r.points_scanned),
        "strategy": r.strategy,
    })
}

fn euler_value(euler: &EulerProduct) -> Value {
    json!({
        "product": exact_rational(&euler.product),
        "product_float": float(rational_to_f64(&euler.product)),
        "factors": euler
            .factors
            .iter()
            .map(|f| json!({
                "p": f.p,
                "value": exact_rational(&f.value),
                "levels": f.levels.iter().map(exact_rational).collect::<Vec<_>>(),
                "stabilized": f.stabilized,
            }))
            .collect::<Vec<_>>(),
    })
}

fn sigma_inf_value(s: &SigmaInfinity) -> Value {
    json!({
        "value": float_with_error(s.value, s.std_error),
        "samples": s.samples,
        "epsilons": s.epsilons,
        "per_epsilon": s.per_epsilon.iter().map(|&v| float(v)).collect::<Vec<_>>(),
    })
}

fn profile_value(profile: &formcount_core::DegreeProfile) -> Value {
    json!({
        "degrees": profile
            .degrees()
            .map(|d| json!({"degree": d, "count": profile.r(d)}))
            .collect::<Vec<_>>(),
        "R": profile.total_forms(),
        "weight": profile.weight(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::parse_system;
    use crate::report::render_json;

    fn linear_doc() -> SystemDocument {
        parse_system(
            r#"{
                "schema_version": "1",
                "n": 2,
                "M": 1,
                "m0": [0, 0],
                "box": [[-1.0, 1.0], [-1.0, 1.0]],
                "forms": [
                    {"degree": 1, "monomials": [
                        {"coeff": 1, "exps": [1, 0]},
                        {"coeff": -1, "exps": [0, 1]}
                    ]}
                ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn count_verb_reports_exact_count() {
        let doc = linear_doc();
        let flags = GlobalFlags { json: true, ..Default::default() };
        let report =
            run_command(&Verb::Count { p: 10.0, strategy: None }, &doc, &flags).unwrap();
        let rendered = render_json(&report);
        assert!(rendered.contains("\"num\": \"21\""), "{rendered}");
    }

    #[test]
    fn check_verb_on_linear_form() {
        let doc = linear_doc();
        let report = run_command(&Verb::Check, &doc, &GlobalFlags::default()).unwrap();
        assert_eq!(report.results["verdict"], "pass");
        assert_eq!(report.results["n0"]["num"], "0");
    }

    #[test]
    fn json_reports_reproducible_across_workers() {
        let doc = linear_doc();
        let verb = Verb::Predict { p: 10.0, p_max: 5, k_max: 2, samples: 20_000 };
        let mut outputs = Vec::new();
        for threads in [1usize, 2, 8] {
            let flags = GlobalFlags { threads, seed: Some(5), json: true, ..Default::default() };
            outputs.push(render_json(&run_command(&verb, &doc, &flags).unwrap()));
        }
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[0], outputs[2]);
    }

    #[test]
    fn polar_verb_lists_terms() {
        let doc = linear_doc();
        let report =
            run_command(&Verb::Polar { degree: None }, &doc, &GlobalFlags::default()).unwrap();
        let listing = report.results["polar_forms"].as_array().unwrap();
        assert_eq!(listing.len(), 1);
        assert_eq!(listing[0]["arity"], 1);
    }

    #[test]
    fn expsum_series_verb() {
        let doc = linear_doc();
        let report = run_command(
            &Verb::Expsum(ExpsumMode::Series { h: 5 }),
            &doc,
            &GlobalFlags::default(),
        )
        .unwrap();
        let v = report.results["singular_series"]["value"].as_f64().unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }
}

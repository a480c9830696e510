//! Brute-force computation of N(P): the number of lattice points
//! `x = m0 + M y` in the dilated box `P * B` at which every form of the
//! system vanishes.
//!
//! Enumeration is partitioned on the first coordinate; partitions are
//! independent and aggregated by integer addition, so counts are
//! identical for any worker count.

use std::time::Instant;

use formcount_core::FormSystem;
use rayon::prelude::*;
use serde::Serialize;

use crate::compiled::{
    compile_system, detect_solve_last, pure_power_roots, range_size, thread_pool, y_ranges,
    CompiledForm,
};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Scan the full integer box.
    Full,
    /// Scan all but the last coordinate and solve the residual
    /// one-variable equation by exact root extraction.
    SolveLast,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub p: f64,
    pub count: u64,
    /// Size of the lattice search space (all n coordinates).
    pub points_scanned: u64,
    pub strategy: Strategy,
    pub wall_time: f64,
}

/// Default point budget for a counting scan.
pub const DEFAULT_COUNT_BUDGET: f64 = 1e10;

pub fn count_solutions(
    sys: &FormSystem,
    p: f64,
    strategy: Strategy,
    budget: f64,
    threads: usize,
) -> Result<CountReport, CliError> {
    let started = Instant::now();
    let ranges = y_ranges(sys, p)?;
    let total_points = range_size(&ranges);
    let scan_points = match strategy {
        Strategy::Full => total_points,
        Strategy::SolveLast => range_size(&ranges[..ranges.len() - 1]),
    };
    if scan_points > budget {
        return Err(CliError::Budget { estimate: scan_points, budget });
    }
    let forms = compile_system(sys)?;
    let count = match strategy {
        Strategy::Full => count_full(sys, &forms, &ranges, threads)?,
        Strategy::SolveLast => count_solve_last(sys, &forms, &ranges, threads)?,
    };
    Ok(CountReport {
        p,
        count,
        points_scanned: total_points as u64,
        strategy,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// `count / prediction`.
pub fn empirical_ratio(report: &CountReport, prediction: f64) -> Result<f64, CliError> {
    if !(prediction > 0.0) {
        return Err(CliError::Usage("prediction must be positive".into()));
    }
    Ok(report.count as f64 / prediction)
}

fn count_full(
    sys: &FormSystem,
    forms: &[CompiledForm],
    ranges: &[(i64, i64)],
    threads: usize,
) -> Result<u64, CliError> {
    let n = sys.n();
    if ranges.iter().any(|&(lo, hi)| hi < lo) {
        return Ok(0);
    }
    let m = sys.modulus() as i128;
    let m0 = sys.m0();
    let pool = thread_pool(threads)?;
    let (lo0, hi0) = ranges[0];
    let per_slice: Result<Vec<u64>, CliError> = pool.install(|| {
        (lo0..=hi0)
            .into_par_iter()
            .map(|y0| {
                let mut x = vec![0i128; n];
                x[0] = m0[0] as i128 + m * y0 as i128;
                let mut count = 0u64;
                scan_tail(forms, ranges, m, m0, &mut x, 1, &mut count)?;
                Ok(count)
            })
            .collect()
    });
    Ok(per_slice?.iter().sum())
}

/// Odometer over coordinates `depth..n`, counting zeros of all forms.
fn scan_tail(
    forms: &[CompiledForm],
    ranges: &[(i64, i64)],
    m: i128,
    m0: &[i64],
    x: &mut [i128],
    depth: usize,
    count: &mut u64,
) -> Result<(), CliError> {
    if depth == ranges.len() {
        let zero = forms
            .iter()
            .map(|f| f.eval_i128(x).map(|v| v == 0))
            .try_fold(true, |acc, v| v.map(|v| acc && v))
            .ok_or_else(overflow)?;
        if zero {
            *count += 1;
        }
        return Ok(());
    }
    let (lo, hi) = ranges[depth];
    for y in lo..=hi {
        x[depth] = m0[depth] as i128 + m * y as i128;
        scan_tail(forms, ranges, m, m0, x, depth + 1, count)?;
    }
    Ok(())
}

fn count_solve_last(
    sys: &FormSystem,
    forms: &[CompiledForm],
    ranges: &[(i64, i64)],
    threads: usize,
) -> Result<u64, CliError> {
    let n = sys.n();
    let shape = detect_solve_last(sys).ok_or_else(|| {
        CliError::Validation(
            "solve-last strategy requires the last variable to appear in exactly one form, \
             purely as c*x_n^d"
                .into(),
        )
    })?;
    if ranges[..n - 1].iter().any(|&(lo, hi)| hi < lo) {
        return Ok(0);
    }
    let (last_lo, last_hi) = ranges[n - 1];
    let m = sys.modulus() as i128;
    let m0 = sys.m0();
    let m0_last = m0[n - 1] as i128;
    let residual = &forms[shape.form_pos];
    let others: Vec<&CompiledForm> = forms
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != shape.form_pos)
        .map(|(_, f)| f)
        .collect();
    let pool = thread_pool(threads)?;
    let (lo0, hi0) = ranges[0];
    let per_slice: Result<Vec<u64>, CliError> = pool.install(|| {
        (lo0..=hi0)
            .into_par_iter()
            .map(|y0| {
                let mut x = vec![0i128; n];
                x[0] = m0[0] as i128 + m * y0 as i128;
                let mut count = 0u64;
                solve_last_tail(
                    &shape.coeff,
                    shape.degree,
                    residual,
                    &others,
                    ranges,
                    m,
                    m0,
                    m0_last,
                    (last_lo, last_hi),
                    &mut x,
                    1,
                    &mut count,
                )?;
                Ok(count)
            })
            .collect()
    });
    Ok(per_slice?.iter().sum())
}

#[allow(clippy::too_many_arguments)]
fn solve_last_tail(
    coeff: &i128,
    degree: u32,
    residual: &CompiledForm,
    others: &[&CompiledForm],
    ranges: &[(i64, i64)],
    m: i128,
    m0: &[i64],
    m0_last: i128,
    last_range: (i64, i64),
    x: &mut [i128],
    depth: usize,
    count: &mut u64,
) -> Result<(), CliError> {
    let n = ranges.len();
    if depth == n - 1 {
        x[n - 1] = 0;
        for f in others {
            if f.eval_i128(x).ok_or_else(overflow)? != 0 {
                return Ok(());
            }
        }
        let g = residual.eval_i128(x).ok_or_else(overflow)?;
        for root in pure_power_roots(*coeff, degree, -g) {
            // x_n = root must sit in the congruence class and the box.
            let diff = root - m0_last;
            if diff.rem_euclid(m) != 0 {
                continue;
            }
            let y = diff / m;
            if y >= last_range.0 as i128 && y <= last_range.1 as i128 {
                *count += 1;
            }
        }
        return Ok(());
    }
    let (lo, hi) = ranges[depth];
    for y in lo..=hi {
        x[depth] = m0[depth] as i128 + m * y as i128;
        solve_last_tail(
            coeff, degree, residual, others, ranges, m, m0, m0_last, last_range, x,
            depth + 1, count,
        )?;
    }
    Ok(())
}

fn overflow() -> CliError {
    CliError::Validation("arithmetic overflow during scan; values exceed 128-bit range".into())
}

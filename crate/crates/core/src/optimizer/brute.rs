//! Exhaustive grid search over any subset of the decision variables.

use rayon::prelude::*;

use super::reduced::ReducedProblem;
use super::{Arbiter, Grid, OptimizerOptions, ReducedPoint, Variable};
use crate::error::{Error, Result};
use crate::params::{PowerModel, SystemParams};

/// Objectives closer than this (relative) count as tied.
const TIE_TOL: f64 = 1e-12;

/// Index of the largest finite value; ties go to the earliest index.
pub fn argmax_lexicographic<I: IntoIterator<Item = f64>>(values: I) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        match best {
            Some((_, b)) if v <= b + TIE_TOL * b.abs() => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Maximises EE over the Cartesian product of `grids`.
///
/// Variables without a grid keep their value from `params`. When ζ is on
/// a grid, a point is feasible if its SINR bound reaches γ₀ (and ζ is in
/// `[max(1, K/τc), K]`); otherwise ζ is set by the constraint. Points are
/// evaluated in parallel and reduced in grid order, earlier grids varying
/// slowest, so ties resolve to the smallest values.
pub fn brute_force_optimum(
    params: &SystemParams,
    pm: &PowerModel,
    gamma0: f64,
    grids: &[(Variable, Grid)],
    opts: &OptimizerOptions,
) -> Result<super::OptimumReport> {
    if grids.is_empty() {
        return Err(Error::domain("brute-force search needs at least one grid"));
    }
    for (i, (v, _)) in grids.iter().enumerate() {
        if grids[..i].iter().any(|(w, _)| w == v) {
            return Err(Error::domain(format!("variable {v} given twice")));
        }
    }
    let mut prob = ReducedProblem::new(params, pm, opts.apc_mode, gamma0)?;
    if opts.welch_for_users && grids.iter().any(|(v, _)| *v == Variable::K) {
        prob = prob.with_welch();
    }

    let sizes: Vec<usize> = grids.iter().map(|(_, g)| g.len()).collect();
    let total: usize = sizes.iter().product();
    let point_at = |mut idx: usize| -> ReducedPoint {
        let (mut lambda, mut n, mut k) = (prob.base.lambda, prob.base.n, prob.base.k);
        let mut zeta = None;
        for (d, (var, grid)) in grids.iter().enumerate().rev() {
            let x = grid.values()[idx % sizes[d]];
            idx /= sizes[d];
            match var {
                Variable::Zeta => zeta = Some(x),
                Variable::Lambda => lambda = x,
                Variable::N => n = x,
                Variable::K => k = x,
            }
        }
        match zeta {
            None => prob.evaluate(lambda, n, k),
            Some(z) => {
                let op = prob.operating_point(lambda, n, k, z);
                let meets = op.check_gamma() * prob.gamma0 <= 1.0 + TIE_TOL;
                let ee = (meets && prob.in_window(k, z)).then(|| prob.pinned_ee(lambda, n, k, z)).flatten();
                ReducedPoint {
                    lambda,
                    n,
                    k,
                    zeta: z,
                    a: op.a,
                    feasible: ee.is_some(),
                    ee: ee.unwrap_or(f64::NEG_INFINITY),
                }
            }
        }
    };

    let points: Vec<ReducedPoint> = (0..total).into_par_iter().map(point_at).collect();

    let variables: Vec<Variable> = grids.iter().map(|(v, _)| *v).collect();
    let mut arb = Arbiter::new(variables.clone(), opts.arbiter_tolerance);
    for var in &variables {
        let feasible = points.iter().filter(|p| p.feasible).map(|p| var.of(p));
        let (lo, hi) = feasible.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        arb.interval.push([lo, hi]);
    }
    arb.diag("grid_points", total as f64);
    arb.diag("feasible_points", points.iter().filter(|p| p.feasible).count() as f64);
    let best = argmax_lexicographic(points.iter().map(|p| p.ee)).map(|i| points[i]);
    let mut report = arb.decide(None, best)?;
    report.notes.clear();
    report.notes.push("exhaustive grid search".into());
    Ok(report)
}

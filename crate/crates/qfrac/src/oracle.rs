//! Independent brute-force references.
//!
//! Two cross-validation tools that share no code path with the pencil
//! engine: a dense grid scan of the ratio over feasible boxes (upper
//! bounds the infimum from feasible samples, so the direct method must
//! stay at or below it), and a Dinkelbach-style root finder on the
//! subproblem value function `f(lambda)` (the iterative method the direct
//! route replaces; the two must agree wherever both converge).

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{ExtendedReal, Finite, FractionalProblem, NegInf};
use crate::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("no feasible samples on the grid")]
    NoFeasibleSamples,
    #[error("no root bracket: f stays {0} on the search range")]
    NoBracket(&'static str),
    #[error("iteration cap exceeded")]
    IterationCap,
}

/// Sampling plan for `grid_infimum`: a centered box of half-width
/// `box_halfwidth` with `points_per_axis` samples per coordinate.
/// Cost grows as `points_per_axis^n`; intended for n <= 4.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub box_halfwidth: f64,
    pub points_per_axis: usize,
    pub feasibility_tol: f64,
}

impl GridSpec {
    pub fn new(box_halfwidth: f64, points_per_axis: usize) -> Self {
        assert!(points_per_axis >= 2, "GridSpec: need at least 2 points per axis");
        GridSpec { box_halfwidth, points_per_axis, feasibility_tol: 1e-9 }
    }

    pub fn with_feasibility_tol(mut self, tol: f64) -> Self {
        self.feasibility_tol = tol;
        self
    }
}

/// Summary of a full grid sweep.
#[derive(Debug, Clone)]
pub struct GridStats {
    pub feasible_count: usize,
    pub min_ratio: f64,
    pub argmin: Vec<f64>,
    /// Smallest denominator value seen over feasible samples.
    pub min_f2: f64,
    /// Smallest numerator value seen over feasible samples.
    pub min_f1: f64,
}

/// Minimum sampled ratio over feasible grid points.
///
/// Equality instances (`u = v`) are sampled by one Newton correction of
/// each grid point toward the level set along the constraint gradient;
/// points where the gradient nearly vanishes are skipped. Evaluation is
/// chunked across threads with a deterministic reduction (minimum value,
/// lexicographically smallest argmin on ties).
pub fn grid_infimum(
    p: &FractionalProblem,
    spec: &GridSpec,
) -> Result<(f64, Vec<f64>), OracleError> {
    let stats = grid_stats(p, spec)?;
    Ok((stats.min_ratio, stats.argmin))
}

/// Full sweep variant reporting feasible-sample counts and coordinate-wise
/// minima of numerator and denominator alongside the infimum.
pub fn grid_stats(p: &FractionalProblem, spec: &GridSpec) -> Result<GridStats, OracleError> {
    let n = p.dim();
    let k = spec.points_per_axis;
    let r = spec.box_halfwidth;
    let step = 2.0 * r / ((k - 1) as f64);

    let equality_level = match (p.u, p.v) {
        (Finite(u), Finite(v)) if (u - v).abs() <= 1e-12 * (1.0 + u.abs()) => Some(u),
        _ => None,
    };

    #[derive(Clone)]
    struct Local {
        count: usize,
        min_ratio: f64,
        argmin: Vec<f64>,
        min_f2: f64,
        min_f1: f64,
    }
    let empty = Local {
        count: 0,
        min_ratio: f64::INFINITY,
        argmin: Vec::new(),
        min_f2: f64::INFINITY,
        min_f1: f64::INFINITY,
    };

    let lex_less = |a: &[f64], b: &[f64]| -> bool {
        for (x, y) in a.iter().zip(b) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Less => return true,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => {}
            }
        }
        false
    };

    let scan_axis = |i0: usize| -> Local {
        let mut loc = empty.clone();
        let mut x = vec![0.0f64; n];
        x[0] = -r + step * (i0 as f64);
        let mut idx = vec![0usize; n.saturating_sub(1)];
        loop {
            for (d, &i) in idx.iter().enumerate() {
                x[d + 1] = -r + step * (i as f64);
            }
            let mut pt = x.clone();
            let feasible;
            if let Some(level) = equality_level {
                let g = p.g.as_ref().expect("equality bounds require g");
                // one Newton step onto { g = level } along the gradient
                let grad = g.gradient(&pt);
                let gn: f64 = grad.iter().map(|v| v * v).sum();
                if gn.sqrt() < 1e-6 {
                    feasible = false;
                } else {
                    let resid = g.evaluate(&pt) - level;
                    let t = resid / gn;
                    for (pi, gi) in pt.iter_mut().zip(&grad) {
                        *pi -= t * gi;
                    }
                    feasible = (g.evaluate(&pt) - level).abs() <= spec.feasibility_tol;
                }
            } else {
                feasible = p.is_feasible(&pt, spec.feasibility_tol);
            }
            if feasible {
                let den = p.f2.evaluate(&pt);
                let num = p.f1.evaluate(&pt);
                loc.count += 1;
                if den < loc.min_f2 {
                    loc.min_f2 = den;
                }
                if num < loc.min_f1 {
                    loc.min_f1 = num;
                }
                // ratios are meaningless outside the well-defined regime
                if den > 1e-12 {
                    let ratio = num / den;
                    if ratio < loc.min_ratio
                        || (ratio == loc.min_ratio && lex_less(&pt, &loc.argmin))
                    {
                        loc.min_ratio = ratio;
                        loc.argmin = pt.clone();
                    }
                }
            }
            // odometer over the remaining axes
            let mut d = 0;
            loop {
                if d >= idx.len() {
                    return loc;
                }
                idx[d] += 1;
                if idx[d] < k {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    };

    let merge = |a: Local, b: Local| -> Local {
        let mut out = a;
        out.count += b.count;
        if b.min_f2 < out.min_f2 {
            out.min_f2 = b.min_f2;
        }
        if b.min_f1 < out.min_f1 {
            out.min_f1 = b.min_f1;
        }
        if b.min_ratio < out.min_ratio
            || (b.min_ratio == out.min_ratio && !b.argmin.is_empty() && lex_less(&b.argmin, &out.argmin))
        {
            out.min_ratio = b.min_ratio;
            out.argmin = b.argmin;
        }
        out
    };

    let total = (0..k)
        .into_par_iter()
        .map(scan_axis)
        .reduce(|| empty.clone(), merge);

    if total.count == 0 {
        return Err(OracleError::NoFeasibleSamples);
    }
    if total.argmin.is_empty() {
        return Err(OracleError::NoFeasibleSamples);
    }
    Ok(GridStats {
        feasible_count: total.count,
        min_ratio: total.min_ratio,
        argmin: total.argmin,
        min_f2: total.min_f2,
        min_f1: total.min_f1,
    })
}

/// Root finding on the subproblem value function: locate `lambda` with
/// `f(lambda) = 0` by safeguarded secant/bisection.
///
/// `f` must be nonincreasing where finite (which holds whenever the
/// denominator is positive on the feasible set); `-inf` values count as
/// negative. Returns the root and the number of refinement iterations.
pub fn dinkelbach<F>(
    f_eval: F,
    lambda_init: f64,
    tols: &Tolerances,
) -> Result<(f64, usize), OracleError>
where
    F: Fn(f64) -> ExtendedReal,
{
    let val = |l: f64| -> f64 { f_eval(l).as_f64() };
    let tol_at = |l: f64, fl: f64| tols.root * (1.0 + l.abs()) * (1.0 + fl.abs().min(1.0));

    let f0 = val(lambda_init);
    if f0 == f64::NEG_INFINITY {
        // search downward for a nonnegative value
        let hi = lambda_init;
        let mut step = 1.0;
        let mut lo = None;
        for _ in 0..60 {
            let x = hi - step;
            let fx = val(x);
            if fx >= 0.0 {
                lo = Some((x, fx));
                break;
            }
            step *= 2.0;
        }
        let (lo, _) = lo.ok_or(OracleError::NoBracket("negative (or -inf)"))?;
        return bisect_root(&val, lo, lambda_init, tols, &tol_at);
    }

    if f0.abs() <= tol_at(lambda_init, f0) {
        return Ok((lambda_init, 0));
    }

    if f0 > 0.0 {
        // walk up until the sign flips
        let mut lo = lambda_init;
        let mut step = 1.0;
        for _ in 0..60 {
            let x = lo + step;
            let fx = val(x);
            if fx <= 0.0 {
                return bisect_root(&val, lo, x, tols, &tol_at);
            }
            lo = x;
            step *= 2.0;
        }
        Err(OracleError::NoBracket("positive"))
    } else {
        let mut hi = lambda_init;
        let mut step = 1.0;
        for _ in 0..60 {
            let x = hi - step;
            let fx = val(x);
            if fx >= 0.0 {
                return bisect_root(&val, x, hi, tols, &tol_at);
            }
            hi = x;
            step *= 2.0;
        }
        Err(OracleError::NoBracket("negative (or -inf)"))
    }
}

fn bisect_root(
    val: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    _tols: &Tolerances,
    tol_at: &dyn Fn(f64, f64) -> f64,
) -> Result<(f64, usize), OracleError> {
    let mut flo = val(lo);
    let mut fhi = val(hi);
    for it in 0..100 {
        // secant candidate, safeguarded into the bracket interior
        let mut mid = if fhi.is_finite() && flo.is_finite() && (flo - fhi).abs() > 1e-300 {
            lo + flo * (hi - lo) / (flo - fhi)
        } else {
            0.5 * (lo + hi)
        };
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let fmid = val(mid);
        if fmid.is_finite() && fmid.abs() <= tol_at(mid, fmid) {
            return Ok((mid, it + 1));
        }
        if fmid >= 0.0 {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            return Ok((lo, it + 1));
        }
    }
    // f may jump from positive straight to -inf; the left endpoint is
    // then the root in the limiting sense
    if flo.is_finite() && flo.abs() <= 1e-6 * (1.0 + lo.abs()) {
        return Ok((lo, 100));
    }
    Err(OracleError::IterationCap)
}

/// `f(lambda)` evaluators assembled from the pencil engine, shaped for
/// [`dinkelbach`].
pub mod f_eval {
    use super::*;
    use crate::lmi::{sup_nu, LmiStatus, MuDomain};
    use crate::model::QuadraticForm;

    /// Unconstrained subproblem value `inf f1 - lambda f2`.
    pub fn unconstrained<'a>(
        f1: &'a QuadraticForm,
        f2: &'a QuadraticForm,
        tols: &'a Tolerances,
    ) -> impl Fn(f64) -> ExtendedReal + 'a {
        move |lambda| {
            let m = f1.homogenize().add_scaled(&f2.homogenize(), -lambda);
            let sol = sup_nu(m, None, MuDomain::Absent, Some(f1.c - lambda * f2.c), tols);
            value_of(sol.lambda_star, sol.status)
        }
    }

    /// Equality subproblem value `inf { f1 - lambda f2 : h = 0 }` through
    /// its dual pencil (`h` must satisfy `h(0) = 0`).
    pub fn equality<'a>(
        f1: &'a QuadraticForm,
        f2: &'a QuadraticForm,
        h: &'a QuadraticForm,
        tols: &'a Tolerances,
    ) -> impl Fn(f64) -> ExtendedReal + 'a {
        move |lambda| {
            let m = f1.homogenize().add_scaled(&f2.homogenize(), -lambda);
            let sol = sup_nu(
                m,
                Some(h.homogenize()),
                MuDomain::Free,
                Some(f1.c - lambda * f2.c),
                tols,
            );
            value_of(sol.lambda_star, sol.status)
        }
    }

    /// One-sided subproblem value `inf { f1 - lambda f2 : g <= 0 }`.
    pub fn one_sided<'a>(
        f1: &'a QuadraticForm,
        f2: &'a QuadraticForm,
        g: &'a QuadraticForm,
        tols: &'a Tolerances,
    ) -> impl Fn(f64) -> ExtendedReal + 'a {
        move |lambda| {
            let m = f1.homogenize().add_scaled(&f2.homogenize(), -lambda);
            let sol = sup_nu(
                m,
                Some(g.homogenize()),
                MuDomain::NonNegative,
                Some(f1.c - lambda * f2.c),
                tols,
            );
            value_of(sol.lambda_star, sol.status)
        }
    }

    fn value_of(v: ExtendedReal, status: LmiStatus) -> ExtendedReal {
        match status {
            LmiStatus::Infeasible => NegInf,
            _ => v,
        }
    }
}

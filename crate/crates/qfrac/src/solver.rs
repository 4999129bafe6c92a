//! The full decision tree for minimizing `f1/f2` over the level band of a
//! quadratic.
//!
//! Pipeline: triage on how the bounds cut into the range of `g`
//! (two-sided, one-sided, equality, unconstrained); an interior test
//! against the plain pencil; boundary equality subproblems after a
//! coordinate shift onto the level set; selection of the smaller boundary
//! value; the attainment test `f(lambda*) = 0`; and recovery of
//! minimizers from the null space of the optimal pencil.
//!
//! Every report carries a certification flag: `Exact` only when the
//! hypotheses backing the equivalences were verified (the equality
//! constraint qualification in particular), `LowerBoundOnly` otherwise —
//! pencil feasibility always bounds the optimum from below, so nothing
//! stronger is ever claimed silently.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::{
    check_assumption_a, check_assumption_b, check_well_defined, CheckResult, Verdict, Witness,
};
use crate::linalg::{dot, norm2};
use crate::lmi::{sup_nu, AffinePencil, LmiStatus, MuDomain};
use crate::model::{ExtendedReal, Finite, FractionalProblem, NegInf, PosInf, QuadraticForm};
use crate::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("infeasible constraint set: {0}")]
    Infeasible(String),
    #[error("empty level set: no point with g(x) = {0}")]
    EmptyLevelSet(f64),
    #[error("equality constraint not normalized: h(0) = {0}")]
    NotNormalized(f64),
    #[error("recovery pencil not positive semidefinite (min eig {0:.3e})")]
    PencilNotPsd(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attainment {
    Attained,
    Unattained,
    UnboundedBelow,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    Unconstrained,
    InteriorCase1,
    LowerBoundaryCase2,
    UpperBoundaryCase3,
    OneSided,
    Equality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certified {
    Exact,
    LowerBoundOnly,
}

/// Which side condition recovered points must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Equality,
    Inequality,
    None,
}

/// Per-boundary bookkeeping: the subproblem value, its `f` value, the
/// coordinate shift used, and the constraint-qualification verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub lambda: ExtendedReal,
    pub f_value: Option<f64>,
    pub shift: Vec<f64>,
    pub assumption_b: Verdict,
}

/// Intermediate values of the pipeline, kept for inspection: the interior
/// candidate, both boundary subproblems, the final `f(lambda*)`, and the
/// inner-scalar interval of the one-sided certificate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub case1_lambda: Option<f64>,
    pub case1_f: Option<f64>,
    pub lower: Option<BoundaryTrace>,
    pub upper: Option<BoundaryTrace>,
    pub f_at_lambda_star: Option<f64>,
    pub eta_interval: Option<(f64, f64)>,
}

/// Everything a solve produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub lambda_star: ExtendedReal,
    pub attainment: Attainment,
    pub solutions: Vec<Vec<f64>>,
    pub multiplier_mu: Option<f64>,
    pub case: CaseTag,
    pub diagnostics: Vec<CheckResult>,
    pub certified: Certified,
    pub trace: PipelineTrace,
}

impl SolveReport {
    pub fn lambda(&self) -> f64 {
        self.lambda_star.as_f64()
    }

    fn bare(case: CaseTag) -> Self {
        SolveReport {
            lambda_star: NegInf,
            attainment: Attainment::Unknown,
            solutions: Vec::new(),
            multiplier_mu: None,
            case,
            diagnostics: Vec::new(),
            certified: Certified::LowerBoundOnly,
            trace: PipelineTrace::default(),
        }
    }
}

/// Equality-constrained instance in coordinates where the constraint
/// passes through the origin: `h(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityProblem {
    pub f1: QuadraticForm,
    pub f2: QuadraticForm,
    pub h: QuadraticForm,
    pub shift_applied: Vec<f64>,
}

impl EqualityProblem {
    pub fn new(
        f1: QuadraticForm,
        f2: QuadraticForm,
        h: QuadraticForm,
        tols: &Tolerances,
    ) -> Result<Self, SolveError> {
        let h0 = h.c;
        let scale = h.a.norm_fro() + norm2(&h.b);
        if h0.abs() > tols.feas_abs(scale) {
            return Err(SolveError::NotNormalized(h0));
        }
        let n = f1.dim();
        Ok(EqualityProblem { f1, f2, h, shift_applied: vec![0.0; n] })
    }

    /// Build the boundary subproblem `g(x) = level` by shifting all forms
    /// onto a point of the level set.
    pub fn from_level(
        f1: &QuadraticForm,
        f2: &QuadraticForm,
        g: &QuadraticForm,
        level: f64,
        tols: &Tolerances,
    ) -> Result<Self, SolveError> {
        let x0 = g
            .find_level_point(level, tols.feas)
            .ok_or(SolveError::EmptyLevelSet(level))?;
        let mut h = g.shift(&x0).plus_constant(-level);
        h.c = 0.0; // the residual |g(x0) - level| <= tol is noise, drop it
        Ok(EqualityProblem {
            f1: f1.shift(&x0),
            f2: f2.shift(&x0),
            h,
            shift_applied: x0,
        })
    }
}

fn ratio_hint(f1: &QuadraticForm, f2: &QuadraticForm, x: &[f64]) -> Option<f64> {
    let den = f2.evaluate(x);
    (den > 1e-12).then(|| f1.evaluate(x) / den)
}

fn value_tol(lambda: f64, f2_at: f64, tols: &Tolerances) -> f64 {
    100.0 * tols.feas * (1.0 + lambda.abs()) * (1.0 + f2_at.abs())
}

/// `f1(x) - lambda f2(x)` residual small enough to count as zero.
fn vanishes(f1: &QuadraticForm, f2: &QuadraticForm, lambda: f64, x: &[f64], tols: &Tolerances) -> bool {
    let val = f1.evaluate(x) - lambda * f2.evaluate(x);
    val.abs() <= value_tol(lambda, f2.evaluate(x), tols)
}

/// Threshold deciding `f(lambda*) = 0` from the subproblem dual value.
fn f_zero_tol(lambda: f64, scale: f64, tols: &Tolerances) -> f64 {
    100.0 * tols.feas * (1.0 + lambda.abs()) * (1.0 + scale)
}

// ---------------------------------------------------------------------
// unconstrained
// ---------------------------------------------------------------------

/// Minimize `f1/f2` over all of space. The plain pencil is exact here:
/// `f1 - lambda f2 >= 0` pointwise iff its bordered matrix is PSD.
pub fn solve_unconstrained(
    f1: &QuadraticForm,
    f2: &QuadraticForm,
    tols: &Tolerances,
) -> SolveReport {
    let n = f1.dim();
    let pencil = AffinePencil::new(f1.homogenize(), f2.homogenize().scaled(-1.0));
    let hint = ratio_hint(f1, f2, &vec![0.0; n]);
    let sol = pencil.sup_lambda(hint, tols);

    let mut report = SolveReport::bare(CaseTag::Unconstrained);
    match sol.status {
        LmiStatus::Infeasible => {
            report.lambda_star = NegInf;
            report.attainment = Attainment::UnboundedBelow;
            report.certified = Certified::Exact;
        }
        LmiStatus::UnboundedAbove => {
            report.lambda_star = PosInf;
            report.attainment = Attainment::Unknown;
        }
        _ => {
            let lambda = sol.lambda();
            report.lambda_star = Finite(lambda);
            report.certified = if sol.status == LmiStatus::Attained {
                Certified::Exact
            } else {
                Certified::LowerBoundOnly
            };
            let m = f1.a.add_scaled(&f2.a, -lambda);
            let rhs: Vec<f64> = (0..n).map(|i| -(f1.b[i] - lambda * f2.b[i])).collect();
            let st = m.pinv_apply(&rhs);
            let val = f1.evaluate(&st.solution) - lambda * f2.evaluate(&st.solution);
            if st.consistent {
                report.trace.f_at_lambda_star = Some(val);
            }
            if st.consistent && val.abs() <= value_tol(lambda, f2.evaluate(&st.solution), tols) {
                report.attainment = Attainment::Attained;
                report.solutions = vec![st.solution];
            } else {
                report.attainment = Attainment::Unattained;
            }
        }
    }
    report
}

// ---------------------------------------------------------------------
// equality
// ---------------------------------------------------------------------

/// Minimize `f1/f2` over `{ h = 0 }` via the pencil with a free inner
/// scalar. Exactness requires the constraint qualification on `h` plus a
/// sign straddle of the level set; both are checked and reflected in the
/// certification flag. Solutions come back in the original coordinates
/// (the stored shift is undone).
pub fn solve_equality(p: &EqualityProblem, tols: &Tolerances) -> SolveReport {
    let n = p.f1.dim();
    let mut report = SolveReport::bare(CaseTag::Equality);

    let b_check = match check_assumption_b(&p.h, tols) {
        Ok(r) => r,
        Err(e) => CheckResult {
            name: "assumption_b".into(),
            verdict: Verdict::Unknown,
            witness: Witness::None,
            note: format!("checker unavailable: {e}"),
        },
    };
    let (hlo, hhi) = p.h.inf_sup();
    let straddle = hlo < Finite(-tols.strict) && Finite(tols.strict) < hhi;
    let exact_hypotheses = b_check.verdict == Verdict::Holds && straddle;
    report.diagnostics.push(b_check.clone());

    let pencil = AffinePencil::with_mu(
        p.f1.homogenize(),
        p.f2.homogenize().scaled(-1.0),
        p.h.homogenize(),
        MuDomain::Free,
    );
    let hint = ratio_hint(&p.f1, &p.f2, &vec![0.0; n]);
    let sol = pencil.sup_lambda(hint, tols);
    report.multiplier_mu = sol.mu_star;

    match sol.status {
        LmiStatus::Infeasible => {
            report.lambda_star = NegInf;
            report.attainment = Attainment::UnboundedBelow;
            report.certified = if exact_hypotheses {
                Certified::Exact
            } else {
                Certified::LowerBoundOnly
            };
        }
        LmiStatus::UnboundedAbove => {
            report.lambda_star = PosInf;
            report.attainment = Attainment::Unknown;
        }
        LmiStatus::MuEscaped => {
            // the sup is only approached as the multiplier escapes; the
            // value is a lower bound and no finite certificate exists
            report.lambda_star = sol.lambda_star;
            report.attainment = Attainment::Unknown;
            report.certified = Certified::LowerBoundOnly;
        }
        LmiStatus::Attained | LmiStatus::SupOnly => {
            let lambda = sol.lambda();
            report.lambda_star = Finite(lambda);
            let m_fixed = p.f1.homogenize().add_scaled(&p.f2.homogenize(), -lambda);
            let f_hint = Some(p.f1.c - lambda * p.f2.c);
            let fsol = sup_nu(m_fixed, Some(p.h.homogenize()), MuDomain::Free, f_hint, tols);
            let fval = fsol.lambda_star.finite();
            report.trace.f_at_lambda_star = fval;

            let scale = p.f1.homogenize().norm_fro() + p.f2.homogenize().norm_fro();
            match fval {
                Some(f) if f.abs() <= f_zero_tol(lambda, scale, tols) => {
                    let sols = recover_solution(
                        lambda,
                        sol.mu_star,
                        &p.f1,
                        &p.f2,
                        Some(&p.h),
                        ConstraintKind::Equality,
                        tols,
                    )
                    .unwrap_or_default();
                    if sols.is_empty() {
                        report.attainment = Attainment::Unknown;
                    } else {
                        report.attainment = Attainment::Attained;
                        report.solutions = sols
                            .into_iter()
                            .map(|mut x| {
                                for i in 0..n {
                                    x[i] += p.shift_applied[i];
                                }
                                x
                            })
                            .collect();
                    }
                }
                Some(_) => report.attainment = Attainment::Unattained,
                None => report.attainment = Attainment::Unknown,
            }
            report.certified = if exact_hypotheses && sol.status == LmiStatus::Attained {
                Certified::Exact
            } else {
                Certified::LowerBoundOnly
            };
        }
    }
    report
}

// ---------------------------------------------------------------------
// one-sided
// ---------------------------------------------------------------------

/// Minimize `f1/f2` over `{ g <= 0 }`. With a Slater point the pencil
/// with a nonnegative inner scalar is exact with no further conditions;
/// without one the set is either empty or the affine kernel of `g`, onto
/// which the instance is reduced and solved unconstrained.
pub fn solve_one_sided(
    f1: &QuadraticForm,
    f2: &QuadraticForm,
    g: &QuadraticForm,
    tols: &Tolerances,
) -> Result<SolveReport, SolveError> {
    let n = f1.dim();
    let (gi, gs) = g.inf_sup();

    if let Finite(s) = gs {
        if s <= tols.strict {
            // g <= 0 everywhere: the constraint is vacuous
            let mut rep = solve_unconstrained(f1, f2, tols);
            rep.case = CaseTag::OneSided;
            return Ok(rep);
        }
    }

    let slater = match gi {
        NegInf => true,
        Finite(val) => val < -tols.strict,
        PosInf => false,
    };

    if !slater {
        if let Finite(val) = gi {
            if val > tols.strict {
                return Err(SolveError::Infeasible(format!(
                    "inf g = {val} > 0: no point satisfies g <= 0"
                )));
            }
        }
        // inf g = 0: the feasible set is the affine kernel { Bx + d = 0 }
        let neg_d: Vec<f64> = g.b.iter().map(|x| -x).collect();
        let base = g.a.pinv_apply(&neg_d);
        if !base.consistent {
            return Err(SolveError::Infeasible(
                "minimizer system of g is inconsistent".into(),
            ));
        }
        let x0 = base.solution;
        let w = g.a.null_basis();
        if w.cols() == 0 {
            let mut rep = SolveReport::bare(CaseTag::OneSided);
            rep.lambda_star = Finite(f1.evaluate(&x0) / f2.evaluate(&x0));
            rep.attainment = Attainment::Attained;
            rep.solutions = vec![x0];
            rep.certified = Certified::Exact;
            return Ok(rep);
        }
        let rf1 = f1.compose_affine(&x0, &w);
        let rf2 = f2.compose_affine(&x0, &w);
        let inner = solve_unconstrained(&rf1, &rf2, tols);
        let mut rep = inner.clone();
        rep.case = CaseTag::OneSided;
        rep.solutions = inner
            .solutions
            .iter()
            .map(|z| {
                let mut x = x0.clone();
                let wz = w.mul_vec(z);
                for i in 0..n {
                    x[i] += wz[i];
                }
                x
            })
            .collect();
        return Ok(rep);
    }

    // Slater point available: the certified route
    let mut report = SolveReport::bare(CaseTag::OneSided);
    let level = match gi {
        Finite(val) => 0.5 * val,
        _ => -1.0,
    };
    let x_slater = g.find_level_point(level, tols.feas);
    let hint = x_slater.as_ref().and_then(|x| ratio_hint(f1, f2, x));

    let pencil = AffinePencil::with_mu(
        f1.homogenize(),
        f2.homogenize().scaled(-1.0),
        g.homogenize(),
        MuDomain::NonNegative,
    );
    let sol = pencil.sup_lambda(hint, tols);
    report.multiplier_mu = sol.mu_star;

    match sol.status {
        LmiStatus::Infeasible => {
            report.lambda_star = NegInf;
            report.attainment = Attainment::UnboundedBelow;
            report.certified = Certified::Exact;
        }
        LmiStatus::UnboundedAbove => {
            report.lambda_star = PosInf;
            report.attainment = Attainment::Unknown;
        }
        LmiStatus::MuEscaped => {
            report.lambda_star = sol.lambda_star;
            report.attainment = Attainment::Unknown;
            report.certified = Certified::LowerBoundOnly;
        }
        LmiStatus::Attained | LmiStatus::SupOnly => {
            let lambda = sol.lambda();
            report.lambda_star = Finite(lambda);
            report.certified = if sol.status == LmiStatus::Attained {
                Certified::Exact
            } else {
                Certified::LowerBoundOnly
            };

            // dual value f(lambda*) with eta >= 0
            let m_fixed = f1.homogenize().add_scaled(&f2.homogenize(), -lambda);
            let f_hint = x_slater
                .as_ref()
                .map(|x| f1.evaluate(x) - lambda * f2.evaluate(x));
            let fsol = sup_nu(
                m_fixed,
                Some(g.homogenize()),
                MuDomain::NonNegative,
                f_hint,
                tols,
            );
            let fval = fsol.lambda_star.finite();
            report.trace.f_at_lambda_star = fval;

            // uniqueness probe: step a hair inside the feasible interval
            // (the bisection endpoint overshoots by up to the PSD slack)
            // and resolve the certificate slice at eigensolver precision
            let probe_lambda = lambda - 100.0 * tols.psd * (1.0 + lambda.abs());
            let probe_slack = 1e-13 * (1.0 + pencil.norm_at(probe_lambda, 0.0));
            if let Some((lo, hi)) = pencil.mu_interval(probe_lambda, probe_slack, tols) {
                report.trace.eta_interval = Some((lo, hi));
                let width = hi - lo;
                let unique = width <= 1e-6 * (1.0 + lo.abs());
                let ball_shaped = norm2(&g.b) <= tols.strict
                    && g.c < -tols.strict
                    && g.a.min_eig() >= -g.a.rank_tol();
                report.diagnostics.push(CheckResult {
                    name: "certificate_uniqueness".into(),
                    verdict: if unique { Verdict::Holds } else { Verdict::Fails },
                    witness: Witness::Pair(lambda, lo),
                    note: format!(
                        "eta interval [{lo:.9}, {hi:.9}], width {width:.3e}{}",
                        if ball_shaped {
                            "; ball-shaped constraint: uniqueness is equivalent to attainment"
                        } else {
                            ""
                        }
                    ),
                });
            }

            let scale = f1.homogenize().norm_fro() + f2.homogenize().norm_fro();
            match fval {
                Some(f) if f.abs() <= f_zero_tol(lambda, scale, tols) => {
                    let sols = recover_solution(
                        lambda,
                        sol.mu_star,
                        f1,
                        f2,
                        Some(g),
                        ConstraintKind::Inequality,
                        tols,
                    )
                    .unwrap_or_default();
                    if sols.is_empty() {
                        report.attainment = Attainment::Unknown;
                    } else {
                        report.attainment = Attainment::Attained;
                        report.solutions = sols;
                    }
                }
                Some(_) => report.attainment = Attainment::Unattained,
                None => report.attainment = Attainment::Unknown,
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------
// full pipeline
// ---------------------------------------------------------------------

/// Solve a full instance: triage the bounds, try the interior case, then
/// the boundary subproblems.
pub fn solve(p: &FractionalProblem, tols: &Tolerances) -> Result<SolveReport, SolveError> {
    let mut diags: Vec<CheckResult> = Vec::new();

    let g = match &p.g {
        None => {
            push_unconstrained_welldef(&p.f2, &mut diags);
            let mut rep = solve_unconstrained(&p.f1, &p.f2, tols);
            rep.diagnostics.splice(0..0, diags);
            return Ok(rep);
        }
        Some(g) => g,
    };

    let (gi, gs) = g.inf_sup();
    if let Finite(u) = p.u {
        if let Finite(s) = gs {
            if u > s + tols.feas_abs(u.abs()) {
                return Err(SolveError::Infeasible(format!(
                    "u = {u} exceeds sup g = {s}: empty feasible set"
                )));
            }
        }
    }
    if let Finite(v) = p.v {
        if let Finite(i) = gi {
            if v < i - tols.feas_abs(v.abs()) {
                return Err(SolveError::Infeasible(format!(
                    "v = {v} is below inf g = {i}: empty feasible set"
                )));
            }
        }
    }

    let a_check = check_assumption_a(g, p.u, p.v, tols);
    diags.push(a_check);

    let lower_active = match p.u {
        Finite(u) => gi < Finite(u - tols.strict * (1.0 + u.abs())),
        NegInf => false,
        PosInf => false,
    };
    let upper_active = match p.v {
        Finite(v) => Finite(v + tols.strict * (1.0 + v.abs())) < gs,
        PosInf => false,
        NegInf => false,
    };

    match (lower_active, upper_active) {
        (false, false) => {
            push_unconstrained_welldef(&p.f2, &mut diags);
            let mut rep = solve_unconstrained(&p.f1, &p.f2, tols);
            rep.diagnostics.splice(0..0, diags);
            Ok(rep)
        }
        (true, false) => {
            // only u <= g binds: u - g <= 0
            let u = p.u.finite().expect("active lower bound is finite");
            let gle = g.negated().plus_constant(u);
            push_one_sided_welldef(&p.f2, &gle, &mut diags);
            let mut rep = solve_one_sided(&p.f1, &p.f2, &gle, tols)?;
            rep.diagnostics.splice(0..0, diags);
            Ok(rep)
        }
        (false, true) => {
            let v = p.v.finite().expect("active upper bound is finite");
            let gle = g.plus_constant(-v);
            push_one_sided_welldef(&p.f2, &gle, &mut diags);
            let mut rep = solve_one_sided(&p.f1, &p.f2, &gle, tols)?;
            rep.diagnostics.splice(0..0, diags);
            Ok(rep)
        }
        (true, true) => {
            let u = p.u.finite().expect("active lower bound is finite");
            let v = p.v.finite().expect("active upper bound is finite");
            push_two_sided_welldef(&p.f2, g, u, v, &mut diags);
            if (u - v).abs() <= tols.strict * (1.0 + u.abs()) {
                let eq = EqualityProblem::from_level(&p.f1, &p.f2, g, u, tols)?;
                let mut rep = solve_equality(&eq, tols);
                rep.diagnostics.splice(0..0, diags);
                return Ok(rep);
            }
            let mut rep = solve_two_sided(&p.f1, &p.f2, g, u, v, tols)?;
            rep.diagnostics.splice(0..0, diags);
            Ok(rep)
        }
    }
}

fn push_unconstrained_welldef(f2: &QuadraticForm, diags: &mut Vec<CheckResult>) {
    let (lo, _) = f2.inf_sup();
    let (verdict, note) = match lo {
        Finite(val) if val > 0.0 => (Verdict::Holds, format!("inf f2 = {val} > 0 everywhere")),
        Finite(val) => (Verdict::Fails, format!("inf f2 = {val} <= 0")),
        NegInf => (Verdict::Fails, "f2 unbounded below".to_string()),
        PosInf => (Verdict::Unknown, "degenerate".to_string()),
    };
    diags.push(CheckResult { name: "well_defined".into(), verdict, witness: Witness::None, note });
}

fn push_one_sided_welldef(f2: &QuadraticForm, gle: &QuadraticForm, diags: &mut Vec<CheckResult>) {
    let tols = Tolerances::default();
    match check_well_defined(f2, gle, &tols) {
        Ok(r) => diags.push(r),
        Err(e) => diags.push(CheckResult {
            name: "well_defined".into(),
            verdict: Verdict::Unknown,
            witness: Witness::None,
            note: format!("checker unavailable: {e}"),
        }),
    }
}

/// Two-sided advisory: positivity of `f2` on a superset `{g <= v}` or
/// `{u <= g}` implies positivity on the band; failure on a superset
/// implies nothing, so only `Holds` transfers.
fn push_two_sided_welldef(
    f2: &QuadraticForm,
    g: &QuadraticForm,
    u: f64,
    v: f64,
    diags: &mut Vec<CheckResult>,
) {
    let tols = Tolerances::default();
    let mut notes = Vec::new();
    for gle in [g.plus_constant(-v), g.negated().plus_constant(u)] {
        match check_well_defined(f2, &gle, &tols) {
            Ok(r) if r.verdict == Verdict::Holds => {
                diags.push(CheckResult {
                    note: format!("{} (on a superset of the band)", r.note),
                    ..r
                });
                return;
            }
            Ok(r) => notes.push(format!("{:?}: {}", r.verdict, r.note)),
            Err(e) => notes.push(format!("unavailable: {e}")),
        }
    }
    diags.push(CheckResult {
        name: "well_defined".into(),
        verdict: Verdict::Unknown,
        witness: Witness::None,
        note: format!("not settled on either one-sided superset ({})", notes.join("; ")),
    });
}

fn solve_two_sided(
    f1: &QuadraticForm,
    f2: &QuadraticForm,
    g: &QuadraticForm,
    u: f64,
    v: f64,
    tols: &Tolerances,
) -> Result<SolveReport, SolveError> {
    let mut trace = PipelineTrace::default();
    let mut diags: Vec<CheckResult> = Vec::new();

    // interior test: the plain pencil plus a stationary point inside the band
    let x_feas = g.find_level_point(0.5 * (u + v), tols.feas);
    let hint = x_feas.as_ref().and_then(|x| ratio_hint(f1, f2, x));
    let cv = AffinePencil::new(f1.homogenize(), f2.homogenize().scaled(-1.0))
        .sup_lambda(hint, tols);
    if let (Finite(lh), LmiStatus::Attained | LmiStatus::SupOnly) = (cv.lambda_star, cv.status) {
        trace.case1_lambda = Some(lh);
        if let Some((fval, point)) = interior_candidate(f1, f2, lh, g, u, v, tols) {
            trace.case1_f = Some(fval);
            if let Some(x) = point {
                let mut rep = SolveReport::bare(CaseTag::InteriorCase1);
                rep.lambda_star = Finite(lh);
                rep.attainment = Attainment::Attained;
                rep.solutions = vec![x];
                rep.certified = Certified::Exact;
                rep.trace = trace;
                rep.diagnostics = diags;
                return Ok(rep);
            }
        }
    }

    // boundary subproblems
    let lower = boundary_branch(f1, f2, g, u, tols)?;
    let upper = boundary_branch(f1, f2, g, v, tols)?;
    trace.lower = Some(lower.trace_entry());
    trace.upper = Some(upper.trace_entry());
    diags.extend(lower.report.diagnostics.iter().cloned().map(|mut c| {
        c.name = format!("lower_{}", c.name);
        c
    }));
    diags.extend(upper.report.diagnostics.iter().cloned().map(|mut c| {
        c.name = format!("upper_{}", c.name);
        c
    }));

    let l1 = lower.report.lambda_star;
    let l2 = upper.report.lambda_star;

    let mut rep = SolveReport::bare(CaseTag::LowerBoundaryCase2);
    rep.trace = trace;
    rep.diagnostics = diags;

    if l1 == NegInf || l2 == NegInf {
        let from_lower = l1 == NegInf;
        rep.case = if from_lower { CaseTag::LowerBoundaryCase2 } else { CaseTag::UpperBoundaryCase3 };
        rep.lambda_star = NegInf;
        rep.attainment = Attainment::UnboundedBelow;
        rep.certified = if from_lower { lower.report.certified } else { upper.report.certified };
        return Ok(rep);
    }

    let tie = match (l1, l2) {
        (Finite(a), Finite(b)) => (a - b).abs() <= tols.tie_band * (1.0 + a.abs()),
        _ => false,
    };

    let (winner, runner_up, win_case) = if tie {
        let lower_attained = lower.report.attainment == Attainment::Attained;
        let upper_attained = upper.report.attainment == Attainment::Attained;
        match (lower_attained, upper_attained) {
            (false, true) => (&upper, Some(&lower), CaseTag::UpperBoundaryCase3),
            _ => (&lower, Some(&upper), CaseTag::LowerBoundaryCase2),
        }
    } else if l1 <= l2 {
        (&lower, None, CaseTag::LowerBoundaryCase2)
    } else {
        (&upper, None, CaseTag::UpperBoundaryCase3)
    };

    rep.case = win_case;
    rep.lambda_star = winner.report.lambda_star.min(runner_up.map_or(PosInf, |r| r.report.lambda_star));
    rep.attainment = winner.report.attainment;
    rep.multiplier_mu = winner.report.multiplier_mu;
    rep.certified = winner.report.certified;
    rep.trace.f_at_lambda_star = winner.report.trace.f_at_lambda_star;
    rep.solutions = winner.report.solutions.clone();
    if tie {
        if let Some(other) = runner_up {
            if other.report.attainment == Attainment::Attained {
                rep.solutions.extend(other.report.solutions.iter().cloned());
                rep.solutions = dedup_points(rep.solutions, 1e-6);
            }
        }
    }
    Ok(rep)
}

struct Branch {
    report: SolveReport,
    shift: Vec<f64>,
}

impl Branch {
    fn trace_entry(&self) -> BoundaryTrace {
        let b_verdict = self
            .report
            .diagnostics
            .iter()
            .find(|c| c.name == "assumption_b")
            .map(|c| c.verdict)
            .unwrap_or(Verdict::Unknown);
        BoundaryTrace {
            lambda: self.report.lambda_star,
            f_value: self.report.trace.f_at_lambda_star,
            shift: self.shift.clone(),
            assumption_b: b_verdict,
        }
    }
}

fn boundary_branch(
    f1: &QuadraticForm,
    f2: &QuadraticForm,
    g: &QuadraticForm,
    level: f64,
    tols: &Tolerances,
) -> Result<Branch, SolveError> {
    let eq = EqualityProblem::from_level(f1, f2, g, level, tols)?;
    let shift = eq.shift_applied.clone();
    let report = solve_equality(&eq, tols);
    Ok(Branch { report, shift })
}

/// At the interior candidate value: does the stationary set touch the
/// band `u <= g <= v`? Returns the stationary value of `f1 - lh*f2` and,
/// when both tests pass, a point of the intersection.
#[allow(clippy::type_complexity)]
fn interior_candidate(
    f1: &QuadraticForm,
    f2: &QuadraticForm,
    lh: f64,
    g: &QuadraticForm,
    u: f64,
    v: f64,
    tols: &Tolerances,
) -> Option<(f64, Option<Vec<f64>>)> {
    let n = f1.dim();
    let m = f1.a.add_scaled(&f2.a, -lh);
    let rhs: Vec<f64> = (0..n).map(|i| -(f1.b[i] - lh * f2.b[i])).collect();
    let st = m.pinv_apply(&rhs);
    if !st.consistent {
        return None;
    }
    let xhat = st.solution;
    let fval = f1.evaluate(&xhat) - lh * f2.evaluate(&xhat);
    if fval.abs() > value_tol(lh, f2.evaluate(&xhat), tols) {
        return Some((fval, None));
    }

    let band = tols.feas_abs(u.abs().max(v.abs()));
    let nb = m.null_basis();
    if nb.cols() == 0 {
        let gx = g.evaluate(&xhat);
        if gx >= u - band && gx <= v + band {
            return Some((fval, Some(xhat)));
        }
        return Some((fval, None));
    }

    // stationary set is an affine subspace: check band overlap on the
    // reduced quadratic and pick a point by level targeting
    let gr = g.compose_affine(&xhat, &nb);
    let (rlo, rhi) = gr.inf_sup();
    let lo = rlo.max_f(u);
    let hi = rhi.min_f(v);
    if lo > hi + band {
        return Some((fval, None));
    }
    let g0 = gr.evaluate(&vec![0.0; nb.cols()]);
    if g0 >= u - band && g0 <= v + band {
        return Some((fval, Some(xhat)));
    }
    let target = 0.5 * (lo + hi);
    if let Some(z) = gr.find_level_point(target, tols.feas) {
        let wz = nb.mul_vec(&z);
        let mut x = xhat.clone();
        for i in 0..n {
            x[i] += wz[i];
        }
        if vanishes(f1, f2, lh, &x, tols) {
            return Some((fval, Some(x)));
        }
    }
    Some((fval, None))
}

impl ExtendedReal {
    fn max_f(self, other: f64) -> f64 {
        match self {
            NegInf => other,
            Finite(val) => val.max(other),
            PosInf => f64::INFINITY,
        }
    }

    fn min_f(self, other: f64) -> f64 {
        match self {
            PosInf => other,
            Finite(val) => val.min(other),
            NegInf => f64::NEG_INFINITY,
        }
    }
}

// ---------------------------------------------------------------------
// recovery
// ---------------------------------------------------------------------

/// Extract minimizers from the null space of the optimal pencil
/// `N = M(f1) - lambda M(f2) + mu M(constraint)`.
///
/// Any optimum `x*` satisfies `N (x*, 1) = 0`, so candidates are read off
/// null vectors with a nonzero last component; two-dimensional slices are
/// searched by solving the scalar quadratic that puts the mixed point
/// back on the constraint. Verified points are canonicalized to least
/// norm along constraint-invariant null directions and deduplicated.
/// An empty list means unattained or not found, never silent failure.
pub fn recover_solution(
    lambda: f64,
    mu: Option<f64>,
    f1: &QuadraticForm,
    f2: &QuadraticForm,
    constraint: Option<&QuadraticForm>,
    kind: ConstraintKind,
    tols: &Tolerances,
) -> Result<Vec<Vec<f64>>, SolveError> {
    let n = f1.dim();
    let mut big = f1.homogenize().add_scaled(&f2.homogenize(), -lambda);
    if let (Some(con), Some(m)) = (constraint, mu) {
        if kind != ConstraintKind::None {
            big = big.add_scaled(&con.homogenize(), m);
        }
    }
    let scale = big.norm_fro();
    let eig = big.eigen();
    if eig.eigenvalues[0] < -100.0 * tols.psd_abs(scale) {
        return Err(SolveError::PencilNotPsd(eig.eigenvalues[0]));
    }

    let null_tol = 100.0 * tols.psd_abs(scale);
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() > null_tol {
            continue;
        }
        let vk = eig.eigenvectors.col(k);
        let t = vk[n];
        if t.abs() > 1e-6 {
            points.push((0..n).map(|i| vk[i] / t).collect());
        } else {
            let mut z: Vec<f64> = vk[..n].to_vec();
            let nz = norm2(&z);
            if nz > 1e-12 {
                for zi in &mut z {
                    *zi /= nz;
                }
                dirs.push(z);
            }
        }
    }
    // differences of normalized points are null directions with t = 0
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let mut z: Vec<f64> = (0..n).map(|k| points[i][k] - points[j][k]).collect();
            let nz = norm2(&z);
            if nz > 1e-9 {
                for zi in &mut z {
                    *zi /= nz;
                }
                dirs.push(z);
            }
        }
    }

    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for p in &points {
        candidates.push(p.clone());
        for z in &dirs {
            candidates.extend(constraint_roots(p, z, constraint, mu, kind));
        }
    }

    let mut verified: Vec<Vec<f64>> = Vec::new();
    for x in candidates {
        if !vanishes(f1, f2, lambda, &x, tols) {
            continue;
        }
        if !constraint_ok(&x, constraint, mu, kind, tols) {
            continue;
        }
        let x = canonicalize(x, &dirs, f1, f2, lambda, constraint, mu, kind, tols);
        verified.push(x);
    }
    let mut out = dedup_points(verified, 1e-6);
    out.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(out)
}

/// Roots of the scalar quadratic putting `p + s z` on the active
/// constraint level.
fn constraint_roots(
    p: &[f64],
    z: &[f64],
    constraint: Option<&QuadraticForm>,
    mu: Option<f64>,
    kind: ConstraintKind,
) -> Vec<Vec<f64>> {
    let con = match (constraint, kind) {
        (Some(c), ConstraintKind::Equality) => c,
        (Some(c), ConstraintKind::Inequality) => {
            // with an inactive multiplier the point itself suffices unless
            // infeasible, in which case walk to the boundary g = 0
            if mu.map_or(true, |m| m.abs() <= 1e-7) && c.evaluate(p) <= 0.0 {
                return Vec::new();
            }
            c
        }
        _ => return Vec::new(),
    };
    let a = con.a.quad(z);
    let bp = con.a.mul_vec(p);
    let bb: f64 = (0..p.len()).map(|i| z[i] * (bp[i] + con.b[i])).sum();
    let cc = con.evaluate(p);
    let eps = 1e-12 * (1.0 + a.abs() + bb.abs() + cc.abs());

    let roots: Vec<f64> = if a.abs() <= eps {
        if bb.abs() <= eps {
            Vec::new()
        } else {
            vec![-cc / (2.0 * bb)]
        }
    } else {
        let disc = bb * bb - a * cc;
        if disc < 0.0 {
            Vec::new()
        } else {
            let sq = disc.sqrt();
            vec![(-bb + sq) / a, (-bb - sq) / a]
        }
    };
    roots
        .into_iter()
        .filter(|s| s.is_finite())
        .map(|s| (0..p.len()).map(|i| p[i] + s * z[i]).collect())
        .collect()
}

fn constraint_ok(
    x: &[f64],
    constraint: Option<&QuadraticForm>,
    mu: Option<f64>,
    kind: ConstraintKind,
    tols: &Tolerances,
) -> bool {
    let con = match constraint {
        Some(c) => c,
        None => return true,
    };
    let val = con.evaluate(x);
    let scale = tols.feas_abs(con.a.norm_fro() + norm2(&con.b) + con.c.abs()) * 100.0;
    match kind {
        ConstraintKind::Equality => val.abs() <= scale,
        ConstraintKind::Inequality => {
            let feasible = val <= scale;
            let complementary = mu.map_or(true, |m| (m * val).abs() <= scale * (1.0 + m.abs()));
            feasible && complementary
        }
        ConstraintKind::None => true,
    }
}

/// Project a verified point to least norm along null directions that keep
/// both the pencil value and the constraint invariant, so solution sets
/// with free coordinates get a canonical representative.
#[allow(clippy::too_many_arguments)]
fn canonicalize(
    mut x: Vec<f64>,
    dirs: &[Vec<f64>],
    f1: &QuadraticForm,
    f2: &QuadraticForm,
    lambda: f64,
    constraint: Option<&QuadraticForm>,
    mu: Option<f64>,
    kind: ConstraintKind,
    tols: &Tolerances,
) -> Vec<f64> {
    for z in dirs {
        let invariant = match (constraint, kind) {
            (Some(con), ConstraintKind::Equality | ConstraintKind::Inequality) => {
                let a = con.a.quad(z);
                let bp = con.a.mul_vec(&x);
                let bb: f64 = (0..x.len()).map(|i| z[i] * (bp[i] + con.b[i])).sum();
                a.abs() <= 1e-9 && bb.abs() <= 1e-9
            }
            _ => true,
        };
        if !invariant {
            continue;
        }
        let proj = dot(&x, z);
        if proj.abs() <= 1e-12 {
            continue;
        }
        let trial: Vec<f64> = (0..x.len()).map(|i| x[i] - proj * z[i]).collect();
        if vanishes(f1, f2, lambda, &trial, tols) && constraint_ok(&trial, constraint, mu, kind, tols)
        {
            x = trial;
        }
    }
    x
}

fn dedup_points(points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let dup = out.iter().any(|q| {
            let d: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            d.sqrt() <= tol * (1.0 + norm2(q))
        });
        if !dup {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn diag(d: &[f64]) -> SymMatrix {
        SymMatrix::from_diag(d)
    }

    fn qf(a: SymMatrix, b: Vec<f64>, c: f64) -> QuadraticForm {
        QuadraticForm::new(a, b, c)
    }

    fn contains_point(sols: &[Vec<f64>], target: &[f64], tol: f64) -> bool {
        sols.iter().any(|s| {
            s.iter()
                .zip(target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                <= tol
        })
    }

    #[test]
    fn unconstrained_simple_ratio() {
        // (x^2+1)/(x^2+2): infimum 1/2 at the origin; cross-checked by a
        // dense 1-D scan in the acceptance suite
        let f1 = qf(diag(&[1.0]), vec![0.0], 1.0);
        let f2 = qf(diag(&[1.0]), vec![0.0], 2.0);
        let rep = solve_unconstrained(&f1, &f2, &tols());
        assert!((rep.lambda() - 0.5).abs() <= 1e-7);
        assert_eq!(rep.attainment, Attainment::Attained);
        assert!(contains_point(&rep.solutions, &[0.0], 1e-6));
        assert_eq!(rep.certified, Certified::Exact);
    }

    #[test]
    fn unconstrained_identical_ratio() {
        let f = qf(diag(&[1.0]), vec![0.0], 1.0);
        let rep = solve_unconstrained(&f, &f, &tols());
        assert!((rep.lambda() - 1.0).abs() <= 1e-7);
        assert_eq!(rep.attainment, Attainment::Attained);
        assert_eq!(rep.solutions.len(), 1);
    }

    #[test]
    fn unconstrained_linear_over_quadratic() {
        // 2x/(x^2+1): infimum -1 at x = -1
        let f1 = qf(diag(&[0.0]), vec![1.0], 0.0);
        let f2 = qf(diag(&[1.0]), vec![0.0], 1.0);
        let rep = solve_unconstrained(&f1, &f2, &tols());
        assert!((rep.lambda() + 1.0).abs() <= 1e-7, "lambda = {}", rep.lambda());
        assert_eq!(rep.attainment, Attainment::Attained);
        assert!(contains_point(&rep.solutions, &[-1.0], 1e-6));
    }

    #[test]
    fn unconstrained_gap_is_unattained() {
        // (x^2+2)/(x^2+1) -> 1 at infinity, never attained
        let f1 = qf(diag(&[1.0]), vec![0.0], 2.0);
        let f2 = qf(diag(&[1.0]), vec![0.0], 1.0);
        let rep = solve_unconstrained(&f1, &f2, &tols());
        assert!((rep.lambda() - 1.0).abs() <= 1e-7);
        assert_eq!(rep.attainment, Attainment::Unattained);
        assert!(rep.solutions.is_empty());
    }

    fn two_sided_example() -> FractionalProblem {
        // f1 = x1^2 + x3^2 + 2x3, f2 = x2^2 + 1, 0 <= x3^2 + 2x3 <= 3
        FractionalProblem::new(
            qf(diag(&[1.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0),
            qf(diag(&[0.0, 1.0, 0.0]), vec![0.0; 3], 1.0),
            Some(qf(diag(&[0.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0)),
            Finite(0.0),
            Finite(3.0),
        )
        .unwrap()
    }

    #[test]
    fn equality_lower_boundary_of_two_sided_example() {
        let p = two_sided_example();
        let eq = EqualityProblem::from_level(&p.f1, &p.f2, p.g.as_ref().unwrap(), 0.0, &tols())
            .unwrap();
        let rep = solve_equality(&eq, &tols());
        assert!(rep.lambda().abs() <= 1e-7, "lambda = {}", rep.lambda());
        assert_eq!(rep.attainment, Attainment::Attained);
        assert_eq!(rep.certified, Certified::Exact);
        assert!(contains_point(&rep.solutions, &[0.0, 0.0, 0.0], 1e-6));
        assert!(contains_point(&rep.solutions, &[0.0, 0.0, -2.0], 1e-6));
    }

    #[test]
    fn equality_indefinite_constraint_value_one() {
        // (x1^2+x3^2+2)/(x1^2+x3^2+1) on x1^2-x2^2+2x1+2x2 = 0: value 1,
        // approached as x3 runs off along the constraint, never attained
        let f1 = qf(diag(&[1.0, 0.0, 1.0]), vec![0.0; 3], 2.0);
        let f2 = qf(diag(&[1.0, 0.0, 1.0]), vec![0.0; 3], 1.0);
        let h = qf(diag(&[1.0, -1.0, 0.0]), vec![1.0, 1.0, 0.0], 0.0);
        let eq = EqualityProblem::new(f1, f2, h, &tols()).unwrap();
        let rep = solve_equality(&eq, &tols());
        assert!((rep.lambda() - 1.0).abs() <= 1e-7, "lambda = {}", rep.lambda());
        assert_eq!(rep.certified, Certified::Exact);
        let b = rep.diagnostics.iter().find(|c| c.name == "assumption_b").unwrap();
        assert_eq!(b.verdict, Verdict::Holds);
        assert_eq!(rep.attainment, Attainment::Unattained);
    }

    #[test]
    fn equality_circle_attained_at_origin() {
        // (x1^2+x2^2+1)/1 on the circle through the origin centered (-1,0)
        let f1 = qf(diag(&[1.0, 1.0]), vec![0.0; 2], 1.0);
        let f2 = QuadraticForm::constant(2, 1.0);
        let h = qf(diag(&[1.0, 1.0]), vec![1.0, 0.0], 0.0);
        let eq = EqualityProblem::new(f1, f2, h, &tols()).unwrap();
        let rep = solve_equality(&eq, &tols());
        assert!((rep.lambda() - 1.0).abs() <= 1e-7, "lambda = {}", rep.lambda());
        assert_eq!(rep.attainment, Attainment::Attained);
        assert!(contains_point(&rep.solutions, &[0.0, 0.0], 1e-6));
    }

    #[test]
    fn one_sided_unattained_example() {
        // (x1^2+1)/(x2^2+1), x1^2 + 2x3 - 1 <= 0: value 0 with f(0) = 1
        let f1 = qf(diag(&[1.0, 0.0, 0.0]), vec![0.0; 3], 1.0);
        let f2 = qf(diag(&[0.0, 1.0, 0.0]), vec![0.0; 3], 1.0);
        let g = qf(diag(&[1.0, 0.0, 0.0]), vec![0.0, 0.0, 1.0], -1.0);
        let rep = solve_one_sided(&f1, &f2, &g, &tols()).unwrap();
        assert!(rep.lambda().abs() <= 1e-7);
        assert_eq!(rep.attainment, Attainment::Unattained);
        let f = rep.trace.f_at_lambda_star.unwrap();
        assert!((f - 1.0).abs() <= 1e-6, "f(0) = {f}");
        let (lo, hi) = rep.trace.eta_interval.unwrap();
        assert!(lo.abs() <= 1e-6 && hi.abs() <= 1e-6);
    }

    #[test]
    fn one_sided_attained_at_origin() {
        let f1 = qf(diag(&[1.0]), vec![0.0], 0.0);
        let f2 = qf(diag(&[1.0]), vec![0.0], 1.0);
        let g = qf(diag(&[1.0]), vec![0.0], -1.0);
        let rep = solve_one_sided(&f1, &f2, &g, &tols()).unwrap();
        assert!(rep.lambda().abs() <= 1e-7);
        assert_eq!(rep.attainment, Attainment::Attained);
        assert!(contains_point(&rep.solutions, &[0.0], 1e-6));
    }

    #[test]
    fn one_sided_no_slater_reduces() {
        // g = x1^2 >= 0 always: feasible set is the x2 axis
        let f1 = qf(diag(&[0.0, 1.0]), vec![0.0; 2], 1.0);
        let f2 = qf(diag(&[0.0, 1.0]), vec![0.0; 2], 2.0);
        let g = qf(diag(&[1.0, 0.0]), vec![0.0; 2], 0.0);
        let rep = solve_one_sided(&f1, &f2, &g, &tols()).unwrap();
        assert!((rep.lambda() - 0.5).abs() <= 1e-7, "lambda = {}", rep.lambda());
        assert_eq!(rep.attainment, Attainment::Attained);
        assert!(contains_point(&rep.solutions, &[0.0, 0.0], 1e-6));
    }

    #[test]
    fn one_sided_infeasible() {
        let f1 = qf(diag(&[1.0]), vec![0.0], 0.0);
        let f2 = qf(diag(&[1.0]), vec![0.0], 1.0);
        let g = qf(diag(&[1.0]), vec![0.0], 1.0); // x^2 + 1 <= 0
        assert!(matches!(
            solve_one_sided(&f1, &f2, &g, &tols()),
            Err(SolveError::Infeasible(_))
        ));
    }

    #[test]
    fn full_two_sided_example() {
        let p = two_sided_example();
        let rep = solve(&p, &tols()).unwrap();
        assert!(rep.lambda().abs() <= 1e-7, "lambda = {}", rep.lambda());
        assert_eq!(rep.case, CaseTag::LowerBoundaryCase2);
        assert_eq!(rep.attainment, Attainment::Attained);
        assert!(contains_point(&rep.solutions, &[0.0, 0.0, 0.0], 1e-6));
        assert!(contains_point(&rep.solutions, &[0.0, 0.0, -2.0], 1e-6));
        let tr = &rep.trace;
        assert!((tr.case1_lambda.unwrap() + 1.0).abs() <= 1e-6);
        assert!(tr.lower.as_ref().unwrap().lambda.as_f64().abs() <= 1e-6);
        assert!(tr.upper.as_ref().unwrap().lambda.as_f64().abs() <= 1e-6);
        assert!(tr.lower.as_ref().unwrap().f_value.unwrap().abs() <= 1e-6);
        assert!((tr.upper.as_ref().unwrap().f_value.unwrap() - 3.0).abs() <= 1e-6);
        assert_eq!(rep.certified, Certified::Exact);
    }

    #[test]
    fn full_interior_case_example() {
        // 2x2/(x2^2+1) over 0 <= x2^2 + 2x1 <= 2: interior optimum -1 on
        // the segment x2 = -1, -1/2 <= x1 <= 1/2
        let p = FractionalProblem::new(
            qf(diag(&[0.0, 0.0]), vec![0.0, 1.0], 0.0),
            qf(diag(&[0.0, 1.0]), vec![0.0; 2], 1.0),
            Some(qf(diag(&[0.0, 1.0]), vec![1.0, 0.0], 0.0)),
            Finite(0.0),
            Finite(2.0),
        )
        .unwrap();
        let rep = solve(&p, &tols()).unwrap();
        assert!((rep.lambda() + 1.0).abs() <= 1e-7, "lambda = {}", rep.lambda());
        assert_eq!(rep.case, CaseTag::InteriorCase1);
        assert_eq!(rep.attainment, Attainment::Attained);
        assert_eq!(rep.certified, Certified::Exact);
        for s in &rep.solutions {
            assert!((s[1] + 1.0).abs() <= 1e-6, "x2 = {}", s[1]);
            let gval = s[1] * s[1] + 2.0 * s[0];
            assert!((-1e-6..=2.0 + 1e-6).contains(&gval), "g = {gval}");
        }
    }

    #[test]
    fn full_unbounded_below() {
        // -x2^2 over a strip in x1 only: x2 free, unbounded
        let p = FractionalProblem::new(
            qf(diag(&[0.0, -1.0]), vec![0.0; 2], 0.0),
            QuadraticForm::constant(2, 1.0),
            Some(qf(diag(&[0.0, 0.0]), vec![1.0, 0.0], 0.0)),
            Finite(0.0),
            Finite(2.0),
        )
        .unwrap();
        let rep = solve(&p, &tols()).unwrap();
        assert_eq!(rep.lambda_star, NegInf);
        assert_eq!(rep.attainment, Attainment::UnboundedBelow);
    }

    #[test]
    fn full_infeasible_band() {
        let p = FractionalProblem::new(
            qf(diag(&[1.0]), vec![0.0], 0.0),
            QuadraticForm::constant(1, 1.0),
            Some(qf(diag(&[-1.0]), vec![0.0], 0.0)), // g = -x^2 <= 0
            Finite(1.0),
            Finite(2.0),
        )
        .unwrap();
        assert!(matches!(solve(&p, &tols()), Err(SolveError::Infeasible(_))));
    }

    #[test]
    fn full_unconstrained_when_band_vacuous() {
        // g = -x^2 never exceeds v = 0: both sides vacuous
        let p = FractionalProblem::new(
            qf(diag(&[1.0]), vec![0.0], 1.0),
            qf(diag(&[1.0]), vec![0.0], 2.0),
            Some(qf(diag(&[-1.0]), vec![0.0], 0.0)),
            NegInf,
            Finite(0.0),
        )
        .unwrap();
        let rep = solve(&p, &tols()).unwrap();
        assert_eq!(rep.case, CaseTag::Unconstrained);
        assert!((rep.lambda() - 0.5).abs() <= 1e-7);
    }

    #[test]
    fn recovery_rejects_non_psd_pencil() {
        let f1 = qf(diag(&[-1.0]), vec![0.0], 0.0);
        let f2 = QuadraticForm::constant(1, 1.0);
        let r = recover_solution(0.0, None, &f1, &f2, None, ConstraintKind::None, &tols());
        assert!(matches!(r, Err(SolveError::PencilNotPsd(_))));
    }

    #[test]
    fn recovery_empty_when_unattained() {
        // one-sided example at its optimum: value gap 1, nothing to recover
        let f1 = qf(diag(&[1.0, 0.0, 0.0]), vec![0.0; 3], 1.0);
        let f2 = qf(diag(&[0.0, 1.0, 0.0]), vec![0.0; 3], 1.0);
        let g = qf(diag(&[1.0, 0.0, 0.0]), vec![0.0, 0.0, 1.0], -1.0);
        let sols =
            recover_solution(0.0, Some(0.0), &f1, &f2, Some(&g), ConstraintKind::Inequality, &tols())
                .unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn scale_covariance_of_the_value() {
        let p = two_sided_example();
        let rep = solve(&p, &tols()).unwrap();
        let mut p3 = p.clone();
        p3.f1 = p3.f1.scaled(3.0);
        let rep3 = solve(&p3, &tols()).unwrap();
        assert!((rep3.lambda() - 3.0 * rep.lambda()).abs() <= 1e-6);

        let mut pb = p.clone();
        pb.f1 = pb.f1.scaled(2.0);
        pb.f2 = pb.f2.scaled(2.0);
        let repb = solve(&pb, &tols()).unwrap();
        assert!((repb.lambda() - rep.lambda()).abs() <= 1e-6);
    }
}

//! Feasibility engine for affine symmetric pencils in one or two scalars.
//!
//! Every semidefinite program this crate poses has the same shape:
//!
//! ```text
//!     sup { lambda :  M0 + lambda*M1 + mu*M2  >= 0  for some mu }
//! ```
//!
//! with `mu` ranging over the reals, the nonnegatives, or absent. The
//! feasible `(lambda, mu)` region is convex, so its projection onto the
//! `lambda` axis is an interval and `mu -> min_eig(pencil)` is concave.
//! That structure is all the engine uses: golden-section search maximizes
//! the inner eigenvalue, and bisection finds the right endpoint of the
//! feasible interval. No external SDP solver, no matrix variables.
//!
//! The value `sup_lambda` returns is always a sound lower bound on the
//! fractional optimum it models — pencil feasibility certifies
//! `f1 - lambda*f2 + mu*h >= 0` pointwise — independent of any constraint
//! qualification. Tightness is a separate question handled by the
//! checkers and reflected in the solver's certification flag.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::SymMatrix;
use crate::model::{ExtendedReal, Finite, NegInf, PosInf};
use crate::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LmiError {
    #[error("inner scalar arity mismatch: {0}")]
    MuArity(&'static str),
}

/// Domain of the inner scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MuDomain {
    Absent,
    Free,
    NonNegative,
}

/// `M0 + lambda*M1 + mu*M2`, with `M2` present iff the domain says so.
#[derive(Debug, Clone)]
pub struct AffinePencil {
    m0: SymMatrix,
    m1: SymMatrix,
    m2: Option<SymMatrix>,
    mu_domain: MuDomain,
    norm0: f64,
    norm1: f64,
    norm2: f64,
}

/// How a scalar-supremum run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LmiStatus {
    /// Converged; the certificate at `lambda_star` has a finite inner scalar.
    Attained,
    /// Iteration cap hit before the width target; the value is a valid
    /// feasible point but not certified to tolerance.
    SupOnly,
    /// No feasible scalar anywhere in the search box.
    Infeasible,
    /// The top of the search box is feasible.
    UnboundedAbove,
    /// The certificate at the returned value sits on the inner-scalar cap:
    /// the supremum is approached only as `mu` escapes to infinity.
    MuEscaped,
}

/// Result of `sup_lambda`/`sup_nu`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LmiSolution {
    pub lambda_star: ExtendedReal,
    pub mu_star: Option<f64>,
    pub status: LmiStatus,
    /// Minimum eigenvalue of the pencil at the returned point.
    pub certificate_min_eig: f64,
}

impl LmiSolution {
    pub fn lambda(&self) -> f64 {
        self.lambda_star.as_f64()
    }
}

/// Inner maximization result at a fixed outer scalar.
#[derive(Debug, Clone, Copy)]
pub struct InnerMax {
    pub mu_best: Option<f64>,
    pub value: f64,
    pub escaped: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a concave function on `[a, b]`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    if b <= a {
        return (a, f(a));
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0usize;
    while b - a > xtol && iters < 300 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    let xm = 0.5 * (a + b);
    (xm, f(xm))
}

impl AffinePencil {
    /// Pencil without an inner scalar: `M0 + lambda*M1`.
    pub fn new(m0: SymMatrix, m1: SymMatrix) -> Self {
        assert_eq!(m0.dim(), m1.dim(), "AffinePencil: block dimensions differ");
        let (norm0, norm1) = (m0.norm_fro(), m1.norm_fro());
        AffinePencil { m0, m1, m2: None, mu_domain: MuDomain::Absent, norm0, norm1, norm2: 0.0 }
    }

    /// Pencil with an inner scalar over the given domain.
    pub fn with_mu(m0: SymMatrix, m1: SymMatrix, m2: SymMatrix, domain: MuDomain) -> Self {
        assert_eq!(m0.dim(), m1.dim(), "AffinePencil: block dimensions differ");
        assert_eq!(m0.dim(), m2.dim(), "AffinePencil: block dimensions differ");
        assert!(domain != MuDomain::Absent, "AffinePencil: use new() when mu is absent");
        let (norm0, norm1, norm2) = (m0.norm_fro(), m1.norm_fro(), m2.norm_fro());
        AffinePencil { m0, m1, m2: Some(m2), mu_domain: domain, norm0, norm1, norm2 }
    }

    pub fn mu_domain(&self) -> MuDomain {
        self.mu_domain
    }

    pub fn dim(&self) -> usize {
        self.m0.dim()
    }

    /// Assemble the pencil at a point.
    pub fn assemble(&self, lambda: f64, mu: f64) -> SymMatrix {
        let mut m = self.m0.add_scaled(&self.m1, lambda);
        if let Some(m2) = &self.m2 {
            m = m.add_scaled(m2, mu);
        }
        m
    }

    fn eval(&self, lambda: f64, mu: f64) -> f64 {
        self.assemble(lambda, mu).min_eig()
    }

    /// Norm of the assembled pencil at a point (triangle-inequality bound).
    pub fn norm_at(&self, lambda: f64, mu: f64) -> f64 {
        self.norm0 + lambda.abs() * self.norm1 + mu.abs() * self.norm2
    }

    /// Minimum eigenvalue of the pencil at `(lambda, mu)`; the inner
    /// scalar must be supplied exactly when the pencil declares one.
    pub fn pencil_value(&self, lambda: f64, mu: Option<f64>) -> Result<f64, LmiError> {
        match (self.mu_domain, mu) {
            (MuDomain::Absent, None) => Ok(self.eval(lambda, 0.0)),
            (MuDomain::Absent, Some(_)) => {
                Err(LmiError::MuArity("mu supplied but the pencil has no inner scalar"))
            }
            (_, Some(m)) => Ok(self.eval(lambda, m)),
            (_, None) => Err(LmiError::MuArity("pencil declares an inner scalar; mu required")),
        }
    }

    fn mu_bounds(&self, tols: &Tolerances) -> (f64, f64) {
        match self.mu_domain {
            MuDomain::Absent => (0.0, 0.0),
            MuDomain::Free => (-tols.mu_cap, tols.mu_cap),
            MuDomain::NonNegative => (0.0, tols.mu_cap),
        }
    }

    /// Maximize `mu -> min_eig(pencil(lambda, mu))` over the domain,
    /// capped at `mu_cap`. `escaped` reports a maximizer pinned to the
    /// artificial cap — the hard case where no finite certificate exists.
    pub fn max_inner(&self, lambda: f64, tols: &Tolerances) -> InnerMax {
        if self.m2.is_none() {
            return InnerMax { mu_best: None, value: self.eval(lambda, 0.0), escaped: false };
        }
        let (lo, hi) = self.mu_bounds(tols);
        let f = |mu: f64| self.eval(lambda, mu);
        let (mu, value) = golden_max(&f, lo, hi, tols.mu);
        let edge = 1.0f64.max(1e-6 * (hi - lo));
        let escaped = (hi - mu) <= edge
            || (self.mu_domain == MuDomain::Free && (mu - lo) <= edge);
        InnerMax { mu_best: Some(mu), value, escaped }
    }

    /// Slack for the PSD test: the design tolerance scales with the base
    /// block only, while the scalar contributions enter through a small
    /// noise floor. Scaling the full tolerance by `|mu|` would let a
    /// capped multiplier (1e8) swallow order-one infeasibility.
    /// Exact obstruction to feasibility anywhere: a direction `z` in the
    /// joint kernel of the varying blocks on which the fixed block is
    /// negative, or zero with a nonzero image (a PSD matrix must kill the
    /// whole row wherever the quadratic vanishes). Such pencils are
    /// infeasible for every scalar pair, yet their minimum eigenvalue can
    /// creep up to zero as the scalars run off — which no tolerance-based
    /// search can distinguish from genuine feasibility. Returns the
    /// violating value when an obstruction exists.
    ///
    /// The decision threshold sits one order above the feasibility slack:
    /// fixed blocks often carry a bisection result whose slack-sized bias
    /// must not read as an obstruction.
    fn structural_obstruction(&self, tols: &Tolerances) -> Option<f64> {
        let mut s = self.m1.squared();
        if let Some(m2) = &self.m2 {
            s = s.add_scaled(&m2.squared(), 1.0);
        }
        let kernel = s.null_basis();
        if kernel.cols() == 0 {
            return None;
        }
        let k = kernel.cols();
        // fixed block restricted to the kernel
        let images: Vec<Vec<f64>> = (0..k).map(|j| self.m0.mul_vec(kernel.col(j))).collect();
        let mut b0 = SymMatrix::zeros(k);
        for i in 0..k {
            for j in i..k {
                b0.set(i, j, crate::linalg::dot(kernel.col(i), &images[j]));
            }
        }
        let thr = 10.0 * tols.psd * (1.0 + self.norm0);
        let e = b0.eigen();
        if e.eigenvalues[0] < -thr {
            return Some(e.eigenvalues[0]);
        }
        // zero-value directions must also have zero image under M0
        for (idx, lam) in e.eigenvalues.iter().enumerate() {
            if lam.abs() > thr {
                continue;
            }
            let w = e.eigenvectors.col(idx);
            let mut img = vec![0.0; self.m0.dim()];
            for j in 0..k {
                for (i, v) in images[j].iter().enumerate() {
                    img[i] += w[j] * v;
                }
            }
            let nrm = crate::linalg::norm2(&img);
            if nrm > thr {
                return Some(-nrm);
            }
        }
        None
    }

    fn psd_slack(&self, lambda: f64, mu: Option<f64>, tols: &Tolerances) -> f64 {
        let mu = mu.unwrap_or(0.0);
        tols.psd * (1.0 + self.norm0)
            + 1e-14 * (lambda.abs() * self.norm1 + mu.abs() * self.norm2)
    }

    fn feasible_at(&self, lambda: f64, tols: &Tolerances) -> (bool, InnerMax) {
        let im = self.max_inner(lambda, tols);
        (im.value >= -self.psd_slack(lambda, im.mu_best, tols), im)
    }

    /// Supremum of the feasible `lambda` interval.
    ///
    /// `hint` should upper-bound the answer (any feasible objective ratio
    /// does); the search walks down from it by doubling steps to find a
    /// feasible point, up to find an infeasible one, then bisects. When
    /// the doubling pattern straddles a short feasible interval without
    /// landing in it, a concave maximization of the inner value over
    /// `lambda` is used as a last resort before declaring infeasibility.
    pub fn sup_lambda(&self, hint: Option<f64>, tols: &Tolerances) -> LmiSolution {
        if let Some(viol) = self.structural_obstruction(tols) {
            return LmiSolution {
                lambda_star: NegInf,
                mu_star: None,
                status: LmiStatus::Infeasible,
                certificate_min_eig: viol,
            };
        }
        let cap = tols.lambda_cap;
        let start = hint.unwrap_or(0.0).clamp(-cap, cap);

        let mut lo;
        let mut lo_im;
        let mut hi;

        let (ok, im) = self.feasible_at(start, tols);
        if ok {
            lo = start;
            lo_im = im;
            hi = f64::NAN; // found by the upward walk below
        } else {
            hi = start;
            let mut found = None;
            let mut step = 1.0;
            while hi > -cap {
                let x = (hi - step).max(-cap);
                let (ok, im) = self.feasible_at(x, tols);
                if ok {
                    found = Some((x, im));
                    break;
                }
                hi = x;
                step *= 2.0;
            }
            if found.is_none() {
                // upward sweep, in case the interval lies above the hint
                let mut x = start;
                let mut step = 1.0;
                while x < cap {
                    x = (x + step).min(cap);
                    let (ok, im) = self.feasible_at(x, tols);
                    if ok {
                        found = Some((x, im));
                        hi = f64::NAN;
                        break;
                    }
                    step *= 2.0;
                }
            }
            if found.is_none() {
                // the interval may be shorter than the probe spacing:
                // lambda -> max_inner value is concave, maximize it
                let f = |l: f64| self.max_inner(l, tols).value;
                let (l_best, _) = golden_max(&f, -cap, cap, tols.lambda);
                let (ok, im) = self.feasible_at(l_best, tols);
                if ok {
                    found = Some((l_best, im));
                    hi = f64::NAN;
                }
            }
            match found {
                Some((x, im)) => {
                    lo = x;
                    lo_im = im;
                }
                None => {
                    return LmiSolution {
                        lambda_star: NegInf,
                        mu_star: None,
                        status: LmiStatus::Infeasible,
                        certificate_min_eig: im.value,
                    };
                }
            }
        }

        if hi.is_nan() {
            // walk up from the feasible point until infeasible or capped
            let mut step = 1.0;
            loop {
                let x = (lo + step).min(cap);
                let (ok, im) = self.feasible_at(x, tols);
                if ok {
                    lo = x;
                    lo_im = im;
                    if x >= cap {
                        return LmiSolution {
                            lambda_star: PosInf,
                            mu_star: im.mu_best,
                            status: LmiStatus::UnboundedAbove,
                            certificate_min_eig: im.value,
                        };
                    }
                    step *= 2.0;
                } else {
                    hi = x;
                    break;
                }
            }
        }

        let mut converged = false;
        for _ in 0..tols.max_bisect {
            if hi - lo <= tols.lambda * (1.0 + lo.abs()) {
                converged = true;
                break;
            }
            let mid = 0.5 * (lo + hi);
            let (ok, im) = self.feasible_at(mid, tols);
            if ok {
                lo = mid;
                lo_im = im;
            } else {
                hi = mid;
            }
        }

        let status = if !converged {
            LmiStatus::SupOnly
        } else if lo_im.escaped {
            LmiStatus::MuEscaped
        } else {
            LmiStatus::Attained
        };
        LmiSolution {
            lambda_star: Finite(lo),
            mu_star: lo_im.mu_best,
            status,
            certificate_min_eig: lo_im.value,
        }
    }

    /// Feasible interval of the inner scalar at a fixed outer scalar and
    /// explicit absolute slack, or `None` when the slice is empty.
    ///
    /// This is the uniqueness probe: callers pass a slack much tighter
    /// than the bisection tolerance (the eigensolver resolves down to
    /// ~1e-15 of the norm) and a `lambda` strictly inside the feasible
    /// interval, so that a pinned certificate shows up as a near-zero
    /// width instead of being smeared by the PSD test slack.
    pub fn mu_interval(&self, lambda: f64, slack: f64, tols: &Tolerances) -> Option<(f64, f64)> {
        self.m2.as_ref()?;
        let (lo_dom, hi_dom) = self.mu_bounds(tols);
        let (mu0, v0) = golden_max(&|mu| self.eval(lambda, mu), lo_dom, hi_dom, tols.mu);
        if v0 < -slack {
            return None;
        }
        let feas = |mu: f64| self.eval(lambda, mu) >= -slack;
        let edge = |mut inside: f64, mut outside: f64| -> f64 {
            for _ in 0..200 {
                if (outside - inside).abs() <= tols.mu * (1.0 + inside.abs()) {
                    break;
                }
                let mid = 0.5 * (inside + outside);
                if feas(mid) {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            inside
        };
        let hi = if feas(hi_dom) { hi_dom } else { edge(mu0, hi_dom) };
        let lo = if feas(lo_dom) { lo_dom } else { edge(mu0, lo_dom) };
        Some((lo, hi))
    }
}

/// `sup { nu : M_fixed - nu*I_nn + mu*M2 >= 0 }` — the subproblem value
/// `f(lambda)` read off the dual: the objective scalar enters only the
/// bottom-right entry of the bordered pencil.
pub fn sup_nu(
    m_fixed: SymMatrix,
    m2: Option<SymMatrix>,
    domain: MuDomain,
    hint: Option<f64>,
    tols: &Tolerances,
) -> LmiSolution {
    let n1 = m_fixed.dim();
    let mut inn = SymMatrix::zeros(n1);
    inn.set(n1 - 1, n1 - 1, -1.0);
    let pencil = match m2 {
        Some(m2) => AffinePencil::with_mu(m_fixed, inn, m2, domain),
        None => AffinePencil::new(m_fixed, inn),
    };
    pencil.sup_lambda(hint, tols)
}

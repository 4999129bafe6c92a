//! Quadratic-form algebra.
//!
//! The whole method manipulates one object: a quadratic function
//!
//! ```text
//!     q(x) = x'Ax + 2 b'x + c
//! ```
//!
//! Note the factor 2 on the linear term — the gradient is `2(Ax + b)` and
//! the homogenization below is exactly `[[A, b], [b', c]]`. Every
//! coefficient array in the crate and in the JSON formats follows this
//! convention; an off-by-two on `b` is the classic mistake when feeding
//! instances in from elsewhere.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

use crate::linalg::{dot, norm2, Mat, SymMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bounds violate u <= v: u = {u}, v = {v}")]
    BoundsOrder { u: f64, v: f64 },
}

/// A real number extended with the two infinities; total order consistent
/// with the reals. Serializes as a plain number, `"-inf"` or `"inf"`.
#[derive(Debug, Clone, Copy)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

pub use ExtendedReal::{Finite, NegInf, PosInf};

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Clamp to a float, mapping the infinities to IEEE infinities.
    pub fn as_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(v) => v,
            PosInf => f64::INFINITY,
        }
    }

    pub fn min(self, other: ExtendedReal) -> ExtendedReal {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v == f64::NEG_INFINITY {
            NegInf
        } else if v == f64::INFINITY {
            PosInf
        } else {
            Finite(v)
        }
    }
}

impl PartialEq for ExtendedReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            PosInf => write!(f, "inf"),
            Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(v) => s.serialize_f64(*v),
            NegInf => s.serialize_str("-inf"),
            PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Finite(v)),
            Raw::Tag(t) => match t.as_str() {
                "-inf" => Ok(NegInf),
                "inf" | "+inf" => Ok(PosInf),
                other => Err(D::Error::custom(format!("not an extended real: {other:?}"))),
            },
        }
    }
}

/// `q(x) = x'Ax + 2 b'x + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: SymMatrix,
    pub b: Vec<f64>,
    pub c: f64,
}

impl QuadraticForm {
    pub fn new(a: SymMatrix, b: Vec<f64>, c: f64) -> Self {
        assert_eq!(a.dim(), b.len(), "QuadraticForm: A and b dimensions differ");
        QuadraticForm { a, b, c }
    }

    /// The zero form in `n` variables.
    pub fn zero(n: usize) -> Self {
        QuadraticForm::new(SymMatrix::zeros(n), vec![0.0; n], 0.0)
    }

    /// The constant form `q(x) = c`.
    pub fn constant(n: usize, c: f64) -> Self {
        QuadraticForm::new(SymMatrix::zeros(n), vec![0.0; n], c)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "evaluate: dimension mismatch");
        self.a.quad(x) + 2.0 * dot(&self.b, x) + self.c
    }

    /// `2 (Ax + b)`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.a.mul_vec(x);
        for i in 0..g.len() {
            g[i] = 2.0 * (g[i] + self.b[i]);
        }
        g
    }

    /// Bordered `(n+1) x (n+1)` matrix `[[A, b], [b', c]]` satisfying
    /// `(x, 1)' M (x, 1) = q(x)`.
    pub fn homogenize(&self) -> SymMatrix {
        let n = self.dim();
        let mut m = SymMatrix::zeros(n + 1);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, self.a.get(i, j));
            }
            m.set(i, n, self.b[i]);
        }
        m.set(n, n, self.c);
        m
    }

    /// The form `x -> q(x + x0)`: same quadratic part, `b' = A x0 + b`,
    /// `c' = q(x0)`.
    pub fn shift(&self, x0: &[f64]) -> QuadraticForm {
        assert_eq!(x0.len(), self.dim(), "shift: dimension mismatch");
        let mut b = self.a.mul_vec(x0);
        for i in 0..b.len() {
            b[i] += self.b[i];
        }
        QuadraticForm::new(self.a.clone(), b, self.evaluate(x0))
    }

    pub fn negated(&self) -> QuadraticForm {
        QuadraticForm::new(
            self.a.scaled(-1.0),
            self.b.iter().map(|v| -v).collect(),
            -self.c,
        )
    }

    pub fn scaled(&self, t: f64) -> QuadraticForm {
        QuadraticForm::new(
            self.a.scaled(t),
            self.b.iter().map(|v| t * v).collect(),
            t * self.c,
        )
    }

    pub fn plus_constant(&self, t: f64) -> QuadraticForm {
        QuadraticForm::new(self.a.clone(), self.b.clone(), self.c + t)
    }

    /// Restrict to the affine subspace `x = x0 + W z`, producing the form
    /// in the reduced coordinates `z`.
    pub fn compose_affine(&self, x0: &[f64], w: &Mat) -> QuadraticForm {
        assert_eq!(x0.len(), self.dim(), "compose_affine: dimension mismatch");
        assert_eq!(w.rows(), self.dim(), "compose_affine: basis rows mismatch");
        let m = w.cols();
        let mut a = SymMatrix::zeros(m.max(1));
        // W'AW
        let aw: Vec<Vec<f64>> = (0..m).map(|j| self.a.mul_vec(w.col(j))).collect();
        for i in 0..m {
            for j in i..m {
                a.set(i, j, dot(w.col(i), &aw[j]));
            }
        }
        // W'(A x0 + b)
        let mut ax0b = self.a.mul_vec(x0);
        for i in 0..ax0b.len() {
            ax0b[i] += self.b[i];
        }
        let mut b = w.tr_mul_vec(&ax0b);
        if m == 0 {
            // degenerate zero-dimensional restriction; keep a 1x1 carrier
            b = vec![0.0];
        }
        QuadraticForm::new(a, b, self.evaluate(x0))
    }

    /// Infimum and supremum over all of space.
    ///
    /// The infimum is finite iff `A` is positive semidefinite and `b` lies
    /// in its range, in which case it is attained at `-A^+ b`; otherwise
    /// it is `-inf`. The supremum is the mirror statement through `-q`.
    pub fn inf_sup(&self) -> (ExtendedReal, ExtendedReal) {
        (self.inf_only(), self.negated().inf_only().map_neg())
    }

    fn inf_only(&self) -> ExtendedReal {
        let tol = self.a.rank_tol();
        let e = self.a.eigen();
        if e.eigenvalues[0] < -tol {
            return NegInf;
        }
        let neg_b: Vec<f64> = self.b.iter().map(|v| -v).collect();
        let sol = self.a.pinv_apply(&neg_b);
        if !sol.consistent {
            return NegInf;
        }
        Finite(self.evaluate(&sol.solution))
    }

    /// Unconstrained minimizer when the infimum is finite.
    pub fn minimizer(&self) -> Option<Vec<f64>> {
        let tol = self.a.rank_tol();
        if self.a.eigen().eigenvalues[0] < -tol {
            return None;
        }
        let neg_b: Vec<f64> = self.b.iter().map(|v| -v).collect();
        let sol = self.a.pinv_apply(&neg_b);
        sol.consistent.then_some(sol.solution)
    }

    /// A point on the level set `q(x) = level`, or `None` when the level
    /// lies outside `[inf q, sup q]`.
    ///
    /// Starting from an extremizer (or the origin when none exists), the
    /// search walks one eigen-direction of `A` — largest magnitude first —
    /// reducing the problem to a scalar quadratic; among the two roots the
    /// smaller-norm point is kept. Null directions with a linear slope
    /// serve as the fallback.
    pub fn find_level_point(&self, level: f64, feas_tol: f64) -> Option<Vec<f64>> {
        let tol = feas_tol * (1.0 + level.abs());
        let (lo, hi) = self.inf_sup();
        if let Finite(l) = lo {
            if level < l - tol {
                return None;
            }
        }
        if let Finite(h) = hi {
            if level > h + tol {
                return None;
            }
        }

        let x0 = if lo.is_finite() {
            self.minimizer().unwrap_or_else(|| vec![0.0; self.dim()])
        } else if hi.is_finite() {
            self.negated()
                .minimizer()
                .unwrap_or_else(|| vec![0.0; self.dim()])
        } else {
            vec![0.0; self.dim()]
        };
        let delta = level - self.evaluate(&x0);
        if delta.abs() <= tol {
            return Some(x0);
        }

        let e = self.a.eigen();
        let rank_tol = self.a.rank_tol();
        let mut grad_half = self.a.mul_vec(&x0);
        for i in 0..grad_half.len() {
            grad_half[i] += self.b[i];
        }

        let mut modes: Vec<usize> = (0..self.dim()).collect();
        modes.sort_by(|&i, &j| {
            e.eigenvalues[j]
                .abs()
                .total_cmp(&e.eigenvalues[i].abs())
                .then(i.cmp(&j))
        });

        for &k in &modes {
            let lam = e.eigenvalues[k];
            let vk = e.eigenvectors.col(k);
            let beta = dot(vk, &grad_half);
            let roots = if lam.abs() > rank_tol {
                // lam t^2 + 2 beta t - delta = 0
                let disc = beta * beta + lam * delta;
                if disc < 0.0 {
                    continue;
                }
                let sq = disc.sqrt();
                vec![(-beta + sq) / lam, (-beta - sq) / lam]
            } else if beta.abs() > rank_tol {
                vec![delta / (2.0 * beta)]
            } else {
                continue;
            };

            let mut best: Option<(f64, f64, Vec<f64>)> = None;
            for t in roots {
                if !t.is_finite() {
                    continue;
                }
                let mut x = x0.clone();
                for i in 0..x.len() {
                    x[i] += t * vk[i];
                }
                if (self.evaluate(&x) - level).abs() > tol {
                    continue;
                }
                let nrm = norm2(&x);
                let better = match &best {
                    None => true,
                    Some((bn, bt, _)) => {
                        nrm < *bn - 1e-14 || ((nrm - *bn).abs() <= 1e-14 && t < *bt)
                    }
                };
                if better {
                    best = Some((nrm, t, x));
                }
            }
            if let Some((_, _, x)) = best {
                return Some(x);
            }
        }
        None
    }
}

impl ExtendedReal {
    fn map_neg(self) -> ExtendedReal {
        match self {
            NegInf => PosInf,
            PosInf => NegInf,
            Finite(v) => Finite(-v),
        }
    }
}

/// A full instance: minimize `f1/f2` over `{ u <= g <= v }`. An absent
/// `g` (or two infinite bounds) makes the instance unconstrained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalProblem {
    pub f1: QuadraticForm,
    pub f2: QuadraticForm,
    pub g: Option<QuadraticForm>,
    pub u: ExtendedReal,
    pub v: ExtendedReal,
}

impl FractionalProblem {
    pub fn new(
        f1: QuadraticForm,
        f2: QuadraticForm,
        g: Option<QuadraticForm>,
        u: ExtendedReal,
        v: ExtendedReal,
    ) -> Result<Self, ModelError> {
        let n = f1.dim();
        if f2.dim() != n {
            return Err(ModelError::DimensionMismatch(format!(
                "f2 has dimension {}, expected {}",
                f2.dim(),
                n
            )));
        }
        if let Some(gq) = &g {
            if gq.dim() != n {
                return Err(ModelError::DimensionMismatch(format!(
                    "g has dimension {}, expected {}",
                    gq.dim(),
                    n
                )));
            }
        }
        if let (Finite(lu), Finite(lv)) = (u, v) {
            if lu > lv {
                return Err(ModelError::BoundsOrder { u: lu, v: lv });
            }
        }
        Ok(FractionalProblem { f1, f2, g, u, v })
    }

    pub fn unconstrained(f1: QuadraticForm, f2: QuadraticForm) -> Result<Self, ModelError> {
        FractionalProblem::new(f1, f2, None, NegInf, PosInf)
    }

    pub fn dim(&self) -> usize {
        self.f1.dim()
    }

    pub fn ratio_at(&self, x: &[f64]) -> f64 {
        self.f1.evaluate(x) / self.f2.evaluate(x)
    }

    /// Membership in `{ u <= g <= v }` within the given slack.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        match &self.g {
            None => true,
            Some(g) => {
                let gv = g.evaluate(x);
                let lo_ok = match self.u {
                    NegInf => true,
                    Finite(u) => gv >= u - tol,
                    PosInf => false,
                };
                let hi_ok = match self.v {
                    PosInf => true,
                    Finite(v) => gv <= v + tol,
                    NegInf => false,
                };
                lo_ok && hi_ok
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SymMatrix {
        SymMatrix::from_diag(d)
    }

    // f1 and f2 of the two-sided running example:
    // f1 = x1^2 + x3^2 + 2 x3, f2 = x2^2 + 1
    fn f1_ex32() -> QuadraticForm {
        QuadraticForm::new(diag(&[1.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0)
    }

    fn f2_ex32() -> QuadraticForm {
        QuadraticForm::new(diag(&[0.0, 1.0, 0.0]), vec![0.0; 3], 1.0)
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(f1_ex32().evaluate(&[0.0, 0.0, -1.0]), -1.0);
        assert_eq!(QuadraticForm::zero(3).evaluate(&[4.0, -1.0, 7.0]), 0.0);
        assert_eq!(f2_ex32().evaluate(&[0.0, 3.0, 0.0]), 10.0);
    }

    #[test]
    fn homogenize_blocks() {
        // h = x'Bx + 2d'x homogenizes to [[B, d], [d', 0]]
        let h = QuadraticForm::new(diag(&[0.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0);
        let m = h.homogenize();
        assert_eq!(m.dim(), 4);
        assert_eq!(m.get(2, 2), 1.0);
        assert_eq!(m.get(2, 3), 1.0);
        assert_eq!(m.get(3, 2), 1.0);
        assert_eq!(m.get(3, 3), 0.0);

        let konst = QuadraticForm::constant(2, 1.0);
        let m = konst.homogenize();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == 2 && j == 2 { 1.0 } else { 0.0 };
                assert_eq!(m.get(i, j), want);
            }
        }
    }

    #[test]
    fn homogenize_matches_evaluation() {
        let q = QuadraticForm::new(
            SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, -2.0]]),
            vec![0.3, -0.7],
            1.25,
        );
        let m = q.homogenize();
        for x in [[0.0, 0.0], [1.0, -2.0], [0.25, 3.0]] {
            let y = [x[0], x[1], 1.0];
            assert!((m.quad(&y) - q.evaluate(&x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn shift_boundary_form() {
        // h = x3^2 + 2 x3 - 3 shifted by (0,0,1) becomes x3^2 + 4 x3
        let h = QuadraticForm::new(diag(&[0.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], -3.0);
        let s = h.shift(&[0.0, 0.0, 1.0]);
        assert_eq!(s.a, diag(&[0.0, 0.0, 1.0]));
        assert_eq!(s.b, vec![0.0, 0.0, 2.0]);
        assert_eq!(s.c, 0.0);

        let id = f1_ex32().shift(&[0.0; 3]);
        assert_eq!(id, f1_ex32());
    }

    #[test]
    fn shift_is_pointwise_composition() {
        let q = QuadraticForm::new(
            SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 0.5]]),
            vec![1.0, 0.25],
            -0.5,
        );
        let x0 = [0.7, -1.3];
        let s = q.shift(&x0);
        for x in [[0.0, 0.0], [1.0, 1.0], [-2.0, 0.5]] {
            let moved = [x[0] + x0[0], x[1] + x0[1]];
            assert!((s.evaluate(&x) - q.evaluate(&moved)).abs() <= 1e-12);
        }
    }

    #[test]
    fn inf_sup_cases() {
        // g = x3^2 + 2x3: complete the square, min -1, sup +inf
        let g = QuadraticForm::new(diag(&[0.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0);
        let (lo, hi) = g.inf_sup();
        assert_eq!(lo, Finite(-1.0));
        assert_eq!(hi, PosInf);

        // unbounded linear direction
        let q = QuadraticForm::new(diag(&[1.0, 0.0, 0.0]), vec![0.0, 0.0, 1.0], -1.0);
        assert_eq!(q.inf_sup(), (NegInf, PosInf));

        // -x^2 + 5
        let q = QuadraticForm::new(diag(&[-1.0]), vec![0.0], 5.0);
        assert_eq!(q.inf_sup(), (NegInf, Finite(5.0)));
    }

    #[test]
    fn level_points() {
        let g = QuadraticForm::new(diag(&[0.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0);
        let x = g.find_level_point(3.0, 1e-8).expect("level 3 reachable");
        assert!((g.evaluate(&x) - 3.0).abs() <= 1e-8);
        // smaller-norm root: (0,0,1) rather than (0,0,-3)
        assert!((x[2] - 1.0).abs() <= 1e-9 && x[0] == 0.0 && x[1] == 0.0);

        let q = QuadraticForm::new(diag(&[1.0]), vec![0.0], 0.0);
        assert!(q.find_level_point(-1.0, 1e-8).is_none());

        let q = QuadraticForm::new(
            SymMatrix::from_rows(&[vec![1.0, 0.3], vec![0.3, -0.5]]),
            vec![0.2, -0.1],
            0.75,
        );
        let x = q.find_level_point(q.evaluate(&[0.0, 0.0]), 1e-8).unwrap();
        assert!((q.evaluate(&x) - 0.75).abs() <= 1e-8);
    }

    #[test]
    fn extended_real_order() {
        assert!(NegInf < Finite(-1e300));
        assert!(Finite(1e300) < PosInf);
        assert!(Finite(1.0) < Finite(2.0));
        assert_eq!(NegInf.min(Finite(0.0)), NegInf);
    }

    #[test]
    fn problem_validation() {
        let f1 = QuadraticForm::zero(2);
        let f2 = QuadraticForm::constant(2, 1.0);
        let err = FractionalProblem::new(f1.clone(), f2.clone(), None, Finite(5.0), Finite(1.0));
        assert!(matches!(err, Err(ModelError::BoundsOrder { .. })));
        let err = FractionalProblem::new(f1, QuadraticForm::constant(3, 1.0), None, NegInf, PosInf);
        assert!(matches!(err, Err(ModelError::DimensionMismatch(_))));
    }
}

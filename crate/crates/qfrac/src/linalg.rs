//! Dense symmetric linear algebra: cyclic-Jacobi eigendecomposition,
//! Moore–Penrose application and range-membership tests.
//!
//! Everything here works on desk-scale matrices (n up to a few hundred).
//! The Jacobi sweep was chosen over tridiagonalization because it is
//! dependency-free and delivers high relative accuracy for symmetric
//! matrices, which the positive-semidefiniteness tests downstream depend
//! on. All operations are pure functions on immutable values.

use serde::{Deserialize, Serialize};

/// Eigenvalues with magnitude below `RANK_REL_TOL * max(1, ||M||_F)` are
/// treated as zero when deciding rank, range membership and pseudoinverse
/// truncation.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Residual tolerance for declaring a linear system consistent, relative
/// to `1 + ||rhs||`.
pub const LIN_TOL: f64 = 1e-8;

/// Jacobi sweeps stop once the off-diagonal Frobenius mass falls below
/// this fraction of the matrix norm.
const JACOBI_OFF_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense column-major matrix. Only the handful of operations the solver
/// needs; not a general-purpose linear algebra type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from column vectors; panics if the columns are ragged.
    pub fn from_cols(cols: &[Vec<f64>]) -> Self {
        assert!(!cols.is_empty(), "from_cols: no columns");
        let rows = cols[0].len();
        let mut m = Mat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "from_cols: ragged columns");
            m.data[j * rows..(j + 1) * rows].copy_from_slice(col);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    /// Column `j` as a contiguous slice.
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_vec(&self, j: usize) -> Vec<f64> {
        self.col(j).to_vec()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "mul_vec: dimension mismatch");
        let mut y = vec![0.0; self.rows];
        for j in 0..self.cols {
            let c = self.col(j);
            let xj = x[j];
            for i in 0..self.rows {
                y[i] += c[i] * xj;
            }
        }
        y
    }

    /// `self' * x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "tr_mul_vec: dimension mismatch");
        (0..self.cols).map(|j| dot(self.col(j), x)).collect()
    }

    pub fn mul_mat(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "mul_mat: dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let y = self.mul_vec(other.col(j));
            out.data[j * self.rows..(j + 1) * self.rows].copy_from_slice(&y);
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Real symmetric matrix, stored dense and kept exactly symmetric: every
/// write sets both mirror entries, so `m.get(i, j) == m.get(j, i)` holds
/// bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "SymMatrix: dimension must be positive");
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    /// Build from rows, averaging mirror entries so the result is exactly
    /// symmetric whatever the input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(n >= 1, "SymMatrix: dimension must be positive");
        for r in rows {
            assert_eq!(r.len(), n, "SymMatrix::from_rows: not square");
        }
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (rows[i][j] + rows[j][i]);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Set entry (i, j) and its mirror.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "SymMatrix::mul_vec: dimension mismatch");
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = dot(&self.data[i * n..(i + 1) * n], x);
        }
        y
    }

    /// `x' M x`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        dot(&self.mul_vec(x), x)
    }

    pub fn norm_fro(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    /// `M * M` (symmetric since `M` is).
    pub fn squared(&self) -> SymMatrix {
        let n = self.n;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            for j in i..n {
                let col = &self.data[j * n..(j + 1) * n];
                out.set(i, j, dot(row, col));
            }
        }
        out
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &SymMatrix, s: f64) -> SymMatrix {
        assert_eq!(self.n, other.n, "add_scaled: dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + s * b)
            .collect();
        SymMatrix { n: self.n, data }
    }

    pub fn scaled(&self, s: f64) -> SymMatrix {
        SymMatrix { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Threshold under which an eigenvalue of this matrix counts as zero.
    pub fn rank_tol(&self) -> f64 {
        RANK_REL_TOL * self.norm_fro().max(1.0)
    }

    /// Full spectral decomposition by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back ascending; each eigenvector's sign is fixed
    /// by making its largest-magnitude entry positive (first index wins
    /// ties), so results are reproducible across runs.
    pub fn eigen(&self) -> EigenDecomp {
        let n = self.n;
        let mut a = self.data.clone();
        let mut v = Mat::identity(n);
        let norm = self.norm_fro();

        if n > 1 && norm > 0.0 {
            let target = JACOBI_OFF_TOL * norm;
            for _ in 0..JACOBI_MAX_SWEEPS {
                let mut off = 0.0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        off += 2.0 * a[i * n + j] * a[i * n + j];
                    }
                }
                if off.sqrt() <= target {
                    break;
                }
                for p in 0..n - 1 {
                    for q in (p + 1)..n {
                        let apq = a[p * n + q];
                        if apq == 0.0 {
                            continue;
                        }
                        let app = a[p * n + p];
                        let aqq = a[q * n + q];
                        let tau = (aqq - app) / (2.0 * apq);
                        let t = if tau >= 0.0 {
                            1.0 / (tau + (1.0 + tau * tau).sqrt())
                        } else {
                            -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                        };
                        let c = 1.0 / (1.0 + t * t).sqrt();
                        let s = t * c;

                        a[p * n + p] = app - t * apq;
                        a[q * n + q] = aqq + t * apq;
                        a[p * n + q] = 0.0;
                        a[q * n + p] = 0.0;
                        for i in 0..n {
                            if i != p && i != q {
                                let aip = a[i * n + p];
                                let aiq = a[i * n + q];
                                let new_p = c * aip - s * aiq;
                                let new_q = s * aip + c * aiq;
                                a[i * n + p] = new_p;
                                a[p * n + i] = new_p;
                                a[i * n + q] = new_q;
                                a[q * n + i] = new_q;
                            }
                        }
                        for i in 0..n {
                            let vip = v.get(i, p);
                            let viq = v.get(i, q);
                            v.set(i, p, c * vip - s * viq);
                            v.set(i, q, s * vip + c * viq);
                        }
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));

        let mut eigenvalues = Vec::with_capacity(n);
        let mut cols = Vec::with_capacity(n);
        for &k in &order {
            eigenvalues.push(a[k * n + k]);
            let mut col = v.col_vec(k);
            let mut best = 0usize;
            for i in 1..n {
                if col[i].abs() > col[best].abs() {
                    best = i;
                }
            }
            if col[best] < 0.0 {
                for x in &mut col {
                    *x = -*x;
                }
            }
            cols.push(col);
        }

        EigenDecomp { eigenvalues, eigenvectors: Mat::from_cols(&cols) }
    }

    /// Smallest eigenvalue.
    pub fn min_eig(&self) -> f64 {
        self.eigen().eigenvalues[0]
    }

    /// Least-norm solution of `M x = rhs` via the spectral pseudoinverse.
    /// Inconsistency (rhs outside the range) is reported through the flag,
    /// not as an error.
    pub fn pinv_apply(&self, rhs: &[f64]) -> PinvSolution {
        assert_eq!(rhs.len(), self.n, "pinv_apply: dimension mismatch");
        let e = self.eigen();
        let tol = self.rank_tol();
        let mut x = vec![0.0; self.n];
        for (k, &lam) in e.eigenvalues.iter().enumerate() {
            if lam.abs() <= tol {
                continue;
            }
            let vk = e.eigenvectors.col(k);
            let coef = dot(vk, rhs) / lam;
            for i in 0..self.n {
                x[i] += coef * vk[i];
            }
        }
        let mut r = self.mul_vec(&x);
        for i in 0..self.n {
            r[i] -= rhs[i];
        }
        let consistent = norm2(&r) <= LIN_TOL * (1.0 + norm2(rhs));
        PinvSolution { solution: x, consistent }
    }

    /// Whether `w` lies in the column space, up to the rank tolerance.
    pub fn range_contains(&self, w: &[f64]) -> bool {
        self.pinv_apply(w).consistent
    }

    /// Orthonormal basis of the (numerical) null space, as matrix columns.
    /// Empty columns when the matrix has full rank.
    pub fn null_basis(&self) -> Mat {
        self.null_basis_with_tol(self.rank_tol())
    }

    pub fn null_basis_with_tol(&self, tol: f64) -> Mat {
        let e = self.eigen();
        let cols: Vec<Vec<f64>> = e
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, lam)| lam.abs() <= tol)
            .map(|(k, _)| e.eigenvectors.col_vec(k))
            .collect();
        if cols.is_empty() {
            Mat::zeros(self.n, 0)
        } else {
            Mat::from_cols(&cols)
        }
    }
}

/// Spectral decomposition: `eigenvalues` ascending, `eigenvectors.col(k)`
/// the unit eigenvector paired with `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
}

/// Result of applying the pseudoinverse to a right-hand side.
#[derive(Debug, Clone)]
pub struct PinvSolution {
    pub solution: Vec<f64>,
    pub consistent: bool,
}

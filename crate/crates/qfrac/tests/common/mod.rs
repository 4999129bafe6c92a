//! Shared helpers for the integration suites: a seeded generator of tame
//! two-sided instances with a definite constraint matrix (so the equality
//! constraint qualification holds automatically on both boundaries), and
//! small numeric utilities.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qfrac::linalg::SymMatrix;
use qfrac::model::{Finite, FractionalProblem, QuadraticForm};

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn contains_point(sols: &[Vec<f64>], target: &[f64], tol: f64) -> bool {
    sols.iter().any(|s| {
        s.iter()
            .zip(target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            <= tol
    })
}

pub struct RandomInstance {
    pub problem: FractionalProblem,
    /// Half-width of a centered box guaranteed to contain the feasible set.
    pub box_halfwidth: f64,
}

fn random_sym(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect();
    SymMatrix::from_rows(&rows)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Two-sided instance with `B` positive definite (eigenvalues within
/// [0.55, 1.45]), denominator at least 1 everywhere, compact feasible
/// band, and mild numerator coefficients — chosen so a 201-per-axis grid
/// resolves the optimum to well under the acceptance slack.
pub fn random_definite_band(rng: &mut ChaCha8Rng, n: usize) -> RandomInstance {
    let b_mat = SymMatrix::identity(n).add_scaled(&random_sym(rng, n, 0.5), 0.3);
    let d = random_vec(rng, n, 0.2);
    let alpha = rng.gen_range(-0.5..0.5);
    let g = QuadraticForm::new(b_mat.clone(), d.clone(), alpha);

    let neg_d: Vec<f64> = d.iter().map(|x| -x).collect();
    let center = b_mat.pinv_apply(&neg_d).solution;
    let g_min = g.evaluate(&center);
    let u = g_min + 0.4 + rng.gen_range(0.0..0.3);
    let v = u + 1.0 + rng.gen_range(0.0..0.5);

    let a2 = SymMatrix::identity(n)
        .scaled(0.5)
        .add_scaled(&random_sym(rng, n, 0.5), 0.2);
    let z = random_vec(rng, n, 0.2);
    let b2: Vec<f64> = {
        let az = a2.mul_vec(&z);
        az.iter().map(|x| -x).collect()
    };
    let c2 = 1.0 + a2.quad(&z);
    let f2 = QuadraticForm::new(a2, b2, c2);

    let f1 = QuadraticForm::new(
        random_sym(rng, n, 0.15),
        random_vec(rng, n, 0.15),
        rng.gen_range(-0.5..0.5),
    );

    let lam_min = b_mat.min_eig();
    let radius = ((v - g_min) / lam_min).sqrt();
    let center_inf = center.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let box_halfwidth = center_inf + radius + 0.05;

    let problem = FractionalProblem::new(f1, f2, Some(g), Finite(u), Finite(v)).unwrap();
    RandomInstance { problem, box_halfwidth }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

use serde::{Deserialize, Serialize};

/// Numerical thresholds used across the pencil engine, the checkers and
/// the solver pipeline.
///
/// Scale-dependent tolerances (`psd`, `lambda`, `feas`, ...) are relative
/// factors: the code multiplies them by `1 + scale` of the quantity being
/// tested. Caps bound the search boxes for the bisection scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack allowed on the minimum eigenvalue when declaring a pencil
    /// positive semidefinite, relative to the pencil norm.
    pub psd: f64,
    /// Bisection width target for objective scalars, relative.
    pub lambda: f64,
    /// Golden-section width target for the inner scalar, absolute.
    pub mu: f64,
    /// Level-set membership and feasibility of recovered points, relative.
    pub feas: f64,
    /// Root residual target for the Dinkelbach iteration, relative.
    pub root: f64,
    /// Margin used to decide strict inequalities, relative.
    pub strict: f64,
    /// Search box for the objective scalar.
    pub lambda_cap: f64,
    /// Search box for the inner scalar.
    pub mu_cap: f64,
    /// Iteration cap for each bisection.
    pub max_bisect: usize,
    /// Band within which two boundary values are treated as equal.
    pub tie_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            psd: 1e-8,
            lambda: 1e-9,
            mu: 1e-9,
            feas: 1e-8,
            root: 1e-8,
            strict: 1e-8,
            lambda_cap: 1e8,
            mu_cap: 1e8,
            max_bisect: 200,
            tie_band: 1e-7,
        }
    }
}

impl Tolerances {
    /// Scale every accuracy knob from a single base factor, keeping the
    /// default ratios (`lambda` and `mu` one decade tighter, the tie band
    /// one decade looser). Caps and iteration limits are unchanged.
    pub fn with_base(base: f64) -> Self {
        Tolerances {
            psd: base,
            lambda: base / 10.0,
            mu: base / 10.0,
            feas: base,
            root: base,
            strict: base,
            tie_band: base * 10.0,
            ..Tolerances::default()
        }
    }

    /// Absolute PSD slack for a pencil of the given norm.
    pub fn psd_abs(&self, scale: f64) -> f64 {
        self.psd * (1.0 + scale)
    }

    /// Absolute feasibility slack at the given level magnitude.
    pub fn feas_abs(&self, scale: f64) -> f64 {
        self.feas * (1.0 + scale)
    }
}

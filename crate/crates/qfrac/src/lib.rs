//! Global minimization of a ratio of quadratic functions over the level
//! sets of another quadratic:
//!
//! ```text
//!     minimize    f1(x) / f2(x)
//!     subject to  u <= g(x) <= v        (two-sided)
//!                 g(x) <= 0             (one-sided)
//!                 h(x)  = 0             (equality)
//!                 x free                (unconstrained)
//! ```
//!
//! with `f_i(x) = x'A_i x + 2 b_i'x + c_i` and `g` of the same shape. All
//! matrices may be indefinite and the feasible set need not be compact.
//!
//! Instead of iterating on the Dinkelbach parameter, the optimal value
//! `lambda*` is computed directly: each subproblem is rewritten as the
//! supremum of a scalar subject to an affine matrix pencil in one or two
//! scalars being positive semidefinite (an S-procedure certificate), and
//! that supremum is found by bisection with a concave inner maximization
//! of the pencil's minimum eigenvalue. No external SDP solver is used.
//!
//! The crate is organized around the pipeline:
//!
//! * [`linalg`] — dense symmetric eigendecomposition (cyclic Jacobi),
//!   pseudoinverse application and range tests; the numerical substrate.
//! * [`model`] — quadratic-form algebra: evaluation, homogenization,
//!   coordinate shifts, infimum/supremum, level-set points.
//! * [`lmi`] — the pencil feasibility engine (`sup_lambda`, `sup_nu`).
//! * [`checks`] — executable three-valued checkers for every regularity
//!   condition the method relies on (Slater straddle, the equality
//!   constraint qualification, simultaneous diagonalizability, positivity
//!   of the denominator on the feasible set).
//! * [`solver`] — the full decision tree: interior test, boundary
//!   subproblems with coordinate shift, attainment via `f(lambda*) = 0`,
//!   and solution recovery from the pencil null space.
//! * [`oracle`] — an independent brute-force grid reference and a
//!   Dinkelbach root-finding iteration for cross-validation.
//!
//! Solutions come back in a [`solver::SolveReport`] carrying the optimal
//! value, attainment status, recovered minimizers, multipliers, the case
//! taken, and every diagnostic gathered on the way. Values are certified
//! (`Exact`) only when the hypotheses of the underlying equivalences were
//! verified; otherwise the result is flagged as a lower bound.

pub mod checks;
pub mod linalg;
pub mod lmi;
pub mod model;
pub mod oracle;
pub mod solver;
mod tolerances;

pub use tolerances::Tolerances;

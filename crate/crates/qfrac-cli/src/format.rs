//! JSON instance and report formats.
//!
//! An instance file looks like
//!
//! ```json
//! {
//!   "n": 2,
//!   "f1": { "A": [[0.0, 0.0], [0.0, 0.0]], "b": [0.0, 1.0], "c": 0.0 },
//!   "f2": { "A": [[0.0, 0.0], [0.0, 1.0]], "b": [0.0, 0.0], "c": 1.0 },
//!   "g":  { "A": [[0.0, 0.0], [0.0, 1.0]], "b": [1.0, 0.0], "c": 0.0 },
//!   "u": 0.0,
//!   "v": 2.0
//! }
//! ```
//!
//! **Linear-term convention**: a block `{A, b, c}` denotes
//! `x'Ax + 2 b'x + c` — the `b` vector contributes TWICE its inner
//! product. A linear coefficient written as in `2x` must be entered as
//! `b = [1.0]`, not `[2.0]`. This factor of two is the single most
//! common encoding mistake; the checker-level examples in `docs/` spell
//! it out again.
//!
//! `u`/`v` are `null` for minus/plus infinity; `g: null` makes the
//! instance unconstrained. `A` must be symmetric within `1e-12` relative
//! (it is then symmetrized exactly); asymmetry beyond that is rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use qfrac::linalg::SymMatrix;
use qfrac::model::{Finite, FractionalProblem, NegInf, PosInf, QuadraticForm};
use qfrac::solver::SolveReport;

/// Relative asymmetry accepted before rejecting an `A` block.
pub const SYMMETRY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: matrix A must be {expected}x{expected}, got row {row} of length {got}")]
    BadShape { field: &'static str, expected: usize, row: usize, got: usize },
    #[error("{field}: A has {got} rows, expected {expected}")]
    BadRows { field: &'static str, expected: usize, got: usize },
    #[error("{field}: vector b has length {got}, expected {expected}")]
    BadVector { field: &'static str, expected: usize, got: usize },
    #[error("{field}: A asymmetric beyond tolerance at ({i},{j}): |{a} - {b}| relative {rel:.3e}")]
    Asymmetric { field: &'static str, i: usize, j: usize, a: f64, b: f64, rel: f64 },
    #[error("{field}: non-finite coefficient")]
    NonFinite { field: &'static str },
    #[error("bounds violate u > v: u = {u}, v = {v}")]
    BoundsOrder { u: f64, v: f64 },
    #[error("n must be at least 1")]
    ZeroDim,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawForm {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    f1: RawForm,
    f2: RawForm,
    #[serde(default)]
    g: Option<RawForm>,
    #[serde(default)]
    u: Option<f64>,
    #[serde(default)]
    v: Option<f64>,
}

fn convert_form(raw: &RawForm, n: usize, field: &'static str) -> Result<QuadraticForm, ParseError> {
    if raw.a.len() != n {
        return Err(ParseError::BadRows { field, expected: n, got: raw.a.len() });
    }
    for (i, row) in raw.a.iter().enumerate() {
        if row.len() != n {
            return Err(ParseError::BadShape { field, expected: n, row: i, got: row.len() });
        }
    }
    if raw.b.len() != n {
        return Err(ParseError::BadVector { field, expected: n, got: raw.b.len() });
    }
    let mut maxabs = raw.c.abs();
    for row in &raw.a {
        for &x in row {
            if !x.is_finite() {
                return Err(ParseError::NonFinite { field });
            }
            maxabs = maxabs.max(x.abs());
        }
    }
    for &x in &raw.b {
        if !x.is_finite() {
            return Err(ParseError::NonFinite { field });
        }
        maxabs = maxabs.max(x.abs());
    }
    if !raw.c.is_finite() {
        return Err(ParseError::NonFinite { field });
    }
    let tol = SYMMETRY_REL_TOL * maxabs.max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (raw.a[i][j], raw.a[j][i]);
            if (a - b).abs() > tol {
                return Err(ParseError::Asymmetric {
                    field,
                    i,
                    j,
                    a,
                    b,
                    rel: (a - b).abs() / maxabs.max(1.0),
                });
            }
        }
    }
    Ok(QuadraticForm::new(SymMatrix::from_rows(&raw.a), raw.b.clone(), raw.c))
}

/// Parse and validate an instance file.
pub fn parse_instance(text: &str) -> Result<FractionalProblem, ParseError> {
    let raw: RawInstance = serde_json::from_str(text)?;
    if raw.n == 0 {
        return Err(ParseError::ZeroDim);
    }
    let f1 = convert_form(&raw.f1, raw.n, "f1")?;
    let f2 = convert_form(&raw.f2, raw.n, "f2")?;
    let g = match &raw.g {
        Some(rg) => Some(convert_form(rg, raw.n, "g")?),
        None => None,
    };
    if let (Some(u), Some(v)) = (raw.u, raw.v) {
        if u > v {
            return Err(ParseError::BoundsOrder { u, v });
        }
    }
    let u = raw.u.map_or(NegInf, Finite);
    let v = raw.v.map_or(PosInf, Finite);
    FractionalProblem::new(f1, f2, g, u, v).map_err(|e| {
        // dimension mismatches are caught above; bounds order re-checked here
        match e {
            qfrac::model::ModelError::BoundsOrder { u, v } => ParseError::BoundsOrder { u, v },
            other => ParseError::NonFinite {
                field: Box::leak(format!("instance ({other})").into_boxed_str()),
            },
        }
    })
}

/// Does the instance carry a constraint that both bounds leave inactive?
/// (Permitted, but worth a warning: `g` will be ignored.)
pub fn vacuous_constraint(p: &FractionalProblem) -> bool {
    p.g.is_some() && !p.u.is_finite() && !p.v.is_finite()
}

fn raw_form(q: &QuadraticForm) -> RawForm {
    let n = q.dim();
    RawForm {
        a: (0..n).map(|i| (0..n).map(|j| q.a.get(i, j)).collect()).collect(),
        b: q.b.clone(),
        c: q.c,
    }
}

/// Emit an instance as JSON. Numbers round-trip exactly: the emitter
/// writes shortest-exact decimal forms and the parser reads them back to
/// the same bits.
pub fn emit_instance(p: &FractionalProblem) -> String {
    let raw = RawInstance {
        n: p.dim(),
        f1: raw_form(&p.f1),
        f2: raw_form(&p.f2),
        g: p.g.as_ref().map(raw_form),
        u: p.u.finite(),
        v: p.v.finite(),
    };
    serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
}

/// Report envelope: the solve result plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub tolerance_base: f64,
    pub wall_time_ms: f64,
    pub report: SolveReport,
}

impl ReportFile {
    pub fn new(tolerance_base: f64, wall_time_ms: f64, report: SolveReport) -> Self {
        ReportFile {
            tool: "qfrac".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            tolerance_base,
            wall_time_ms,
            report,
        }
    }
}

/// Human-readable rendering of a solve report.
pub fn render_report(rep: &SolveReport) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push(&mut out, format!("lambda*     : {}", rep.lambda_star));
    push(&mut out, format!("attainment  : {:?}", rep.attainment));
    push(&mut out, format!("case        : {:?}", rep.case));
    push(&mut out, format!("certified   : {:?}", rep.certified));
    if let Some(mu) = rep.multiplier_mu {
        push(&mut out, format!("multiplier  : {mu:.12}"));
    }
    if let Some(f) = rep.trace.f_at_lambda_star {
        push(&mut out, format!("f(lambda*)  : {f:.12}"));
    }
    if let Some(lh) = rep.trace.case1_lambda {
        push(&mut out, format!("interior try: lambda = {lh:.12}"));
    }
    if let Some(b) = &rep.trace.lower {
        push(
            &mut out,
            format!(
                "lower bound.: lambda_1 = {}, f = {:?}, CQ {:?}",
                b.lambda, b.f_value, b.assumption_b
            ),
        );
    }
    if let Some(b) = &rep.trace.upper {
        push(
            &mut out,
            format!(
                "upper bound.: lambda_2 = {}, f = {:?}, CQ {:?}",
                b.lambda, b.f_value, b.assumption_b
            ),
        );
    }
    if let Some((lo, hi)) = rep.trace.eta_interval {
        push(&mut out, format!("eta interval: [{lo:.9}, {hi:.9}]"));
    }
    if rep.solutions.is_empty() {
        push(&mut out, "solutions   : (none)".to_string());
    } else {
        for (k, s) in rep.solutions.iter().enumerate() {
            let coords: Vec<String> = s.iter().map(|x| format!("{x:.9}")).collect();
            push(&mut out, format!("solution #{k}: ({})", coords.join(", ")));
        }
    }
    for d in &rep.diagnostics {
        push(&mut out, format!("check {:<22} {:?}: {}", d.name, d.verdict, d.note));
    }
    out
}

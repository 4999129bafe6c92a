//! Embedded corpus of the closed-form reference instances, each with its
//! expected outcome. `run_example` executes one and compares against the
//! stored expectations; the `examples` subcommand drives all of them.

use qfrac::checks::{check_assumption_c, check_sdc, check_well_defined, Verdict, Witness};
use qfrac::linalg::SymMatrix;
use qfrac::model::{Finite, FractionalProblem, NegInf, QuadraticForm};
use qfrac::oracle::{grid_stats, GridSpec};
use qfrac::solver::{
    solve, solve_equality, solve_one_sided, Attainment, CaseTag, Certified, EqualityProblem,
};
use qfrac::Tolerances;

pub const NAMES: [&str; 7] = ["ex3_1", "ex3_2", "ex3_3", "ex4_1", "ex5_1", "ex5_2", "rem3_4"];

const TOL: f64 = 1e-6;

pub struct ExampleOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
}

fn diag(d: &[f64]) -> SymMatrix {
    SymMatrix::from_diag(d)
}

fn qf(a: SymMatrix, b: Vec<f64>, c: f64) -> QuadraticForm {
    QuadraticForm::new(a, b, c)
}

/// The instance behind a corpus entry, when it is expressible as a plain
/// instance file (all of them are; `rem3_4` uses `u = v = 0`).
pub fn instance(name: &str) -> Option<FractionalProblem> {
    let p = match name {
        // (x1^2+1)/(x2^2+1) subject to x1^2 + 2x3 - 1 <= 0
        "ex3_1" | "ex4_1" => FractionalProblem::new(
            qf(diag(&[1.0, 0.0, 0.0]), vec![0.0; 3], 1.0),
            qf(diag(&[0.0, 1.0, 0.0]), vec![0.0; 3], 1.0),
            Some(qf(diag(&[1.0, 0.0, 0.0]), vec![0.0, 0.0, 1.0], -1.0)),
            NegInf,
            Finite(0.0),
        ),
        // (x1^2+x3^2+2x3)/(x2^2+1) subject to 0 <= x3^2+2x3 <= 3
        "ex3_2" => FractionalProblem::new(
            qf(diag(&[1.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0),
            qf(diag(&[0.0, 1.0, 0.0]), vec![0.0; 3], 1.0),
            Some(qf(diag(&[0.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0)),
            Finite(0.0),
            Finite(3.0),
        ),
        // 2x2/(x2^2+1) subject to 0 <= x2^2+2x1 <= 2
        "ex3_3" => FractionalProblem::new(
            qf(diag(&[0.0, 0.0]), vec![0.0, 1.0], 0.0),
            qf(diag(&[0.0, 1.0]), vec![0.0; 2], 1.0),
            Some(qf(diag(&[0.0, 1.0]), vec![1.0, 0.0], 0.0)),
            Finite(0.0),
            Finite(2.0),
        ),
        // (x1^2+x2^2+5)/x1^2 subject to 1 - 2 x1 x2 <= 0
        "ex5_1" => FractionalProblem::new(
            qf(SymMatrix::identity(2), vec![0.0; 2], 5.0),
            qf(diag(&[1.0, 0.0]), vec![0.0; 2], 0.0),
            Some(qf(
                SymMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]),
                vec![0.0; 2],
                1.0,
            )),
            NegInf,
            Finite(0.0),
        ),
        // (x1^2+x2^2+x3)/(x1^2+1) subject to x1^2+x2^2 <= 1
        "ex5_2" => FractionalProblem::new(
            qf(diag(&[1.0, 1.0, 0.0]), vec![0.0, 0.0, 0.5], 0.0),
            qf(diag(&[1.0, 0.0, 0.0]), vec![0.0; 3], 1.0),
            Some(qf(diag(&[1.0, 1.0, 0.0]), vec![0.0; 3], -1.0)),
            NegInf,
            Finite(1.0),
        ),
        // (x1^2+x3^2+2)/(x1^2+x3^2+1) subject to x1^2-x2^2+2x1+2x2 = 0
        "rem3_4" => FractionalProblem::new(
            qf(diag(&[1.0, 0.0, 1.0]), vec![0.0; 3], 2.0),
            qf(diag(&[1.0, 0.0, 1.0]), vec![0.0; 3], 1.0),
            Some(qf(diag(&[1.0, -1.0, 0.0]), vec![1.0, 1.0, 0.0], 0.0)),
            Finite(0.0),
            Finite(0.0),
        ),
        _ => return None,
    };
    Some(p.expect("corpus instances are well-formed"))
}

struct Checker {
    lines: Vec<String>,
    ok: bool,
}

impl Checker {
    fn new() -> Self {
        Checker { lines: Vec::new(), ok: true }
    }

    fn expect(&mut self, label: &str, cond: bool, detail: String) {
        if cond {
            self.lines.push(format!("  ok   {label}: {detail}"));
        } else {
            self.lines.push(format!("  FAIL {label}: {detail}"));
            self.ok = false;
        }
    }

    fn near(&mut self, label: &str, got: f64, want: f64) {
        self.expect(label, (got - want).abs() <= TOL, format!("got {got}, want {want}"));
    }
}

fn has_point(sols: &[Vec<f64>], target: &[f64]) -> bool {
    sols.iter().any(|s| {
        s.iter()
            .zip(target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            <= TOL
    })
}

pub fn run_example(name: &str, tols: &Tolerances) -> Option<ExampleOutcome> {
    let mut c = Checker::new();
    match name {
        "ex3_1" => {
            let p = instance("ex3_1").unwrap();
            let rep = solve(&p, tols).unwrap();
            c.near("lambda*", rep.lambda(), 0.0);
            c.expect(
                "unattained",
                rep.attainment == Attainment::Unattained,
                format!("{:?}", rep.attainment),
            );
            c.near("f(lambda*)", rep.trace.f_at_lambda_star.unwrap_or(f64::NAN), 1.0);
        }
        "ex3_2" => {
            let p = instance("ex3_2").unwrap();
            let rep = solve(&p, tols).unwrap();
            c.near("lambda*", rep.lambda(), 0.0);
            c.expect(
                "case",
                rep.case == CaseTag::LowerBoundaryCase2,
                format!("{:?}", rep.case),
            );
            c.near("interior candidate", rep.trace.case1_lambda.unwrap_or(f64::NAN), -1.0);
            let lower = rep.trace.lower.as_ref();
            let upper = rep.trace.upper.as_ref();
            c.near("lambda_1", lower.map_or(f64::NAN, |b| b.lambda.as_f64()), 0.0);
            c.near("lambda_2", upper.map_or(f64::NAN, |b| b.lambda.as_f64()), 0.0);
            c.near("f(lambda_1)", lower.and_then(|b| b.f_value).unwrap_or(f64::NAN), 0.0);
            c.near("f(lambda_2)", upper.and_then(|b| b.f_value).unwrap_or(f64::NAN), 3.0);
            c.expect(
                "solution (0,0,0)",
                has_point(&rep.solutions, &[0.0, 0.0, 0.0]),
                format!("{:?}", rep.solutions),
            );
            c.expect(
                "solution (0,0,-2)",
                has_point(&rep.solutions, &[0.0, 0.0, -2.0]),
                format!("{:?}", rep.solutions),
            );
            c.expect(
                "certified exact",
                rep.certified == Certified::Exact,
                format!("{:?}", rep.certified),
            );
        }
        "ex3_3" => {
            let p = instance("ex3_3").unwrap();
            let rep = solve(&p, tols).unwrap();
            c.near("lambda*", rep.lambda(), -1.0);
            c.expect("case", rep.case == CaseTag::InteriorCase1, format!("{:?}", rep.case));
            c.expect("has solution", !rep.solutions.is_empty(), format!("{} found", rep.solutions.len()));
            for s in &rep.solutions {
                c.expect("x2 = -1", (s[1] + 1.0).abs() <= TOL, format!("x2 = {}", s[1]));
                let gval = s[1] * s[1] + 2.0 * s[0];
                c.expect(
                    "solution in band",
                    (-TOL..=2.0 + TOL).contains(&gval),
                    format!("g = {gval}"),
                );
            }
            let h = qf(diag(&[0.0, 1.0]), vec![1.0, 0.0], 0.0);
            let b = qfrac::checks::check_assumption_b(&h, tols).unwrap();
            c.expect(
                "boundary CQ fails",
                b.verdict == Verdict::Fails,
                format!("{:?}", b.verdict),
            );
        }
        "ex4_1" => {
            let p = instance("ex4_1").unwrap();
            let g0 = p.g.as_ref().unwrap().plus_constant(0.0);
            let rep = solve_one_sided(&p.f1, &p.f2, &g0, tols).unwrap();
            c.near("lambda*", rep.lambda(), 0.0);
            c.expect(
                "unattained",
                rep.attainment == Attainment::Unattained,
                format!("{:?}", rep.attainment),
            );
            c.near("f(0)", rep.trace.f_at_lambda_star.unwrap_or(f64::NAN), 1.0);
            c.near("eta*", rep.multiplier_mu.unwrap_or(f64::NAN), 0.0);
            let (lo, hi) = rep.trace.eta_interval.unwrap_or((f64::NAN, f64::NAN));
            c.expect(
                "certificate unique",
                hi - lo <= TOL && lo.abs() <= TOL,
                format!("eta interval [{lo}, {hi}]"),
            );
        }
        "ex5_1" => {
            let p = instance("ex5_1").unwrap();
            let g = p.g.as_ref().unwrap();
            let sdc = check_sdc(&p.f2.a, &g.a, tols);
            c.expect("pair not SDC", sdc.verdict == Verdict::Fails, format!("{:?}", sdc.verdict));
            let wd = check_well_defined(&p.f2, g, tols).unwrap();
            c.expect(
                "well-definedness undecided",
                wd.verdict == Verdict::Unknown,
                format!("{:?}", wd.verdict),
            );
            let stats = grid_stats(&p, &GridSpec::new(4.0, 301)).unwrap();
            c.expect(
                ">= 10^4 feasible samples",
                stats.feasible_count >= 10_000,
                format!("{}", stats.feasible_count),
            );
            c.expect(
                "denominator positive on samples",
                stats.min_f2 > 0.0,
                format!("min f2 = {}", stats.min_f2),
            );
            c.expect(
                "numerator >= 5 on samples",
                stats.min_f1 >= 5.0 - 1e-9,
                format!("min f1 = {}", stats.min_f1),
            );
            let rep = solve(&p, tols).unwrap();
            c.near("lambda*", rep.lambda(), 1.0);
            c.expect(
                "unattained (value gap 5)",
                rep.attainment == Attainment::Unattained,
                format!("{:?}, f = {:?}", rep.attainment, rep.trace.f_at_lambda_star),
            );
            c.expect(
                "grid dominates the direct value",
                stats.min_ratio >= rep.lambda() - 1e-6,
                format!("grid {} vs direct {}", stats.min_ratio, rep.lambda()),
            );
        }
        "ex5_2" => {
            let p = instance("ex5_2").unwrap();
            let g = p.g.as_ref().unwrap();
            let cc = check_assumption_c(&p.f2, &diag(&[1.0, 1.0, 0.0]), 1.0, tols).unwrap();
            c.expect(
                "bordered positivity fails",
                cc.verdict == Verdict::Fails,
                format!("{:?}", cc.verdict),
            );
            let wd = check_well_defined(&p.f2, g, tols).unwrap();
            c.expect("well-defined", wd.verdict == Verdict::Holds, format!("{:?}", wd.verdict));
            match wd.witness {
                Witness::Pair(delta, _) => c.near("delta", delta, 1.0),
                other => c.expect("delta witness", false, format!("{other:?}")),
            }
            let rep = solve(&p, tols).unwrap();
            c.expect(
                "unbounded below",
                rep.attainment == Attainment::UnboundedBelow && rep.lambda_star == NegInf,
                format!("{:?} at {}", rep.attainment, rep.lambda_star),
            );
        }
        "rem3_4" => {
            let p = instance("rem3_4").unwrap();
            let h = p.g.as_ref().unwrap().clone();
            let eq = EqualityProblem::new(p.f1.clone(), p.f2.clone(), h, tols).unwrap();
            let rep = solve_equality(&eq, tols);
            c.near("lambda*", rep.lambda(), 1.0);
            c.expect(
                "certified exact",
                rep.certified == Certified::Exact,
                format!("{:?}", rep.certified),
            );
            let b = rep.diagnostics.iter().find(|d| d.name == "assumption_b");
            match b.map(|d| (&d.verdict, &d.witness)) {
                Some((Verdict::Holds, Witness::Point(z))) => {
                    c.expect(
                        "zeta = (-1, 1, .)",
                        (z[0] + 1.0).abs() <= TOL && (z[1] - 1.0).abs() <= TOL,
                        format!("{z:?}"),
                    );
                }
                other => c.expect("CQ holds with witness", false, format!("{other:?}")),
            }
        }
        _ => return None,
    }
    Some(ExampleOutcome {
        name: NAMES.iter().find(|n| **n == name).copied().unwrap_or("?"),
        passed: c.ok,
        lines: c.lines,
    })
}

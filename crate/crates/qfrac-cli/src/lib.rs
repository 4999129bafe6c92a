//! Command-line front end: JSON instances in, solve reports out, plus
//! assumption checks, the grid oracle, the embedded example corpus and a
//! batch mode.
//!
//! Exit codes: 0 success, 1 solver-status or expectation failure, 2 input
//! error (bad file, malformed instance, unknown flags).

pub mod corpus;
pub mod format;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use qfrac::checks::{
    check_assumption_a, check_assumption_b, check_assumption_c, check_sdc, check_well_defined,
    CheckResult,
};
use qfrac::model::{Finite, FractionalProblem};

use qfrac::oracle::{grid_stats, GridSpec};
use qfrac::solver::{solve, EqualityProblem};
use qfrac::Tolerances;

use format::{emit_instance, parse_instance, render_report, vacuous_constraint, ReportFile};

#[derive(Parser)]
#[command(
    name = "qfrac",
    version,
    about = "Minimize a ratio of quadratics over the level band of a quadratic, by direct semidefinite reformulation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file and print the report
    Solve {
        file: PathBuf,
        /// Base accuracy factor (default 1e-8; also via QFRAC_TOL)
        #[arg(long)]
        tol: Option<f64>,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run one assumption checker against an instance file
    Check {
        file: PathBuf,
        #[arg(long)]
        assumption: Assumption,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Dense-grid reference value for an instance file
    Oracle {
        file: PathBuf,
        /// Points per axis
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Half-width of the centered sampling box
        #[arg(long = "box", default_value_t = 3.0)]
        box_halfwidth: f64,
        /// Feasibility slack for accepting samples
        #[arg(long, default_value_t = 1e-9)]
        feas_tol: f64,
    },
    /// Run the embedded reference corpus (optionally a single name)
    Examples {
        name: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Solve every .json instance in a directory
    Batch {
        dir: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Assumption {
    /// Strict straddle of the bounds by the range of g
    A,
    /// Equality constraint qualification on the boundary form
    B,
    /// Positive definiteness of the bordered denominator (ball shape)
    C,
    /// Simultaneous diagonalizability of (A2, B)
    Sdc,
    /// Positivity of the denominator on the feasible set
    Welldef,
}

fn tolerances(flag: Option<f64>) -> Tolerances {
    let base = flag.or_else(|| {
        std::env::var("QFRAC_TOL")
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
    });
    match base {
        Some(b) if b > 0.0 => Tolerances::with_base(b),
        _ => Tolerances::default(),
    }
}

fn base_of(tols: &Tolerances) -> f64 {
    tols.psd
}

fn load(path: &Path) -> Result<FractionalProblem, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let p = parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if vacuous_constraint(&p) {
        eprintln!(
            "warning: {} declares g with both bounds infinite; the constraint is ignored",
            path.display()
        );
    }
    Ok(p)
}

fn print_check(r: &CheckResult) {
    println!("check   : {}", r.name);
    println!("verdict : {:?}", r.verdict);
    match &r.witness {
        qfrac::checks::Witness::None => {}
        w => println!("witness : {w:?}"),
    }
    println!("note    : {}", r.note);
}

fn cmd_solve(file: &Path, tol: Option<f64>, json: bool) -> i32 {
    let p = match load(file) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let tols = tolerances(tol);
    let start = Instant::now();
    match solve(&p, &tols) {
        Ok(rep) => {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            if json {
                let envelope = ReportFile::new(base_of(&tols), ms, rep);
                println!("{}", serde_json::to_string_pretty(&envelope).unwrap());
            } else {
                print!("{}", render_report(&rep));
                println!("wall time   : {ms:.2} ms");
            }
            0
        }
        Err(e) => {
            eprintln!("solver error: {e}");
            1
        }
    }
}

fn cmd_check(file: &Path, which: Assumption, tol: Option<f64>) -> i32 {
    let p = match load(file) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let tols = tolerances(tol);
    let result: Result<CheckResult, String> = match which {
        Assumption::A => match &p.g {
            Some(g) => Ok(check_assumption_a(g, p.u, p.v, &tols)),
            None => Err("instance has no constraint g".into()),
        },
        Assumption::B => {
            let g = match &p.g {
                Some(g) => g,
                None => {
                    eprintln!("error: instance has no constraint g");
                    return 2;
                }
            };
            let level = p
                .u
                .finite()
                .or(p.v.finite())
                .ok_or_else(|| "no finite bound to build the boundary form".to_string());
            match level {
                Ok(level) => {
                    // normalize: shift onto a point of the level set
                    match EqualityProblem::from_level(&p.f1, &p.f2, g, level, &tols) {
                        Ok(eq) => check_assumption_b(&eq.h, &tols).map_err(|e| e.to_string()),
                        Err(e) => Err(e.to_string()),
                    }
                }
                Err(e) => Err(e),
            }
        }
        Assumption::C => {
            let g = match &p.g {
                Some(g) => g,
                None => {
                    eprintln!("error: instance has no constraint g");
                    return 2;
                }
            };
            // ball shape required: g = ||Lx||^2 - rho
            let d_norm: f64 = g.b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if d_norm > 1e-12 || g.c >= 0.0 {
                eprintln!(
                    "error: the positivity condition needs a ball constraint (no linear term, negative constant)"
                );
                return 2;
            }
            check_assumption_c(&p.f2, &g.a, -g.c, &tols).map_err(|e| e.to_string())
        }
        Assumption::Sdc => match &p.g {
            Some(g) => Ok(check_sdc(&p.f2.a, &g.a, &tols)),
            None => Err("instance has no constraint g".into()),
        },
        Assumption::Welldef => match &p.g {
            Some(g) => {
                let gle = match (p.u, p.v) {
                    (_, Finite(v)) => g.plus_constant(-v),
                    (Finite(u), _) => g.negated().plus_constant(u),
                    _ => g.clone(),
                };
                check_well_defined(&p.f2, &gle, &tols).map_err(|e| e.to_string())
            }
            None => {
                let (lo, _) = p.f2.inf_sup();
                println!("unconstrained instance: inf f2 = {lo}");
                return match lo {
                    Finite(v) if v > 0.0 => 0,
                    _ => 1,
                };
            }
        },
    };
    match result {
        Ok(r) => {
            print_check(&r);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_oracle(file: &Path, grid: usize, box_halfwidth: f64, feas_tol: f64) -> i32 {
    let p = match load(file) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if grid < 2 {
        eprintln!("error: --grid must be at least 2");
        return 2;
    }
    let spec = GridSpec::new(box_halfwidth, grid).with_feasibility_tol(feas_tol);
    match grid_stats(&p, &spec) {
        Ok(stats) => {
            let coords: Vec<String> = stats.argmin.iter().map(|x| format!("{x:.9}")).collect();
            println!("grid infimum : {:.12}", stats.min_ratio);
            println!("argmin       : ({})", coords.join(", "));
            println!("feasible     : {} samples", stats.feasible_count);
            println!("min f2       : {:.12}", stats.min_f2);
            0
        }
        Err(e) => {
            eprintln!("oracle error: {e}");
            1
        }
    }
}

fn cmd_examples(name: Option<&str>, tol: Option<f64>) -> i32 {
    let tols = tolerances(tol);
    let names: Vec<&str> = match name {
        Some(n) => {
            if !corpus::NAMES.contains(&n) {
                eprintln!(
                    "error: unknown example {n:?}; available: {}",
                    corpus::NAMES.join(", ")
                );
                return 2;
            }
            vec![corpus::NAMES.iter().find(|x| **x == n).copied().unwrap()]
        }
        None => corpus::NAMES.to_vec(),
    };
    let mut all_ok = true;
    for n in names {
        let outcome = corpus::run_example(n, &tols).expect("known name");
        println!("{}: {}", outcome.name, if outcome.passed { "PASS" } else { "FAIL" });
        for line in &outcome.lines {
            println!("{line}");
        }
        all_ok &= outcome.passed;
    }
    if all_ok {
        0
    } else {
        1
    }
}

fn cmd_batch(dir: &Path, tol: Option<f64>, json: bool) -> i32 {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().map_or(false, |x| x == "json"))
            .collect(),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.display());
            return 2;
        }
    };
    files.sort();
    if files.is_empty() {
        eprintln!("error: no .json instances in {}", dir.display());
        return 2;
    }
    let tols = tolerances(tol);

    // solve concurrently, print in filename order
    let results: Vec<(PathBuf, Result<ReportFile, (i32, String)>)> = files
        .par_iter()
        .map(|f| {
            let started = Instant::now();
            let out = load(f)
                .map_err(|e| (2, e))
                .and_then(|p| solve(&p, &tols).map_err(|e| (1, e.to_string())))
                .map(|rep| {
                    ReportFile::new(base_of(&tols), started.elapsed().as_secs_f64() * 1e3, rep)
                });
            (f.clone(), out)
        })
        .collect();

    let mut code = 0;
    for (file, res) in results {
        match res {
            Ok(envelope) => {
                if json {
                    println!(
                        "{}: {}",
                        file.display(),
                        serde_json::to_string(&envelope).unwrap()
                    );
                } else {
                    let r = &envelope.report;
                    println!(
                        "{}: lambda* = {}, {:?}, {:?}, {:?}",
                        file.display(),
                        r.lambda_star,
                        r.case,
                        r.attainment,
                        r.certified
                    );
                }
            }
            Err((c, msg)) => {
                println!("{}: ERROR {msg}", file.display());
                code = code.max(c);
            }
        }
    }
    code
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with success status
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.cmd {
        Cmd::Solve { file, tol, json } => cmd_solve(&file, tol, json),
        Cmd::Check { file, assumption, tol } => cmd_check(&file, assumption, tol),
        Cmd::Oracle { file, grid, box_halfwidth, feas_tol } => {
            cmd_oracle(&file, grid, box_halfwidth, feas_tol)
        }
        Cmd::Examples { name, tol } => cmd_examples(name.as_deref(), tol),
        Cmd::Batch { dir, tol, json } => cmd_batch(&dir, tol, json),
    }
}

/// Emit a corpus instance as JSON (used to seed files for external runs).
pub fn corpus_instance_json(name: &str) -> Option<String> {
    corpus::instance(name).map(|p| emit_instance(&p))
}

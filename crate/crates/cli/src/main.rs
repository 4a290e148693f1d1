//! `selrisk`: compute selection risk sets from scenario files, compare them
//! with closed forms and run the property battery.
//!
//! Exit codes: 0 success, 1 invalid input, 2 selection budget exceeded,
//! 3 closed-form precondition violated, 4 tolerance exceeded,
//! 5 property violation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use selrisk_core::closed_forms::ClosedForm;
use selrisk_core::engine::{selection_risk, Scenario};
use selrisk_core::geom::{curve_sup_distance, BoundaryCurve, RiskSet};
use selrisk_core::props::{run_all, run_suite, SuiteReport};
use selrisk_core::report::{boundary_csv, boundary_svg, compare_csv};
use selrisk_core::scenario::load_scenario;
use selrisk_core::Error;

#[derive(Parser)]
#[command(name = "selrisk", version, about = "Selection risk measures of non-convex portfolios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the boundary of a risk set and write it as CSV.
    Compute {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Evaluate this closed form instead of running the enumeration.
        #[arg(long = "closed-form")]
        closed_form: Option<String>,
    },
    /// Compare the enumeration against a closed form.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long = "closed-form")]
        closed_form: String,
        #[arg(long)]
        tol: f64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Run the randomised property battery.
    Props {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long)]
        suite: Option<String>,
    },
}

enum Failure {
    Input(String),
    Budget(String),
    Precondition(String),
    Tolerance(String),
    Property,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Budget(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Tolerance(_) => 4,
            Failure::Property => 5,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SelectionBudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::PreconditionViolated(_) => Failure::Precondition(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = configure_threads().and_then(|_| match cli.command {
        Command::Compute {
            scenario,
            out,
            svg,
            closed_form,
        } => compute(&scenario, &out, svg.as_deref(), closed_form.as_deref()),
        Command::Compare {
            scenario,
            closed_form,
            tol,
            report,
        } => compare(&scenario, &closed_form, tol, &report),
        Command::Props { seed, cases, suite } => props(seed, cases, suite.as_deref()),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(m) | Failure::Budget(m) | Failure::Precondition(m) | Failure::Tolerance(m) => {
                    eprintln!("error: {m}")
                }
                Failure::Property => {}
            }
            ExitCode::from(f.code())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("SELRISK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Failure::Input(format!("SELRISK_THREADS must be an integer >= 1, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn read_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(load_scenario(&text)?)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_closed_form(name: &str) -> Result<ClosedForm, Failure> {
    Ok(name.parse::<ClosedForm>()?)
}

fn curve(sc: &Scenario, set: &RiskSet) -> Result<BoundaryCurve, Failure> {
    Ok(set.boundary_curve(sc.engine.window, sc.engine.grid_step)?)
}

fn compute(scenario: &Path, out: &Path, svg: Option<&Path>, closed_form: Option<&str>) -> Result<(), Failure> {
    let sc = read_scenario(scenario)?;
    let (label, set) = match closed_form {
        Some(name) => {
            let cf = parse_closed_form(name)?;
            (cf.name(), cf.evaluate(&sc)?)
        }
        None => ("oracle", selection_risk(&sc)?),
    };
    let c = curve(&sc, &set)?;
    write(out, &boundary_csv(&c))?;
    if let Some(svg) = svg {
        write(svg, &boundary_svg(&[(label, &c)], sc.engine.window))?;
    }
    Ok(())
}

fn compare(scenario: &Path, closed_form: &str, tol: f64, report: &Path) -> Result<(), Failure> {
    if !(tol >= 0.0) {
        return Err(Failure::Input(format!("--tol must be nonnegative, got {tol}")));
    }
    let sc = read_scenario(scenario)?;
    let cf = parse_closed_form(closed_form)?;
    let closed = curve(&sc, &cf.evaluate(&sc)?)?;
    let oracle = curve(&sc, &selection_risk(&sc)?)?;
    write(report, &compare_csv(&oracle, &closed)?)?;

    let outside = oracle.xs.iter().zip(oracle.ys.iter().zip(&closed.ys)).find(|(_, (o, c))| match (o, c) {
        (Some(o), Some(c)) => *o < c - tol,
        (Some(_), None) => true,
        _ => false,
    });
    if let Some((x, _)) = outside {
        return Err(Failure::Tolerance(format!(
            "oracle set is not contained in the {} set at x = {x}",
            cf.name()
        )));
    }
    let gap = curve_sup_distance(&oracle, &closed)?;
    if gap > tol {
        return Err(Failure::Tolerance(format!("sup gap {gap} exceeds tolerance {tol}")));
    }
    println!("sup gap {gap} within tolerance {tol}");
    Ok(())
}

fn props(seed: u64, cases: usize, suite: Option<&str>) -> Result<(), Failure> {
    let reports = match suite {
        Some(s) => vec![run_suite(s, seed, cases)?],
        None => run_all(seed, cases),
    };
    let mut out = std::io::stdout().lock();
    summarize(&reports, &mut out).map_err(|e| Failure::Input(e.to_string()))?
}

fn summarize(reports: &[SuiteReport], out: &mut impl Write) -> std::io::Result<Result<(), Failure>> {
    let mut failed = false;
    for r in reports {
        match r.failures.first() {
            None => writeln!(out, "{}: ok ({} cases)", r.suite, r.cases)?,
            Some(f) => {
                failed = true;
                writeln!(out, "{}: FAILED {} of {} cases", r.suite, r.failures.len(), r.cases)?;
                writeln!(out, "  case {}: {}", f.case, f.message)?;
                writeln!(out, "  reproduction:\n{}", f.reproduction)?;
            }
        }
    }
    Ok(if failed { Err(Failure::Property) } else { Ok(()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use selrisk_core::props::Failure as CaseFailure;

    #[test]
    fn failed_suite_maps_to_exit_five() {
        let reports = vec![
            SuiteReport {
                suite: "monotonicity".into(),
                cases: 3,
                failures: vec![],
            },
            SuiteReport {
                suite: "cash_invariance".into(),
                cases: 3,
                failures: vec![CaseFailure {
                    case: 1,
                    message: "boom".into(),
                    reproduction: "{\"space\": [1]}".into(),
                }],
            },
        ];
        let mut buf = Vec::new();
        let res = summarize(&reports, &mut buf).unwrap();
        assert_eq!(res.err().map(|f| f.code()), Some(5));
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("monotonicity: ok (3 cases)"));
        assert!(text.contains("cash_invariance: FAILED 1 of 3 cases"));
        assert!(text.contains("{\"space\": [1]}"));
        assert!(summarize(&reports[..1], &mut Vec::new()).unwrap().is_ok());
    }
}

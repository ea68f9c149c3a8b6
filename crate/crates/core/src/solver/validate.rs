use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ProblemInstance, SolverConfig};
use crate::conic::ConicBackend;
use crate::geometry::{sets_intersect, ConvexSet};

/// Membership tolerance for the boundary-point checks.
const POINT_TOL: f64 = 1e-9;
/// Tolerance for the set-intersection decisions.
const INTERSECT_TOL: f64 = 1e-7;

/// A violated problem condition. Set indices are 1-based, as in `Q_1 … Q_I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValidationIssue {
    InitialPointOutside { residual: f64 },
    TerminalPointOutside { residual: f64 },
    DisjointConsecutive { first: usize, second: usize },
    VelocitySetExcludesOrigin,
    AccelerationSetExcludesOrigin,
    InitialPointInSecondSet,
    TerminalPointInPenultimateSet,
    TripleOverlap { first: usize },
    Config { message: String },
    Backend { message: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            InitialPointOutside { residual } => {
                write!(f, "q_init is outside Q_1 (residual {residual:e})")
            }
            TerminalPointOutside { residual } => {
                write!(f, "q_term is outside Q_I (residual {residual:e})")
            }
            DisjointConsecutive { first, second } => {
                write!(f, "Q_{first} and Q_{second} do not intersect")
            }
            VelocitySetExcludesOrigin => {
                write!(f, "velocity set does not contain the origin strictly")
            }
            AccelerationSetExcludesOrigin => {
                write!(f, "acceleration set does not contain the origin strictly")
            }
            InitialPointInSecondSet => write!(f, "initialization condition: q_init lies in Q_2"),
            TerminalPointInPenultimateSet => {
                write!(f, "initialization condition: q_term lies in Q_(I-1)")
            }
            TripleOverlap { first } => write!(
                f,
                "initialization condition: Q_{} ∩ Q_{} ∩ Q_{} is nonempty",
                first,
                first + 1,
                first + 2
            ),
            Config { message } => write!(f, "configuration: {message}"),
            Backend { message } => write!(f, "backend: {message}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    /// Whether the initialization-condition checks were run.
    pub assumption1_checked: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            let extra = if self.assumption1_checked {
                " (including the initialization condition)"
            } else {
                ""
            };
            return writeln!(f, "all checks passed{extra}");
        }
        for issue in &self.issues {
            writeln!(f, "FAIL: {issue}")?;
        }
        Ok(())
    }
}

fn intersect(
    report: &mut ValidationReport,
    sets: &[&ConvexSet],
    config: &SolverConfig,
    backend: &dyn ConicBackend,
) -> Option<bool> {
    match sets_intersect(sets, INTERSECT_TOL, backend, &config.backend) {
        Ok(found) => Some(found),
        Err(e) => {
            report.issues.push(ValidationIssue::Backend {
                message: e.to_string(),
            });
            None
        }
    }
}

pub(super) fn validate_with(
    problem: &ProblemInstance,
    config: &SolverConfig,
    backend: &dyn ConicBackend,
) -> ValidationReport {
    let mut report = ValidationReport {
        issues: Vec::new(),
        assumption1_checked: config.options.assumption1_check,
    };
    if let Err(e) = config.validate() {
        report.issues.push(ValidationIssue::Config {
            message: e.to_string(),
        });
    }
    let sets = problem.safe_sets();
    let last = sets.len() - 1;

    let r_init = sets[0].residual(problem.q_init()).unwrap_or(f64::INFINITY);
    if r_init > POINT_TOL {
        report
            .issues
            .push(ValidationIssue::InitialPointOutside { residual: r_init });
    }
    let r_term = sets[last]
        .residual(problem.q_term())
        .unwrap_or(f64::INFINITY);
    if r_term > POINT_TOL {
        report
            .issues
            .push(ValidationIssue::TerminalPointOutside { residual: r_term });
    }
    for i in 0..last {
        if intersect(&mut report, &[&sets[i], &sets[i + 1]], config, backend) == Some(false) {
            report.issues.push(ValidationIssue::DisjointConsecutive {
                first: i + 1,
                second: i + 2,
            });
        }
    }
    if !problem.velocity_set().contains_origin_strictly() {
        report
            .issues
            .push(ValidationIssue::VelocitySetExcludesOrigin);
    }
    if !problem.acceleration_set().contains_origin_strictly() {
        report
            .issues
            .push(ValidationIssue::AccelerationSetExcludesOrigin);
    }

    if config.options.assumption1_check && last >= 1 {
        if sets[1].residual(problem.q_init()).unwrap_or(f64::INFINITY) <= POINT_TOL {
            report.issues.push(ValidationIssue::InitialPointInSecondSet);
        }
        if sets[last - 1]
            .residual(problem.q_term())
            .unwrap_or(f64::INFINITY)
            <= POINT_TOL
        {
            report
                .issues
                .push(ValidationIssue::TerminalPointInPenultimateSet);
        }
        for i in 0..last.saturating_sub(1) {
            let triple = [&sets[i], &sets[i + 1], &sets[i + 2]];
            if intersect(&mut report, &triple, config, backend) == Some(true) {
                report
                    .issues
                    .push(ValidationIssue::TripleOverlap { first: i + 1 });
            }
        }
    }
    report
}

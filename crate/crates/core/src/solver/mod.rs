//! Problem validation, initialization and the alternation between the two
//! convex restrictions.
//!
//! [`solve`] starts from a rest-to-rest trajectory and then alternates between
//! the fixed-points and fixed-velocity restrictions, each seeded with the
//! incumbent's transition data and traversal times. Every accepted iterate is
//! feasible, so the loop can stop at any point and still return a valid answer.

mod feasibility;
mod init;
mod problem;
mod trajectory;
mod validate;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::conic::{BackendConfig, ClarabelBackend, ConicBackend, SolveStatus};
use crate::subproblems::{
    build_fixed_points, build_fixed_velocity, decode_trajectory, NominalTimes, SubproblemKind,
    SubproblemOptions,
};
use crate::{Error, Result};

pub use feasibility::{check_feasibility, FeasibilityReport, TierResiduals};
pub use problem::ProblemInstance;
pub use trajectory::{Segment, Trajectory};
pub use validate::{ValidationIssue, ValidationReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Forces zero acceleration on both sides of every junction (needs degree ≥ 5).
    pub zero_transition_acceleration: bool,
    /// Lower bound on every traversal time; `0` disables it.
    pub min_traversal_time: f64,
    /// Also check the separation conditions on boundary points and triple overlaps.
    pub assumption1_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub degree: usize,
    /// Stop once two consecutive subproblems of one kind improve by less than this fraction.
    pub tolerance: f64,
    pub max_subproblems: usize,
    pub options: SolverOptions,
    pub backend: BackendConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            degree: 5,
            tolerance: 0.01,
            max_subproblems: 100,
            options: SolverOptions::default(),
            backend: BackendConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 3 {
            return Err(Error::invalid(format!(
                "Bézier degree must be at least 3, got {}",
                self.degree
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1.0) {
            return Err(Error::invalid(format!(
                "termination tolerance must lie in (0, 1], got {}",
                self.tolerance
            )));
        }
        if self.max_subproblems == 0 {
            return Err(Error::invalid("max_subproblems must be at least 1"));
        }
        self.subproblem_options().validate(self.degree)?;
        self.backend.validate()
    }

    pub fn subproblem_options(&self) -> SubproblemOptions {
        SubproblemOptions {
            zero_transition_acceleration: self.options.zero_transition_acceleration,
            min_traversal_time: self.options.min_traversal_time,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ToleranceMet,
    MaxSubproblems,
    BackendFailureAnytime,
}

/// One alternation solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub kind: SubproblemKind,
    /// Total duration of the incumbent after this solve.
    pub objective: f64,
    /// Seconds spent building, solving and decoding.
    pub wall_time: f64,
    pub status: SolveStatus,
    /// Whether the decoded trajectory replaced the incumbent.
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub trajectory: Trajectory,
    pub initialization_objective: f64,
    /// Seconds spent in initialization.
    pub initialization_time: f64,
    pub iterations: Vec<IterationRecord>,
    pub termination: Termination,
}

impl SolveReport {
    pub fn objective(&self) -> f64 {
        self.trajectory.total_duration()
    }

    pub fn num_subproblems(&self) -> usize {
        self.iterations.len()
    }

    /// Objectives of the records of one kind, in order.
    pub fn objectives_of(&self, kind: SubproblemKind) -> Vec<f64> {
        self.iterations
            .iter()
            .filter(|r| r.kind == kind)
            .map(|r| r.objective)
            .collect()
    }

    pub fn total_wall_time(&self) -> f64 {
        self.initialization_time + self.iterations.iter().map(|r| r.wall_time).sum::<f64>()
    }
}

pub fn validate(problem: &ProblemInstance, config: &SolverConfig) -> ValidationReport {
    validate::validate_with(problem, config, &ClarabelBackend)
}

pub fn validate_with_backend(
    problem: &ProblemInstance,
    config: &SolverConfig,
    backend: &dyn ConicBackend,
) -> ValidationReport {
    validate::validate_with(problem, config, backend)
}

/// Feasible trajectory with `I` segments that stops at every polygon vertex.
pub fn initialize(problem: &ProblemInstance, config: &SolverConfig) -> Result<Trajectory> {
    init::initialize_with(problem, config, &ClarabelBackend)
}

pub fn initialize_with_backend(
    problem: &ProblemInstance,
    config: &SolverConfig,
    backend: &dyn ConicBackend,
) -> Result<Trajectory> {
    init::initialize_with(problem, config, backend)
}

pub fn solve(problem: &ProblemInstance, config: &SolverConfig) -> Result<SolveReport> {
    solve_with_backend(problem, config, &ClarabelBackend)
}

/// Runs initialization and the alternation.
///
/// Errors only when no feasible incumbent exists yet (invalid configuration or a
/// failed initialization). Later backend failures end the loop with
/// [`Termination::BackendFailureAnytime`] and the last accepted trajectory.
pub fn solve_with_backend(
    problem: &ProblemInstance,
    config: &SolverConfig,
    backend: &dyn ConicBackend,
) -> Result<SolveReport> {
    config.validate()?;
    let started = Instant::now();
    let mut incumbent = init::initialize_with(problem, config, backend)?;
    let initialization_time = started.elapsed().as_secs_f64();
    let initialization_objective = incumbent.total_duration();
    log::info!("initialization: T = {initialization_objective:.6}");

    let options = config.subproblem_options();
    let mut iterations = Vec::new();
    let mut last_of_kind: [Option<f64>; 2] = [None, None];
    let mut kind = SubproblemKind::FixedPoints;
    let mut termination = Termination::MaxSubproblems;

    while iterations.len() < config.max_subproblems {
        let clock = Instant::now();
        let nominal = NominalTimes::from_trajectory(&incumbent);
        let data = incumbent.transition_data();
        let built = match kind {
            SubproblemKind::FixedPoints => {
                build_fixed_points(problem, config.degree, &data.points, &nominal, &options)
            }
            SubproblemKind::FixedVelocity => {
                build_fixed_velocity(problem, config.degree, &data.velocities, &nominal, &options)
            }
        };
        let outcome = built.and_then(|(program, layout)| {
            let solution = backend.solve(&program, &config.backend);
            let status = solution.status;
            Ok((status, decode_trajectory(&layout, &solution)))
        });

        let incumbent_objective = incumbent.total_duration();
        let (status, decoded) = match outcome {
            Ok((status, decoded)) => (status, decoded),
            Err(e) => (SolveStatus::NumericalFailure, Err(e)),
        };
        let candidate = match decoded {
            Ok(t) => t,
            Err(e) => {
                log::warn!("{kind:?} subproblem failed ({e}); returning the incumbent");
                iterations.push(IterationRecord {
                    kind,
                    objective: incumbent_objective,
                    wall_time: clock.elapsed().as_secs_f64(),
                    status: if status == SolveStatus::Optimal {
                        SolveStatus::NumericalFailure
                    } else {
                        status
                    },
                    accepted: false,
                });
                termination = Termination::BackendFailureAnytime;
                break;
            }
        };

        let accepted = candidate.total_duration() <= incumbent_objective;
        if accepted {
            incumbent = candidate;
        }
        let objective = incumbent.total_duration();
        log::info!(
            "subproblem {} ({kind:?}): T = {objective:.6}{}",
            iterations.len() + 1,
            if accepted {
                ""
            } else {
                " (rejected, no improvement)"
            }
        );
        iterations.push(IterationRecord {
            kind,
            objective,
            wall_time: clock.elapsed().as_secs_f64(),
            status,
            accepted,
        });

        if let Some(prev) = last_of_kind[kind.index()] {
            if (prev - objective) / prev < config.tolerance {
                termination = Termination::ToleranceMet;
                break;
            }
        }
        last_of_kind[kind.index()] = Some(objective);
        kind = kind.other();
    }

    Ok(SolveReport {
        trajectory: incumbent,
        initialization_objective,
        initialization_time,
        iterations,
        termination,
    })
}

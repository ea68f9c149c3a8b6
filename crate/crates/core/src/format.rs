//! On-disk JSON formats for problems, trajectories and solve reports.
//!
//! Every file carries `"version": 1`. Loading any other version fails with
//! [`Error::UnsupportedVersion`].

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bezier::BezierCurve;
use crate::geometry::ConvexSet;
use crate::solver::{ProblemInstance, Segment, SolveReport, Trajectory};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Continuity tolerances enforced when a trajectory file is loaded.
pub const POSITION_CONTINUITY_TOL: f64 = 1e-7;
pub const VELOCITY_CONTINUITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub dimension: usize,
    pub sets: Vec<ConvexSet>,
    pub q_init: Vec<f64>,
    pub q_term: Vec<f64>,
    pub velocity_set: ConvexSet,
    pub acceleration_set: ConvexSet,
}

impl ProblemFile {
    pub fn from_problem(problem: &ProblemInstance) -> Self {
        ProblemFile {
            version: FORMAT_VERSION,
            dimension: problem.dim(),
            sets: problem.safe_sets().to_vec(),
            q_init: problem.q_init().to_vec(),
            q_term: problem.q_term().to_vec(),
            velocity_set: problem.velocity_set().clone(),
            acceleration_set: problem.acceleration_set().clone(),
        }
    }

    pub fn into_problem(self) -> Result<ProblemInstance> {
        if self.q_init.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: self.q_init.len(),
            });
        }
        ProblemInstance::new(
            self.sets,
            self.q_init,
            self.q_term,
            self.velocity_set,
            self.acceleration_set,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentRecord {
    pub duration: f64,
    pub control_points: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub version: u32,
    pub degree: usize,
    pub segments: Vec<SegmentRecord>,
}

impl TrajectoryFile {
    pub fn from_trajectory(trajectory: &Trajectory) -> Self {
        TrajectoryFile {
            version: FORMAT_VERSION,
            degree: trajectory.degree(),
            segments: trajectory
                .segments()
                .iter()
                .map(|s| SegmentRecord {
                    duration: s.duration,
                    control_points: s.curve.control_points().to_vec(),
                })
                .collect(),
        }
    }

    pub fn into_trajectory(self) -> Result<Trajectory> {
        let segments = self
            .segments
            .into_iter()
            .map(|s| Segment::new(BezierCurve::new(s.control_points)?, s.duration))
            .collect::<Result<Vec<_>>>()?;
        let trajectory = Trajectory::new(segments)?;
        if trajectory.degree() != self.degree {
            return Err(Error::Parse(format!(
                "declared degree {} but control points give degree {}",
                self.degree,
                trajectory.degree()
            )));
        }
        trajectory.validate_continuity(POSITION_CONTINUITY_TOL, VELOCITY_CONTINUITY_TOL)?;
        Ok(trajectory)
    }
}

/// Parses `text`, checking the version tag before the rest of the document.
fn parse_versioned<T: DeserializeOwned>(text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let version = value
        .get("version")
        .ok_or_else(|| Error::Parse("missing \"version\" field".into()))?
        .as_u64()
        .ok_or_else(|| Error::Parse("\"version\" must be a nonnegative integer".into()))?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(Error::UnsupportedVersion {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            supported: FORMAT_VERSION,
        });
    }
    Ok(serde_json::from_value(value)?)
}

pub fn problem_from_str(text: &str) -> Result<ProblemInstance> {
    parse_versioned::<ProblemFile>(text)?.into_problem()
}

pub fn problem_to_string(problem: &ProblemInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ProblemFile::from_problem(
        problem,
    ))?)
}

pub fn trajectory_from_str(text: &str) -> Result<Trajectory> {
    parse_versioned::<TrajectoryFile>(text)?.into_trajectory()
}

pub fn trajectory_to_string(trajectory: &Trajectory) -> Result<String> {
    Ok(serde_json::to_string_pretty(
        &TrajectoryFile::from_trajectory(trajectory),
    )?)
}

pub fn load_problem(path: &Path) -> Result<ProblemInstance> {
    problem_from_str(&fs::read_to_string(path)?)
}

pub fn save_problem(path: &Path, problem: &ProblemInstance) -> Result<()> {
    Ok(fs::write(path, problem_to_string(problem)?)?)
}

pub fn load_trajectory(path: &Path) -> Result<Trajectory> {
    trajectory_from_str(&fs::read_to_string(path)?)
}

pub fn save_trajectory(path: &Path, trajectory: &Trajectory) -> Result<()> {
    Ok(fs::write(path, trajectory_to_string(trajectory)?)?)
}

#[derive(Serialize)]
struct ReportFile<'a> {
    version: u32,
    #[serde(flatten)]
    report: &'a SolveReport,
}

pub fn report_to_string(report: &SolveReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ReportFile {
        version: FORMAT_VERSION,
        report,
    })?)
}

pub fn save_report(path: &Path, report: &SolveReport) -> Result<()> {
    Ok(fs::write(path, report_to_string(report)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_problem() -> ProblemInstance {
        ProblemInstance::new(
            vec![ConvexSet::axis_box(&[-1.0, -1.0], &[2.0, 1.0]).unwrap()],
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            ConvexSet::ball(vec![0.0, 0.0], 10.0).unwrap(),
            ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn problem_round_trip() {
        let p = tiny_problem();
        let text = problem_to_string(&p).unwrap();
        assert!(text.contains("\"version\": 1"));
        assert_eq!(problem_from_str(&text).unwrap(), p);
    }

    #[test]
    fn future_version_names_the_version() {
        let text = problem_to_string(&tiny_problem())
            .unwrap()
            .replace("\"version\": 1", "\"version\": 7");
        let err = problem_from_str(&text).unwrap_err();
        assert!(matches!(
            err,
            Error::UnsupportedVersion {
                found: 7,
                supported: 1
            }
        ));
        assert!(err.to_string().contains('7'));
    }

    #[test]
    fn missing_version_is_a_parse_error() {
        assert!(matches!(
            problem_from_str("{\"dimension\": 2}"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(problem_from_str("not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn trajectory_round_trip_and_continuity_check() {
        let curve = BezierCurve::scalar(&[0.0, 0.0, 2.0, 2.0]).unwrap();
        let (l, r) = curve.split(0.5).unwrap();
        let traj = Trajectory::new(vec![
            Segment::new(l, 1.0).unwrap(),
            Segment::new(r, 1.0).unwrap(),
        ])
        .unwrap();
        let text = trajectory_to_string(&traj).unwrap();
        assert_eq!(trajectory_from_str(&text).unwrap(), traj);

        let mut file = TrajectoryFile::from_trajectory(&traj);
        file.segments[1].control_points[0][0] += 0.1;
        assert!(file.into_trajectory().is_err());
    }

    #[test]
    fn declared_degree_must_match() {
        let traj = Trajectory::new(vec![Segment::new(
            BezierCurve::scalar(&[0.0, 0.0, 1.0, 1.0]).unwrap(),
            1.0,
        )
        .unwrap()])
        .unwrap();
        let mut file = TrajectoryFile::from_trajectory(&traj);
        file.degree = 5;
        assert!(file.into_trajectory().is_err());
    }
}

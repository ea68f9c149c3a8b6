//! Minimum-time trajectory planning through a fixed sequence of convex safe sets.
//!
//! A trajectory is a chain of Bézier segments, one per safe set, each with its own
//! traversal time. The solver starts from a polygonal trajectory that stops at every
//! kink, then alternates between two convex restrictions of the nonconvex
//! minimum-time problem:
//!
//! - transition **points** fixed, traversal-time reciprocals free ([`subproblems::build_fixed_points`]);
//! - transition **velocities** fixed, traversal times free ([`subproblems::build_fixed_velocity`]).
//!
//! Each restriction admits the incumbent trajectory, so the total duration never
//! increases and every intermediate trajectory is feasible.
//!
//! ```no_run
//! use mintime::bench::{staircase_instance, StaircaseSpec};
//! use mintime::solver::{solve, SolverConfig};
//!
//! let problem = staircase_instance(&StaircaseSpec::new(5, 4, 2)).unwrap();
//! let report = solve(&problem, &SolverConfig::default()).unwrap();
//! println!("T = {:.3}", report.trajectory.total_duration());
//! ```

pub mod bench;
pub mod bezier;
pub mod conic;
mod error;
pub mod format;
pub mod geometry;
mod linalg;
pub mod solver;
pub mod subproblems;

pub use error::{Error, Result};

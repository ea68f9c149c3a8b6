use serde::{Deserialize, Serialize};

use crate::geometry::ConvexSet;
use crate::{Error, Result};

/// Safe sets `Q_1 … Q_I`, boundary points, and the velocity/acceleration sets.
///
/// Construction checks shapes only. Semantic conditions (membership of the
/// endpoints, consecutive overlaps, the origin inside `V` and `A`) are reported by
/// [`super::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    safe_sets: Vec<ConvexSet>,
    q_init: Vec<f64>,
    q_term: Vec<f64>,
    velocity_set: ConvexSet,
    acceleration_set: ConvexSet,
}

impl ProblemInstance {
    pub fn new(
        safe_sets: Vec<ConvexSet>,
        q_init: Vec<f64>,
        q_term: Vec<f64>,
        velocity_set: ConvexSet,
        acceleration_set: ConvexSet,
    ) -> Result<Self> {
        if safe_sets.is_empty() {
            return Err(Error::invalid("at least one safe set is required"));
        }
        let n = q_init.len();
        if n == 0 {
            return Err(Error::invalid("space dimension must be positive"));
        }
        let check = |found: usize| {
            if found != n {
                Err(Error::DimensionMismatch { expected: n, found })
            } else {
                Ok(())
            }
        };
        check(q_term.len())?;
        check(velocity_set.dim())?;
        check(acceleration_set.dim())?;
        for set in &safe_sets {
            check(set.dim())?;
        }
        if q_init.iter().chain(&q_term).any(|v| !v.is_finite()) {
            return Err(Error::invalid("boundary points must be finite"));
        }
        Ok(ProblemInstance {
            safe_sets,
            q_init,
            q_term,
            velocity_set,
            acceleration_set,
        })
    }

    pub fn dim(&self) -> usize {
        self.q_init.len()
    }

    pub fn num_sets(&self) -> usize {
        self.safe_sets.len()
    }

    pub fn safe_sets(&self) -> &[ConvexSet] {
        &self.safe_sets
    }

    pub fn safe_set(&self, i: usize) -> &ConvexSet {
        &self.safe_sets[i]
    }

    pub fn q_init(&self) -> &[f64] {
        &self.q_init
    }

    pub fn q_term(&self) -> &[f64] {
        &self.q_term
    }

    pub fn velocity_set(&self) -> &ConvexSet {
        &self.velocity_set
    }

    pub fn acceleration_set(&self) -> &ConvexSet {
        &self.acceleration_set
    }
}

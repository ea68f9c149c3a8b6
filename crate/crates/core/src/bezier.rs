//! Bernstein polynomials and Bézier curves on `s ∈ [0, 1]`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `C(K, k)` by the multiplicative recurrence; exact in `f64` well past degree 30.
pub fn binomial(degree: usize, k: usize) -> f64 {
    if k > degree {
        return 0.0;
    }
    let k = k.min(degree - k);
    (0..k).fold(1.0, |acc, j| acc * (degree - j) as f64 / (j + 1) as f64)
}

fn check_param(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid(format!(
            "curve parameter {s} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Bernstein basis polynomial `C(K,k) s^k (1−s)^(K−k)`.
pub fn bernstein(degree: usize, k: usize, s: f64) -> Result<f64> {
    if k > degree {
        return Err(Error::invalid(format!(
            "basis index {k} exceeds degree {degree}"
        )));
    }
    check_param(s)?;
    Ok(binomial(degree, k) * s.powi(k as i32) * (1.0 - s).powi((degree - k) as i32))
}

/// Degree-`K` Bézier curve in `R^n` given by `K + 1` control points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct BezierCurve {
    control_points: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for BezierCurve {
    type Error = Error;
    fn try_from(points: Vec<Vec<f64>>) -> Result<Self> {
        BezierCurve::new(points)
    }
}

impl From<BezierCurve> for Vec<Vec<f64>> {
    fn from(curve: BezierCurve) -> Self {
        curve.control_points
    }
}

impl BezierCurve {
    pub fn new(control_points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = control_points.first() else {
            return Err(Error::invalid(
                "a Bézier curve needs at least one control point",
            ));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::invalid("control points must have dimension ≥ 1"));
        }
        if let Some(bad) = control_points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(BezierCurve { control_points })
    }

    /// Scalar curve from its control values.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn degree(&self) -> usize {
        self.control_points.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.control_points[0].len()
    }

    pub fn control_points(&self) -> &[Vec<f64>] {
        &self.control_points
    }

    pub fn first_point(&self) -> &[f64] {
        &self.control_points[0]
    }

    pub fn last_point(&self) -> &[f64] {
        &self.control_points[self.degree()]
    }

    /// De Casteljau evaluation.
    pub fn evaluate(&self, s: f64) -> Result<Vec<f64>> {
        check_param(s)?;
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> Vec<f64> {
        let mut work = self.control_points.clone();
        let t = 1.0 - s;
        for level in (1..work.len()).rev() {
            for k in 0..level {
                let (lo, hi) = work.split_at_mut(k + 1);
                for (a, b) in lo[k].iter_mut().zip(&hi[0]) {
                    *a = t * *a + s * b;
                }
            }
        }
        work.swap_remove(0)
    }

    /// Hodograph: degree `K − 1` with control points `K (γ_{k+1} − γ_k)`.
    pub fn derivative(&self) -> Result<BezierCurve> {
        let degree = self.degree();
        if degree == 0 {
            return Err(Error::invalid("cannot differentiate a degree-0 curve"));
        }
        let k = degree as f64;
        let points = self
            .control_points
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(b, a)| k * (b - a)).collect())
            .collect();
        Ok(BezierCurve {
            control_points: points,
        })
    }

    /// De Casteljau subdivision at `s`; `left(u) = γ(s·u)`, `right(u) = γ(s + (1−s)u)`.
    pub fn split(&self, s: f64) -> Result<(BezierCurve, BezierCurve)> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::invalid(format!(
                "split parameter {s} must lie in (0, 1)"
            )));
        }
        let len = self.control_points.len();
        let mut work = self.control_points.clone();
        let mut left = Vec::with_capacity(len);
        let mut right = Vec::with_capacity(len);
        left.push(work[0].clone());
        right.push(work[len - 1].clone());
        let t = 1.0 - s;
        for level in (1..len).rev() {
            for k in 0..level {
                let (lo, hi) = work.split_at_mut(k + 1);
                for (a, b) in lo[k].iter_mut().zip(&hi[0]) {
                    *a = t * *a + s * b;
                }
            }
            left.push(work[0].clone());
            right.push(work[level - 1].clone());
        }
        right.reverse();
        Ok((
            BezierCurve {
                control_points: left,
            },
            BezierCurve {
                control_points: right,
            },
        ))
    }

    /// Projection of the curve onto direction `d` relative to `origin`, as a scalar curve.
    pub fn project(&self, origin: &[f64], d: &[f64]) -> BezierCurve {
        let points = self
            .control_points
            .iter()
            .map(|p| {
                vec![p
                    .iter()
                    .zip(origin)
                    .zip(d)
                    .map(|((pi, oi), di)| (pi - oi) * di)
                    .sum()]
            })
            .collect();
        BezierCurve {
            control_points: points,
        }
    }

    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<BezierCurve> {
        BezierCurve::new(self.control_points.iter().map(|p| f(p)).collect())
    }
}

//! Convex sets: H-polytopes and Euclidean balls.
//!
//! Sets are validated once at construction and immutable afterwards. Besides
//! membership queries, a set can emit the cone constraints for `x ∈ λ·S`, which is
//! how every subproblem encodes position, velocity and acceleration limits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::conic::{self, AffineExpr, BackendConfig, ConeBlock, ConicBackend, ConicProgram};
use crate::linalg::{dot, norm, sub};
use crate::{Error, Result};

/// Membership tolerance used when callers have no better estimate.
pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    rename_all = "lowercase",
    try_from = "SetRepr",
    into = "SetRepr"
)]
pub enum ConvexSet {
    /// `{x : A x ≤ b}`, rows of `A` stored as `facet_normals`.
    Polytope {
        facet_normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// `{x : ‖x − center‖ ≤ radius}`.
    Ball { center: Vec<f64>, radius: f64 },
}

/// On-disk shape: `{"type":"polytope","A":[[…]],"b":[…]}` or
/// `{"type":"ball","center":[…],"radius":r}`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum SetRepr {
    Polytope {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
}

impl TryFrom<SetRepr> for ConvexSet {
    type Error = Error;

    fn try_from(repr: SetRepr) -> Result<Self> {
        match repr {
            SetRepr::Polytope { a, b } => ConvexSet::polytope(a, b),
            SetRepr::Ball { center, radius } => ConvexSet::ball(center, radius),
        }
    }
}

impl From<ConvexSet> for SetRepr {
    fn from(set: ConvexSet) -> Self {
        match set {
            ConvexSet::Polytope {
                facet_normals,
                offsets,
            } => SetRepr::Polytope {
                a: facet_normals,
                b: offsets,
            },
            ConvexSet::Ball { center, radius } => SetRepr::Ball { center, radius },
        }
    }
}

impl ConvexSet {
    /// Builds `{x : A x ≤ b}`; fails if the data are ragged, non-finite, or the set is empty.
    pub fn polytope(facet_normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        let set = Self::polytope_unchecked(facet_normals, offsets)?;
        if !set.is_nonempty()? {
            return Err(Error::InvalidSet("polytope is empty".into()));
        }
        Ok(set)
    }

    /// Shape checks only; the caller guarantees nonemptiness.
    fn polytope_unchecked(facet_normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if facet_normals.is_empty() {
            return Err(Error::InvalidSet(
                "polytope needs at least one facet".into(),
            ));
        }
        if facet_normals.len() != offsets.len() {
            return Err(Error::InvalidSet(format!(
                "{} facet normals but {} offsets",
                facet_normals.len(),
                offsets.len()
            )));
        }
        let n = facet_normals[0].len();
        if n == 0 {
            return Err(Error::InvalidSet("zero-dimensional polytope".into()));
        }
        for row in &facet_normals {
            if row.len() != n {
                return Err(Error::InvalidSet("ragged facet matrix".into()));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSet("non-finite facet normal".into()));
            }
        }
        if offsets.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSet("non-finite facet offset".into()));
        }
        Ok(ConvexSet::Polytope {
            facet_normals,
            offsets,
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidSet("zero-dimensional ball".into()));
        }
        if center.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSet("non-finite ball center".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSet(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    /// Axis-aligned box `lower ≤ x ≤ upper`.
    pub fn axis_box(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        let n = lower.len();
        let mut normals = Vec::with_capacity(2 * n);
        let mut offsets = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            normals.push(e.clone());
            offsets.push(upper[j]);
            e[j] = -1.0;
            normals.push(e);
            offsets.push(-lower[j]);
        }
        Self::polytope(normals, offsets)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Polytope { facet_normals, .. } => facet_normals[0].len(),
            ConvexSet::Ball { center, .. } => center.len(),
        }
    }

    pub fn num_facets(&self) -> Option<usize> {
        match self {
            ConvexSet::Polytope { offsets, .. } => Some(offsets.len()),
            ConvexSet::Ball { .. } => None,
        }
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// Largest membership violation: `max(Ax − b)` or `‖x − c‖ − ρ`.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(match self {
            ConvexSet::Polytope {
                facet_normals,
                offsets,
            } => facet_normals
                .iter()
                .zip(offsets)
                .map(|(a, b)| dot(a, x) - b)
                .fold(f64::NEG_INFINITY, f64::max),
            ConvexSet::Ball { center, radius } => norm(&sub(x, center)) - radius,
        })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.residual(x)? <= tol)
    }

    /// Whether the origin lies strictly inside, as required of velocity and acceleration sets.
    pub fn contains_origin_strictly(&self) -> bool {
        match self {
            ConvexSet::Polytope { offsets, .. } => offsets.iter().all(|&b| b > 0.0),
            ConvexSet::Ball { center, radius } => norm(center) < *radius,
        }
    }

    /// Cone blocks encoding `x ∈ λ·S`, exact for `λ > 0`.
    ///
    /// Polytopes give one nonnegative block `λb − Ax ≥ 0`; balls give one
    /// second-order block `‖x − λc‖ ≤ λρ`. Nonnegativity of `λ` is the caller's job.
    pub fn scaled_membership(
        &self,
        x: &[AffineExpr],
        lambda: &AffineExpr,
    ) -> Result<Vec<ConeBlock>> {
        self.check_dim(x.len())?;
        Ok(match self {
            ConvexSet::Polytope {
                facet_normals,
                offsets,
            } => {
                let rows = facet_normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, &b)| {
                        let mut row = lambda.scaled(b);
                        for (coef, xj) in a.iter().zip(x) {
                            if *coef != 0.0 {
                                row = row.plus(&xj.scaled(-coef));
                            }
                        }
                        row
                    })
                    .collect();
                vec![ConeBlock::nonneg(rows)]
            }
            ConvexSet::Ball { center, radius } => {
                let mut rows = Vec::with_capacity(x.len() + 1);
                rows.push(lambda.scaled(*radius));
                for (xj, &cj) in x.iter().zip(center) {
                    rows.push(if cj == 0.0 {
                        xj.clone()
                    } else {
                        xj.clone().plus(&lambda.scaled(-cj))
                    });
                }
                vec![ConeBlock::soc(rows)]
            }
        })
    }

    /// `max{λ ≥ 0 : λd ∈ S}` for a set containing the origin; `+∞` if unbounded along `d`.
    fn ray_extent(&self, d: &[f64]) -> f64 {
        match self {
            ConvexSet::Polytope {
                facet_normals,
                offsets,
            } => facet_normals
                .iter()
                .zip(offsets)
                .filter_map(|(a, &b)| {
                    let rate = dot(a, d);
                    (rate > 0.0).then(|| (b / rate).max(0.0))
                })
                .fold(f64::INFINITY, f64::min),
            ConvexSet::Ball { center, radius } => {
                // Largest root of ‖λd − c‖² = ρ² with ‖d‖ = 1.
                let dc = dot(d, center);
                let disc = dc * dc - dot(center, center) + radius * radius;
                (dc + disc.max(0.0).sqrt()).max(0.0)
            }
        }
    }

    /// Distances from the origin to the boundary along `d` and `−d`.
    ///
    /// Both are exact ray/boundary intersections: closed form for balls, the
    /// minimum facet ratio for polytopes. Unbounded directions give `f64::INFINITY`.
    pub fn directional_extent(&self, d: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(d.len())?;
        if (norm(d) - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("direction must be a unit vector"));
        }
        if !self.contains_origin_strictly() && self.residual(&vec![0.0; d.len()])? > 0.0 {
            return Err(Error::InvalidSet(
                "directional extent needs the origin inside the set".into(),
            ));
        }
        let back: Vec<f64> = d.iter().map(|v| -v).collect();
        Ok((self.ray_extent(d), self.ray_extent(&back)))
    }

    fn is_nonempty(&self) -> Result<bool> {
        sets_intersect(
            &[self],
            DEFAULT_TOL,
            &conic::ClarabelBackend,
            &BackendConfig::default(),
        )
    }
}

/// Decides whether all `sets` share a point.
///
/// Solves `min t` subject to every set being inflated by `t` (facets shifted out by
/// `t`, radii grown by `t`) and `t ≥ −1`. The program is always strictly feasible, so
/// the decision does not depend on the solver handling empty interiors. A common
/// point is accepted when the returned point passes `contains(·, tol)` for each set.
pub fn sets_intersect(
    sets: &[&ConvexSet],
    tol: f64,
    backend: &dyn ConicBackend,
    config: &BackendConfig,
) -> Result<bool> {
    let Some(first) = sets.first() else {
        return Err(Error::invalid("need at least one set"));
    };
    let n = first.dim();
    for s in sets {
        s.check_dim(n)?;
    }

    let mut program = ConicProgram::new();
    let xs = program.add_variables(n);
    let t = program.add_variables(1).start;
    let x: Vec<AffineExpr> = xs.map(AffineExpr::var).collect();
    let slack = AffineExpr::var(t);

    for set in sets {
        match set {
            ConvexSet::Polytope {
                facet_normals,
                offsets,
            } => {
                let rows = facet_normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, &b)| {
                        let scale = norm(a).max(f64::MIN_POSITIVE);
                        let mut row = slack.scaled(scale).with_constant(b);
                        for (coef, xj) in a.iter().zip(&x) {
                            row = row.plus(&xj.scaled(-coef));
                        }
                        row
                    })
                    .collect();
                program.add_block(ConeBlock::nonneg(rows))?;
            }
            ConvexSet::Ball { center, radius } => {
                let mut rows = vec![slack.clone().with_constant(*radius)];
                for (xj, &cj) in x.iter().zip(center) {
                    rows.push(xj.clone().with_constant(-cj));
                }
                program.add_block(ConeBlock::soc(rows))?;
            }
        }
    }
    program.add_block(ConeBlock::nonneg(vec![slack.clone().with_constant(1.0)]))?;
    program.add_objective_term(t, 1.0)?;

    let solution = backend.solve(&program, config);
    if !solution.is_optimal() {
        return Err(Error::solver(solution.status, "set intersection test"));
    }
    let point = &solution.primal[..n];
    for set in sets {
        if !set.contains(point, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn intersection_nonempty(
    a: &ConvexSet,
    b: &ConvexSet,
    tol: f64,
    backend: &dyn ConicBackend,
    config: &BackendConfig,
) -> Result<bool> {
    sets_intersect(&[a, b], tol, backend, config)
}

/// Polytope with `facets` facets circumscribing an ellipsoid.
///
/// The ellipsoid is `{c + R·diag(semi_axes)·y : ‖y‖ ≤ 1}` where the columns of
/// `axis_frame` (`R`) are orthonormal. Each facet is the image of the tangent plane
/// `u·y ≤ 1` of the unit sphere at a direction `u`:
///
/// - `n = 2`: the `facets`-th roots of unity (regular circumscribed polygon);
/// - `n > 2`, `facets == 2n`: `±` axis directions (tight box in the ellipsoid frame);
/// - `n > 2`, `facets > 2n`: the `2n` axis directions plus `facets − 2n` directions
///   drawn from a ChaCha8 stream seeded with `seed`;
/// - `n > 2`, `n + 1 ≤ facets < 2n`: the simplex directions `e_1 … e_n`,
///   `−(1,…,1)/√n`, plus seeded directions for the rest.
///
/// Facet normals are unit vectors.
pub fn ellipsoid_tangent_polytope(
    center: &[f64],
    semi_axes: &[f64],
    axis_frame: &[Vec<f64>],
    facets: usize,
    seed: u64,
) -> Result<ConvexSet> {
    let n = center.len();
    if semi_axes.len() != n || axis_frame.len() != n || axis_frame.iter().any(|c| c.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: semi_axes.len(),
        });
    }
    if n == 0 {
        return Err(Error::invalid("ellipsoid dimension must be positive"));
    }
    if facets < n + 1 {
        return Err(Error::invalid(format!(
            "{facets} facets cannot bound a {n}-dimensional polytope (need at least {})",
            n + 1
        )));
    }
    if semi_axes.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(Error::invalid("semi-axes must be positive"));
    }

    let directions = tangent_directions(n, facets, seed);
    let mut normals = Vec::with_capacity(facets);
    let mut offsets = Vec::with_capacity(facets);
    for u in &directions {
        // Normal in world frame: R · diag(1/a) · u, then normalized.
        let local: Vec<f64> = u.iter().zip(semi_axes).map(|(ui, ai)| ui / ai).collect();
        let mut normal = vec![0.0; n];
        for (col, &coef) in axis_frame.iter().zip(&local) {
            for (nj, cj) in normal.iter_mut().zip(col) {
                *nj += coef * cj;
            }
        }
        let scale = norm(&normal);
        let normal: Vec<f64> = normal.iter().map(|v| v / scale).collect();
        offsets.push((1.0 + dot(&normal, center) * scale) / scale);
        normals.push(normal);
    }
    ConvexSet::polytope_unchecked(normals, offsets)
}

/// Points where the facets of [`ellipsoid_tangent_polytope`] touch the ellipsoid.
pub fn ellipsoid_tangent_points(
    center: &[f64],
    semi_axes: &[f64],
    axis_frame: &[Vec<f64>],
    facets: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    tangent_directions(center.len(), facets, seed)
        .iter()
        .map(|u| {
            let mut x = center.to_vec();
            for ((col, &ui), &ai) in axis_frame.iter().zip(u).zip(semi_axes) {
                for (xj, cj) in x.iter_mut().zip(col) {
                    *xj += ai * ui * cj;
                }
            }
            x
        })
        .collect()
}

fn tangent_directions(n: usize, facets: usize, seed: u64) -> Vec<Vec<f64>> {
    if n == 2 {
        return (0..facets)
            .map(|j| {
                let angle = 2.0 * std::f64::consts::PI * j as f64 / facets as f64;
                vec![angle.cos(), angle.sin()]
            })
            .collect();
    }
    let unit = |j: usize, sign: f64| {
        let mut e = vec![0.0; n];
        e[j] = sign;
        e
    };
    let mut dirs: Vec<Vec<f64>> = if facets >= 2 * n {
        (0..n).flat_map(|j| [unit(j, 1.0), unit(j, -1.0)]).collect()
    } else {
        let mut d: Vec<Vec<f64>> = (0..n).map(|j| unit(j, 1.0)).collect();
        d.push(vec![-1.0 / (n as f64).sqrt(); n]);
        d
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < facets {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = norm(&v);
        if len > 1e-6 {
            dirs.push(v.iter().map(|x| x / len).collect());
        }
    }
    dirs
}

/// Identity frame for axis-aligned ellipsoids.
pub fn identity_frame(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect()
}

//! Staircase benchmark family and parameter sweeps.
//!
//! The staircase with `I` links walks `x_0 = 0`, `x_i = x_{i−1} + e_{j(i)}` with
//! `j(i) = ((i − 1) mod n) + 1`. Safe set `Q_i` is a polytope with `m` facets
//! circumscribing the ellipsoid centred at the link midpoint whose semi-axes are
//! `2/3` along the link and `1/6` across it. Velocity and acceleration sets are the
//! balls of radius 10 and 1 about the origin.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::geometry::{ellipsoid_tangent_polytope, ConvexSet};
use crate::linalg::distance;
use crate::solver::{
    check_feasibility, solve, validate, ProblemInstance, SolverConfig, Termination,
};
use crate::{Error, Result};

pub const MAIN_SEMI_AXIS: f64 = 2.0 / 3.0;
pub const CROSS_SEMI_AXIS: f64 = 1.0 / 6.0;
pub const VELOCITY_RADIUS: f64 = 10.0;
pub const ACCELERATION_RADIUS: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StaircaseSpec {
    pub num_sets: usize,
    pub facets: usize,
    pub dim: usize,
    pub seed: u64,
}

impl StaircaseSpec {
    pub fn new(num_sets: usize, facets: usize, dim: usize) -> Self {
        StaircaseSpec {
            num_sets,
            facets,
            dim,
            seed: DEFAULT_SEED,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_sets < 1 {
            return Err(Error::invalid("staircase needs at least one link"));
        }
        if self.dim < 2 {
            return Err(Error::invalid("staircase dimension must be at least 2"));
        }
        if self.facets < self.dim + 1 {
            return Err(Error::invalid(format!(
                "a {}-dimensional staircase needs at least {} facets, got {}",
                self.dim,
                self.dim + 1,
                self.facets
            )));
        }
        Ok(())
    }

    /// Whether the facet directions include seeded random samples.
    pub fn uses_sampled_directions(&self) -> bool {
        self.dim > 2 && self.facets != 2 * self.dim && self.facets != self.dim + 1
    }
}

/// Axis index (0-based) of link `i` (1-based).
fn link_axis(i: usize, dim: usize) -> usize {
    (i - 1) % dim
}

/// Staircase corners `x_0 … x_I`.
pub fn staircase_points(spec: &StaircaseSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let mut points = vec![vec![0.0; spec.dim]];
    for i in 1..=spec.num_sets {
        let mut next = points[i - 1].clone();
        next[link_axis(i, spec.dim)] += 1.0;
        points.push(next);
    }
    Ok(points)
}

pub fn staircase_instance(spec: &StaircaseSpec) -> Result<ProblemInstance> {
    let points = staircase_points(spec)?;
    let n = spec.dim;
    let mut sets = Vec::with_capacity(spec.num_sets);
    for i in 1..=spec.num_sets {
        let center: Vec<f64> = points[i - 1]
            .iter()
            .zip(&points[i])
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        // Columns e_j, e_{j+1}, … (cyclic) put the link axis first, so every set
        // is a rotated copy of the same polytope.
        let axis = link_axis(i, n);
        let frame: Vec<Vec<f64>> = (0..n)
            .map(|c| {
                let mut e = vec![0.0; n];
                e[(axis + c) % n] = 1.0;
                e
            })
            .collect();
        let mut semi_axes = vec![CROSS_SEMI_AXIS; n];
        semi_axes[0] = MAIN_SEMI_AXIS;
        sets.push(ellipsoid_tangent_polytope(
            &center,
            &semi_axes,
            &frame,
            spec.facets,
            spec.seed,
        )?);
    }
    ProblemInstance::new(
        sets,
        points[0].clone(),
        points[spec.num_sets].clone(),
        ConvexSet::ball(vec![0.0; n], VELOCITY_RADIUS)?,
        ConvexSet::ball(vec![0.0; n], ACCELERATION_RADIUS)?,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Sets,
    Facets,
    Dim,
    Degree,
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sets" => Ok(Sweep::Sets),
            "facets" => Ok(Sweep::Facets),
            "dim" => Ok(Sweep::Dim),
            "degree" => Ok(Sweep::Degree),
            other => Err(Error::invalid(format!(
                "unknown sweep key '{other}' (expected sets, facets, dim or degree)"
            ))),
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sweep::Sets => "sets",
            Sweep::Facets => "facets",
            Sweep::Dim => "dim",
            Sweep::Degree => "degree",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub spec: StaircaseSpec,
    pub degree: usize,
    pub epsilon: f64,
    pub objective: f64,
    pub initialization_objective: f64,
    pub subproblems: usize,
    pub wall_ms: f64,
    /// Largest control-point violation of the final trajectory.
    pub max_residual: f64,
    pub termination: Termination,
    /// Rest-to-rest bang-bang time over the straight line `q_init → q_term`, a
    /// lower bound on any feasible duration.
    pub lower_bound: f64,
}

/// Generates, validates and solves one staircase instance. Wall time covers the
/// solve only.
pub fn run_single(spec: &StaircaseSpec, config: &SolverConfig) -> Result<BenchRecord> {
    let problem = staircase_instance(spec)?;
    let report = validate(&problem, config);
    if !report.is_ok() {
        return Err(Error::invalid(format!(
            "generated instance is invalid: {report}"
        )));
    }
    let started = Instant::now();
    let solved = solve(&problem, config)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let feasibility = check_feasibility(&solved.trajectory, &problem, 2, 1e-6);
    let straight = distance(problem.q_init(), problem.q_term());
    Ok(BenchRecord {
        spec: *spec,
        degree: config.degree,
        epsilon: config.tolerance,
        objective: solved.objective(),
        initialization_objective: solved.initialization_objective,
        subproblems: solved.num_subproblems(),
        wall_ms,
        max_residual: feasibility.certificate.max(),
        termination: solved.termination,
        lower_bound: 2.0 * (straight / ACCELERATION_RADIUS).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub value: usize,
    pub result: std::result::Result<BenchRecord, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub sweep: Sweep,
    /// `wall_ms[k + 1] / wall_ms[k]` between consecutive successful entries.
    pub growth_ratios: Vec<f64>,
    pub subproblem_range: Option<(usize, usize)>,
    pub failures: usize,
    /// Facet directions were partly sampled from the seed (dimension above 2 and
    /// facet count other than `2n`).
    pub sampled_directions: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub entries: Vec<SuiteEntry>,
    pub summary: SuiteSummary,
}

impl SuiteResult {
    pub fn records(&self) -> impl Iterator<Item = &BenchRecord> {
        self.entries.iter().filter_map(|e| e.result.as_ref().ok())
    }

    /// CSV with header `I,m,n,K,epsilon,objective,subproblems,wall_ms,max_residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record([
            "I",
            "m",
            "n",
            "K",
            "epsilon",
            "objective",
            "subproblems",
            "wall_ms",
            "max_residual",
        ])?;
        for r in self.records() {
            writer.write_record([
                r.spec.num_sets.to_string(),
                r.spec.facets.to_string(),
                r.spec.dim.to_string(),
                r.degree.to_string(),
                r.epsilon.to_string(),
                r.objective.to_string(),
                r.subproblems.to_string(),
                format!("{:.3}", r.wall_ms),
                format!("{:e}", r.max_residual),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.summary;
        writeln!(
            f,
            "{:>8} {:>6} {:>4} {:>4} {:>3} {:>12} {:>5} {:>11} {:>7}",
            s.sweep, "I", "m", "n", "K", "objective", "subp", "wall_ms", "growth"
        )?;
        let mut ratio = s.growth_ratios.iter();
        let mut first = true;
        for e in &self.entries {
            match &e.result {
                Ok(r) => {
                    let g = if first {
                        "-".to_string()
                    } else {
                        ratio.next().map_or("-".into(), |g| format!("{g:.2}"))
                    };
                    first = false;
                    writeln!(
                        f,
                        "{:>8} {:>6} {:>4} {:>4} {:>3} {:>12.6} {:>5} {:>11.1} {:>7}",
                        e.value,
                        r.spec.num_sets,
                        r.spec.facets,
                        r.spec.dim,
                        r.degree,
                        r.objective,
                        r.subproblems,
                        r.wall_ms,
                        g
                    )?;
                }
                Err(msg) => writeln!(f, "{:>8} FAILED: {msg}", e.value)?,
            }
        }
        if let Some((lo, hi)) = s.subproblem_range {
            writeln!(f, "subproblems: {lo}..={hi}")?;
        }
        if s.failures > 0 {
            writeln!(f, "failures: {}", s.failures)?;
        }
        if s.sampled_directions {
            writeln!(f, "note: some facet directions were sampled from the seed")?;
        }
        Ok(())
    }
}

/// Applies one sweep value to the base spec and solver configuration.
pub fn sweep_point(
    sweep: Sweep,
    value: usize,
    base: &StaircaseSpec,
    config: &SolverConfig,
) -> (StaircaseSpec, SolverConfig) {
    let mut spec = *base;
    let mut cfg = config.clone();
    match sweep {
        Sweep::Sets => spec.num_sets = value,
        Sweep::Facets => spec.facets = value,
        Sweep::Dim => spec.dim = value,
        Sweep::Degree => cfg.degree = value,
    }
    (spec, cfg)
}

/// Runs the sweep. With `jobs > 1` entries run on a thread pool; records keep
/// the order of `values` either way.
pub fn run_suite(
    sweep: Sweep,
    values: &[usize],
    base: &StaircaseSpec,
    config: &SolverConfig,
    jobs: usize,
) -> Result<SuiteResult> {
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sweep values must be strictly increasing"));
    }
    let run = |&value: &usize| {
        let (spec, cfg) = sweep_point(sweep, value, base, config);
        let result = run_single(&spec, &cfg).map_err(|e| e.to_string());
        if let Err(msg) = &result {
            log::warn!("{sweep} = {value}: {msg}");
        }
        SuiteEntry { value, result }
    };
    let entries: Vec<SuiteEntry> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?;
        pool.install(|| values.par_iter().map(run).collect())
    } else {
        values.iter().map(run).collect()
    };

    let ok: Vec<&BenchRecord> = entries
        .iter()
        .filter_map(|e| e.result.as_ref().ok())
        .collect();
    let growth_ratios = ok.windows(2).map(|w| w[1].wall_ms / w[0].wall_ms).collect();
    let subproblem_range =
        ok.iter()
            .map(|r| r.subproblems)
            .fold(None, |acc: Option<(usize, usize)>, c| {
                Some(acc.map_or((c, c), |(lo, hi)| (lo.min(c), hi.max(c))))
            });
    let sampled_directions = values.iter().any(|&v| {
        sweep_point(sweep, v, base, config)
            .0
            .uses_sampled_directions()
    });
    Ok(SuiteResult {
        summary: SuiteSummary {
            sweep,
            growth_ratios,
            subproblem_range,
            failures: entries.len() - ok.len(),
            sampled_directions,
        },
        entries,
    })
}

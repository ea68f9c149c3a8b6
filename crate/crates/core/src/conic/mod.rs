//! A small conic-program builder.
//!
//! Programs have a linear objective and constraint blocks, each a list of affine
//! rows tagged with a cone:
//!
//! | tag        | meaning                                                  |
//! |------------|----------------------------------------------------------|
//! | `zero`     | every row equals 0                                       |
//! | `nonneg`   | every row is ≥ 0                                         |
//! | `soc`      | `row₀ ≥ ‖(row₁, …, rowₖ)‖`                               |
//! | `rsoc`     | `2·row₀·row₁ ≥ ‖(row₂, …, rowₖ)‖²`, `row₀, row₁ ≥ 0`     |
//!
//! Solving goes through the [`ConicBackend`] trait; [`ClarabelBackend`] is the
//! binding shipped with the crate.
//!
//! # Debug dump format
//!
//! [`ConicProgram::write_dump`] emits plain text:
//!
//! ```text
//! <num_vars> <num_blocks>
//! objective <nnz> <var>:<coef> ...
//! block <tag> <num_rows>
//! <constant> <nnz> <var>:<coef> ...      (one line per row)
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so two dumps of
//! the same program are byte-identical.

mod clarabel;

use std::fmt;
use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use self::clarabel::ClarabelBackend;

/// `Σ coef·x[var] + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffineExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffineExpr {
    pub fn constant(value: f64) -> Self {
        AffineExpr {
            terms: Vec::new(),
            constant: value,
        }
    }

    pub fn var(index: usize) -> Self {
        Self::term(index, 1.0)
    }

    pub fn term(index: usize, coef: f64) -> Self {
        AffineExpr {
            terms: vec![(index, coef)],
            constant: 0.0,
        }
    }

    pub fn with_term(mut self, index: usize, coef: f64) -> Self {
        if coef != 0.0 {
            self.terms.push((index, coef));
        }
        self
    }

    pub fn with_constant(mut self, value: f64) -> Self {
        self.constant += value;
        self
    }

    pub fn plus(mut self, other: &AffineExpr) -> Self {
        self.terms.extend_from_slice(&other.terms);
        self.constant += other.constant;
        self
    }

    pub fn minus(self, other: &AffineExpr) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        AffineExpr {
            terms: self.terms.iter().map(|&(i, c)| (i, c * factor)).collect(),
            constant: self.constant * factor,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>() + self.constant
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().map(|&(i, _)| i).max()
    }
}

impl From<f64> for AffineExpr {
    fn from(value: f64) -> Self {
        AffineExpr::constant(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cone {
    Zero,
    Nonnegative,
    SecondOrder,
    RotatedSecondOrder,
}

impl Cone {
    pub fn tag(self) -> &'static str {
        match self {
            Cone::Zero => "zero",
            Cone::Nonnegative => "nonneg",
            Cone::SecondOrder => "soc",
            Cone::RotatedSecondOrder => "rsoc",
        }
    }

    fn min_rows(self) -> usize {
        match self {
            Cone::Zero | Cone::Nonnegative => 1,
            Cone::SecondOrder => 2,
            Cone::RotatedSecondOrder => 3,
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One cone constraint: the vector of `rows` must lie in `cone`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeBlock {
    pub cone: Cone,
    pub rows: Vec<AffineExpr>,
}

impl ConeBlock {
    pub fn new(cone: Cone, rows: Vec<AffineExpr>) -> Self {
        ConeBlock { cone, rows }
    }

    pub fn zero(rows: Vec<AffineExpr>) -> Self {
        Self::new(Cone::Zero, rows)
    }

    pub fn nonneg(rows: Vec<AffineExpr>) -> Self {
        Self::new(Cone::Nonnegative, rows)
    }

    pub fn soc(rows: Vec<AffineExpr>) -> Self {
        Self::new(Cone::SecondOrder, rows)
    }

    pub fn rotated(rows: Vec<AffineExpr>) -> Self {
        Self::new(Cone::RotatedSecondOrder, rows)
    }

    /// Distance-like violation of the cone at `x`; zero or negative means satisfied.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let values: Vec<f64> = self.rows.iter().map(|r| r.eval(x)).collect();
        cone_residual(self.cone, &values)
    }
}

/// Violation of `values ∈ cone`, evaluated directly from the cone definition.
pub fn cone_residual(cone: Cone, values: &[f64]) -> f64 {
    match cone {
        Cone::Zero => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        Cone::Nonnegative => values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(-v)),
        Cone::SecondOrder => {
            let tail = values[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            tail - values[0]
        }
        Cone::RotatedSecondOrder => {
            let (u, w) = (values[0], values[1]);
            let tail_sq = values[2..].iter().map(|v| v * v).sum::<f64>();
            // Compared in norm units so the residual scales like the others.
            let product = (2.0 * u.max(0.0) * w.max(0.0)).sqrt();
            (-u).max(-w).max(tail_sq.sqrt() - product)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub usize);

/// Linear-objective conic program; see module docs for cone semantics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConicProgram {
    num_vars: usize,
    objective: Vec<(usize, f64)>,
    blocks: Vec<ConeBlock>,
}

impl ConicProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn blocks(&self) -> &[ConeBlock] {
        &self.blocks
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn num_rows(&self) -> usize {
        self.blocks.iter().map(|b| b.rows.len()).sum()
    }

    /// Appends `count` fresh variables and returns their contiguous index range.
    pub fn add_variables(&mut self, count: usize) -> Range<usize> {
        let start = self.num_vars;
        self.num_vars += count;
        start..self.num_vars
    }

    pub fn add_objective_term(&mut self, var: usize, coef: f64) -> Result<()> {
        self.check_var(var)?;
        self.objective.push((var, coef));
        Ok(())
    }

    pub fn add_block(&mut self, block: ConeBlock) -> Result<BlockId> {
        if block.rows.len() < block.cone.min_rows() {
            return Err(Error::MalformedBlock(format!(
                "{} block needs at least {} rows, got {}",
                block.cone,
                block.cone.min_rows(),
                block.rows.len()
            )));
        }
        for row in &block.rows {
            if let Some(var) = row.max_var() {
                self.check_var(var)?;
            }
            if !row.constant.is_finite() || row.terms.iter().any(|(_, c)| !c.is_finite()) {
                return Err(Error::MalformedBlock(format!(
                    "{} block has a non-finite coefficient",
                    block.cone
                )));
            }
        }
        self.blocks.push(block);
        Ok(BlockId(self.blocks.len() - 1))
    }

    /// Convenience for `add_block(ConeBlock::new(cone, rows))`.
    pub fn add_cone_block(&mut self, rows: Vec<AffineExpr>, cone: Cone) -> Result<BlockId> {
        self.add_block(ConeBlock::new(cone, rows))
    }

    pub fn add_blocks(&mut self, blocks: impl IntoIterator<Item = ConeBlock>) -> Result<()> {
        for block in blocks {
            self.add_block(block)?;
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(i, c)| c * x[i]).sum()
    }

    /// Largest cone violation over all blocks (≤ 0 when `x` is feasible).
    pub fn max_residual(&self, x: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.residual(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_var(&self, var: usize) -> Result<()> {
        if var >= self.num_vars {
            return Err(Error::MalformedBlock(format!(
                "variable {var} out of range (program has {})",
                self.num_vars
            )));
        }
        Ok(())
    }

    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.num_vars, self.blocks.len())?;
        write!(out, "objective {}", self.objective.len())?;
        for (i, c) in &self.objective {
            write!(out, " {i}:{c:?}")?;
        }
        writeln!(out)?;
        for block in &self.blocks {
            writeln!(out, "block {} {}", block.cone, block.rows.len())?;
            for row in &block.rows {
                write!(out, "{:?} {}", row.constant, row.terms.len())?;
                for (i, c) in &row.terms {
                    write!(out, " {i}:{c:?}")?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }

    pub fn dump_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dump(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("dump is ASCII")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    pub objective_value: f64,
}

impl Solution {
    pub fn failed(status: SolveStatus, num_vars: usize) -> Self {
        Solution {
            status,
            primal: vec![f64::NAN; num_vars],
            objective_value: f64::NAN,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Returns the solution if optimal, otherwise a solver error tagged with `context`.
    pub fn into_optimal(self, context: &str) -> Result<Self> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(Error::solver(self.status, context))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub feasibility_tol: f64,
    pub gap_tol: f64,
    pub max_iterations: u32,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            feasibility_tol: 1e-8,
            gap_tol: 1e-8,
            max_iterations: 200,
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.feasibility_tol > 0.0 && self.gap_tol > 0.0) {
            return Err(Error::invalid("backend tolerances must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("backend needs at least one iteration"));
        }
        Ok(())
    }
}

/// A conic solver. Implementations must be deterministic for fixed inputs and must
/// report failures through [`SolveStatus`] rather than panicking.
pub trait ConicBackend: Send + Sync {
    fn solve(&self, program: &ConicProgram, config: &BackendConfig) -> Solution;
}

/// Solves with the default backend.
pub fn solve(program: &ConicProgram, config: &BackendConfig) -> Solution {
    ClarabelBackend.solve(program, config)
}

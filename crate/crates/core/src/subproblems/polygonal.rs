use crate::conic::{AffineExpr, ConeBlock, ConicProgram, Solution};
use crate::linalg::distance;
use crate::solver::ProblemInstance;
use crate::{Error, Result};

/// Variable positions in the polygonal program.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalLayout {
    pub dim: usize,
    /// First index of `p_0 … p_I`.
    pub points: Vec<usize>,
    /// Epigraph variable `ℓ_i ≥ ‖p_i − p_{i−1}‖` for `i = 1 … I`.
    pub lengths: Vec<usize>,
}

impl PolygonalLayout {
    fn point(&self, i: usize) -> Vec<AffineExpr> {
        (self.points[i]..self.points[i] + self.dim)
            .map(AffineExpr::var)
            .collect()
    }
}

/// Shortest polygonal path `q_init = p_0, p_1, …, p_I = q_term` with
/// `p_i ∈ Q_i ∩ Q_{i+1}`. Objective `Σ ℓ_i`.
pub fn build_polygonal(problem: &ProblemInstance) -> Result<(ConicProgram, PolygonalLayout)> {
    let num = problem.num_sets();
    let n = problem.dim();
    let mut program = ConicProgram::new();
    let points: Vec<usize> = (0..=num).map(|_| program.add_variables(n).start).collect();
    let lengths: Vec<usize> = (0..num).map(|_| program.add_variables(1).start).collect();
    let layout = PolygonalLayout {
        dim: n,
        points,
        lengths,
    };

    let fix = |expr: Vec<AffineExpr>, value: &[f64]| {
        ConeBlock::zero(
            expr.into_iter()
                .zip(value)
                .map(|(e, &v)| e.with_constant(-v))
                .collect(),
        )
    };
    program.add_block(fix(layout.point(0), problem.q_init()))?;

    let unit = AffineExpr::constant(1.0);
    for i in 1..=num {
        let ell = layout.lengths[i - 1];
        program.add_objective_term(ell, 1.0)?;
        let mut rows = vec![AffineExpr::var(ell)];
        rows.extend(
            layout
                .point(i)
                .into_iter()
                .zip(layout.point(i - 1))
                .map(|(a, b)| a.minus(&b)),
        );
        program.add_block(ConeBlock::soc(rows))?;
        if i < num {
            let p = layout.point(i);
            program.add_blocks(problem.safe_set(i - 1).scaled_membership(&p, &unit)?)?;
            program.add_blocks(problem.safe_set(i).scaled_membership(&p, &unit)?)?;
        }
    }
    program.add_block(fix(layout.point(num), problem.q_term()))?;
    Ok((program, layout))
}

/// Extracts `p_0 … p_I`; the endpoints are returned exactly as `q_init`, `q_term`.
pub fn decode_polygonal(
    problem: &ProblemInstance,
    layout: &PolygonalLayout,
    solution: &Solution,
) -> Result<Vec<Vec<f64>>> {
    if !solution.is_optimal() {
        return Err(Error::solver(solution.status, "polygonal program"));
    }
    let x = &solution.primal;
    let last = layout.points.len() - 1;
    Ok(layout
        .points
        .iter()
        .enumerate()
        .map(|(i, &start)| match i {
            0 => problem.q_init().to_vec(),
            i if i == last => problem.q_term().to_vec(),
            _ => x[start..start + layout.dim].to_vec(),
        })
        .collect())
}

/// Indices of the polygon's vertices: `0`, `I`, and every interior point that is
/// not on the line through its neighbours.
///
/// Point `i` is dropped when the triangle inequality is tight up to `rel_tol`:
/// `‖p_{i+1} − p_{i−1}‖ ≥ (1 − rel_tol)(‖p_{i+1} − p_i‖ + ‖p_i − p_{i−1}‖)`.
pub fn select_vertices(points: &[Vec<f64>], rel_tol: f64) -> Vec<usize> {
    let last = points.len().saturating_sub(1);
    let mut vertices = vec![0];
    for i in 1..last {
        let a = distance(&points[i], &points[i - 1]);
        let b = distance(&points[i + 1], &points[i]);
        let direct = distance(&points[i + 1], &points[i - 1]);
        if direct < a + b - rel_tol * (a + b) {
            vertices.push(i);
        }
    }
    if last > 0 {
        vertices.push(last);
    }
    vertices
}

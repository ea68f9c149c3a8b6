use std::panic::{catch_unwind, AssertUnwindSafe};

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::{AffineExpr, BackendConfig, Cone, ConicBackend, ConicProgram, Solution, SolveStatus};

/// Interior-point backend built on the Clarabel solver.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClarabelBackend;

/// Program in Clarabel's `A x + s = b, s ∈ K` form.
struct StandardForm {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    b: Vec<f64>,
    cones: Vec<SupportedConeT<f64>>,
}

impl StandardForm {
    fn new() -> Self {
        StandardForm {
            rows: Vec::new(),
            cols: Vec::new(),
            vals: Vec::new(),
            b: Vec::new(),
            cones: Vec::new(),
        }
    }

    // A row e(x) = a·x + c placed in a cone becomes s = e(x), i.e. (-a)·x + s = c.
    fn push_row(&mut self, expr: &AffineExpr) {
        let r = self.b.len();
        for &(j, c) in &expr.terms {
            self.rows.push(r);
            self.cols.push(j);
            self.vals.push(-c);
        }
        self.b.push(expr.constant);
    }

    fn from_program(program: &ConicProgram) -> Self {
        let mut form = StandardForm::new();
        for block in program.blocks() {
            match block.cone {
                Cone::Zero => {
                    block.rows.iter().for_each(|r| form.push_row(r));
                    form.cones.push(SupportedConeT::ZeroConeT(block.rows.len()));
                }
                Cone::Nonnegative => {
                    block.rows.iter().for_each(|r| form.push_row(r));
                    form.cones
                        .push(SupportedConeT::NonnegativeConeT(block.rows.len()));
                }
                Cone::SecondOrder => {
                    block.rows.iter().for_each(|r| form.push_row(r));
                    form.cones
                        .push(SupportedConeT::SecondOrderConeT(block.rows.len()));
                }
                Cone::RotatedSecondOrder => {
                    // 2uw ≥ ‖x‖², u, w ≥ 0  ⇔  u + w ≥ ‖(u − w, √2·x)‖.
                    let (u, w) = (&block.rows[0], &block.rows[1]);
                    form.push_row(&u.clone().plus(w));
                    form.push_row(&u.clone().minus(w));
                    for r in &block.rows[2..] {
                        form.push_row(&r.scaled(std::f64::consts::SQRT_2));
                    }
                    form.cones
                        .push(SupportedConeT::SecondOrderConeT(block.rows.len()));
                }
            }
        }
        form
    }
}

fn map_status(status: SolverStatus) -> Option<SolveStatus> {
    match status {
        SolverStatus::Solved => Some(SolveStatus::Optimal),
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            Some(SolveStatus::Infeasible)
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            Some(SolveStatus::Unbounded)
        }
        // Reduced-accuracy and stalled solutions are screened against the residual checker.
        SolverStatus::AlmostSolved | SolverStatus::InsufficientProgress => None,
        _ => Some(SolveStatus::NumericalFailure),
    }
}

impl ConicBackend for ClarabelBackend {
    fn solve(&self, program: &ConicProgram, config: &BackendConfig) -> Solution {
        let n = program.num_vars();
        let mut q = vec![0.0; n];
        for &(i, c) in program.objective() {
            q[i] += c;
        }

        if program.blocks().is_empty() {
            return if q.iter().all(|&c| c == 0.0) {
                Solution {
                    status: SolveStatus::Optimal,
                    primal: vec![0.0; n],
                    objective_value: 0.0,
                }
            } else {
                Solution::failed(SolveStatus::Unbounded, n)
            };
        }

        let form = StandardForm::from_program(program);
        let m = form.b.len();
        let a = CscMatrix::new_from_triplets(m, n, form.rows, form.cols, form.vals);
        let p = CscMatrix::<f64>::zeros((n, n));

        let settings = match DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(config.max_iterations)
            .tol_feas(config.feasibility_tol)
            .tol_gap_abs(config.gap_tol)
            .tol_gap_rel(config.gap_tol)
            .build()
        {
            Ok(s) => s,
            Err(err) => {
                log::error!("invalid backend settings: {err}");
                return Solution::failed(SolveStatus::NumericalFailure, n);
            }
        };

        let outcome = catch_unwind(AssertUnwindSafe(|| {
            let mut solver = DefaultSolver::new(&p, &q, &a, &form.b, &form.cones, settings)
                .map_err(|e| e.to_string())?;
            solver.solve();
            log::debug!(
                "clarabel: {} iterations, status {:?}, {} rows",
                solver.info.iterations,
                solver.solution.status,
                m
            );
            Ok::<_, String>((
                solver.solution.status,
                solver.solution.x.clone(),
                solver.solution.obj_val,
                solver.info.gap_rel.min(solver.info.gap_abs),
            ))
        }));

        let (status, x, obj, gap) = match outcome {
            Ok(Ok(result)) => result,
            Ok(Err(msg)) => {
                log::error!("backend rejected program: {msg}");
                return Solution::failed(SolveStatus::NumericalFailure, n);
            }
            Err(_) => {
                log::error!("backend panicked");
                return Solution::failed(SolveStatus::NumericalFailure, n);
            }
        };

        let status = match map_status(status) {
            Some(s) => s,
            None => {
                let residual = program.max_residual(&x);
                if residual <= 100.0 * config.feasibility_tol && gap <= 100.0 * config.gap_tol {
                    log::debug!(
                        "accepting {status:?} solution (residual {residual:e}, gap {gap:e})"
                    );
                    SolveStatus::Optimal
                } else {
                    SolveStatus::NumericalFailure
                }
            }
        };

        match status {
            SolveStatus::Optimal => Solution {
                status,
                objective_value: program.objective_value(&x),
                primal: x,
            },
            _ => Solution {
                status,
                primal: x,
                objective_value: obj,
            },
        }
    }
}

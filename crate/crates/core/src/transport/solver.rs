//! Damped Newton ascent on the concave dual functional, with the gauge `w_S = 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{PowerDiagram, TransportError, TransportProblem, WeightVector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    /// Largest `|area − target|` over all cells at the returned weights.
    pub residual: f64,
    /// Dual objective at every accepted iterate, starting with the initial weights.
    pub objective_history: Vec<f64>,
    pub step_sizes: Vec<f64>,
    /// Iterations that fell back to a gradient step.
    pub gradient_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub weights: WeightVector,
    pub diagram: PowerDiagram,
    pub diagnostics: SolverDiagnostics,
}

fn residual(areas: &[f64], targets: &[f64]) -> f64 {
    areas.iter().zip(targets).map(|(a, t)| (a - t).abs()).fold(0.0, f64::max)
}

/// Weights whose power diagram gives every cell its target area, starting from zero weights.
pub fn solve_weights(problem: &TransportProblem) -> Result<Solution, TransportError> {
    solve_weights_from(problem, &WeightVector::zeros(problem.sites.len()))
}

pub fn solve_weights_from(problem: &TransportProblem, init: &WeightVector) -> Result<Solution, TransportError> {
    problem.validate()?;
    let n = problem.sites.len();
    let targets = problem.all_targets();
    let diagram_at = |w: &WeightVector| PowerDiagram::compute(problem.r_minus, problem.r_plus, &problem.sites, w);
    let mut w = init.normalized();
    let mut d = diagram_at(&w);
    let mut areas = d.areas();
    let min_area = areas.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_area > 0.0) {
        return Err(TransportError::InvalidProblem("the initial weights leave a cell empty".into()));
    }
    let floor = 0.5 * min_area.min(targets.iter().cloned().fold(f64::INFINITY, f64::min));
    let mut g = d.dual_objective(&targets);
    let mut diag = SolverDiagnostics { iterations: 0, residual: residual(&areas, &targets), objective_history: vec![g], step_sizes: Vec::new(), gradient_steps: 0 };
    while diag.residual >= problem.tolerance {
        if diag.iterations >= problem.max_iterations {
            return Err(TransportError::NoConvergence { iterations: diag.iterations, residual: diag.residual, best: w });
        }
        let m = n + 1;
        let jac = d.area_jacobian();
        let h = DMatrix::from_fn(m, m, |i, j| jac[i][j]);
        let rhs = DVector::from_fn(m, |i, _| targets[i] - areas[i]);
        let newton = h.lu().solve(&rhs).filter(|x| x.iter().all(|v| v.is_finite()));
        let mut accepted = None;
        let directions: Vec<(DVector<f64>, bool)> = match newton {
            Some(x) => vec![(x, false), (rhs.clone(), true)],
            None => vec![(rhs.clone(), true)],
        };
        'search: for (dir, gradient) in directions {
            let mut tau = 1.0;
            for _ in 0..60 {
                let mut v = w.to_vec();
                for i in 0..m {
                    v[i] += tau * dir[i];
                }
                let trial = WeightVector::from_slice(&v);
                let td = diagram_at(&trial);
                let ta = td.areas();
                let tg = td.dual_objective(&targets);
                let tr = residual(&ta, &targets);
                let positive = ta.iter().all(|&a| a >= floor);
                let ascent = tg >= g - 1e-13 * (1.0 + g.abs());
                let decrease = gradient || tr <= (1.0 - tau / 2.0) * diag.residual;
                if positive && ascent && decrease {
                    accepted = Some((trial, td, ta, tg, tau, gradient));
                    break 'search;
                }
                tau *= 0.5;
            }
        }
        let Some((tw, td, ta, tg, tau, gradient)) = accepted else {
            return Err(TransportError::NoConvergence { iterations: diag.iterations, residual: diag.residual, best: w });
        };
        assert!(tg >= g - 1e-13 * (1.0 + g.abs()), "dual objective decreased from {g} to {tg}");
        w = tw;
        d = td;
        areas = ta;
        g = tg;
        diag.iterations += 1;
        diag.residual = residual(&areas, &targets);
        diag.objective_history.push(g);
        diag.step_sizes.push(tau);
        diag.gradient_steps += gradient as usize;
    }
    Ok(Solution { weights: w, diagram: d, diagnostics: diag })
}

//! Dense nonlinear least squares: damped Gauss-Newton with central-difference
//! Jacobians, falling back to coordinate descent when the Gauss-Newton phase
//! stalls before meeting the step tolerance.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Iteration budget shared by both phases.
    pub max_iterations: usize,
    /// Converged once an accepted step is below this fraction of `|x|`.
    pub step_tolerance: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iterations: 500, step_tolerance: 1e-10, fd_step: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub params: Vec<f64>,
    /// Sum of squared residuals at `params`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn cost_of(r: &[f64]) -> f64 {
    let c: f64 = r.iter().map(|v| v * v).sum();
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

fn small_step(step: &[f64], x: &[f64], tol: f64) -> bool {
    let step_norm = step.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    step_norm <= tol * (x_norm + tol)
}

/// Minimises `Σ r_i(x)²` starting from `x0`.
///
/// `project` is applied to every trial point and may clamp parameters into a
/// feasible box; residuals are only ever evaluated at projected points.
pub fn minimize<R, P>(residuals: R, x0: &[f64], project: P, opts: SolverOptions) -> SolverReport
where
    R: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x);
    let mut r = residuals(&x);
    let mut cost = cost_of(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;

    if n == 0 || cost == 0.0 {
        return SolverReport { params: x, cost, iterations, converged: true };
    }

    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let m = r.len();
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for j in 0..n {
            let h = opts.fd_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let rp = residuals(&xp);
            let rm = residuals(&xm);
            for i in 0..m {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * rv;

        let mut accepted = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for d in 0..n {
                a[(d, d)] += lambda * (jtj[(d, d)] + 1e-12);
            }
            let Some(delta) = a.lu().solve(&(-&jtr)) else {
                lambda *= 4.0;
                continue;
            };
            let mut trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            project(&mut trial);
            let step: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            let r_trial = residuals(&trial);
            let c_trial = cost_of(&r_trial);
            if c_trial <= cost {
                let tiny = small_step(&step, &x, opts.step_tolerance);
                x = trial;
                r = r_trial;
                cost = c_trial;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if tiny || cost == 0.0 {
                    converged = true;
                }
                break;
            }
            if small_step(&step, &x, opts.step_tolerance) {
                // The model cannot improve even with vanishing steps.
                converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if converged || !accepted {
            break;
        }
    }

    if !converged {
        let report = coordinate_descent(&residuals, &x, &project, opts, iterations);
        if report.cost <= cost {
            return report;
        }
    }
    SolverReport { params: x, cost, iterations, converged }
}

fn coordinate_descent<R, P>(
    residuals: &R,
    x0: &[f64],
    project: &P,
    opts: SolverOptions,
    mut iterations: usize,
) -> SolverReport
where
    R: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut cost = cost_of(&residuals(&x));
    let mut steps: Vec<f64> = x.iter().map(|v| 0.1 * v.abs().max(1e-3)).collect();
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        for j in 0..n {
            for dir in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[j] += dir * steps[j];
                project(&mut trial);
                let c = cost_of(&residuals(&trial));
                if c < cost {
                    x = trial;
                    cost = c;
                    steps[j] *= 2.0;
                    break;
                }
                if dir < 0.0 {
                    steps[j] *= 0.5;
                }
            }
        }
        if small_step(&steps, &x, opts.step_tolerance) {
            converged = true;
            break;
        }
    }
    SolverReport { params: x, cost, iterations, converged }
}

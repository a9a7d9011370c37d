//! L-BFGS with two-loop recursion and backtracking Armijo line search.
//!
//! The original newsvendor loss is piecewise linear, so the curvature
//! condition of a Wolfe search can be unsatisfiable and stored pairs can
//! carry junk curvature. Three guards keep the method usable on it:
//! curvature pairs with `s·y ≤ 1e-10` are skipped, a two-loop direction
//! that fails to be a descent direction falls back to `-grad`, and the
//! line search uses sufficient decrease only.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matrix::dot;

/// Sufficient-decrease constant for the Armijo condition.
pub const ARMIJO_C1: f64 = 1e-4;

const CURVATURE_MIN: f64 = 1e-10;
const MAX_BACKTRACKS: usize = 60;

/// A differentiable (or subdifferentiable) objective.
pub trait Objective {
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// One stored `(Δparam, Δgrad)` pair with positive curvature.
#[derive(Debug, Clone)]
pub struct CurvaturePair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

impl CurvaturePair {
    /// Returns `None` when the pair's curvature `s·y` is too small to be
    /// trusted, which happens routinely around kinks of a piecewise-linear
    /// objective.
    pub fn new(s: Vec<f64>, y: Vec<f64>) -> Option<CurvaturePair> {
        let sy = dot(&s, &y);
        if sy <= CURVATURE_MIN {
            return None;
        }
        Some(CurvaturePair {
            s,
            y,
            rho: 1.0 / sy,
        })
    }
}

/// Two-loop recursion over the stored history. With an empty history this
/// is steepest descent: `-grad`.
pub fn lbfgs_direction(history: &[CurvaturePair], grad: &[f64]) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = vec![0.0; history.len()];

    for (i, pair) in history.iter().enumerate().rev() {
        let alpha = pair.rho * dot(&pair.s, &q);
        alphas[i] = alpha;
        for (qk, yk) in q.iter_mut().zip(&pair.y) {
            *qk -= alpha * yk;
        }
    }

    // Initial inverse-Hessian scaling from the most recent pair.
    if let Some(last) = history.last() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        for qk in q.iter_mut() {
            *qk *= gamma;
        }
    }

    for (i, pair) in history.iter().enumerate() {
        let beta = pair.rho * dot(&pair.y, &q);
        for (qk, sk) in q.iter_mut().zip(&pair.s) {
            *qk += (alphas[i] - beta) * sk;
        }
    }

    for qk in q.iter_mut() {
        *qk = -*qk;
    }
    q
}

/// Why an optimization run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Gradient infinity-norm fell below the tolerance.
    GradientTolerance,
    /// Iteration budget exhausted.
    MaxIterations,
    /// No step along the search direction satisfied sufficient decrease;
    /// for a nonsmooth objective this is the usual terminal state at a
    /// kink.
    LineSearchFailed,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StopReason::GradientTolerance => "gradient-tolerance",
            StopReason::MaxIterations => "max-iterations",
            StopReason::LineSearchFailed => "line-search-failed",
        };
        f.write_str(s)
    }
}

/// Result of a [`minimize_lbfgs`] or momentum run.
#[derive(Debug, Clone)]
pub struct Minimization {
    pub x: Vec<f64>,
    /// Objective value after each completed iteration.
    pub trace: Vec<f64>,
    pub stop: StopReason,
}

pub struct LbfgsOptions {
    pub max_iters: usize,
    /// Stop when the gradient infinity-norm drops below this.
    pub tolerance: f64,
    pub memory: usize,
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn check_finite(value: f64, iteration: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteLoss { iteration })
    }
}

/// Minimizes `obj` from `x0`. Every accepted step satisfies the Armijo
/// sufficient-decrease condition, so the trace is non-increasing.
pub fn minimize_lbfgs<O: Objective>(
    obj: &O,
    x0: &[f64],
    opts: &LbfgsOptions,
) -> Result<Minimization> {
    let mut x = x0.to_vec();
    let (mut f, mut g) = obj.value_grad(&x)?;
    check_finite(f, 0)?;

    let mut history: VecDeque<CurvaturePair> = VecDeque::with_capacity(opts.memory);
    let mut trace = Vec::new();
    let mut stop = StopReason::MaxIterations;

    for iter in 1..=opts.max_iters {
        if inf_norm(&g) < opts.tolerance {
            stop = StopReason::GradientTolerance;
            break;
        }

        let pairs = history.make_contiguous();
        let mut dir = lbfgs_direction(pairs, &g);
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            // Not a descent direction; restart from steepest descent.
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        let t0 = if trace.is_empty() {
            (1.0 / inf_norm(&g)).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        let mut t = t0;
        for _ in 0..MAX_BACKTRACKS {
            let candidate: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            let fc = obj.value(&candidate)?;
            if fc.is_finite() && fc <= f + ARMIJO_C1 * t * slope {
                accepted = Some((candidate, fc));
                break;
            }
            t *= 0.5;
        }

        let Some((x_new, f_new)) = accepted else {
            stop = StopReason::LineSearchFailed;
            break;
        };

        let (f_refreshed, g_new) = obj.value_grad(&x_new)?;
        check_finite(f_refreshed, iter)?;

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        if let Some(pair) = CurvaturePair::new(s, y) {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back(pair);
        }

        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(f);
    }

    Ok(Minimization { x, trace, stop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    struct Quadratic {
        a: Matrix,
    }

    impl Objective for Quadratic {
        fn value(&self, x: &[f64]) -> Result<f64> {
            Ok(0.5 * dot(x, &self.a.mat_vec(x)?))
        }
        fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
            Ok((self.value(x)?, self.a.mat_vec(x)?))
        }
    }

    struct Rosenbrock;

    impl Objective for Rosenbrock {
        fn value(&self, x: &[f64]) -> Result<f64> {
            let (a, b) = (x[0], x[1]);
            Ok((1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2))
        }
        fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
            let (a, b) = (x[0], x[1]);
            let g = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            Ok((self.value(x)?, g))
        }
    }

    #[test]
    fn empty_history_is_steepest_descent() {
        let g = vec![1.0, -2.0, 3.0];
        assert_eq!(lbfgs_direction(&[], &g), vec![-1.0, 2.0, -3.0]);
    }

    #[test]
    fn near_zero_curvature_pairs_are_rejected() {
        assert!(CurvaturePair::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_none());
        assert!(CurvaturePair::new(vec![1.0, 0.0], vec![-1.0, 0.0]).is_none());
        assert!(CurvaturePair::new(vec![1.0, 0.0], vec![1.0, 0.0]).is_some());
    }

    #[test]
    fn converges_on_an_spd_quadratic() {
        // A = B + Bᵀ + 5I is symmetric positive definite; the minimizer is 0.
        let b = Matrix::from_rows(&[
            vec![1.0, 0.3, 0.0, 0.2, 0.1],
            vec![0.3, 2.0, 0.4, 0.0, 0.0],
            vec![0.0, 0.4, 1.5, 0.3, 0.2],
            vec![0.2, 0.0, 0.3, 1.0, 0.5],
            vec![0.1, 0.0, 0.2, 0.5, 2.5],
        ])
        .unwrap();
        let mut a = Matrix::zeros(5, 5);
        for i in 0..5 {
            for j in 0..5 {
                let v = b.get(i, j) + b.get(j, i) + if i == j { 5.0 } else { 0.0 };
                a.set(i, j, v);
            }
        }
        let obj = Quadratic { a };
        let run = minimize_lbfgs(
            &obj,
            &[4.0, -3.0, 2.0, -1.0, 5.0],
            &LbfgsOptions {
                max_iters: 50,
                tolerance: 1e-12,
                memory: 5,
            },
        )
        .unwrap();
        assert!(inf_norm(&run.x) < 1e-8, "x = {:?}", run.x);
        assert!(run.trace.len() <= 50);
    }

    #[test]
    fn reaches_the_rosenbrock_minimum() {
        let run = minimize_lbfgs(
            &Rosenbrock,
            &[-1.2, 1.0],
            &LbfgsOptions {
                max_iters: 2000,
                tolerance: 1e-10,
                memory: 10,
            },
        )
        .unwrap();
        assert!((run.x[0] - 1.0).abs() < 1e-5, "x = {:?}", run.x);
        assert!((run.x[1] - 1.0).abs() < 1e-5, "x = {:?}", run.x);
    }

    #[test]
    fn trace_is_non_increasing() {
        let run = minimize_lbfgs(
            &Rosenbrock,
            &[-1.2, 1.0],
            &LbfgsOptions {
                max_iters: 200,
                tolerance: 1e-10,
                memory: 10,
            },
        )
        .unwrap();
        for w in run.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn zero_gradient_stops_with_no_iterations() {
        let obj = Quadratic {
            a: Matrix::identity(3),
        };
        let run = minimize_lbfgs(
            &obj,
            &[0.0, 0.0, 0.0],
            &LbfgsOptions {
                max_iters: 100,
                tolerance: 1e-6,
                memory: 5,
            },
        )
        .unwrap();
        assert_eq!(run.stop, StopReason::GradientTolerance);
        assert!(run.trace.is_empty());
    }
}

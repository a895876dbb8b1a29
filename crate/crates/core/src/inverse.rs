//! Gradient-adjoint recovery of an initial condition from a target state.
//!
//! For `J(u0) = ½ ∫ (u(T) − u_T)²`, the gradient is the adjoint state
//! `σ(·, 0)`, where `σ` solves the adjoint transport backward from
//! `σ(T) = u(T) − u_T`. The adjoint may be discretized with a different scheme
//! than the forward problem; the resulting descent direction is then only an
//! approximation of the discrete gradient, and the choice of scheme changes it.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::grid::{rms_error, ScalarField2D};
use crate::solver2d::{SolverConfig, SplitSolver};
use crate::velocity::VelocityField;

/// Consecutive cost increases tolerated before the descent is aborted.
pub const DIVERGENCE_PATIENCE: usize = 5;

/// Target, dynamics and descent settings for one recovery.
#[derive(Debug, Clone)]
pub struct InverseProblem {
    target: ScalarField2D,
    horizon: f64,
    forward: SplitSolver,
    adjoint: SplitSolver,
    pub eta: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl InverseProblem {
    pub const DEFAULT_ETA: f64 = 0.5;
    pub const DEFAULT_TOL: f64 = 1e-4;
    pub const DEFAULT_MAX_ITER: usize = 1000;

    pub fn new(
        target: ScalarField2D,
        field: &dyn VelocityField,
        horizon: f64,
        forward_cfg: SolverConfig,
        adjoint_cfg: SolverConfig,
    ) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "T",
                reason: format!("must be non-negative, got {horizon}"),
            });
        }
        let forward = SplitSolver::new(*target.grid(), field, forward_cfg)?;
        let adjoint = forward.with_config(adjoint_cfg)?.reversed();
        Ok(Self {
            target,
            horizon,
            forward,
            adjoint,
            eta: Self::DEFAULT_ETA,
            tol: Self::DEFAULT_TOL,
            max_iter: Self::DEFAULT_MAX_ITER,
        })
    }

    pub fn with_step(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn target(&self) -> &ScalarField2D {
        &self.target
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn forward_solver(&self) -> &SplitSolver {
        &self.forward
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: format!("must be positive, got {}", self.eta),
            });
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: format!("must be positive, got {}", self.tol),
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// Forward state at the horizon.
    pub fn transport(&self, u0: &ScalarField2D) -> Result<ScalarField2D> {
        self.forward.solve(u0, self.horizon)
    }

    /// `½ Σ (u(T) − u_T)² dx dy`.
    pub fn cost(&self, u0: &ScalarField2D) -> Result<f64> {
        let residual = self.transport(u0)?.sub(&self.target)?;
        Ok(self.cost_of_residual(&residual))
    }

    fn cost_of_residual(&self, residual: &ScalarField2D) -> f64 {
        0.5 * residual.values().iter().map(|r| r * r).sum::<f64>() * residual.grid().cell_area()
    }

    /// Adjoint state at time zero, used pointwise as `∇J`.
    pub fn gradient(&self, u0: &ScalarField2D) -> Result<ScalarField2D> {
        Ok(self.cost_and_gradient(u0)?.1)
    }

    pub fn cost_and_gradient(&self, u0: &ScalarField2D) -> Result<(f64, ScalarField2D)> {
        let residual = self.transport(u0)?.sub(&self.target)?;
        let cost = self.cost_of_residual(&residual);
        let sigma0 = self.adjoint.solve(&residual, self.horizon)?;
        Ok((cost, sigma0))
    }

    /// Fixed-step gradient descent `u0 ← u0 − η σ(·, 0)` from `u0_init`.
    ///
    /// Stops once `‖u0_new − u0‖ / ‖u0_new‖ ≤ tol` (plain Euclidean norms;
    /// `0/0` counts as converged) or after `max_iter` updates.
    pub fn solve(&self, u0_init: &ScalarField2D) -> Result<GdReport> {
        self.validate()?;
        self.target.grid().ensure_same(u0_init.grid())?;

        let started = Instant::now();
        let mut u0 = u0_init.clone();
        let mut costs = Vec::new();
        let mut changes = Vec::new();
        let mut rises = 0;
        let mut stop = StopReason::MaxIterations;

        for _ in 0..self.max_iter {
            let (cost, grad) = self.cost_and_gradient(&u0)?;
            let mut next = u0.clone();
            next.axpy(-self.eta, &grad)?;
            let step = grad.l2_norm() * self.eta;
            let norm = next.l2_norm();
            let change = if step == 0.0 { 0.0 } else { step / norm };

            if let Some(&prev) = costs.last() {
                rises = if cost > prev { rises + 1 } else { 0 };
            }
            costs.push(cost);
            changes.push(change);
            if rises >= DIVERGENCE_PATIENCE {
                return Err(Error::Diverged(rises));
            }

            u0 = next;
            if change <= self.tol {
                stop = StopReason::Converged;
                break;
            }
        }
        let wall_time = started.elapsed();
        let final_state = self.transport(&u0)?;

        Ok(GdReport {
            iterations: costs.len(),
            costs,
            relative_changes: changes,
            u0,
            final_state,
            stop,
            wall_time,
            e_u0: None,
            e_ut: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
}

/// History and outcome of one descent run.
#[derive(Debug, Clone)]
pub struct GdReport {
    pub iterations: usize,
    /// `J` at the iterate each update started from.
    pub costs: Vec<f64>,
    pub relative_changes: Vec<f64>,
    pub u0: ScalarField2D,
    /// Forward transport of the recovered `u0` to the horizon.
    pub final_state: ScalarField2D,
    pub stop: StopReason,
    /// Time spent in the descent loop alone.
    pub wall_time: Duration,
    pub e_u0: Option<f64>,
    pub e_ut: Option<f64>,
}

impl GdReport {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    /// Fills in and returns `(e(u0), e(u_T))` against known exact fields.
    pub fn evaluate(&mut self, exact_u0: &ScalarField2D, exact_ut: &ScalarField2D) -> Result<(f64, f64)> {
        let errors = evaluate_design(self, exact_u0, exact_ut)?;
        self.e_u0 = Some(errors.0);
        self.e_ut = Some(errors.1);
        Ok(errors)
    }
}

/// RMS errors of the recovered initial state and of its transport to the horizon.
pub fn evaluate_design(report: &GdReport, exact_u0: &ScalarField2D, exact_ut: &ScalarField2D) -> Result<(f64, f64)> {
    Ok((
        rms_error(&report.u0, exact_u0)?,
        rms_error(&report.final_state, exact_ut)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use crate::schemes1d::SchemeKind;
    use crate::velocity::{ConstantVelocity, DoswellVortex};

    fn lw() -> SolverConfig {
        SolverConfig::new(SchemeKind::LaxWendroff)
    }

    #[test]
    fn zero_target_converges_immediately() {
        let g = Grid2D::square(-5.0, 5.0, 16).unwrap();
        let prob = InverseProblem::new(ScalarField2D::zeros(g), &DoswellVortex::new(2.59807), 1.0, lw(), lw()).unwrap();
        let report = prob.solve(&ScalarField2D::zeros(g)).unwrap();
        assert_eq!(report.iterations, 1);
        assert!(report.converged());
        assert_eq!(report.costs, vec![0.0]);
        assert!(report.u0.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cost_of_constant_mismatch() {
        let g = Grid2D::square(-5.0, 5.0, 20).unwrap();
        let target = ScalarField2D::constant(g, -0.3);
        let prob = InverseProblem::new(target, &DoswellVortex::new(2.59807), 1.0, lw(), lw()).unwrap();
        // transport preserves the constant 0.2, so u(T) − u_T = 0.5 over area 100
        let j = prob.cost(&ScalarField2D::constant(g, 0.2)).unwrap();
        assert!((j - 0.5 * 0.25 * 100.0).abs() < 1e-9, "{j}");
    }

    #[test]
    fn cost_vanishes_on_reachable_target() {
        let g = Grid2D::square(-5.0, 5.0, 20).unwrap();
        let v = DoswellVortex::new(2.59807);
        let u0 = ScalarField2D::sample(g, |_, y| y.tanh()).unwrap();
        let target = crate::solver2d::forward_solve(&u0, &v, 2.0, lw()).unwrap();
        let prob = InverseProblem::new(target, &v, 2.0, lw(), lw()).unwrap();
        assert_eq!(prob.cost(&u0).unwrap(), 0.0);
        let g0 = prob.gradient(&u0).unwrap();
        assert!(g0.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_velocity_gradient_is_mismatch() {
        let g = Grid2D::square(0.0, 1.0, 8).unwrap();
        let u0 = ScalarField2D::sample(g, |x, y| x * y).unwrap();
        let target = ScalarField2D::sample(g, |x, _| x).unwrap();
        let prob = InverseProblem::new(target.clone(), &ConstantVelocity::zero(), 1.0, lw(), lw()).unwrap();
        assert_eq!(prob.gradient(&u0).unwrap(), u0.sub(&target).unwrap());
    }

    #[test]
    fn descent_halves_error_under_identity_transport() {
        let g = Grid2D::square(0.0, 1.0, 8).unwrap();
        let target = ScalarField2D::sample(g, |x, y| 1.0 + x - y).unwrap();
        let prob = InverseProblem::new(target.clone(), &ConstantVelocity::zero(), 1.0, lw(), lw()).unwrap();
        let report = prob.solve(&ScalarField2D::zeros(g)).unwrap();
        assert!(report.converged());
        // change_k = 2^-k / (1 − 2^-k) ≤ 1e-4 first at k = 14
        assert_eq!(report.iterations, 14);
        for w in report.costs.windows(2) {
            assert!((w[1] / w[0] - 0.25).abs() < 1e-12);
        }
        assert!(rms_error(&report.u0, &target).unwrap() < 1e-4);
    }

    #[test]
    fn max_iter_is_flagged() {
        let g = Grid2D::square(0.0, 1.0, 8).unwrap();
        let target = ScalarField2D::constant(g, 1.0);
        let prob = InverseProblem::new(target, &ConstantVelocity::zero(), 1.0, lw(), lw())
            .unwrap()
            .with_max_iter(3);
        let report = prob.solve(&ScalarField2D::zeros(g)).unwrap();
        assert_eq!(report.iterations, 3);
        assert_eq!(report.stop, StopReason::MaxIterations);
        assert_eq!(report.costs.len(), 3);
    }

    #[test]
    fn divergence_guard_trips() {
        let g = Grid2D::square(0.0, 1.0, 8).unwrap();
        let target = ScalarField2D::constant(g, 1.0);
        // η = 3 overshoots: the error is multiplied by −2 each step
        let prob = InverseProblem::new(target, &ConstantVelocity::zero(), 1.0, lw(), lw())
            .unwrap()
            .with_step(3.0);
        assert_eq!(
            prob.solve(&ScalarField2D::zeros(g)).unwrap_err(),
            Error::Diverged(DIVERGENCE_PATIENCE)
        );
    }

    #[test]
    fn invalid_settings_rejected() {
        let g = Grid2D::square(0.0, 1.0, 4).unwrap();
        let base = InverseProblem::new(ScalarField2D::zeros(g), &ConstantVelocity::zero(), 1.0, lw(), lw()).unwrap();
        let u = ScalarField2D::zeros(g);
        assert!(base.clone().with_step(0.0).solve(&u).is_err());
        assert!(base.clone().with_tolerance(0.0).solve(&u).is_err());
        assert!(base.clone().with_max_iter(0).solve(&u).is_err());
        let other = ScalarField2D::zeros(Grid2D::square(0.0, 1.0, 5).unwrap());
        assert!(base.solve(&other).is_err());
    }
}

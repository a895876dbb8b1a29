//! Dimensionally split time integration of 2D transport, forward and backward.
//!
//! Each step applies one 1D sweep per axis with the full step length
//! (Godunov splitting). The y-phase runs on the transposed field so that both
//! phases are contiguous row sweeps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{transpose_into, Grid2D, ScalarField2D};
use crate::schemes1d::{sweep_into, BoundaryPolicy, Line, SchemeKind};
use crate::velocity::VelocityField;

/// Relative slack on the Courant bound, absorbing round-off in `Δt`.
const CFL_SLACK: f64 = 1e-9;

/// Rows per rayon task; small grids are not worth splitting finer.
const MIN_ROWS_PER_TASK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    #[default]
    XThenY,
    YThenX,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub scheme: SchemeKind,
    pub cfl: f64,
    pub boundary: BoundaryPolicy,
    pub order: SweepOrder,
}

impl SolverConfig {
    pub const DEFAULT_CFL: f64 = 0.5;

    pub fn new(scheme: SchemeKind) -> Self {
        Self {
            scheme,
            cfl: Self::DEFAULT_CFL,
            boundary: BoundaryPolicy::default(),
            order: SweepOrder::default(),
        }
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryPolicy) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_order(mut self, order: SweepOrder) -> Self {
        self.order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "cfl",
                reason: format!("must lie in (0, 1], got {}", self.cfl),
            });
        }
        Ok(())
    }
}

/// `cfl · Δx / max v`, with `Δx` the smaller spacing.
pub fn cfl_timestep(grid: &Grid2D, field: &dyn VelocityField, cfl: f64) -> Result<f64> {
    timestep_for(grid, field.max_component_speed(), cfl)
}

fn timestep_for(grid: &Grid2D, max_speed: f64, cfl: f64) -> Result<f64> {
    if max_speed.is_nan() || max_speed <= 0.0 || max_speed.is_infinite() {
        return Err(Error::ZeroVelocity);
    }
    Ok(cfl * grid.dx.min(grid.dy) / max_speed)
}

/// Number of steps to reach `t_end` with step `dt`, and the length of the last one.
pub fn step_plan(t_end: f64, dt: f64) -> (usize, f64) {
    if t_end <= 0.0 {
        return (0, 0.0);
    }
    let n = ((t_end / dt) - CFL_SLACK).ceil().max(1.0) as usize;
    let last = t_end - (n - 1) as f64 * dt;
    (n, last)
}

/// A split transport solver bound to one grid, velocity field and configuration.
///
/// Velocity components are sampled once at cell centers; the y component is
/// kept transposed to match the layout of the y-phase.
#[derive(Debug, Clone)]
pub struct SplitSolver {
    grid: Grid2D,
    cfg: SolverConfig,
    vx: Vec<f64>,
    vy_t: Vec<f64>,
    max_speed: f64,
    max_abs_vx: f64,
    max_abs_vy: f64,
}

impl SplitSolver {
    pub fn new(grid: Grid2D, field: &dyn VelocityField, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let (nx, ny) = (grid.nx, grid.ny);
        let mut vx = vec![0.0; nx * ny];
        let mut vy = vec![0.0; nx * ny];
        for j in 0..ny {
            let y = grid.y_center(j);
            for i in 0..nx {
                let (a, b) = field.velocity(grid.x_center(i), y);
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::NonFinite {
                        i,
                        j,
                        value: if a.is_finite() { b } else { a },
                    });
                }
                vx[j * nx + i] = a;
                vy[j * nx + i] = b;
            }
        }
        let mut vy_t = vec![0.0; nx * ny];
        transpose_into(&vy, nx, ny, &mut vy_t);
        let max_abs = |v: &[f64]| v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        Ok(Self {
            grid,
            cfg,
            max_abs_vx: max_abs(&vx),
            max_abs_vy: max_abs(&vy),
            vx,
            vy_t,
            max_speed: field.max_component_speed(),
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// The same solver with the velocity negated, i.e. transport backward in time.
    pub fn reversed(&self) -> Self {
        let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        Self {
            vx: neg(&self.vx),
            vy_t: neg(&self.vy_t),
            ..self.clone()
        }
    }

    /// A solver sharing this one's velocity samples under another configuration.
    pub fn with_config(&self, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, ..self.clone() })
    }

    pub fn timestep(&self) -> Result<f64> {
        timestep_for(&self.grid, self.max_speed, self.cfg.cfl)
    }

    /// Largest Courant number of a step `dt` over the sampled velocities.
    pub fn courant(&self, dt: f64) -> f64 {
        (self.max_abs_vx * dt / self.grid.dx).max(self.max_abs_vy * dt / self.grid.dy)
    }

    /// One split step of length `dt`.
    pub fn advance(&self, u: &ScalarField2D, dt: f64) -> Result<ScalarField2D> {
        self.grid.ensure_same(u.grid())?;
        self.check_courant(dt)?;
        let mut out = u.clone();
        let mut ws = Workspace::new(&self.grid);
        self.step(out.values_mut(), dt, &mut ws);
        Ok(out)
    }

    /// Integrates from time 0 to `t_end`, shortening the final step to land on `t_end`.
    pub fn solve(&self, u0: &ScalarField2D, t_end: f64) -> Result<ScalarField2D> {
        self.grid.ensure_same(u0.grid())?;
        if t_end.is_nan() || t_end < 0.0 {
            return Err(Error::InvalidParameter {
                name: "T",
                reason: format!("must be non-negative, got {t_end}"),
            });
        }
        let mut u = u0.clone();
        if t_end == 0.0 {
            return Ok(u);
        }
        if self.max_abs_vx == 0.0 && self.max_abs_vy == 0.0 {
            // every kernel is the identity under zero velocity
            return Ok(u);
        }
        let dt = self.timestep()?;
        self.check_courant(dt)?;
        let (n, last) = step_plan(t_end, dt);
        let mut ws = Workspace::new(&self.grid);
        for k in 0..n {
            let h = if k + 1 == n { last } else { dt };
            self.step(u.values_mut(), h, &mut ws);
        }
        Ok(u)
    }

    fn check_courant(&self, dt: f64) -> Result<()> {
        let c = self.courant(dt);
        if c > 1.0 + CFL_SLACK {
            return Err(Error::CflViolation { courant: c });
        }
        Ok(())
    }

    fn step(&self, u: &mut [f64], dt: f64, ws: &mut Workspace) {
        match self.cfg.order {
            SweepOrder::XThenY => {
                self.x_phase(u, dt, ws);
                self.y_phase(u, dt, ws);
            }
            SweepOrder::YThenX => {
                self.y_phase(u, dt, ws);
                self.x_phase(u, dt, ws);
            }
        }
    }

    fn x_phase(&self, u: &mut [f64], dt: f64, ws: &mut Workspace) {
        let nx = self.grid.nx;
        sweep_rows(self.cfg, u, &self.vx, nx, self.grid.dx, dt, &mut ws.a);
        u.copy_from_slice(&ws.a);
    }

    fn y_phase(&self, u: &mut [f64], dt: f64, ws: &mut Workspace) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        transpose_into(u, nx, ny, &mut ws.a);
        sweep_rows(self.cfg, &ws.a, &self.vy_t, ny, self.grid.dy, dt, &mut ws.b);
        transpose_into(&ws.b, ny, nx, u);
    }
}

struct Workspace {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Workspace {
    fn new(grid: &Grid2D) -> Self {
        Self {
            a: vec![0.0; grid.len()],
            b: vec![0.0; grid.len()],
        }
    }
}

fn sweep_rows(cfg: SolverConfig, src: &[f64], vel: &[f64], len: usize, dx: f64, dt: f64, dst: &mut [f64]) {
    dst.par_chunks_mut(len)
        .zip(src.par_chunks(len).zip(vel.par_chunks(len)))
        .with_min_len(MIN_ROWS_PER_TASK)
        .for_each(|(out, (values, velocity))| {
            let line = Line {
                values,
                velocity,
                dx,
                dt,
            };
            sweep_into(cfg.scheme, &line, cfg.boundary, out);
        });
}

/// One split step of `u` under `field`.
pub fn advance(u: &ScalarField2D, field: &dyn VelocityField, dt: f64, cfg: SolverConfig) -> Result<ScalarField2D> {
    SplitSolver::new(*u.grid(), field, cfg)?.advance(u, dt)
}

/// Solves `u_t + v·∇u = 0` from `u0` up to `t_end`.
pub fn forward_solve(
    u0: &ScalarField2D,
    field: &dyn VelocityField,
    t_end: f64,
    cfg: SolverConfig,
) -> Result<ScalarField2D> {
    SplitSolver::new(*u0.grid(), field, cfg)?.solve(u0, t_end)
}

/// Solves the adjoint `σ_t + v·∇σ = 0` backward from terminal data at `t_end`,
/// returning `σ(·, 0)`.
///
/// Substituting `s = t_end − t` gives forward transport under `−v`.
pub fn backward_solve(
    sigma_end: &ScalarField2D,
    field: &dyn VelocityField,
    t_end: f64,
    cfg: SolverConfig,
) -> Result<ScalarField2D> {
    SplitSolver::new(*sigma_end.grid(), field, cfg)?
        .reversed()
        .solve(sigma_end, t_end)
}

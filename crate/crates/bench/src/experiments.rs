//! The three experiment families.

use transport_core::grid::order_of_accuracy;
use transport_core::velocity::doswell_exact;
use transport_core::{DoswellParams, DoswellVortex, Grid2D, InverseProblem, ScalarField2D, SchemeKind, SplitSolver};

use crate::config::{check_halving, ExperimentConfig, ExperimentKind};
use crate::error::{BenchError, ConfigError, Issue, Result};
use crate::table::{Experiment, ResultRow};

pub const FORWARD_COLUMNS: [&str; 2] = ["dx", "T"];
pub const CONVERGENCE_COLUMNS: [&str; 4] = ["Scheme", "dx", "e_uT", "p_uT"];
pub const INVERSE_COLUMNS: [&str; 6] = ["Strategy", "Iteration", "WallTime", "e_u0", "e_uT", "Converged"];

fn require(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.kind == kind {
        return Ok(());
    }
    Err(ConfigError {
        issues: vec![Issue::new("kind", format!("expected {kind}, got {}", cfg.kind))],
    }
    .into())
}

fn front(grid: Grid2D, t: f64, p: &DoswellParams) -> Result<ScalarField2D> {
    Ok(ScalarField2D::sample(grid, |x, y| doswell_exact(x, y, t, p))?)
}

fn grid_tag(g: &Grid2D) -> String {
    format!("{}x{}", g.nx, g.ny)
}

/// Dispatches on the config's kind.
pub fn run(cfg: &ExperimentConfig) -> Result<Experiment> {
    let exp = match cfg.kind {
        ExperimentKind::ForwardError => run_forward_error(cfg)?,
        ExperimentKind::Convergence => run_convergence(cfg)?,
        ExperimentKind::InverseDesign => run_inverse(cfg)?,
    };
    exp.check()?;
    Ok(exp)
}

/// Runs `f` on a pool sized by the config's `threads` key.
pub fn with_threads<T: Send>(cfg: &ExperimentConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build()?;
    Ok(pool.install(f))
}

/// RMS error against the exact front for every grid, time and scheme.
/// One row per `(dx, T)` with a column per scheme.
pub fn run_forward_error(cfg: &ExperimentConfig) -> Result<Experiment> {
    require(cfg, ExperimentKind::ForwardError)?;
    let mut columns = FORWARD_COLUMNS.to_vec();
    columns.extend(cfg.schemes.iter().map(|s| s.short_name()));
    let mut exp = Experiment::new(&cfg.name, cfg.kind, &columns);

    let params = cfg.params()?;
    let vortex = DoswellVortex::new(cfg.vbar);
    for k in 0..cfg.grids.len() {
        let grid = cfg.grid(k)?;
        let u0 = front(grid, 0.0, &params)?;
        let solvers = cfg
            .schemes
            .iter()
            .map(|&s| SplitSolver::new(grid, &vortex, cfg.solver_config(s)))
            .collect::<transport_core::Result<Vec<_>>>()?;
        for &t in &cfg.times {
            let exact = front(grid, t, &params)?;
            let mut row = ResultRow::new().with("dx", grid.dx).with("T", t);
            for (scheme, solver) in cfg.schemes.iter().zip(&solvers) {
                let out = solver.solve(&u0, t)?;
                row = row.with(scheme.short_name(), cfg.metric.measure(&out, &exact)?);
                if cfg.fields {
                    exp.fields
                        .push((format!("{}_{}_T{t}", scheme.short_name(), grid_tag(&grid)), out));
                }
            }
            if cfg.fields {
                exp.fields.push((format!("exact_{}_T{t}", grid_tag(&grid)), exact));
            }
            exp.rows.push(row);
        }
    }
    Ok(exp)
}

/// Rows for one scheme's ladder of `(dx, e)` pairs; the first rung has no order.
pub fn convergence_rows(scheme: SchemeKind, ladder: &[(f64, f64)]) -> Result<Vec<ResultRow>> {
    let spacings: Vec<f64> = ladder.iter().map(|&(dx, _)| dx).collect();
    check_halving(&spacings).map_err(|e| ConfigError {
        issues: vec![Issue::new("dx", e)],
    })?;
    let mut rows = Vec::with_capacity(ladder.len());
    for (k, &(dx, e)) in ladder.iter().enumerate() {
        let p = match k {
            0 => None,
            _ => Some(order_of_accuracy(ladder[k - 1].1, e)?),
        };
        rows.push(
            ResultRow::new()
                .with("Scheme", scheme.short_name())
                .with("dx", dx)
                .with("e_uT", e)
                .with("p_uT", p),
        );
    }
    Ok(rows)
}

/// Error ladder per scheme at a single final time.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Experiment> {
    require(cfg, ExperimentKind::Convergence)?;
    let mut exp = Experiment::new(&cfg.name, cfg.kind, &CONVERGENCE_COLUMNS);
    let t = cfg.times[0];
    let params = cfg.params()?;
    let vortex = DoswellVortex::new(cfg.vbar);

    let mut ladders = vec![Vec::new(); cfg.schemes.len()];
    let finest = cfg.grids.len() - 1;
    for k in 0..cfg.grids.len() {
        let grid = cfg.grid(k)?;
        let u0 = front(grid, 0.0, &params)?;
        let exact = front(grid, t, &params)?;
        for (s, &scheme) in cfg.schemes.iter().enumerate() {
            let out = SplitSolver::new(grid, &vortex, cfg.solver_config(scheme))?.solve(&u0, t)?;
            ladders[s].push((grid.dx, cfg.metric.measure(&out, &exact)?));
            if cfg.fields && k == finest {
                exp.fields
                    .push((format!("{}_{}_T{t}", scheme.short_name(), grid_tag(&grid)), out));
            }
        }
        if cfg.fields && k == finest {
            exp.fields.push((format!("exact_{}_T{t}", grid_tag(&grid)), exact));
        }
    }
    for (scheme, ladder) in cfg.schemes.iter().zip(&ladders) {
        exp.rows.extend(convergence_rows(*scheme, ladder)?);
    }
    Ok(exp)
}

/// Recovers the initial front from the exact state at the horizon, once per
/// strategy, starting from `u0 = 0`.
///
/// A run stopped by `max_iter` is a result, not an error: its row says
/// `Converged = no` and a note is added.
pub fn run_inverse(cfg: &ExperimentConfig) -> Result<Experiment> {
    require(cfg, ExperimentKind::InverseDesign)?;
    let mut exp = Experiment::new(&cfg.name, cfg.kind, &INVERSE_COLUMNS);
    let grid = cfg.grid(0)?;
    let horizon = cfg.times[0];
    let params = cfg.params()?;
    let vortex = DoswellVortex::new(cfg.vbar);
    let exact_u0 = front(grid, 0.0, &params)?;
    let target = front(grid, horizon, &params)?;

    for strategy in cfg.unreferenced_strategies() {
        exp.notes
            .push(format!("{strategy}: no reference values exist for this strategy"));
    }
    for &strategy in &cfg.strategies {
        let problem = InverseProblem::new(
            target.clone(),
            &vortex,
            horizon,
            cfg.solver_config(strategy.forward),
            cfg.solver_config(strategy.adjoint),
        )?
        .with_step(cfg.eta)
        .with_tolerance(cfg.tol)
        .with_max_iter(cfg.max_iter);
        let mut report = problem.solve(&ScalarField2D::zeros(grid))?;
        let (e_u0, e_ut) = report.evaluate(&exact_u0, &target)?;
        if !report.converged() {
            exp.notes.push(format!(
                "{strategy}: stopped at max_iter = {} before reaching tol = {}",
                cfg.max_iter, cfg.tol
            ));
        }
        exp.rows.push(
            ResultRow::new()
                .with("Strategy", strategy.to_string())
                .with("Iteration", report.iterations)
                .with("WallTime", report.wall_time.as_secs_f64())
                .with("e_u0", e_u0)
                .with("e_uT", e_ut)
                .with("Converged", if report.converged() { "yes" } else { "no" }),
        );
        if cfg.fields {
            exp.fields.push((format!("u0_{strategy}"), report.u0));
            exp.fields.push((format!("uT_{strategy}"), report.final_state));
        }
    }
    if cfg.fields {
        exp.fields.push(("exact_u0".to_string(), exact_u0));
        exp.fields.push(("target".to_string(), target));
    }
    Ok(exp)
}

/// Convenience for tests and the CLI: parse errors and run errors share a type.
pub fn run_text(text: &str, name: &str) -> Result<Experiment> {
    let cfg = ExperimentConfig::parse(text, name).map_err(BenchError::from)?;
    with_threads(&cfg, || run(&cfg))?
}

//! One-dimensional advance kernels.
//!
//! Each kernel advances one grid line by one time step of
//! `u_t + v(x) u_x = 0` given the velocity at every point of the line:
//!
//! * Lax-Friedrichs: `u_i' = ½(u_{i+1} + u_{i-1}) − ½ c_i (u_{i+1} − u_{i-1})`
//! * Lax-Wendroff: `u_i' = u_i − ½ c_i (u_{i+1} − u_{i-1}) + ½ c_i² (u_{i+1} − 2u_i + u_{i-1})`
//! * MMOC: `u_i' = u(x_i − v_i Δt)`, linearly interpolated from the old line
//!
//! with local Courant number `c_i = v_i Δt / Δx`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which one-dimensional kernel advances a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    LaxFriedrichs,
    LaxWendroff,
    Mmoc,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::LaxFriedrichs, SchemeKind::LaxWendroff, SchemeKind::Mmoc];

    pub fn short_name(self) -> &'static str {
        match self {
            SchemeKind::LaxFriedrichs => "LF",
            SchemeKind::LaxWendroff => "LW",
            SchemeKind::Mmoc => "MMOC",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LF" | "LAX-FRIEDRICHS" => Ok(SchemeKind::LaxFriedrichs),
            "LW" | "LAX-WENDROFF" => Ok(SchemeKind::LaxWendroff),
            "MMOC" => Ok(SchemeKind::Mmoc),
            other => Err(Error::InvalidParameter {
                name: "scheme",
                reason: format!("unknown scheme {other:?} (expected LF, LW or MMOC)"),
            }),
        }
    }
}

/// Treatment of the two end points of a line for the LF and LW stencils,
/// which have no neighbor outside the line. MMOC needs none: its
/// out-of-line predecessors are clamped onto the end points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    /// End points keep their current value.
    #[default]
    Freeze,
    /// End points copy their freshly updated inner neighbor.
    Extrapolate,
}

impl FromStr for BoundaryPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "freeze" => Ok(BoundaryPolicy::Freeze),
            "extrapolate" => Ok(BoundaryPolicy::Extrapolate),
            other => Err(Error::InvalidParameter {
                name: "boundary",
                reason: format!("unknown boundary policy {other:?} (expected freeze or extrapolate)"),
            }),
        }
    }
}

/// One grid line with its per-point velocity component.
#[derive(Debug, Clone, Copy)]
pub struct Line<'a> {
    pub values: &'a [f64],
    pub velocity: &'a [f64],
    pub dx: f64,
    pub dt: f64,
}

impl<'a> Line<'a> {
    pub fn new(values: &'a [f64], velocity: &'a [f64], dx: f64, dt: f64) -> Result<Self> {
        let line = Self {
            values,
            velocity,
            dx,
            dt,
        };
        line.validate()?;
        Ok(line)
    }

    fn validate(&self) -> Result<()> {
        if self.values.len() != self.velocity.len() {
            return Err(Error::LineLengthMismatch {
                values: self.values.len(),
                velocity: self.velocity.len(),
            });
        }
        if self.values.len() < 3 {
            return Err(Error::LineTooShort(self.values.len()));
        }
        Ok(())
    }

    /// Largest `|v| Δt / Δx` on the line.
    pub fn max_courant(&self) -> f64 {
        let ratio = self.dt / self.dx;
        let vmax = self
            .velocity
            .iter()
            .fold(0.0, |m, v| if v.abs() > m { v.abs() } else { m });
        vmax * ratio
    }
}

pub fn lf_sweep(line: &Line<'_>) -> Result<Vec<f64>> {
    sweep(SchemeKind::LaxFriedrichs, line, BoundaryPolicy::default())
}

pub fn lw_sweep(line: &Line<'_>) -> Result<Vec<f64>> {
    sweep(SchemeKind::LaxWendroff, line, BoundaryPolicy::default())
}

pub fn mmoc_sweep(line: &Line<'_>) -> Result<Vec<f64>> {
    sweep(SchemeKind::Mmoc, line, BoundaryPolicy::default())
}

/// Advances `line` one step with `kind`, returning the new values.
pub fn sweep(kind: SchemeKind, line: &Line<'_>, boundary: BoundaryPolicy) -> Result<Vec<f64>> {
    line.validate()?;
    let mut out = vec![0.0; line.values.len()];
    sweep_into(kind, line, boundary, &mut out);
    Ok(out)
}

/// Unchecked hot-path variant of [`sweep`]; `out` must match the line length
/// and the line must hold at least three points.
pub fn sweep_into(kind: SchemeKind, line: &Line<'_>, boundary: BoundaryPolicy, out: &mut [f64]) {
    let u = line.values;
    let v = line.velocity;
    let n = u.len();
    debug_assert!(n >= 3 && v.len() == n && out.len() == n);
    let ratio = line.dt / line.dx;

    match kind {
        SchemeKind::LaxFriedrichs => {
            for i in 1..n - 1 {
                let c = v[i] * ratio;
                out[i] = 0.5 * (u[i + 1] + u[i - 1]) - 0.5 * c * (u[i + 1] - u[i - 1]);
            }
            apply_boundary(u, out, boundary);
        }
        SchemeKind::LaxWendroff => {
            for i in 1..n - 1 {
                let c = v[i] * ratio;
                out[i] = u[i] - 0.5 * c * (u[i + 1] - u[i - 1]) + 0.5 * c * c * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
            }
            apply_boundary(u, out, boundary);
        }
        SchemeKind::Mmoc => {
            // predecessor lies between x_i and its upwind neighbor while |c| ≤ 1
            let mut far = false;
            for ((o, w), &vi) in out[1..n - 1].iter_mut().zip(u.windows(3)).zip(&v[1..n - 1]) {
                let c = vi * ratio;
                far |= c.abs() > 1.0;
                // one of the two weights is zero
                let (from_left, from_right) = (c.max(0.0), (-c).max(0.0));
                *o = (1.0 - from_left - from_right) * w[1] + from_left * w[0] + from_right * w[2];
            }
            if far {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = mmoc_far(u, i, v[i] * ratio);
                }
            } else {
                out[0] = mmoc_far(u, 0, v[0] * ratio);
                out[n - 1] = mmoc_far(u, n - 1, v[n - 1] * ratio);
            }
        }
    }
}

/// Interpolates at predecessor `i − c` (index units) for any Courant number,
/// clamping onto the line.
#[inline]
fn mmoc_far(u: &[f64], i: usize, c: f64) -> f64 {
    let n = u.len();
    let s = (i as f64 - c).clamp(0.0, (n - 1) as f64);
    let k = (s as usize).min(n - 2);
    let w = s - k as f64;
    (1.0 - w) * u[k] + w * u[k + 1]
}

fn apply_boundary(u: &[f64], out: &mut [f64], boundary: BoundaryPolicy) {
    let n = u.len();
    match boundary {
        BoundaryPolicy::Freeze => {
            out[0] = u[0];
            out[n - 1] = u[n - 1];
        }
        BoundaryPolicy::Extrapolate => {
            out[0] = out[1];
            out[n - 1] = out[n - 2];
        }
    }
}

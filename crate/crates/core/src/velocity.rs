//! Time-independent velocity fields, including the Doswell steady vortex and
//! its closed-form transported front.

use crate::error::{Error, Result};

/// Maximum of `sech²(r) tanh(r)` over `r ≥ 0`, attained at `tanh(r) = 1/√3`.
pub const PROFILE_MAX: f64 = 0.384_900_179_459_750_5;

/// A steady velocity field `v(x, y)`.
pub trait VelocityField: Send + Sync {
    fn velocity(&self, x: f64, y: f64) -> (f64, f64);

    /// An upper bound on `max(|vx|, |vy|)` over the domain, used for the CFL step.
    fn max_component_speed(&self) -> f64;
}

impl<V: VelocityField + ?Sized> VelocityField for &V {
    fn velocity(&self, x: f64, y: f64) -> (f64, f64) {
        (**self).velocity(x, y)
    }

    fn max_component_speed(&self) -> f64 {
        (**self).max_component_speed()
    }
}

/// Uniform velocity, mostly useful for tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantVelocity {
    pub vx: f64,
    pub vy: f64,
}

impl ConstantVelocity {
    pub fn new(vx: f64, vy: f64) -> Self {
        Self { vx, vy }
    }

    pub fn zero() -> Self {
        Self { vx: 0.0, vy: 0.0 }
    }
}

impl VelocityField for ConstantVelocity {
    fn velocity(&self, _x: f64, _y: f64) -> (f64, f64) {
        (self.vx, self.vy)
    }

    fn max_component_speed(&self) -> f64 {
        self.vx.abs().max(self.vy.abs())
    }
}

/// Vortex strength `vbar` and front width `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoswellParams {
    pub vbar: f64,
    pub delta: f64,
}

impl DoswellParams {
    /// Strength for which the peak tangential speed is one.
    pub const UNIT_PEAK_VBAR: f64 = 2.59807;

    pub fn new(vbar: f64, delta: f64) -> Result<Self> {
        if !(vbar > 0.0 && vbar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "vbar",
                reason: format!("must be positive, got {vbar}"),
            });
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("must be positive, got {delta}"),
            });
        }
        Ok(Self { vbar, delta })
    }
}

fn sech2(r: f64) -> f64 {
    // cosh overflows past ~710
    if r.abs() > 350.0 {
        return 0.0;
    }
    let s = 1.0 / r.cosh();
    s * s
}

/// `vbar · sech²(r) · tanh(r)`.
pub fn tangential_speed(r: f64, vbar: f64) -> f64 {
    vbar * sech2(r) * r.tanh()
}

/// `v_T(r) / r`, with the removable singularity at the origin filled by its limit `vbar`.
pub fn angular_velocity(r: f64, vbar: f64) -> f64 {
    let tanh_over_r = if r == 0.0 { 1.0 } else { r.tanh() / r };
    vbar * sech2(r) * tanh_over_r
}

/// `(−y w(r), x w(r))`.
pub fn doswell_velocity(x: f64, y: f64, vbar: f64) -> (f64, f64) {
    let w = angular_velocity(x.hypot(y), vbar);
    (-y * w, x * w)
}

/// The front `tanh(y/δ)` rigidly rotated by angle `w(r) t` about the origin.
pub fn doswell_exact(x: f64, y: f64, t: f64, params: &DoswellParams) -> f64 {
    let wt = angular_velocity(x.hypot(y), params.vbar) * t;
    let (s, c) = wt.sin_cos();
    ((y * c - x * s) / params.delta).tanh()
}

/// The Doswell frontogenesis vortex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoswellVortex {
    pub vbar: f64,
}

impl DoswellVortex {
    pub fn new(vbar: f64) -> Self {
        Self { vbar }
    }
}

impl VelocityField for DoswellVortex {
    fn velocity(&self, x: f64, y: f64) -> (f64, f64) {
        doswell_velocity(x, y, self.vbar)
    }

    fn max_component_speed(&self) -> f64 {
        self.vbar * PROFILE_MAX
    }
}

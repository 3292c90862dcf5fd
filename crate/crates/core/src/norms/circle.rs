//! Exact orbit distance on `(S^1, ds)` and the path-length lower bound.

use serde::{Deserialize, Serialize};

use crate::charts::{ContactChart, Point};
use crate::dynamics::field::ScalarField;
use crate::error::{ContactError, Result};
use crate::norms::cost::{BoundDirection, CostKind, CostReport};

pub const DEFAULT_CIRCLE_TIME_STEPS: usize = 10_000;
pub const LOWER_BOUND_SLACK: f64 = 1e-6;

/// Angular distance on `R/Z`.
pub fn angular_distance(p: f64, q: f64) -> f64 {
    let d = (q - p).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Signed rotation amount `c` with `|c| = d(p, q)` and `p + c = q mod 1`.
pub fn rotation_amount(p: f64, q: f64) -> f64 {
    let d = (q - p).rem_euclid(1.0);
    if d <= 0.5 {
        d
    } else {
        d - 1.0
    }
}

fn circle_coord(p: &Point) -> Result<f64> {
    ContactChart::Circle.check_len(p.dim())?;
    Ok(p.coords[0])
}

/// `delta_alpha(p, q) = d(p, q)`, certified by the constant Hamiltonian rotation.
pub fn circle_delta(p: &Point, q: &Point) -> Result<CostReport> {
    let (a, b) = (circle_coord(p)?, circle_coord(q)?);
    let c = rotation_amount(a, b);
    let sign = if c >= 0.0 { "+" } else { "-" };
    Ok(CostReport::new(
        CostKind::CircleDelta,
        angular_distance(a, b),
        BoundDirection::Exact,
        format!("rotation s -> s {sign} t*{} generated by H = {c}", c.abs()),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleBoundReport {
    pub start: f64,
    pub end: f64,
    /// `int_0^1 |H_t(phi^t(p))| dt`.
    pub path_cost: f64,
    /// Unwrapped `int_0^1 H_t(phi^t(p)) dt`.
    pub displacement: f64,
    pub distance: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Integrate `s' = H_t(s)` together with `c' = |H_t(s)|` by RK4 and check
/// `c(1) >= d(p, phi^1(p)) - 1e-6`.
pub fn circle_lower_bound_check(h: &ScalarField, p: &Point, time_steps: usize) -> Result<CircleBoundReport> {
    let start = circle_coord(p)?;
    if h.dim() != 1 {
        return Err(ContactError::DimensionMismatch { expected: 1, got: h.dim() });
    }
    if time_steps == 0 {
        return Err(ContactError::Input("time_steps must be positive".into()));
    }
    let dt = 1.0 / time_steps as f64;
    let f = |t: f64, s: f64| {
        let v = h.value(t, &[s.rem_euclid(1.0)]);
        (v, v.abs())
    };
    let (mut s, mut cost) = (start, 0.0);
    for i in 0..time_steps {
        let t = i as f64 * dt;
        let k1 = f(t, s);
        let k2 = f(t + 0.5 * dt, s + 0.5 * dt * k1.0);
        let k3 = f(t + 0.5 * dt, s + 0.5 * dt * k2.0);
        let k4 = f(t + dt, s + dt * k3.0);
        s += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        cost += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !s.is_finite() {
            return Err(ContactError::BlowUp { last_valid_time: t });
        }
    }
    let end = s.rem_euclid(1.0);
    let distance = angular_distance(start, end);
    Ok(CircleBoundReport {
        start,
        end,
        path_cost: cost,
        displacement: s - start,
        distance,
        slack: cost - distance,
        pass: cost >= distance - LOWER_BOUND_SLACK,
    })
}

//! Path cost of a conjugated isotopy `psi phi_t psi^{-1}`: generated by
//! `K(psi(p)) = e^{f(p)} H_t(p)` where `psi^* alpha = e^f alpha`.

use serde::{Deserialize, Serialize};

use crate::charts::ContactChart;
use crate::dynamics::field::ScalarField;
use crate::dynamics::flow::{pushforward, FlowMap, DEFAULT_PUSHFORWARD_STEP};
use crate::dynamics::vector_field::{solve_contact_field, Workspace};
use crate::error::{ContactError, Result};
use crate::linalg;
use crate::norms::cost::{domain_axes, time_grid, trapezoid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugationOptions {
    pub resolution: usize,
    pub time_steps: usize,
    /// Integrator step for `psi`.
    pub step: f64,
    pub tol: f64,
}

impl Default for ConjugationOptions {
    fn default() -> Self {
        Self { resolution: 7, time_steps: 10, step: 1e-2, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugationReport {
    /// Max over grid and times of `|alpha(d psi X_H) - e^f H|`.
    pub route_deviation: f64,
    /// `int max |alpha_{psi p}(d psi X_{H_t}(p))| dt`.
    pub conjugated_cost: f64,
    /// `int max |e^f H_t| dt`: the cost of `H` against `e^f alpha`.
    pub rescaled_cost: f64,
    pub original_cost: f64,
    /// `min e^f` and `max e^f` over the grid.
    pub c_minus: f64,
    pub c_plus: f64,
    pub sandwich: bool,
    pub tol: f64,
    pub pass: bool,
}

/// Compare the two routes to the conjugated Hamiltonian on a grid over the
/// support of `h`, and the sandwich `C_- cost(H) <= cost <= C_+ cost(H)`.
pub fn conjugation_cost_check(
    chart: &ContactChart,
    h: &ScalarField,
    k: &ScalarField,
    tau: f64,
    opts: &ConjugationOptions,
) -> Result<ConjugationReport> {
    if opts.resolution == 0 || opts.time_steps == 0 || !(opts.step > 0.0) {
        return Err(ContactError::Input(format!("conjugation options must be positive: {opts:?}")));
    }
    let axes = domain_axes(chart, h, opts.resolution)?;
    let psi = FlowMap::new(chart.clone(), k.clone(), tau).with_step(opts.step);
    let map = |q: &[f64]| psi.apply(q).map(|(x, _)| x);
    let d = chart.dimension();
    let n: usize = axes.iter().map(|a| a.len()).product();
    let times = if h.is_time_dependent() { time_grid(opts.time_steps) } else { vec![0.0] };
    let mut ws = Workspace::new(chart);
    let mut x = vec![0.0; d];
    let mut a = vec![0.0; d];
    let mut route_deviation = 0.0f64;
    let (mut c_minus, mut c_plus) = (f64::INFINITY, 0.0f64);
    let mut conj = vec![0.0f64; times.len()];
    let mut rescaled = vec![0.0f64; times.len()];
    let mut original = vec![0.0f64; times.len()];
    let mut p = vec![0.0; d];
    for i in 0..n {
        let mut idx = i;
        for (ax, vals) in axes.iter().enumerate().rev() {
            p[ax] = vals[idx % vals.len()];
            idx /= vals.len();
        }
        let (image, f) = psi.apply(&p)?;
        let ef = f.exp();
        c_minus = c_minus.min(ef);
        c_plus = c_plus.max(ef);
        chart.alpha_covector(&image, &mut a);
        for (j, &t) in times.iter().enumerate() {
            solve_contact_field(chart, h, t, &p, &mut ws, &mut x)?;
            let pushed = pushforward(chart, &map, &p, &x, DEFAULT_PUSHFORWARD_STEP)?;
            let route1 = linalg::dot(&a, &pushed);
            let hv = h.value(t, &p);
            let route2 = ef * hv;
            route_deviation = route_deviation.max((route1 - route2).abs());
            conj[j] = conj[j].max(route1.abs());
            rescaled[j] = rescaled[j].max(route2.abs());
            original[j] = original[j].max(hv.abs());
        }
    }
    let integrate = |v: &[f64]| if v.len() == 1 { v[0] } else { trapezoid(&times, v) };
    let conjugated_cost = integrate(&conj);
    let rescaled_cost = integrate(&rescaled);
    let original_cost = integrate(&original);
    let slack = opts.tol * (1.0 + original_cost * c_plus);
    let sandwich = c_minus * original_cost - slack <= conjugated_cost && conjugated_cost <= c_plus * original_cost + slack;
    let pass = route_deviation <= opts.tol && (conjugated_cost - rescaled_cost).abs() <= slack && sandwich;
    Ok(ConjugationReport {
        route_deviation,
        conjugated_cost,
        rescaled_cost,
        original_cost,
        c_minus,
        c_plus,
        sandwich,
        tol: opts.tol,
        pass,
    })
}

//! Path-cost certificates: Shelukhin, orbit, RS and modified costs of an
//! explicit generating Hamiltonian, all sampled on grids over a support box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::ContactChart;
use crate::dynamics::field::{grid_axis, ScalarField};
use crate::dynamics::flow::{flow_endpoint, integrate_isotopy};
use crate::error::{ContactError, Result};
use crate::submanifolds::patch::SubmanifoldPatch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    Shelukhin,
    Orbit,
    Rs,
    Modified,
    CircleDelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundDirection {
    Upper,
    Exact,
    Lower,
}

/// Sampling knobs for cost sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Points per axis for maxima of `|H_t|`.
    pub resolution: usize,
    /// Points per axis for the conformal-factor sweep (each point is a flow line).
    pub conformal_resolution: usize,
    /// Trapezoid intervals in `[0, 1]`.
    pub time_steps: usize,
    /// Integrator step for flows.
    pub step: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { resolution: 201, conformal_resolution: 11, time_steps: 100, step: 1e-3 }
    }
}

impl GridOptions {
    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 || self.conformal_resolution == 0 || self.time_steps == 0 || !(self.step > 0.0) {
            return Err(ContactError::Input(format!("grid options must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub resolution: usize,
    pub points: usize,
    pub time_steps: usize,
    pub conformal_resolution: Option<usize>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub kind: CostKind,
    pub value: f64,
    /// `ln(value)`; finite even where `value` overflows.
    pub log_value: f64,
    pub bound_direction: BoundDirection,
    pub certificate: String,
    pub grid: Option<GridMeta>,
}

impl CostReport {
    pub(crate) fn new(kind: CostKind, value: f64, bound_direction: BoundDirection, certificate: String) -> Self {
        Self { kind, value, log_value: value.ln(), bound_direction, certificate, grid: None }
    }

    fn with_grid(mut self, grid: GridMeta) -> Self {
        self.grid = Some(grid);
        self
    }
}

/// Per-axis abscissae for maxima over `M`: the field's support box, or the
/// circle's fundamental domain.
pub(crate) fn domain_axes(chart: &ContactChart, h: &ScalarField, resolution: usize) -> Result<Vec<Vec<f64>>> {
    if h.dim() != chart.dimension() {
        return Err(ContactError::DimensionMismatch { expected: chart.dimension(), got: h.dim() });
    }
    if let Some(b) = h.support() {
        return Ok(b.grid_axes(resolution));
    }
    if chart.is_compact() {
        return Ok(vec![(0..resolution).map(|i| i as f64 / resolution as f64).collect()]);
    }
    Err(ContactError::Input(format!(
        "`{}` has no support box on the non-compact chart `{chart}`; maxima over M are undefined",
        h.label()
    )))
}

fn grid_len(axes: &[Vec<f64>]) -> usize {
    axes.iter().map(|a| a.len()).product()
}

fn grid_point(axes: &[Vec<f64>], mut index: usize, out: &mut [f64]) {
    for (i, a) in axes.iter().enumerate().rev() {
        out[i] = a[index % a.len()];
        index /= a.len();
    }
}

/// `(max H_t, min H_t, max |H_t|)` over the grid at time `t`.
fn sweep(h: &ScalarField, axes: &[Vec<f64>], t: f64) -> (f64, f64, f64) {
    let d = axes.len();
    let outer = axes[0].len();
    let inner = grid_len(axes) / outer;
    (0..outer)
        .into_par_iter()
        .map(|i| {
            let mut p = vec![0.0; d];
            let (mut hi, mut lo, mut ab) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
            for j in 0..inner {
                grid_point(axes, i * inner + j, &mut p);
                let v = h.value(t, &p);
                hi = hi.max(v);
                lo = lo.min(v);
                ab = ab.max(v.abs());
            }
            (hi, lo, ab)
        })
        .reduce(|| (f64::NEG_INFINITY, f64::INFINITY, 0.0), |a, b| (a.0.max(b.0), a.1.min(b.1), a.2.max(b.2)))
}

/// Grid max of `|H_t|` at a single time.
pub(crate) fn max_abs_at(chart: &ContactChart, h: &ScalarField, t: f64, resolution: usize) -> Result<f64> {
    Ok(sweep(h, &domain_axes(chart, h, resolution)?, t).2)
}

pub(crate) fn time_grid(time_steps: usize) -> Vec<f64> {
    (0..=time_steps).map(|j| j as f64 / time_steps as f64).collect()
}

pub(crate) fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times.windows(2).zip(values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
}

/// Time samples of the grid sweep (a single sweep for autonomous fields).
fn sweeps(h: &ScalarField, axes: &[Vec<f64>], time_steps: usize) -> (Vec<f64>, Vec<(f64, f64, f64)>) {
    let times = time_grid(time_steps);
    let values = if h.is_time_dependent() {
        times.iter().map(|&t| sweep(h, axes, t)).collect()
    } else {
        vec![sweep(h, axes, 0.0); times.len()]
    };
    (times, values)
}

/// `int_0^1 max over phi_H^t(L) of |H_t| dt`, an upper bound for `delta_alpha(L, phi_H^1(L))`.
pub fn orbit_cost(chart: &ContactChart, h: &ScalarField, patch: &SubmanifoldPatch, opts: &GridOptions) -> Result<CostReport> {
    opts.validate()?;
    if &patch.chart != chart {
        return Err(ContactError::Input(format!("patch `{}` is not on `{chart}`", patch.name)));
    }
    let per = ((1.0 / opts.time_steps as f64) / opts.step).ceil().max(1.0) as usize;
    let fine = 1.0 / (opts.time_steps * per) as f64;
    let trajectories = patch
        .samples()
        .par_iter()
        .map(|s| integrate_isotopy(chart, h, &patch.point(s), (0.0, 1.0), fine))
        .collect::<Result<Vec<_>>>()?;
    let times = time_grid(opts.time_steps);
    let maxima: Vec<f64> = (0..times.len())
        .map(|j| {
            let idx = j * per;
            trajectories.iter().map(|tr| h.value(tr.times[idx], &tr.points[idx].coords).abs()).fold(0.0, f64::max)
        })
        .collect();
    let value = trapezoid(&times, &maxima);
    Ok(CostReport::new(
        CostKind::Orbit,
        value,
        BoundDirection::Upper,
        format!("path of `{}` over {} flowed samples of `{}`", h.label(), trajectories.len(), patch.name),
    )
    .with_grid(GridMeta {
        resolution: patch.sample_count(),
        points: patch.sample_count(),
        time_steps: opts.time_steps,
        conformal_resolution: None,
        step: Some(fine),
    }))
}

/// Conformal factor extrema over a coarse grid of flow lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalSweep {
    /// `min over grid and t in [0, 1] of g_t`.
    pub min_g: f64,
    /// `max over grid of |g_1|`.
    pub max_abs_g1: f64,
    pub points: usize,
}

pub fn conformal_sweep(chart: &ContactChart, h: &ScalarField, opts: &GridOptions) -> Result<ConformalSweep> {
    opts.validate()?;
    let axes = match h.support() {
        Some(b) => b.grid_axes(opts.conformal_resolution),
        None if chart.is_compact() => vec![grid_axis(0.0, 1.0, opts.conformal_resolution + 1)[..opts.conformal_resolution].to_vec()],
        None => return Err(ContactError::Input(format!("`{}` has no support box on `{chart}`", h.label()))),
    };
    let n = grid_len(&axes);
    let d = axes.len();
    let ends = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut p = vec![0.0; d];
            grid_point(&axes, i, &mut p);
            flow_endpoint(chart, h, &p, 0.0, 1.0, opts.step)
        })
        .collect::<Result<Vec<_>>>()?;
    let min_g = ends.iter().map(|e| e.conformal_min).fold(0.0, f64::min);
    let max_abs_g1 = ends.iter().map(|e| e.conformal.abs()).fold(0.0, f64::max);
    Ok(ConformalSweep { min_g, max_abs_g1, points: n })
}

fn grid_meta(opts: &GridOptions, points: usize, conformal: bool) -> GridMeta {
    GridMeta {
        resolution: opts.resolution,
        points,
        time_steps: opts.time_steps,
        conformal_resolution: conformal.then_some(opts.conformal_resolution),
        step: conformal.then_some(opts.step),
    }
}

fn shelukhin_from(h: &ScalarField, times: &[f64], values: &[(f64, f64, f64)], opts: &GridOptions, points: usize) -> CostReport {
    let abs: Vec<f64> = values.iter().map(|v| v.2).collect();
    CostReport::new(
        CostKind::Shelukhin,
        trapezoid(times, &abs),
        BoundDirection::Upper,
        format!("path of `{}`: trapezoid over {} times of grid max |H_t|", h.label(), times.len()),
    )
    .with_grid(grid_meta(opts, points, false))
}

fn rs_from(h: &ScalarField, times: &[f64], values: &[(f64, f64, f64)], conf: &ConformalSweep, opts: &GridOptions, points: usize) -> CostReport {
    let osc: Vec<f64> = values.iter().map(|v| v.0 - v.1).collect();
    let oscillation = trapezoid(times, &osc);
    let mut r = CostReport::new(
        CostKind::Rs,
        (-conf.min_g).exp() * oscillation,
        BoundDirection::Upper,
        format!(
            "path of `{}`: oscillation {oscillation:e} times e^(-min g) with min g = {} over {} flow lines",
            h.label(),
            conf.min_g,
            conf.points
        ),
    )
    .with_grid(grid_meta(opts, points, true));
    r.log_value = -conf.min_g + oscillation.ln();
    r
}

fn modified_from(she: &CostReport, conf: &ConformalSweep, opts: &GridOptions) -> CostReport {
    CostReport::new(
        CostKind::Modified,
        she.value + conf.max_abs_g1,
        BoundDirection::Upper,
        format!("{} plus max |g_1| = {} over {} flow lines", she.certificate, conf.max_abs_g1, conf.points),
    )
    .with_grid(grid_meta(opts, she.grid.as_ref().map_or(0, |g| g.points), true))
}

/// `int_0^1 max_M |H_t| dt`, an upper bound for the Shelukhin norm of `phi_H^1`.
pub fn shelukhin_cost(chart: &ContactChart, h: &ScalarField, opts: &GridOptions) -> Result<CostReport> {
    opts.validate()?;
    let axes = domain_axes(chart, h, opts.resolution)?;
    let (times, values) = sweeps(h, &axes, opts.time_steps);
    Ok(shelukhin_from(h, &times, &values, opts, grid_len(&axes)))
}

/// `e^{-min g_t} int_0^1 (max H_t - min H_t) dt` for this generating path.
pub fn rs_cost(chart: &ContactChart, h: &ScalarField, opts: &GridOptions) -> Result<CostReport> {
    opts.validate()?;
    let axes = domain_axes(chart, h, opts.resolution)?;
    let (times, values) = sweeps(h, &axes, opts.time_steps);
    let conf = conformal_sweep(chart, h, opts)?;
    Ok(rs_from(h, &times, &values, &conf, opts, grid_len(&axes)))
}

/// Shelukhin path cost plus `max |g_1|` over the conformal grid.
pub fn modified_cost(chart: &ContactChart, h: &ScalarField, opts: &GridOptions) -> Result<CostReport> {
    let she = shelukhin_cost(chart, h, opts)?;
    let conf = conformal_sweep(chart, h, opts)?;
    Ok(modified_from(&she, &conf, opts))
}

/// Shelukhin, RS and modified costs from one grid sweep and one conformal sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSuite {
    pub shelukhin: CostReport,
    pub rs: CostReport,
    pub modified: CostReport,
    pub conformal: ConformalSweep,
}

pub fn cost_suite(chart: &ContactChart, h: &ScalarField, opts: &GridOptions) -> Result<CostSuite> {
    opts.validate()?;
    let axes = domain_axes(chart, h, opts.resolution)?;
    let points = grid_len(&axes);
    let (times, values) = sweeps(h, &axes, opts.time_steps);
    let conformal = conformal_sweep(chart, h, opts)?;
    let shelukhin = shelukhin_from(h, &times, &values, opts, points);
    let rs = rs_from(h, &times, &values, &conformal, opts, points);
    let modified = modified_from(&shelukhin, &conformal, opts);
    Ok(CostSuite { shelukhin, rs, modified, conformal })
}

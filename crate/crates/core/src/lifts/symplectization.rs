//! The symplectization `(M x R, d(e^theta alpha))`: lifted functions and maps,
//! Hamiltonian fields, the symplectic bracket and the coisotropic correspondence.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::charts::{ContactChart, Point, TangentVector};
use crate::dynamics::field::ScalarField;
use crate::dynamics::flow::{integrate_isotopy, pushforward, FlowMap};
use crate::dynamics::vector_field::{contact_bracket_with, contact_field_at, BracketConvention};
use crate::error::{ContactError, Result};
use crate::linalg::{self, DEFAULT_RANK_TOL};
use crate::submanifolds::patch::SubmanifoldPatch;
use crate::submanifolds::tangent::{cap_xi_at, dalpha_perp_with, Subspace};

/// Residual bound for the `iota_X Omega = -dA` cross-check.
pub const FIELD_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SymplectizationChart {
    base: ContactChart,
    chart: ContactChart,
    bracket_sign: f64,
}

impl SymplectizationChart {
    /// Builds the chart and calibrates the sign of the symplectic bracket.
    pub fn new(base: ContactChart) -> Result<Self> {
        let chart = ContactChart::symplectization(base.clone())?;
        let mut s = Self { base, chart, bracket_sign: 1.0 };
        s.bracket_sign = calibrate_bracket_sign()?;
        Ok(s)
    }

    pub fn base(&self) -> &ContactChart {
        &self.base
    }

    pub fn chart(&self) -> &ContactChart {
        &self.chart
    }

    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    pub fn theta_index(&self) -> usize {
        self.base.dimension()
    }

    pub fn bracket_sign(&self) -> f64 {
        self.bracket_sign
    }

    pub fn omega(&self, q: &[f64], u: &[f64], v: &[f64]) -> f64 {
        self.chart.omega_raw(q, u, v)
    }

    /// `M[i][j] = Omega(e_i, e_j)` at `q`.
    pub fn omega_matrix(&self, q: &[f64]) -> DMatrix<f64> {
        let d = self.dimension();
        let e = |i: usize| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            v
        };
        DMatrix::from_fn(d, d, |i, j| self.omega(q, &e(i), &e(j)))
    }

    /// Max deviation of `Omega` from the central-difference exterior derivative
    /// of `beta = e^theta alpha`: `d beta(e_i, e_j) = d_i beta_j - d_j beta_i`.
    pub fn exterior_derivative_check(&self, q: &[f64], h: f64) -> f64 {
        let d = self.dimension();
        let b = self.base.dimension();
        let beta = |x: &[f64]| {
            let mut a = vec![0.0; b];
            self.base.alpha_covector(&x[..b], &mut a);
            let mut out: Vec<f64> = a.into_iter().map(|v| x[b].exp() * v).collect();
            out.push(0.0);
            out
        };
        let mut partial = vec![vec![0.0; d]; d];
        for (i, row) in partial.iter_mut().enumerate() {
            let mut up = q.to_vec();
            let mut dn = q.to_vec();
            up[i] += h;
            dn[i] -= h;
            let (bu, bd) = (beta(&up), beta(&dn));
            for j in 0..d {
                row[j] = (bu[j] - bd[j]) / (2.0 * h);
            }
        }
        let m = self.omega_matrix(q);
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((m[(i, j)] - (partial[i][j] - partial[j][i])).abs());
            }
        }
        worst
    }

    /// `F~(p, theta) = e^theta F(p)`.
    pub fn lift_function(&self, f: &ScalarField) -> Result<ScalarField> {
        if f.is_time_dependent() {
            return Err(ContactError::Precondition("lift_function needs a time-independent field".into()));
        }
        if f.dim() != self.base.dimension() {
            return Err(ContactError::DimensionMismatch { expected: self.base.dimension(), got: f.dim() });
        }
        let b = self.base.dimension();
        let (a, ga) = (f.clone(), f.clone());
        Ok(ScalarField::from_fn(b + 1, move |q| q[b].exp() * a.value(0.0, &q[..b]))
            .with_gradient(move |_, q, out| {
                let e = q[b].exp();
                ga.gradient_into(0.0, &q[..b], &mut out[..b]);
                out[..b].iter_mut().for_each(|v| *v *= e);
                out[b] = e * ga.value(0.0, &q[..b]);
            })
            .with_label(format!("e^theta*({})", f.label())))
    }

    fn check_point(&self, q: &[f64]) -> Result<()> {
        self.chart.check_len(q.len())
    }

    /// `X_A` from `iota_X Omega = -dA`, i.e. `Omega^T X = -dA`.
    pub fn symplectic_field_at(&self, a: &ScalarField, q: &[f64]) -> Result<Vec<f64>> {
        self.check_point(q)?;
        let d = self.dimension();
        let m = self.omega_matrix(q);
        let mut mt: Vec<f64> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| m[(j, i)]).collect();
        let mut rhs: Vec<f64> = a.gradient(0.0, q).into_iter().map(|v| -v).collect();
        let mut x = vec![0.0; d];
        linalg::least_squares(&mut mt, d, d, &mut rhs, &mut x)
            .ok_or_else(|| ContactError::DegenerateChart(format!("Omega degenerate at {q:?}")))?;
        Ok(x)
    }

    /// `X_{F~} = X_F - dF(R) d/dtheta`, cross-checked against `iota_X Omega = -dF~`.
    pub fn lifted_field_at(&self, f: &ScalarField, q: &[f64]) -> Result<TangentVector> {
        self.check_point(q)?;
        let b = self.base.dimension();
        let base_point = Point::new(q[..b].to_vec());
        let x = contact_field_at(&self.base, f, 0.0, &base_point)?;
        let rate = f.gradient(0.0, &base_point.coords)[b - 1];
        let mut comps = x.components;
        comps.push(-rate);
        let lifted = self.lift_function(f)?;
        let dl = lifted.gradient(0.0, q);
        let d = self.dimension();
        let mut residual = 0.0f64;
        let mut scale = 1.0f64;
        for j in 0..d {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            residual = residual.max((self.omega(q, &comps, &e) + dl[j]).abs());
            scale = scale.max(dl[j].abs());
        }
        let bound = FIELD_CHECK_TOL * scale;
        if residual > bound {
            return Err(ContactError::InconsistentSystem { residual, bound });
        }
        Ok(TangentVector::new(Point::new(q.to_vec()), comps))
    }

    /// `{A, B} = s dA(X_B)` with `s` the calibrated sign.
    pub fn symp_bracket_at(&self, a: &ScalarField, b: &ScalarField, q: &[f64]) -> Result<f64> {
        let xb = self.symplectic_field_at(b, q)?;
        Ok(self.bracket_sign * linalg::dot(&a.gradient(0.0, q), &xb))
    }

    /// `|{e^theta F, e^theta G} - e^theta {F, G}|` at `q` under the given contact convention.
    pub fn lift_bracket_deviation(
        &self,
        convention: BracketConvention,
        f: &ScalarField,
        g: &ScalarField,
        q: &[f64],
    ) -> Result<f64> {
        let b = self.base.dimension();
        let lhs = self.symp_bracket_at(&self.lift_function(f)?, &self.lift_function(g)?, q)?;
        let rhs = q[b].exp() * contact_bracket_with(convention, &self.base, f, g, &Point::new(q[..b].to_vec()))?;
        Ok((lhs - rhs).abs())
    }

    /// `Phi(m, theta) = (phi(m), theta - g(m))` for a base flow.
    pub fn lift_map(&self, flow: &FlowMap) -> Result<LiftedMap> {
        if flow.chart != self.base {
            return Err(ContactError::Input(format!("flow lives on `{}`, not `{}`", flow.chart, self.base)));
        }
        Ok(LiftedMap { symp: self.clone(), flow: flow.clone() })
    }
}

/// Sign `s` making `{e^theta x_1, e^theta y_1} = e^0 {x_1, y_1}_c` at the origin of
/// the symplectization of Darboux(1); both contact conventions agree on this pair.
pub fn calibrate_bracket_sign() -> Result<f64> {
    let base = ContactChart::darboux(1);
    let probe = SymplectizationChart { chart: ContactChart::symplectization(base.clone())?, base, bracket_sign: 1.0 };
    let x = ScalarField::coordinate(3, 0);
    let y = ScalarField::coordinate(3, 1);
    let q = [0.0; 4];
    let raw = probe.symp_bracket_at(&probe.lift_function(&x)?, &probe.lift_function(&y)?, &q)?;
    let target = contact_bracket_with(BracketConvention::AsPrinted, &probe.base, &x, &y, &Point::new(vec![0.0; 3]))?;
    for sign in [1.0, -1.0] {
        if (sign * raw - target).abs() <= 1e-12 {
            return Ok(sign);
        }
    }
    Err(ContactError::DegenerateChart(format!("no sign matches: raw {raw}, target {target}")))
}

#[derive(Debug, Clone)]
pub struct LiftedMap {
    symp: SymplectizationChart,
    flow: FlowMap,
}

impl LiftedMap {
    pub fn apply(&self, q: &[f64]) -> Result<Vec<f64>> {
        let b = self.symp.base.dimension();
        let (mut image, g) = self.flow.apply(&q[..b])?;
        image.push(q[b] - g);
        Ok(image)
    }

    /// Max over basis pairs of `|Omega(dPhi e_i, dPhi e_j) - Omega(e_i, e_j)|`.
    pub fn symplectic_residual(&self, q: &[f64], fd_step: f64) -> Result<f64> {
        let d = self.symp.dimension();
        let image = self.apply(q)?;
        let map = |x: &[f64]| self.apply(x);
        let cols = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                pushforward(self.symp.chart(), &map, q, &e, fd_step)
            })
            .collect::<Result<Vec<_>>>()?;
        let before = self.symp.omega_matrix(q);
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.symp.omega(&image, &cols[i], &cols[j]) - before[(i, j)]).abs());
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceRecord {
    pub point: Vec<f64>,
    pub theta: f64,
    /// Principal-angle distance between the projected `Omega`-complement and `(T cap xi)^perp`.
    pub subspace_distance: f64,
    pub contact_coisotropic: bool,
    pub symplectic_coisotropic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub patch: String,
    pub records: Vec<CorrespondenceRecord>,
    pub max_subspace_distance: f64,
    pub contact_verdict: bool,
    pub symplectic_verdict: bool,
    pub tol: f64,
    pub pass: bool,
}

/// Orthonormal `Omega`-complement of `T_pY x R` at `(p, theta)`.
pub fn omega_complement(symp: &SymplectizationChart, frame: &[Vec<f64>], q: &[f64], rank_tol: f64) -> DMatrix<f64> {
    let d = symp.dimension();
    let mut w: Vec<Vec<f64>> = frame.iter().map(|v| {
        let mut v = v.clone();
        v.push(0.0);
        v
    }).collect();
    let mut dtheta = vec![0.0; d];
    dtheta[d - 1] = 1.0;
    w.push(dtheta);
    let m = DMatrix::from_fn(w.len(), d, |i, j| {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        symp.omega(q, &w[i], &e)
    });
    linalg::null_space(&m, rank_tol, None)
}

/// At each sample and `theta`, compare `pi_*((T_pY x R)^{perp_Omega})` with
/// `(T_pY cap xi_p)^{perp_{d alpha}}`, and the two coisotropy verdicts.
pub fn symp_coisotropy_correspondence_check(
    symp: &SymplectizationChart,
    patch: &SubmanifoldPatch,
    thetas: &[f64],
    tol: f64,
) -> Result<CorrespondenceReport> {
    if &patch.chart != symp.base() {
        return Err(ContactError::Input(format!("patch `{}` is not on `{}`", patch.name, symp.base())));
    }
    let b = symp.base.dimension();
    let mut records = Vec::new();
    for sample in patch.tangent_samples(DEFAULT_RANK_TOL)? {
        let cap = cap_xi_at(symp.base(), &sample, DEFAULT_RANK_TOL)?;
        let perp = dalpha_perp_with(symp.base(), &cap, &sample.point, DEFAULT_RANK_TOL)?;
        let contact_coisotropic = perp.inclusion_residual(&cap) <= tol;
        for &theta in thetas {
            let mut q = sample.point.coords.clone();
            q.push(theta);
            let comp = omega_complement(symp, &sample.frame, &q, DEFAULT_RANK_TOL);
            let projected: Vec<Vec<f64>> = (0..comp.ncols()).map(|j| comp.column(j).iter().take(b).copied().collect()).collect();
            let projected = Subspace::span(sample.point.clone(), &projected, DEFAULT_RANK_TOL);
            let mut lifted_frame: Vec<Vec<f64>> = sample.frame.iter().map(|v| {
                let mut v = v.clone();
                v.push(0.0);
                v
            }).collect();
            let mut dtheta = vec![0.0; b + 1];
            dtheta[b] = 1.0;
            lifted_frame.push(dtheta);
            let w = linalg::orthonormal_span(&linalg::columns(&lifted_frame, b + 1), DEFAULT_RANK_TOL);
            let symplectic_coisotropic = linalg::inclusion_sine(&comp, &w) <= tol;
            records.push(CorrespondenceRecord {
                point: sample.point.coords.clone(),
                theta,
                subspace_distance: projected.distance(&perp),
                contact_coisotropic,
                symplectic_coisotropic,
            });
        }
    }
    let max_subspace_distance = records.iter().map(|r| r.subspace_distance).fold(0.0, f64::max);
    let contact_verdict = records.iter().all(|r| r.contact_coisotropic);
    let symplectic_verdict = records.iter().all(|r| r.symplectic_coisotropic);
    let agree = records.iter().all(|r| r.contact_coisotropic == r.symplectic_coisotropic);
    Ok(CorrespondenceReport {
        patch: patch.name.clone(),
        records,
        max_subspace_distance,
        contact_verdict,
        symplectic_verdict,
        tol,
        pass: agree && max_subspace_distance <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedCostReport {
    pub times: Vec<f64>,
    /// `max over the lifted orbit of |e^theta H_t|`.
    pub lifted_max: Vec<f64>,
    /// `max over the base orbit of |H_t|`.
    pub base_max: Vec<f64>,
    pub window: f64,
    pub observed_theta: f64,
    pub lifted_cost: f64,
    pub base_cost: f64,
    /// `e^R` times the base cost.
    pub bound: f64,
    pub pass: bool,
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times.windows(2).zip(values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
}

/// Compare `max |H~_t|` on the lifted orbit of `L x {0}` with `e^R max |H_t|` on
/// the base orbit at `time_samples + 1` times in `[0, 1]`. With `window = None`
/// the window is the observed `|theta|` extent plus 10%.
pub fn lifted_cost_bound_check(
    symp: &SymplectizationChart,
    patch: &SubmanifoldPatch,
    h: &ScalarField,
    window: Option<f64>,
    time_samples: usize,
    step: f64,
) -> Result<LiftedCostReport> {
    if time_samples == 0 {
        return Err(ContactError::Input("need at least one time sample".into()));
    }
    let per = ((1.0 / time_samples as f64) / step).ceil().max(1.0) as usize;
    let fine = 1.0 / (time_samples * per) as f64;
    let trajectories = patch
        .samples()
        .iter()
        .map(|s| integrate_isotopy(symp.base(), h, &patch.point(s), (0.0, 1.0), fine))
        .collect::<Result<Vec<_>>>()?;
    let mut times = Vec::with_capacity(time_samples + 1);
    let mut lifted_max = Vec::with_capacity(time_samples + 1);
    let mut base_max = Vec::with_capacity(time_samples + 1);
    let mut observed = 0.0f64;
    for j in 0..=time_samples {
        let idx = (j * per).min(trajectories[0].len() - 1);
        let t = trajectories[0].times[idx];
        let (mut lm, mut bm) = (0.0f64, 0.0f64);
        for traj in &trajectories {
            let hv = h.value(t, &traj.points[idx].coords).abs();
            // lifted orbit sits at theta = -g_t
            let theta = -traj.conformal[idx];
            observed = observed.max(theta.abs());
            lm = lm.max(theta.exp() * hv);
            bm = bm.max(hv);
        }
        times.push(t);
        lifted_max.push(lm);
        base_max.push(bm);
    }
    let r = match window {
        Some(r) if observed > r => return Err(ContactError::WindowViolation { observed, window: r }),
        Some(r) => r,
        None => 1.1 * observed,
    };
    let er = r.exp();
    let pass = lifted_max.iter().zip(&base_max).all(|(l, b)| *l <= er * b * (1.0 + 1e-12) + 1e-300);
    let lifted_cost = trapezoid(&times, &lifted_max);
    let base_cost = trapezoid(&times, &base_max);
    Ok(LiftedCostReport {
        times,
        lifted_max,
        base_max,
        window: r,
        observed_theta: observed,
        lifted_cost,
        base_cost,
        bound: er * base_cost,
        pass: pass && lifted_cost <= er * base_cost * (1.0 + 1e-12),
    })
}

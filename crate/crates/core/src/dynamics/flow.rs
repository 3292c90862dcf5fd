//! Fixed-step classical RK4 integration of contact isotopies together with
//! their conformal factor: `x' = X_{H_t}(x)`, `g' = dH_t(R)(x)`, `g(t0) = 0`.

use crate::charts::{ContactChart, Point, TangentVector};
use crate::dynamics::field::ScalarField;
use crate::dynamics::vector_field::{solve_contact_field, Workspace};
use crate::error::{ContactError, Result};
use crate::linalg;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_PUSHFORWARD_STEP: f64 = 1e-4;

/// Sampled orbit of one point with its conformal factor.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    pub conformal: Vec<f64>,
    pub step: f64,
    pub hamiltonian: ScalarField,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn end_point(&self) -> &Point {
        self.points.last().expect("trajectory has at least the initial sample")
    }

    pub fn end_conformal(&self) -> f64 {
        *self.conformal.last().expect("trajectory has at least the initial sample")
    }

    /// Largest discrepancy between each stored sample and one fresh integrator
    /// step from its predecessor.
    pub fn step_residual(&self, chart: &ContactChart) -> Result<f64> {
        let mut stepper = Stepper::new(chart, &self.hamiltonian);
        let d = chart.dimension();
        let mut state = vec![0.0; d + 1];
        let mut worst = 0.0f64;
        for i in 1..self.len() {
            state[..d].copy_from_slice(&self.points[i - 1].coords);
            state[d] = self.conformal[i - 1];
            let h = self.times[i] - self.times[i - 1];
            stepper.step(self.times[i - 1], h, &mut state)?;
            let delta = chart.coord_delta(&self.points[i].coords, &state[..d]);
            let e = delta.iter().fold((state[d] - self.conformal[i]).abs(), |m, v| m.max(v.abs()));
            worst = worst.max(e);
        }
        Ok(worst)
    }
}

/// One RK4 step on the joint `(x, g)` state.
pub(crate) struct Stepper<'a> {
    chart: &'a ContactChart,
    h: &'a ScalarField,
    ws: Workspace,
    k: [Vec<f64>; 4],
    probe: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(chart: &'a ContactChart, h: &'a ScalarField) -> Self {
        let d = chart.dimension();
        Self {
            chart,
            h,
            ws: Workspace::new(chart),
            k: [vec![0.0; d + 1], vec![0.0; d + 1], vec![0.0; d + 1], vec![0.0; d + 1]],
            probe: vec![0.0; d + 1],
        }
    }

    fn rhs(&mut self, stage: usize, t: f64, from_probe: bool, state: &[f64]) -> Result<()> {
        let d = self.chart.dimension();
        let src: &[f64] = if from_probe { &self.probe[..d] } else { &state[..d] };
        let src = src.to_vec();
        if src.iter().any(|v| !v.is_finite()) {
            return Err(ContactError::BlowUp { last_valid_time: t });
        }
        let (vec_part, rate_part) = self.k[stage].split_at_mut(d);
        let rate = solve_contact_field(self.chart, self.h, t, &src, &mut self.ws, vec_part)?;
        rate_part[0] = rate;
        Ok(())
    }

    pub(crate) fn step(&mut self, t: f64, dt: f64, state: &mut [f64]) -> Result<()> {
        let n = state.len();
        self.rhs(0, t, false, state)?;
        for (stage, frac) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
            for i in 0..n {
                self.probe[i] = state[i] + frac * dt * self.k[stage - 1][i];
            }
            self.rhs(stage, t + frac * dt, true, state)?;
        }
        for i in 0..n {
            state[i] += dt / 6.0 * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i]);
        }
        let d = self.chart.dimension();
        self.chart.reduce(&mut state[..d]);
        Ok(())
    }
}

fn check_inputs(chart: &ContactChart, h: &ScalarField, x0: &[f64], step: f64) -> Result<()> {
    if !chart.supports_contact_form() {
        return Err(ContactError::UnsupportedForm { chart: chart.to_string(), form: "a contact form" });
    }
    chart.check_len(x0.len())?;
    if h.dim() != chart.dimension() {
        return Err(ContactError::DimensionMismatch { expected: chart.dimension(), got: h.dim() });
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(ContactError::Input(format!("integration step must be positive, got {step}")));
    }
    Ok(())
}

fn step_count(t0: f64, t1: f64, step: f64) -> usize {
    (((t1 - t0).abs() / step) - 1e-9).ceil().max(0.0) as usize
}

/// Integrate `x0` under `H` over `t_span` with RK4 steps of size at most
/// `step` (the span is divided evenly).
pub fn integrate_isotopy(
    chart: &ContactChart,
    h: &ScalarField,
    x0: &Point,
    t_span: (f64, f64),
    step: f64,
) -> Result<Trajectory> {
    check_inputs(chart, h, &x0.coords, step)?;
    let (t0, t1) = t_span;
    if t1 < t0 {
        return Err(ContactError::Input("t_span must be increasing".into()));
    }
    let d = chart.dimension();
    let n = step_count(t0, t1, step);
    let dt = if n == 0 { 0.0 } else { (t1 - t0) / n as f64 };
    let mut state = x0.coords.clone();
    chart.reduce(&mut state);
    state.push(0.0);
    let mut times = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    let mut conformal = Vec::with_capacity(n + 1);
    times.push(t0);
    points.push(Point::new(state[..d].to_vec()));
    conformal.push(0.0);
    let mut stepper = Stepper::new(chart, h);
    for i in 0..n {
        let t = t0 + dt * i as f64;
        stepper.step(t, dt, &mut state).map_err(|e| blow_up_or(e, t))?;
        if state.iter().any(|v| !v.is_finite()) {
            return Err(ContactError::BlowUp { last_valid_time: t });
        }
        times.push(if i + 1 == n { t1 } else { t0 + dt * (i + 1) as f64 });
        points.push(Point::new(state[..d].to_vec()));
        conformal.push(state[d]);
    }
    Ok(Trajectory { times, points, conformal, step: dt, hamiltonian: h.clone() })
}

fn blow_up_or(e: ContactError, t: f64) -> ContactError {
    match e {
        ContactError::InconsistentSystem { residual, .. } if !residual.is_finite() => {
            ContactError::BlowUp { last_valid_time: t }
        }
        ContactError::BlowUp { .. } => ContactError::BlowUp { last_valid_time: t },
        other => other,
    }
}

/// Endpoint of a flow line, with the conformal factor and its running extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEnd {
    pub point: Vec<f64>,
    pub conformal: f64,
    pub conformal_min: f64,
    pub conformal_max: f64,
}

/// Integrate from `t0` to `t1` (either direction) without storing samples.
pub fn flow_endpoint(chart: &ContactChart, h: &ScalarField, x0: &[f64], t0: f64, t1: f64, step: f64) -> Result<FlowEnd> {
    check_inputs(chart, h, x0, step)?;
    let d = chart.dimension();
    let n = step_count(t0, t1, step);
    let mut state = x0.to_vec();
    chart.reduce(&mut state);
    state.push(0.0);
    let (mut gmin, mut gmax) = (0.0f64, 0.0f64);
    if n > 0 {
        let dt = (t1 - t0) / n as f64;
        let mut stepper = Stepper::new(chart, h);
        for i in 0..n {
            let t = t0 + dt * i as f64;
            stepper.step(t, dt, &mut state).map_err(|e| blow_up_or(e, t))?;
            if state.iter().any(|v| !v.is_finite()) {
                return Err(ContactError::BlowUp { last_valid_time: t });
            }
            gmin = gmin.min(state[d]);
            gmax = gmax.max(state[d]);
        }
    }
    Ok(FlowEnd { conformal: state[d], point: state[..d].to_vec(), conformal_min: gmin, conformal_max: gmax })
}

/// The time-`t0 -> t1` map of a contact Hamiltonian.
#[derive(Debug, Clone)]
pub struct FlowMap {
    pub chart: ContactChart,
    pub hamiltonian: ScalarField,
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
}

impl FlowMap {
    pub fn new(chart: ContactChart, hamiltonian: ScalarField, t: f64) -> Self {
        Self { chart, hamiltonian, t0: 0.0, t1: t, step: DEFAULT_STEP }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// Image point and conformal factor `g` with `phi^* alpha = e^g alpha`.
    pub fn apply(&self, p: &[f64]) -> Result<(Vec<f64>, f64)> {
        let end = flow_endpoint(&self.chart, &self.hamiltonian, p, self.t0, self.t1, self.step)?;
        Ok((end.point, end.conformal))
    }

    /// The inverse map, integrating the same Hamiltonian backwards in time.
    pub fn inverse(&self) -> Self {
        Self { t0: self.t1, t1: self.t0, ..self.clone() }
    }
}

/// Fourth-order central-difference pushforward `d phi_p(v)`, with periodic axes unwrapped.
pub fn pushforward(
    chart: &ContactChart,
    map: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    p: &[f64],
    v: &[f64],
    fd_step: f64,
) -> Result<Vec<f64>> {
    let at = |s: f64| map(&p.iter().zip(v).map(|(x, w)| x + s * fd_step * w).collect::<Vec<_>>());
    let (m2, m1, p1, p2) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
    let near = chart.coord_delta(&m1, &p1);
    let far = chart.coord_delta(&m2, &p2);
    Ok(near.iter().zip(&far).map(|(n, f)| (8.0 * n - f) / (12.0 * fd_step)).collect())
}

/// Conformal factor of `map` at `p` measured from finite differences:
/// the least-squares `c` in `alpha_{phi(p)}(d phi e_i) = c alpha_p(e_i)`, returned as `ln c`.
pub fn measured_conformal_factor(
    chart: &ContactChart,
    map: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    p: &[f64],
    fd_step: f64,
) -> Result<f64> {
    let d = chart.dimension();
    let image = map(p)?;
    let mut a_src = vec![0.0; d];
    let mut a_dst = vec![0.0; d];
    chart.alpha_covector(p, &mut a_src);
    chart.alpha_covector(&image, &mut a_dst);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let push = pushforward(chart, map, p, &e, fd_step)?;
        num += linalg::dot(&a_dst, &push) * a_src[i];
        den += a_src[i] * a_src[i];
    }
    let c = num / den;
    if !(c > 0.0) {
        return Err(ContactError::Precondition(format!("map does not preserve the coorientation (factor {c})")));
    }
    Ok(c.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactomorphismReport {
    /// Integrated `g_t(p)`.
    pub conformal: f64,
    /// `|alpha(d phi e_i) - e^g alpha(e_i)|` per coordinate direction.
    pub per_basis: Vec<f64>,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Check `phi^* alpha = e^{g_t} alpha` at `p` for the time-`t` flow of `H`.
pub fn verify_contactomorphism(
    chart: &ContactChart,
    h: &ScalarField,
    p: &Point,
    t: f64,
    fd_step: f64,
    tol: f64,
) -> Result<ContactomorphismReport> {
    verify_contactomorphism_with_step(chart, h, p, t, fd_step, tol, DEFAULT_STEP)
}

pub fn verify_contactomorphism_with_step(
    chart: &ContactChart,
    h: &ScalarField,
    p: &Point,
    t: f64,
    fd_step: f64,
    tol: f64,
    step: f64,
) -> Result<ContactomorphismReport> {
    let flow = FlowMap::new(chart.clone(), h.clone(), t).with_step(step);
    let (image, g) = flow.apply(&p.coords)?;
    let map = |q: &[f64]| flow.apply(q).map(|(x, _)| x);
    let d = chart.dimension();
    let mut a_src = vec![0.0; d];
    let mut a_dst = vec![0.0; d];
    chart.alpha_covector(&p.coords, &mut a_src);
    chart.alpha_covector(&image, &mut a_dst);
    let mut per_basis = Vec::with_capacity(d);
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let push = pushforward(chart, &map, &p.coords, &e, fd_step)?;
        per_basis.push((linalg::dot(&a_dst, &push) - g.exp() * a_src[i]).abs());
    }
    let residual = per_basis.iter().copied().fold(0.0, f64::max);
    Ok(ContactomorphismReport { conformal: g, per_basis, residual, tol, pass: residual <= tol })
}

/// `X_H` along a trajectory sample, for callers holding typed points.
pub fn field_along(chart: &ContactChart, traj: &Trajectory, index: usize) -> Result<TangentVector> {
    crate::dynamics::vector_field::contact_field_at(chart, &traj.hamiltonian, traj.times[index], &traj.points[index])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::{hk, Polynomial};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reeb_flow_translates_z() {
        let chart = ContactChart::darboux(1);
        let p = chart.point(vec![0.3, -0.2, 0.5]).unwrap();
        let traj = integrate_isotopy(&chart, &ScalarField::constant(3, 1.0), &p, (0.0, 1.0), 1e-3).unwrap();
        let end = traj.end_point();
        assert!((end.coords[0] - 0.3).abs() < 1e-14);
        assert!((end.coords[1] + 0.2).abs() < 1e-14);
        assert!((end.coords[2] - 1.5).abs() < 1e-12);
        assert_eq!(traj.end_conformal(), 0.0);
        assert_eq!(traj.conformal[0], 0.0);
        assert_eq!(traj.times.len(), 1001);
        assert_eq!(*traj.times.last().unwrap(), 1.0);
    }

    #[test]
    fn x_flow_from_origin() {
        // x' = 0, y' = 1, z' = x = 0
        let chart = ContactChart::darboux(1);
        let traj = integrate_isotopy(&chart, &ScalarField::coordinate(3, 0), &chart.origin(), (0.0, 1.0), 1e-3).unwrap();
        let end = traj.end_point();
        assert!(end.coords[0].abs() < 1e-14 && (end.coords[1] - 1.0).abs() < 1e-12 && end.coords[2].abs() < 1e-14);
        assert_eq!(traj.end_conformal(), 0.0);
    }

    #[test]
    fn hk_origin_is_fixed_and_g_is_linear() {
        let chart = ContactChart::darboux(1);
        for k in [1, 3, 6] {
            let traj = integrate_isotopy(&chart, &hk(k), &chart.origin(), (0.0, 1.0), 1e-3).unwrap();
            for (t, (p, g)) in traj.times.iter().zip(traj.points.iter().zip(&traj.conformal)) {
                assert_eq!(p.coords, vec![0.0; 3]);
                assert!((g + k as f64 * t).abs() <= 1e-9 * (1.0 + k as f64 * t));
            }
        }
    }

    #[test]
    fn z_flow_is_contact_with_factor_e() {
        // H = z scales (y, z) by e^t: phi^* alpha = e^t alpha.
        let chart = ContactChart::darboux(1);
        let p = chart.point(vec![0.0, 1.0, 1.0]).unwrap();
        let rep = verify_contactomorphism(&chart, &ScalarField::coordinate(3, 2), &p, 1.0, 1e-4, 1e-6).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.conformal - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reeb_flow_is_strict() {
        let chart = ContactChart::darboux(2);
        let p = chart.point(vec![0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        let rep = verify_contactomorphism(&chart, &ScalarField::constant(5, 1.0), &p, 1.0, 1e-4, 1e-9).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.conformal, 0.0);
    }

    #[test]
    fn random_quadratic_flows_are_contactomorphisms() {
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let h = ScalarField::polynomial(Polynomial::random(3, 2, 0.4, &mut rng));
            let p = chart.sample_point(&mut rng, 0.5);
            let rep = verify_contactomorphism_with_step(&chart, &h, &p, 1.0, 1e-4, 1e-6, 1e-2).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn trajectory_steps_are_reproducible() {
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = ScalarField::polynomial(Polynomial::random(3, 2, 0.5, &mut rng));
        let traj = integrate_isotopy(&chart, &h, &chart.origin(), (0.0, 0.5), 1e-2).unwrap();
        assert!(traj.step_residual(&chart).unwrap() <= 10.0 * traj.step.powi(5));
    }

    #[test]
    fn blow_up_reported_with_last_valid_time() {
        // z' = z^2 style growth: H = z^2 gives z' = z^2 on the z-axis, escaping at t = 1/z0.
        let chart = ContactChart::darboux(1);
        let h = ScalarField::polynomial(
            Polynomial::new(3, vec![crate::dynamics::field::Monomial { coefficient: 1.0, powers: vec![0, 0, 2], time_power: 0 }]).unwrap(),
        );
        let p = chart.point(vec![0.0, 0.0, 10.0]).unwrap();
        match integrate_isotopy(&chart, &h, &p, (0.0, 1.0), 1e-2) {
            Err(ContactError::BlowUp { last_valid_time }) => assert!(last_valid_time < 1.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn circle_rotation_wraps() {
        let chart = ContactChart::Circle;
        let p = chart.point(vec![0.9]).unwrap();
        let traj = integrate_isotopy(&chart, &ScalarField::constant(1, 0.3), &p, (0.0, 1.0), 1e-3).unwrap();
        assert!((traj.end_point().coords[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn inverse_map_undoes_forward_map() {
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = ScalarField::polynomial(Polynomial::random(3, 2, 0.4, &mut rng));
        let flow = FlowMap::new(chart.clone(), h, 1.0);
        let p = [0.2, -0.1, 0.4];
        let (q, g) = flow.apply(&p).unwrap();
        let (back, ginv) = flow.inverse().apply(&q).unwrap();
        for (a, b) in back.iter().zip(&p) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((ginv + g).abs() < 1e-10);
    }

    #[test]
    fn bad_inputs_rejected() {
        let chart = ContactChart::darboux(1);
        let h = ScalarField::zero(3);
        assert!(integrate_isotopy(&chart, &h, &chart.origin(), (0.0, 1.0), 0.0).is_err());
        assert!(integrate_isotopy(&chart, &h, &chart.origin(), (1.0, 0.0), 1e-3).is_err());
        assert!(integrate_isotopy(&chart, &ScalarField::zero(5), &chart.origin(), (0.0, 1.0), 1e-3).is_err());
    }
}

//! Hamiltonian-level composition: truncation `beta_n o G`, the generator of
//! `phi_G^{-t} o phi_H^t`, transport of functions by a contactomorphism, and
//! the naturality / conformal-factor algebra checks built on them.

use serde::{Deserialize, Serialize};

use crate::charts::{ContactChart, Point};
use crate::dynamics::field::ScalarField;
use crate::dynamics::flow::{flow_endpoint, measured_conformal_factor, FlowMap, DEFAULT_PUSHFORWARD_STEP};
use crate::dynamics::vector_field::{contact_bracket_with, BracketConvention};
use crate::error::{ContactError, Result};

/// Quintic smoothstep `6u^5 - 15u^4 + 10u^3` on `[0, 1]`, with derivative.
fn smoothstep(u: f64) -> (f64, f64) {
    let u = u.clamp(0.0, 1.0);
    let s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    let ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    (s, ds)
}

/// `beta_n(s)` and `beta_n'(s)`: zero for `|s| < 1/(2n)`, identity for `|s| >= 1/n`.
pub fn beta(n: u32, s: f64) -> (f64, f64) {
    let n = n as f64;
    let u = (s.abs() - 0.5 / n) * 2.0 * n;
    if u >= 1.0 {
        return (s, 1.0);
    }
    if u <= 0.0 {
        return (0.0, 0.0);
    }
    let (w, dw) = smoothstep(u);
    (s * w, w + s.abs() * 2.0 * n * dw)
}

/// `beta_n o G`, with gradient by the chain rule.
pub fn truncate(g: &ScalarField, n: u32) -> Result<ScalarField> {
    if n == 0 {
        return Err(ContactError::Input("truncation order n must be >= 1".into()));
    }
    let (a, ga) = (g.clone(), g.clone());
    let mut f = ScalarField::from_time_fn(g.dim(), move |t, p| beta(n, a.value(t, p)).0).with_gradient(
        move |t, p, out| {
            let (_, db) = beta(n, ga.value(t, p));
            ga.gradient_into(t, p, out);
            out.iter_mut().for_each(|v| *v *= db);
        },
    );
    if !g.is_time_dependent() {
        f = f.frozen(0.0);
    }
    f = f.with_label(format!("beta_{n}({})", g.label())).with_fd_step(g.fd_step());
    Ok(match g.support() {
        Some(s) => f.with_support(s.clone()),
        None => f.without_support(),
    })
}

/// Generator of `phi_G^{-t} o phi_H^t`:
/// `(t, p) -> e^{-g_t(p)} (H - G)(t, phi_G^t(p))`, where `g_t` is the conformal
/// factor of `phi_G^t`. The flow of `G` is re-integrated on demand with `step`;
/// the gradient is by central differences.
pub fn transition_hamiltonian(chart: &ContactChart, g: &ScalarField, h: &ScalarField, step: f64) -> Result<ScalarField> {
    if g.dim() != chart.dimension() || h.dim() != chart.dimension() {
        return Err(ContactError::DimensionMismatch { expected: chart.dimension(), got: g.dim().min(h.dim()) });
    }
    if !chart.supports_contact_form() {
        return Err(ContactError::UnsupportedForm { chart: chart.to_string(), form: "a contact form" });
    }
    let (chart_c, gc, hc) = (chart.clone(), g.clone(), h.clone());
    let label = format!("transition({}, {})", g.label(), h.label());
    let f = ScalarField::from_time_fn(chart.dimension(), move |t, p| {
        match flow_endpoint(&chart_c, &gc, p, 0.0, t, step) {
            Ok(end) => (-end.conformal).exp() * (hc.value(t, &end.point) - gc.value(t, &end.point)),
            Err(_) => f64::NAN,
        }
    });
    Ok(f.with_label(label).with_fd_step(g.fd_step()))
}

/// `e^{-g} F o phi` for the time-1 map `phi` of `flow` (gradient by central differences).
pub fn transported_field(flow: &FlowMap, f: &ScalarField) -> ScalarField {
    let (map, fc) = (flow.clone(), f.clone());
    ScalarField::from_fn(f.dim(), move |p| match map.apply(p) {
        Ok((q, g)) => (-g).exp() * fc.value(0.0, &q),
        Err(_) => f64::NAN,
    })
    .with_label(format!("transport({})", f.label()))
    .with_fd_step(f.fd_step())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalityReport {
    pub convention: BracketConvention,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare `{e^{-g} F o phi, e^{-g} G o phi}` against `e^{-g} {F, G} o phi`
/// at each sample, `phi` the time-1 flow of `h_psi` integrated with `step`.
pub fn verify_conformal_naturality(
    convention: BracketConvention,
    chart: &ContactChart,
    h_psi: &ScalarField,
    f: &ScalarField,
    g: &ScalarField,
    samples: &[Point],
    step: f64,
    tol: f64,
) -> Result<NaturalityReport> {
    let flow = FlowMap::new(chart.clone(), h_psi.clone(), 1.0).with_step(step);
    let tf = transported_field(&flow, f);
    let tg = transported_field(&flow, g);
    let mut lhs = Vec::with_capacity(samples.len());
    let mut rhs = Vec::with_capacity(samples.len());
    for p in samples {
        let (q, factor) = flow.apply(&p.coords)?;
        let left = contact_bracket_with(convention, chart, &tf, &tg, p)?;
        let right = (-factor).exp() * contact_bracket_with(convention, chart, f, g, &Point::new(q))?;
        if !left.is_finite() {
            return Err(ContactError::BlowUp { last_valid_time: 0.0 });
        }
        lhs.push(left);
        rhs.push(right);
    }
    let max_deviation = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(NaturalityReport { convention, lhs, rhs, max_deviation, tol, pass: max_deviation <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalAlgebraReport {
    /// `|g_{psi o phi} - (g_psi o phi + g_phi)|` with the left side measured.
    pub composition_defect: f64,
    /// `|g_{phi^{-1}} - (-g_phi o phi^{-1})|` with the left side measured.
    pub inverse_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Composition and inverse identities for the conformal factors of the
/// time-1 maps `phi` (of `f`) and `psi` (of `g`) at `p`. The factors on the
/// left are measured from finite-difference pushforwards of the composed maps;
/// those on the right are the integrated ones.
pub fn verify_conformal_algebra(
    chart: &ContactChart,
    f: &ScalarField,
    g: &ScalarField,
    p: &[f64],
    step: f64,
    tol: f64,
) -> Result<ConformalAlgebraReport> {
    let phi = FlowMap::new(chart.clone(), f.clone(), 1.0).with_step(step);
    let psi = FlowMap::new(chart.clone(), g.clone(), 1.0).with_step(step);
    let phi_inv = phi.inverse();
    let composed = |q: &[f64]| -> Result<Vec<f64>> {
        let (a, _) = phi.apply(q)?;
        Ok(psi.apply(&a)?.0)
    };
    let (phi_p, g_phi) = phi.apply(p)?;
    let (_, g_psi_at) = psi.apply(&phi_p)?;
    let measured = measured_conformal_factor(chart, &composed, p, DEFAULT_PUSHFORWARD_STEP)?;
    let composition_defect = (measured - (g_psi_at + g_phi)).abs();

    let (pre, _) = phi_inv.apply(p)?;
    let (_, g_phi_at_pre) = phi.apply(&pre)?;
    let inv_map = |q: &[f64]| phi_inv.apply(q).map(|(x, _)| x);
    let measured_inv = measured_conformal_factor(chart, &inv_map, p, DEFAULT_PUSHFORWARD_STEP)?;
    let inverse_defect = (measured_inv + g_phi_at_pre).abs();
    Ok(ConformalAlgebraReport {
        composition_defect,
        inverse_defect,
        tol,
        pass: composition_defect <= tol && inverse_defect <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::{Polynomial, SupportBox};
    use crate::dynamics::flow::flow_endpoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn beta_examples() {
        assert_eq!(beta(1, 1.5).0, 1.5);
        assert_eq!(beta(2, 0.2).0, 0.0);
        assert_eq!(beta(2, -0.2).0, 0.0);
        assert_eq!(beta(3, -0.5).0, -0.5);
    }

    #[test]
    fn beta_is_odd_monotone_and_close() {
        for n in 1..=10u32 {
            let mut prev = f64::NEG_INFINITY;
            for i in -2000..=2000 {
                let s = i as f64 / 1000.0;
                let (b, db) = beta(n, s);
                assert!((b + beta(n, -s).0).abs() < 1e-15);
                assert!(b >= prev - 1e-15);
                assert!(db >= 0.0);
                assert!((b - s).abs() <= 1.0 / n as f64 + 1e-15);
                prev = b;
            }
        }
    }

    #[test]
    fn beta_derivative_matches_differences() {
        for n in [1u32, 3, 7] {
            for i in 1..200 {
                let s = i as f64 / 150.0;
                let h = 1e-6;
                let fd = (beta(n, s + h).0 - beta(n, s - h).0) / (2.0 * h);
                assert!((fd - beta(n, s).1).abs() < 1e-5, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn truncated_field_gradient_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = ScalarField::polynomial(Polynomial::random(3, 2, 1.0, &mut rng)).with_support(SupportBox::cube(3, 1.0));
        let tg = truncate(&g, 3).unwrap();
        let samples: Vec<(f64, Vec<f64>)> = (0..200).map(|i| (0.0, vec![0.01 * i as f64 - 1.0, 0.3, -0.2])).collect();
        assert!(tg.gradient_check(&samples, 1e-5) < 1e-5);
        assert!(tg.support().is_some());
        assert!(truncate(&g, 0).is_err());
    }

    #[test]
    fn transition_of_equal_fields_is_zero() {
        let chart = ContactChart::darboux(1);
        let h = ScalarField::coordinate(3, 2);
        let k = transition_hamiltonian(&chart, &h, &h, 1e-2).unwrap();
        assert_eq!(k.value(0.7, &[0.1, 0.2, 0.3]), 0.0);
    }

    #[test]
    fn transition_over_zero_is_identity() {
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = ScalarField::polynomial(Polynomial::random(3, 2, 1.0, &mut rng));
        let k = transition_hamiltonian(&chart, &ScalarField::zero(3), &h, 1e-2).unwrap();
        for p in [[0.1, 0.2, 0.3], [-1.0, 0.5, 2.0]] {
            assert!((k.value(0.4, &p) - h.value(0.4, &p)).abs() < 1e-15);
        }
    }

    #[test]
    fn transition_reproduces_composite_flow() {
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = ScalarField::polynomial(Polynomial::random(3, 2, 0.5, &mut rng));
        let h = truncate(&g, 2).unwrap();
        let step = 1e-2;
        let k = transition_hamiltonian(&chart, &g, &h, step).unwrap();
        let x0 = [0.2, -0.3, 0.1];
        let via_k = flow_endpoint(&chart, &k, &x0, 0.0, 1.0, step).unwrap().point;
        let a = flow_endpoint(&chart, &h, &x0, 0.0, 1.0, step).unwrap().point;
        let direct = flow_endpoint(&chart, &g, &a, 1.0, 0.0, step).unwrap().point;
        for (u, v) in via_k.iter().zip(&direct) {
            assert!((u - v).abs() < 1e-6, "{via_k:?} vs {direct:?}");
        }
    }

    #[test]
    fn naturality_under_identity_and_reeb() {
        let chart = ContactChart::darboux(1);
        let f = ScalarField::coordinate(3, 0);
        let g = ScalarField::coordinate(3, 1);
        let samples = vec![chart.point(vec![0.3, 0.1, -0.4]).unwrap(), chart.origin()];
        for conv in [BracketConvention::AsPrinted, BracketConvention::SignFlipped] {
            let rep = verify_conformal_naturality(conv, &chart, &ScalarField::zero(3), &f, &g, &samples, 1e-2, 1e-9).unwrap();
            assert!(rep.pass, "{rep:?}");
            let rep = verify_conformal_naturality(conv, &chart, &ScalarField::constant(3, 1.0), &f, &g, &samples, 1e-2, 1e-8)
                .unwrap();
            assert!(rep.pass, "{rep:?}");
            for v in rep.lhs.iter().chain(&rep.rhs) {
                assert!((v + 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sign_flipped_bracket_is_natural_for_random_flows() {
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let hpsi = ScalarField::polynomial(Polynomial::random(3, 2, 0.4, &mut rng));
            let f = ScalarField::polynomial(Polynomial::random(3, 2, 1.0, &mut rng));
            let g = ScalarField::polynomial(Polynomial::random(3, 2, 1.0, &mut rng));
            let samples = vec![chart.sample_point(&mut rng, 0.5)];
            let rep = verify_conformal_naturality(BracketConvention::SignFlipped, &chart, &hpsi, &f, &g, &samples, 1e-2, 1e-5)
                .unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn conformal_algebra_identities() {
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let f = ScalarField::polynomial(Polynomial::random(3, 2, 0.4, &mut rng));
            let g = ScalarField::polynomial(Polynomial::random(3, 2, 0.4, &mut rng));
            let p = chart.sample_point(&mut rng, 0.5);
            let rep = verify_conformal_algebra(&chart, &f, &g, &p.coords, 1e-2, 1e-6).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }
}

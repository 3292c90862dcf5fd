//! Contact Hamiltonian vector fields and contact brackets.
//!
//! `X_H` is the solution of `alpha(X) = H` together with
//! `d alpha(X, -) = dH(R) alpha(-) - dH(-)`, solved as one stacked
//! `(d+1) x d` least-squares system whose residual is checked on every call.

use serde::{Deserialize, Serialize};

use crate::charts::{ContactChart, Point, TangentVector};
use crate::dynamics::field::ScalarField;
use crate::error::{ContactError, Result};
use crate::linalg;

/// Relative residual bound `1e-10 * (1 + |H| + |dH|)` for the stacked solve.
pub const SOLVE_RESIDUAL_FACTOR: f64 = 1e-10;

/// Scratch buffers for repeated solves on one chart.
pub(crate) struct Workspace {
    dim: usize,
    grad: Vec<f64>,
    alpha: Vec<f64>,
    dalpha: Vec<f64>,
    mat: Vec<f64>,
    mat_work: Vec<f64>,
    rhs: Vec<f64>,
    rhs_work: Vec<f64>,
}

impl Workspace {
    pub(crate) fn new(chart: &ContactChart) -> Self {
        let d = chart.dimension();
        let mut dalpha = vec![0.0; d * d];
        if chart.supports_contact_form() {
            chart.dalpha_matrix(&mut dalpha);
        }
        Self {
            dim: d,
            grad: vec![0.0; d],
            alpha: vec![0.0; d],
            dalpha,
            mat: vec![0.0; (d + 1) * d],
            mat_work: vec![0.0; (d + 1) * d],
            rhs: vec![0.0; d + 1],
            rhs_work: vec![0.0; d + 1],
        }
    }
}

fn require_contact(chart: &ContactChart) -> Result<()> {
    if chart.supports_contact_form() {
        Ok(())
    } else {
        Err(ContactError::UnsupportedForm { chart: chart.to_string(), form: "a contact form" })
    }
}

/// Solve for `X_H(t, p)` into `out`; returns the conformal rate `dH(R)`.
///
/// Every chart in the catalog has Reeb field `e_{d-1}`, so `dH(R)` is the
/// last gradient component.
pub(crate) fn solve_contact_field(
    chart: &ContactChart,
    h: &ScalarField,
    t: f64,
    p: &[f64],
    ws: &mut Workspace,
    out: &mut [f64],
) -> Result<f64> {
    let d = ws.dim;
    let value = h.value(t, p);
    h.gradient_into(t, p, &mut ws.grad);
    chart.alpha_covector(p, &mut ws.alpha);
    let rate = ws.grad[d - 1];

    // row 0: alpha(X) = H
    ws.mat[..d].copy_from_slice(&ws.alpha);
    ws.rhs[0] = value;
    // row 1 + j: sum_i X_i d alpha(e_i, e_j) = rate * alpha_j - dH_j
    for j in 0..d {
        let row = (1 + j) * d;
        for i in 0..d {
            ws.mat[row + i] = ws.dalpha[i * d + j];
        }
        ws.rhs[1 + j] = rate * ws.alpha[j] - ws.grad[j];
    }
    ws.mat_work.copy_from_slice(&ws.mat);
    ws.rhs_work.copy_from_slice(&ws.rhs);
    if linalg::least_squares(&mut ws.mat_work, d + 1, d, &mut ws.rhs_work, out).is_none() {
        return Err(ContactError::DegenerateChart(format!("stacked contact system singular on `{chart}`")));
    }
    let mut residual = 0.0f64;
    for r in 0..=d {
        let row = &ws.mat[r * d..(r + 1) * d];
        residual = residual.max((linalg::dot(row, out) - ws.rhs[r]).abs());
    }
    let bound = SOLVE_RESIDUAL_FACTOR * (1.0 + value.abs() + linalg::norm(&ws.grad));
    if !(residual <= bound) {
        return Err(ContactError::InconsistentSystem { residual, bound });
    }
    Ok(rate)
}

fn check_point(chart: &ContactChart, h: &ScalarField, p: &Point) -> Result<()> {
    require_contact(chart)?;
    chart.check_len(p.dim())?;
    if h.dim() != chart.dimension() {
        return Err(ContactError::DimensionMismatch { expected: chart.dimension(), got: h.dim() });
    }
    Ok(())
}

/// `X_H` at `(t, p)`.
pub fn contact_field_at(chart: &ContactChart, h: &ScalarField, t: f64, p: &Point) -> Result<TangentVector> {
    check_point(chart, h, p)?;
    let mut ws = Workspace::new(chart);
    let mut out = vec![0.0; chart.dimension()];
    solve_contact_field(chart, h, t, &p.coords, &mut ws, &mut out)?;
    Ok(TangentVector::new(p.clone(), out))
}

/// Conformal rate `dH_(t,p)(R_alpha)`.
pub fn conformal_rate_at(chart: &ContactChart, h: &ScalarField, t: f64, p: &Point) -> Result<f64> {
    check_point(chart, h, p)?;
    let mut r = vec![0.0; chart.dimension()];
    chart.reeb_raw(&mut r);
    Ok(linalg::dot(&h.gradient(t, &p.coords), &r))
}

/// Which sign the `F dG(R)` term of the contact bracket carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BracketConvention {
    /// `{F, G}_c = dF(X_G) + dG(R) F`.
    AsPrinted,
    /// `{F, G}_- = dF(X_G) - dG(R) F`, equal to `-alpha([X_F, X_G])`;
    /// antisymmetric and natural under contactomorphisms.
    SignFlipped,
}

/// `{F, G}_c = dF(X_G) + dG(R_alpha) F` at `p`.
pub fn contact_bracket_at(chart: &ContactChart, f: &ScalarField, g: &ScalarField, p: &Point) -> Result<f64> {
    contact_bracket_with(BracketConvention::AsPrinted, chart, f, g, p)
}

pub fn contact_bracket_with(
    convention: BracketConvention,
    chart: &ContactChart,
    f: &ScalarField,
    g: &ScalarField,
    p: &Point,
) -> Result<f64> {
    if f.is_time_dependent() || g.is_time_dependent() {
        return Err(ContactError::Precondition(
            "contact bracket needs time-independent fields; freeze them at a time first".into(),
        ));
    }
    check_point(chart, f, p)?;
    check_point(chart, g, p)?;
    let mut ws = Workspace::new(chart);
    let mut xg = vec![0.0; chart.dimension()];
    let rate_g = solve_contact_field(chart, g, 0.0, &p.coords, &mut ws, &mut xg)?;
    let df = f.gradient(0.0, &p.coords);
    let fv = f.value(0.0, &p.coords);
    let lead = linalg::dot(&df, &xg);
    Ok(match convention {
        BracketConvention::AsPrinted => lead + rate_g * fv,
        BracketConvention::SignFlipped => lead - rate_g * fv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::{hk, Polynomial};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn darboux_coordinate_fields_closed_forms() {
        let chart = ContactChart::darboux(2);
        let p = chart.point(vec![0.3, -0.4, 1.1, 0.7, -2.0]).unwrap();
        // X_{x1} = d/dy1 + x1 d/dz
        let x = contact_field_at(&chart, &ScalarField::coordinate(5, 0), 0.0, &p).unwrap();
        assert!(x.components.iter().zip([0.0, 0.0, 1.0, 0.0, 0.3]).all(|(a, b)| (a - b).abs() < 1e-14));
        // X_{y2} = -d/dx2
        let x = contact_field_at(&chart, &ScalarField::coordinate(5, 3), 0.0, &p).unwrap();
        assert!(x.components.iter().zip([0.0, -1.0, 0.0, 0.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-15));
        // X_z = y . d/dy + z d/dz
        let x = contact_field_at(&chart, &ScalarField::coordinate(5, 4), 0.0, &p).unwrap();
        let expected = [0.0, 0.0, 1.1, 0.7, -2.0];
        assert!(x.components.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn z_field_vanishes_at_origin() {
        let chart = ContactChart::darboux(1);
        let x = contact_field_at(&chart, &ScalarField::coordinate(3, 2), 0.0, &chart.origin()).unwrap();
        assert_eq!(x.components, vec![0.0; 3]);
    }

    #[test]
    fn constant_one_gives_reeb_on_every_chart() {
        for chart in [ContactChart::darboux(1), ContactChart::darboux(3), ContactChart::Circle, ContactChart::Prequantization] {
            let d = chart.dimension();
            let p = chart.point((0..d).map(|i| 0.1 * i as f64 + 0.05).collect()).unwrap();
            let x = contact_field_at(&chart, &ScalarField::constant(d, 1.0), 0.0, &p).unwrap();
            let r = chart.reeb_at(&p).unwrap();
            for (a, b) in x.components.iter().zip(&r.components) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bracket_of_x_and_y_is_minus_one() {
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p = chart.sample_point(&mut rng, 2.0);
            let b = contact_bracket_at(&chart, &ScalarField::coordinate(3, 0), &ScalarField::coordinate(3, 1), &p).unwrap();
            assert!((b + 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn self_bracket_matches_brute_force() {
        // Oracle: {F, F}_c = 2 F dF(R) computed straight from F's gradient.
        let chart = ContactChart::darboux(1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let f = ScalarField::polynomial(Polynomial::random(3, 2, 1.0, &mut rng));
            let p = chart.sample_point(&mut rng, 1.0);
            let b = contact_bracket_at(&chart, &f, &f, &p).unwrap();
            let oracle = 2.0 * f.value(0.0, &p.coords) * f.gradient(0.0, &p.coords)[2];
            assert!((b - oracle).abs() < 1e-10 * (1.0 + oracle.abs()), "{b} vs {oracle}");
        }
    }

    #[test]
    fn brackets_vanish_on_legendrian_axis_for_ideal_elements() {
        // F, G vanish on {y = z = 0}
        let chart = ContactChart::darboux(1);
        let y = ScalarField::coordinate(3, 1);
        let z = ScalarField::coordinate(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = y.mul(&ScalarField::polynomial(Polynomial::random(3, 2, 1.0, &mut rng)));
        let g = z.mul(&ScalarField::polynomial(Polynomial::random(3, 2, 1.0, &mut rng)));
        for u in [-1.0, -0.3, 0.0, 0.5, 2.0] {
            let p = chart.point(vec![u, 0.0, 0.0]).unwrap();
            assert!(contact_bracket_at(&chart, &f, &g, &p).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn conformal_rate_examples() {
        let chart = ContactChart::darboux(1);
        let p = chart.point(vec![0.2, 0.3, 0.4]).unwrap();
        assert_eq!(conformal_rate_at(&chart, &ScalarField::coordinate(3, 0), 0.0, &p).unwrap(), 0.0);
        assert_eq!(conformal_rate_at(&chart, &ScalarField::coordinate(3, 2), 0.0, &p).unwrap(), 1.0);
        for k in [1, 2, 5] {
            let r = conformal_rate_at(&chart, &hk(k), 0.0, &chart.origin()).unwrap();
            assert_eq!(r, -(k as f64));
        }
    }

    #[test]
    fn time_dependent_bracket_rejected() {
        let chart = ContactChart::darboux(1);
        let f = ScalarField::from_time_fn(3, |t, p| t * p[0]);
        let g = ScalarField::coordinate(3, 1);
        let err = contact_bracket_at(&chart, &f, &g, &chart.origin()).unwrap_err();
        assert!(matches!(err, ContactError::Precondition(_)));
        assert!(contact_bracket_at(&chart, &f.frozen(0.5), &g, &chart.origin()).is_ok());
    }

    #[test]
    fn symplectization_has_no_contact_field() {
        let chart = ContactChart::symplectization(ContactChart::darboux(1)).unwrap();
        let err = contact_field_at(&chart, &ScalarField::zero(4), 0.0, &chart.origin()).unwrap_err();
        assert!(matches!(err, ContactError::UnsupportedForm { .. }));
    }

    #[test]
    fn non_finite_gradient_trips_residual_monitor() {
        let chart = ContactChart::darboux(1);
        let broken = ScalarField::from_fn(3, |_| 0.0).with_gradient(|_, _, out| {
            out[0] = 0.0;
            out[1] = 0.0;
            out[2] = f64::NAN;
        });
        assert!(matches!(
            contact_field_at(&chart, &broken, 0.0, &chart.origin()),
            Err(ContactError::InconsistentSystem { .. })
        ));
    }
}

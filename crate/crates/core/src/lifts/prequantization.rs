//! The trivial prequantization `R^2 x S^1 -> R^2` with `alpha = dt + x dy`,
//! `d alpha = pi^* (dx ^ dy)`.

use serde::{Deserialize, Serialize};

use crate::charts::{ContactChart, Point, TangentVector};
use crate::dynamics::field::ScalarField;
use crate::dynamics::vector_field::{contact_bracket_with, contact_field_at, BracketConvention};
use crate::error::{ContactError, Result};
use crate::linalg::{self, DEFAULT_RANK_TOL};
use crate::submanifolds::patch::PlanarPatch;
use crate::submanifolds::tangent::coisotropy_test;

pub const LIFT_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrequantizationChart;

impl PrequantizationChart {
    pub fn chart(&self) -> ContactChart {
        ContactChart::Prequantization
    }

    pub fn project(&self, a: &[f64]) -> [f64; 2] {
        [a[0], a[1]]
    }

    /// `omega = dx ^ dy` on the base.
    pub fn base_omega(&self, u: &[f64], v: &[f64]) -> f64 {
        u[0] * v[1] - u[1] * v[0]
    }

    /// `pi^* F`.
    pub fn pullback(&self, f: &ScalarField) -> Result<ScalarField> {
        if f.dim() != 2 {
            return Err(ContactError::DimensionMismatch { expected: 2, got: f.dim() });
        }
        if f.is_time_dependent() {
            return Err(ContactError::Precondition("pullback needs a time-independent base field".into()));
        }
        let (a, ga) = (f.clone(), f.clone());
        Ok(ScalarField::from_fn(3, move |p| a.value(0.0, &p[..2]))
            .with_gradient(move |_, p, out| {
                ga.gradient_into(0.0, &p[..2], &mut out[..2]);
                out[2] = 0.0;
            })
            .with_label(format!("pi*({})", f.label())))
    }

    /// Base Hamiltonian field with `iota_X omega = -dF`: `(-F_y, F_x)`.
    pub fn planar_field(&self, f: &ScalarField, xy: &[f64]) -> [f64; 2] {
        let g = f.gradient(0.0, xy);
        [-g[1], g[0]]
    }

    /// `{F, G} = dF(X_G)` on the base.
    pub fn planar_bracket(&self, f: &ScalarField, g: &ScalarField, xy: &[f64]) -> f64 {
        let xg = self.planar_field(g, xy);
        linalg::dot(&f.gradient(0.0, xy), &xg)
    }

    /// The horizontal lift of a base vector at `a`: the unique vector in `xi_a` over it.
    pub fn horizontal_lift(&self, a: &[f64], v: [f64; 2]) -> [f64; 3] {
        [v[0], v[1], -a[0] * v[1]]
    }

    /// horizontal lift of `X_F(pi a)` plus the vertical `v` with `alpha(v) = F(pi a)`,
    /// cross-checked against the contact field of `pi^* F`.
    pub fn prequant_lift_field(&self, f: &ScalarField, a: &Point) -> Result<TangentVector> {
        let chart = self.chart();
        chart.check_len(a.dim())?;
        let xy = self.project(&a.coords);
        let h = self.horizontal_lift(&a.coords, self.planar_field(f, &xy));
        let lifted = [h[0], h[1], h[2] + f.value(0.0, &xy)];
        let direct = contact_field_at(&chart, &self.pullback(f)?, 0.0, a)?;
        let residual = lifted.iter().zip(&direct.components).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        let bound = LIFT_CHECK_TOL * (1.0 + linalg::norm(&lifted));
        if residual > bound {
            return Err(ContactError::InconsistentSystem { residual, bound });
        }
        Ok(TangentVector::new(a.clone(), lifted.to_vec()))
    }

    /// Max `|d alpha(u, v) - omega(pi_* u, pi_* v)|` and `|alpha(R) - 1| + |pi_* R|`
    /// over the given points with a fixed set of probe vectors.
    pub fn structure_check(&self, points: &[Point]) -> Result<f64> {
        let chart = self.chart();
        let probes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.3, -0.7, 0.2], [-1.1, 0.4, 2.0]];
        let mut worst = 0.0f64;
        for p in points {
            chart.check_len(p.dim())?;
            for u in &probes {
                for v in &probes {
                    worst = worst.max((chart.dalpha_raw(u, v) - self.base_omega(u, v)).abs());
                }
            }
            let r = chart.reeb_at(p)?;
            let mut a = [0.0; 3];
            chart.alpha_covector(&p.coords, &mut a);
            worst = worst.max((linalg::dot(&a, &r.components) - 1.0).abs() + r.components[0].abs() + r.components[1].abs());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrequantBracketReport {
    pub convention: BracketConvention,
    pub contact: Vec<f64>,
    pub base: Vec<f64>,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `{pi^* F, pi^* G}_c` against `pi^* {F, G}` at each sample of the total space.
pub fn prequant_bracket_check(
    convention: BracketConvention,
    f: &ScalarField,
    g: &ScalarField,
    samples: &[Point],
    tol: f64,
) -> Result<PrequantBracketReport> {
    let pq = PrequantizationChart;
    let (pf, pg) = (pq.pullback(f)?, pq.pullback(g)?);
    let chart = pq.chart();
    let mut contact = Vec::with_capacity(samples.len());
    let mut base = Vec::with_capacity(samples.len());
    for a in samples {
        contact.push(contact_bracket_with(convention, &chart, &pf, &pg, a)?);
        base.push(pq.planar_bracket(f, g, &pq.project(&a.coords)));
    }
    let max_deviation = contact.iter().zip(&base).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    Ok(PrequantBracketReport { convention, contact, base, max_deviation, tol, pass: max_deviation <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrequantCoisotropyReport {
    pub patch: String,
    pub base_residual: f64,
    pub base_coisotropic: bool,
    pub total_residual: f64,
    pub total_coisotropic: bool,
    pub agree: bool,
}

/// Symplectic coisotropy of `Lambda` in the plane against contact coisotropy
/// of `Lambda x S^1`.
pub fn prequant_coisotropy_check(lambda: PlanarPatch, tol: f64) -> Result<PrequantCoisotropyReport> {
    let frame = lambda.frame();
    let rows: Vec<Vec<f64>> = frame.clone();
    let m = nalgebra::DMatrix::from_fn(rows.len(), 2, |i, j| {
        let mut e = [0.0; 2];
        e[j] = 1.0;
        PrequantizationChart.base_omega(&rows[i], &e)
    });
    let comp = linalg::null_space(&m, DEFAULT_RANK_TOL, Some(1.0));
    let tangent = linalg::orthonormal_span(&linalg::columns(&frame, 2), DEFAULT_RANK_TOL);
    let base_residual = linalg::inclusion_sine(&comp, &tangent);
    let preimage = lambda.preimage()?;
    let total = coisotropy_test(&preimage.chart, &preimage, tol)?;
    let base_coisotropic = base_residual <= tol;
    Ok(PrequantCoisotropyReport {
        patch: lambda.name().to_string(),
        base_residual,
        base_coisotropic,
        total_residual: total.max_residual(),
        total_coisotropic: total.pass,
        agree: base_coisotropic == total.pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::Polynomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
        (0..n).map(|_| ContactChart::Prequantization.sample_point(rng, 1.0)).collect()
    }

    #[test]
    fn structure_holds_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(PrequantizationChart.structure_check(&samples(&mut rng, 50)).unwrap() <= 1e-12);
    }

    #[test]
    fn lift_field_examples() {
        let pq = PrequantizationChart;
        let a = Point::new(vec![0.4, -0.3, 0.6]);
        let zero = pq.prequant_lift_field(&ScalarField::zero(2), &a).unwrap();
        assert!(zero.components.iter().all(|v| v.abs() < 1e-15));
        let one = pq.prequant_lift_field(&ScalarField::constant(2, 1.0), &a).unwrap();
        assert!(one.components.iter().zip([0.0, 0.0, 1.0]).all(|(u, v)| (u - v).abs() < 1e-14));
        // X_x = d/dy on the plane; horizontal lift (0, 1, -x), vertical part x
        let x = pq.prequant_lift_field(&ScalarField::coordinate(2, 0), &a).unwrap();
        assert!(x.components.iter().zip([0.0, 1.0, 0.0]).all(|(u, v)| (u - v).abs() < 1e-14));
    }

    #[test]
    fn random_lift_fields_cross_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for a in samples(&mut rng, 30) {
            let f = ScalarField::polynomial(Polynomial::random(2, 3, 1.0, &mut rng));
            PrequantizationChart.prequant_lift_field(&f, &a).unwrap();
        }
    }

    #[test]
    fn bracket_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = samples(&mut rng, 50);
        let x = ScalarField::coordinate(2, 0);
        let y = ScalarField::coordinate(2, 1);
        let r = prequant_bracket_check(BracketConvention::AsPrinted, &x, &y, &pts, 1e-8).unwrap();
        assert!(r.pass && r.base.iter().all(|v| *v == -1.0));
        let r = prequant_bracket_check(BracketConvention::AsPrinted, &x, &x, &pts, 1e-8).unwrap();
        assert!(r.pass);
        for conv in [BracketConvention::AsPrinted, BracketConvention::SignFlipped] {
            let f = ScalarField::polynomial(Polynomial::random(2, 3, 1.0, &mut rng));
            let g = ScalarField::polynomial(Polynomial::random(2, 3, 1.0, &mut rng));
            assert!(prequant_bracket_check(conv, &f, &g, &pts, 1e-8).unwrap().pass);
        }
    }

    #[test]
    fn coisotropy_correspondence() {
        let expect = [(PlanarPatch::Line, true), (PlanarPatch::Point, false), (PlanarPatch::Plane, true)];
        for (patch, coiso) in expect {
            let r = prequant_coisotropy_check(patch, 1e-8).unwrap();
            assert!(r.agree, "{r:?}");
            assert_eq!(r.base_coisotropic, coiso);
        }
    }
}

//! Closed catalog of coordinate contact models with exact evaluators for the
//! contact form, its differential and the Reeb field.
//!
//! Coordinate conventions:
//! - `Darboux(n)`: `(x_1..x_n, y_1..y_n, z)`, `alpha = dz - sum y_i dx_i`,
//!   `d alpha = sum dx_i ^ dy_i`, Reeb field `d/dz`.
//! - `Circle`: coordinate `s` reduced mod 1, `alpha = ds`.
//! - `Symplectization(base)`: base coordinates followed by `theta`,
//!   symplectic form `d(e^theta alpha)`; no contact form.
//! - `Prequantization`: `(x, y, t)` over the plane with `omega = dx ^ dy`,
//!   fiber coordinate `t` reduced mod 1, `alpha = dt + x dy`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ContactError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: Point,
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: Point, components: Vec<f64>) -> Self {
        Self { base, components }
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.components)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ContactChart {
    Darboux { n: usize },
    Circle,
    /// Symplectization of a Darboux or Circle chart.
    Symplectization(Box<ContactChart>),
    /// Prequantization of the planar chart `(R^2, dx ^ dy)`.
    Prequantization,
}

impl ContactChart {
    pub fn darboux(n: usize) -> Self {
        ContactChart::Darboux { n }
    }

    pub fn symplectization(base: ContactChart) -> Result<Self> {
        match base {
            ContactChart::Darboux { .. } | ContactChart::Circle => Ok(ContactChart::Symplectization(Box::new(base))),
            other => Err(ContactError::Input(format!("cannot symplectize chart `{other}`"))),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ContactChart::Darboux { n } => 2 * n + 1,
            ContactChart::Circle => 1,
            ContactChart::Symplectization(base) => base.dimension() + 1,
            ContactChart::Prequantization => 3,
        }
    }

    /// `n` for a `(2n+1)`-dimensional contact chart.
    pub fn half_dimension(&self) -> usize {
        (self.dimension() - 1) / 2
    }

    pub fn supports_contact_form(&self) -> bool {
        !matches!(self, ContactChart::Symplectization(_))
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        match self {
            ContactChart::Circle => axis == 0,
            ContactChart::Prequantization => axis == 2,
            ContactChart::Symplectization(base) => axis < base.dimension() && base.is_periodic(axis),
            ContactChart::Darboux { .. } => false,
        }
    }

    /// Whether the chart is a compact manifold, so maxima over it are
    /// well defined without a support box.
    pub fn is_compact(&self) -> bool {
        matches!(self, ContactChart::Circle)
    }

    /// Reduce periodic coordinates into `[0, 1)`.
    pub fn reduce(&self, coords: &mut [f64]) {
        for (axis, c) in coords.iter_mut().enumerate() {
            if self.is_periodic(axis) {
                *c = c.rem_euclid(1.0);
                if *c >= 1.0 {
                    *c = 0.0;
                }
            }
        }
    }

    pub fn point(&self, mut coords: Vec<f64>) -> Result<Point> {
        self.check_len(coords.len())?;
        self.reduce(&mut coords);
        Ok(Point { coords })
    }

    pub fn origin(&self) -> Point {
        Point::new(vec![0.0; self.dimension()])
    }

    /// Coordinate direction `e_axis` based at `p`.
    pub fn basis_vector(&self, p: &Point, axis: usize) -> TangentVector {
        let mut c = vec![0.0; self.dimension()];
        c[axis] = 1.0;
        TangentVector::new(p.clone(), c)
    }

    /// Componentwise `b - a`, with periodic axes wrapped into `[-1/2, 1/2)`.
    pub fn coord_delta(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(axis, (x, y))| {
                let d = y - x;
                if self.is_periodic(axis) {
                    (d + 0.5).rem_euclid(1.0) - 0.5
                } else {
                    d
                }
            })
            .collect()
    }

    /// Uniform sample in `[-scale, scale]` on open axes and `[0, 1)` on periodic ones.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Point {
        let coords = (0..self.dimension())
            .map(|axis| {
                if self.is_periodic(axis) {
                    rng.random_range(0.0..1.0)
                } else {
                    rng.random_range(-scale..=scale)
                }
            })
            .collect();
        Point::new(coords)
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        let expected = self.dimension();
        if got == expected {
            Ok(())
        } else {
            Err(ContactError::DimensionMismatch { expected, got })
        }
    }

    fn require_contact(&self) -> Result<()> {
        if self.supports_contact_form() {
            Ok(())
        } else {
            Err(ContactError::UnsupportedForm {
                chart: self.to_string(),
                form: "a contact form (it carries a symplectic form)",
            })
        }
    }

    /// Components of `alpha_p` as a covector. The chart must carry a contact form.
    pub(crate) fn alpha_covector(&self, p: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match self {
            ContactChart::Darboux { n } => {
                for i in 0..*n {
                    out[i] = -p[n + i];
                }
                out[2 * n] = 1.0;
            }
            ContactChart::Circle => out[0] = 1.0,
            ContactChart::Prequantization => {
                out[1] = p[0];
                out[2] = 1.0;
            }
            ContactChart::Symplectization(_) => unreachable!("checked by callers"),
        }
    }

    /// `d alpha_p(v, w)`, antisymmetric by construction.
    pub(crate) fn dalpha_raw(&self, v: &[f64], w: &[f64]) -> f64 {
        match self {
            ContactChart::Darboux { n } => (0..*n).map(|i| v[i] * w[n + i] - v[n + i] * w[i]).sum(),
            ContactChart::Circle => 0.0,
            ContactChart::Prequantization => v[0] * w[1] - v[1] * w[0],
            ContactChart::Symplectization(_) => unreachable!("checked by callers"),
        }
    }

    /// Row-major matrix `M` with `M[i][j] = d alpha(e_i, e_j)`; constant on every chart.
    pub(crate) fn dalpha_matrix(&self, out: &mut [f64]) {
        let d = self.dimension();
        out.iter_mut().for_each(|v| *v = 0.0);
        match self {
            ContactChart::Darboux { n } => {
                for i in 0..*n {
                    out[i * d + n + i] = 1.0;
                    out[(n + i) * d + i] = -1.0;
                }
            }
            ContactChart::Circle => {}
            ContactChart::Prequantization => {
                out[1] = 1.0;
                out[d] = -1.0;
            }
            ContactChart::Symplectization(_) => unreachable!("checked by callers"),
        }
    }

    pub(crate) fn reeb_raw(&self, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let d = self.dimension();
        out[d - 1] = 1.0;
    }

    /// `Omega_(p,theta)((u,t),(v,s)) = e^theta (t alpha(v) - s alpha(u) + d alpha(u, v))`.
    pub(crate) fn omega_raw(&self, p: &[f64], u: &[f64], v: &[f64]) -> f64 {
        let ContactChart::Symplectization(base) = self else {
            unreachable!("checked by callers")
        };
        let b = base.dimension();
        let mut a = vec![0.0; b];
        base.alpha_covector(&p[..b], &mut a);
        let alpha_u = crate::linalg::dot(&a, &u[..b]);
        let alpha_v = crate::linalg::dot(&a, &v[..b]);
        p[b].exp() * (u[b] * alpha_v - v[b] * alpha_u + base.dalpha_raw(&u[..b], &v[..b]))
    }

    pub fn alpha_at(&self, p: &Point, v: &TangentVector) -> Result<f64> {
        self.require_contact()?;
        self.check_len(p.dim())?;
        self.check_len(v.components.len())?;
        let mut a = vec![0.0; self.dimension()];
        self.alpha_covector(&p.coords, &mut a);
        Ok(crate::linalg::dot(&a, &v.components))
    }

    pub fn dalpha_at(&self, p: &Point, v: &TangentVector, w: &TangentVector) -> Result<f64> {
        self.require_contact()?;
        self.check_len(p.dim())?;
        self.check_len(v.components.len())?;
        self.check_len(w.components.len())?;
        Ok(self.dalpha_raw(&v.components, &w.components))
    }

    pub fn reeb_at(&self, p: &Point) -> Result<TangentVector> {
        self.require_contact()?;
        self.check_len(p.dim())?;
        let mut r = vec![0.0; self.dimension()];
        self.reeb_raw(&mut r);
        Ok(TangentVector::new(p.clone(), r))
    }

    /// The symplectic form of a symplectization chart.
    pub fn omega_at(&self, p: &Point, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        if self.supports_contact_form() {
            return Err(ContactError::UnsupportedForm { chart: self.to_string(), form: "a symplectic form" });
        }
        self.check_len(p.dim())?;
        self.check_len(u.components.len())?;
        self.check_len(v.components.len())?;
        Ok(self.omega_raw(&p.coords, &u.components, &v.components))
    }
}

impl fmt::Display for ContactChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContactChart::Darboux { n } => write!(f, "darboux:{n}"),
            ContactChart::Circle => write!(f, "circle"),
            ContactChart::Symplectization(base) => write!(f, "symp:{base}"),
            ContactChart::Prequantization => write!(f, "preq"),
        }
    }
}

impl FromStr for ContactChart {
    type Err = ContactError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("symp:") {
            return ContactChart::symplectization(rest.parse()?);
        }
        if let Some(n) = s.strip_prefix("darboux:") {
            let n: usize = n
                .parse()
                .map_err(|_| ContactError::Input(format!("bad Darboux half-dimension in `{s}`")))?;
            if n == 0 {
                return Err(ContactError::Input("Darboux chart needs n >= 1".into()));
            }
            return Ok(ContactChart::darboux(n));
        }
        match s {
            "circle" => Ok(ContactChart::Circle),
            "preq" => Ok(ContactChart::Prequantization),
            _ => Err(ContactError::Input(format!("unknown chart `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn contact_charts() -> Vec<ContactChart> {
        vec![
            ContactChart::darboux(1),
            ContactChart::darboux(2),
            ContactChart::darboux(3),
            ContactChart::Circle,
            ContactChart::Prequantization,
        ]
    }

    #[test]
    fn darboux_alpha_examples() {
        let c = ContactChart::darboux(1);
        let o = c.origin();
        assert_eq!(c.alpha_at(&o, &c.basis_vector(&o, 2)).unwrap(), 1.0);
        let p = c.point(vec![0.3, -1.7, 2.0]).unwrap();
        assert_eq!(c.alpha_at(&p, &c.basis_vector(&p, 0)).unwrap(), 1.7);
        let v = c.basis_vector(&p, 0);
        let w = c.basis_vector(&p, 1);
        assert_eq!(c.dalpha_at(&p, &v, &w).unwrap(), 1.0);
        let z = c.basis_vector(&p, 2);
        for axis in 0..3 {
            assert_eq!(c.dalpha_at(&p, &z, &c.basis_vector(&p, axis)).unwrap(), 0.0);
        }
    }

    #[test]
    fn circle_alpha_is_ds_and_wraps() {
        let c = ContactChart::Circle;
        let p = c.point(vec![1.25]).unwrap();
        assert_eq!(p.coords, vec![0.25]);
        let q = c.point(vec![-0.75]).unwrap();
        assert_eq!(q.coords, vec![0.25]);
        assert_eq!(c.alpha_at(&p, &c.basis_vector(&p, 0)).unwrap(), 1.0);
        assert_eq!(c.reeb_at(&p).unwrap().components, vec![1.0]);
    }

    #[test]
    fn prequantization_reeb_is_vertical() {
        let c = ContactChart::Prequantization;
        let p = c.point(vec![0.4, -2.0, 0.7]).unwrap();
        assert_eq!(c.reeb_at(&p).unwrap().components, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn symplectization_rejects_contact_form() {
        let c: ContactChart = "symp:darboux:1".parse().unwrap();
        assert_eq!(c.dimension(), 4);
        let o = c.origin();
        assert!(matches!(c.alpha_at(&o, &c.basis_vector(&o, 0)), Err(ContactError::UnsupportedForm { .. })));
        assert!(matches!(c.reeb_at(&o), Err(ContactError::UnsupportedForm { .. })));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let c = ContactChart::darboux(1);
        let p = Point::new(vec![0.0; 5]);
        let v = TangentVector::new(p.clone(), vec![0.0; 5]);
        assert_eq!(
            c.alpha_at(&p, &v),
            Err(ContactError::DimensionMismatch { expected: 3, got: 5 })
        );
    }

    #[test]
    fn chart_names_round_trip() {
        for name in ["darboux:1", "darboux:4", "circle", "symp:darboux:2", "symp:circle", "preq"] {
            let c: ContactChart = name.parse().unwrap();
            assert_eq!(c.to_string(), name);
        }
        assert!("symp:preq".parse::<ContactChart>().is_err());
        assert!("darboux:0".parse::<ContactChart>().is_err());
        assert!("torus".parse::<ContactChart>().is_err());
    }

    #[test]
    fn dimensions_follow_catalog() {
        assert_eq!(ContactChart::darboux(3).dimension(), 7);
        assert_eq!(ContactChart::Circle.dimension(), 1);
        assert_eq!("symp:circle".parse::<ContactChart>().unwrap().dimension(), 2);
        assert_eq!(ContactChart::Prequantization.dimension(), 3);
    }

    #[test]
    fn reeb_normalization_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for chart in contact_charts() {
            let d = chart.dimension();
            for _ in 0..10_000 {
                let p = chart.sample_point(&mut rng, 5.0);
                let r = chart.reeb_at(&p).unwrap();
                assert!((chart.alpha_at(&p, &r).unwrap() - 1.0).abs() <= 1e-12);
                for axis in 0..d {
                    let e = chart.basis_vector(&p, axis);
                    assert!(chart.dalpha_at(&p, &r, &e).unwrap().abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn dalpha_antisymmetric_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for chart in contact_charts() {
            for _ in 0..200 {
                let p = chart.sample_point(&mut rng, 3.0);
                let v = chart.sample_point(&mut rng, 1.0).coords;
                let w = chart.sample_point(&mut rng, 1.0).coords;
                let v = TangentVector::new(p.clone(), v);
                let w = TangentVector::new(p.clone(), w);
                let a = chart.dalpha_at(&p, &v, &w).unwrap();
                let b = chart.dalpha_at(&p, &w, &v).unwrap();
                assert_eq!(a + b, 0.0);
                assert_eq!(chart.dalpha_at(&p, &v, &v).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn dalpha_matrix_matches_pairing() {
        for chart in contact_charts() {
            let d = chart.dimension();
            let mut m = vec![0.0; d * d];
            chart.dalpha_matrix(&mut m);
            for i in 0..d {
                for j in 0..d {
                    let mut ei = vec![0.0; d];
                    let mut ej = vec![0.0; d];
                    ei[i] = 1.0;
                    ej[j] = 1.0;
                    assert_eq!(m[i * d + j], chart.dalpha_raw(&ei, &ej));
                }
            }
        }
    }

    #[test]
    fn circle_alpha_invariant_under_unit_shift() {
        let c = ContactChart::Circle;
        for s in [0.0, 0.1, 0.5, 0.999] {
            let p = Point::new(vec![s]);
            let q = Point::new(vec![s + 1.0]);
            let v = TangentVector::new(p.clone(), vec![0.37]);
            let w = TangentVector::new(q.clone(), vec![0.37]);
            assert_eq!(c.alpha_at(&p, &v).unwrap(), c.alpha_at(&q, &w).unwrap());
        }
    }

    #[test]
    fn coord_delta_wraps_periodic_axes() {
        let c = ContactChart::Circle;
        let d = c.coord_delta(&[0.95], &[0.05]);
        assert!((d[0] - 0.1).abs() < 1e-12);
        let p = ContactChart::Prequantization;
        let d = p.coord_delta(&[3.0, 0.0, 0.1], &[5.0, 0.0, 0.9]);
        assert_eq!(d[0], 2.0);
        assert!((d[2] + 0.2).abs() < 1e-12);
    }
}

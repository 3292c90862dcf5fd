//! Pointwise tangent-space tests: `T_pY cap xi_p`, its `d alpha`-orthogonal
//! complement inside `xi_p`, and the coisotropic / Legendrian / infinitesimal
//! displaceability verdicts built on them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::charts::{ContactChart, Point};
use crate::dynamics::field::ScalarField;
use crate::dynamics::flow::{pushforward, FlowMap, DEFAULT_PUSHFORWARD_STEP};
use crate::dynamics::vector_field::contact_field_at;
use crate::error::{ContactError, Result};
use crate::linalg::{self, DEFAULT_RANK_TOL};
use crate::submanifolds::patch::{SampleRef, SubmanifoldPatch, TangentSample};

/// Linear subspace of `T_p M` with orthonormal basis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub base: Point,
    pub basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(base: Point, basis: DMatrix<f64>) -> Self {
        Self { base, basis }
    }

    /// Orthonormalized span of arbitrary columns.
    pub fn span(base: Point, cols: &[Vec<f64>], rank_tol: f64) -> Self {
        let d = base.dim();
        let basis = linalg::orthonormal_span(&linalg::columns(cols, d), rank_tol);
        Self { base, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.basis.column(j).iter().copied().collect()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.basis.transpose() * &self.basis;
        let k = self.dim();
        (g - DMatrix::<f64>::identity(k, k)).abs().max()
    }

    /// Largest principal-angle sine of `self` against `other`; zero iff `self` is inside `other`.
    pub fn inclusion_residual(&self, other: &Subspace) -> f64 {
        linalg::inclusion_sine(&self.basis, &other.basis)
    }

    pub fn distance(&self, other: &Subspace) -> f64 {
        linalg::subspace_distance(&self.basis, &other.basis)
    }
}

fn require_contact(chart: &ContactChart) -> Result<()> {
    if chart.supports_contact_form() {
        Ok(())
    } else {
        Err(ContactError::UnsupportedForm { chart: chart.to_string(), form: "a contact form" })
    }
}

fn alpha_row(chart: &ContactChart, p: &[f64]) -> Vec<f64> {
    let mut a = vec![0.0; chart.dimension()];
    chart.alpha_covector(p, &mut a);
    a
}

/// Orthonormal basis of `xi_p = ker alpha_p`.
pub fn xi_basis(chart: &ContactChart, p: &Point) -> Result<Subspace> {
    require_contact(chart)?;
    chart.check_len(p.dim())?;
    let a = alpha_row(chart, &p.coords);
    let row = DMatrix::from_row_slice(1, a.len(), &a);
    Ok(Subspace::new(p.clone(), linalg::null_space(&row, DEFAULT_RANK_TOL, None)))
}

/// `T_pY cap xi_p` from a tangent frame, via the null space of `alpha`
/// restricted to the orthonormalized frame.
pub fn cap_xi_at(chart: &ContactChart, sample: &TangentSample, rank_tol: f64) -> Result<Subspace> {
    require_contact(chart)?;
    let p = &sample.point;
    chart.check_len(p.dim())?;
    if sample.frame.is_empty() {
        return Ok(Subspace::new(p.clone(), DMatrix::zeros(p.dim(), 0)));
    }
    let q = linalg::orthonormal_span(&sample.frame_matrix(), rank_tol);
    let a = alpha_row(chart, &p.coords);
    let restricted = DMatrix::from_row_slice(1, a.len(), &a) * &q;
    let n = linalg::null_space(&restricted, rank_tol, Some(linalg::norm(&a)));
    Ok(Subspace::new(p.clone(), &q * n))
}

pub fn cap_xi(chart: &ContactChart, patch: &SubmanifoldPatch, u: &SampleRef) -> Result<Subspace> {
    cap_xi_at(chart, &patch.tangent_sample(u, DEFAULT_RANK_TOL)?, DEFAULT_RANK_TOL)
}

/// `{w in xi_p : d alpha(w, v) = 0 for all v in V}`; `V` must lie in `xi_p`.
pub fn dalpha_perp(chart: &ContactChart, v: &Subspace, p: &Point) -> Result<Subspace> {
    dalpha_perp_with(chart, v, p, DEFAULT_RANK_TOL)
}

pub fn dalpha_perp_with(chart: &ContactChart, v: &Subspace, p: &Point, rank_tol: f64) -> Result<Subspace> {
    require_contact(chart)?;
    chart.check_len(p.dim())?;
    let a = alpha_row(chart, &p.coords);
    let an = linalg::norm(&a);
    for j in 0..v.dim() {
        let col = v.column(j);
        let off = linalg::dot(&a, &col).abs();
        if off > rank_tol.max(1e-12) * an {
            return Err(ContactError::Precondition(format!(
                "subspace is not inside xi_p: |alpha(v_{j})| = {off:e}"
            )));
        }
    }
    let xi = xi_basis(chart, p)?;
    let constraints = DMatrix::from_fn(v.dim(), xi.dim(), |i, j| chart.dalpha_raw(&v.column(i), &xi.column(j)));
    let d = chart.dimension();
    let mut m = vec![0.0; d * d];
    chart.dalpha_matrix(&mut m);
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let n = linalg::null_space(&constraints, rank_tol, Some(scale));
    Ok(Subspace::new(p.clone(), &xi.basis * n))
}

/// Tolerances for the pointwise verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoisotropyOptions {
    /// Relative singular-value threshold for ranks and null spaces.
    pub rank_tol: f64,
    /// Bound on the inclusion residual.
    pub tol: f64,
}

impl CoisotropyOptions {
    pub fn new(tol: f64) -> Self {
        Self { rank_tol: DEFAULT_RANK_TOL, tol }
    }

    pub fn with_rank_tol(mut self, rank_tol: f64) -> Self {
        self.rank_tol = rank_tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: Vec<f64>,
    pub param: Option<SampleRef>,
    pub cap_dim: usize,
    pub perp_dim: usize,
    pub inclusion_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoisotropyVerdict {
    pub patch: String,
    pub records: Vec<PointRecord>,
    pub tol: f64,
    pub pass: bool,
}

impl CoisotropyVerdict {
    fn from_records(patch: &str, records: Vec<PointRecord>, tol: f64) -> Self {
        let pass = records.iter().all(|r| r.pass);
        Self { patch: patch.to_string(), records, tol, pass }
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.inclusion_residual).fold(0.0, f64::max)
    }
}

/// Coisotropy at a single tangent sample: `(T cap xi)^perp` inside `T cap xi`.
pub fn coisotropy_at(chart: &ContactChart, sample: &TangentSample, opts: CoisotropyOptions) -> Result<PointRecord> {
    let cap = cap_xi_at(chart, sample, opts.rank_tol)?;
    let perp = dalpha_perp_with(chart, &cap, &sample.point, opts.rank_tol)?;
    let residual = perp.inclusion_residual(&cap);
    Ok(PointRecord {
        point: sample.point.coords.clone(),
        param: None,
        cap_dim: cap.dim(),
        perp_dim: perp.dim(),
        inclusion_residual: residual,
        pass: residual <= opts.tol,
    })
}

pub fn coisotropy_test(chart: &ContactChart, patch: &SubmanifoldPatch, tol: f64) -> Result<CoisotropyVerdict> {
    coisotropy_test_with(chart, patch, CoisotropyOptions::new(tol))
}

pub fn coisotropy_test_with(chart: &ContactChart, patch: &SubmanifoldPatch, opts: CoisotropyOptions) -> Result<CoisotropyVerdict> {
    check_patch_chart(chart, patch)?;
    let mut records = Vec::with_capacity(patch.sample_count());
    for s in patch.samples() {
        let sample = patch.tangent_sample(&s, opts.rank_tol)?;
        let mut r = coisotropy_at(chart, &sample, opts)?;
        r.param = Some(s);
        records.push(r);
    }
    Ok(CoisotropyVerdict::from_records(&patch.name, records, opts.tol))
}

fn check_patch_chart(chart: &ContactChart, patch: &SubmanifoldPatch) -> Result<()> {
    if &patch.chart != chart {
        return Err(ContactError::Input(format!("patch `{}` lives on `{}`, not `{chart}`", patch.name, patch.chart)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendrianVerdict {
    pub patch: String,
    pub dimension_ok: bool,
    /// Largest `|alpha(e)| / (|alpha| |e|)` over frame vectors and samples.
    pub max_alpha: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn legendrian_test(chart: &ContactChart, patch: &SubmanifoldPatch, tol: f64) -> Result<LegendrianVerdict> {
    check_patch_chart(chart, patch)?;
    require_contact(chart)?;
    let dimension_ok = patch.intrinsic_dim() == chart.half_dimension();
    let mut max_alpha = 0.0f64;
    for sample in patch.tangent_samples(DEFAULT_RANK_TOL)? {
        let a = alpha_row(chart, &sample.point.coords);
        for col in &sample.frame {
            max_alpha = max_alpha.max(linalg::dot(&a, col).abs() / (linalg::norm(&a) * linalg::norm(col)));
        }
    }
    Ok(LegendrianVerdict {
        patch: patch.name.clone(),
        dimension_ok,
        max_alpha,
        tol,
        pass: dimension_ok && max_alpha <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplaceabilityRecord {
    pub point: Vec<f64>,
    pub field_norm: f64,
    /// Distance from `X_H(x)` to `T_x N`.
    pub normal_distance: f64,
    pub displaces: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplaceabilityVerdict {
    pub patch: String,
    pub records: Vec<DisplaceabilityRecord>,
    /// Samples where `X_H` is zero or tangent.
    pub witnesses: Vec<Vec<f64>>,
    pub tol: f64,
    pub pass: bool,
}

/// Whether `H` infinitesimally displaces the patch: `X_H(x)` nonzero and not
/// in `T_x N` at every sample.
pub fn displaceability_test(chart: &ContactChart, patch: &SubmanifoldPatch, h: &ScalarField, tol: f64) -> Result<DisplaceabilityVerdict> {
    check_patch_chart(chart, patch)?;
    if h.is_time_dependent() {
        return Err(ContactError::Precondition("displaceability needs a time-independent Hamiltonian".into()));
    }
    let mut records = Vec::new();
    let mut witnesses = Vec::new();
    for sample in patch.tangent_samples(DEFAULT_RANK_TOL)? {
        let x = contact_field_at(chart, h, 0.0, &sample.point)?.components;
        let q = linalg::orthonormal_span(&sample.frame_matrix(), DEFAULT_RANK_TOL);
        let xv = DMatrix::from_column_slice(x.len(), 1, &x);
        let normal = if q.ncols() == 0 { xv.clone() } else { &xv - &q * (q.transpose() * &xv) };
        let field_norm = linalg::norm(&x);
        let normal_distance = normal.norm();
        let displaces = field_norm > 0.0 && normal_distance > tol * field_norm;
        if !displaces {
            witnesses.push(sample.point.coords.clone());
        }
        records.push(DisplaceabilityRecord { point: sample.point.coords, field_norm, normal_distance, displaces });
    }
    Ok(DisplaceabilityVerdict { patch: patch.name.clone(), pass: witnesses.is_empty(), records, witnesses, tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub before: CoisotropyVerdict,
    pub after: CoisotropyVerdict,
    pub agree: bool,
}

/// Push every sample and its frame through the time-`t` flow of `H`
/// (frames by central differences) and re-run the coisotropy test.
///
/// Pushed frames carry finite-difference error, so `opts.rank_tol` should
/// sit well above it (around `1e-6` for the default steps).
pub fn coisotropy_invariance_experiment(
    chart: &ContactChart,
    patch: &SubmanifoldPatch,
    h: &ScalarField,
    t: f64,
    step: f64,
    opts: CoisotropyOptions,
) -> Result<InvarianceReport> {
    let before = coisotropy_test_with(chart, patch, CoisotropyOptions { rank_tol: DEFAULT_RANK_TOL, ..opts })?;
    let flow = FlowMap::new(chart.clone(), h.clone(), t).with_step(step);
    let map = |q: &[f64]| flow.apply(q).map(|(x, _)| x);
    let mut records = Vec::with_capacity(patch.sample_count());
    for s in patch.samples() {
        let sample = patch.tangent_sample(&s, DEFAULT_RANK_TOL)?;
        let image = map(&sample.point.coords)?;
        let frame = sample
            .frame
            .iter()
            .map(|v| pushforward(chart, &map, &sample.point.coords, v, DEFAULT_PUSHFORWARD_STEP))
            .collect::<Result<Vec<_>>>()?;
        let pushed = TangentSample { point: Point::new(image), frame };
        let mut r = coisotropy_at(chart, &pushed, opts)?;
        r.param = Some(s);
        records.push(r);
    }
    let after = CoisotropyVerdict::from_records(&format!("{}@flow", patch.name), records, opts.tol);
    let agree = before.pass == after.pass;
    Ok(InvarianceReport { before, after, agree })
}

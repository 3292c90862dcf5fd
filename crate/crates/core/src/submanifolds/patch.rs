//! Parametrized submanifold patches and the named fixture catalog.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::charts::{ContactChart, Point};
use crate::dynamics::field::{Monomial, Polynomial, ScalarField};
use crate::error::{ContactError, Result};
use crate::linalg;

pub type ParamFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
/// Tangent frame at `u` as `d` columns of ambient length.
pub type JacobianFn = dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync;

pub const DEFAULT_JACOBIAN_STEP: f64 = 1e-6;

/// One coordinate piece of a patch with its own parameter domain samples.
#[derive(Clone)]
pub struct Piece {
    param: Arc<ParamFn>,
    jacobian: Option<Arc<JacobianFn>>,
    pub samples: Vec<Vec<f64>>,
}

impl Piece {
    pub fn new(param: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static, samples: Vec<Vec<f64>>) -> Self {
        Self { param: Arc::new(param), jacobian: None, samples }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }
}

/// Index of a sample: which piece, and the parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRef {
    pub piece: usize,
    pub u: Vec<f64>,
}

/// A point of the patch together with an orthonormal-or-not tangent frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentSample {
    pub point: Point,
    /// Columns spanning `T_p Y`.
    pub frame: Vec<Vec<f64>>,
}

impl TangentSample {
    pub fn frame_matrix(&self) -> DMatrix<f64> {
        linalg::columns(&self.frame, self.point.dim())
    }
}

/// Verdicts a fixture is known to have, used as the oracle for classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub coisotropic: bool,
    pub legendrian: bool,
}

#[derive(Clone)]
pub struct SubmanifoldPatch {
    pub name: String,
    pub chart: ContactChart,
    intrinsic_dim: usize,
    pieces: Vec<Piece>,
    /// Functions vanishing on the patch; their ideal generates test functions.
    pub defining: Vec<ScalarField>,
    pub expected: Option<Expectation>,
    jacobian_step: f64,
}

impl fmt::Debug for SubmanifoldPatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubmanifoldPatch")
            .field("name", &self.name)
            .field("chart", &self.chart.to_string())
            .field("intrinsic_dim", &self.intrinsic_dim)
            .field("pieces", &self.pieces.len())
            .field("samples", &self.sample_count())
            .field("expected", &self.expected)
            .finish()
    }
}

impl SubmanifoldPatch {
    pub fn new(name: impl Into<String>, chart: ContactChart, intrinsic_dim: usize, pieces: Vec<Piece>) -> Result<Self> {
        if intrinsic_dim > chart.dimension() {
            return Err(ContactError::Input(format!(
                "patch dimension {intrinsic_dim} exceeds ambient dimension {}",
                chart.dimension()
            )));
        }
        if pieces.iter().all(|p| p.samples.is_empty()) {
            return Err(ContactError::Input("patch sample grid is empty".into()));
        }
        for piece in &pieces {
            for u in &piece.samples {
                if u.len() != intrinsic_dim {
                    return Err(ContactError::DimensionMismatch { expected: intrinsic_dim, got: u.len() });
                }
            }
        }
        Ok(Self {
            name: name.into(),
            chart,
            intrinsic_dim,
            pieces,
            defining: Vec::new(),
            expected: None,
            jacobian_step: DEFAULT_JACOBIAN_STEP,
        })
    }

    pub fn with_defining(mut self, defining: Vec<ScalarField>) -> Self {
        self.defining = defining;
        self
    }

    pub fn with_expectation(mut self, coisotropic: bool, legendrian: bool) -> Self {
        self.expected = Some(Expectation { coisotropic, legendrian });
        self
    }

    pub fn with_jacobian_step(mut self, h: f64) -> Self {
        self.jacobian_step = h;
        self
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn sample_count(&self) -> usize {
        self.pieces.iter().map(|p| p.samples.len()).sum()
    }

    pub fn samples(&self) -> Vec<SampleRef> {
        self.pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.samples.iter().map(move |u| SampleRef { piece: i, u: u.clone() }))
            .collect()
    }

    pub fn point(&self, s: &SampleRef) -> Point {
        let mut c = (self.pieces[s.piece].param)(&s.u);
        self.chart.reduce(&mut c);
        Point::new(c)
    }

    /// Tangent columns at a sample: analytic when supplied, else central differences.
    pub fn jacobian(&self, s: &SampleRef) -> Vec<Vec<f64>> {
        let piece = &self.pieces[s.piece];
        if let Some(j) = &piece.jacobian {
            return j(&s.u);
        }
        let h = self.jacobian_step;
        (0..self.intrinsic_dim)
            .map(|k| {
                let mut up = s.u.clone();
                let mut dn = s.u.clone();
                up[k] += h;
                dn[k] -= h;
                let a = (piece.param)(&dn);
                let b = (piece.param)(&up);
                self.chart.coord_delta(&a, &b).into_iter().map(|v| v / (2.0 * h)).collect()
            })
            .collect()
    }

    /// Point and frame at a sample, checking the frame has full column rank.
    pub fn tangent_sample(&self, s: &SampleRef, rank_tol: f64) -> Result<TangentSample> {
        let point = self.point(s);
        let frame = self.jacobian(s);
        if !frame.is_empty() {
            let rank = linalg::numerical_rank(&linalg::columns(&frame, point.dim()), rank_tol);
            if rank < self.intrinsic_dim {
                return Err(ContactError::DegeneratePatch {
                    patch: self.name.clone(),
                    param: s.u.clone(),
                    rank,
                    expected: self.intrinsic_dim,
                });
            }
        }
        Ok(TangentSample { point, frame })
    }

    pub fn tangent_samples(&self, rank_tol: f64) -> Result<Vec<TangentSample>> {
        self.samples().iter().map(|s| self.tangent_sample(s, rank_tol)).collect()
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    crate::dynamics::field::grid_axis(lo, hi, n)
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

/// Coordinate-affine patch: the free axes are parametrized, all others are 0.
fn coordinate_patch(name: &str, chart: ContactChart, free: Vec<usize>, per_axis: usize, half_width: f64) -> Result<SubmanifoldPatch> {
    let d = chart.dimension();
    let k = free.len();
    let axis = linspace(-half_width, half_width, per_axis);
    let mut samples = vec![Vec::new()];
    for _ in 0..k {
        samples = samples
            .into_iter()
            .flat_map(|s: Vec<f64>| {
                axis.iter().map(move |&a| {
                    let mut s = s.clone();
                    s.push(a);
                    s
                })
            })
            .collect();
    }
    let (fp, fj) = (free.clone(), free.clone());
    let piece = Piece::new(
        move |u| {
            let mut c = vec![0.0; d];
            for (i, &ax) in fp.iter().enumerate() {
                c[ax] = u[i];
            }
            c
        },
        samples,
    )
    .with_jacobian(move |_| fj.iter().map(|&ax| unit(d, ax)).collect());
    let defining = (0..d).filter(|a| !free.contains(a)).map(|a| ScalarField::coordinate(d, a)).collect();
    Ok(SubmanifoldPatch::new(name, chart, k, vec![piece])?.with_defining(defining))
}

fn sphere_defining() -> ScalarField {
    let mono = |c: f64, p: [u32; 3]| Monomial { coefficient: c, powers: p.to_vec(), time_power: 0 };
    ScalarField::polynomial(
        Polynomial::new(3, vec![mono(1.0, [2, 0, 0]), mono(1.0, [0, 2, 0]), mono(1.0, [0, 0, 2]), mono(-1.0, [0, 0, 0])])
            .expect("dimension 3"),
    )
    .with_label("x^2+y^2+z^2-1")
}

/// Unit sphere in Darboux(1): a latitude band plus two polar graph caps, so the
/// tangency points `(0, 0, +-1)` are sampled by a regular chart.
pub fn sphere() -> Result<SubmanifoldPatch> {
    let mut band_samples = Vec::new();
    for &lat in &linspace(-1.2, 1.2, 9) {
        for i in 0..12 {
            band_samples.push(vec![2.0 * PI * i as f64 / 12.0, lat]);
        }
    }
    let band = Piece::new(
        |u| {
            let (l, m) = (u[0], u[1]);
            vec![m.cos() * l.cos(), m.cos() * l.sin(), m.sin()]
        },
        band_samples,
    )
    .with_jacobian(|u| {
        let (l, m) = (u[0], u[1]);
        vec![
            vec![-m.cos() * l.sin(), m.cos() * l.cos(), 0.0],
            vec![-m.sin() * l.cos(), -m.sin() * l.sin(), m.cos()],
        ]
    });
    let mut cap_samples = Vec::new();
    for &a in &linspace(-0.6, 0.6, 7) {
        for &b in &linspace(-0.6, 0.6, 7) {
            if a * a + b * b <= 0.36 + 1e-12 {
                cap_samples.push(vec![a, b]);
            }
        }
    }
    let cap = |sign: f64| {
        Piece::new(move |u| vec![u[0], u[1], sign * (1.0 - u[0] * u[0] - u[1] * u[1]).sqrt()], cap_samples.clone())
            .with_jacobian(move |u| {
                let s = (1.0 - u[0] * u[0] - u[1] * u[1]).sqrt();
                vec![vec![1.0, 0.0, -sign * u[0] / s], vec![0.0, 1.0, -sign * u[1] / s]]
            })
    };
    Ok(SubmanifoldPatch::new("sphere", ContactChart::darboux(1), 2, vec![band, cap(1.0), cap(-1.0)])?
        .with_defining(vec![sphere_defining()])
        .with_expectation(true, false))
}

/// The single point `{p}` on the circle.
pub fn circle_point(p: f64) -> Result<SubmanifoldPatch> {
    let piece = Piece::new(move |_| vec![p], vec![Vec::new()]).with_jacobian(|_| Vec::new());
    let defining = ScalarField::from_fn(1, move |s| (2.0 * PI * (s[0] - p)).sin())
        .with_gradient(move |_, s, out| out[0] = 2.0 * PI * (2.0 * PI * (s[0] - p)).cos())
        .with_label("sin(2 pi (s - p))");
    Ok(SubmanifoldPatch::new("circle-point", ContactChart::Circle, 0, vec![piece])?
        .with_defining(vec![defining])
        .with_expectation(true, true))
}

/// The single point `{p}` on any chart (no defining functions attached).
pub fn point_patch(chart: &ContactChart, p: &[f64]) -> Result<SubmanifoldPatch> {
    chart.check_len(p.len())?;
    let c = p.to_vec();
    let piece = Piece::new(move |_| c.clone(), vec![Vec::new()]).with_jacobian(|_| Vec::new());
    SubmanifoldPatch::new(format!("point{p:?}"), chart.clone(), 0, vec![piece])
}

/// Which of the two coordinate local models near an `n`-dimensional submanifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalModel {
    /// `{x_1 = .. = x_k = y_1 = .. = y_{n-k} = z = 0}`.
    WithZ,
    /// `{x_1 = .. = x_{k+1} = y_1 = .. = y_{n-k} = 0}`.
    WithoutZ,
}

/// Coordinate local model in Darboux(n), taken literally.
pub fn local_model(model: LocalModel, n: usize, k: usize) -> Result<SubmanifoldPatch> {
    let d = 2 * n + 1;
    let max_k = match model {
        LocalModel::WithZ => n,
        LocalModel::WithoutZ => n.saturating_sub(1),
    };
    if n == 0 || k > max_k {
        return Err(ContactError::Input(format!("local model needs n >= 1 and k <= {max_k}, got n={n}, k={k}")));
    }
    let zeroed_x = match model {
        LocalModel::WithZ => k,
        LocalModel::WithoutZ => k + 1,
    };
    let mut zero: Vec<usize> = (0..zeroed_x).chain(n..n + (n - k)).collect();
    if model == LocalModel::WithZ {
        zero.push(2 * n);
    }
    let free: Vec<usize> = (0..d).filter(|a| !zero.contains(a)).collect();
    let tag = match model {
        LocalModel::WithZ => "a",
        LocalModel::WithoutZ => "b",
    };
    let per_axis = if free.len() <= 2 { 7 } else { 4 };
    // Only the extreme cases of the first model are tangent to xi; every
    // other case contains either the Reeb direction or a pair dx_j, dy_j.
    let legendrian = model == LocalModel::WithZ && (k == 0 || k == n);
    Ok(coordinate_patch(&format!("local-model-{tag}:{n}:{k}"), ContactChart::darboux(n), free, per_axis, 0.8)?
        .with_expectation(legendrian, legendrian))
}

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: &[&str] = &[
    "legendrian-axis",
    "z-axis",
    "plane-y0",
    "sphere",
    "pre-lagrangian-plane",
    "non-coiso-surface-n2",
    "circle-point",
    "local-model-a:1:0",
    "local-model-a:1:1",
    "local-model-b:1:0",
    "local-model-a:2:1",
    "local-model-b:2:1",
];

/// Named fixture. Local models are spelled `local-model-<a|b>:<n>:<k>`.
pub fn fixture(name: &str) -> Result<SubmanifoldPatch> {
    let d1 = ContactChart::darboux(1);
    let name = name.trim();
    if let Some(rest) = name.strip_prefix("local-model-") {
        let parts: Vec<&str> = rest.split(':').collect();
        let parse = |s: &str| s.parse::<usize>().map_err(|_| ContactError::Input(format!("bad local model `{name}`")));
        if parts.len() != 3 {
            return Err(ContactError::Input(format!("local model must be local-model-<a|b>:<n>:<k>, got `{name}`")));
        }
        let model = match parts[0] {
            "a" => LocalModel::WithZ,
            "b" => LocalModel::WithoutZ,
            _ => return Err(ContactError::Input(format!("unknown local model `{name}`"))),
        };
        return local_model(model, parse(parts[1])?, parse(parts[2])?);
    }
    if let Some(p) = name.strip_prefix("circle-point:") {
        let p = p.parse::<f64>().map_err(|_| ContactError::Input(format!("bad circle point `{name}`")))?;
        return circle_point(p);
    }
    Ok(match name {
        "legendrian-axis" => coordinate_patch(name, d1, vec![0], 21, 1.0)?.with_expectation(true, true),
        "z-axis" => coordinate_patch(name, d1, vec![2], 21, 1.0)?.with_expectation(false, false),
        "plane-y0" => coordinate_patch(name, d1, vec![0, 2], 9, 1.0)?.with_expectation(true, false),
        "pre-lagrangian-plane" => coordinate_patch(name, d1, vec![1, 2], 9, 1.0)?.with_expectation(true, false),
        "non-coiso-surface-n2" => {
            coordinate_patch(name, ContactChart::darboux(2), vec![0, 4], 9, 1.0)?.with_expectation(false, false)
        }
        "sphere" => sphere()?,
        "circle-point" => circle_point(0.25)?,
        other => {
            return Err(ContactError::Input(format!(
                "unknown fixture `{other}`; expected one of {}",
                FIXTURE_NAMES.join(", ")
            )))
        }
    })
}

/// Planar patches in the base of the prequantization, with their symplectic verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanarPatch {
    /// `{y = 0}`, Lagrangian.
    Line,
    /// `{0}`.
    Point,
    /// The whole plane.
    Plane,
}

impl PlanarPatch {
    pub const ALL: [PlanarPatch; 3] = [PlanarPatch::Line, PlanarPatch::Point, PlanarPatch::Plane];

    pub fn dim(self) -> usize {
        match self {
            PlanarPatch::Line => 1,
            PlanarPatch::Point => 0,
            PlanarPatch::Plane => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlanarPatch::Line => "line",
            PlanarPatch::Point => "point",
            PlanarPatch::Plane => "plane",
        }
    }

    /// Tangent columns (in the plane) at any point of the patch.
    pub fn frame(self) -> Vec<Vec<f64>> {
        match self {
            PlanarPatch::Line => vec![vec![1.0, 0.0]],
            PlanarPatch::Point => Vec::new(),
            PlanarPatch::Plane => vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        }
    }

    pub fn base_points(self) -> Vec<[f64; 2]> {
        match self {
            PlanarPatch::Line => linspace(-1.0, 1.0, 9).into_iter().map(|x| [x, 0.0]).collect(),
            PlanarPatch::Point => vec![[0.0, 0.0]],
            PlanarPatch::Plane => {
                let a = linspace(-1.0, 1.0, 5);
                a.iter().flat_map(|&x| a.iter().map(move |&y| [x, y])).collect()
            }
        }
    }

    /// The full preimage `Lambda x S^1` in the prequantization chart.
    pub fn preimage(self) -> Result<SubmanifoldPatch> {
        let ts = linspace(0.0, 0.875, 8);
        let base = self.base_points();
        let samples: Vec<Vec<f64>> = match self {
            PlanarPatch::Line => base.iter().flat_map(|b| ts.iter().map(move |&t| vec![b[0], t])).collect(),
            PlanarPatch::Point => ts.iter().map(|&t| vec![t]).collect(),
            PlanarPatch::Plane => base.iter().flat_map(|b| ts.iter().map(move |&t| vec![b[0], b[1], t])).collect(),
        };
        let piece = match self {
            PlanarPatch::Line => {
                Piece::new(|u| vec![u[0], 0.0, u[1]], samples).with_jacobian(|_| vec![unit(3, 0), unit(3, 2)])
            }
            PlanarPatch::Point => Piece::new(|u| vec![0.0, 0.0, u[0]], samples).with_jacobian(|_| vec![unit(3, 2)]),
            PlanarPatch::Plane => Piece::new(|u| u.to_vec(), samples).with_jacobian(|_| (0..3).map(|i| unit(3, i)).collect()),
        };
        SubmanifoldPatch::new(format!("preimage-{}", self.name()), ContactChart::Prequantization, self.dim() + 1, vec![piece])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_RANK_TOL;

    #[test]
    fn every_named_fixture_builds_and_has_full_rank() {
        for name in FIXTURE_NAMES {
            let patch = fixture(name).unwrap();
            assert!(patch.sample_count() > 0, "{name}");
            patch.tangent_samples(DEFAULT_RANK_TOL).unwrap();
        }
    }

    #[test]
    fn defining_functions_vanish_on_fixtures() {
        for name in FIXTURE_NAMES {
            let patch = fixture(name).unwrap();
            assert!(!patch.defining.is_empty(), "{name}");
            for s in patch.samples() {
                let p = patch.point(&s);
                for f in &patch.defining {
                    assert!(f.value(0.0, &p.coords).abs() < 1e-14, "{name} at {:?}", p.coords);
                }
            }
        }
    }

    #[test]
    fn analytic_sphere_frames_match_differences() {
        let analytic = sphere().unwrap();
        let mut numeric = sphere().unwrap();
        numeric.pieces.iter_mut().for_each(|p| p.jacobian = None);
        for s in analytic.samples() {
            for (a, b) in analytic.jacobian(&s).iter().zip(numeric.jacobian(&s)) {
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn sphere_samples_the_tangency_poles() {
        let patch = sphere().unwrap();
        let poles = patch.samples().iter().map(|s| patch.point(s)).filter(|p| p.coords[0] == 0.0 && p.coords[1] == 0.0).count();
        assert_eq!(poles, 2);
    }

    #[test]
    fn local_models_have_dimension_n() {
        for (m, n, k) in [(LocalModel::WithZ, 2, 1), (LocalModel::WithoutZ, 2, 1), (LocalModel::WithZ, 3, 0), (LocalModel::WithoutZ, 3, 2)] {
            assert_eq!(local_model(m, n, k).unwrap().intrinsic_dim(), n);
        }
        assert!(local_model(LocalModel::WithoutZ, 2, 2).is_err());
        assert_eq!(fixture("local-model-b:1:0").unwrap().point(&SampleRef { piece: 0, u: vec![0.5] }).coords, vec![0.0, 0.0, 0.5]);
    }

    #[test]
    fn degenerate_parametrization_is_rejected() {
        let piece = Piece::new(|u| vec![u[0], u[0], 0.0], vec![vec![0.0, 0.0]]);
        let patch = SubmanifoldPatch::new("bad", ContactChart::darboux(1), 2, vec![piece]).unwrap();
        let s = &patch.samples()[0];
        assert!(matches!(patch.tangent_sample(s, DEFAULT_RANK_TOL), Err(ContactError::DegeneratePatch { rank: 1, .. })));
    }

    #[test]
    fn unknown_fixture_lists_names() {
        let err = fixture("torus").unwrap_err().to_string();
        assert!(err.contains("legendrian-axis"));
    }

    #[test]
    fn empty_sample_grid_rejected() {
        let piece = Piece::new(|u| u.to_vec(), Vec::new());
        assert!(SubmanifoldPatch::new("empty", ContactChart::darboux(1), 1, vec![piece]).is_err());
    }
}

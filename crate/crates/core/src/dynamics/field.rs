//! Scalar fields (contact Hamiltonians): value and gradient access, algebraic
//! combinators, polynomial tables and the builtin families used by the
//! experiments.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::charts::ContactChart;
use crate::error::{ContactError, Result};

pub type ValueFn = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;
pub type GradientFn = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

/// Default central-difference step for gradients without a closed form.
pub const DEFAULT_GRADIENT_STEP: f64 = 1e-5;

/// Axis-aligned box over which maxima over `M` are taken.
///
/// Along ordinary axes the field vanishes outside the box. Along periodic
/// axes the box is one fundamental cell and the field repeats outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl SupportBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        let periodic = vec![false; lower.len()];
        Self { lower, upper, periodic }
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn with_periodic_axis(mut self, axis: usize) -> Self {
        self.periodic[axis] = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Membership ignoring periodic axes.
    pub fn contains(&self, p: &[f64]) -> bool {
        (0..self.dim()).all(|i| self.periodic[i] || (p[i] >= self.lower[i] && p[i] <= self.upper[i]))
    }

    /// Grid abscissae per axis, endpoints included.
    pub fn grid_axes(&self, resolution: usize) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| grid_axis(self.lower[i], self.upper[i], resolution))
            .collect()
    }
}

pub(crate) fn grid_axis(lo: f64, hi: f64, resolution: usize) -> Vec<f64> {
    if resolution <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    let last = (resolution - 1) as f64;
    (0..resolution).map(|i| lo + (hi - lo) * (i as f64) / last).collect()
}

#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradientFn>>,
    time_dependent: bool,
    support: Option<SupportBox>,
    fd_step: f64,
    label: String,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("time_dependent", &self.time_dependent)
            .field("analytic_gradient", &self.gradient.is_some())
            .field("support", &self.support)
            .finish()
    }
}

impl ScalarField {
    /// Autonomous field; gradient by central differences until one is supplied.
    pub fn from_fn(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            value: Arc::new(move |_t, p| f(p)),
            gradient: None,
            time_dependent: false,
            support: None,
            fd_step: DEFAULT_GRADIENT_STEP,
            label: "custom".into(),
        }
    }

    pub fn from_time_fn(dim: usize, f: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            value: Arc::new(f),
            gradient: None,
            time_dependent: true,
            support: None,
            fd_step: DEFAULT_GRADIENT_STEP,
            label: "custom".into(),
        }
    }

    /// Supply a spatial gradient `(t, p, out)`.
    pub fn with_gradient(mut self, g: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_support(mut self, support: SupportBox) -> Self {
        self.support = Some(support);
        self
    }

    pub fn without_support(mut self) -> Self {
        self.support = None;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    /// Drop the analytic gradient, forcing central differences.
    pub fn with_fd_gradient(mut self) -> Self {
        self.gradient = None;
        self
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_fn(dim, move |_| c)
            .with_gradient(|_, _, out| out.iter_mut().for_each(|v| *v = 0.0))
            .with_label(format!("const({c})"))
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    pub fn coordinate(dim: usize, axis: usize) -> Self {
        assert!(axis < dim);
        Self::from_fn(dim, move |p| p[axis])
            .with_gradient(move |_, _, out| {
                out.iter_mut().for_each(|v| *v = 0.0);
                out[axis] = 1.0;
            })
            .with_label(format!("coord[{axis}]"))
    }

    pub fn polynomial(poly: Polynomial) -> Self {
        let dim = poly.dim;
        let time_dependent = poly.terms.iter().any(|m| m.time_power > 0);
        let pv = Arc::new(poly);
        let pg = Arc::clone(&pv);
        let mut f = Self::from_time_fn(dim, move |t, p| pv.eval(t, p))
            .with_gradient(move |t, p, out| pg.gradient(t, p, out))
            .with_label("polynomial");
        f.time_dependent = time_dependent;
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn support(&self) -> Option<&SupportBox> {
        self.support.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    #[inline]
    pub fn value(&self, t: f64, p: &[f64]) -> f64 {
        (self.value)(t, p)
    }

    /// Spatial gradient at `(t, p)`, analytic when available.
    pub fn gradient_into(&self, t: f64, p: &[f64], out: &mut [f64]) {
        match &self.gradient {
            Some(g) => g(t, p, out),
            None => self.fd_gradient_into(t, p, out),
        }
    }

    pub fn gradient(&self, t: f64, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.gradient_into(t, p, &mut out);
        out
    }

    pub fn fd_gradient_into(&self, t: f64, p: &[f64], out: &mut [f64]) {
        let h = self.fd_step;
        let mut q = p.to_vec();
        for i in 0..self.dim {
            q[i] = p[i] + h;
            let fp = self.value(t, &q);
            q[i] = p[i] - h;
            let fm = self.value(t, &q);
            q[i] = p[i];
            out[i] = (fp - fm) / (2.0 * h);
        }
    }

    /// Largest relative discrepancy between the analytic gradient and
    /// central differences at step `h` over `samples`; zero without one.
    pub fn gradient_check(&self, samples: &[(f64, Vec<f64>)], h: f64) -> f64 {
        let Some(g) = &self.gradient else { return 0.0 };
        let probe = self.clone().with_fd_step(h);
        let mut worst = 0.0f64;
        let mut analytic = vec![0.0; self.dim];
        let mut numeric = vec![0.0; self.dim];
        for (t, p) in samples {
            g(*t, p, &mut analytic);
            probe.fd_gradient_into(*t, p, &mut numeric);
            let scale = 1.0 + crate::linalg::norm(&analytic);
            let diff = analytic
                .iter()
                .zip(&numeric)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst = worst.max(diff / scale);
        }
        worst
    }

    /// The same field frozen at time `t`.
    pub fn frozen(&self, t: f64) -> Self {
        let inner = self.clone();
        let ginner = self.clone();
        let mut f = Self::from_fn(self.dim, move |p| inner.value(t, p))
            .with_gradient(move |_, p, out| ginner.gradient_into(t, p, out))
            .with_label(format!("{}@t={t}", self.label));
        f.support = self.support.clone();
        f.fd_step = self.fd_step;
        f
    }

    fn combine(
        &self,
        other: &Self,
        label: String,
        value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(self.dim, other.dim, "fields on different charts");
        let (a, b) = (self.clone(), other.clone());
        let (ga, gb) = (self.clone(), other.clone());
        let value = Arc::new(value);
        let dim = self.dim;
        let mut f = Self::from_time_fn(dim, move |t, p| value(a.value(t, p), b.value(t, p))).with_gradient(
            move |t, p, out| {
                let va = ga.value(t, p);
                let vb = gb.value(t, p);
                let mut da = vec![0.0; dim];
                let mut db = vec![0.0; dim];
                ga.gradient_into(t, p, &mut da);
                gb.gradient_into(t, p, &mut db);
                for i in 0..dim {
                    out[i] = grad(va, vb, da[i], db[i]);
                }
            },
        );
        f.time_dependent = self.time_dependent || other.time_dependent;
        f.label = label;
        f.fd_step = self.fd_step;
        f
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut f = self.combine(other, format!("({})+({})", self.label, other.label), |a, b| a + b, |_, _, da, db| da + db);
        f.support = union_support(self.support.as_ref(), other.support.as_ref());
        f
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut f = self.combine(other, format!("({})-({})", self.label, other.label), |a, b| a - b, |_, _, da, db| da - db);
        f.support = union_support(self.support.as_ref(), other.support.as_ref());
        f
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut f = self.combine(
            other,
            format!("({})*({})", self.label, other.label),
            |a, b| a * b,
            |a, b, da, db| a * db + b * da,
        );
        f.support = match (&self.support, &other.support) {
            (Some(s), _) | (None, Some(s)) => Some(s.clone()),
            _ => None,
        };
        f
    }

    pub fn scaled(&self, c: f64) -> Self {
        let (a, ga) = (self.clone(), self.clone());
        let mut f = Self::from_time_fn(self.dim, move |t, p| c * a.value(t, p)).with_gradient(move |t, p, out| {
            ga.gradient_into(t, p, out);
            out.iter_mut().for_each(|v| *v *= c);
        });
        f.time_dependent = self.time_dependent;
        f.support = self.support.clone();
        f.fd_step = self.fd_step;
        f.label = format!("{c}*({})", self.label);
        f
    }

    pub fn neg(&self) -> Self {
        self.scaled(-1.0)
    }

    /// `(t, p) -> -H(1 - t, p)`: generates the reversed isotopy
    /// `phi^{1-t} o (phi^1)^{-1}` when `H` is autonomous.
    pub fn time_reversed(&self) -> Self {
        let (a, ga) = (self.clone(), self.clone());
        let mut f = Self::from_time_fn(self.dim, move |t, p| -a.value(1.0 - t, p)).with_gradient(move |t, p, out| {
            ga.gradient_into(1.0 - t, p, out);
            out.iter_mut().for_each(|v| *v = -*v);
        });
        f.time_dependent = self.time_dependent;
        f.support = self.support.clone();
        f.fd_step = self.fd_step;
        f.label = format!("reverse({})", self.label);
        f
    }

    /// Concatenation on `[0, 1]`: `2 H(2t)` on the first half, `2 K(2t - 1)` on
    /// the second. Its time-1 map is `phi_K^1 o phi_H^1`.
    pub fn concatenate(first: &Self, second: &Self) -> Self {
        assert_eq!(first.dim, second.dim);
        let (a, b) = (first.clone(), second.clone());
        let (ga, gb) = (first.clone(), second.clone());
        let mut f = Self::from_time_fn(first.dim, move |t, p| {
            if t < 0.5 {
                2.0 * a.value(2.0 * t, p)
            } else {
                2.0 * b.value(2.0 * t - 1.0, p)
            }
        })
        .with_gradient(move |t, p, out| {
            if t < 0.5 {
                ga.gradient_into(2.0 * t, p, out);
            } else {
                gb.gradient_into(2.0 * t - 1.0, p, out);
            }
            out.iter_mut().for_each(|v| *v *= 2.0);
        });
        f.support = union_support(first.support.as_ref(), second.support.as_ref());
        f.label = format!("concat({}, {})", first.label, second.label);
        f
    }

    /// Parse a named builtin: `reeb`, `zero`, `const:c`, `coordinate:<axis>`,
    /// `hk:k`, `bump`.
    pub fn builtin(name: &str, chart: &ContactChart) -> Result<Self> {
        let dim = chart.dimension();
        let name = name.trim();
        if name == "reeb" {
            return Ok(Self::constant(dim, 1.0).with_label("reeb"));
        }
        if name == "zero" {
            return Ok(Self::zero(dim).with_label("zero"));
        }
        if let Some(c) = name.strip_prefix("const:") {
            let c: f64 = c.parse().map_err(|_| ContactError::Input(format!("bad constant in `{name}`")))?;
            return Ok(Self::constant(dim, c));
        }
        if let Some(axis) = name.strip_prefix("coordinate:") {
            let idx = coordinate_axis(chart, axis)?;
            return Ok(Self::coordinate(dim, idx).with_label(format!("coordinate:{axis}")));
        }
        if let Some(k) = name.strip_prefix("hk:") {
            let k: u32 = k.parse().map_err(|_| ContactError::Input(format!("bad k in `{name}`")))?;
            if *chart != ContactChart::darboux(1) {
                return Err(ContactError::Input("hk:k lives on darboux:1".into()));
            }
            if k == 0 {
                return Err(ContactError::Input("hk:k needs k >= 1".into()));
            }
            return Ok(hk(k));
        }
        if name == "bump" {
            if chart.is_compact() {
                return Err(ContactError::Input("bump is defined on open charts".into()));
            }
            return Ok(bump(dim, &vec![0.0; dim], 1.0));
        }
        Err(ContactError::Input(format!("unknown hamiltonian builtin `{name}`")))
    }
}

fn union_support(a: Option<&SupportBox>, b: Option<&SupportBox>) -> Option<SupportBox> {
    match (a, b) {
        (Some(a), Some(b)) => Some(SupportBox {
            lower: a.lower.iter().zip(&b.lower).map(|(x, y)| x.min(*y)).collect(),
            upper: a.upper.iter().zip(&b.upper).map(|(x, y)| x.max(*y)).collect(),
            periodic: a.periodic.iter().zip(&b.periodic).map(|(x, y)| *x && *y).collect(),
        }),
        _ => None,
    }
}

/// Axis index of a named coordinate (`x1`, `y2`, `z`, `s`, `theta`, `x`, `y`, `t`).
pub fn coordinate_axis(chart: &ContactChart, name: &str) -> Result<usize> {
    let bad = || ContactError::Input(format!("chart `{chart}` has no coordinate `{name}`"));
    match chart {
        ContactChart::Darboux { n } => {
            if name == "z" {
                return Ok(2 * n);
            }
            let (kind, idx) = name.split_at(1.min(name.len()));
            let i: usize = idx.parse().map_err(|_| bad())?;
            if i == 0 || i > *n {
                return Err(bad());
            }
            match kind {
                "x" => Ok(i - 1),
                "y" => Ok(n + i - 1),
                _ => Err(bad()),
            }
        }
        ContactChart::Circle => (name == "s").then_some(0).ok_or_else(bad),
        ContactChart::Prequantization => match name {
            "x" => Ok(0),
            "y" => Ok(1),
            "t" => Ok(2),
            _ => Err(bad()),
        },
        ContactChart::Symplectization(base) => {
            if name == "theta" {
                Ok(base.dimension())
            } else {
                coordinate_axis(base, name)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: f64,
    pub powers: Vec<u32>,
    #[serde(default)]
    pub time_power: u32,
}

/// Polynomial in the chart coordinates (and optionally time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        for m in &terms {
            if m.powers.len() != dim {
                return Err(ContactError::DimensionMismatch { expected: dim, got: m.powers.len() });
            }
        }
        Ok(Self { dim, terms })
    }

    /// Every monomial of total degree `<= degree`, coefficients uniform in `[-scale, scale]`.
    pub fn random<R: Rng + ?Sized>(dim: usize, degree: u32, scale: f64, rng: &mut R) -> Self {
        let terms = exponents_up_to(dim, degree)
            .into_iter()
            .map(|powers| Monomial { coefficient: rng.random_range(-scale..=scale), powers, time_power: 0 })
            .collect();
        Self { dim, terms }
    }

    pub fn eval(&self, t: f64, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                let mut v = m.coefficient * t.powi(m.time_power as i32);
                for (x, &e) in p.iter().zip(&m.powers) {
                    if e > 0 {
                        v *= x.powi(e as i32);
                    }
                }
                v
            })
            .sum()
    }

    pub fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for m in &self.terms {
            let c = m.coefficient * t.powi(m.time_power as i32);
            for i in 0..self.dim {
                let e = m.powers[i];
                if e == 0 {
                    continue;
                }
                let mut v = c * (e as f64) * p[i].powi(e as i32 - 1);
                for j in 0..self.dim {
                    if j != i && m.powers[j] > 0 {
                        v *= p[j].powi(m.powers[j] as i32);
                    }
                }
                out[i] += v;
            }
        }
    }
}

fn exponents_up_to(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == dim {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(dim, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, degree, &mut Vec::new(), &mut out);
    out
}

/// `f(x, y) = -exp(1 - 1/(1 - x^2 - y^2))` on the unit disk, zero outside:
/// compactly supported, non-positive, with global minimum `f(0,0) = -1`.
pub fn disk_bump(x: f64, y: f64) -> f64 {
    let s = x * x + y * y;
    if s >= 1.0 {
        0.0
    } else {
        -(1.0 - 1.0 / (1.0 - s)).exp()
    }
}

/// `(f, df/dx, df/dy)` for [`disk_bump`].
pub fn disk_bump_with_gradient(x: f64, y: f64) -> (f64, f64, f64) {
    let s = x * x + y * y;
    if s >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let w = 1.0 - s;
    let e = (1.0 - 1.0 / w).exp();
    let c = 2.0 * e / (w * w);
    (-e, c * x, c * y)
}

/// `H_k(x, y, z) = f(x, y)/k * sin(k^2 z)` on `darboux:1`.
///
/// Support box: the unit square in `(x, y)` times one `z`-period
/// `[-pi/k^2, pi/k^2]` (periodic axis).
pub fn hk(k: u32) -> ScalarField {
    let kf = k as f64;
    let k2 = kf * kf;
    let support = SupportBox::new(vec![-1.0, -1.0, -PI / k2], vec![1.0, 1.0, PI / k2]).with_periodic_axis(2);
    ScalarField::from_fn(3, move |p| disk_bump(p[0], p[1]) / kf * (k2 * p[2]).sin())
        .with_gradient(move |_, p, out| {
            let (f, fx, fy) = disk_bump_with_gradient(p[0], p[1]);
            let (s, c) = (k2 * p[2]).sin_cos();
            out[0] = fx / kf * s;
            out[1] = fy / kf * s;
            out[2] = f * kf * c;
        })
        .with_support(support)
        .with_label(format!("hk:{k}"))
}

/// Smooth compactly supported bump `exp(1 - 1/(1 - |p - c|^2 / r^2))`, peak 1.
pub fn bump(dim: usize, center: &[f64], radius: f64) -> ScalarField {
    let c = center.to_vec();
    let cg = c.clone();
    let r2 = radius * radius;
    let support = SupportBox::new(
        center.iter().map(|x| x - radius).collect(),
        center.iter().map(|x| x + radius).collect(),
    );
    ScalarField::from_fn(dim, move |p| {
        let s: f64 = p.iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / r2;
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s)).exp()
        }
    })
    .with_gradient(move |_, p, out| {
        let s: f64 = p.iter().zip(&cg).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / r2;
        if s >= 1.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let w = 1.0 - s;
        let e = (1.0 - 1.0 / w).exp();
        for i in 0..p.len() {
            out[i] = -e / (w * w) * 2.0 * (p[i] - cg[i]) / r2;
        }
    })
    .with_support(support)
    .with_label("bump")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub frequency: u32,
    pub time_power: u32,
    pub cos: f64,
    pub sin: f64,
}

/// Time-dependent trigonometric polynomial on the circle:
/// `H_t(s) = sum t^m (a cos(2 pi j s) + b sin(2 pi j s))`.
pub fn trigonometric(terms: Vec<TrigTerm>) -> ScalarField {
    let time_dependent = terms.iter().any(|t| t.time_power > 0);
    let terms = Arc::new(terms);
    let tg = Arc::clone(&terms);
    let mut f = ScalarField::from_time_fn(1, move |t, p| {
        terms
            .iter()
            .map(|term| {
                let w = 2.0 * PI * term.frequency as f64;
                let (s, c) = (w * p[0]).sin_cos();
                t.powi(term.time_power as i32) * (term.cos * c + term.sin * s)
            })
            .sum()
    })
    .with_gradient(move |t, p, out| {
        out[0] = tg
            .iter()
            .map(|term| {
                let w = 2.0 * PI * term.frequency as f64;
                let (s, c) = (w * p[0]).sin_cos();
                t.powi(term.time_power as i32) * w * (-term.cos * s + term.sin * c)
            })
            .sum();
    })
    .with_label("trig");
    f.time_dependent = time_dependent;
    f
}

/// Random trigonometric path with frequencies `0..=max_frequency` and time powers `0..=1`.
pub fn random_trigonometric<R: Rng + ?Sized>(max_frequency: u32, scale: f64, rng: &mut R) -> ScalarField {
    let mut terms = Vec::new();
    for frequency in 0..=max_frequency {
        for time_power in 0..=1 {
            terms.push(TrigTerm {
                frequency,
                time_power,
                cos: rng.random_range(-scale..=scale),
                sin: if frequency == 0 { 0.0 } else { rng.random_range(-scale..=scale) },
            });
        }
    }
    trigonometric(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn samples(dim: usize, n: usize, scale: f64, seed: u64) -> Vec<(f64, Vec<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (rng.random_range(0.0..1.0), (0..dim).map(|_| rng.random_range(-scale..scale)).collect()))
            .collect()
    }

    #[test]
    fn analytic_gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fields = vec![
            hk(1),
            hk(4),
            hk(8),
            bump(3, &[0.1, -0.2, 0.0], 1.2),
            ScalarField::polynomial(Polynomial::random(3, 3, 1.0, &mut rng)),
            random_trigonometric(3, 1.0, &mut rng),
        ];
        for f in fields {
            let pts = samples(f.dim(), 200, 0.9, 9);
            let err = f.gradient_check(&pts, 1e-5);
            assert!(err <= 1e-6, "{}: {err}", f.label());
        }
    }

    #[test]
    fn combinator_gradients_are_chain_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = ScalarField::polynomial(Polynomial::random(3, 2, 1.0, &mut rng));
        let b = hk(2);
        for f in [a.mul(&b), a.add(&b), a.sub(&b), a.scaled(-3.0), a.time_reversed(), a.frozen(0.3)] {
            let pts = samples(3, 100, 0.8, 1);
            assert!(f.gradient_check(&pts, 1e-5) <= 1e-6, "{}", f.label());
        }
    }

    #[test]
    fn hk_properties() {
        let h = hk(3);
        assert_eq!(h.value(0.0, &[0.0, 0.0, 0.0]), 0.0);
        let g = h.gradient(0.0, &[0.0, 0.0, 0.0]);
        assert_eq!(g, vec![0.0, 0.0, -3.0]);
        // vanishes outside the unit disk in (x, y)
        let support = h.support().unwrap().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let p = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            if !support.contains(&p) {
                assert_eq!(h.value(0.0, &p), 0.0);
            }
        }
        // periodic in z with period 2 pi / k^2
        let period = 2.0 * PI / 9.0;
        let p = [0.2, -0.1, 0.3];
        let q = [0.2, -0.1, 0.3 + period];
        assert!((h.value(0.0, &p) - h.value(0.0, &q)).abs() < 1e-14);
    }

    #[test]
    fn disk_bump_requirements() {
        assert_eq!(disk_bump(0.0, 0.0), -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let (x, y) = (rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
            let f = disk_bump(x, y);
            assert!(f <= 0.0 && f >= -1.0);
            if x * x + y * y >= 1.0 {
                assert_eq!(f, 0.0);
            }
        }
    }

    #[test]
    fn compactly_supported_bump_vanishes_outside_box() {
        let b = bump(3, &[0.0, 0.0, 0.0], 0.5);
        assert_eq!(b.value(0.0, &[0.0, 0.0, 0.0]), 1.0);
        assert_eq!(b.value(0.0, &[0.6, 0.0, 0.0]), 0.0);
        assert!(!b.support().unwrap().contains(&[0.6, 0.0, 0.0]));
    }

    #[test]
    fn builtin_names() {
        let c = ContactChart::darboux(2);
        let x1 = ScalarField::builtin("coordinate:x1", &c).unwrap();
        let y2 = ScalarField::builtin("coordinate:y2", &c).unwrap();
        let z = ScalarField::builtin("coordinate:z", &c).unwrap();
        let p = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!((x1.value(0.0, &p), y2.value(0.0, &p), z.value(0.0, &p)), (1.0, 4.0, 5.0));
        assert_eq!(ScalarField::builtin("reeb", &c).unwrap().value(0.0, &p), 1.0);
        assert!(ScalarField::builtin("coordinate:y3", &c).is_err());
        assert!(ScalarField::builtin("hk:2", &c).is_err());
        assert!(ScalarField::builtin("hk:2", &ContactChart::darboux(1)).is_ok());
        assert!(ScalarField::builtin("warp", &c).is_err());
    }

    #[test]
    fn concatenation_and_reversal() {
        let a = ScalarField::constant(1, 2.0);
        let b = ScalarField::constant(1, -1.0);
        let c = ScalarField::concatenate(&a, &b);
        assert_eq!(c.value(0.2, &[0.0]), 4.0);
        assert_eq!(c.value(0.7, &[0.0]), -2.0);
        let r = trigonometric(vec![TrigTerm { frequency: 1, time_power: 1, cos: 1.0, sin: 0.0 }]);
        assert!((r.time_reversed().value(0.25, &[0.0]) + 0.75).abs() < 1e-15);
    }

    #[test]
    fn polynomial_dimension_checked() {
        let bad = Polynomial::new(3, vec![Monomial { coefficient: 1.0, powers: vec![1, 0], time_power: 0 }]);
        assert!(matches!(bad, Err(ContactError::DimensionMismatch { .. })));
        let p = Polynomial::new(2, vec![Monomial { coefficient: 2.0, powers: vec![2, 1], time_power: 1 }]).unwrap();
        assert_eq!(p.eval(0.5, &[3.0, 2.0]), 2.0 * 0.5 * 9.0 * 2.0);
        assert!(ScalarField::polynomial(p).is_time_dependent());
    }
}

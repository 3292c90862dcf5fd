//! Bracket closure of the vanishing ideal of a patch, sampled on the patch.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::charts::ContactChart;
use crate::dynamics::field::{Polynomial, ScalarField};
use crate::dynamics::vector_field::{contact_bracket_with, BracketConvention};
use crate::error::{ContactError, Result};
use crate::linalg;
use crate::submanifolds::patch::SubmanifoldPatch;
use crate::submanifolds::tangent::{coisotropy_test, CoisotropyVerdict};

/// `sum_i d_i P_i` for the patch's defining functions `d_i` and random
/// polynomials `P_i`; it vanishes on the patch by construction.
pub fn ideal_element<R: Rng + ?Sized>(patch: &SubmanifoldPatch, degree: u32, rng: &mut R) -> Result<ScalarField> {
    let d = patch.chart.dimension();
    let mut it = patch.defining.iter();
    let first = it
        .next()
        .ok_or_else(|| ContactError::Input(format!("patch `{}` has no defining functions", patch.name)))?;
    let term = |f: &ScalarField, rng: &mut R| f.mul(&ScalarField::polynomial(Polynomial::random(d, degree, 1.0, rng)));
    let mut acc = term(first, rng);
    for f in it {
        acc = acc.add(&term(f, rng));
    }
    Ok(acc.with_label(format!("ideal({})", patch.name)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealBracketReport {
    pub patch: String,
    pub convention: BracketConvention,
    pub pairs: usize,
    /// Largest `|{F, G}| / scale` over pairs and samples, where `scale` is the
    /// per-pair maximum of `|dF| |dG|` on the samples.
    pub max_normalized_bracket: f64,
    pub max_bracket: f64,
    pub rel_tol: f64,
    pub vanishes: bool,
    pub coisotropy: CoisotropyVerdict,
    pub agree: bool,
}

/// Bracket random pairs from the vanishing ideal on the patch samples and
/// compare "all brackets vanish" with the coisotropy verdict at `coiso_tol`.
pub fn vanishing_ideal_check<R: Rng + ?Sized>(
    convention: BracketConvention,
    patch: &SubmanifoldPatch,
    pairs: usize,
    rel_tol: f64,
    coiso_tol: f64,
    rng: &mut R,
) -> Result<IdealBracketReport> {
    let chart: &ContactChart = &patch.chart;
    let coisotropy = coisotropy_test(chart, patch, coiso_tol)?;
    let points: Vec<_> = patch.samples().iter().map(|s| patch.point(s)).collect();
    let mut max_normalized = 0.0f64;
    let mut max_bracket = 0.0f64;
    for _ in 0..pairs {
        let f = ideal_element(patch, 2, rng)?;
        let g = ideal_element(patch, 2, rng)?;
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for p in &points {
            let b = contact_bracket_with(convention, chart, &f, &g, p)?;
            worst = worst.max(b.abs());
            scale = scale.max(linalg::norm(&f.gradient(0.0, &p.coords)) * linalg::norm(&g.gradient(0.0, &p.coords)));
        }
        max_bracket = max_bracket.max(worst);
        max_normalized = max_normalized.max(if scale > 0.0 { worst / scale } else { worst });
    }
    let vanishes = max_normalized <= rel_tol;
    Ok(IdealBracketReport {
        patch: patch.name.clone(),
        convention,
        pairs,
        max_normalized_bracket: max_normalized,
        max_bracket,
        rel_tol,
        vanishes,
        agree: vanishes == coisotropy.pass,
        coisotropy,
    })
}

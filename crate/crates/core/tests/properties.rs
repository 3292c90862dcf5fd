//! Property tests for chart, field, flow, subspace, lift and cost invariants.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use contactlab::dynamics::field::{bump, random_trigonometric};
use contactlab::dynamics::{
    contact_bracket_with, flow_endpoint, hk, integrate_isotopy, verify_conformal_algebra, BracketConvention, FlowMap,
    Polynomial, ScalarField,
};
use contactlab::lifts::SymplectizationChart;
use contactlab::norms::{
    circle_delta, orbit_cost, shelukhin_cost, BoundDirection, GridOptions,
};
use contactlab::submanifolds::patch::{circle_point, local_model};
use contactlab::submanifolds::tangent::{coisotropy_test, dalpha_perp, legendrian_test, xi_basis, Subspace};
use contactlab::submanifolds::{fixture, LocalModel, FIXTURE_NAMES};
use contactlab::{ContactChart, Point, TangentVector};

fn contact_chart(kind: u8) -> ContactChart {
    match kind % 5 {
        0 => ContactChart::darboux(1),
        1 => ContactChart::darboux(2),
        2 => ContactChart::darboux(3),
        3 => ContactChart::Circle,
        _ => ContactChart::Prequantization,
    }
}

fn poly(dim: usize, degree: u32, scale: f64, rng: &mut ChaCha8Rng) -> ScalarField {
    ScalarField::polynomial(Polynomial::random(dim, degree, scale, rng))
}

fn coords(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reeb_normalized_and_in_kernel(kind in 0u8..5, raw in coords(7)) {
        let chart = contact_chart(kind);
        let d = chart.dimension();
        let p = chart.point(raw[..d].to_vec()).unwrap();
        let r = chart.reeb_at(&p).unwrap();
        prop_assert!((chart.alpha_at(&p, &r).unwrap() - 1.0).abs() <= 1e-12);
        for i in 0..d {
            let e = chart.basis_vector(&p, i);
            prop_assert!(chart.dalpha_at(&p, &r, &e).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn dalpha_is_antisymmetric(kind in 0u8..5, raw in coords(7), v in coords(7), w in coords(7)) {
        let chart = contact_chart(kind);
        let d = chart.dimension();
        let p = chart.point(raw[..d].to_vec()).unwrap();
        let v = TangentVector::new(p.clone(), v[..d].to_vec());
        let w = TangentVector::new(p.clone(), w[..d].to_vec());
        prop_assert_eq!(chart.dalpha_at(&p, &v, &w).unwrap(), -chart.dalpha_at(&p, &w, &v).unwrap());
    }

    #[test]
    fn circle_alpha_invariant_under_wrap(s in -5.0..5.0f64, v in -3.0..3.0f64) {
        let chart = ContactChart::Circle;
        let p = chart.point(vec![s]).unwrap();
        let q = chart.point(vec![s + 1.0]).unwrap();
        prop_assert!((0.0..1.0).contains(&p.coords[0]));
        let a = chart.alpha_at(&p, &TangentVector::new(p.clone(), vec![v])).unwrap();
        let b = chart.alpha_at(&q, &TangentVector::new(q.clone(), vec![v])).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bracket_symmetry_defect_and_antisymmetry(n in 1usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chart = ContactChart::darboux(n);
        let d = chart.dimension();
        let f = poly(d, 3, 1.0, &mut rng);
        let g = poly(d, 3, 1.0, &mut rng);
        let p = chart.sample_point(&mut rng, 1.0);
        let a = |c, x: &ScalarField, y: &ScalarField| contact_bracket_with(c, &chart, x, y, &p).unwrap();
        let sum = a(BracketConvention::AsPrinted, &f, &g) + a(BracketConvention::AsPrinted, &g, &f);
        let oracle = 2.0 * (f.value(0.0, &p.coords) * g.gradient(0.0, &p.coords)[d - 1]
            + g.value(0.0, &p.coords) * f.gradient(0.0, &p.coords)[d - 1]);
        prop_assert!((sum - oracle).abs() <= 1e-8 * (1.0 + oracle.abs()));
        let anti = a(BracketConvention::SignFlipped, &f, &g) + a(BracketConvention::SignFlipped, &g, &f);
        prop_assert!(anti.abs() <= 1e-8);
    }

    #[test]
    fn double_complement_and_dimension_count(n in 1usize..4, k in 0usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chart = ContactChart::darboux(n);
        let p = chart.sample_point(&mut rng, 2.0);
        let xi = xi_basis(&chart, &p).unwrap();
        prop_assert!(xi.orthonormality_defect() <= 1e-12);
        let cols: Vec<Vec<f64>> = (0..k.min(2 * n))
            .map(|_| {
                let mut v = vec![0.0; chart.dimension()];
                for j in 0..xi.dim() {
                    let c: f64 = rng.random_range(-1.0..1.0);
                    for (vi, bi) in v.iter_mut().zip(xi.column(j)) {
                        *vi += c * bi;
                    }
                }
                v
            })
            .collect();
        let v = Subspace::span(p.clone(), &cols, 1e-10);
        let perp = dalpha_perp(&chart, &v, &p).unwrap();
        prop_assert!(perp.orthonormality_defect() <= 1e-12);
        prop_assert_eq!(v.dim() + perp.dim(), 2 * n);
        let back = dalpha_perp(&chart, &perp, &p).unwrap();
        prop_assert_eq!(back.dim(), v.dim());
        prop_assert!(back.distance(&v) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn analytic_gradients_match_differences(seed in any::<u64>(), k in 1u32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<(f64, Vec<f64>)> = (0..20)
            .map(|_| (0.0, ContactChart::darboux(1).sample_point(&mut rng, 0.9).coords))
            .collect();
        for f in [hk(k), bump(3, &[0.1, -0.2, 0.0], 1.2), poly(3, 3, 1.0, &mut rng)] {
            prop_assert!(f.gradient_check(&samples, 1e-5) <= 1e-6, "{}", f.label());
        }
    }

    #[test]
    fn compact_fields_vanish_outside_support(raw in coords(3), r in 0.2..1.5f64) {
        let f = bump(3, &[0.0; 3], r);
        let outside = raw.iter().any(|x| x.abs() > r);
        if outside {
            prop_assert_eq!(f.value(0.0, &raw), 0.0);
        }
    }

    #[test]
    fn trajectories_start_unscaled_and_satisfy_step_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chart = ContactChart::darboux(1);
        let h = poly(3, 2, 0.5, &mut rng);
        let p = chart.sample_point(&mut rng, 0.5);
        let traj = integrate_isotopy(&chart, &h, &p, (0.0, 0.5), 1e-2).unwrap();
        prop_assert_eq!(traj.conformal[0], 0.0);
        prop_assert!(traj.step_residual(&chart).unwrap() <= 10.0 * traj.step.powi(5));
    }

    #[test]
    fn halving_the_step_gains_fourth_order(step in 0.05..0.2f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        let chart = ContactChart::darboux(1);
        let h = ScalarField::coordinate(3, 2);
        let p = [0.0, y, z];
        let e = 1f64.exp();
        let err = |s: f64| {
            let end = flow_endpoint(&chart, &h, &p, 0.0, 1.0, s).unwrap();
            ((end.point[1] - y * e).abs()).max((end.point[2] - z * e).abs())
        };
        let (coarse, fine) = (err(step), err(step / 2.0));
        prop_assume!(coarse > 1e-12);
        prop_assert!(coarse / fine >= 8.0 * 0.8, "{coarse:e} / {fine:e}");
    }

    #[test]
    fn conformal_factors_add_under_composition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chart = ContactChart::darboux(1);
        let f = poly(3, 2, 0.4, &mut rng);
        let g = poly(3, 2, 0.4, &mut rng);
        let p = chart.sample_point(&mut rng, 0.5);
        let r = verify_conformal_algebra(&chart, &f, &g, &p.coords, 1e-2, 1e-6).unwrap();
        prop_assert!(r.pass, "{r:?}");
    }

    #[test]
    fn omega_matches_exterior_derivative(n in 1usize..3, raw in coords(6)) {
        let s = SymplectizationChart::new(ContactChart::darboux(n)).unwrap();
        let q = &raw[..s.dimension()];
        prop_assert!(s.exterior_derivative_check(q, 1e-5) <= 1e-6);
        let m = s.omega_matrix(q);
        prop_assert_eq!(m.clone(), -m.transpose());
        prop_assert!(m.svd(false, false).singular_values.min() > 0.0);
    }

    #[test]
    fn lifts_compose_like_flows(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = ContactChart::darboux(1);
        let s = SymplectizationChart::new(base.clone()).unwrap();
        let phi = FlowMap::new(base.clone(), poly(3, 2, 0.4, &mut rng), 1.0).with_step(1e-2);
        let psi = FlowMap::new(base.clone(), poly(3, 2, 0.4, &mut rng), 1.0).with_step(1e-2);
        let mut q = base.sample_point(&mut rng, 0.5).coords;
        q.push(rng.random_range(-1.0..1.0));
        let lifted = s.lift_map(&psi).unwrap().apply(&s.lift_map(&phi).unwrap().apply(&q).unwrap()).unwrap();
        // direct lift of psi o phi: theta shifts by the measured total factor
        let (a, _) = phi.apply(&q[..3]).unwrap();
        let (b, _) = psi.apply(&a).unwrap();
        let composed = |x: &[f64]| -> contactlab::Result<Vec<f64>> { Ok(psi.apply(&phi.apply(x)?.0)?.0) };
        let g = contactlab::dynamics::measured_conformal_factor(&base, &composed, &q[..3], 1e-4).unwrap();
        prop_assert_eq!(&lifted[..3], &b[..]);
        prop_assert!((lifted[3] - (q[3] - g)).abs() <= 1e-6);
    }

    #[test]
    fn local_models_legendrian_implies_coisotropic(n in 1usize..3, k in 0usize..3, with_z in any::<bool>()) {
        prop_assume!(if with_z { k <= n } else { k < n });
        let model = if with_z { LocalModel::WithZ } else { LocalModel::WithoutZ };
        let patch = local_model(model, n, k).unwrap();
        let c = coisotropy_test(&patch.chart, &patch, 1e-8).unwrap();
        let l = legendrian_test(&patch.chart, &patch, 1e-8).unwrap();
        prop_assert!(!l.pass || c.pass);
        prop_assert_eq!(c.pass, c.records.iter().all(|r| r.pass));
    }

    #[test]
    fn circle_upper_bounds_dominate_exact_distance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_trigonometric(2, 0.4, &mut rng);
        let p: f64 = rng.random_range(0.0..1.0);
        let opts = GridOptions { resolution: 256, conformal_resolution: 3, time_steps: 1000, step: 1e-3 };
        let end = flow_endpoint(&ContactChart::Circle, &h, &[p], 0.0, 1.0, 1e-3).unwrap().point[0];
        let exact = circle_delta(&Point::new(vec![p]), &Point::new(vec![end])).unwrap();
        prop_assert_eq!(exact.bound_direction, BoundDirection::Exact);
        let she = shelukhin_cost(&ContactChart::Circle, &h, &opts).unwrap();
        let orbit = orbit_cost(&ContactChart::Circle, &h, &circle_point(p).unwrap(), &opts).unwrap();
        for r in [&she, &orbit] {
            prop_assert_eq!(r.bound_direction, BoundDirection::Upper);
            prop_assert!(r.value >= 0.0);
            // slack covers grid and trapezoid sampling of the maxima
            prop_assert!(r.value >= exact.value - 1e-5, "{} < {}", r.value, exact.value);
        }
    }

    #[test]
    fn reversed_paths_cost_the_same(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_trigonometric(3, 0.5, &mut rng);
        let opts = GridOptions { resolution: 50, conformal_resolution: 3, time_steps: 40, step: 1e-2 };
        let a = shelukhin_cost(&ContactChart::Circle, &h, &opts).unwrap().value;
        let b = shelukhin_cost(&ContactChart::Circle, &h.time_reversed(), &opts).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn fixture_verdicts_are_consistent() {
    for name in FIXTURE_NAMES {
        let patch = fixture(name).unwrap();
        let c = coisotropy_test(&patch.chart, &patch, 1e-8).unwrap();
        assert_eq!(c.pass, c.records.iter().all(|r| r.pass), "{name}");
        let l = legendrian_test(&patch.chart, &patch, 1e-8).unwrap();
        assert!(!l.pass || c.pass, "{name}");
    }
}

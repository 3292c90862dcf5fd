use contactlab::dynamics::{contact_bracket_with, verify_conformal_algebra, verify_conformal_naturality, BracketConvention};
use contactlab::lifts::{prequant_bracket_check, SymplectizationChart};
use contactlab::submanifolds::{fixture, vanishing_ideal_check};
use contactlab::{ContactChart, ContactError, Point, Result};

use crate::config::ExperimentConfig;
use crate::report::{Recorder, RunReport};

use super::{chart, hamiltonian, poly, stream};

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let b = &cfg.brackets;
    let mut rec = Recorder::new("brackets");

    if let Some(pair) = &b.pair {
        let ch = chart(&pair.chart)?;
        let f = hamiltonian(&pair.f, &ch)?;
        let g = hamiltonian(&pair.g, &ch)?;
        if f.is_time_dependent() || g.is_time_dependent() {
            return Err(ContactError::Input(format!(
                "brackets.pair: the bracket needs time-independent functions, got `{}` and `{}`",
                pair.f, pair.g
            )));
        }
        let mut rng = stream(cfg.seed, 10);
        let mut worst = 0.0f64;
        for _ in 0..b.samples {
            let p = ch.sample_point(&mut rng, 1.0);
            worst = worst.max(contact_bracket_with(BracketConvention::SignFlipped, &ch, &f, &g, &p)?.abs());
        }
        rec.info(format!("pair:{{{},{}}}", f.label(), g.label()), worst, "max |{F,G}| over samples");
    }

    let mut rng = stream(cfg.seed, 1);
    let (mut defect, mut anti) = (0.0f64, 0.0f64);
    for n in [1usize, 2] {
        let ch = ContactChart::darboux(n);
        let d = ch.dimension();
        for _ in 0..b.samples {
            let f = poly(d, 3, 1.0, &mut rng);
            let g = poly(d, 3, 1.0, &mut rng);
            let p = ch.sample_point(&mut rng, 1.0);
            let br = |c, x, y| contact_bracket_with(c, &ch, x, y, &p);
            let sum = br(BracketConvention::AsPrinted, &f, &g)? + br(BracketConvention::AsPrinted, &g, &f)?;
            let oracle = 2.0
                * (f.value(0.0, &p.coords) * g.gradient(0.0, &p.coords)[d - 1]
                    + g.value(0.0, &p.coords) * f.gradient(0.0, &p.coords)[d - 1]);
            defect = defect.max((sum - oracle).abs() / (1.0 + oracle.abs()));
            anti = anti.max((br(BracketConvention::SignFlipped, &f, &g)? + br(BracketConvention::SignFlipped, &g, &f)?).abs());
        }
    }
    rec.bound("symmetry-defect", defect, b.identity_tol, "{F,G}+{G,F} = 2(F dG(R) + G dF(R))");
    rec.bound("antisymmetry:sign-flipped", anti, b.identity_tol, "{F,G}_- + {G,F}_-");

    let mut rng = stream(cfg.seed, 2);
    let ch = ContactChart::darboux(1);
    let (mut nat, mut nat_printed, mut alg) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..b.flows {
        let hpsi = poly(3, 2, 0.4, &mut rng);
        let f = poly(3, 2, 1.0, &mut rng);
        let g = poly(3, 2, 1.0, &mut rng);
        let samples = vec![ch.sample_point(&mut rng, 0.5)];
        nat = nat.max(
            verify_conformal_naturality(BracketConvention::SignFlipped, &ch, &hpsi, &f, &g, &samples, b.flow_step, b.tol)?
                .max_deviation,
        );
        nat_printed = nat_printed.max(
            verify_conformal_naturality(BracketConvention::AsPrinted, &ch, &hpsi, &f, &g, &samples, b.flow_step, b.tol)?
                .max_deviation,
        );
        let k = poly(3, 2, 0.4, &mut rng);
        let r = verify_conformal_algebra(&ch, &hpsi, &k, &samples[0].coords, b.flow_step, b.tol)?;
        alg = alg.max(r.composition_defect).max(r.inverse_defect);
    }
    rec.bound("naturality:sign-flipped", nat, b.tol, format!("{} random flows", b.flows));
    rec.info("naturality:as-printed", nat_printed, "same flows, as-printed bracket");
    rec.bound("conformal-algebra", alg, b.tol, "composition and inverse factors");

    let mut rng = stream(cfg.seed, 3);
    let (mut lift, mut lift_printed) = (0.0f64, 0.0f64);
    for n in [1usize, 2] {
        let s = SymplectizationChart::new(ContactChart::darboux(n))?;
        for _ in 0..b.samples.div_ceil(2) {
            let f = poly(2 * n + 1, 3, 1.0, &mut rng);
            let g = poly(2 * n + 1, 3, 1.0, &mut rng);
            let q = s.chart().sample_point(&mut rng, 1.0).coords;
            let scale = 1.0 + q[s.theta_index()].exp();
            lift = lift.max(s.lift_bracket_deviation(BracketConvention::SignFlipped, &f, &g, &q)? / scale);
            lift_printed = lift_printed.max(s.lift_bracket_deviation(BracketConvention::AsPrinted, &f, &g, &q)? / scale);
        }
    }
    rec.bound("lift-identity:sign-flipped", lift, cfg.lifts.lift_tol, "{e^t F, e^t G} = e^t {F, G}, relative to 1 + e^t");
    rec.info("lift-identity:as-printed", lift_printed, "same pairs, as-printed bracket");

    let mut rng = stream(cfg.seed, 4);
    let samples: Vec<Point> = (0..b.samples).map(|_| ContactChart::Prequantization.sample_point(&mut rng, 1.0)).collect();
    let mut pre = 0.0f64;
    for _ in 0..10 {
        let f = poly(2, 3, 1.0, &mut rng);
        let g = poly(2, 3, 1.0, &mut rng);
        pre = pre.max(prequant_bracket_check(BracketConvention::AsPrinted, &f, &g, &samples, cfg.lifts.prequant_tol)?.max_deviation);
    }
    rec.bound("prequantization-bracket", pre, cfg.lifts.prequant_tol, "{pi*F, pi*G} = pi*{F, G}");

    let mut rng = stream(cfg.seed, 5);
    for name in &cfg.coisotropy.fixtures {
        let patch = fixture(name)?;
        let r = vanishing_ideal_check(BracketConvention::AsPrinted, &patch, b.ideal_pairs, b.ideal_rel_tol, cfg.coisotropy.tol, &mut rng)?;
        rec.check(
            format!("vanishing-ideal:{name}"),
            r.agree,
            r.max_normalized_bracket,
            Some(b.ideal_rel_tol),
            format!("brackets vanish {}, coisotropic {}", r.vanishes, r.coisotropy.pass),
        );
    }
    Ok(rec.finish(cfg))
}

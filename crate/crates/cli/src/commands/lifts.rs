use contactlab::lifts::{lifted_cost_bound_check, prequant_coisotropy_check, symp_coisotropy_correspondence_check, SymplectizationChart};
use contactlab::submanifolds::{fixture, PlanarPatch};
use contactlab::{ContactChart, Result};

use crate::config::ExperimentConfig;
use crate::report::{Recorder, RunReport};

use super::{hamiltonian, stream};

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let l = &cfg.lifts;
    let mut rec = Recorder::new("lifts");

    let names = if l.fixtures.is_empty() { &cfg.coisotropy.fixtures } else { &l.fixtures };
    for name in names {
        let patch = fixture(name)?;
        let s = SymplectizationChart::new(patch.chart.clone())?;
        let r = symp_coisotropy_correspondence_check(&s, &patch, &l.thetas, l.tol)?;
        rec.check(
            format!("correspondence:{name}"),
            r.pass,
            r.max_subspace_distance,
            Some(l.tol),
            format!("contact {} symplectic {}", r.contact_verdict, r.symplectic_verdict),
        );
    }

    for lambda in PlanarPatch::ALL {
        let r = prequant_coisotropy_check(lambda, l.tol)?;
        rec.check(
            format!("prequantization-coisotropy:{}", lambda.name()),
            r.agree,
            r.total_residual,
            Some(l.tol),
            format!("base {} total {}", r.base_coisotropic, r.total_coisotropic),
        );
    }

    let mut rng = stream(cfg.seed, 30);
    let s = SymplectizationChart::new(ContactChart::darboux(1))?;
    let mut worst = 0.0f64;
    for _ in 0..l.pairs {
        let q = s.chart().sample_point(&mut rng, 1.0).coords;
        worst = worst.max(s.exterior_derivative_check(&q, 1e-4));
    }
    rec.bound("omega-closed", worst, 1e-6, "d(e^t alpha) by finite differences");

    let base = ContactChart::darboux(1);
    let patch = fixture(&l.cost_fixture)?;
    let s = SymplectizationChart::new(patch.chart.clone())?;
    let h = hamiltonian(&l.cost_hamiltonian, &base)?;
    match lifted_cost_bound_check(&s, &patch, &h, l.window, l.time_samples, l.step) {
        Ok(r) => rec.check(
            format!("lifted-cost:{}", h.label()),
            r.pass,
            r.lifted_cost,
            None,
            format!("lifted {:.4e} <= e^R base {:.4e} (R = {:.3})", r.lifted_cost, r.bound, r.window),
        ),
        Err(e @ contactlab::ContactError::WindowViolation { .. }) => {
            rec.check(format!("lifted-cost:{}", h.label()), false, f64::NAN, None, e.to_string())
        }
        Err(e) => return Err(e),
    }
    Ok(rec.finish(cfg))
}

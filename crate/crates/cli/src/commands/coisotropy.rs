use contactlab::submanifolds::tangent::{coisotropy_invariance_experiment, coisotropy_test, legendrian_test, CoisotropyOptions};
use contactlab::submanifolds::fixture;
use contactlab::Result;

use crate::config::ExperimentConfig;
use crate::report::{Recorder, RunReport};

use super::{chart, hamiltonian};

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let c = &cfg.coisotropy;
    let mut rec = Recorder::new("coisotropy");
    for name in &c.fixtures {
        let patch = fixture(name)?;
        let v = coisotropy_test(&patch.chart, &patch, c.tol)?;
        let l = legendrian_test(&patch.chart, &patch, c.tol)?;
        if c.verbose {
            println!("  {name}: {} samples on {}", v.records.len(), patch.chart);
            println!("    {:>36}  cap  perp  residual    verdict", "point");
            for r in &v.records {
                let pt: Vec<String> = r.point.iter().map(|x| format!("{x:+.3}")).collect();
                println!(
                    "    {:>36}  {:>3}  {:>4}  {:.3e}  {}",
                    pt.join(" "),
                    r.cap_dim,
                    r.perp_dim,
                    r.inclusion_residual,
                    if r.pass { "coisotropic" } else { "not" }
                );
            }
        }
        let verdict = if v.pass { "coisotropic" } else { "not coisotropic" };
        match patch.expected {
            Some(e) => {
                rec.check(
                    format!("coisotropy:{name}"),
                    v.pass == e.coisotropic,
                    v.max_residual(),
                    Some(c.tol),
                    format!("{verdict}, expected {}", if e.coisotropic { "coisotropic" } else { "not coisotropic" }),
                );
                rec.check(
                    format!("legendrian:{name}"),
                    l.pass == e.legendrian,
                    l.max_alpha,
                    Some(c.tol),
                    format!("legendrian {}, expected {}", l.pass, e.legendrian),
                );
            }
            None => rec.info(format!("coisotropy:{name}"), v.max_residual(), format!("{verdict} (no expectation)")),
        }
    }
    if let Some(f) = &c.flow {
        let ch = chart(&f.chart)?;
        let h = hamiltonian(&f.hamiltonian, &ch)?;
        let opts = CoisotropyOptions::new(f.tol).with_rank_tol(f.rank_tol);
        for name in &c.fixtures {
            let patch = fixture(name)?;
            if patch.chart != ch {
                continue;
            }
            let r = coisotropy_invariance_experiment(&ch, &patch, &h, f.time, f.step, opts)?;
            rec.check(
                format!("invariance:{name}"),
                r.agree,
                r.after.max_residual(),
                Some(f.tol),
                format!("before {} after {} under {} for t = {}", r.before.pass, r.after.pass, h.label(), f.time),
            );
        }
    }
    Ok(rec.finish(cfg))
}

use std::path::Path;

use rand::Rng;

use contactlab::dynamics::field::random_trigonometric;
use contactlab::dynamics::{hk, ScalarField};
use contactlab::norms::{
    angular_distance, circle_delta, circle_lower_bound_check, conjugation_cost_check, cost_suite, noncomparability_table,
    rotation_amount, symmetry_check, triangle_check, ConjugationOptions, GridOptions, TableRow,
};
use contactlab::{ContactChart, ContactError, Point, Result};

use crate::config::ExperimentConfig;
use crate::report::{Recorder, RunReport};

use super::{chart, hamiltonian, stream};

pub const CSV_HEADER: [&str; 5] = ["k", "shelukhin", "rs", "modified", "g1_at_origin"];

pub fn write_table(path: &Path, rows: &[TableRow]) -> Result<()> {
    let io = |e: std::io::Error| ContactError::Input(format!("writing {}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| ContactError::Input(format!("writing {}: {e}", path.display())))?;
    let mut write = |rec: Vec<String>| w.write_record(&rec).map_err(|e| ContactError::Input(e.to_string()));
    write(CSV_HEADER.iter().map(|s| s.to_string()).collect())?;
    for r in rows {
        write(vec![
            r.k.to_string(),
            r.shelukhin.to_string(),
            r.rs.to_string(),
            r.modified.to_string(),
            r.g1_at_origin.to_string(),
        ])?;
    }
    w.flush().map_err(io)
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let c = &cfg.norms;
    let mut rec = Recorder::new("norms");
    let opts = GridOptions {
        resolution: c.resolution,
        conformal_resolution: c.conformal_resolution,
        time_steps: c.time_steps,
        step: c.step,
    };

    // the optional hamiltonian is checked first so a bad spec fails before the long sweeps
    let extra = match &c.hamiltonian {
        Some(spec) => {
            let ch = chart(&c.chart)?;
            let h = hamiltonian(spec, &ch)?;
            if h.support().is_none() && !ch.is_compact() {
                return Err(ContactError::Input(format!(
                    "norms.hamiltonian `{spec}` has no compact support box on `{ch}`; costs need one"
                )));
            }
            Some((ch, h))
        }
        None => None,
    };

    let rows = noncomparability_table(&c.k_list, &opts)?;
    for r in &rows {
        let k = r.k as f64;
        rec.check(
            format!("shelukhin:k={}", r.k),
            (0.98 / k..=1.02 / k).contains(&r.shelukhin),
            r.shelukhin,
            None,
            format!("within 2% of 1/k = {:.6}", 1.0 / k),
        );
        let floor = 0.95 * 2.0 * k.exp() / k;
        rec.check(format!("rs:k={}", r.k), r.rs >= floor, r.rs, None, format!(">= {floor:.4e}, ln rs = {:.6}", r.rs_log));
        rec.check(format!("ratio:k={}", r.k), r.ratio >= k.exp(), r.ratio, None, format!(">= e^k = {:.4e}", k.exp()));
        rec.bound(format!("g1-origin:k={}", r.k), (r.g1_at_origin + k).abs(), 1e-6 * k, format!("g_1(0) = {:.9}", r.g1_at_origin));
        rec.info(format!("modified:k={}", r.k), r.modified, "Shelukhin cost plus max |g_1|");
    }
    let csv_path = Path::new(&cfg.output.dir).join(&cfg.output.table_csv);
    write_table(&csv_path, &rows)?;
    println!("  table written to {}", csv_path.display());

    for &[p, q] in &c.circle_pairs {
        let d = circle_delta(&Point::new(vec![p]), &Point::new(vec![q]))?.value;
        let oracle = {
            let r = (q - p).rem_euclid(1.0);
            r.min(1.0 - r)
        };
        rec.bound(format!("circle-delta:{p}->{q}"), (d - oracle).abs(), 1e-15, format!("delta = {d}"));
    }

    let mut rng = stream(cfg.seed, 40);
    let (mut all, mut min_slack) = (true, f64::INFINITY);
    for _ in 0..c.circle_paths {
        let h = random_trigonometric(3, 0.5, &mut rng);
        let p = Point::new(vec![rng.random_range(0.0..1.0)]);
        let r = circle_lower_bound_check(&h, &p, c.circle_time_steps)?;
        all &= r.pass;
        min_slack = min_slack.min(r.slack);
    }
    if c.circle_paths > 0 {
        rec.check("circle-lower-bound", all, min_slack, None, format!("path cost >= delta on {} random paths", c.circle_paths));
    }
    let mut gap = 0.0f64;
    for &[p, q] in &c.circle_pairs {
        let h = ScalarField::constant(1, rotation_amount(p, q));
        let r = circle_lower_bound_check(&h, &Point::new(vec![p]), c.circle_time_steps)?;
        let d = circle_delta(&Point::new(vec![p]), &Point::new(vec![q]))?.value;
        gap = gap.max((r.path_cost - d).abs()).max(angular_distance(r.end, q));
    }
    rec.bound("circle-rotation", gap, c.rotation_tol, "rotations realise delta");

    let d1 = ContactChart::darboux(1);
    let cj = &c.conjugation;
    let h = hamiltonian(&cj.hamiltonian, &d1)?;
    let k = hamiltonian(&cj.psi, &d1)?;
    let copts = ConjugationOptions { resolution: cj.resolution, tol: cj.tol, ..ConjugationOptions::default() };
    let r = conjugation_cost_check(&d1, &h, &k, cj.tau, &copts)?;
    rec.check(
        "conjugation",
        r.pass,
        r.route_deviation,
        Some(cj.tol),
        format!(
            "{:.4e} <= {:.4e} <= {:.4e}, sandwich {}",
            r.c_minus * r.original_cost,
            r.conjugated_cost,
            r.c_plus * r.original_cost,
            r.sandwich
        ),
    );

    let tri_opts = GridOptions { resolution: c.resolution.min(41), ..opts };
    let t = triangle_check(&d1, &hk(1), &hamiltonian("t*hk:2", &d1)?, &tri_opts, c.symmetry_tol)?;
    rec.check("triangle", t.pass, t.excess, Some(c.symmetry_tol + t.jump_allowance), format!("{:.6} <= {:.6} + {:.6}", t.concatenated, t.first, t.second));
    let s = symmetry_check(&d1, &hamiltonian("t*hk:2", &d1)?, &tri_opts, c.symmetry_tol)?;
    rec.bound("symmetry", s.deviation, c.symmetry_tol, format!("forward {:.6} reversed {:.6}", s.forward, s.inverse));

    if let Some((ch, h)) = extra {
        let suite = cost_suite(&ch, &h, &opts)?;
        for r in [&suite.shelukhin, &suite.rs, &suite.modified] {
            rec.info(format!("cost:{}:{:?}", h.label(), r.kind), r.value, format!("{:?} bound, {}", r.bound_direction, r.certificate));
        }
    }
    Ok(rec.finish(cfg))
}

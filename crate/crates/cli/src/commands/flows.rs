use contactlab::dynamics::{contact_field_at, flow_endpoint, hk, verify_contactomorphism, ScalarField};
use contactlab::{ContactChart, Result};

use crate::config::ExperimentConfig;
use crate::report::{Recorder, RunReport};

use super::{chart, hamiltonian, stream};

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let c = &cfg.flows;
    let mut rec = Recorder::new("flows");

    // X_{x_m} = d/dy_m + x_m d/dz, X_{y_m} = -d/dx_m, X_z = sum y_i d/dy_i + z d/dz
    let mut rng = stream(cfg.seed, 20);
    for n in [1usize, 2] {
        let ch = ContactChart::darboux(n);
        let d = 2 * n + 1;
        let mut worst = 0.0f64;
        for _ in 0..c.points {
            let p = ch.sample_point(&mut rng, 2.0);
            let x = &p.coords;
            for m in 0..n {
                let got = contact_field_at(&ch, &ScalarField::coordinate(d, m), 0.0, &p)?;
                let mut e = vec![0.0; d];
                e[n + m] = 1.0;
                e[2 * n] = x[m];
                worst = worst.max(max_abs_diff(&got.components, &e));
                let got = contact_field_at(&ch, &ScalarField::coordinate(d, n + m), 0.0, &p)?;
                let mut e = vec![0.0; d];
                e[m] = -1.0;
                worst = worst.max(max_abs_diff(&got.components, &e));
            }
            let got = contact_field_at(&ch, &ScalarField::coordinate(d, 2 * n), 0.0, &p)?;
            let mut e = vec![0.0; d];
            e[n..].copy_from_slice(&x[n..]);
            worst = worst.max(max_abs_diff(&got.components, &e));
        }
        rec.bound(format!("closed-forms:darboux:{n}"), worst, c.closed_form_tol, format!("{} random points", c.points));
    }

    let ch = ContactChart::darboux(1);
    for &k in &c.k_list {
        let mut worst = 0.0f64;
        for &t in &c.times {
            let g = flow_endpoint(&ch, &hk(k), &[0.0; 3], 0.0, t, c.step)?.conformal;
            let expected = -(k as f64) * t;
            worst = worst.max((g - expected).abs() / expected.abs());
        }
        rec.bound(format!("hk-conformal:k={k}"), worst, c.conformal_rel_tol, "relative error of g_t(0) against -kt");
    }

    let z = ScalarField::coordinate(3, 2);
    let p = [0.3, 0.7, -0.4];
    let e = 1f64.exp();
    let exact = [p[0], p[1] * e, p[2] * e];
    let errors = [0.2, 0.1, 0.05]
        .iter()
        .map(|&h| flow_endpoint(&ch, &z, &p, 0.0, 1.0, h).map(|end| max_abs_diff(&end.point, &exact)))
        .collect::<Result<Vec<_>>>()?;
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let worst = orders.iter().map(|o| (o - 4.0).abs()).fold(0.0, f64::max);
    rec.bound("rk4-order:z", worst, 0.3, format!("observed orders {orders:.3?}"));

    let ch = chart(&c.chart)?;
    let h = hamiltonian(&c.hamiltonian, &ch)?;
    let mut rng = stream(cfg.seed, 21);
    let mut worst = 0.0f64;
    for _ in 0..c.contact_samples {
        let p = ch.sample_point(&mut rng, 1.0);
        worst = worst.max(verify_contactomorphism(&ch, &h, &p, c.time, c.fd_step, c.contact_tol)?.residual);
    }
    rec.bound(
        format!("contactomorphism:{}", h.label()),
        worst,
        c.contact_tol,
        format!("phi^* alpha = e^g alpha at {} points, t = {}", c.contact_samples, c.time),
    );
    Ok(rec.finish(cfg))
}

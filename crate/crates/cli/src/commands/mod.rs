//! One module per subcommand; each turns a config into a `RunReport`.

pub mod brackets;
pub mod coisotropy;
pub mod flows;
pub mod lifts;
pub mod norms;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use contactlab::dynamics::{Polynomial, ScalarField};
use contactlab::{ContactChart, Result};

/// Named builtin, optionally prefixed with `t*` for the time-dependent `t H`.
pub fn hamiltonian(spec: &str, chart: &ContactChart) -> Result<ScalarField> {
    match spec.trim().strip_prefix("t*") {
        Some(rest) => {
            let h = ScalarField::builtin(rest, chart)?;
            let support = h.support().cloned();
            let g = h.clone();
            let mut f = ScalarField::from_time_fn(h.dim(), move |t, p| t * h.value(0.0, p))
                .with_gradient(move |t, p, out| {
                    g.gradient_into(0.0, p, out);
                    out.iter_mut().for_each(|v| *v *= t);
                })
                .with_label(format!("t*{}", rest.trim()));
            if let Some(b) = support {
                f = f.with_support(b);
            }
            Ok(f)
        }
        None => ScalarField::builtin(spec, chart),
    }
}

pub fn chart(spec: &str) -> Result<ContactChart> {
    spec.parse()
}

/// Independent stream per suite so adding a suite leaves the others unchanged.
pub fn stream(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}

pub fn poly(dim: usize, degree: u32, scale: f64, rng: &mut ChaCha8Rng) -> ScalarField {
    ScalarField::polynomial(Polynomial::random(dim, degree, scale, rng))
}

//! Subcommand implementations. Each returns a process exit code: 0 for
//! success, 2 when a verification suite finds a counterexample; usage and
//! input errors surface as `anyhow` errors and exit 1.

pub mod conjugate;
pub mod kernel;
pub mod modp;
pub mod scan_family;
pub mod semicont;
pub mod verify;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use jetkernel_core::field::FieldSpec;
use jetkernel_core::multiindex::monomials_up_to;
use jetkernel_core::poly::Poly;

/// A seeded random polynomial of degree `<= max_degree` with integer
/// coefficients in `[-bound, bound]`; resampled until nonzero.
pub(crate) fn random_nonzero_poly(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    max_degree: usize,
    bound: i64,
) -> Poly {
    let q = FieldSpec::Rationals;
    let monos = monomials_up_to(nvars, max_degree);
    loop {
        let k = rng.gen_range(1..=4usize);
        let terms: Vec<_> = (0..k)
            .map(|_| {
                let index = monos[rng.gen_range(0..monos.len())].clone();
                (index, q.integer(rng.gen_range(-bound..=bound)))
            })
            .collect();
        let p = Poly::from_terms(nvars, q, terms).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

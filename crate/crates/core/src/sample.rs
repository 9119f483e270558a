//! Seeded random polynomial generators for the verification suites.
//!
//! Coefficients are small nonzero rationals so products stay readable and
//! exact arithmetic stays cheap.

use rand::Rng;

use crate::coeff::{coeff_rat, Coeff};
use crate::poly::{nvars, Polynomial, Var};

fn random_coeff<R: Rng>(rng: &mut R) -> Coeff {
    let num = loop {
        let n = rng.gen_range(-3i64..=3);
        if n != 0 {
            break n;
        }
    };
    let den = rng.gen_range(1i64..=2);
    coeff_rat(num, den)
}

/// Random polynomial of total degree at most `max_degree`.
///
/// `allow_p0` controls whether the momentum conjugate to time may occur;
/// functions on `V*Q` are generated with `allow_p0 = false`.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_degree: u32,
    allow_p0: bool,
) -> Polynomial {
    let n = nvars(dim);
    let p0_idx = dim + 1;
    let nterms = rng.gen_range(1..=4);
    let mut out = Polynomial::zero(dim);
    for _ in 0..nterms {
        let mut exps = vec![0u32; n];
        let degree = rng.gen_range(0..=max_degree);
        for _ in 0..degree {
            let mut j = rng.gen_range(0..n);
            if !allow_p0 && j == p0_idx {
                j = 0;
            }
            exps[j] += 1;
        }
        out = &out + &Polynomial::monomial(dim, exps, random_coeff(rng));
    }
    out
}

/// Random element of the vertical-affine quantum algebra:
/// `a^k(t,q) p_k + b(t,q)` with total momentum degree at most 1.
pub fn random_vertical_affine<R: Rng>(rng: &mut R, dim: usize, coeff_degree: u32) -> Polynomial {
    let mut out = random_config_poly(rng, dim, coeff_degree);
    for k in 1..=dim {
        if rng.gen_bool(0.7) {
            let a = random_config_poly(rng, dim, coeff_degree);
            out = &out + &(&a * &Polynomial::var(dim, Var::P(k)));
        }
    }
    out
}

/// Random polynomial in `(t, q)` only.
pub fn random_config_poly<R: Rng>(rng: &mut R, dim: usize, max_degree: u32) -> Polynomial {
    let nterms = rng.gen_range(1..=3);
    let mut out = Polynomial::zero(dim);
    for _ in 0..nterms {
        let mut exps = vec![0u32; nvars(dim)];
        let degree = rng.gen_range(0..=max_degree);
        for _ in 0..degree {
            let j = rng.gen_range(0..=dim); // t or one of the q^k
            exps[j] += 1;
        }
        out = &out + &Polynomial::monomial(dim, exps, random_coeff(rng));
    }
    out
}

/// Random real quadratic Hamiltonian
/// `a^{jk}(t,q) p_j p_k + b^k(t,q) p_k + c(t,q)` on `V*Q`.
pub fn random_quadratic<R: Rng>(rng: &mut R, dim: usize, coeff_degree: u32) -> Polynomial {
    let mut out = random_vertical_affine(rng, dim, coeff_degree);
    for j in 1..=dim {
        for k in j..=dim {
            if rng.gen_bool(0.6) {
                let a = random_config_poly(rng, dim, coeff_degree);
                let pj = Polynomial::var(dim, Var::P(j));
                let pk = Polynomial::var(dim, Var::P(k));
                out = &out + &(&(&a * &pj) * &pk);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_domains() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let f = random_poly(&mut rng, 2, 3, false);
            assert_eq!(f.degree_in(Var::P0), 0);
            let a = random_vertical_affine(&mut rng, 2, 3);
            assert!(a.momentum_degree() <= 1);
            let h = random_quadratic(&mut rng, 2, 2);
            assert!(h.momentum_degree() <= 2);
            assert_eq!(h.degree_in(Var::P0), 0);
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            assert_eq!(random_poly(&mut a, 1, 3, true), random_poly(&mut b, 1, 3, true));
        }
    }
}

//! Exact complex-rational coefficient arithmetic.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rat = BigRational;

/// Exact complex rational, the coefficient field of every polynomial and
/// operator in the symbolic layer. No rounding happens anywhere in it.
pub type Coeff = Complex<Rat>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn coeff_int(n: i64) -> Coeff {
    Coeff::new(rat(n, 1), Rat::zero())
}

pub fn coeff_rat(n: i64, d: i64) -> Coeff {
    Coeff::new(rat(n, d), Rat::zero())
}

/// The imaginary unit `i`.
pub fn coeff_i() -> Coeff {
    Coeff::new(Rat::zero(), Rat::one())
}

/// `-i`, the unit that multiplies every Hamiltonian vector field on
/// quantization.
pub fn coeff_minus_i() -> Coeff {
    Coeff::new(Rat::zero(), -Rat::one())
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // BigRational has no direct f64 conversion that survives huge
    // numerators; go through a quotient with 30 digits of headroom.
    let num = r.numer();
    let den = r.denom();
    bigint_to_f64(num) / bigint_to_f64(den)
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    let s = x.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

pub fn coeff_to_c64(c: &Coeff) -> num_complex::Complex64 {
    num_complex::Complex64::new(rat_to_f64(&c.re), rat_to_f64(&c.im))
}

/// Renders a real rational in the expression grammar (`3`, `-3/2`).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

//! Exact multivariate polynomials over the fixed variable list
//! `(t, q^1..q^m, p_0, p_1..p_m)`.
//!
//! The variable ordering is fixed once per dimension `m`: index `0` is `t`,
//! indices `1..=m` are the fibre coordinates `q^k`, index `m+1` is `p_0`
//! (the momentum conjugate to time), and indices `m+2..=2m+1` are `p_k`.
//! `p_0` is present even for functions on `V*Q`, which simply never use it,
//! so one polynomial type serves both `C^inf(V*Q)` and `C^inf(T*Q)`.
//!
//! Terms are stored in a map keyed by packed exponent vectors; a stored term
//! never has a zero coefficient, so structural equality is canonical
//! equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::coeff::{coeff_to_c64, format_rat, Coeff, Rat};
use crate::error::Error;

/// A named coordinate on the homogeneous phase space `T*Q`.
///
/// `Q(k)` and `P(k)` are 1-based: `Var::Q(1)` is `q1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    /// Time `t` (= `q^0`).
    T,
    /// Fibre coordinate `q^k`, `k = 1..=m`.
    Q(usize),
    /// Momentum `p_0 = p` conjugate to time.
    P0,
    /// Momentum `p_k`, `k = 1..=m`.
    P(usize),
}

impl Var {
    /// Position of this variable in the exponent vector for dimension `m`.
    pub fn index(self, dim: usize) -> usize {
        match self {
            Var::T => 0,
            Var::Q(k) => {
                assert!(k >= 1 && k <= dim, "q index out of range");
                k
            }
            Var::P0 => dim + 1,
            Var::P(k) => {
                assert!(k >= 1 && k <= dim, "p index out of range");
                dim + 1 + k
            }
        }
    }

    pub fn from_index(i: usize, dim: usize) -> Var {
        assert!(i < 2 * dim + 2);
        if i == 0 {
            Var::T
        } else if i <= dim {
            Var::Q(i)
        } else if i == dim + 1 {
            Var::P0
        } else {
            Var::P(i - dim - 1)
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::T => "t".to_string(),
            Var::Q(k) => format!("q{k}"),
            Var::P0 => "p0".to_string(),
            Var::P(k) => format!("p{k}"),
        }
    }

    pub fn is_momentum(self) -> bool {
        matches!(self, Var::P0 | Var::P(_))
    }
}

/// Number of variables for fibre dimension `m`.
pub fn nvars(dim: usize) -> usize {
    2 * dim + 2
}

/// Exact multivariate polynomial with complex-rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Coeff>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "fibre dimension must be positive");
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Coeff) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars(dim)], c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Coeff::one())
    }

    pub fn var(dim: usize, v: Var) -> Self {
        let mut exps = vec![0u32; nvars(dim)];
        exps[v.index(dim)] = 1;
        Self::monomial(dim, exps, Coeff::one())
    }

    pub fn monomial(dim: usize, exps: Vec<u32>, c: Coeff) -> Self {
        assert_eq!(exps.len(), nvars(dim));
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The constant term.
    pub fn constant_term(&self) -> Coeff {
        self.terms
            .get(&vec![0; nvars(self.dim)])
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    fn insert(&mut self, exps: Vec<u32>, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn assert_same_dim(&self, other: &Polynomial) {
        assert_eq!(
            self.dim, other.dim,
            "polynomial dimension mismatch: {} vs {}",
            self.dim, other.dim
        );
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.dim);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Complex conjugation of the coefficients (the variables are real).
    pub fn conj(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a.conj());
        }
        out
    }

    /// Exact partial derivative with respect to `v`.
    pub fn diff(&self, v: Var) -> Polynomial {
        let idx = v.index(self.dim);
        let mut out = Polynomial::zero(self.dim);
        for (e, a) in &self.terms {
            let k = e[idx];
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] = k - 1;
            let factor = Coeff::new(Rat::from_integer(k.into()), Rat::zero());
            out.insert(ne, a.clone() * factor);
        }
        out
    }

    /// Floating evaluation at a real point `(t, q^1.., p_0, p_1..)`.
    ///
    /// Direct monomial summation: each term contributes
    /// `coeff * prod_j point[j]^exps[j]` (powers via `f64::powi`).
    pub fn eval(&self, point: &[f64]) -> Result<Complex64, Error> {
        let n = nvars(self.dim);
        if point.len() != n {
            return Err(Error::PointLength {
                got: point.len(),
                expected: n,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, a) in &self.terms {
            let mut mono = 1.0f64;
            for (x, &k) in point.iter().zip(e.iter()) {
                if k > 0 {
                    mono *= x.powi(k as i32);
                }
            }
            acc += coeff_to_c64(a) * mono;
        }
        Ok(acc)
    }

    /// Total degree of the polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, v: Var) -> u32 {
        let idx = v.index(self.dim);
        self.terms.keys().map(|e| e[idx]).max().unwrap_or(0)
    }

    /// Maximal total degree in the momentum variables `(p_0, p_1..p_m)`.
    pub fn momentum_degree(&self) -> u32 {
        let first = self.dim + 1;
        self.terms
            .keys()
            .map(|e| e[first..].iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// True if no momentum variable (including `p_0`) occurs.
    pub fn is_momentum_free(&self) -> bool {
        self.momentum_degree() == 0
    }

    /// Splits into momentum monomials: maps each exponent vector over
    /// `(p_0, p_1..p_m)` to its coefficient polynomial in `(t, q)`.
    pub fn split_by_momenta(&self) -> BTreeMap<Vec<u32>, Polynomial> {
        let first = self.dim + 1;
        let mut out: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
        for (e, a) in &self.terms {
            let pexp = e[first..].to_vec();
            let mut base = e.clone();
            for x in &mut base[first..] {
                *x = 0;
            }
            out.entry(pexp)
                .or_insert_with(|| Polynomial::zero(self.dim))
                .insert(base, a.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Exact composition with a per-variable affine map.
    ///
    /// `map[j]` replaces variable `j`; every entry must be affine (total
    /// degree at most 1). Used for frame changes such as `q -> q - v t`.
    pub fn substitute_affine(&self, map: &[Polynomial]) -> Result<Polynomial, Error> {
        let n = nvars(self.dim);
        if map.len() != n {
            return Err(Error::PointLength {
                got: map.len(),
                expected: n,
            });
        }
        for (j, s) in map.iter().enumerate() {
            if s.dim != self.dim {
                return Err(Error::DimensionMismatch(s.dim, self.dim));
            }
            if s.total_degree() > 1 {
                return Err(Error::NonAffineSubstitution(
                    Var::from_index(j, self.dim).name(),
                ));
            }
        }
        let mut out = Polynomial::zero(self.dim);
        for (e, a) in &self.terms {
            let mut mono = Polynomial::constant(self.dim, a.clone());
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    mono = &mono * &map[j].pow(k);
                }
            }
            out = &out + &mono;
        }
        Ok(out)
    }

    /// The identity substitution map, convenient as a starting point for
    /// frame changes.
    pub fn identity_map(dim: usize) -> Vec<Polynomial> {
        (0..nvars(dim))
            .map(|j| Polynomial::var(dim, Var::from_index(j, dim)))
            .collect()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_dim(rhs);
        let mut out = self.clone();
        for (e, a) in &rhs.terms {
            out.insert(e.clone(), a.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_dim(rhs);
        let mut out = self.clone();
        for (e, a) in &rhs.terms {
            out.insert(e.clone(), -a.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_dim(rhs);
        let mut out = Polynomial::zero(self.dim);
        for (ea, a) in &self.terms {
            for (eb, b) in &rhs.terms {
                let exps: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.insert(exps, a.clone() * b.clone());
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), -a.clone());
        }
        out
    }
}

impl fmt::Display for Polynomial {
    /// Canonical printed form, reparseable for real-rational coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, a) in &self.terms {
            let (sign, mag) = coeff_sign_mag(a);
            if first {
                if sign {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let vars = format_mono(e, self.dim);
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{vars}")?;
            } else {
                write!(f, "{mag}*{vars}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[m={}]({})", self.dim, self)
    }
}

/// Splits a coefficient into a leading sign and a magnitude string.
/// Real rationals render in the expression grammar; proper complex
/// coefficients render as `(re+im*i)` for display only.
fn coeff_sign_mag(c: &Coeff) -> (bool, String) {
    if c.im.is_zero() {
        let neg = c.re < Rat::zero();
        let mag = if neg { -c.re.clone() } else { c.re.clone() };
        (neg, format_rat(&mag))
    } else if c.re.is_zero() {
        let neg = c.im < Rat::zero();
        let mag = if neg { -c.im.clone() } else { c.im.clone() };
        let m = format_rat(&mag);
        (neg, if m == "1" { "i".to_string() } else { format!("{m}*i") })
    } else {
        (
            false,
            format!("({}+{}*i)", format_rat(&c.re), format_rat(&c.im)),
        )
    }
}

fn format_mono(exps: &[u32], dim: usize) -> String {
    let mut parts = Vec::new();
    for (j, &k) in exps.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let name = Var::from_index(j, dim).name();
        if k == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{k}"));
        }
    }
    parts.join("*")
}

//! Normal-ordered linear differential operators.
//!
//! An operator is a finite sum `sum_alpha c_alpha * d^alpha` with polynomial
//! coefficients and all derivatives to the right of all multiplications
//! (normal order). The derivative multi-index runs over a declared variable
//! set: configuration variables `(t, q^k)` for Schrödinger operators, the
//! full phase-space variables for prequantum operators.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::coeff::{coeff_int, Coeff};
use crate::error::Error;
use crate::poly::{Polynomial, Var};

/// The variable set a differential operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarSet {
    /// Configuration space: derivatives in `(t, q^1..q^m)`; coefficients
    /// must be momentum-free.
    ConfigSpace,
    /// Full phase space `T*Q`: derivatives in `(t, q^k, p_0, p_k)`.
    PhaseSpaceT,
    /// Vertical phase space `V*Q`: derivatives in `(t, q^k, p_k)`.
    PhaseSpaceV,
}

impl VarSet {
    /// The ordered derivative-variable list for fibre dimension `m`.
    pub fn deriv_vars(self, dim: usize) -> Vec<Var> {
        let mut vars = vec![Var::T];
        vars.extend((1..=dim).map(Var::Q));
        match self {
            VarSet::ConfigSpace => {}
            VarSet::PhaseSpaceT => {
                vars.push(Var::P0);
                vars.extend((1..=dim).map(Var::P));
            }
            VarSet::PhaseSpaceV => {
                vars.extend((1..=dim).map(Var::P));
            }
        }
        vars
    }

    pub fn len(self, dim: usize) -> usize {
        match self {
            VarSet::ConfigSpace => dim + 1,
            VarSet::PhaseSpaceT => 2 * dim + 2,
            VarSet::PhaseSpaceV => 2 * dim + 1,
        }
    }
}

/// A normal-ordered differential operator with exact polynomial
/// coefficients; zero coefficients are pruned so structural equality is
/// canonical equality.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffOperator {
    dim: usize,
    varset: VarSet,
    terms: BTreeMap<Vec<u32>, Polynomial>,
}

impl DiffOperator {
    pub fn zero(dim: usize, varset: VarSet) -> Self {
        DiffOperator {
            dim,
            varset,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize, varset: VarSet) -> Self {
        Self::multiplication(Polynomial::one(dim), varset).expect("constant is momentum-free")
    }

    /// The multiplication operator by a polynomial.
    pub fn multiplication(c: Polynomial, varset: VarSet) -> Result<Self, Error> {
        let dim = c.dim();
        let mut op = Self::zero(dim, varset);
        op.add_term(vec![0; varset.len(dim)], c)?;
        Ok(op)
    }

    /// The bare derivative `d/dv`.
    pub fn derivative(dim: usize, varset: VarSet, v: Var) -> Self {
        let mut op = Self::zero(dim, varset);
        let mut alpha = vec![0u32; varset.len(dim)];
        alpha[deriv_index(varset, dim, v)] = 1;
        op.terms.insert(alpha, Polynomial::one(dim));
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn varset(&self) -> VarSet {
        self.varset
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Polynomial)> {
        self.terms.iter()
    }

    /// Maximal total derivative order.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|a| a.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// True if any term differentiates with respect to `t`.
    pub fn contains_dt(&self) -> bool {
        self.terms.keys().any(|a| a[0] > 0)
    }

    /// Coefficient of the derivative multi-index `alpha` (zero if absent).
    pub fn coefficient(&self, alpha: &[u32]) -> Polynomial {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    fn add_term(&mut self, alpha: Vec<u32>, c: Polynomial) -> Result<(), Error> {
        if c.is_zero() {
            return Ok(());
        }
        if self.varset == VarSet::ConfigSpace && !c.is_momentum_free() {
            return Err(Error::MomentumInCoefficient);
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    /// Builds an operator from `(multi-index, coefficient)` pairs.
    pub fn from_terms(
        dim: usize,
        varset: VarSet,
        terms: impl IntoIterator<Item = (Vec<u32>, Polynomial)>,
    ) -> Result<Self, Error> {
        let mut op = Self::zero(dim, varset);
        for (alpha, c) in terms {
            assert_eq!(alpha.len(), varset.len(dim));
            op.add_term(alpha, c)?;
        }
        Ok(op)
    }

    /// A term `c * d/dv` convenience constructor.
    pub fn first_order(c: Polynomial, varset: VarSet, v: Var) -> Result<Self, Error> {
        let dim = c.dim();
        let mut alpha = vec![0u32; varset.len(dim)];
        alpha[deriv_index(varset, dim, v)] = 1;
        Self::from_terms(dim, varset, [(alpha, c)])
    }

    pub fn add(&self, other: &DiffOperator) -> Result<DiffOperator, Error> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOperator) -> Result<DiffOperator, Error> {
        self.add(&other.scale(&coeff_int(-1)))
    }

    pub fn scale(&self, c: &Coeff) -> DiffOperator {
        let mut out = DiffOperator::zero(self.dim, self.varset);
        if num_traits::Zero::is_zero(c) {
            return out;
        }
        for (a, p) in &self.terms {
            out.terms.insert(a.clone(), p.scale(c));
        }
        out
    }

    /// Left-multiplies every coefficient by a polynomial.
    pub fn premultiply(&self, c: &Polynomial) -> Result<DiffOperator, Error> {
        let mut out = DiffOperator::zero(self.dim, self.varset);
        for (a, p) in &self.terms {
            out.add_term(a.clone(), c * p)?;
        }
        Ok(out)
    }

    /// Differentiates every coefficient with respect to `v` (the commutator
    /// with the flat derivative `d/dv`).
    pub fn diff_coefficients(&self, v: Var) -> DiffOperator {
        let mut out = DiffOperator::zero(self.dim, self.varset);
        for (a, p) in &self.terms {
            out.add_term(a.clone(), p.diff(v))
                .expect("differentiation preserves the coefficient domain");
        }
        out
    }

    fn check_compatible(&self, other: &DiffOperator) -> Result<(), Error> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.varset != other.varset {
            return Err(Error::VarSetMismatch);
        }
        Ok(())
    }

    /// Exact normal-ordered product via the iterated Leibniz expansion
    /// `d^alpha (c psi) = sum_{beta <= alpha} binom(alpha,beta)
    /// (d^beta c) d^{alpha-beta} psi`.
    pub fn compose(&self, other: &DiffOperator) -> Result<DiffOperator, Error> {
        self.check_compatible(other)?;
        let vars = self.varset.deriv_vars(self.dim);
        let mut out = DiffOperator::zero(self.dim, self.varset);
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                for (gamma, binom) in sub_multi_indices(alpha) {
                    // coefficient: a * binom(alpha,gamma) * d^gamma(b)
                    let mut db = b.clone();
                    for (j, &g) in gamma.iter().enumerate() {
                        for _ in 0..g {
                            db = db.diff(vars[j]);
                        }
                    }
                    if db.is_zero() {
                        continue;
                    }
                    let coeff = a.scale(&coeff_int(binom));
                    let idx: Vec<u32> = alpha
                        .iter()
                        .zip(gamma.iter())
                        .zip(beta.iter())
                        .map(|((x, g), y)| x - g + y)
                        .collect();
                    out.add_term(idx, &coeff * &db)?;
                }
            }
        }
        Ok(out)
    }

    /// The commutator `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &DiffOperator) -> Result<DiffOperator, Error> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Exact formal adjoint for the half-density pairing:
    /// `(c d^alpha)^dagger = (-1)^{|alpha|} d^alpha o conj(c)`,
    /// re-normal-ordered. Involutive; reverses products. Defined for
    /// configuration-space operators only.
    pub fn formal_adjoint(&self) -> Result<DiffOperator, Error> {
        if self.varset != VarSet::ConfigSpace {
            return Err(Error::NotConfigSpace);
        }
        let mut out = DiffOperator::zero(self.dim, self.varset);
        for (alpha, c) in &self.terms {
            let order: u32 = alpha.iter().sum();
            let sign = if order % 2 == 0 { 1 } else { -1 };
            // d^alpha as a bare operator, composed with conj(c)
            let mut deriv = DiffOperator::zero(self.dim, self.varset);
            deriv.terms.insert(alpha.clone(), Polynomial::one(self.dim));
            let mult = DiffOperator::multiplication(c.conj(), self.varset)?;
            let term = deriv.compose(&mult)?.scale(&coeff_int(sign));
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Substitutes `t = t0` (exact rational) into every coefficient.
    /// Realizes the restriction of an instantwise operator to a time slice.
    pub fn at_time(&self, t0: &Coeff) -> Result<DiffOperator, Error> {
        let mut map = Polynomial::identity_map(self.dim);
        map[0] = Polynomial::constant(self.dim, t0.clone());
        let mut out = DiffOperator::zero(self.dim, self.varset);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.substitute_affine(&map)?)?;
        }
        Ok(out)
    }
}

fn deriv_index(varset: VarSet, dim: usize, v: Var) -> usize {
    varset
        .deriv_vars(dim)
        .iter()
        .position(|&u| u == v)
        .unwrap_or_else(|| panic!("{} is not a derivative variable of {varset:?}", v.name()))
}

/// All multi-indices `gamma <= alpha` together with the product of
/// componentwise binomial coefficients `binom(alpha, gamma)`.
fn sub_multi_indices(alpha: &[u32]) -> Vec<(Vec<u32>, i64)> {
    let mut acc: Vec<(Vec<u32>, i64)> = vec![(Vec::new(), 1)];
    for &a in alpha {
        let mut next = Vec::with_capacity(acc.len() * (a as usize + 1));
        for (prefix, coeff) in &acc {
            for g in 0..=a {
                let mut v = prefix.clone();
                v.push(g);
                next.push((v, coeff * binomial(a, g)));
            }
        }
        acc = next;
    }
    acc
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut num = num_bigint::BigInt::one();
    let mut den = num_bigint::BigInt::one();
    for j in 0..k {
        num *= n - j;
        den *= j + 1;
    }
    let q = num / den;
    i64::try_from(&q).expect("binomial fits i64 for the orders in play")
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars = self.varset.deriv_vars(self.dim);
        let mut first = true;
        for (alpha, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut dpart = String::new();
            for (j, &k) in alpha.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !dpart.is_empty() {
                    dpart.push(' ');
                }
                if k == 1 {
                    dpart.push_str(&format!("d_{}", vars[j].name()));
                } else {
                    dpart.push_str(&format!("d_{}^{}", vars[j].name(), k));
                }
            }
            if dpart.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c}) {dpart}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOperator[{:?}]({})", self.varset, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{coeff_int, coeff_minus_i};
    use crate::parse::poly_parse;

    fn dq1(varset: VarSet) -> DiffOperator {
        DiffOperator::derivative(1, varset, Var::Q(1))
    }

    #[test]
    fn single_leibniz_step() {
        // d_q1 o (q1 . ) = q1 d_q1 + 1
        let mult = DiffOperator::multiplication(poly_parse("q1", 1).unwrap(), VarSet::ConfigSpace)
            .unwrap();
        let got = dq1(VarSet::ConfigSpace).compose(&mult).unwrap();
        let expect = DiffOperator::from_terms(
            1,
            VarSet::ConfigSpace,
            [
                (vec![0, 1], poly_parse("q1", 1).unwrap()),
                (vec![0, 0], poly_parse("1", 1).unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn identity_is_neutral() {
        let id = DiffOperator::identity(1, VarSet::ConfigSpace);
        let a = dq1(VarSet::ConfigSpace)
            .premultiply(&poly_parse("t*q1", 1).unwrap())
            .unwrap();
        assert_eq!(id.compose(&a).unwrap(), a);
        assert_eq!(a.compose(&id).unwrap(), a);
    }

    #[test]
    fn momentum_operator_squares() {
        // (-i d_q1)^2 = -d_q1^2
        let p = dq1(VarSet::ConfigSpace).scale(&coeff_minus_i());
        let got = p.compose(&p).unwrap();
        let expect = DiffOperator::from_terms(
            1,
            VarSet::ConfigSpace,
            [(vec![0, 2], poly_parse("-1", 1).unwrap())],
        )
        .unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn canonical_commutator() {
        // [-i d_q1, q1] = -i
        let p = dq1(VarSet::ConfigSpace).scale(&coeff_minus_i());
        let q = DiffOperator::multiplication(poly_parse("q1", 1).unwrap(), VarSet::ConfigSpace)
            .unwrap();
        let got = p.commutator(&q).unwrap();
        let expect = DiffOperator::identity(1, VarSet::ConfigSpace).scale(&coeff_minus_i());
        assert_eq!(got, expect);
    }

    #[test]
    fn trivial_commutators() {
        let a = dq1(VarSet::ConfigSpace)
            .premultiply(&poly_parse("t + q1^2", 1).unwrap())
            .unwrap();
        assert!(a.commutator(&a).unwrap().is_zero());
        let dt = DiffOperator::derivative(1, VarSet::ConfigSpace, Var::T);
        assert!(dq1(VarSet::ConfigSpace).commutator(&dt).unwrap().is_zero());
    }

    #[test]
    fn adjoint_examples() {
        // (-i d_q1)^dagger = -i d_q1
        let p = dq1(VarSet::ConfigSpace).scale(&coeff_minus_i());
        assert_eq!(p.formal_adjoint().unwrap(), p);
        // multiplication by a real polynomial is symmetric
        let q = DiffOperator::multiplication(poly_parse("q1", 1).unwrap(), VarSet::ConfigSpace)
            .unwrap();
        assert_eq!(q.formal_adjoint().unwrap(), q);
        // a bare first derivative flips sign
        let d = dq1(VarSet::ConfigSpace);
        assert_eq!(d.formal_adjoint().unwrap(), d.scale(&coeff_int(-1)));
        // adjoint of a phase-space operator is rejected
        assert!(dq1(VarSet::PhaseSpaceV).formal_adjoint().is_err());
    }

    #[test]
    fn adjoint_is_involutive_antihomomorphism() {
        use crate::sample::random_config_poly;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..50 {
            let a = DiffOperator::from_terms(
                2,
                VarSet::ConfigSpace,
                [
                    (vec![0, 1, 0], random_config_poly(&mut rng, 2, 2)),
                    (vec![0, 0, 2], random_config_poly(&mut rng, 2, 2)),
                    (vec![0, 0, 0], random_config_poly(&mut rng, 2, 2)),
                ],
            )
            .unwrap();
            let b = DiffOperator::from_terms(
                2,
                VarSet::ConfigSpace,
                [
                    (vec![1, 0, 0], random_config_poly(&mut rng, 2, 2)),
                    (vec![0, 1, 1], random_config_poly(&mut rng, 2, 2)),
                ],
            )
            .unwrap();
            let a_dd = a.formal_adjoint().unwrap().formal_adjoint().unwrap();
            assert_eq!(a_dd, a);
            let lhs = a.compose(&b).unwrap().formal_adjoint().unwrap();
            let rhs = b
                .formal_adjoint()
                .unwrap()
                .compose(&a.formal_adjoint().unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn compose_is_associative() {
        use crate::sample::random_poly;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        for _ in 0..30 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                DiffOperator::from_terms(
                    1,
                    VarSet::PhaseSpaceT,
                    [
                        (vec![0, 1, 0, 0], random_poly(rng, 1, 2, true)),
                        (vec![0, 0, 0, 1], random_poly(rng, 1, 2, true)),
                        (vec![0, 0, 0, 0], random_poly(rng, 1, 2, true)),
                    ],
                )
                .unwrap()
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let c = mk(&mut rng);
            let lhs = a.compose(&b).unwrap().compose(&c).unwrap();
            let rhs = a.compose(&b.compose(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn varset_mismatch_is_rejected() {
        let a = dq1(VarSet::ConfigSpace);
        let b = dq1(VarSet::PhaseSpaceV);
        assert!(matches!(a.compose(&b), Err(Error::VarSetMismatch)));
    }

    #[test]
    fn config_space_rejects_momentum_coefficients() {
        assert!(matches!(
            DiffOperator::multiplication(poly_parse("p1", 1).unwrap(), VarSet::ConfigSpace),
            Err(Error::MomentumInCoefficient)
        ));
    }
}

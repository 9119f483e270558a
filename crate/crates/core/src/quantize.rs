//! The quantization maps and the Dirac defect.
//!
//! Three maps are provided (`hbar = 1` throughout):
//!
//! * prequantization on `T*Q`: `f -> -i theta_f + (f - p_lambda d^lambda f)`,
//!   a first-order operator on phase-space functions;
//! * prequantization on `V*Q`: the same formula with the time direction
//!   dropped;
//! * the Schrödinger representation on half-densities over configuration
//!   space, `a^lambda p_lambda + b -> -i a^lambda d_lambda
//!   - (i/2) d_lambda(a^lambda) + b`, whose second term is the metaplectic
//!   correction making real observables formally self-adjoint.
//!
//! Quadratic Hamiltonians are ordered in divergence form
//! `-d_j o a^{jk} o d_k`, which is formally self-adjoint for real
//! coefficients without further correction terms. The Dirac condition
//! `[f^, g^] = -i {f,g}^` holds exactly at the prequantum level and on the
//! vertical-affine algebra; `dirac_defect` returns the obstruction operator
//! so the failure beyond that domain is measurable rather than hidden.

use crate::coeff::{coeff_i, coeff_minus_i, coeff_rat, Coeff};
use crate::error::Error;
use crate::operator::{DiffOperator, VarSet};
use crate::poisson::{bracket_t, bracket_v, PhaseFunction, Space};
use crate::poly::{Polynomial, Var};

/// Selector for the quantization map used by [`dirac_defect`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantizationMap {
    PrequantT,
    PrequantV,
    Schrodinger,
}

/// Kostant–Souriau prequantization on `T*Q`:
/// `f^ = -i theta_f + (f - p_lambda d^lambda f)`.
pub fn prequantize_t(f: &PhaseFunction) -> DiffOperator {
    let f = f.lift_to_tq();
    let dim = f.dim();
    let poly = f.poly();
    let pairs: Vec<(Var, Var)> = std::iter::once((Var::T, Var::P0))
        .chain((1..=dim).map(|k| (Var::Q(k), Var::P(k))))
        .collect();
    prequantize_with(poly, VarSet::PhaseSpaceT, &pairs)
}

/// Prequantization of the Poisson manifold `V*Q`:
/// `f^ = -i (d^k f d_k - d_k f d^k) + (f - p_k d^k f)`.
///
/// Agrees with `prequantize_t` of the lifted function once the absent
/// `d^0` direction is dropped.
pub fn prequantize_v(f: &PhaseFunction) -> Result<DiffOperator, Error> {
    if f.space() != Space::OnVQ {
        return Err(Error::SpaceMismatch("prequantize_v expects V*Q".into()));
    }
    let dim = f.dim();
    let pairs: Vec<(Var, Var)> = (1..=dim).map(|k| (Var::Q(k), Var::P(k))).collect();
    Ok(prequantize_with(f.poly(), VarSet::PhaseSpaceV, &pairs))
}

fn prequantize_with(poly: &Polynomial, varset: VarSet, pairs: &[(Var, Var)]) -> DiffOperator {
    let dim = poly.dim();
    let mut op = DiffOperator::zero(dim, varset);
    let mut order0 = poly.clone();
    for &(qv, pv) in pairs {
        let up = poly.diff(pv); // d^lambda f
        let dn = poly.diff(qv); // d_lambda f
        let along_q = DiffOperator::first_order(up.scale(&coeff_minus_i()), varset, qv)
            .expect("phase-space coefficients are unrestricted");
        let along_p = DiffOperator::first_order(dn.scale(&coeff_i()), varset, pv)
            .expect("phase-space coefficients are unrestricted");
        op = op.add(&along_q).unwrap().add(&along_p).unwrap();
        let p_var = Polynomial::var(dim, pv);
        order0 = &order0 - &(&p_var * &up);
    }
    op.add(&DiffOperator::multiplication(order0, varset).unwrap())
        .unwrap()
}

/// The Schrödinger representation on half-densities:
/// `f = a^lambda(t,q) p_lambda + b(t,q)` maps to
/// `-i a^lambda d_lambda - (i/2) d_lambda(a^lambda) + b` on configuration
/// space. On `T*Q` the `a^0 p_0` term contributes `-i a^0 d_t`.
pub fn schrodinger_quantize(f: &PhaseFunction) -> Result<DiffOperator, Error> {
    let deg = f.poly().momentum_degree();
    if deg > 1 {
        return Err(Error::MomentumDegree { found: deg, max: 1 });
    }
    let dim = f.dim();
    let mut op = DiffOperator::zero(dim, VarSet::ConfigSpace);
    for (pexp, coeff) in f.poly().split_by_momenta() {
        let total: u32 = pexp.iter().sum();
        if total == 0 {
            // b term: plain multiplication
            op = op.add(&DiffOperator::multiplication(coeff, VarSet::ConfigSpace)?)?;
            continue;
        }
        // a^lambda term: lambda = 0 is p_0 (direction t), lambda = k is p_k
        let lambda = pexp.iter().position(|&e| e == 1).unwrap();
        let direction = if lambda == 0 { Var::T } else { Var::Q(lambda) };
        let deriv = DiffOperator::first_order(coeff.scale(&coeff_minus_i()), VarSet::ConfigSpace, direction)?;
        let metaplectic = DiffOperator::multiplication(
            coeff.diff(direction).scale(&coeff_rat_i(-1, 2)),
            VarSet::ConfigSpace,
        )?;
        op = op.add(&deriv)?.add(&metaplectic)?;
    }
    Ok(op)
}

fn coeff_rat_i(n: i64, d: i64) -> Coeff {
    coeff_i() * coeff_rat(n, d)
}

/// Divergence-form quantization of a quadratic Hamiltonian
/// `H = a^{jk}(t,q) p_j p_k + b^k(t,q) p_k + c(t,q)` on `V*Q`:
///
/// `H^ = -d_j o a^{jk} o d_k - (i/2)(b^k d_k + d_k o b^k) + c`,
///
/// normal-ordered. Formally self-adjoint for real coefficients; the affine
/// part reduces exactly to [`schrodinger_quantize`].
pub fn quantize_quadratic(h: &PhaseFunction) -> Result<DiffOperator, Error> {
    if h.space() != Space::OnVQ {
        return Err(Error::SpaceMismatch("quantize_quadratic expects V*Q".into()));
    }
    let deg = h.poly().momentum_degree();
    if deg > 2 {
        return Err(Error::MomentumDegree { found: deg, max: 2 });
    }
    let dim = h.dim();
    let mut op = DiffOperator::zero(dim, VarSet::ConfigSpace);
    let half = coeff_rat(1, 2);
    for (pexp, coeff) in h.poly().split_by_momenta() {
        let total: u32 = pexp.iter().sum();
        match total {
            0 | 1 => {
                // route through the affine formula term by term
                let mut mono = Polynomial::one(dim);
                for (j, &e) in pexp.iter().enumerate() {
                    if e > 0 {
                        let v = if j == 0 { Var::P0 } else { Var::P(j) };
                        mono = &mono * &Polynomial::var(dim, v).pow(e);
                    }
                }
                let part = PhaseFunction::on_vq(&coeff * &mono)?;
                op = op.add(&schrodinger_quantize(&part)?)?;
            }
            2 => {
                // a^{jk} symmetric from the polynomial: the monomial
                // p_j p_k (j != k) splits evenly, p_j^2 goes on the
                // diagonal.
                let js: Vec<usize> = pexp
                    .iter()
                    .enumerate()
                    .flat_map(|(j, &e)| std::iter::repeat(j).take(e as usize))
                    .collect();
                let (j, k) = (js[0], js[1]);
                debug_assert!(j >= 1 && k >= 1, "p0 cannot occur on V*Q");
                let contributions: Vec<(usize, usize, Coeff)> = if j == k {
                    vec![(j, k, num_traits::One::one())]
                } else {
                    vec![(j, k, half.clone().into()), (k, j, half.clone().into())]
                };
                for (row, col, frac) in contributions {
                    let a = coeff.scale(&frac);
                    // -d_row o a o d_col = -(a d_row d_col + (d_row a) d_col)
                    let mut alpha = vec![0u32; dim + 1];
                    alpha[row] += 1;
                    alpha[col] += 1;
                    let second = DiffOperator::from_terms(
                        dim,
                        VarSet::ConfigSpace,
                        [(alpha, -&a)],
                    )?;
                    let first = DiffOperator::first_order(
                        -&a.diff(Var::Q(row)),
                        VarSet::ConfigSpace,
                        Var::Q(col),
                    )?;
                    op = op.add(&second)?.add(&first)?;
                }
            }
            _ => unreachable!("degree capped at 2"),
        }
    }
    Ok(op)
}

/// Quantizes `f` along the route the Schrödinger map prescribes: the
/// affine formula for momentum degree <= 1, divergence-form ordering for
/// quadratic functions on `V*Q`.
pub fn schrodinger_route(f: &PhaseFunction) -> Result<DiffOperator, Error> {
    if f.poly().momentum_degree() <= 1 {
        schrodinger_quantize(f)
    } else {
        quantize_quadratic(f)
    }
}

/// The Dirac defect `[f^, g^] + i {f,g}^`.
///
/// Exactly zero for the prequantum maps on all polynomial inputs and for
/// the Schrödinger map on vertical-affine pairs; for quadratic and higher
/// inputs the returned operator quantifies the obstruction.
pub fn dirac_defect(
    f: &PhaseFunction,
    g: &PhaseFunction,
    map: QuantizationMap,
) -> Result<DiffOperator, Error> {
    match map {
        QuantizationMap::PrequantT => {
            let fh = prequantize_t(f);
            let gh = prequantize_t(g);
            let br = bracket_t(&f.lift_to_tq(), &g.lift_to_tq());
            let quant_br = prequantize_t(&br).scale(&coeff_i());
            fh.commutator(&gh)?.add(&quant_br)
        }
        QuantizationMap::PrequantV => {
            let fh = prequantize_v(f)?;
            let gh = prequantize_v(g)?;
            let br = bracket_v(f, g)?;
            let quant_br = prequantize_v(&br)?.scale(&coeff_i());
            fh.commutator(&gh)?.add(&quant_br)
        }
        QuantizationMap::Schrodinger => {
            let fh = schrodinger_route(f)?;
            let gh = schrodinger_route(g)?;
            let br = if f.space() == Space::OnVQ && g.space() == Space::OnVQ {
                bracket_v(f, g)?
            } else {
                bracket_t(&f.lift_to_tq(), &g.lift_to_tq())
            };
            let quant_br = schrodinger_route(&br)?.scale(&coeff_i());
            fh.commutator(&gh)?.add(&quant_br)
        }
    }
}

/// The quantum evolution connection (Heisenberg derivative)
/// `nabla f^ = i [H^*, f^]` with `H^* = -i d_t + H^`: the time derivative
/// of the coefficients of `f^` plus `i [H^, f^]`.
pub fn heisenberg_derivative(
    fhat: &DiffOperator,
    h: &PhaseFunction,
) -> Result<DiffOperator, Error> {
    if fhat.varset() != VarSet::ConfigSpace {
        return Err(Error::NotConfigSpace);
    }
    let hhat = quantize_quadratic(h)?;
    let dt_part = fhat.diff_coefficients(Var::T);
    let comm = hhat.commutator(fhat)?.scale(&coeff_i());
    dt_part.add(&comm)
}

/// Maps a `PhaseSpaceT` operator onto `PhaseSpaceV` by dropping every term
/// that differentiates along the fibre direction `d^0` of `T*Q -> V*Q`.
/// Used to compare the two prequantization formulas.
pub fn drop_p0_direction(op: &DiffOperator) -> Result<DiffOperator, Error> {
    if op.varset() != VarSet::PhaseSpaceT {
        return Err(Error::VarSetMismatch);
    }
    let dim = op.dim();
    let p0_idx = dim + 1; // position of p0 in the T*Q derivative list
    let mut terms = Vec::new();
    for (alpha, c) in op.terms() {
        if alpha[p0_idx] > 0 {
            continue;
        }
        let mut reduced = alpha.clone();
        reduced.remove(p0_idx);
        terms.push((reduced, c.clone()));
    }
    DiffOperator::from_terms(dim, VarSet::PhaseSpaceV, terms)
}

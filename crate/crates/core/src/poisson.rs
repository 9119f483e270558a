//! Classical structures on the momentum phase spaces.
//!
//! `V*Q`, with coordinates `(t, q^k, p_k)`, carries the canonical Poisson
//! bracket `{f,g}_V = d^k f d_k g - d_k f d^k g` whose symplectic leaves are
//! the fibres over time. `T*Q` adds the momentum `p_0` conjugate to time and
//! carries the full symplectic bracket. The pullback along the fibration
//! `T*Q -> V*Q` is a Poisson monomorphism and is realized here as a plain
//! tag change, since the coordinates of `V*Q` are a subset of those of
//! `T*Q`.

use std::fmt;

use crate::coeff::coeff_int;
use crate::error::Error;
use crate::poly::{Polynomial, Var};

/// Which phase space a function lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// The vertical cotangent bundle `V*Q`; no dependence on `p_0`.
    OnVQ,
    /// The full cotangent bundle `T*Q`.
    OnTQ,
}

/// A polynomial observable tagged with its phase space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseFunction {
    poly: Polynomial,
    space: Space,
}

impl PhaseFunction {
    /// A function on `V*Q`; rejects any dependence on `p_0`.
    pub fn on_vq(poly: Polynomial) -> Result<Self, Error> {
        if poly.degree_in(Var::P0) > 0 {
            return Err(Error::DependsOnP0);
        }
        Ok(PhaseFunction {
            poly,
            space: Space::OnVQ,
        })
    }

    pub fn on_tq(poly: Polynomial) -> Self {
        PhaseFunction {
            poly,
            space: Space::OnTQ,
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// The pullback along `T*Q -> V*Q`: identical term data, relaxed tag.
    pub fn lift_to_tq(&self) -> PhaseFunction {
        PhaseFunction {
            poly: self.poly.clone(),
            space: Space::OnTQ,
        }
    }

    /// True iff the total momentum degree (over `p_0, p_1..p_m`) is at
    /// most 1. This is the membership test for the quantum algebra selected
    /// by the vertical polarization; it rules out products like `p1*p2`.
    pub fn is_vertical_affine(&self) -> bool {
        self.poly.momentum_degree() <= 1
    }
}

impl fmt::Display for PhaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// Components of a vector field on phase space, as exact polynomials.
///
/// Houses Hamiltonian vector fields on `T*Q` (where `d_p0` is present) and
/// Hamiltonian connections on `V*Q -> R` (where it is absent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFieldCoeffs {
    pub d_t: Polynomial,
    pub d_q: Vec<Polynomial>,
    pub d_p0: Option<Polynomial>,
    pub d_p: Vec<Polynomial>,
}

impl VectorFieldCoeffs {
    /// Applies the vector field to a polynomial as a derivation.
    pub fn apply(&self, g: &Polynomial) -> Polynomial {
        let dim = g.dim();
        let mut out = &self.d_t * &g.diff(Var::T);
        for k in 1..=dim {
            out = &out + &(&self.d_q[k - 1] * &g.diff(Var::Q(k)));
            out = &out + &(&self.d_p[k - 1] * &g.diff(Var::P(k)));
        }
        if let Some(dp0) = &self.d_p0 {
            out = &out + &(dp0 * &g.diff(Var::P0));
        }
        out
    }
}

/// A connection `Gamma = d_t + Gamma^k d_k` on the configuration bundle
/// `Q -> R`; its coefficients depend on `(t, q)` only. Characterizes a
/// reference frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameConnection {
    gamma: Vec<Polynomial>,
}

impl FrameConnection {
    pub fn new(gamma: Vec<Polynomial>) -> Result<Self, Error> {
        for g in &gamma {
            if g.momentum_degree() > 0 {
                return Err(Error::MomentumInCoefficient);
            }
        }
        Ok(FrameConnection { gamma })
    }

    /// The rest frame `Gamma^k = 0` in dimension `m`.
    pub fn rest(dim: usize) -> Self {
        FrameConnection {
            gamma: vec![Polynomial::zero(dim); dim],
        }
    }

    /// A constant-velocity frame `Gamma^k = v^k`, each `v^k` rational-exact
    /// via a polynomial constant.
    pub fn constant_velocity(dim: usize, v: &[Polynomial]) -> Result<Self, Error> {
        assert_eq!(v.len(), dim);
        Self::new(v.to_vec())
    }

    pub fn gamma(&self) -> &[Polynomial] {
        &self.gamma
    }
}

fn require_vq(f: &PhaseFunction, what: &str) -> Result<(), Error> {
    if f.space != Space::OnVQ {
        return Err(Error::SpaceMismatch(format!("{what} must live on V*Q")));
    }
    Ok(())
}

/// The canonical bracket on `V*Q`:
/// `{f,g}_V = sum_k (d^k f d_k g - d_k f d^k g)`.
pub fn bracket_v(f: &PhaseFunction, g: &PhaseFunction) -> Result<PhaseFunction, Error> {
    require_vq(f, "bracket_v argument")?;
    require_vq(g, "bracket_v argument")?;
    let dim = f.dim();
    let mut out = Polynomial::zero(dim);
    for k in 1..=dim {
        let up_f = f.poly.diff(Var::P(k));
        let dn_f = f.poly.diff(Var::Q(k));
        let up_g = g.poly.diff(Var::P(k));
        let dn_g = g.poly.diff(Var::Q(k));
        out = &out + &(&(&up_f * &dn_g) - &(&dn_f * &up_g));
    }
    PhaseFunction::on_vq(out)
}

/// The symplectic bracket on `T*Q`, summing over `lambda = 0..m` with
/// `q^0 = t`. Arguments on `V*Q` are lifted first.
pub fn bracket_t(f: &PhaseFunction, g: &PhaseFunction) -> PhaseFunction {
    let dim = f.dim();
    let pairs: Vec<(Var, Var)> = std::iter::once((Var::T, Var::P0))
        .chain((1..=dim).map(|k| (Var::Q(k), Var::P(k))))
        .collect();
    let mut out = Polynomial::zero(dim);
    for (qv, pv) in pairs {
        let up_f = f.poly.diff(pv);
        let dn_f = f.poly.diff(qv);
        let up_g = g.poly.diff(pv);
        let dn_g = g.poly.diff(qv);
        out = &out + &(&(&up_f * &dn_g) - &(&dn_f * &up_g));
    }
    PhaseFunction::on_tq(out)
}

/// The Hamiltonian vector field of `f` on `T*Q`:
/// `theta_f = d^lambda f d_lambda - d_lambda f d^lambda`.
/// Satisfies `theta_f(g) = {f,g}_T`.
pub fn hamiltonian_vector_field_t(f: &PhaseFunction) -> Result<VectorFieldCoeffs, Error> {
    if f.space != Space::OnTQ {
        return Err(Error::SpaceMismatch(
            "hamiltonian_vector_field_t expects a function on T*Q".into(),
        ));
    }
    let dim = f.dim();
    Ok(VectorFieldCoeffs {
        d_t: f.poly.diff(Var::P0),
        d_q: (1..=dim).map(|k| f.poly.diff(Var::P(k))).collect(),
        d_p0: Some(-&f.poly.diff(Var::T)),
        d_p: (1..=dim).map(|k| -&f.poly.diff(Var::Q(k))).collect(),
    })
}

/// Associates to a Hamiltonian `H` on `V*Q` the function `H* = p_0 + H` on
/// `T*Q`, whose Hamiltonian vector field drives evolution.
pub fn star_hamiltonian(h: &PhaseFunction) -> Result<PhaseFunction, Error> {
    require_vq(h, "Hamiltonian")?;
    let p0 = Polynomial::var(h.dim(), Var::P0);
    Ok(PhaseFunction::on_tq(&p0 + &h.poly))
}

/// The unique Hamiltonian connection
/// `gamma_H = d_t + d^k H d_k - d_k H d^k` on `V*Q -> R`.
/// Its integral curves are the Hamilton equations.
pub fn hamiltonian_connection(h: &PhaseFunction) -> Result<VectorFieldCoeffs, Error> {
    require_vq(h, "Hamiltonian")?;
    let dim = h.dim();
    Ok(VectorFieldCoeffs {
        d_t: Polynomial::one(dim),
        d_q: (1..=dim).map(|k| h.poly.diff(Var::P(k))).collect(),
        d_p0: None,
        d_p: (1..=dim).map(|k| -&h.poly.diff(Var::Q(k))).collect(),
    })
}

/// The classical evolution of `f` along `gamma_H`:
/// `L_{gamma_H} f = d_t f + {H, f}_V`.
pub fn classical_evolution(f: &PhaseFunction, h: &PhaseFunction) -> Result<PhaseFunction, Error> {
    require_vq(f, "observable")?;
    require_vq(h, "Hamiltonian")?;
    let bracket = bracket_v(h, f)?;
    PhaseFunction::on_vq(&f.poly.diff(Var::T) + &bracket.poly)
}

/// The defect of the evolution identity
/// `zeta*(L_{gamma_H} f) - {H*, zeta* f}_T`; identically zero for all
/// polynomial inputs.
pub fn evolution_identity_defect(
    f: &PhaseFunction,
    h: &PhaseFunction,
) -> Result<PhaseFunction, Error> {
    let lhs = classical_evolution(f, h)?.lift_to_tq();
    let rhs = bracket_t(&star_hamiltonian(h)?, &f.lift_to_tq());
    Ok(PhaseFunction::on_tq(&lhs.poly - &rhs.poly))
}

/// The frame energy function `~H_Gamma = H - p_k Gamma^k` with respect to
/// the reference frame `Gamma`.
pub fn frame_split(h: &PhaseFunction, frame: &FrameConnection) -> Result<PhaseFunction, Error> {
    require_vq(h, "Hamiltonian")?;
    let dim = h.dim();
    assert_eq!(frame.gamma.len(), dim, "frame dimension mismatch");
    let mut out = h.poly.clone();
    for k in 1..=dim {
        let pk = Polynomial::var(dim, Var::P(k));
        out = &out - &(&pk * &frame.gamma[k - 1]);
    }
    PhaseFunction::on_vq(out)
}

/// The frame Hamiltonian `H_Gamma = p_k Gamma^k`, the centre of the affine
/// space of Hamiltonians selected by `Gamma`.
pub fn frame_hamiltonian(dim: usize, frame: &FrameConnection) -> PhaseFunction {
    let mut out = Polynomial::zero(dim);
    for k in 1..=dim {
        let pk = Polynomial::var(dim, Var::P(k));
        out = &out + &(&pk * &frame.gamma[k - 1]);
    }
    PhaseFunction::on_vq(out).expect("frame coefficients are momentum-free")
}

/// Convenience: `2` as an exact constant, used in tests.
#[doc(hidden)]
pub fn int_const(dim: usize, n: i64) -> Polynomial {
    Polynomial::constant(dim, coeff_int(n))
}

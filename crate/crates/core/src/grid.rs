//! Uniform configuration-space grids and sampled half-densities.
//!
//! A state is a complex sample vector over a uniform tensor grid that
//! includes both endpoints of each axis. The Hermitian pairing is
//! `<rho1|rho2> = (2pi)^{-m} integral rho1 conj(rho2)`, discretized with
//! uniform weights; conjugation sits on the second slot.
//!
//! Two stencil families are used. Observable application
//! ([`apply_operator`]) uses centered second-order differences in the
//! interior and one-sided second-order differences on the boundary, so
//! expectation values of low-order operators are second-order accurate even
//! when the state has (numerically negligible) boundary support. The
//! evolution kernels instead use pure centered stencils with hard-wall
//! (Dirichlet) closure, which keeps the discrete Hamiltonian symmetric; see
//! [`apply_operator_dirichlet`].

use num_complex::Complex;

use crate::error::Error;
use crate::exec::{for_each_chunk_mut, sum_chunks, ExecMode};
use crate::operator::{DiffOperator, VarSet};
use crate::poly::nvars;

pub type C64 = Complex<f64>;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Uniform tensor grid over a box, endpoints included:
/// `q_k(i) = min_k + i * h_k` with `h_k = (max_k - min_k) / (n_k - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    mins: Vec<f64>,
    maxs: Vec<f64>,
    npts: Vec<usize>,
}

impl GridSpec {
    pub fn new(mins: Vec<f64>, maxs: Vec<f64>, npts: Vec<usize>) -> Result<Self, Error> {
        let dim = mins.len();
        if maxs.len() != dim || npts.len() != dim || dim == 0 {
            return Err(Error::GridSpec {
                axis: 0,
                msg: "axis count mismatch or empty grid".to_string(),
            });
        }
        for k in 0..dim {
            if !(mins[k].is_finite() && maxs[k].is_finite()) || maxs[k] <= mins[k] {
                return Err(Error::GridSpec {
                    axis: k,
                    msg: "box must satisfy min < max with finite bounds".to_string(),
                });
            }
            if npts[k] < 4 {
                return Err(Error::GridSpec {
                    axis: k,
                    msg: "need at least 4 points per axis for the stencils".to_string(),
                });
            }
        }
        Ok(GridSpec {
            dim,
            mins,
            maxs,
            npts,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn npts(&self) -> &[usize] {
        &self.npts
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn maxs(&self) -> &[f64] {
        &self.maxs
    }

    /// Grid step along axis `k`.
    pub fn step(&self, k: usize) -> f64 {
        (self.maxs[k] - self.mins[k]) / (self.npts[k] - 1) as f64
    }

    /// Coordinate of index `i` along axis `k`.
    pub fn coord(&self, k: usize, i: usize) -> f64 {
        self.mins[k] + i as f64 * self.step(k)
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.npts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major flat index, axis 0 slowest.
    pub fn flat(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for (k, &i) in multi.iter().enumerate() {
            idx = idx * self.npts[k] + i;
        }
        idx
    }

    /// Inverse of [`GridSpec::flat`].
    pub fn unflat(&self, mut idx: usize) -> Vec<usize> {
        let mut multi = vec![0usize; self.dim];
        for k in (0..self.dim).rev() {
            multi[k] = idx % self.npts[k];
            idx /= self.npts[k];
        }
        multi
    }

    /// The uniform quadrature weight `prod_k h_k * (2pi)^{-m}` of the
    /// half-density pairing.
    pub fn weight(&self) -> f64 {
        let cell: f64 = (0..self.dim).map(|k| self.step(k)).product();
        cell / TWO_PI.powi(self.dim as i32)
    }
}

/// A sampled half-density at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    pub spec: GridSpec,
    pub time: f64,
    pub data: Vec<C64>,
}

impl GridState {
    pub fn zeros(spec: GridSpec, time: f64) -> Self {
        let n = spec.len();
        GridState {
            spec,
            time,
            data: vec![C64::new(0.0, 0.0); n],
        }
    }

    fn check_same_grid(&self, other: &GridState) -> Result<(), Error> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// `<a|b> = (2pi)^{-m} sum a conj(b) prod h_k`, conjugation on the second
/// slot. Deterministic across execution modes.
pub fn inner_product(a: &GridState, b: &GridState, mode: ExecMode) -> Result<C64, Error> {
    a.check_same_grid(b)?;
    let w = a.spec.weight();
    let (da, db) = (&a.data, &b.data);
    let s = sum_chunks(mode, da.len(), |r| {
        let mut acc = C64::new(0.0, 0.0);
        for i in r {
            acc += da[i] * db[i].conj();
        }
        acc
    });
    Ok(s * w)
}

/// Squared norm `<rho|rho>` (real part; the imaginary part is exactly zero
/// up to rounding).
pub fn norm_sq(rho: &GridState, mode: ExecMode) -> f64 {
    let w = rho.spec.weight();
    let d = &rho.data;
    let s = sum_chunks(mode, d.len(), |r| {
        let mut acc = 0.0f64;
        for i in r {
            acc += d[i].norm_sqr();
        }
        C64::new(acc, 0.0)
    });
    s.re * w
}

/// A normalized product Gaussian packet
/// `rho(q) = prod_k (pi sigma_k^2)^{-1/4}
///   exp(-(q_k - q0_k)^2 / (2 sigma_k^2) + i p0_k q_k)`,
/// rescaled so the discrete norm is exactly 1.
///
/// Fails with [`Error::PacketOutsideBox`] when the relative discrete mass
/// in the two outermost grid layers of any axis exceeds `1e-12`: results at
/// hard walls would then reflect the box, not the packet.
pub fn gaussian_packet(
    spec: &GridSpec,
    q0: &[f64],
    p0: &[f64],
    sigma: &[f64],
    time: f64,
    mode: ExecMode,
) -> Result<GridState, Error> {
    let dim = spec.dim();
    if q0.len() != dim || p0.len() != dim || sigma.len() != dim {
        return Err(Error::DimensionMismatch(dim, q0.len().max(p0.len()).max(sigma.len())));
    }
    for &s in sigma {
        if !(s > 0.0) {
            return Err(Error::NonPositiveWidth);
        }
    }
    let mut rho = GridState::zeros(spec.clone(), time);
    {
        let spec = spec.clone();
        let (q0, p0, sigma) = (q0.to_vec(), p0.to_vec(), sigma.to_vec());
        for_each_chunk_mut(mode, &mut rho.data, |off, chunk| {
            for (j, v) in chunk.iter_mut().enumerate() {
                let multi = spec.unflat(off + j);
                let mut log_amp = 0.0f64;
                let mut phase = 0.0f64;
                for k in 0..spec.dim() {
                    let q = spec.coord(k, multi[k]);
                    let d = q - q0[k];
                    log_amp += -d * d / (2.0 * sigma[k] * sigma[k])
                        - 0.25 * (std::f64::consts::PI * sigma[k] * sigma[k]).ln();
                    phase += p0[k] * q;
                }
                *v = C64::from_polar(log_amp.exp(), phase);
            }
        });
    }
    // tail-mass precondition at the walls
    let total = norm_sq(&rho, mode);
    if total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut tail = 0.0f64;
    for (i, v) in rho.data.iter().enumerate() {
        let multi = spec.unflat(i);
        let near_wall = (0..dim).any(|k| multi[k] < 2 || multi[k] >= spec.npts()[k] - 2);
        if near_wall {
            tail += v.norm_sqr();
        }
    }
    let tail_mass = tail * spec.weight() / total;
    if tail_mass >= 1e-12 {
        return Err(Error::PacketOutsideBox {
            mass: tail_mass,
            limit: 1e-12,
        });
    }
    let scale = total.sqrt().recip();
    for_each_chunk_mut(mode, &mut rho.data, |_, chunk| {
        for v in chunk {
            *v *= scale;
        }
    });
    Ok(rho)
}

/// Evaluates the momentum-free coefficient polynomial of an operator term
/// on every grid point at the state's time.
pub(crate) fn eval_coefficient(
    c: &crate::poly::Polynomial,
    spec: &GridSpec,
    time: f64,
    mode: ExecMode,
) -> Vec<C64> {
    let dim = spec.dim();
    let mut out = vec![C64::new(0.0, 0.0); spec.len()];
    for_each_chunk_mut(mode, &mut out, |off, chunk| {
        let mut point = vec![0.0f64; nvars(dim)];
        point[0] = time;
        for (j, v) in chunk.iter_mut().enumerate() {
            let multi = spec.unflat(off + j);
            for k in 0..dim {
                point[1 + k] = spec.coord(k, multi[k]);
            }
            *v = c.eval(&point).expect("point length matches");
        }
    });
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Boundary {
    /// One-sided second-order stencils at the walls (observables).
    OneSided,
    /// Hard wall: the state is extended by zero (evolution kernels).
    Dirichlet,
}

/// First derivative along `axis`, second-order accurate.
fn diff_axis(src: &[C64], spec: &GridSpec, axis: usize, boundary: Boundary, mode: ExecMode) -> Vec<C64> {
    stencil_axis(src, spec, axis, boundary, mode, 1)
}

/// Second derivative along `axis`, second-order accurate.
fn diff2_axis(src: &[C64], spec: &GridSpec, axis: usize, boundary: Boundary, mode: ExecMode) -> Vec<C64> {
    stencil_axis(src, spec, axis, boundary, mode, 2)
}

fn stencil_axis(
    src: &[C64],
    spec: &GridSpec,
    axis: usize,
    boundary: Boundary,
    mode: ExecMode,
    order: u32,
) -> Vec<C64> {
    let n = spec.npts()[axis];
    let h = spec.step(axis);
    // stride between neighbours along `axis` in the flat layout
    let stride: usize = spec.npts()[axis + 1..].iter().product();
    let spec_len = spec.len();
    let mut out = vec![C64::new(0.0, 0.0); spec_len];
    let get = |flat: usize, i: isize| -> C64 {
        // `flat` has axis-index 0 along `axis`; offset by i cells
        if i < 0 || i as usize >= n {
            return C64::new(0.0, 0.0);
        }
        src[flat + i as usize * stride]
    };
    for_each_chunk_mut(mode, &mut out, |off, chunk| {
        for (j, v) in chunk.iter_mut().enumerate() {
            let idx = off + j;
            let i = (idx / stride) % n; // index along `axis`
            let base = idx - i * stride; // flat index of the axis origin
            let i = i as isize;
            *v = match (order, boundary) {
                (1, _) if i > 0 && (i as usize) < n - 1 => {
                    (get(base, i + 1) - get(base, i - 1)) / (2.0 * h)
                }
                (1, Boundary::Dirichlet) => (get(base, i + 1) - get(base, i - 1)) / (2.0 * h),
                (1, Boundary::OneSided) if i == 0 => {
                    (-1.5 * get(base, 0) + 2.0 * get(base, 1) - 0.5 * get(base, 2)) / h
                }
                (1, Boundary::OneSided) => {
                    let m = (n - 1) as isize;
                    (1.5 * get(base, m) - 2.0 * get(base, m - 1) + 0.5 * get(base, m - 2)) / h
                }
                (2, _) if i > 0 && (i as usize) < n - 1 => {
                    (get(base, i + 1) - 2.0 * get(base, i) + get(base, i - 1)) / (h * h)
                }
                (2, Boundary::Dirichlet) => {
                    (get(base, i + 1) - 2.0 * get(base, i) + get(base, i - 1)) / (h * h)
                }
                (2, Boundary::OneSided) if i == 0 => {
                    (2.0 * get(base, 0) - 5.0 * get(base, 1) + 4.0 * get(base, 2)
                        - get(base, 3))
                        / (h * h)
                }
                (2, Boundary::OneSided) => {
                    let m = (n - 1) as isize;
                    (2.0 * get(base, m) - 5.0 * get(base, m - 1) + 4.0 * get(base, m - 2)
                        - get(base, m - 3))
                        / (h * h)
                }
                _ => unreachable!("orders above 2 are rejected before dispatch"),
            };
        }
    });
    out
}

fn apply_operator_with(
    op: &DiffOperator,
    rho: &GridState,
    boundary: Boundary,
    mode: ExecMode,
) -> Result<GridState, Error> {
    if op.varset() != VarSet::ConfigSpace {
        return Err(Error::NotConfigSpace);
    }
    if op.dim() != rho.spec.dim() {
        return Err(Error::DimensionMismatch(op.dim(), rho.spec.dim()));
    }
    if op.contains_dt() {
        return Err(Error::ContainsTimeDerivative);
    }
    let spec = &rho.spec;
    let mut out = GridState::zeros(spec.clone(), rho.time);
    for (alpha, c) in op.terms() {
        // alpha = (t, q1..qm); t-order is zero here
        let order = alpha.iter().skip(1).sum::<u32>();
        if alpha.iter().skip(1).any(|&a| a > 2) || order > 2 {
            return Err(Error::OrderTooHigh(order));
        }
        let mut cur = rho.data.clone();
        for (k, &a) in alpha.iter().skip(1).enumerate() {
            match a {
                0 => {}
                1 => cur = diff_axis(&cur, spec, k, boundary, mode),
                2 => cur = diff2_axis(&cur, spec, k, boundary, mode),
                _ => unreachable!(),
            }
        }
        let coeffs = eval_coefficient(c, spec, rho.time, mode);
        for_each_chunk_mut(mode, &mut out.data, |off, chunk| {
            for (j, v) in chunk.iter_mut().enumerate() {
                *v += coeffs[off + j] * cur[off + j];
            }
        });
    }
    Ok(out)
}

/// Applies a configuration-space operator of order at most 2 to a sampled
/// state, with one-sided boundary stencils. Used for observables.
pub fn apply_operator(op: &DiffOperator, rho: &GridState, mode: ExecMode) -> Result<GridState, Error> {
    apply_operator_with(op, rho, Boundary::OneSided, mode)
}

/// Same as [`apply_operator`] but with hard-wall (Dirichlet) centered
/// stencils: the state is extended by zero past the walls. This is the
/// discretization used inside the evolution kernels, where symmetry of the
/// discrete Hamiltonian matters more than boundary accuracy.
pub fn apply_operator_dirichlet(
    op: &DiffOperator,
    rho: &GridState,
    mode: ExecMode,
) -> Result<GridState, Error> {
    apply_operator_with(op, rho, Boundary::Dirichlet, mode)
}

/// Expectation value `<A rho | rho>` of an operator in a (normalized)
/// state.
pub fn expectation(op: &DiffOperator, rho: &GridState, mode: ExecMode) -> Result<C64, Error> {
    let a_rho = apply_operator(op, rho, mode)?;
    inner_product(&a_rho, rho, mode)
}

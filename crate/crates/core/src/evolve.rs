//! Time evolution: quantum Crank–Nicolson stepping, classical reference
//! trajectories, and Galilean frame transforms of sampled states.
//!
//! The quantum step solves `(1 + i dt/2 H^) rho' = (1 - i dt/2 H^) rho`
//! with the Hamiltonian's coefficients frozen at the midpoint time. The
//! discrete Hamiltonian uses hard-wall centered stencils, so the step is
//! unitary up to solver tolerance for self-adjoint `H^`: norm is conserved
//! to machine precision per step. In one dimension the system is
//! tridiagonal and solved directly; in two dimensions a matrix-free
//! BiCGStab iteration is used.

use crate::coeff::coeff_rat;
use crate::error::Error;
use crate::exec::{for_each_chunk_mut, ExecMode};
use crate::grid::{apply_operator_dirichlet, eval_coefficient, norm_sq, GridState, C64};
use crate::operator::DiffOperator;
use crate::poisson::{hamiltonian_connection, PhaseFunction};
use crate::poly::{nvars, Polynomial, Var};
use crate::quantize::quantize_quadratic;

/// A point of the classical Hamilton flow.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalState {
    pub time: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

/// The right-hand side of the Hamilton equations, precomputed as exact
/// polynomials: `dq^k/dt = d H / d p_k`, `dp_k/dt = -d H / d q^k`.
#[derive(Clone, Debug)]
pub struct ClassicalFlow {
    dim: usize,
    dq: Vec<Polynomial>,
    dp: Vec<Polynomial>,
}

impl ClassicalFlow {
    pub fn new(h: &PhaseFunction) -> Result<Self, Error> {
        let conn = hamiltonian_connection(h)?;
        Ok(ClassicalFlow {
            dim: h.dim(),
            dq: conn.d_q,
            dp: conn.d_p,
        })
    }

    fn rhs(&self, time: f64, q: &[f64], p: &[f64]) -> Result<(Vec<f64>, Vec<f64>), Error> {
        let mut point = vec![0.0; nvars(self.dim)];
        point[0] = time;
        point[1..1 + self.dim].copy_from_slice(q);
        point[self.dim + 2..].copy_from_slice(p);
        let mut dq = Vec::with_capacity(self.dim);
        let mut dp = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            dq.push(self.dq[k].eval(&point)?.re);
            dp.push(self.dp[k].eval(&point)?.re);
        }
        Ok((dq, dp))
    }

    /// One classical RK4 step of size `dt`.
    pub fn step_rk4(&self, s: &ClassicalState, dt: f64) -> Result<ClassicalState, Error> {
        let add = |q: &[f64], dq: &[f64], f: f64| -> Vec<f64> {
            q.iter().zip(dq).map(|(a, b)| a + f * b).collect()
        };
        let (k1q, k1p) = self.rhs(s.time, &s.q, &s.p)?;
        let (k2q, k2p) = self.rhs(
            s.time + dt / 2.0,
            &add(&s.q, &k1q, dt / 2.0),
            &add(&s.p, &k1p, dt / 2.0),
        )?;
        let (k3q, k3p) = self.rhs(
            s.time + dt / 2.0,
            &add(&s.q, &k2q, dt / 2.0),
            &add(&s.p, &k2p, dt / 2.0),
        )?;
        let (k4q, k4p) = self.rhs(s.time + dt, &add(&s.q, &k3q, dt), &add(&s.p, &k3p, dt))?;
        let comb = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
            x.iter()
                .enumerate()
                .map(|(i, v)| v + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
                .collect()
        };
        Ok(ClassicalState {
            time: s.time + dt,
            q: comb(&s.q, &k1q, &k2q, &k3q, &k4q),
            p: comb(&s.p, &k1p, &k2p, &k3p, &k4p),
        })
    }
}

/// Evaluates a momentum-polynomial observable on a classical state.
pub fn classical_observable(f: &Polynomial, s: &ClassicalState) -> Result<f64, Error> {
    let dim = s.q.len();
    let mut point = vec![0.0; nvars(dim)];
    point[0] = s.time;
    point[1..1 + dim].copy_from_slice(&s.q);
    point[dim + 2..].copy_from_slice(&s.p);
    Ok(f.eval(&point)?.re)
}

/// Reusable Crank–Nicolson stepper for a fixed quadratic Hamiltonian.
pub struct CrankNicolson {
    hhat: DiffOperator,
    dt: f64,
    mode: ExecMode,
    /// True when no coefficient of `H^` depends on `t`; then the
    /// tridiagonal factorization could be cached, but coefficients are
    /// cheap to re-evaluate so this is informational only.
    pub autonomous: bool,
}

impl CrankNicolson {
    pub fn new(h: &PhaseFunction, dt: f64, mode: ExecMode) -> Result<Self, Error> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::GridSpec {
                axis: 0,
                msg: "time step must be positive and finite".to_string(),
            });
        }
        let hhat = quantize_quadratic(h)?;
        let autonomous = hhat.terms().all(|(_, c)| c.degree_in(Var::T) == 0);
        Ok(CrankNicolson {
            hhat,
            dt,
            mode,
            autonomous,
        })
    }

    pub fn hamiltonian_operator(&self) -> &DiffOperator {
        &self.hhat
    }

    /// Advances the state by one step, `rho.time -> rho.time + dt`.
    pub fn step(&self, rho: &GridState) -> Result<GridState, Error> {
        let dim = rho.spec.dim();
        let t_mid = rho.time + self.dt / 2.0;
        // rhs = (1 - i dt/2 H^) rho at the midpoint time
        let mut staged = rho.clone();
        staged.time = t_mid;
        let h_rho = apply_operator_dirichlet(&self.hhat, &staged, self.mode)?;
        let lam = C64::new(0.0, self.dt / 2.0);
        let mut rhs = rho.data.clone();
        for_each_chunk_mut(self.mode, &mut rhs, |off, chunk| {
            for (j, v) in chunk.iter_mut().enumerate() {
                *v -= lam * h_rho.data[off + j];
            }
        });
        let solution = match dim {
            1 => self.solve_tridiagonal(rho, t_mid, &rhs)?,
            _ => self.solve_bicgstab(rho, t_mid, rhs)?,
        };
        Ok(GridState {
            spec: rho.spec.clone(),
            time: rho.time + self.dt,
            data: solution,
        })
    }

    /// Direct Thomas solve of `(1 + i dt/2 H^) x = rhs` in one dimension,
    /// where the hard-wall discrete Hamiltonian is tridiagonal.
    fn solve_tridiagonal(
        &self,
        rho: &GridState,
        t_mid: f64,
        rhs: &[C64],
    ) -> Result<Vec<C64>, Error> {
        let spec = &rho.spec;
        let n = spec.npts()[0];
        let h = spec.step(0);
        let lam = C64::new(0.0, self.dt / 2.0);
        let c0 = eval_coefficient(&self.hhat.coefficient(&[0, 0]), spec, t_mid, self.mode);
        let c1 = eval_coefficient(&self.hhat.coefficient(&[0, 1]), spec, t_mid, self.mode);
        let c2 = eval_coefficient(&self.hhat.coefficient(&[0, 2]), spec, t_mid, self.mode);
        // H row i: c2/h^2 (x[i-1] - 2 x[i] + x[i+1]) + c1/(2h) (x[i+1] - x[i-1]) + c0 x[i]
        let mut lower = vec![C64::new(0.0, 0.0); n];
        let mut diag = vec![C64::new(0.0, 0.0); n];
        let mut upper = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let a2 = c2[i] / (h * h);
            let a1 = c1[i] / (2.0 * h);
            diag[i] = C64::new(1.0, 0.0) + lam * (c0[i] - 2.0 * a2);
            lower[i] = lam * (a2 - a1);
            upper[i] = lam * (a2 + a1);
        }
        // Thomas elimination
        let mut cp = vec![C64::new(0.0, 0.0); n];
        let mut dp = vec![C64::new(0.0, 0.0); n];
        cp[0] = upper[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for i in 1..n {
            let m = diag[i] - lower[i] * cp[i - 1];
            cp[i] = upper[i] / m;
            dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m;
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        Ok(x)
    }

    /// Matrix-free BiCGStab for `(1 + i dt/2 H^) x = rhs` in higher
    /// dimensions, converged to a relative residual of `1e-12`.
    fn solve_bicgstab(
        &self,
        rho: &GridState,
        t_mid: f64,
        rhs: Vec<C64>,
    ) -> Result<Vec<C64>, Error> {
        let spec = rho.spec.clone();
        let lam = C64::new(0.0, self.dt / 2.0);
        let matvec = |x: &[C64]| -> Result<Vec<C64>, Error> {
            let state = GridState {
                spec: spec.clone(),
                time: t_mid,
                data: x.to_vec(),
            };
            let hx = apply_operator_dirichlet(&self.hhat, &state, self.mode)?;
            let mut out = x.to_vec();
            for_each_chunk_mut(self.mode, &mut out, |off, chunk| {
                for (j, v) in chunk.iter_mut().enumerate() {
                    *v += lam * hx.data[off + j];
                }
            });
            Ok(out)
        };
        let dot = |a: &[C64], b: &[C64]| -> C64 {
            crate::exec::sum_chunks(self.mode, a.len(), |r| {
                let mut acc = C64::new(0.0, 0.0);
                for i in r {
                    acc += a[i].conj() * b[i];
                }
                acc
            })
        };
        let nrm = |a: &[C64]| -> f64 { dot(a, a).re.sqrt() };
        let target = 1e-12 * nrm(&rhs).max(f64::MIN_POSITIVE);
        // initial guess: the rhs itself (the matrix is 1 + O(dt))
        let mut x = rhs.clone();
        let ax = matvec(&x)?;
        let mut r: Vec<C64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let r0 = r.clone();
        let mut rho_old = C64::new(1.0, 0.0);
        let mut alpha = C64::new(1.0, 0.0);
        let mut omega = C64::new(1.0, 0.0);
        let mut v = vec![C64::new(0.0, 0.0); rhs.len()];
        let mut p = vec![C64::new(0.0, 0.0); rhs.len()];
        let mut achieved = nrm(&r);
        for _ in 0..500 {
            if achieved <= target {
                return Ok(x);
            }
            let rho_new = dot(&r0, &r);
            let beta = (rho_new / rho_old) * (alpha / omega);
            for i in 0..p.len() {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            v = matvec(&p)?;
            alpha = rho_new / dot(&r0, &v);
            let s: Vec<C64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
            let t = matvec(&s)?;
            omega = dot(&t, &s) / dot(&t, &t);
            for i in 0..x.len() {
                x[i] += alpha * p[i] + omega * s[i];
            }
            r = s.iter().zip(&t).map(|(si, ti)| si - omega * ti).collect();
            rho_old = rho_new;
            achieved = nrm(&r);
        }
        if achieved <= target {
            Ok(x)
        } else {
            Err(Error::SolverDiverged {
                target,
                achieved,
            })
        }
    }
}

/// Direction of a Galilean change of frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameDirection {
    /// Rest frame to the frame moving with velocity `v`.
    ToMoving,
    /// Back from the moving frame to the rest frame.
    ToRest,
}

/// A constant-velocity reference frame for the numerical layer.
#[derive(Clone, Debug, PartialEq)]
pub struct MovingFrame {
    pub velocity: Vec<f64>,
}

impl MovingFrame {
    pub fn new(velocity: Vec<f64>) -> Self {
        MovingFrame { velocity }
    }
}

/// Galilean transform of a sampled state at its current time:
///
/// `rho'(q') = rho(q' + v t) exp(-i v . q' - i |v|^2 t / 2)`
///
/// for [`FrameDirection::ToMoving`], and the inverse for
/// [`FrameDirection::ToRest`]. The shifted samples are obtained by
/// axis-wise cubic Lagrange interpolation on the uniform grid, with the
/// state extended by zero beyond the walls.
pub fn frame_transform_grid(
    rho: &GridState,
    frame: &MovingFrame,
    direction: FrameDirection,
    mode: ExecMode,
) -> Result<GridState, Error> {
    let dim = rho.spec.dim();
    if frame.velocity.len() != dim {
        return Err(Error::DimensionMismatch(dim, frame.velocity.len()));
    }
    let t = rho.time;
    let v = &frame.velocity;
    let vsq: f64 = v.iter().map(|x| x * x).sum();
    // shift of the sampling point and sign of the phase
    let (shift, phase_sign): (Vec<f64>, f64) = match direction {
        FrameDirection::ToMoving => (v.iter().map(|vk| vk * t).collect(), -1.0),
        FrameDirection::ToRest => (v.iter().map(|vk| -vk * t).collect(), 1.0),
    };
    // resample: out(q) = in(q + shift), axis by axis
    let mut data = rho.data.clone();
    for k in 0..dim {
        if shift[k] != 0.0 {
            data = shift_axis_cubic(&data, &rho.spec, k, shift[k], mode);
        }
    }
    // ToMoving multiplies by exp(-i (v . q' + |v|^2 t / 2)). The inverse
    // evaluates exp(+i (v . (q - v t) + |v|^2 t / 2)) at the rest
    // coordinate q, which simplifies to exp(+i (v . q - |v|^2 t / 2)).
    let spec = rho.spec.clone();
    let v = v.clone();
    let const_phase = match direction {
        FrameDirection::ToMoving => 0.5 * vsq * t,
        FrameDirection::ToRest => -0.5 * vsq * t,
    };
    for_each_chunk_mut(mode, &mut data, |off, chunk| {
        for (j, val) in chunk.iter_mut().enumerate() {
            let multi = spec.unflat(off + j);
            let vq: f64 = (0..spec.dim())
                .map(|k| v[k] * spec.coord(k, multi[k]))
                .sum();
            let phase = phase_sign * (vq + const_phase);
            *val *= C64::from_polar(1.0, phase);
        }
    });
    Ok(GridState {
        spec: rho.spec.clone(),
        time: t,
        data,
    })
}

/// Samples `in(q + s)` along one axis with 4-point cubic Lagrange
/// interpolation; zero beyond the box.
fn shift_axis_cubic(
    src: &[C64],
    spec: &crate::grid::GridSpec,
    axis: usize,
    s: f64,
    mode: ExecMode,
) -> Vec<C64> {
    let n = spec.npts()[axis];
    let h = spec.step(axis);
    let stride: usize = spec.npts()[axis + 1..].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); src.len()];
    let cells = s / h; // shift in cell units
    for_each_chunk_mut(mode, &mut out, |off, chunk| {
        for (j, v) in chunk.iter_mut().enumerate() {
            let idx = off + j;
            let i = (idx / stride) % n;
            let base = idx - i * stride;
            let x = i as f64 + cells; // fractional source index
            let i0 = x.floor() as isize - 1; // 4-point window [i0, i0+3]
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..4isize {
                let ii = i0 + m;
                if ii < 0 || ii as usize >= n {
                    continue;
                }
                // Lagrange basis at x over nodes i0..i0+3
                let mut w = 1.0f64;
                for l in 0..4isize {
                    if l != m {
                        w *= (x - (i0 + l) as f64) / ((m - l) as f64);
                    }
                }
                acc += w * src[base + ii as usize * stride];
            }
            *v = acc;
        }
    });
    out
}

/// The Hamiltonian seen from a constant-velocity frame, as an exact
/// polynomial identity:
///
/// `H'(t, q', p') = H(t, q' + v t, p' + v) - v . p' - |v|^2 / 2`.
///
/// The last two terms are the frame energy shift; for the free particle
/// `H = p^2/2` this gives `H' = p'^2/2` exactly.
pub fn moving_frame_hamiltonian(
    h: &PhaseFunction,
    v: &[Polynomial],
) -> Result<PhaseFunction, Error> {
    let dim = h.dim();
    if v.len() != dim {
        return Err(Error::DimensionMismatch(dim, v.len()));
    }
    for vk in v {
        if vk.total_degree() > 0 {
            return Err(Error::NonAffineSubstitution(
                "frame velocity must be constant".to_string(),
            ));
        }
    }
    let t = Polynomial::var(dim, Var::T);
    let mut map = Polynomial::identity_map(dim);
    for k in 1..=dim {
        // q^k -> q^k + v^k t ; p_k -> p_k + v^k
        map[k] = &Polynomial::var(dim, Var::Q(k)) + &(&v[k - 1] * &t);
        map[dim + 1 + k] = &Polynomial::var(dim, Var::P(k)) + &v[k - 1];
    }
    let mut out = h.poly().substitute_affine(&map)?;
    for k in 1..=dim {
        let pk = Polynomial::var(dim, Var::P(k));
        out = &out - &(&v[k - 1] * &pk);
        out = &out - &(&v[k - 1] * &v[k - 1]).scale(&coeff_rat(1, 2));
    }
    PhaseFunction::on_vq(out)
}

/// Norm of a state, provided here for evolution diagnostics.
pub fn state_norm(rho: &GridState, mode: ExecMode) -> f64 {
    norm_sq(rho, mode).sqrt()
}

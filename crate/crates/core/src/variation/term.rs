//! First-order terms of needle variations.

use num_complex::Complex64;
use rayon::prelude::*;

use super::needle::check_regular;
use crate::holomap::{CVec, Jet, MapDescriptor};
use crate::linalg::{mat_vec, solve, solve_matrix, CMatrix};
use crate::loewner::{
    check_times, integrate_flow, integrate_scaled_flow, scaled_flow_jet, scaled_limit, flow_jet,
    HerglotzField, LimitOptions,
};
use crate::{Error, Result};

/// Final time of a variation: finite, or the parametric limit `t = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    At(f64),
    Infinity,
}

impl Horizon {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Horizon::Infinity)
    }
}

impl From<f64> for Horizon {
    fn from(t: f64) -> Horizon {
        if t == f64::INFINITY {
            Horizon::Infinity
        } else {
            Horizon::At(t)
        }
    }
}

fn check_order(g: &HerglotzField, s: f64, time: f64, t: Horizon, h: &MapDescriptor) -> Result<()> {
    check_times(s, time)?;
    if let Horizon::At(t) = t {
        check_times(time, t)?;
    }
    check_regular(g, time)?;
    if h.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: h.dim(),
        });
    }
    Ok(())
}

/// `e^T [h − G(·,T)](e^{−T} v)`: the scaled control jump at `v = e^T φ_{s,T}`.
fn scaled_jump(g: &HerglotzField, h: &MapDescriptor, time: f64, v: &[Complex64]) -> Vec<Complex64> {
    let a = h.scaled_nonlinear_raw(v, time);
    let b = g.piece_at(time).scaled_nonlinear_raw(v, time);
    a.into_iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `α = d(φ_{s,t})_z [d(φ_{s,T})_z]^{-1} [h(φ_{s,T}(z)) − G(φ_{s,T}(z), T)]`.
pub fn first_order_term(
    g: &HerglotzField,
    s: f64,
    time: f64,
    t: f64,
    h: &MapDescriptor,
    points: &[CVec],
    tol: &LimitOptions,
) -> Result<Vec<CVec>> {
    check_order(g, s, time, Horizon::At(t), h)?;
    let at_needle = integrate_flow(g, s, time, points, &tol.integrator)?;
    let at_end = integrate_flow(g, s, t, points, &tol.integrator)?;
    let piece = g.piece_at(time);
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let w = &at_needle.values[i];
            let jump: Vec<Complex64> = h
                .eval_raw(w)
                .into_iter()
                .zip(piece.eval_raw(w))
                .map(|(a, b)| a - b)
                .collect();
            let x = solve(&at_needle.jacobians[i], &jump)?;
            Ok(CVec::from_vec(mat_vec(&at_end.jacobians[i], &x)))
        })
        .collect()
}

/// Jacobians `d(e^t φ_{s,t})` at `points`, or `d(f^G_s)` for `t = ∞`.
fn scaled_jacobians(
    g: &HerglotzField,
    s: f64,
    t: Horizon,
    points: &[CVec],
    tol: &LimitOptions,
) -> Result<Vec<CMatrix>> {
    Ok(match t {
        Horizon::At(t) => integrate_scaled_flow(g, s, t, points, &tol.integrator)?.jacobians,
        Horizon::Infinity => scaled_limit(g, s, points, None, tol)?.jacobians,
    })
}

/// The scaled term
/// `d(e^t φ_{s,t})_z [d(e^T φ_{s,T})_z]^{-1} e^T [h − G(·,T)](φ_{s,T}(z))`,
/// the first-order variation of `e^t φ_{s,t}` (of `f^G_s` when `t = ∞`).
pub fn scaled_first_order_term(
    g: &HerglotzField,
    s: f64,
    time: f64,
    t: Horizon,
    h: &MapDescriptor,
    points: &[CVec],
    tol: &LimitOptions,
) -> Result<Vec<CVec>> {
    check_order(g, s, time, t, h)?;
    let at_needle = integrate_scaled_flow(g, s, time, points, &tol.integrator)?;
    let end = scaled_jacobians(g, s, t, points, tol)?;
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let v = &at_needle.values[i];
            let jump = scaled_jump(g, h, time, v);
            let x = solve(&at_needle.jacobians[i], &jump)?;
            Ok(CVec::from_vec(mat_vec(&end[i], &x)))
        })
        .collect()
}

/// Jet of the scaled term at the origin through total degree `degree`.
///
/// Uses the chain rule form `[d(e^t φ_{T,t}) · (h − G(·,T))] ∘ φ_{s,T}`,
/// which needs no jet inversion.
pub fn scaled_first_order_jet(
    g: &HerglotzField,
    s: f64,
    time: f64,
    t: Horizon,
    h: &MapDescriptor,
    degree: usize,
    tol: &LimitOptions,
) -> Result<Jet> {
    check_order(g, s, time, t, h)?;
    let outer = match t {
        Horizon::At(t) => scaled_flow_jet(g, time, t, degree, &tol.integrator)?,
        Horizon::Infinity => scaled_limit(g, time, &[], Some(degree), tol)?
            .jet
            .ok_or_else(|| Error::Internal("limit returned no jet".into()))?,
    };
    let jump = h.jet(degree)?.combine(
        Complex64::new(1.0, 0.0),
        &g.piece_at(time).jet(degree)?,
        Complex64::new(-1.0, 0.0),
    )?;
    let inner = flow_jet(g, s, time, degree, &tol.integrator)?;
    outer.jacobian_apply(&jump)?.compose(&inner)
}

/// First-order deformation of the parametric representation `f_t` under the
/// needle `(T, h)`: the scaled term at `t = ∞` with base time `t`, and zero
/// for `t ≥ T`.
pub fn chain_variation(
    g: &HerglotzField,
    time: f64,
    h: &MapDescriptor,
    t: f64,
    points: &[CVec],
    tol: &LimitOptions,
) -> Result<Vec<CVec>> {
    check_times(t, t)?;
    if t >= time {
        points.iter().try_for_each(|z| z.check_in_ball(g.dim()))?;
        return Ok(points.iter().map(|_| CVec::zeros(g.dim())).collect());
    }
    scaled_first_order_term(g, t, time, Horizon::Infinity, h, points, tol)
}

/// `Y = d(e^t φ_{s,t})_z [d(e^T φ_{s,T})_z]^{-1}`, the fundamental solution of
/// the scaled linearized flow normalized to `I` at `t = T`.
pub fn fundamental_solution(
    g: &HerglotzField,
    s: f64,
    time: f64,
    t: Horizon,
    z: &CVec,
    tol: &LimitOptions,
) -> Result<CMatrix> {
    check_times(s, time)?;
    if let Horizon::At(t) = t {
        check_times(time, t)?;
    }
    let pts = std::slice::from_ref(z);
    let norm_jac = &integrate_scaled_flow(g, s, time, pts, &tol.integrator)?.jacobians[0];
    let end = &scaled_jacobians(g, s, t, pts, tol)?[0];
    // Y A = B  ⇔  Aᵀ Yᵀ = Bᵀ
    Ok(solve_matrix(&norm_jac.transpose(), &end.transpose())?.transpose())
}

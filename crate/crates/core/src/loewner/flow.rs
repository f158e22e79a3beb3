//! Point and Jacobian flows of the Loewner ODE `ż = G(z, τ)`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::HerglotzField;
use super::rk::{integrate, Stats, Tolerances};
use crate::holomap::{max_dist, norm, CVec, MapDescriptor};
use crate::linalg::{identity, CMatrix};
use crate::{Error, Result};

/// How the reported values relate to the evolution family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `values = φ_{s,t}(z)`, `jacobians = d(φ_{s,t})_z`.
    Plain,
    /// `values = e^t φ_{s,t}(z)`, `jacobians = e^t d(φ_{s,t})_z`.
    Exponential,
}

/// Values and Jacobians of `φ_{s,t}` at sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub s: f64,
    pub t: f64,
    pub scaling: Scaling,
    pub points: Vec<CVec>,
    pub values: Vec<CVec>,
    pub jacobians: Vec<CMatrix>,
    /// Accepted steps summed over all points.
    pub steps_taken: usize,
    /// Largest accumulated local error estimate over the points.
    pub error_estimate: f64,
}

/// Allowed growth of `‖φ‖` over `‖z‖` before a step counts as a
/// contraction violation.
const CONTRACTION_SLACK: f64 = 1e-8;

pub(crate) fn check_times(s: f64, t: f64) -> Result<()> {
    if !(s.is_finite() && t.is_finite()) || s < 0.0 || s > t {
        return Err(Error::InvalidTimes(format!("need 0 <= s <= t < ∞, got s={s}, t={t}")));
    }
    Ok(())
}

fn pack(z: &[Complex64], j: &CMatrix) -> Vec<Complex64> {
    let n = z.len();
    let mut y = Vec::with_capacity(n + n * n);
    y.extend_from_slice(z);
    for r in 0..n {
        for c in 0..n {
            y.push(j[(r, c)]);
        }
    }
    y
}

fn unpack(y: &[Complex64], n: usize) -> (Vec<Complex64>, CMatrix) {
    (y[..n].to_vec(), CMatrix::from_row_slice(n, n, &y[n..]))
}

fn rhs_plain(p: &MapDescriptor, n: usize, y: &[Complex64], dy: &mut [Complex64]) {
    let z = &y[..n];
    let v = p.eval_raw(z);
    dy[..n].copy_from_slice(&v);
    let dg = p.jacobian_raw(z);
    mat_mul_into(&dg, &y[n..], &mut dy[n..], n);
}

/// `out = a · J` with `J` row-major in `j`.
fn mat_mul_into(a: &CMatrix, j: &[Complex64], out: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[(r, k)] * j[k * n + c];
            }
            out[r * n + c] = acc;
        }
    }
}

/// Propagates `(z, J)` under `ż = G(z,τ)`, `J̇ = ∂G/∂z(z,τ) J` from `s` to `t`.
pub(crate) fn propagate_plain(
    field: &HerglotzField,
    s: f64,
    t: f64,
    z: &[Complex64],
    jac: &CMatrix,
    tol: &Tolerances,
) -> Result<(Vec<Complex64>, CMatrix, Stats)> {
    let n = z.len();
    let mut y = pack(z, jac);
    let mut stats = Stats::default();
    let bound = norm(z) * (1.0 + CONTRACTION_SLACK) + 1e-300;
    for (a, b, piece) in field.segments(s, t) {
        integrate(
            |_, y, dy| rhs_plain(piece, n, y, dy),
            a,
            b,
            &mut y,
            tol,
            &mut stats,
            |tau, y| contraction_guard(tau, norm(&y[..n]), bound),
        )?;
    }
    let (v, j) = unpack(&y, n);
    Ok((v, j, stats))
}

fn contraction_guard(tau: f64, r: f64, bound: f64) -> Result<()> {
    if r > bound || !r.is_finite() {
        return Err(Error::Integration {
            t: tau,
            reason: format!("trajectory left the contraction bound ({r} > {bound})"),
        });
    }
    Ok(())
}

/// Propagates the rescaled state `w(τ) = e^{τ−s} φ_{s,τ}(z)` together with
/// its Jacobian from time `from` to `to`, starting at `(w0, jac)`.
///
/// `ẇ = e^{τ−s} N(e^{−(τ−s)} w, τ)` with `N = G + id`, so `w` stays of unit
/// size however large `τ − s` gets. `radius` is `‖z‖` for the contraction
/// guard `‖e^{−(τ−s)} w‖ ≤ ‖z‖`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn propagate_scaled(
    field: &HerglotzField,
    s: f64,
    from: f64,
    to: f64,
    w0: &[Complex64],
    jac: &CMatrix,
    radius: f64,
    tol: &Tolerances,
) -> Result<(Vec<Complex64>, CMatrix, Stats)> {
    let n = w0.len();
    let mut y = pack(w0, jac);
    let mut stats = Stats::default();
    let bound = radius * (1.0 + CONTRACTION_SLACK) + 1e-300;
    for (a, b, piece) in field.segments(from, to) {
        integrate(
            |tau, y, dy| {
                let w = &y[..n];
                let shift = tau - s;
                let v = piece.scaled_nonlinear_raw(w, shift);
                dy[..n].copy_from_slice(&v);
                let shrink = (-shift).exp();
                let phi: Vec<Complex64> = w.iter().map(|x| x * shrink).collect();
                let dn = piece.nonlinear_jacobian_raw(&phi);
                mat_mul_into(&dn, &y[n..], &mut dy[n..], n);
            },
            a,
            b,
            &mut y,
            tol,
            &mut stats,
            |tau, y| contraction_guard(tau, norm(&y[..n]) * (s - tau).exp(), bound),
        )?;
    }
    let (v, j) = unpack(&y, n);
    Ok((v, j, stats))
}

fn check_points(field: &HerglotzField, points: &[CVec]) -> Result<()> {
    points.iter().try_for_each(|z| z.check_in_ball(field.dim()))
}

fn collect(
    s: f64,
    t: f64,
    scaling: Scaling,
    points: &[CVec],
    per_point: Vec<(Vec<Complex64>, CMatrix, Stats)>,
) -> FlowResult {
    let mut values = Vec::with_capacity(points.len());
    let mut jacobians = Vec::with_capacity(points.len());
    let mut steps = 0;
    let mut err: f64 = 0.0;
    for (v, j, st) in per_point {
        values.push(CVec::from_vec(v));
        jacobians.push(j);
        steps += st.steps;
        err = err.max(st.error_estimate);
    }
    FlowResult {
        s,
        t,
        scaling,
        points: points.to_vec(),
        values,
        jacobians,
        steps_taken: steps,
        error_estimate: err,
    }
}

/// `φ_{s,t}(z_j)` and `d(φ_{s,t})_{z_j}` by adaptive Dormand–Prince 5(4),
/// never stepping across a breakpoint.
pub fn integrate_flow(
    field: &HerglotzField,
    s: f64,
    t: f64,
    points: &[CVec],
    tol: &Tolerances,
) -> Result<FlowResult> {
    check_times(s, t)?;
    tol.validate()?;
    check_points(field, points)?;
    let id = identity(field.dim());
    let per_point = points
        .par_iter()
        .map(|z| propagate_plain(field, s, t, z, &id, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(s, t, Scaling::Plain, points, per_point))
}

/// `e^t φ_{s,t}(z_j)` and its Jacobian, integrated in rescaled variables.
///
/// Agrees with `e^t ·` [`integrate_flow`] but keeps full relative accuracy
/// for large `t − s`, where `φ_{s,t}` itself decays like `e^{−(t−s)}`.
pub fn integrate_scaled_flow(
    field: &HerglotzField,
    s: f64,
    t: f64,
    points: &[CVec],
    tol: &Tolerances,
) -> Result<FlowResult> {
    check_times(s, t)?;
    tol.validate()?;
    check_points(field, points)?;
    let id = identity(field.dim());
    let grow = Complex64::new(s.exp(), 0.0);
    let per_point = points
        .par_iter()
        .map(|z| {
            propagate_scaled(field, s, s, t, z, &id, z.norm(), tol)
                .map(|(w, j, st)| (w.iter().map(|x| x * grow).collect(), j * grow, st))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(s, t, Scaling::Exponential, points, per_point))
}

/// Both routes to `φ_{u,t}`: direct integration and `φ_{s,t} ∘ φ_{u,s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionCheck {
    pub direct: FlowResult,
    /// Values `φ_{s,t}(φ_{u,s}(z))` and chained Jacobians, indexed by the
    /// original points.
    pub composed: FlowResult,
    /// Largest `‖direct − composed‖` over the points.
    pub residual: f64,
}

/// Evolution-family consistency: `φ_{u,t} = φ_{s,t} ∘ φ_{u,s}`.
pub fn evolution_map(
    field: &HerglotzField,
    u: f64,
    s: f64,
    t: f64,
    points: &[CVec],
    tol: &Tolerances,
) -> Result<EvolutionCheck> {
    if !(u <= s && s <= t) {
        return Err(Error::InvalidTimes(format!("need u <= s <= t, got {u}, {s}, {t}")));
    }
    let direct = integrate_flow(field, u, t, points, tol)?;
    let first = integrate_flow(field, u, s, points, tol)?;
    let second = integrate_flow(field, s, t, &first.values, tol)?;
    let jacobians = second
        .jacobians
        .iter()
        .zip(&first.jacobians)
        .map(|(b, a)| b * a)
        .collect();
    let composed = FlowResult {
        s: u,
        t,
        scaling: Scaling::Plain,
        points: points.to_vec(),
        values: second.values.clone(),
        jacobians,
        steps_taken: first.steps_taken + second.steps_taken,
        error_estimate: first.error_estimate + second.error_estimate,
    };
    let residual = direct
        .values
        .iter()
        .zip(&composed.values)
        .map(|(a, b)| max_dist(a, b))
        .fold(0.0, f64::max);
    Ok(EvolutionCheck {
        direct,
        composed,
        residual,
    })
}

//! Taylor-jet flows: the coefficient ODE obtained by composing the jet of
//! the active piece with the current jet of the flow.

use num_complex::Complex64;

use super::field::HerglotzField;
use super::flow::check_times;
use super::rk::{integrate, Stats, Tolerances};
use crate::holomap::Jet;
use crate::Result;

/// Jet of `N = G + id` for every piece, at degree `degree`.
pub(crate) fn nonlinear_jets(field: &HerglotzField, degree: usize) -> Result<Vec<Jet>> {
    let id = Jet::identity(field.dim(), degree)?;
    field
        .pieces()
        .iter()
        .map(|p| p.jet(degree)?.combine(Complex64::new(1.0, 0.0), &id, Complex64::new(1.0, 0.0)))
        .collect()
}

/// Jet of `φ_{s,t}` at the origin through total degree `degree`.
///
/// Integrates `Φ̇ = jet(G(·,τ)) ∘ Φ`, `Φ(s) = id`; the composition is exact
/// through `degree` because `Φ` has no constant term.
pub fn flow_jet(
    field: &HerglotzField,
    s: f64,
    t: f64,
    degree: usize,
    tol: &Tolerances,
) -> Result<Jet> {
    check_times(s, t)?;
    tol.validate()?;
    let id = Jet::identity(field.dim(), degree)?;
    let basis = id.basis().clone();
    let piece_jets: Vec<Jet> = field
        .pieces()
        .iter()
        .map(|p| p.jet(degree))
        .collect::<Result<_>>()?;
    let mut y = id.to_flat();
    let mut stats = Stats::default();
    for (a, b, _) in field.segments(s, t) {
        let g = &piece_jets[field.piece_index(a)];
        integrate(
            |_, y, dy| {
                let cur = Jet::from_flat(basis.clone(), y);
                let comps = basis.compose(g.components(), cur.components());
                dy.copy_from_slice(&Jet::from_parts(basis.clone(), comps).to_flat());
            },
            a,
            b,
            &mut y,
            tol,
            &mut stats,
            |_, _| Ok(()),
        )?;
    }
    Ok(Jet::from_flat(basis, &y))
}

/// Advances the jet of `w(τ) = e^{τ−s} φ_{s,τ}` from `from` to `to`.
pub(crate) fn propagate_scaled_jet(
    field: &HerglotzField,
    nonlinear: &[Jet],
    s: f64,
    from: f64,
    to: f64,
    start: &Jet,
    tol: &Tolerances,
    stats: &mut Stats,
) -> Result<Jet> {
    let basis = start.basis().clone();
    let mut y = start.to_flat();
    for (a, b, _) in field.segments(from, to) {
        let nl = &nonlinear[field.piece_index(a)];
        integrate(
            |tau, y, dy| {
                // e^{τ−s} N(e^{−(τ−s)} W): degree-m coefficients of N pick up e^{−(m−1)(τ−s)}
                let shift = tau - s;
                let scaled = nl.dilate((-shift).exp()).scale(Complex64::new(shift.exp(), 0.0));
                let cur = Jet::from_flat(basis.clone(), y);
                let comps = basis.compose(scaled.components(), cur.components());
                dy.copy_from_slice(&Jet::from_parts(basis.clone(), comps).to_flat());
            },
            a,
            b,
            &mut y,
            tol,
            stats,
            |_, _| Ok(()),
        )?;
    }
    Ok(Jet::from_flat(basis, &y))
}

/// Jet of `e^{t} φ_{s,t}` (rescaled integration, accurate for large `t − s`).
pub fn scaled_flow_jet(
    field: &HerglotzField,
    s: f64,
    t: f64,
    degree: usize,
    tol: &Tolerances,
) -> Result<Jet> {
    check_times(s, t)?;
    tol.validate()?;
    let nonlinear = nonlinear_jets(field, degree)?;
    let id = Jet::identity(field.dim(), degree)?;
    let mut stats = Stats::default();
    let w = propagate_scaled_jet(field, &nonlinear, s, s, t, &id, tol, &mut stats)?;
    Ok(w.scale(Complex64::new(s.exp(), 0.0)))
}

//! Necessary conditions for extremality built on the Hamiltonian.

use num_complex::Complex64;
use rayon::prelude::*;

use super::functional::LinearFunctional;
use super::scan::{check_grid, hamiltonian_scan_with, maximize, Family, HamiltonianScan, Maximizer};
use super::transport::Transport;
use crate::holomap::{margin, CVec, Jet, MembershipGrid};
use crate::loewner::{HerglotzField, LimitOptions};
use crate::{Error, Result};

pub const DEFAULT_SCREEN_MARGIN: f64 = 1e-6;
pub const DEFAULT_T_LIMIT: f64 = 20.0;
/// `|L_t(P)|` above this counts as a non-constancy witness.
pub const PROBE_THRESHOLD: f64 = 1e-10;

/// `m(t)` on a time grid.
pub fn hamiltonian_scan(
    l: &LinearFunctional,
    g: &HerglotzField,
    family: &Family,
    t_grid: &[f64],
    opts: &LimitOptions,
) -> Result<HamiltonianScan> {
    check_grid(g, t_grid)?;
    hamiltonian_scan_with(&Transport::new(l, g, opts)?, family, t_grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PontryaginReport {
    pub scan: HamiltonianScan,
    /// `Re L_t(G(·,t))` per grid time.
    pub active_values: Vec<f64>,
    /// `m(t) − Re L_t(G(·,t))` per grid time.
    pub violations: Vec<f64>,
    pub worst_violation: f64,
    pub worst_t: f64,
    pub worst_maximizer: Maximizer,
    pub slack: f64,
    pub pass: bool,
}

/// Checks `Re L_t(G(·,t)) ≥ m(t) − slack` on the grid.
pub fn pontryagin_check(
    l: &LinearFunctional,
    g: &HerglotzField,
    family: &Family,
    t_grid: &[f64],
    slack: f64,
    opts: &LimitOptions,
) -> Result<PontryaginReport> {
    check_grid(g, t_grid)?;
    let transport = Transport::new(l, g, opts)?;
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let lt = transport.at(t)?;
            let (m, arg) = maximize(&lt, family, g.dim())?;
            Ok((m, arg, lt.eval(g.piece_at(t))?.re))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m_values = Vec::new();
    let mut maximizers = Vec::new();
    let mut active_values = Vec::new();
    for (m, arg, a) in rows {
        m_values.push(m);
        maximizers.push(arg);
        active_values.push(a);
    }
    let violations: Vec<f64> = m_values.iter().zip(&active_values).map(|(m, a)| m - a).collect();
    let mut worst = 0;
    for (i, v) in violations.iter().enumerate() {
        if *v > violations[worst] {
            worst = i;
        }
    }
    let constancy_deviation = m_values.iter().map(|m| (m - m_values[0]).abs()).fold(0.0, f64::max);
    Ok(PontryaginReport {
        worst_violation: violations[worst],
        worst_t: t_grid[worst],
        worst_maximizer: maximizers[worst].clone(),
        pass: violations.iter().all(|v| *v <= slack),
        scan: HamiltonianScan {
            t_grid: t_grid.to_vec(),
            m_values,
            maximizers,
            constancy_deviation,
        },
        active_values,
        violations,
        slack,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PommerenkeReport {
    /// `Re L(F)`.
    pub re_l_f: f64,
    pub m_initial: f64,
    pub m_limit: f64,
    pub t_limit: f64,
    /// `|m(0) + Re L(F)|`; only meaningful when the family contains the
    /// maximizer over the whole class.
    pub initial_gap: f64,
    /// `|m(t_limit) + Re L(F)|`, small for any family.
    pub limit_gap: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `m(0)` and `m(t_limit)` with `−Re L(F)`. Passes when the limit
/// gap is within `tol`.
pub fn pommerenke_check(
    l: &LinearFunctional,
    g: &HerglotzField,
    family: &Family,
    t_limit: f64,
    tol: f64,
    opts: &LimitOptions,
) -> Result<PommerenkeReport> {
    check_grid(g, &[0.0, t_limit])?;
    let transport = Transport::new(l, g, opts)?;
    let re_l_f = transport.value_of_f()?.re;
    let scan = hamiltonian_scan_with(&transport, family, &[0.0, t_limit])?;
    let (m_initial, m_limit) = (scan.m_values[0], scan.m_values[1]);
    let limit_gap = (m_limit + re_l_f).abs();
    Ok(PommerenkeReport {
        re_l_f,
        m_initial,
        m_limit,
        t_limit,
        initial_gap: (m_initial + re_l_f).abs(),
        limit_gap,
        tol,
        pass: limit_gap <= tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenResult {
    pub time: f64,
    /// Grid supremum of `Re⟨G(z,T), z⟩/‖z‖²`.
    pub sup_value: f64,
    pub sup_point: CVec,
    pub margin: f64,
    /// `sup_value < −margin`: `e^t φ_t` is then not extremal for `t > T`.
    pub fires: bool,
}

/// Support-point screen at time `T` on `grid` (critical directions of the
/// active piece are added automatically).
pub fn support_screen(g: &HerglotzField, time: f64, grid: &MembershipGrid, margin_tol: f64) -> Result<ScreenResult> {
    check_grid(g, &[time])?;
    let piece = g.piece_at(time);
    let points = grid.points_for(piece);
    if points.is_empty() {
        return Err(Error::EmptyGrid("screen grid".into()));
    }
    let mut best = (f64::NEG_INFINITY, CVec::zeros(g.dim()));
    for z in points {
        let v = margin(piece, &z);
        if !(v <= best.0) {
            best = (if v.is_nan() { f64::INFINITY } else { v }, z);
        }
    }
    Ok(ScreenResult {
        time,
        sup_value: best.0,
        sup_point: best.1,
        margin: margin_tol,
        fires: best.0 < -margin_tol,
    })
}

/// Screen on the near-boundary grid with the default margin.
pub fn support_screen_default(g: &HerglotzField, time: f64) -> Result<ScreenResult> {
    support_screen(g, time, &MembershipGrid::near_boundary(g.dim()), DEFAULT_SCREEN_MARGIN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeValue {
    pub component: usize,
    pub alpha: Vec<u32>,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub t: f64,
    /// `L_t(e_k z^α)` for every monomial with `2 ≤ |α| ≤ degree`.
    pub values: Vec<ProbeValue>,
    pub max_modulus: f64,
    /// First monomial with `|L_t| > PROBE_THRESHOLD`.
    pub witness: Option<ProbeValue>,
}

/// Evaluates `L_t` on the monomial perturbations `e_k z^α`, `|α| ≥ 2`. A
/// nonzero value shows `L_t` is not constant on `M_n`, since `−z + εP`
/// stays in the class for small `ε`.
pub fn nonconstancy_probe(
    l: &LinearFunctional,
    g: &HerglotzField,
    t: f64,
    degree: usize,
    opts: &LimitOptions,
) -> Result<ProbeReport> {
    if degree < 2 {
        return Err(Error::InvalidArgument("probe degree must be at least 2".into()));
    }
    check_grid(g, &[t])?;
    let lt = Transport::new(l, g, opts)?.at(t)?;
    let n = g.dim();
    let template = Jet::zero(n, degree)?;
    let mut values = Vec::new();
    for k in 0..n {
        for alpha in template.exponents() {
            if alpha.iter().sum::<u32>() < 2 {
                continue;
            }
            let mut p = template.clone();
            p.set(k, &alpha, Complex64::new(1.0, 0.0))?;
            values.push(ProbeValue {
                component: k,
                value: lt.eval_jet(&p)?,
                alpha,
            });
        }
    }
    let max_modulus = values.iter().map(|v| v.value.norm()).fold(0.0, f64::max);
    let witness = values.iter().find(|v| v.value.norm() > PROBE_THRESHOLD).cloned();
    Ok(ProbeReport {
        t,
        values,
        max_modulus,
        witness,
    })
}

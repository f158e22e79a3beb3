//! Brute-force check of the first-order terms along a ladder of needle widths.

use rayon::prelude::*;

use super::needle::{insert_window, NeedleSpec};
use super::term::{first_order_term, scaled_first_order_term, Horizon};
use crate::holomap::{max_dist, norm, CVec};
use crate::loewner::{
    integrate_flow, integrate_scaled_flow, scaled_limit, scaled_limit_at, HerglotzField,
    LimitOptions, Tolerances,
};
use crate::{Error, Result};

/// Largest admissible residual ratio between consecutive rungs.
pub const DEFAULT_DECAY_THRESHOLD: f64 = 0.75;

/// The default ladder `1e-1, 5e-2, 2e-2, …, 1e-4`.
pub fn default_ladder() -> Vec<f64> {
    let mut out = Vec::new();
    for e in 1..=4 {
        let p = 10f64.powi(-e);
        out.push(p);
        if e < 4 {
            out.push(p / 2.0);
            out.push(p / 5.0);
        }
    }
    out
}

/// Options for [`verify_variation`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub ladder: Vec<f64>,
    /// Compare `(e^t φ^ε − e^t φ)/ε` with the scaled term; otherwise the
    /// unscaled quotient with `first_order_term` (finite `t` only).
    pub scaled: bool,
    pub threshold: f64,
    /// Residuals below `floor · (1 + ‖α‖)` count as exact.
    pub floor: f64,
    pub limit: LimitOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            ladder: default_ladder(),
            scaled: true,
            threshold: DEFAULT_DECAY_THRESHOLD,
            floor: 1e-9,
            limit: LimitOptions {
                tol: 1e-11,
                integrator: Tolerances::new(1e-12, 1e-12),
                ..Default::default()
            },
        }
    }
}

/// Residuals of the difference quotients against the predicted term.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub ladder: Vec<f64>,
    /// `sup_j ‖(φ^ε − φ)(z_j)/ε − α(z_j)‖` per rung.
    pub residuals: Vec<f64>,
    /// `residual_{i+1} / residual_i`; zero when the later rung is below the
    /// floor.
    pub decay_ratios: Vec<f64>,
    pub threshold: f64,
    /// `sup_j ‖α(z_j)‖`.
    pub predicted_norm: f64,
    /// Last residual divided by `predicted_norm` (zero if both vanish).
    pub normalized_terminal: f64,
    /// Common horizon used for `t = ∞`.
    pub horizon: Option<f64>,
    pub scaled: bool,
    pub pass: bool,
}

/// Integrates the needle fields for every `ε` in the ladder and compares the
/// difference quotients with the first-order term.
///
/// Base and needle flows are integrated on fields with the same breakpoints
/// `T−ε, T` inserted, so both see identical step boundaries. For `t = ∞` they
/// are differenced at the common horizon of the base limit.
pub fn verify_variation(
    g: &HerglotzField,
    s: f64,
    needle: &NeedleSpec,
    t: Horizon,
    points: &[CVec],
    opts: &VerifyOptions,
) -> Result<ResidualReport> {
    let ladder = &opts.ladder;
    if ladder.is_empty() || ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("ladder must be nonempty and strictly decreasing".into()));
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid("no sample points".into()));
    }
    let time = needle.time();
    if ladder[0] > time - s {
        return Err(Error::InvalidNeedle(format!(
            "largest width {} does not fit in ({s}, {time})",
            ladder[0]
        )));
    }
    if t.is_infinite() && !opts.scaled {
        return Err(Error::InvalidArgument("t = ∞ needs the scaled variant".into()));
    }
    let h = needle.control();
    let predicted = if opts.scaled {
        scaled_first_order_term(g, s, time, t, h, points, &opts.limit)?
    } else {
        let Horizon::At(t) = t else { unreachable!() };
        first_order_term(g, s, time, t, h, points, &opts.limit)?
    };
    let horizon = match t {
        Horizon::At(t) => t,
        Horizon::Infinity => {
            let lim = scaled_limit(g, s, points, None, &opts.limit)?;
            lim.horizon.max(time + (lim.horizon - s))
        }
    };
    let tol = &opts.limit.integrator;
    let flow = |field: &HerglotzField| -> Result<Vec<CVec>> {
        Ok(if t.is_infinite() {
            scaled_limit_at(field, s, horizon, points, None, tol)?.values
        } else if opts.scaled {
            integrate_scaled_flow(field, s, horizon, points, tol)?.values
        } else {
            integrate_flow(field, s, horizon, points, tol)?.values
        })
    };
    let residuals = ladder
        .par_iter()
        .map(|&eps| {
            let spec = needle.with_eps(eps)?;
            let base = insert_window(g, time - eps, time, None, false)?;
            let varied = insert_window(g, time - eps, time, Some(spec.control()), false)?;
            let a = flow(&base)?;
            let b = flow(&varied)?;
            let mut r: f64 = 0.0;
            for ((x, y), p) in a.iter().zip(&b).zip(&predicted) {
                let q: Vec<_> = x.iter().zip(y.iter()).map(|(x, y)| (y - x) / eps).collect();
                r = r.max(max_dist(&q, p));
            }
            Ok(r)
        })
        .collect::<Result<Vec<f64>>>()?;
    let predicted_norm = predicted.iter().map(|p| norm(p)).fold(0.0, f64::max);
    let floor = opts.floor * (1.0 + predicted_norm);
    let decay_ratios: Vec<f64> = residuals
        .windows(2)
        .map(|w| if w[1] <= floor { 0.0 } else { w[1] / w[0].max(floor) })
        .collect();
    let last = *residuals.last().unwrap();
    let normalized_terminal = if predicted_norm > 0.0 {
        last / predicted_norm
    } else if last <= floor {
        0.0
    } else {
        f64::INFINITY
    };
    let pass = decay_ratios.iter().all(|&r| r <= opts.threshold);
    Ok(ResidualReport {
        ladder: ladder.clone(),
        residuals,
        decay_ratios,
        threshold: opts.threshold,
        predicted_norm,
        normalized_terminal,
        horizon: t.is_infinite().then_some(horizon),
        scaled: opts.scaled,
        pass,
    })
}

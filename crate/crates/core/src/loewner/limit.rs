//! The infinite-horizon limit `f^G_s = lim_{t→∞} e^t φ_{s,t}`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::HerglotzField;
use super::flow::{check_times, propagate_scaled};
use super::jetflow::{nonlinear_jets, propagate_scaled_jet};
use super::rk::{Stats, Tolerances};
use crate::holomap::{max_dist, norm, CVec, Jet};
use crate::linalg::{identity, max_abs, CMatrix};
use crate::{Error, Result};

/// Horizon offsets are measured from the base time `s`.
pub const DEFAULT_FIRST_HORIZON: f64 = 2.0;
pub const HORIZON_CAP: f64 = 40.0;

/// Stabilization settings for [`scaled_limit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    /// Stop once successive checkpoints differ by at most this much.
    pub tol: f64,
    pub integrator: Tolerances,
    /// First checkpoint `T − s`; later checkpoints double it.
    pub first_horizon: f64,
    /// Largest admissible `T − s`.
    pub max_horizon: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            tol: 1e-10,
            integrator: Tolerances::default(),
            first_horizon: DEFAULT_FIRST_HORIZON,
            max_horizon: HORIZON_CAP,
        }
    }
}

impl LimitOptions {
    pub fn with_tol(tol: f64) -> LimitOptions {
        LimitOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Samples (and optionally the jet) of `f^G_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledLimit {
    pub s: f64,
    /// Absolute time `T` at which the values were taken.
    pub horizon: f64,
    pub points: Vec<CVec>,
    pub values: Vec<CVec>,
    pub jacobians: Vec<CMatrix>,
    pub jet: Option<Jet>,
    /// Geometric-tail estimate of `‖f^G_s − e^T φ_{s,T}‖` from the last two
    /// checkpoints (zero for a fixed horizon with nothing to compare).
    pub truncation_bound: f64,
    pub steps_taken: usize,
}

struct State {
    w: Vec<Vec<Complex64>>,
    jw: Vec<CMatrix>,
    jet: Option<Jet>,
    steps: usize,
}

impl State {
    fn start(field: &HerglotzField, points: &[CVec], degree: Option<usize>) -> Result<State> {
        let id = identity(field.dim());
        let jet = match degree {
            Some(d) => Some(Jet::identity(field.dim(), d)?),
            None => None,
        };
        Ok(State {
            w: points.iter().map(|z| z.to_vec()).collect(),
            jw: vec![id; points.len()],
            jet,
            steps: 0,
        })
    }

    fn advance(
        &mut self,
        field: &HerglotzField,
        nonlinear: &[Jet],
        s: f64,
        from: f64,
        to: f64,
        points: &[CVec],
        tol: &Tolerances,
    ) -> Result<()> {
        let moved = points
            .par_iter()
            .zip(self.w.par_iter().zip(self.jw.par_iter()))
            .map(|(z, (w, jw))| propagate_scaled(field, s, from, to, w, jw, z.norm(), tol))
            .collect::<Result<Vec<_>>>()?;
        self.w.clear();
        self.jw.clear();
        for (w, jw, st) in moved {
            self.w.push(w);
            self.jw.push(jw);
            self.steps += st.steps;
        }
        if let Some(j) = &self.jet {
            let mut st = Stats::default();
            self.jet = Some(propagate_scaled_jet(field, nonlinear, s, from, to, j, tol, &mut st)?);
            self.steps += st.steps;
        }
        // a-priori growth bound ‖e^{τ−s} φ_{s,τ}(z)‖ ≤ ‖z‖/(1−‖z‖)²
        for (z, w) in points.iter().zip(&self.w) {
            let r = z.norm();
            let bound = r / ((1.0 - r) * (1.0 - r)) * (1.0 + 1e-8) + 1e-300;
            if norm(w) > bound {
                return Err(Error::Integration {
                    t: to,
                    reason: format!("decay guard violated: {} > {bound}", norm(w)),
                });
            }
        }
        Ok(())
    }

    fn change(&self, prev: &State) -> f64 {
        let mut c: f64 = 0.0;
        for (a, b) in self.w.iter().zip(&prev.w) {
            c = c.max(max_dist(a, b));
        }
        for (a, b) in self.jw.iter().zip(&prev.jw) {
            c = c.max(max_abs(&(a - b)));
        }
        if let (Some(a), Some(b)) = (&self.jet, &prev.jet) {
            c = c.max(a.max_abs_diff(b));
        }
        c
    }

    fn clone_shallow(&self) -> State {
        State {
            w: self.w.clone(),
            jw: self.jw.clone(),
            jet: self.jet.clone(),
            steps: self.steps,
        }
    }

    fn finish(self, s: f64, horizon: f64, points: &[CVec], bound: f64) -> ScaledLimit {
        let grow = Complex64::new(s.exp(), 0.0);
        ScaledLimit {
            s,
            horizon,
            points: points.to_vec(),
            values: self
                .w
                .into_iter()
                .map(|w| CVec::from_vec(w.into_iter().map(|x| x * grow).collect()))
                .collect(),
            jacobians: self.jw.into_iter().map(|j| j * grow).collect(),
            jet: self.jet.map(|j| j.scale(grow)),
            truncation_bound: bound * s.exp(),
            steps_taken: self.steps,
        }
    }
}

fn check_inputs(field: &HerglotzField, points: &[CVec], degree: Option<usize>) -> Result<()> {
    points.iter().try_for_each(|z| z.check_in_ball(field.dim()))?;
    if points.is_empty() && degree.is_none() {
        return Err(Error::InvalidArgument("need sample points or a jet degree".into()));
    }
    Ok(())
}

/// `f^G_s` on `points` and/or as a jet of total degree `degree`.
///
/// Integrates `w = e^{τ−s} φ_{s,τ}` in rescaled variables to the checkpoints
/// `s + h, s + 2h, s + 4h, …` (capped at `s + max_horizon`) and stops as soon
/// as two consecutive checkpoints agree to `opts.tol` in values, Jacobians
/// and jet coefficients. Returns [`Error::HorizonCap`] otherwise.
pub fn scaled_limit(
    field: &HerglotzField,
    s: f64,
    points: &[CVec],
    degree: Option<usize>,
    opts: &LimitOptions,
) -> Result<ScaledLimit> {
    check_times(s, s)?;
    opts.integrator.validate()?;
    if !(opts.tol > 0.0) || !(opts.first_horizon > 0.0) || !(opts.max_horizon >= opts.first_horizon) {
        return Err(Error::InvalidArgument(format!("invalid limit options {opts:?}")));
    }
    check_inputs(field, points, degree)?;
    let nonlinear = match degree {
        Some(d) => nonlinear_jets(field, d)?,
        None => Vec::new(),
    };
    let mut state = State::start(field, points, degree)?;
    let mut offset = opts.first_horizon;
    state.advance(field, &nonlinear, s, s, s + offset, points, &opts.integrator)?;
    loop {
        let next = (2.0 * offset).min(opts.max_horizon);
        let prev = state.clone_shallow();
        state.advance(field, &nonlinear, s, s + offset, s + next, points, &opts.integrator)?;
        let change = state.change(&prev);
        if change <= opts.tol {
            // the tail decays at least like e^{−τ}: sum the geometric series
            let q = (offset - next).exp();
            let bound = change * q / (1.0 - q);
            return Ok(state.finish(s, s + next, points, bound));
        }
        if next >= opts.max_horizon {
            return Err(Error::HorizonCap {
                horizon: s + next,
                last_change: change,
            });
        }
        offset = next;
    }
}

/// `e^T φ_{s,T}` at a fixed horizon `T`, in the same rescaled variables as
/// [`scaled_limit`]. Used to difference two flows at a common horizon.
pub fn scaled_limit_at(
    field: &HerglotzField,
    s: f64,
    horizon: f64,
    points: &[CVec],
    degree: Option<usize>,
    tol: &Tolerances,
) -> Result<ScaledLimit> {
    check_times(s, horizon)?;
    tol.validate()?;
    check_inputs(field, points, degree)?;
    let nonlinear = match degree {
        Some(d) => nonlinear_jets(field, d)?,
        None => Vec::new(),
    };
    let mut state = State::start(field, points, degree)?;
    state.advance(field, &nonlinear, s, s, horizon, points, tol)?;
    Ok(state.finish(s, horizon, points, 0.0))
}

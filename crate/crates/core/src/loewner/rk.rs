//! Embedded Dormand–Prince 5(4) pair on complex state vectors.
//!
//! The error norm treats real and imaginary parts as separate unknowns, so
//! this is the usual real method applied to the flattened system.

use num_complex::Complex64;

use crate::{Error, Result};

/// Integrator tolerances and step budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of accepted steps per trajectory.
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs: 1e-10,
            rel: 1e-10,
            max_steps: 1_000_000,
        }
    }
}

impl Tolerances {
    pub fn new(abs: f64, rel: f64) -> Tolerances {
        Tolerances {
            abs,
            rel,
            ..Default::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.abs > 0.0 && self.rel >= 0.0) || self.max_steps == 0 {
            return Err(Error::InvalidArgument(format!(
                "invalid tolerances {self:?}"
            )));
        }
        Ok(())
    }
}

/// Counters accumulated over one trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Stats {
    pub steps: usize,
    pub rejected: usize,
    /// Sum of the accepted local error estimates (max-norm, state units).
    pub error_estimate: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn lin(y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])], out: &mut [Complex64]) {
    for i in 0..y.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            if *c != 0.0 {
                acc += k[i] * *c;
            }
        }
        out[i] = y[i] + acc * h;
    }
}

fn error_norm(y: &[Complex64], y_new: &[Complex64], err: &[Complex64], tol: &Tolerances) -> f64 {
    let mut sum = 0.0;
    for i in 0..y.len() {
        let sc_re = tol.abs + tol.rel * y[i].re.abs().max(y_new[i].re.abs());
        let sc_im = tol.abs + tol.rel * y[i].im.abs().max(y_new[i].im.abs());
        sum += (err[i].re / sc_re).powi(2) + (err[i].im / sc_im).powi(2);
    }
    (sum / (2 * y.len()) as f64).sqrt()
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Integrates the autonomous-in-segment system `y' = f(t, y)` from `t0` to
/// `t1` in place. `on_accept` sees every accepted state and may abort.
pub(crate) fn integrate<F, A>(
    mut f: F,
    t0: f64,
    t1: f64,
    y: &mut [Complex64],
    tol: &Tolerances,
    stats: &mut Stats,
    mut on_accept: A,
) -> Result<()>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    A: FnMut(f64, &[Complex64]) -> Result<()>,
{
    if t1 <= t0 {
        return Ok(());
    }
    let n = y.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut err = vec![zero; n];

    let mut t = t0;
    f(t, y, &mut k1);

    // initial step (Hairer–Nørsett–Wanner, II.4)
    let sc: Vec<f64> = y.iter().map(|v| tol.abs + tol.rel * v.norm()).collect();
    let d0 = (y.iter().zip(&sc).map(|(v, s)| (v.norm() / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (k1.iter().zip(&sc).map(|(v, s)| (v.norm() / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(t1 - t0);
    lin(y, h, &[(1.0, &k1)], &mut tmp);
    f(t + h, &tmp, &mut k2);
    let d2 = (k2
        .iter()
        .zip(&k1)
        .zip(&sc)
        .map(|((a, b), s)| ((a - b).norm() / s).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        / h;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    h = (100.0 * h).min(h1).min(t1 - t0);

    let mut accepted_here = 0usize;
    loop {
        let remaining = t1 - t;
        if remaining <= 0.0 {
            break;
        }
        let last = h >= remaining * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }

        lin(y, h, &[(A21, &k1)], &mut tmp);
        f(t + C2 * h, &tmp, &mut k2);
        lin(y, h, &[(A31, &k1), (A32, &k2)], &mut tmp);
        f(t + C3 * h, &tmp, &mut k3);
        lin(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut tmp);
        f(t + C4 * h, &tmp, &mut k4);
        lin(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut tmp);
        f(t + C5 * h, &tmp, &mut k5);
        lin(
            y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            &mut tmp,
        );
        f(t + h, &tmp, &mut k6);
        lin(
            y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            &mut y_new,
        );
        let t_new = if last { t1 } else { t + h };
        f(t_new, &y_new, &mut k7);
        for i in 0..n {
            err[i] = (k1[i] * E1
                + k3[i] * E3
                + k4[i] * E4
                + k5[i] * E5
                + k6[i] * E6
                + k7[i] * E7)
                * h;
        }
        let en = error_norm(y, &y_new, &err, tol);
        if !en.is_finite() {
            stats.rejected += 1;
            h *= FAC_MIN;
            continue;
        }
        if en <= 1.0 {
            stats.steps += 1;
            accepted_here += 1;
            stats.error_estimate += max_norm(&err);
            y.copy_from_slice(&y_new);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            on_accept(t, y)?;
            if accepted_here >= tol.max_steps && t < t1 {
                return Err(Error::Integration {
                    t,
                    reason: format!("step budget of {} exhausted", tol.max_steps),
                });
            }
            if last {
                break;
            }
            let fac = if en == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * en.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (SAFETY * en.powf(-0.2)).clamp(FAC_MIN, 1.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_accurate() {
        let mut y = vec![Complex64::new(1.0, 0.5)];
        let mut stats = Stats::default();
        let lambda = Complex64::new(-1.0, 2.0);
        integrate(
            |_, y, dy| dy[0] = lambda * y[0],
            0.0,
            3.0,
            &mut y,
            &Tolerances::default(),
            &mut stats,
            |_, _| Ok(()),
        )
        .unwrap();
        let exact = Complex64::new(1.0, 0.5) * (lambda * 3.0).exp();
        assert!((y[0] - exact).norm() < 1e-9);
        assert!(stats.steps > 0);
    }

    #[test]
    fn logistic_equation_matches_closed_form() {
        // y' = y(1−y), y(0) = 0.1
        let mut y = vec![Complex64::new(0.1, 0.0)];
        let mut stats = Stats::default();
        integrate(
            |_, y, dy| dy[0] = y[0] * (1.0 - y[0]),
            0.0,
            5.0,
            &mut y,
            &Tolerances::new(1e-12, 1e-12),
            &mut stats,
            |_, _| Ok(()),
        )
        .unwrap();
        let exact = 1.0 / (1.0 + 9.0 * (-5.0f64).exp());
        assert!((y[0].re - exact).abs() < 1e-11);
    }

    #[test]
    fn step_budget_is_enforced() {
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let mut stats = Stats::default();
        let tol = Tolerances {
            abs: 1e-12,
            rel: 1e-12,
            max_steps: 3,
        };
        let r = integrate(
            |t, _, dy| dy[0] = Complex64::new((50.0 * t).cos(), 0.0),
            0.0,
            10.0,
            &mut y,
            &tol,
            &mut stats,
            |_, _| Ok(()),
        );
        assert!(matches!(r, Err(Error::Integration { .. })));
    }

    #[test]
    fn empty_interval_is_a_noop() {
        let mut y = vec![Complex64::new(0.3, 0.0)];
        let mut stats = Stats::default();
        integrate(
            |_, _, _| panic!("must not evaluate"),
            1.0,
            1.0,
            &mut y,
            &Tolerances::default(),
            &mut stats,
            |_, _| Ok(()),
        )
        .unwrap();
        assert_eq!(stats.steps, 0);
    }
}

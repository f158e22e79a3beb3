//! Transported functionals `L_t(h) = L(dF · [dφ_t]^{-1} · h(φ_t))`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::functional::{eval_functional, Atom, LinearFunctional};
use crate::holomap::{CVec, Jet, MapDescriptor};
use crate::linalg::solve;
use crate::loewner::{
    check_times, integrate_scaled_flow, scaled_flow_jet, scaled_limit, HerglotzField, LimitOptions,
    ScaledLimit,
};
use crate::{Error, Result};

/// Data of `F = f^G` needed by every `L_t`, computed once.
#[derive(Debug, Clone)]
pub struct Transport {
    functional: LinearFunctional,
    field: HerglotzField,
    points: Vec<CVec>,
    f: ScaledLimit,
    opts: LimitOptions,
}

impl Transport {
    /// Integrates `F` at the point atoms and, if there are coefficient atoms,
    /// as a jet of the largest degree they need.
    pub fn new(l: &LinearFunctional, g: &HerglotzField, opts: &LimitOptions) -> Result<Transport> {
        if l.dim() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                found: l.dim(),
            });
        }
        let points = l.points();
        let degree = Some(l.max_degree()).filter(|&d| d > 0);
        let f = scaled_limit(g, 0.0, &points, degree, opts)?;
        Ok(Transport {
            functional: l.clone(),
            field: g.clone(),
            points,
            f,
            opts: *opts,
        })
    }

    pub fn functional(&self) -> &LinearFunctional {
        &self.functional
    }

    pub fn field(&self) -> &HerglotzField {
        &self.field
    }

    /// The cached samples of `F`.
    pub fn limit(&self) -> &ScaledLimit {
        &self.f
    }

    /// `L(F)`.
    pub fn value_of_f(&self) -> Result<Complex64> {
        eval_functional(&self.functional, &self.f)
    }

    /// Precomputes `L_t` as a linear form on map data.
    ///
    /// Point atoms become row vectors `weight · e_kᵀ dF_z [dv_t]^{-1}` acting
    /// on `e^t h(e^{-t} v_t)` with `v_t = e^t φ_t(z)`. Coefficient atoms
    /// become weights on the Taylor coefficients of `h`, obtained by
    /// transporting each monomial through `[d(f_t) · h] ∘ φ_t`.
    pub fn at(&self, t: f64) -> Result<TransportedFunctional> {
        check_times(0.0, t)?;
        if !self.field.is_regular(t) {
            return Err(Error::InvalidTimes(format!("t = {t} is a breakpoint of the field")));
        }
        let tol = &self.opts.integrator;
        let mut rows = Vec::new();
        if !self.points.is_empty() {
            let flow = integrate_scaled_flow(&self.field, 0.0, t, &self.points, tol)?;
            for atom in self.functional.atoms() {
                if let Atom::Point { z, component, weight } = atom {
                    let i = self.points.iter().position(|p| p == z).expect("cached point");
                    let df = &self.f.jacobians[i];
                    let target: Vec<Complex64> = df.row(*component).iter().copied().collect();
                    let row = solve(&flow.jacobians[i].transpose(), &target)?;
                    rows.push(PointRow {
                        v: flow.values[i].clone(),
                        row: row.into_iter().map(|x| x * weight).collect(),
                    });
                }
            }
        }
        let degree = self.functional.max_degree();
        let coeff = if degree > 0 {
            Some(self.coefficient_weights(t, degree)?)
        } else {
            None
        };
        Ok(TransportedFunctional { t, rows, coeff })
    }

    fn coefficient_weights(&self, t: f64, degree: usize) -> Result<Jet> {
        let tol = &self.opts.integrator;
        let n = self.field.dim();
        // g_t(v) = f_t(e^{-t} v) and W = e^t φ_t keep every jet of unit size
        let f_t = scaled_limit(&self.field, t, &[], Some(degree), &self.opts)?
            .jet
            .ok_or_else(|| Error::Internal("limit returned no jet".into()))?;
        let shrink = (-t).exp();
        let g_t = f_t.dilate(shrink);
        let w = scaled_flow_jet(&self.field, 0.0, t, degree, tol)?;
        let template = Jet::zero(n, degree)?;
        let exps = template.exponents();
        let slots: Vec<(usize, Vec<u32>)> = (0..n)
            .flat_map(|k| exps.iter().map(move |a| (k, a.clone())))
            .collect();
        let coeff_part = self.functional_coeff_part();
        let values = slots
            .par_iter()
            .map(|(k, beta)| {
                // H_t = e^t h(e^{-t}·) scales a degree-m monomial by e^{-(m-1)t}
                let m: u32 = beta.iter().sum();
                let mut mono = template.clone();
                mono.set(*k, beta, Complex64::new(shrink.powi(m as i32 - 1), 0.0))?;
                let moved = g_t.jacobian_apply(&mono)?.compose(&w)?;
                eval_functional(&coeff_part, &moved)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut weights = template;
        for ((k, beta), v) in slots.iter().zip(values) {
            weights.set(*k, beta, v)?;
        }
        Ok(weights)
    }

    fn functional_coeff_part(&self) -> LinearFunctional {
        let atoms: Vec<Atom> = self
            .functional
            .atoms()
            .iter()
            .filter(|a| matches!(a, Atom::Coeff { .. }))
            .cloned()
            .collect();
        LinearFunctional::new(atoms).expect("nonempty when degree > 0")
    }
}

#[derive(Debug, Clone, PartialEq)]
struct PointRow {
    v: CVec,
    row: Vec<Complex64>,
}

/// `L_t` at one time, ready for cheap evaluation on many controls.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportedFunctional {
    t: f64,
    rows: Vec<PointRow>,
    coeff: Option<Jet>,
}

impl TransportedFunctional {
    pub fn time(&self) -> f64 {
        self.t
    }

    /// `L_t(h)`; `h` need not lie in `M_n`.
    pub fn eval(&self, h: &MapDescriptor) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in &self.rows {
            if h.dim() != r.v.dim() {
                return Err(Error::DimensionMismatch {
                    expected: r.v.dim(),
                    found: h.dim(),
                });
            }
            let hv = h.eval_scaled_raw(&r.v, self.t);
            acc += r.row.iter().zip(&hv).map(|(a, b)| a * b).sum::<Complex64>();
        }
        if let Some(w) = &self.coeff {
            if h.dim() != w.dim() {
                return Err(Error::DimensionMismatch {
                    expected: w.dim(),
                    found: h.dim(),
                });
            }
            acc += self.pair(w, &h.jet(w.degree())?);
        }
        Ok(acc)
    }

    /// `L_t(P)` for the polynomial map `P`.
    pub fn eval_jet(&self, p: &Jet) -> Result<Complex64> {
        self.eval(&MapDescriptor::PolyJet(p.clone()))
    }

    fn pair(&self, weights: &Jet, h: &Jet) -> Complex64 {
        weights
            .terms()
            .map(|(k, alpha, w)| w * h.coefficient(alpha, k).unwrap_or_default())
            .sum()
    }
}

/// `L_t(h)` computed from scratch. Use [`Transport`] to evaluate many `h`
/// or many `t` against the same `F`.
pub fn transported_functional(
    l: &LinearFunctional,
    g: &HerglotzField,
    t: f64,
    h: &MapDescriptor,
    opts: &LimitOptions,
) -> Result<Complex64> {
    Transport::new(l, g, opts)?.at(t)?.eval(h)
}

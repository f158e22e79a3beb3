//! Hamiltonian scans `m(t) = max_{h ∈ family} Re L_t(h)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::transport::{Transport, TransportedFunctional};
use crate::holomap::grid::sphere_directions;
use crate::holomap::{CVec, MapDescriptor};
use crate::loewner::HerglotzField;
use crate::{Error, Result};

pub const DEFAULT_ZETA_GRID: usize = 256;
pub const DEFAULT_SPHERE_DESIGN: usize = 32;
/// Golden-section refinement stops at this width in `arg ζ`.
pub const REFINE_TOL: f64 = 1e-6;

/// The control subfamily over which `Re L_t` is maximized.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// A finite list, searched in order.
    Explicit(Vec<MapDescriptor>),
    /// `−z(ζ+⟨z,u⟩)/(ζ−⟨z,u⟩)` with `ζ` on an equispaced grid of the circle
    /// and `u` from a deterministic sphere design (`u = 1` when `n = 1`).
    SliceMoebius {
        zeta_grid: usize,
        refine: bool,
        directions: usize,
    },
}

impl Family {
    pub fn slice_moebius() -> Family {
        Family::SliceMoebius {
            zeta_grid: DEFAULT_ZETA_GRID,
            refine: true,
            directions: DEFAULT_SPHERE_DESIGN,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Family::Explicit(v) if v.is_empty() => Err(Error::EmptyGrid("empty control family".into())),
            Family::Explicit(v) => match v.iter().find(|h| h.dim() != n) {
                Some(h) => Err(Error::DimensionMismatch {
                    expected: n,
                    found: h.dim(),
                }),
                None => Ok(()),
            },
            Family::SliceMoebius { zeta_grid, directions, .. } if *zeta_grid == 0 || *directions == 0 => {
                Err(Error::EmptyGrid("empty ζ grid or sphere design".into()))
            }
            Family::SliceMoebius { .. } => Ok(()),
        }
    }

    fn directions(&self, n: usize) -> Vec<CVec> {
        match self {
            Family::SliceMoebius { directions, .. } if n > 1 => sphere_directions(n, *directions),
            _ => vec![CVec::basis(n, 0)],
        }
    }
}

/// Where the maximum of `Re L_t` was attained.
#[derive(Debug, Clone, PartialEq)]
pub enum Maximizer {
    Explicit { index: usize },
    Moebius { zeta: Complex64, u: CVec },
}

impl Maximizer {
    pub fn descriptor(&self, family: &Family) -> Result<MapDescriptor> {
        match (self, family) {
            (Maximizer::Explicit { index }, Family::Explicit(v)) => Ok(v[*index].clone()),
            (Maximizer::Moebius { zeta, u }, _) => MapDescriptor::slice_moebius(*zeta, u.clone()),
            _ => Err(Error::InvalidArgument("maximizer does not belong to this family".into())),
        }
    }
}

/// `m(t)` over a time grid. Over a strict subfamily of `M_n` every `m(t)`
/// is a lower bound for the maximum over the whole class.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianScan {
    pub t_grid: Vec<f64>,
    pub m_values: Vec<f64>,
    pub maximizers: Vec<Maximizer>,
    /// `max_t |m(t) − m(t_0)|`.
    pub constancy_deviation: f64,
}

pub(crate) fn check_grid(g: &HerglotzField, t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid("empty time grid".into()));
    }
    if let Some(t) = t_grid.iter().find(|&&t| !(t >= 0.0 && g.is_regular(t))) {
        return Err(Error::InvalidTimes(format!("grid time {t} is negative or a breakpoint")));
    }
    Ok(())
}

fn moebius_value(lt: &TransportedFunctional, theta: f64, u: &CVec) -> Result<f64> {
    let h = MapDescriptor::slice_moebius(Complex64::from_polar(1.0, theta), u.clone())?;
    Ok(lt.eval(&h)?.re)
}

/// Golden-section search for a local maximum of `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// `max Re L_t(h)` over the family with its maximizer. Ties go to the first
/// candidate in family order.
pub fn maximize(lt: &TransportedFunctional, family: &Family, n: usize) -> Result<(f64, Maximizer)> {
    family.validate(n)?;
    match family {
        Family::Explicit(v) => {
            let mut best = (f64::NEG_INFINITY, 0);
            for (i, h) in v.iter().enumerate() {
                let val = lt.eval(h)?.re;
                if val > best.0 {
                    best = (val, i);
                }
            }
            Ok((best.0, Maximizer::Explicit { index: best.1 }))
        }
        Family::SliceMoebius { zeta_grid, refine, .. } => {
            let step = TAU / *zeta_grid as f64;
            let mut best = (f64::NEG_INFINITY, 0.0, CVec::basis(n, 0));
            for u in family.directions(n) {
                let mut local = (f64::NEG_INFINITY, 0.0);
                for j in 0..*zeta_grid {
                    let theta = step * j as f64;
                    let val = moebius_value(lt, theta, &u)?;
                    if val > local.0 {
                        local = (val, theta);
                    }
                }
                if *refine {
                    let (theta, val) =
                        golden_max(|x| moebius_value(lt, x, &u), local.1 - step, local.1 + step, REFINE_TOL)?;
                    if val > local.0 {
                        local = (val, theta);
                    }
                }
                if local.0 > best.0 {
                    best = (local.0, local.1, u);
                }
            }
            let zeta = Complex64::from_polar(1.0, best.1.rem_euclid(TAU));
            Ok((best.0, Maximizer::Moebius { zeta, u: best.2 }))
        }
    }
}

/// Evaluates `m(t)` on `t_grid`, reusing the cached `F` data of `transport`.
pub fn hamiltonian_scan_with(transport: &Transport, family: &Family, t_grid: &[f64]) -> Result<HamiltonianScan> {
    let g = transport.field();
    check_grid(g, t_grid)?;
    family.validate(g.dim())?;
    let found = t_grid
        .par_iter()
        .map(|&t| maximize(&transport.at(t)?, family, g.dim()))
        .collect::<Result<Vec<_>>>()?;
    let (m_values, maximizers): (Vec<f64>, Vec<Maximizer>) = found.into_iter().unzip();
    let constancy_deviation = m_values.iter().map(|m| (m - m_values[0]).abs()).fold(0.0, f64::max);
    Ok(HamiltonianScan {
        t_grid: t_grid.to_vec(),
        m_values,
        maximizers,
        constancy_deviation,
    })
}

use num_complex::Complex64;

use crate::holomap::{CVec, Jet, MapDescriptor};
use crate::loewner::{FlowResult, ScaledLimit};
use crate::{Error, Result};

/// One atom of a discrete measure. Components are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// `weight · g_k(z)`.
    Point {
        z: CVec,
        component: usize,
        weight: Complex64,
    },
    /// `weight ·` (coefficient of `z^α` in `g_k`).
    Coeff {
        alpha: Vec<u32>,
        component: usize,
        weight: Complex64,
    },
}

/// A complex-linear functional `L(g) = Σ weight · (g_k(z) or coefficient)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    dim: usize,
    atoms: Vec<Atom>,
}

impl LinearFunctional {
    pub fn new(atoms: Vec<Atom>) -> Result<LinearFunctional> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::InvalidFunctional("at least one atom is required".into()))?;
        let dim = match first {
            Atom::Point { z, .. } => z.dim(),
            Atom::Coeff { alpha, .. } => alpha.len(),
        };
        for atom in &atoms {
            let (d, k, w) = match atom {
                Atom::Point { z, component, weight } => {
                    z.check_in_ball(dim)?;
                    (z.dim(), *component, weight)
                }
                Atom::Coeff { alpha, component, weight } => {
                    if alpha.iter().all(|&a| a == 0) {
                        return Err(Error::InvalidFunctional("coefficient atom needs |α| ≥ 1".into()));
                    }
                    (alpha.len(), *component, weight)
                }
            };
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
            if k >= dim {
                return Err(Error::InvalidFunctional(format!("component {k} out of range for n = {dim}")));
            }
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::InvalidFunctional("weights must be finite".into()));
            }
        }
        Ok(LinearFunctional { dim, atoms })
    }

    /// `g ↦ g_k(z)`.
    pub fn point_eval(z: CVec, component: usize) -> Result<LinearFunctional> {
        LinearFunctional::new(vec![Atom::Point {
            z,
            component,
            weight: Complex64::new(1.0, 0.0),
        }])
    }

    /// `g ↦` coefficient of `z^α` in `g_k`.
    pub fn coefficient(alpha: Vec<u32>, component: usize) -> Result<LinearFunctional> {
        LinearFunctional::new(vec![Atom::Coeff {
            alpha,
            component,
            weight: Complex64::new(1.0, 0.0),
        }])
    }

    /// The second Taylor coefficient `a₂` in one variable.
    pub fn a2() -> LinearFunctional {
        LinearFunctional::coefficient(vec![2], 0).expect("valid atom")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Largest `|α|` over the coefficient atoms (0 if there are none).
    pub fn max_degree(&self) -> usize {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Coeff { alpha, .. } => Some(alpha.iter().map(|&x| x as usize).sum()),
                Atom::Point { .. } => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Distinct point-atom locations in first-occurrence order.
    pub fn points(&self) -> Vec<CVec> {
        let mut out: Vec<CVec> = Vec::new();
        for a in &self.atoms {
            if let Atom::Point { z, .. } = a {
                if !out.contains(z) {
                    out.push(z.clone());
                }
            }
        }
        out
    }
}

/// Anything a functional can be applied to.
pub trait FunctionalTarget {
    fn dim(&self) -> usize;
    fn point_value(&self, z: &CVec) -> Result<CVec>;
    fn coefficient_value(&self, alpha: &[u32], k: usize) -> Result<Complex64>;
}

impl FunctionalTarget for MapDescriptor {
    fn dim(&self) -> usize {
        MapDescriptor::dim(self)
    }

    fn point_value(&self, z: &CVec) -> Result<CVec> {
        self.eval(z)
    }

    fn coefficient_value(&self, alpha: &[u32], k: usize) -> Result<Complex64> {
        let deg = alpha.iter().map(|&a| a as usize).sum::<usize>().max(1);
        self.jet(deg)?.coefficient(alpha, k)
    }
}

/// A jet is evaluated as the polynomial it stores.
impl FunctionalTarget for Jet {
    fn dim(&self) -> usize {
        Jet::dim(self)
    }

    fn point_value(&self, z: &CVec) -> Result<CVec> {
        z.check_in_ball(Jet::dim(self))?;
        Ok(CVec::from_vec(self.eval(z)))
    }

    fn coefficient_value(&self, alpha: &[u32], k: usize) -> Result<Complex64> {
        self.coefficient(alpha, k)
    }
}

fn sampled(points: &[CVec], values: &[CVec], z: &CVec) -> Result<CVec> {
    points
        .iter()
        .position(|p| p == z)
        .map(|i| values[i].clone())
        .ok_or_else(|| Error::MissingData(format!("no sample at {:?}", z.as_slice())))
}

impl FunctionalTarget for ScaledLimit {
    fn dim(&self) -> usize {
        match (&self.jet, self.points.first()) {
            (Some(j), _) => j.dim(),
            (None, Some(p)) => p.dim(),
            (None, None) => 0,
        }
    }

    fn point_value(&self, z: &CVec) -> Result<CVec> {
        sampled(&self.points, &self.values, z)
    }

    fn coefficient_value(&self, alpha: &[u32], k: usize) -> Result<Complex64> {
        match &self.jet {
            Some(j) => j.coefficient(alpha, k),
            None => Err(Error::MissingData("limit was computed without a jet".into())),
        }
    }
}

impl FunctionalTarget for FlowResult {
    fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.dim())
    }

    fn point_value(&self, z: &CVec) -> Result<CVec> {
        sampled(&self.points, &self.values, z)
    }

    fn coefficient_value(&self, _: &[u32], _: usize) -> Result<Complex64> {
        Err(Error::MissingData("a flow sample carries no Taylor data".into()))
    }
}

/// `L(g)`.
pub fn eval_functional<T: FunctionalTarget + ?Sized>(l: &LinearFunctional, g: &T) -> Result<Complex64> {
    if g.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: g.dim(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for atom in &l.atoms {
        acc += match atom {
            Atom::Point { z, component, weight } => weight * g.point_value(z)?[*component],
            Atom::Coeff { alpha, component, weight } => weight * g.coefficient_value(alpha, *component)?,
        };
    }
    Ok(acc)
}

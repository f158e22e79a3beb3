use std::ops::{Deref, Index};

use num_complex::Complex64;

use crate::{Error, Result};

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec(Vec<Complex64>);

impl CVec {
    /// Fails on an empty or non-finite vector.
    pub fn new(components: Vec<Complex64>) -> Result<CVec> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("point of dimension 0".into()));
        }
        if components.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite point".into()));
        }
        Ok(CVec(components))
    }

    pub(crate) fn from_vec(components: Vec<Complex64>) -> CVec {
        CVec(components)
    }

    pub fn real(xs: &[f64]) -> CVec {
        CVec(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> CVec {
        CVec(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn basis(n: usize, k: usize) -> CVec {
        let mut v = CVec::zeros(n);
        v.0[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn scale(&self, s: Complex64) -> CVec {
        CVec(self.0.iter().map(|x| x * s).collect())
    }

    /// Checks `‖z‖ < 1` and the expected dimension.
    pub fn check_in_ball(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        if !(self.norm() < 1.0) {
            return Err(Error::OutsideBall(
                self.0.iter().flat_map(|c| [c.re, c.im]).collect(),
            ));
        }
        Ok(())
    }
}

impl Deref for CVec {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl From<Complex64> for CVec {
    fn from(z: Complex64) -> CVec {
        CVec(vec![z])
    }
}

/// Hermitian inner product `⟨a, b⟩ = Σ a_k conj(b_k)`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

//! Small dense complex matrices.
//!
//! Jacobians are `n x n` with `n` in the single digits, so everything here is
//! a thin layer over [`nalgebra`]'s LU with partial pivoting. Inverses are
//! never formed; [`solve`] is the only way to apply `A^{-1}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Condition estimates above this flag a Jacobian as numerically singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Matrix 1-norm (max column sum of moduli).
pub fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Max modulus over all entries.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Hager/Higham estimate of `‖A⁻¹‖₁` using solves only.
fn inverse_norm1_estimate(
    lu: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_adj: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
) -> Option<f64> {
    let mut x = DVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
    let mut est = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        let y_norm: f64 = y.iter().map(|v| v.norm()).sum();
        if y_norm <= est {
            break;
        }
        est = y_norm;
        let sgn = y.map(|v| {
            let r = v.norm();
            if r == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                v / r
            }
        });
        let z = lu_adj.solve(&sgn)?;
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        let zx: Complex64 = z.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
        if zmax <= zx.re.abs() {
            break;
        }
        x = DVector::from_element(n, Complex64::new(0.0, 0.0));
        x[j] = Complex64::new(1.0, 0.0);
    }
    Some(est)
}

/// 1-norm condition estimate of `a`; infinite when `a` is exactly singular.
pub fn condition_estimate(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let lu = a.clone().lu();
    let lu_adj = a.adjoint().lu();
    match inverse_norm1_estimate(&lu, &lu_adj, n) {
        Some(inv) => norm1(a) * inv,
        None => f64::INFINITY,
    }
}

/// Solves `a x = b` by LU with partial pivoting, flagging ill-conditioned `a`.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let lu = a.clone().lu();
    let lu_adj = a.adjoint().lu();
    let cond = match inverse_norm1_estimate(&lu, &lu_adj, n) {
        Some(inv) => norm1(a) * inv,
        None => f64::INFINITY,
    };
    if !cond.is_finite() || cond > SINGULAR_CONDITION {
        return Err(Error::SingularJacobian { condition: cond });
    }
    let rhs = DVector::from_column_slice(b);
    let x = lu
        .solve(&rhs)
        .ok_or(Error::SingularJacobian { condition: cond })?;
    Ok(x.iter().copied().collect())
}

/// Solves `a X = b` column by column.
pub fn solve_matrix(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let mut out = CMatrix::zeros(n, b.ncols());
    for (j, col) in b.column_iter().enumerate() {
        let col: Vec<Complex64> = col.iter().copied().collect();
        let x = solve(a, &col)?;
        for (i, v) in x.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

pub fn mat_vec(a: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

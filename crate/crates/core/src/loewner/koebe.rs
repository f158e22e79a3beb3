use num_complex::Complex64;

use crate::{Error, Result};

/// The Koebe function `k_ζ(z) = z/(1 + ζ̄z)²`.
pub fn koebe(zeta: Complex64, z: Complex64) -> Complex64 {
    let d = 1.0 + zeta.conj() * z;
    z / (d * d)
}

/// Closed-form evolution family of the one-dimensional Möbius field
/// `−z(ζ+z)/(ζ−z)`.
///
/// `φ = φ_{s,t}(z)` solves `k_ζ(φ) = e^{−(t−s)} k_ζ(z)`, i.e. the quadratic
/// `K a² φ² + (2Ka − 1) φ + K = 0` with `a = ζ̄`, `K = e^{−(t−s)} k_ζ(z)`.
/// The root product has modulus 1, so exactly one root lies in the disc; it
/// is computed in the cancellation-free form `2K / (1 − 2Ka + √(1 − 4Ka))`
/// with the square-root branch maximising the denominator.
pub fn koebe_oracle(zeta: Complex64, s: f64, t: f64, z: Complex64) -> Result<Complex64> {
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("|zeta| = {} is not 1", zeta.norm())));
    }
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideBall(vec![z.re, z.im]));
    }
    if !(s <= t) {
        return Err(Error::InvalidTimes(format!("need s <= t, got s={s}, t={t}")));
    }
    if t == s {
        return Ok(z);
    }
    let a = zeta.conj();
    let k = (-(t - s)).exp() * koebe(zeta, z);
    if k == Complex64::new(0.0, 0.0) {
        return Ok(k);
    }
    let root = (1.0 - 4.0 * k * a).sqrt();
    let base = 1.0 - 2.0 * k * a;
    let den = if (base + root).norm() >= (base - root).norm() {
        base + root
    } else {
        base - root
    };
    let phi = 2.0 * k / den;
    if !(phi.norm() < 1.0) {
        return Err(Error::Internal(format!(
            "no root of the Koebe transfer equation inside the disc (|φ| = {})",
            phi.norm()
        )));
    }
    Ok(phi)
}

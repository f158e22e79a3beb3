//! Deterministic sampling grids in the ball.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::cvec::CVec;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut f = 1.0 / b;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base as u64) as f64;
        i /= base as u64;
        f /= b;
    }
    r
}

/// `count` unit directions in `C^n`.
///
/// For `n = 1` these are the equispaced angles `e^{2πij/count}`. For `n >= 2`
/// a Halton sequence in `(0,1)^{2n}` is pushed through Box–Muller (one complex
/// Gaussian per coordinate) and normalized; the first `n` directions are the
/// coordinate axes.
pub fn sphere_directions(n: usize, count: usize) -> Vec<CVec> {
    if n == 1 {
        return (0..count)
            .map(|j| CVec::from(Complex64::from_polar(1.0, TAU * j as f64 / count as f64)))
            .collect();
    }
    assert!(2 * n <= PRIMES.len(), "sphere design supports n <= 8");
    let mut out: Vec<CVec> = (0..n.min(count)).map(|k| CVec::basis(n, k)).collect();
    let mut i = 1u64;
    while out.len() < count {
        let coords: Vec<Complex64> = (0..n)
            .map(|k| {
                let u1 = radical_inverse(i, PRIMES[2 * k]);
                let u2 = radical_inverse(i, PRIMES[2 * k + 1]);
                Complex64::from_polar((-2.0 * u1.ln()).sqrt(), TAU * u2)
            })
            .collect();
        i += 1;
        let v = CVec::from_vec(coords);
        let r = v.norm();
        if r > 1e-8 {
            out.push(v.scale(Complex64::new(1.0 / r, 0.0)));
        }
    }
    out
}

/// Radii used by the class-membership check unless overridden.
pub fn default_radii() -> Vec<f64> {
    let mut r: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    r.push(0.95);
    r
}

/// Directions per radius used by the membership check unless overridden.
pub fn default_directions(n: usize) -> usize {
    if n == 1 {
        64
    } else {
        128
    }
}

/// Radii that additionally approach the sphere (`1 - 10^{-k}`, `k = 2..=8`).
/// Used where the supremum over the whole ball is needed, not just a
/// compact sub-ball.
pub fn boundary_radii() -> Vec<f64> {
    let mut r = default_radii();
    r.extend((2..=8).map(|k| 1.0 - 10f64.powi(-k)));
    r
}

/// Cartesian product of radii and directions (plus any extra directions).
pub fn ball_grid(n: usize, radii: &[f64], directions: usize, extra: &[CVec]) -> Vec<CVec> {
    let mut dirs = sphere_directions(n, directions);
    dirs.extend(extra.iter().cloned());
    radii
        .iter()
        .flat_map(|&r| {
            dirs.iter()
                .map(move |d| d.scale(Complex64::new(r, 0.0)))
                .collect::<Vec<_>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit_and_deterministic() {
        for n in 1..=3 {
            let a = sphere_directions(n, 50);
            let b = sphere_directions(n, 50);
            assert_eq!(a, b);
            for d in &a {
                assert!((d.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn one_dimensional_grid_contains_both_real_axis_points() {
        let d = sphere_directions(1, 64);
        assert!(d.iter().any(|v| (v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        assert!(d.iter().any(|v| (v[0] + Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }
}

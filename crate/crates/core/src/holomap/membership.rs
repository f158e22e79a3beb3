//! Sampled membership tests for the class `M_n`:
//! `h(0) = 0`, `dh_0 = −id` and `Re⟨h(z), z⟩ ≤ 0` on the ball.
//!
//! A pass only certifies the declared grid; a positive margin is a
//! certificate of non-membership.

use num_complex::Complex64;

use super::cvec::{inner, CVec};
use super::grid::{ball_grid, boundary_radii, default_directions, default_radii};
use super::jet::Jet;
use super::map::MapDescriptor;
use crate::linalg::{identity, max_abs};
use crate::{Error, Result};

/// Radii and directions of a membership grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipGrid {
    pub radii: Vec<f64>,
    pub directions_per_radius: usize,
}

impl MembershipGrid {
    pub fn default_for(n: usize) -> MembershipGrid {
        MembershipGrid {
            radii: default_radii(),
            directions_per_radius: default_directions(n),
        }
    }

    /// Default directions with radii reaching `1 − 10^{-8}`.
    pub fn near_boundary(n: usize) -> MembershipGrid {
        MembershipGrid {
            radii: boundary_radii(),
            directions_per_radius: default_directions(n),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.directions_per_radius == 0 {
            return Err(Error::EmptyGrid("membership grid".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(Error::InvalidArgument(format!("radius {r} not in (0,1)")));
        }
        Ok(())
    }

    /// Grid points for `m`, including its critical directions.
    pub fn points_for(&self, m: &MapDescriptor) -> Vec<CVec> {
        ball_grid(
            m.dim(),
            &self.radii,
            self.directions_per_radius,
            &m.critical_directions(),
        )
    }
}

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub pass: bool,
    /// Largest sampled `Re⟨h(z),z⟩/‖z‖²`.
    pub worst_margin: f64,
    pub worst_point: CVec,
    pub normalization_ok: bool,
    pub grid: MembershipGrid,
    pub tolerance: f64,
}

/// `Re⟨h(z), z⟩ / ‖z‖²`.
pub fn margin(m: &MapDescriptor, z: &[Complex64]) -> f64 {
    let r2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    inner(&m.eval_raw(z), z).re / r2
}

pub fn check_normalization(m: &MapDescriptor, tol: f64) -> bool {
    let n = m.dim();
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let h0 = m.eval_raw(&zero);
    let dh0 = m.jacobian_raw(&zero);
    h0.iter().all(|v| v.norm() <= tol) && max_abs(&(dh0 + identity(n))) <= tol
}

/// Samples the margin on `radii × directions` and checks the normalization.
pub fn check_class_membership(
    m: &MapDescriptor,
    radii: &[f64],
    directions_per_radius: usize,
    tol: f64,
) -> Result<MembershipReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} < 0")));
    }
    let grid = MembershipGrid {
        radii: radii.to_vec(),
        directions_per_radius,
    };
    grid.validate()?;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_point = CVec::zeros(m.dim());
    for z in grid.points_for(m) {
        let g = margin(m, &z);
        // NaN margins count as violations
        if !(g <= worst) {
            worst = if g.is_nan() { f64::INFINITY } else { g };
            worst_point = z;
        }
    }
    let normalization_ok = check_normalization(m, tol.max(DEFAULT_MEMBERSHIP_TOL));
    Ok(MembershipReport {
        pass: normalization_ok && worst <= tol,
        worst_margin: worst,
        worst_point,
        normalization_ok,
        grid,
        tolerance: tol,
    })
}

/// Membership on the default grid with the default tolerance.
pub fn check_default(m: &MapDescriptor) -> Result<MembershipReport> {
    let g = MembershipGrid::default_for(m.dim());
    check_class_membership(m, &g.radii, g.directions_per_radius, DEFAULT_MEMBERSHIP_TOL)
}

/// Result of [`membership_radius`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationRadius {
    Finite(f64),
    /// The perturbed field passes for every tested `ε` (e.g. `P = 0`).
    Infinite,
}

impl PerturbationRadius {
    pub fn value(&self) -> f64 {
        match self {
            PerturbationRadius::Finite(d) => *d,
            PerturbationRadius::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for PerturbationRadius {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PerturbationRadius::Finite(d) => write!(f, "{d}"),
            PerturbationRadius::Infinite => f.write_str("infinite"),
        }
    }
}

const RADIUS_CAP: f64 = 1e12;

/// Largest `δ` such that `−z + εP` passes the membership check for every
/// real `ε ∈ [0, δ]`, located by bisection to relative accuracy `tol`.
///
/// `P` must have neither constant nor linear terms. The sample grid uses
/// radii up to `1 − 10^{-8}` since `δ` is governed by the boundary.
pub fn membership_radius(p: &Jet, tol: f64) -> Result<PerturbationRadius> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be > 0")));
    }
    if p.terms().any(|(_, alpha, _)| alpha.iter().sum::<u32>() < 2) {
        return Err(Error::InvalidJet(
            "perturbation must have no constant or linear term".into(),
        ));
    }
    if p.is_zero() {
        return Ok(PerturbationRadius::Infinite);
    }
    let n = p.dim();
    let minus_id = Jet::identity(n, p.degree())?.scale(Complex64::new(-1.0, 0.0));
    let grid = MembershipGrid::near_boundary(n);
    let passes = |eps: f64| -> Result<bool> {
        let h = MapDescriptor::PolyJet(minus_id.combine(
            Complex64::new(1.0, 0.0),
            p,
            Complex64::new(eps, 0.0),
        )?);
        let r = check_class_membership(
            &h,
            &grid.radii,
            grid.directions_per_radius,
            DEFAULT_MEMBERSHIP_TOL,
        )?;
        Ok(r.pass)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while passes(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > RADIUS_CAP {
            return Ok(PerturbationRadius::Infinite);
        }
    }
    while hi - lo > tol * lo.max(1e-3) {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(PerturbationRadius::Finite(lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn poly1(terms: &[(u32, f64)]) -> Jet {
        let deg = terms.iter().map(|t| t.0).max().unwrap() as usize;
        let v: Vec<(usize, Vec<u32>, Complex64)> = terms
            .iter()
            .map(|&(e, c)| (0, vec![e], c64(c, 0.0)))
            .collect();
        Jet::from_terms(1, deg, v.iter().map(|(k, a, c)| (*k, a.as_slice(), *c))).unwrap()
    }

    #[test]
    fn linear_radial_margin_is_minus_one() {
        let r = check_default(&MapDescriptor::linear_radial(2)).unwrap();
        assert!(r.pass && r.normalization_ok);
        assert!((r.worst_margin + 1.0).abs() < 1e-15);
    }

    #[test]
    fn moebius_passes_with_negative_margin() {
        let r = check_default(&MapDescriptor::moebius1(c64(1.0, 0.0)).unwrap()).unwrap();
        assert!(r.pass);
        assert!(r.worst_margin < 0.0);
        // sup of −Re (1+z)/(1−z) on |z| ≤ 0.95 is −(1−0.95)/(1+0.95), attained at z = −0.95
        assert!((r.worst_margin + 0.05 / 1.95).abs() < 1e-12);
    }

    #[test]
    fn cubic_perturbation_fails_with_witness() {
        let h = MapDescriptor::PolyJet(poly1(&[(1, -1.0), (2, 3.0)]));
        let r = check_default(&h).unwrap();
        assert!(!r.pass);
        assert!(r.worst_margin > 0.0);
        // direct evaluation at z = 0.9: Re⟨h,z⟩ = −0.81 + 3·0.729
        let at = margin(&h, &[c64(0.9, 0.0)]);
        assert!((at * 0.81 - 1.377).abs() < 1e-12);
        assert!(margin(&h, &r.worst_point) > 0.0);
    }

    #[test]
    fn bad_normalization_fails() {
        let h = MapDescriptor::PolyJet(poly1(&[(1, -0.5)]));
        let r = check_default(&h).unwrap();
        assert!(!r.normalization_ok && !r.pass);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let m = MapDescriptor::linear_radial(1);
        assert!(matches!(
            check_class_membership(&m, &[], 8, 1e-12),
            Err(Error::EmptyGrid(_))
        ));
        assert!(check_class_membership(&m, &[0.5], 0, 1e-12).is_err());
        assert!(check_class_membership(&m, &[1.0], 8, 1e-12).is_err());
    }

    #[test]
    fn perturbation_radius_for_monomials() {
        // Re⟨−z+εz^k, z⟩ = |z|²(−1 + ε Re z^{k−1}) so δ = 1 in both cases
        for k in [2, 3] {
            let d = membership_radius(&poly1(&[(k, 1.0)]), 1e-6).unwrap();
            assert!((d.value() - 1.0).abs() < 1e-3, "k={k}: {d}");
        }
    }

    #[test]
    fn zero_perturbation_has_infinite_radius() {
        let p = Jet::zero(1, 2).unwrap();
        assert_eq!(membership_radius(&p, 1e-6).unwrap(), PerturbationRadius::Infinite);
        assert_eq!(PerturbationRadius::Infinite.to_string(), "infinite");
    }

    #[test]
    fn perturbation_with_linear_term_is_rejected() {
        assert!(membership_radius(&poly1(&[(1, 0.1), (2, 1.0)]), 1e-6).is_err());
    }
}

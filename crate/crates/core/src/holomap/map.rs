//! Computable holomorphic maps on the unit ball.

use num_complex::Complex64;

use super::cvec::{inner, CVec};
use super::jet::Jet;
use crate::linalg::{identity, CMatrix};
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const UNIT_TOL: f64 = 1e-12;

/// The slice Möbius field `z ↦ −z·(ζ + ⟨z,u⟩)/(ζ − ⟨z,u⟩)`.
///
/// For `n = 1, u = 1` these are exactly the extreme points of `M_1`, the
/// generators of the Koebe functions `z/(1 + ζ̄z)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceMoebius {
    zeta: Complex64,
    u: CVec,
}

impl SliceMoebius {
    pub fn new(zeta: Complex64, u: CVec) -> Result<SliceMoebius> {
        if (zeta.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidDescriptor(format!(
                "|zeta| = {} is not 1",
                zeta.norm()
            )));
        }
        if (u.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidDescriptor(format!(
                "‖u‖ = {} is not 1",
                u.norm()
            )));
        }
        Ok(SliceMoebius { zeta, u })
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn u(&self) -> &CVec {
        &self.u
    }

    /// `(w, (ζ+w)/(ζ−w))` with `w = ⟨z,u⟩`.
    fn factor(&self, z: &[Complex64]) -> (Complex64, Complex64) {
        let w = inner(z, &self.u);
        (w, (self.zeta + w) / (self.zeta - w))
    }
}

/// Convex combination `Σ w_i h_i` of maps of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCombo {
    weights: Vec<f64>,
    parts: Vec<MapDescriptor>,
}

impl ConvexCombo {
    pub fn new(weights: Vec<f64>, parts: Vec<MapDescriptor>) -> Result<ConvexCombo> {
        if parts.is_empty() || weights.len() != parts.len() {
            return Err(Error::InvalidDescriptor(format!(
                "convex combination needs matching nonempty weights/parts ({} vs {})",
                weights.len(),
                parts.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidDescriptor("negative or non-finite weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidDescriptor(format!("weights sum to {sum}, not 1")));
        }
        let n = parts[0].dim();
        if let Some(p) = parts.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dim(),
            });
        }
        Ok(ConvexCombo { weights, parts })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn parts(&self) -> &[MapDescriptor] {
        &self.parts
    }

    fn sum_vec(&self, f: impl Fn(&MapDescriptor) -> Vec<Complex64>) -> Vec<Complex64> {
        let n = self.parts[0].dim();
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for (w, p) in self.weights.iter().zip(&self.parts) {
            for (a, v) in acc.iter_mut().zip(f(p)) {
                *a += v * *w;
            }
        }
        acc
    }

    fn sum_mat(&self, f: impl Fn(&MapDescriptor) -> CMatrix) -> CMatrix {
        let n = self.parts[0].dim();
        let mut acc = CMatrix::zeros(n, n);
        for (w, p) in self.weights.iter().zip(&self.parts) {
            acc += f(p) * Complex64::new(*w, 0.0);
        }
        acc
    }
}

/// A holomorphic map `B^n -> C^n` with exact evaluation and Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub enum MapDescriptor {
    /// `z ↦ −z` in dimension `n`.
    LinearRadial(usize),
    SliceMoebius(SliceMoebius),
    /// A polynomial map given by its (finite) jet.
    PolyJet(Jet),
    ConvexCombo(ConvexCombo),
}

impl MapDescriptor {
    pub fn linear_radial(n: usize) -> MapDescriptor {
        MapDescriptor::LinearRadial(n)
    }

    pub fn slice_moebius(zeta: Complex64, u: CVec) -> Result<MapDescriptor> {
        SliceMoebius::new(zeta, u).map(MapDescriptor::SliceMoebius)
    }

    /// One-dimensional Möbius field `−z(ζ+z)/(ζ−z)`.
    pub fn moebius1(zeta: Complex64) -> Result<MapDescriptor> {
        MapDescriptor::slice_moebius(zeta, CVec::real(&[1.0]))
    }

    /// `−z(1−z)/(1+z)`, the generator of the Koebe function `z/(1−z)²`.
    pub fn koebe_field() -> MapDescriptor {
        MapDescriptor::moebius1(Complex64::new(-1.0, 0.0)).unwrap()
    }

    pub fn convex_combo(weights: Vec<f64>, parts: Vec<MapDescriptor>) -> Result<MapDescriptor> {
        ConvexCombo::new(weights, parts).map(MapDescriptor::ConvexCombo)
    }

    pub fn dim(&self) -> usize {
        match self {
            MapDescriptor::LinearRadial(n) => *n,
            MapDescriptor::SliceMoebius(m) => m.u.dim(),
            MapDescriptor::PolyJet(j) => j.dim(),
            MapDescriptor::ConvexCombo(c) => c.parts[0].dim(),
        }
    }

    /// `h(z)` without the ball check (used inside integrators, where stage
    /// points stay inside the ball by contraction).
    pub(crate) fn eval_raw(&self, z: &[Complex64]) -> Vec<Complex64> {
        match self {
            MapDescriptor::LinearRadial(_) => z.iter().map(|x| -x).collect(),
            MapDescriptor::SliceMoebius(m) => {
                let (_, q) = m.factor(z);
                z.iter().map(|x| -x * q).collect()
            }
            MapDescriptor::PolyJet(j) => j.eval(z),
            MapDescriptor::ConvexCombo(c) => c.sum_vec(|p| p.eval_raw(z)),
        }
    }

    pub(crate) fn jacobian_raw(&self, z: &[Complex64]) -> CMatrix {
        let n = z.len();
        match self {
            MapDescriptor::LinearRadial(_) => -identity(n),
            MapDescriptor::SliceMoebius(m) => {
                // ∂h_i/∂z_j = −q δ_ij − z_i q'(w) conj(u_j),  q' = 2ζ/(ζ−w)²
                let (w, q) = m.factor(z);
                let dq = 2.0 * m.zeta / ((m.zeta - w) * (m.zeta - w));
                let mut out = identity(n) * (-q);
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] -= z[i] * dq * m.u[j].conj();
                    }
                }
                out
            }
            MapDescriptor::PolyJet(j) => j.jacobian(z),
            MapDescriptor::ConvexCombo(c) => c.sum_mat(|p| p.jacobian_raw(z)),
        }
    }

    /// `h(z) + z`, computed without cancellation for the closed forms.
    pub(crate) fn nonlinear_raw(&self, z: &[Complex64]) -> Vec<Complex64> {
        match self {
            MapDescriptor::LinearRadial(n) => vec![Complex64::new(0.0, 0.0); *n],
            MapDescriptor::SliceMoebius(m) => {
                let w = inner(z, &m.u);
                let s = -2.0 * w / (m.zeta - w);
                z.iter().map(|x| x * s).collect()
            }
            MapDescriptor::PolyJet(j) => {
                let mut v = j.eval(z);
                for (a, x) in v.iter_mut().zip(z) {
                    *a += x;
                }
                v
            }
            MapDescriptor::ConvexCombo(c) => c.sum_vec(|p| p.nonlinear_raw(z)),
        }
    }

    /// Jacobian of `h(z) + z`.
    pub(crate) fn nonlinear_jacobian_raw(&self, z: &[Complex64]) -> CMatrix {
        let n = z.len();
        match self {
            MapDescriptor::LinearRadial(_) => CMatrix::zeros(n, n),
            MapDescriptor::SliceMoebius(m) => {
                let w = inner(z, &m.u);
                let d = m.zeta - w;
                let s = -2.0 * w / d;
                let dq = 2.0 * m.zeta / (d * d);
                let mut out = identity(n) * s;
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] -= z[i] * dq * m.u[j].conj();
                    }
                }
                out
            }
            MapDescriptor::PolyJet(j) => j.jacobian(z) + identity(n),
            MapDescriptor::ConvexCombo(c) => c.sum_mat(|p| p.nonlinear_jacobian_raw(z)),
        }
    }

    /// `e^t h(e^{−t} v)`, evaluated so that no `e^{±t}` factor cancels.
    pub(crate) fn eval_scaled_raw(&self, v: &[Complex64], t: f64) -> Vec<Complex64> {
        match self {
            MapDescriptor::PolyJet(j) => {
                let b = j.basis();
                let m = b.monomials_at(v);
                j.components()
                    .iter()
                    .map(|c| {
                        c.iter()
                            .enumerate()
                            .skip(1)
                            .map(|(i, a)| {
                                let deg = b.total_degree(i) as f64;
                                a * m[i] * (-(deg - 1.0) * t).exp()
                            })
                            .sum()
                    })
                    .collect()
            }
            MapDescriptor::ConvexCombo(c) => c.sum_vec(|p| p.eval_scaled_raw(v, t)),
            _ => {
                let nl = self.scaled_nonlinear_raw(v, t);
                v.iter().zip(nl).map(|(x, y)| y - x).collect()
            }
        }
    }

    /// `e^t N(e^{−t} v)` with `N(z) = h(z) + z`.
    pub(crate) fn scaled_nonlinear_raw(&self, v: &[Complex64], t: f64) -> Vec<Complex64> {
        let shrink = (-t).exp();
        let w: Vec<Complex64> = v.iter().map(|x| x * shrink).collect();
        let grow = t.exp();
        self.nonlinear_raw(&w).into_iter().map(|x| x * grow).collect()
    }

    /// `h(z)`; requires `‖z‖ < 1`.
    pub fn eval(&self, z: &CVec) -> Result<CVec> {
        z.check_in_ball(self.dim())?;
        Ok(CVec::from_vec(self.eval_raw(z)))
    }

    /// Exact holomorphic Jacobian `dh_z`.
    pub fn jacobian(&self, z: &CVec) -> Result<CMatrix> {
        z.check_in_ball(self.dim())?;
        Ok(self.jacobian_raw(z))
    }

    /// Taylor jet at the origin through total degree `degree`.
    pub fn jet(&self, degree: usize) -> Result<Jet> {
        let n = self.dim();
        match self {
            MapDescriptor::LinearRadial(_) => Jet::identity(n, degree).map(|j| j.scale(-ONE)),
            MapDescriptor::SliceMoebius(m) => {
                // (ζ+w)/(ζ−w) = 1 + 2 Σ_{k≥1} (w/ζ)^k
                let id = Jet::identity(n, degree)?;
                let basis = id.basis().clone();
                let mut ratio = vec![Complex64::new(0.0, 0.0); basis.len()];
                for j in 0..n {
                    let mut alpha = vec![0u32; n];
                    alpha[j] = 1;
                    ratio[basis.index_of(&alpha).unwrap()] = m.u[j].conj() / m.zeta;
                }
                let mut series = vec![Complex64::new(0.0, 0.0); basis.len()];
                series[0] = ONE;
                let mut power = ratio.clone();
                for _ in 1..degree {
                    for (s, p) in series.iter_mut().zip(&power) {
                        *s += 2.0 * p;
                    }
                    power = basis.mul(&power, &ratio);
                }
                let comps = id
                    .components()
                    .iter()
                    .map(|zi| basis.mul(zi, &series).into_iter().map(|c| -c).collect())
                    .collect();
                Ok(Jet::from_parts(basis, comps))
            }
            MapDescriptor::PolyJet(j) => j.with_degree(degree),
            MapDescriptor::ConvexCombo(c) => {
                let mut acc = Jet::zero(n, degree)?;
                for (w, p) in c.weights.iter().zip(&c.parts) {
                    acc = acc.combine(ONE, &p.jet(degree)?, Complex64::new(*w, 0.0))?;
                }
                Ok(acc)
            }
        }
    }

    /// Directions along which the map's margin `Re⟨h(z),z⟩/‖z‖²` approaches
    /// its supremum near the sphere (the pole direction `−ζu` of each Möbius
    /// part). Sampling grids add these so boundary suprema are not missed.
    pub fn critical_directions(&self) -> Vec<CVec> {
        match self {
            MapDescriptor::SliceMoebius(m) => vec![m.u.scale(-m.zeta)],
            MapDescriptor::ConvexCombo(c) => {
                let mut out: Vec<CVec> = Vec::new();
                for d in c.parts.iter().flat_map(|p| p.critical_directions()) {
                    if !out.contains(&d) {
                        out.push(d);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }
}

/// `h(z)` for a descriptor.
pub fn eval_map(m: &MapDescriptor, z: &CVec) -> Result<CVec> {
    m.eval(z)
}

/// Exact Jacobian of a descriptor at `z`.
pub fn jacobian_map(m: &MapDescriptor, z: &CVec) -> Result<CMatrix> {
    m.jacobian(z)
}

/// Taylor coefficients of a descriptor at 0 through degree `degree`.
pub fn jet_from_closed_form(m: &MapDescriptor, degree: usize) -> Result<Jet> {
    m.jet(degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn linear_radial_eval_and_jacobian() {
        let m = MapDescriptor::linear_radial(2);
        let z = CVec::real(&[0.5, 0.0]);
        assert_eq!(m.eval(&z).unwrap(), CVec::real(&[-0.5, 0.0]));
        assert_eq!(m.jacobian(&z).unwrap(), -identity(2));
    }

    #[test]
    fn moebius_closed_form_values() {
        let m = MapDescriptor::moebius1(c64(1.0, 0.0)).unwrap();
        let v = m.eval(&CVec::real(&[0.5])).unwrap();
        assert!(close(v[0], c64(-1.5, 0.0), 1e-15));
        let j = m.jacobian(&CVec::real(&[0.0])).unwrap();
        assert_eq!(j[(0, 0)], c64(-1.0, 0.0));
    }

    #[test]
    fn poly_jet_eval_and_jacobian() {
        let jet = Jet::from_terms(
            1,
            2,
            [
                (0, &[1u32][..], c64(-1.0, 0.0)),
                (0, &[2u32][..], c64(1.0, 0.0)),
            ],
        )
        .unwrap();
        let m = MapDescriptor::PolyJet(jet);
        let z = CVec::real(&[0.3]);
        assert!(close(m.eval(&z).unwrap()[0], c64(-0.21, 0.0), 1e-15));
        assert!(close(m.jacobian(&z).unwrap()[(0, 0)], c64(-0.4, 0.0), 1e-15));
    }

    #[test]
    fn eval_rejects_points_outside_ball_and_wrong_dimension() {
        let m = MapDescriptor::linear_radial(1);
        assert!(matches!(
            m.eval(&CVec::real(&[1.0])),
            Err(Error::OutsideBall(_))
        ));
        assert!(matches!(
            m.eval(&CVec::real(&[0.1, 0.1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jets_of_closed_forms() {
        let lin = MapDescriptor::linear_radial(1).jet(3).unwrap();
        assert_eq!(lin.terms().count(), 1);
        assert_eq!(lin.coefficient(&[1], 0).unwrap(), c64(-1.0, 0.0));

        // −z − (2/ζ) z²
        let zeta = Complex64::from_polar(1.0, 0.7);
        let j = MapDescriptor::moebius1(zeta).unwrap().jet(2).unwrap();
        assert!(close(j.coefficient(&[1], 0).unwrap(), c64(-1.0, 0.0), 1e-15));
        assert!(close(j.coefficient(&[2], 0).unwrap(), -2.0 / zeta, 1e-15));

        let combo = MapDescriptor::convex_combo(
            vec![0.5, 0.5],
            vec![
                MapDescriptor::moebius1(c64(1.0, 0.0)).unwrap(),
                MapDescriptor::moebius1(c64(-1.0, 0.0)).unwrap(),
            ],
        )
        .unwrap();
        let j = combo.jet(2).unwrap();
        assert!(close(j.coefficient(&[2], 0).unwrap(), c64(0.0, 0.0), 1e-15));
        assert!(close(j.coefficient(&[1], 0).unwrap(), c64(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn moebius_jet_matches_values_near_origin() {
        let u = CVec::new(vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap();
        let m = MapDescriptor::slice_moebius(Complex64::from_polar(1.0, 2.0), u).unwrap();
        let jet = m.jet(12).unwrap();
        let z = CVec::new(vec![c64(0.05, -0.02), c64(0.01, 0.03)]).unwrap();
        let exact = m.eval(&z).unwrap();
        let approx = jet.eval(&z);
        for (a, b) in exact.iter().zip(&approx) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn nonlinear_and_scaled_forms_are_consistent() {
        let u = CVec::new(vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap();
        let m = MapDescriptor::slice_moebius(Complex64::from_polar(1.0, -1.0), u).unwrap();
        let z = CVec::new(vec![c64(0.3, -0.2), c64(0.1, 0.4)]).unwrap();
        let h = m.eval_raw(&z);
        let nl = m.nonlinear_raw(&z);
        for ((a, b), x) in h.iter().zip(&nl).zip(z.iter()) {
            assert!((a + x - b).norm() < 1e-15);
        }
        let dn = m.nonlinear_jacobian_raw(&z);
        let dh = m.jacobian_raw(&z);
        assert!(crate::linalg::max_abs(&(dh + identity(2) - dn)) < 1e-15);
        let t = 0.8;
        let scaled = m.eval_scaled_raw(&z, t);
        let direct: Vec<Complex64> = m
            .eval_raw(&z.iter().map(|x| x * (-t).exp()).collect::<Vec<_>>())
            .into_iter()
            .map(|x| x * t.exp())
            .collect();
        for (a, b) in scaled.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn invalid_descriptors_are_rejected() {
        assert!(MapDescriptor::moebius1(c64(0.5, 0.0)).is_err());
        assert!(MapDescriptor::slice_moebius(c64(1.0, 0.0), CVec::real(&[1.0, 1.0])).is_err());
        assert!(MapDescriptor::convex_combo(
            vec![0.7, 0.7],
            vec![
                MapDescriptor::linear_radial(1),
                MapDescriptor::linear_radial(1)
            ]
        )
        .is_err());
        assert!(MapDescriptor::convex_combo(
            vec![0.5, 0.5],
            vec![
                MapDescriptor::linear_radial(1),
                MapDescriptor::linear_radial(2)
            ]
        )
        .is_err());
    }
}

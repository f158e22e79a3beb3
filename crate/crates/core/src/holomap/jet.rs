//! Truncated multivariate Taylor polynomials `C^n -> C^n` without constant term.
//!
//! Coefficients are stored densely over a graded monomial basis shared
//! between all jets of the same `(dimension, degree)`. The basis carries a
//! multiplication table and a predecessor map, so products and compositions
//! cost one table sweep per monomial.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Monomial basis of all `z^α` with `|α| <= degree`, in graded order.
#[derive(Debug)]
pub(crate) struct Basis {
    dim: usize,
    degree: usize,
    exps: Vec<Vec<u32>>,
    total: Vec<usize>,
    index: HashMap<Vec<u32>, usize>,
    /// For every non-constant monomial `α`: (index of `α - e_k`, k) with k the
    /// first variable appearing in `α`.
    pred: Vec<(usize, usize)>,
    /// `(i, j, idx)` with `exps[i] + exps[j] == exps[idx]`, both non-constant.
    products: Vec<(u32, u32, u32)>,
}

impl Basis {
    fn build(dim: usize, degree: usize) -> Basis {
        let mut exps: Vec<Vec<u32>> = Vec::new();
        for deg in 0..=degree {
            let mut cur = vec![0u32; dim];
            push_compositions(deg as u32, 0, &mut cur, &mut exps);
        }
        let total: Vec<usize> = exps
            .iter()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .collect();
        let index: HashMap<Vec<u32>, usize> = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let mut pred = vec![(0, 0); exps.len()];
        for (i, e) in exps.iter().enumerate().skip(1) {
            let k = e.iter().position(|&x| x > 0).unwrap();
            let mut p = e.clone();
            p[k] -= 1;
            pred[i] = (index[&p], k);
        }
        let mut products = Vec::new();
        for i in 1..exps.len() {
            for j in 1..exps.len() {
                if total[i] + total[j] <= degree {
                    let s: Vec<u32> = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                    products.push((i as u32, j as u32, index[&s] as u32));
                }
            }
        }
        Basis {
            dim,
            degree,
            exps,
            total,
            index,
            pred,
            products,
        }
    }

    pub(crate) fn get(dim: usize, degree: usize) -> Arc<Basis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Basis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|p| p.into_inner());
        guard
            .entry((dim, degree))
            .or_insert_with(|| Arc::new(Basis::build(dim, degree)))
            .clone()
    }

    pub(crate) fn len(&self) -> usize {
        self.exps.len()
    }

    pub(crate) fn exponent(&self, i: usize) -> &[u32] {
        &self.exps[i]
    }

    pub(crate) fn total_degree(&self, i: usize) -> usize {
        self.total[i]
    }

    /// Truncated product of two polynomials over this basis.
    pub(crate) fn mul(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.len()];
        let (a0, b0) = (a[0], b[0]);
        for i in 0..self.len() {
            out[i] = a0 * b[i] + b0 * a[i];
        }
        out[0] = a0 * b0;
        for &(i, j, k) in &self.products {
            let (x, y) = (a[i as usize], b[j as usize]);
            if x != ZERO && y != ZERO {
                out[k as usize] += x * y;
            }
        }
        out
    }

    /// Values of every basis monomial on the polynomial tuple `inner`
    /// (one polynomial per variable), truncated. `inner` must have zero
    /// constant terms for the truncation to be exact.
    fn monomial_values(&self, inner: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let mut vals: Vec<Vec<Complex64>> = Vec::with_capacity(self.len());
        let mut one = vec![ZERO; self.len()];
        one[0] = ONE;
        vals.push(one);
        for i in 1..self.len() {
            let (p, k) = self.pred[i];
            let v = self.mul(&vals[p], &inner[k]);
            vals.push(v);
        }
        vals
    }

    /// `outer_k ∘ inner` for every outer polynomial.
    pub(crate) fn compose(
        &self,
        outer: &[Vec<Complex64>],
        inner: &[Vec<Complex64>],
    ) -> Vec<Vec<Complex64>> {
        let vals = self.monomial_values(inner);
        outer
            .iter()
            .map(|o| {
                let mut acc = vec![ZERO; self.len()];
                for (c, v) in o.iter().zip(&vals) {
                    if *c != ZERO {
                        for (a, x) in acc.iter_mut().zip(v) {
                            *a += c * x;
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// Partial derivative with respect to variable `var`.
    pub(crate) fn derivative(&self, p: &[Complex64], var: usize) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.len()];
        for (i, c) in p.iter().enumerate().skip(1) {
            let e = self.exps[i][var];
            if e == 0 || *c == ZERO {
                continue;
            }
            let mut lower = self.exps[i].clone();
            lower[var] -= 1;
            out[self.index[&lower]] += c * e as f64;
        }
        out
    }

    pub(crate) fn monomials_at(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut vals = Vec::with_capacity(self.len());
        vals.push(ONE);
        for i in 1..self.len() {
            let (p, k) = self.pred[i];
            vals.push(vals[p] * z[k]);
        }
        vals
    }

    pub(crate) fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

fn push_compositions(rest: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = rest;
        out.push(cur.clone());
        return;
    }
    for v in (0..=rest).rev() {
        cur[pos] = v;
        push_compositions(rest - v, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Taylor jet of a holomorphic map `C^n -> C^n` at the origin, truncated at
/// total degree `degree`, with vanishing constant term.
#[derive(Clone)]
pub struct Jet {
    basis: Arc<Basis>,
    comps: Vec<Vec<Complex64>>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<_> = self.terms().collect();
        f.debug_struct("Jet")
            .field("dim", &self.dim())
            .field("degree", &self.degree())
            .field("terms", &terms)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.degree() == other.degree() && self.comps == other.comps
    }
}

impl Jet {
    pub fn zero(dim: usize, degree: usize) -> Result<Jet> {
        if dim == 0 {
            return Err(Error::InvalidJet("dimension must be positive".into()));
        }
        if degree == 0 {
            return Err(Error::InvalidJet("degree must be positive".into()));
        }
        let basis = Basis::get(dim, degree);
        let comps = vec![vec![ZERO; basis.len()]; dim];
        Ok(Jet { basis, comps })
    }

    pub fn identity(dim: usize, degree: usize) -> Result<Jet> {
        let mut j = Jet::zero(dim, degree)?;
        for k in 0..dim {
            let mut alpha = vec![0; dim];
            alpha[k] = 1;
            j.set(k, &alpha, ONE)?;
        }
        Ok(j)
    }

    /// Builds a jet from `(component, multi-index, coefficient)` terms.
    /// Repeated terms accumulate.
    pub fn from_terms<'a, I>(dim: usize, degree: usize, terms: I) -> Result<Jet>
    where
        I: IntoIterator<Item = (usize, &'a [u32], Complex64)>,
    {
        let mut j = Jet::zero(dim, degree)?;
        for (k, alpha, c) in terms {
            let idx = j.slot(alpha, k)?;
            j.comps[k][idx] += c;
        }
        Ok(j)
    }

    pub(crate) fn from_parts(basis: Arc<Basis>, comps: Vec<Vec<Complex64>>) -> Jet {
        debug_assert_eq!(comps.len(), basis.dim);
        debug_assert!(comps.iter().all(|c| c.len() == basis.len()));
        Jet { basis, comps }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub(crate) fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub(crate) fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    fn slot(&self, alpha: &[u32], k: usize) -> Result<usize> {
        if alpha.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: alpha.len(),
            });
        }
        if k >= self.dim() {
            return Err(Error::InvalidJet(format!(
                "component {k} out of range for dimension {}",
                self.dim()
            )));
        }
        let deg: usize = alpha.iter().map(|&a| a as usize).sum();
        if deg == 0 || deg > self.degree() {
            return Err(Error::IndexOutOfRange {
                degree: deg,
                max: self.degree(),
            });
        }
        Ok(self.basis.index_of(alpha).expect("index in basis"))
    }

    pub fn set(&mut self, k: usize, alpha: &[u32], c: Complex64) -> Result<()> {
        let idx = self.slot(alpha, k)?;
        self.comps[k][idx] = c;
        Ok(())
    }

    /// Coefficient of `z^α` in component `k` (zero-based).
    pub fn coefficient(&self, alpha: &[u32], k: usize) -> Result<Complex64> {
        let idx = self.slot(alpha, k)?;
        Ok(self.comps[k][idx])
    }

    /// Nonzero terms as `(component, multi-index, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &[u32], Complex64)> + '_ {
        self.comps.iter().enumerate().flat_map(move |(k, c)| {
            c.iter()
                .enumerate()
                .skip(1)
                .filter(|(_, v)| **v != ZERO)
                .map(move |(i, v)| (k, self.basis.exponent(i), *v))
        })
    }

    /// All multi-indices `1 ≤ |α| ≤ degree`, in basis (graded) order.
    pub fn exponents(&self) -> Vec<Vec<u32>> {
        (1..self.basis.len()).map(|i| self.basis.exponent(i).to_vec()).collect()
    }

    /// Re-expresses the jet at another degree, dropping higher terms.
    pub fn with_degree(&self, degree: usize) -> Result<Jet> {
        if degree == self.degree() {
            return Ok(self.clone());
        }
        let mut out = Jet::zero(self.dim(), degree)?;
        for (k, alpha, c) in self.terms() {
            let deg: usize = alpha.iter().map(|&a| a as usize).sum();
            if deg <= degree {
                out.set(k, alpha, c)?;
            }
        }
        Ok(out)
    }

    /// `self ∘ inner`, truncated at the smaller of the two degrees.
    pub fn compose(&self, inner: &Jet) -> Result<Jet> {
        if self.dim() != inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: inner.dim(),
            });
        }
        let d = self.degree().min(inner.degree());
        let outer = self.with_degree(d)?;
        let inner = inner.with_degree(d)?;
        let comps = outer.basis.compose(&outer.comps, &inner.comps);
        Ok(Jet::from_parts(outer.basis.clone(), comps))
    }

    /// Polynomial value at `z`.
    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let m = self.basis.monomials_at(z);
        self.comps
            .iter()
            .map(|c| c.iter().zip(&m).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Jacobian of the polynomial at `z`.
    pub fn jacobian(&self, z: &[Complex64]) -> CMatrix {
        let n = self.dim();
        let m = self.basis.monomials_at(z);
        let mut out = CMatrix::zeros(n, n);
        for (i, c) in self.comps.iter().enumerate() {
            for (idx, coef) in c.iter().enumerate().skip(1) {
                if *coef == ZERO {
                    continue;
                }
                let e = self.basis.exponent(idx);
                for j in 0..n {
                    if e[j] == 0 {
                        continue;
                    }
                    let mut lower = e.to_vec();
                    lower[j] -= 1;
                    let li = self.basis.index_of(&lower).unwrap();
                    out[(i, j)] += coef * e[j] as f64 * m[li];
                }
            }
        }
        out
    }

    /// Linear part as a matrix.
    pub fn linear_part(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut alpha = vec![0; n];
                alpha[j] = 1;
                out[(i, j)] = self.comps[i][self.basis.index_of(&alpha).unwrap()];
            }
        }
        out
    }

    /// Applies the Jacobian of `self` along `g`: the jet of `z ↦ d(self)_z · g(z)`.
    ///
    /// Exact through `min(degrees)` because `g` has no constant term.
    pub fn jacobian_apply(&self, g: &Jet) -> Result<Jet> {
        if self.dim() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: g.dim(),
            });
        }
        let d = self.degree().min(g.degree());
        let f = self.with_degree(d)?;
        let g = g.with_degree(d)?;
        let b = f.basis.clone();
        let n = f.dim();
        let mut comps = vec![vec![ZERO; b.len()]; n];
        for (i, fi) in f.comps.iter().enumerate() {
            for j in 0..n {
                let dfij = b.derivative(fi, j);
                let prod = b.mul(&dfij, &g.comps[j]);
                for (a, p) in comps[i].iter_mut().zip(prod) {
                    *a += p;
                }
            }
        }
        Ok(Jet::from_parts(b, comps))
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|v| v * s).collect())
            .collect();
        Jet::from_parts(self.basis.clone(), comps)
    }

    /// `a·self + b·other`; both jets must share dimension and degree.
    pub fn combine(&self, a: Complex64, other: &Jet, b: Complex64) -> Result<Jet> {
        if self.dim() != other.dim() || self.degree() != other.degree() {
            return Err(Error::InvalidJet(format!(
                "cannot combine jets of shape ({}, {}) and ({}, {})",
                self.dim(),
                self.degree(),
                other.dim(),
                other.degree()
            )));
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
            .collect();
        Ok(Jet::from_parts(self.basis.clone(), comps))
    }

    /// Scales each degree-`m` coefficient by `factor^m`.
    pub fn dilate(&self, factor: f64) -> Jet {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .map(|(i, v)| v * factor.powi(self.basis.total_degree(i) as i32))
                    .collect()
            })
            .collect();
        Jet::from_parts(self.basis.clone(), comps)
    }

    /// Max modulus of coefficient differences (same shape required).
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| *v == ZERO))
    }

    /// Coefficients of degrees `1..=degree` flattened component-major.
    pub(crate) fn to_flat(&self) -> Vec<Complex64> {
        self.comps
            .iter()
            .flat_map(|c| c[1..].iter().copied())
            .collect()
    }

    pub(crate) fn from_flat(basis: Arc<Basis>, flat: &[Complex64]) -> Jet {
        let per = basis.len() - 1;
        let comps = flat
            .chunks(per)
            .map(|ch| {
                let mut v = Vec::with_capacity(per + 1);
                v.push(ZERO);
                v.extend_from_slice(ch);
                v
            })
            .collect();
        Jet::from_parts(basis, comps)
    }
}

/// Coefficient of `z^α` in component `k`; zero when the term is absent.
pub fn coefficient(jet: &Jet, alpha: &[u32], k: usize) -> Result<Complex64> {
    jet.coefficient(alpha, k)
}

/// Taylor coefficients of `outer ∘ inner` through `min(degrees)`.
pub fn jet_compose(outer: &Jet, inner: &Jet) -> Result<Jet> {
    outer.compose(inner)
}

//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use loewner_core::holomap::{CVec, Jet, MapDescriptor};
use loewner_core::loewner::HerglotzField;
use loewner_core::{c64, Complex64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unimodular(r: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, r.gen_range(0.0..TAU))
}

/// Uniform direction on the unit sphere of `C^n`.
pub fn unit_vector(r: &mut impl Rng, n: usize) -> CVec {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| c64(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
        let len = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if len > 1e-3 && len <= 1.0 {
            return CVec::new(v.into_iter().map(|x| x / len).collect()).unwrap();
        }
    }
}

/// A point with `‖z‖ ≤ radius`.
pub fn point(r: &mut impl Rng, n: usize, radius: f64) -> CVec {
    let u = unit_vector(r, n);
    u.scale(c64(radius * r.gen_range(0.0f64..1.0).sqrt(), 0.0))
}

pub fn moebius(r: &mut impl Rng, n: usize) -> MapDescriptor {
    MapDescriptor::slice_moebius(unimodular(r), unit_vector(r, n)).unwrap()
}

/// A random member of `M_n`: linear, Möbius, or a convex combination.
pub fn member(r: &mut impl Rng, n: usize) -> MapDescriptor {
    match r.gen_range(0..4) {
        0 => MapDescriptor::linear_radial(n),
        1 | 2 => moebius(r, n),
        _ => {
            let w = r.gen_range(0.05..0.95);
            MapDescriptor::convex_combo(vec![w, 1.0 - w], vec![moebius(r, n), member_simple(r, n)]).unwrap()
        }
    }
}

fn member_simple(r: &mut impl Rng, n: usize) -> MapDescriptor {
    if r.gen_bool(0.5) {
        MapDescriptor::linear_radial(n)
    } else {
        moebius(r, n)
    }
}

/// Piecewise-constant field with `pieces` pieces and breakpoints in `(0, span)`.
pub fn field(r: &mut impl Rng, n: usize, pieces: usize, span: f64) -> HerglotzField {
    let mut bps: Vec<f64> = (1..pieces).map(|_| r.gen_range(0.05..span)).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    bps.insert(0, 0.0);
    let ps = (0..bps.len()).map(|_| member(r, n)).collect();
    HerglotzField::new(bps, ps).unwrap()
}

/// Random jet without constant term, coefficients in the unit square.
pub fn jet(r: &mut impl Rng, n: usize, degree: usize) -> Jet {
    let mut j = Jet::zero(n, degree).unwrap();
    for k in 0..n {
        for a in j.exponents() {
            j.set(k, &a, c64(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).unwrap();
        }
    }
    j
}

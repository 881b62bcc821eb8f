#![allow(dead_code)]

use drops_core::spin::Operator;
use drops_core::{SphericalExpansion, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_operator(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    let d = 1 << n;
    let m = DMatrix::from_fn(d, d, |_, _| C64::new(normal(rng), normal(rng)));
    Operator::new(n, m).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    let a = random_operator(rng, n);
    (&a + &a.adjoint()) * 0.5
}

pub fn random_expansion(rng: &mut ChaCha8Rng, jmax: u32) -> SphericalExpansion {
    let mut e = SphericalExpansion::new();
    for j in 0..=jmax {
        for m in -(j as i32)..=j as i32 {
            e.set(j, m, C64::new(normal(rng), normal(rng)));
        }
    }
    e
}

pub fn random_angles(rng: &mut ChaCha8Rng) -> (f64, f64) {
    use std::f64::consts::PI;
    (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))
}

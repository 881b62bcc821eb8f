mod common;

use std::f64::consts::PI;

use drops_core::lisa::{labels_for, rank_component, spin_permutation};
use drops_core::nmr::{apply_gradient, apply_pulse, evolve, Pulse, SpinSystemParams};
use drops_core::sphere::{l2_inner, rotate_function, AngularGrid};
use drops_core::spin::{conjugate, global_rotation, hs_inner, matrix_exponential};
use drops_core::{decompose, reconstruct, DropletLabel, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_expansion, random_hermitian, random_operator};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exponential_of_anti_hermitian_is_unitary(seed in any::<u64>(), n in 1usize..=3) {
        let h = random_hermitian(&mut rng(seed), n);
        let u = matrix_exponential(&(&h * C64::new(0.0, -1.0)));
        prop_assert!(u.is_unitary(1e-10));
    }

    #[test]
    fn inner_product_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_operator(&mut r, n);
        let b = random_operator(&mut r, n);
        let u = matrix_exponential(&(&random_hermitian(&mut r, n) * C64::new(0.0, 1.0)));
        let before = hs_inner(&a, &b).unwrap();
        let after = hs_inner(&conjugate(&u, &a).unwrap(), &conjugate(&u, &b).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-9 * (1.0 + before.norm()));
    }

    #[test]
    fn droplet_inner_product_matches_operator_inner_product(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_operator(&mut r, n);
        let b = random_operator(&mut r, n);
        let (da, db) = (decompose(&a).unwrap(), decompose(&b).unwrap());
        let grid = AngularGrid::default();
        for label in labels_for(n).unwrap() {
            let lhs = l2_inner(da.get(label).unwrap(), db.get(label).unwrap(), &grid);
            let mut rhs = C64::new(0.0, 0.0);
            for &j in label.ranks() {
                let pa = rank_component(&a, label, j).unwrap();
                let pb = rank_component(&b, label, j).unwrap();
                rhs += hs_inner(&pa, &pb).unwrap();
            }
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()), "{} {} {}", label, lhs, rhs);
        }
    }

    #[test]
    fn decomposition_is_rotation_covariant(
        seed in any::<u64>(),
        n in 1usize..=3,
        beta in 0.0..PI,
        alpha in 0.0..2.0 * PI,
    ) {
        let a = random_hermitian(&mut rng(seed), n);
        let r = global_rotation(n, alpha, beta);
        let lhs = decompose(&conjugate(&r, &a).unwrap()).unwrap();
        let rhs = rotate_function(&decompose(&a).unwrap(), alpha, beta);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn z_rotation_multiplies_coherence_order_m_by_phase(
        seed in any::<u64>(),
        n in 1usize..=3,
        phi in 0.0..2.0 * PI,
    ) {
        let a = random_operator(&mut rng(seed), n);
        let rz = global_rotation(n, phi, 0.0);
        let rotated = decompose(&conjugate(&rz, &a).unwrap()).unwrap();
        let original = decompose(&a).unwrap();
        for (label, e) in original.iter() {
            for ((j, m), c) in e.iter() {
                let expected = c * C64::from_polar(1.0, -(m as f64) * phi);
                let got = rotated.get(*label).unwrap().get(j, m);
                prop_assert!((got - expected).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn decomposition_is_linear(seed in any::<u64>(), n in 1usize..=3, s in -3.0f64..3.0) {
        let mut r = rng(seed);
        let a = random_operator(&mut r, n);
        let b = random_operator(&mut r, n);
        let w = C64::new(s, 0.5);
        let combined = decompose(&(&a + &(&b * w))).unwrap();
        let da = decompose(&a).unwrap();
        let db = decompose(&b).unwrap();
        for (label, e) in combined.iter() {
            for ((j, m), c) in e.iter() {
                let expected = da.get(*label).unwrap().get(j, m) + w * db.get(*label).unwrap().get(j, m);
                prop_assert!((c - expected).norm() < 1e-10);
            }
        }
        prop_assert!(reconstruct(&combined).unwrap().distance(&(&a + &(&b * w))) < 1e-9);
    }

    #[test]
    fn gradient_is_a_contracting_projection(seed in any::<u64>(), n in 1usize..=3) {
        let rho = random_hermitian(&mut rng(seed), n);
        let once = apply_gradient(&rho);
        prop_assert!(apply_gradient(&once).max_abs_diff(&once) == 0.0);
        prop_assert!(once.norm() <= rho.norm() + 1e-12);
    }

    #[test]
    fn pulses_and_delays_preserve_norm(
        seed in any::<u64>(),
        n in 1usize..=3,
        flip in -PI..PI,
        phase in 0.0..2.0 * PI,
        t in 0.0f64..0.05,
    ) {
        let rho = random_hermitian(&mut rng(seed), n);
        let targets: Vec<usize> = (1..=n).collect();
        let pulsed = apply_pulse(&rho, &Pulse::new(flip, phase, &targets)).unwrap();
        prop_assert!((pulsed.norm() - rho.norm()).abs() < 1e-9);
        let params = SpinSystemParams::with_default_couplings(n);
        let evolved = evolve(&pulsed, &params, t).unwrap();
        prop_assert!((evolved.norm() - rho.norm()).abs() < 1e-9);
    }

    #[test]
    fn expansions_are_periodic_in_azimuth(seed in any::<u64>(), theta in 0.0..PI, phi in 0.0..2.0 * PI) {
        let e = random_expansion(&mut rng(seed), 3);
        let a = e.evaluate(theta, phi);
        let b = e.evaluate(theta, phi + 2.0 * PI);
        prop_assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn swapping_spins_swaps_single_droplets(seed in any::<u64>()) {
        let a = random_operator(&mut rng(seed), 2);
        let swapped = spin_permutation(&a, &[2, 1]).unwrap();
        let da = decompose(&a).unwrap();
        let ds = decompose(&swapped).unwrap();
        for k in 1..=2usize {
            let l = 3 - k;
            let from = da.get(DropletLabel::single(k).unwrap()).unwrap();
            let to = ds.get(DropletLabel::single(l).unwrap()).unwrap();
            prop_assert!(from.max_abs_diff(to) < 1e-12);
        }
    }
}

//! Spherical harmonics, quadrature on the sphere and Wigner rotation matrices.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::droplet::{DropletFunction, SphericalExpansion};
use crate::error::{Error, Result};
use crate::lisa::DropletLabel;
use crate::spin::C64;

/// Default number of Gauss–Legendre nodes in `cos θ`.
pub const DEFAULT_QUADRATURE_ORDER: usize = 16;

/// `s_j = √((2j+1)/(4π))`, the pole value of `Y_{j0}`.
pub fn s_factor(j: u32) -> f64 {
    ((2 * j + 1) as f64 / (4.0 * PI)).sqrt()
}

/// Orthonormal spherical harmonic `Y_{jm}(θ, φ)` with the Condon–Shortley phase.
pub fn ylm(j: u32, m: i32, theta: f64, phi: f64) -> Result<C64> {
    if m.unsigned_abs() > j {
        return Err(Error::InvalidArgument(format!(
            "|m| = {} exceeds j = {j}",
            m.abs()
        )));
    }
    Ok(ylm_unchecked(j, m, theta, phi))
}

pub(crate) fn ylm_unchecked(j: u32, m: i32, theta: f64, phi: f64) -> C64 {
    let ma = m.unsigned_abs();
    let p = normalized_legendre(j, ma, theta);
    let y = C64::from_polar(p, ma as f64 * phi);
    if m >= 0 {
        y
    } else if ma.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

/// `√((2l+1)/(4π) (l-m)!/(l+m)!) P_l^m(cos θ)` for `m ≥ 0`, phase included.
fn normalized_legendre(l: u32, m: u32, theta: f64) -> f64 {
    let (s, x) = theta.sin_cos();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        let k = k as f64;
        pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    if l == m {
        return pmm;
    }
    let mut prev = pmm;
    let mut cur = x * ((2 * m + 3) as f64).sqrt() * pmm;
    let mf = m as f64;
    for ll in m + 2..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b =
            (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// A quadrature node on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Product quadrature: Gauss–Legendre in `cos θ` times a uniform rule in `φ`.
#[derive(Clone, Debug)]
pub struct AngularGrid {
    points: Vec<GridPoint>,
    band_limit: u32,
}

impl AngularGrid {
    /// `order` Legendre nodes and `2·order` azimuths; exact for products of
    /// harmonics up to rank `order - 1`.
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "quadrature order must be positive".into(),
            ));
        }
        let (nodes, weights) = gauss_legendre_nodes(order);
        let n_phi = 2 * order;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(order * n_phi);
        for (x, w) in nodes.iter().zip(&weights) {
            let theta = x.clamp(-1.0, 1.0).acos();
            for k in 0..n_phi {
                points.push(GridPoint {
                    theta,
                    phi: k as f64 * dphi,
                    weight: w * dphi,
                });
            }
        }
        Ok(Self {
            points,
            band_limit: order as u32 - 1,
        })
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Highest rank `j` for which `Y_{jm} Y*_{j'm'}` (`j, j' ≤ band_limit`) integrates exactly.
    pub fn band_limit(&self) -> u32 {
        self.band_limit
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }
}

impl Default for AngularGrid {
    fn default() -> Self {
        Self::gauss_legendre(DEFAULT_QUADRATURE_ORDER).expect("positive order")
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Anything that can be evaluated at a point of the sphere.
pub trait SphericalFunction {
    fn value(&self, theta: f64, phi: f64) -> C64;
}

impl SphericalExpansion {
    pub fn evaluate(&self, theta: f64, phi: f64) -> C64 {
        self.iter()
            .map(|((j, m), c)| c * ylm_unchecked(j, m, theta, phi))
            .sum()
    }
}

impl SphericalFunction for SphericalExpansion {
    fn value(&self, theta: f64, phi: f64) -> C64 {
        self.evaluate(theta, phi)
    }
}

impl<F: Fn(f64, f64) -> C64> SphericalFunction for F {
    fn value(&self, theta: f64, phi: f64) -> C64 {
        self(theta, phi)
    }
}

/// `∫ h* g dΩ` by quadrature.
pub fn l2_inner<H, G>(h: &H, g: &G, grid: &AngularGrid) -> C64
where
    H: SphericalFunction + ?Sized,
    G: SphericalFunction + ?Sized,
{
    grid.points
        .iter()
        .map(|p| h.value(p.theta, p.phi).conj() * g.value(p.theta, p.phi) * p.weight)
        .sum()
}

/// `∫ h* g dΩ` for values already sampled on the nodes of `grid`.
pub fn l2_inner_sampled(h: &[C64], g: &[C64], grid: &AngularGrid) -> Result<C64> {
    if h.len() != grid.len() || g.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "sample counts {} and {} do not match a grid of {} nodes",
            h.len(),
            g.len(),
            grid.len()
        )));
    }
    Ok(grid
        .points
        .iter()
        .zip(h.iter().zip(g))
        .map(|(p, (a, b))| a.conj() * b * p.weight)
        .sum())
}

/// Values of `f` on every node of `grid`.
pub fn sample_on_grid<F: SphericalFunction + ?Sized>(f: &F, grid: &AngularGrid) -> Vec<C64> {
    grid.points
        .iter()
        .map(|p| f.value(p.theta, p.phi))
        .collect()
}

/// `Σ_{jm} c_{jm}^{(ℓ)} Y_{jm}(θ, φ)`; absent labels evaluate to zero.
pub fn evaluate_droplet(d: &DropletFunction, label: DropletLabel, theta: f64, phi: f64) -> C64 {
    d.get(label)
        .map(|e| e.evaluate(theta, phi))
        .unwrap_or_default()
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Wigner small-d matrix `d^j_{m'm}(β)`, rows and columns indexed by `m + j`.
pub fn wigner_small_d(j: u32, beta: f64) -> DMatrix<f64> {
    let ji = j as i64;
    let dim = (2 * j + 1) as usize;
    let (s, c) = (beta / 2.0).sin_cos();
    DMatrix::from_fn(dim, dim, |r, col| {
        let mp = r as i64 - ji;
        let m = col as i64 - ji;
        let pref =
            (factorial(ji + mp) * factorial(ji - mp) * factorial(ji + m) * factorial(ji - m))
                .sqrt();
        let kmin = 0.max(m - mp);
        let kmax = (ji + m).min(ji - mp);
        (kmin..=kmax)
            .map(|k| {
                let sign = if (k - m + mp) % 2 == 0 { 1.0 } else { -1.0 };
                let den = factorial(ji + m - k)
                    * factorial(k)
                    * factorial(ji - k - mp)
                    * factorial(k - m + mp);
                sign * pref / den
                    * c.powi((2 * ji - 2 * k + m - mp) as i32)
                    * s.powi((2 * k - m + mp) as i32)
            })
            .sum()
    })
}

/// `D^j_{m'm}(α, β, γ) = e^{-im'α} d^j_{m'm}(β) e^{-imγ}`.
pub fn wigner_d(j: u32, alpha: f64, beta: f64, gamma: f64) -> DMatrix<C64> {
    let d = wigner_small_d(j, beta);
    let ji = j as i64;
    DMatrix::from_fn(d.nrows(), d.ncols(), |r, c| {
        let mp = (r as i64 - ji) as f64;
        let m = (c as i64 - ji) as f64;
        C64::from_polar(d[(r, c)], -(mp * alpha + m * gamma))
    })
}

/// Coefficients of `f ∘ R⁻¹` where `R = R_z(α) R_y(β)`.
pub fn rotate_expansion(e: &SphericalExpansion, alpha: f64, beta: f64) -> SphericalExpansion {
    let mut out = SphericalExpansion::new();
    for j in e.ranks() {
        let d = wigner_d(j, alpha, beta, 0.0);
        let ji = j as i32;
        for mp in -ji..=ji {
            let v: C64 = (-ji..=ji)
                .map(|m| d[((mp + ji) as usize, (m + ji) as usize)] * e.get(j, m))
                .sum();
            out.set(j, mp, v);
        }
    }
    out
}

/// Rotates every droplet of `d` by `R_z(α) R_y(β)`.
pub fn rotate_function(d: &DropletFunction, alpha: f64, beta: f64) -> DropletFunction {
    let mut out = DropletFunction::new(d.n_spins());
    for (label, e) in d.iter() {
        *out.expansion_mut(*label) = rotate_expansion(e, alpha, beta);
    }
    out
}

/// Spherical angles of `R_y(-β) R_z(-α) r(θ, φ)`.
pub fn inverse_rotate_point(alpha: f64, beta: f64, theta: f64, phi: f64) -> (f64, f64) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = (phi - alpha).sin_cos();
    let (x, y, z) = (st * cp, st * sp, ct);
    let (sb, cb) = beta.sin_cos();
    let (x2, z2) = (cb * x - sb * z, sb * x + cb * z);
    let th = z2.clamp(-1.0, 1.0).acos();
    let ph = y.atan2(x2).rem_euclid(2.0 * PI);
    (th, ph)
}

/// A complex function value at a point, in polar form for plotting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalSample {
    pub theta: f64,
    pub phi: f64,
    pub value: C64,
}

impl SphericalSample {
    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }

    /// `atan2(Im, Re)` in `(-π, π]`.
    pub fn phase(&self) -> f64 {
        self.value.im.atan2(self.value.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_expansion(rng: &mut ChaCha8Rng, jmax: u32) -> SphericalExpansion {
        let mut e = SphericalExpansion::new();
        for j in 0..=jmax {
            for m in -(j as i32)..=j as i32 {
                e.set(
                    j,
                    m,
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        e
    }

    #[test]
    fn ylm_closed_forms() {
        let (t, p) = (0.7f64, 1.3f64);
        let (s, c) = (t.sin(), t.cos());
        let e = |m: f64| C64::from_polar(1.0, m * p);
        let cases = [
            (0, 0, e(0.0) * (1.0 / (4.0 * PI)).sqrt()),
            (1, 0, e(0.0) * (3.0 / (4.0 * PI)).sqrt() * c),
            (1, 1, e(1.0) * -(3.0 / (8.0 * PI)).sqrt() * s),
            (
                2,
                0,
                e(0.0) * (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0),
            ),
            (2, 1, e(1.0) * -(15.0 / (8.0 * PI)).sqrt() * s * c),
            (2, 2, e(2.0) * (15.0 / (32.0 * PI)).sqrt() * s * s),
            (
                3,
                0,
                e(0.0) * (7.0 / (16.0 * PI)).sqrt() * (5.0 * c.powi(3) - 3.0 * c),
            ),
            (
                3,
                1,
                e(1.0) * -(21.0 / (64.0 * PI)).sqrt() * s * (5.0 * c * c - 1.0),
            ),
            (3, 2, e(2.0) * (105.0 / (32.0 * PI)).sqrt() * s * s * c),
            (3, 3, e(3.0) * -(35.0 / (64.0 * PI)).sqrt() * s.powi(3)),
        ];
        for (j, m, expected) in cases {
            assert!(
                (ylm(j, m, t, p).unwrap() - expected).norm() < 1e-13,
                "Y_{j}{m}"
            );
            let neg = ylm(j, -m, t, p).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((neg - expected.conj() * sign).norm() < 1e-13);
        }
    }

    #[test]
    fn ylm_specific_values() {
        let y = ylm(2, 1, PI / 3.0, PI / 4.0).unwrap();
        let t = PI / 3.0;
        let expected = C64::from_polar(-(15.0 / (8.0 * PI)).sqrt() * t.sin() * t.cos(), PI / 4.0);
        assert!((y - expected).norm() < 1e-12);
        for j in 1..=6 {
            for m in 1..=j as i32 {
                assert!(ylm(j, m, 0.0, 0.4).unwrap().norm() < 1e-15);
            }
        }
        assert!(ylm(1, 2, 0.0, 0.0).is_err());
    }

    #[test]
    fn pole_values_equal_s_factor() {
        assert!((s_factor(0) - 0.2820947918).abs() < 1e-10);
        assert!((s_factor(1) - 0.4886025119).abs() < 1e-10);
        for j in 0..=6 {
            assert!((ylm(j, 0, 0.0, 0.0).unwrap().re - s_factor(j)).abs() < 1e-12);
        }
    }

    #[test]
    fn azimuth_wraps() {
        for j in 0..=4u32 {
            for m in -(j as i32)..=j as i32 {
                let a = ylm(j, m, 1.1, 0.3).unwrap();
                let b = ylm(j, m, 1.1, 0.3 + 2.0 * PI).unwrap();
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gauss_legendre_rule() {
        let (x, w) = gauss_legendre_nodes(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-14);
        let g = AngularGrid::default();
        assert_eq!(g.len(), 16 * 32);
        assert_eq!(g.band_limit(), 15);
        assert!((g.total_weight() - 4.0 * PI).abs() < 1e-8);
        assert!(AngularGrid::gauss_legendre(0).is_err());
        assert_eq!(AngularGrid::gauss_legendre(1).unwrap().len(), 2);
    }

    #[test]
    fn harmonics_are_orthonormal_on_grid() {
        let g = AngularGrid::default();
        let mut lm = Vec::new();
        for j in 0..=4u32 {
            for m in -(j as i32)..=j as i32 {
                lm.push((j, m));
            }
        }
        for &(j, m) in &lm {
            for &(jp, mp) in &lm {
                let h = |t: f64, p: f64| ylm_unchecked(j, m, t, p);
                let f = |t: f64, p: f64| ylm_unchecked(jp, mp, t, p);
                let v = l2_inner(&h, &f, &g);
                let target = if (j, m) == (jp, mp) { 1.0 } else { 0.0 };
                assert!((v - target).norm() < 1e-10, "({j},{m}) ({jp},{mp})");
            }
        }
    }

    #[test]
    fn parseval_for_random_expansions() {
        let g = AngularGrid::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let h = random_expansion(&mut rng, 3);
            let f = random_expansion(&mut rng, 3);
            let direct: C64 = h.iter().map(|((j, m), c)| c.conj() * f.get(j, m)).sum();
            assert!((l2_inner(&h, &f, &g) - direct).norm() < 1e-9);
            let hs = sample_on_grid(&h, &g);
            let fs = sample_on_grid(&f, &g);
            assert!((l2_inner_sampled(&hs, &fs, &g).unwrap() - direct).norm() < 1e-9);
        }
        assert!(l2_inner_sampled(&[C64::default()], &[], &g).is_err());
    }

    fn jy_exponential(j: u32, beta: f64) -> DMatrix<C64> {
        let dim = (2 * j + 1) as usize;
        let jf = j as f64;
        let mut jp = DMatrix::<C64>::zeros(dim, dim);
        for c in 0..dim - 1 {
            let m = c as f64 - jf;
            jp[(c + 1, c)] = C64::new((jf * (jf + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
        let jy = (&jp - jp.adjoint()) * C64::new(0.0, -0.5);
        (jy * C64::new(0.0, -beta)).exp()
    }

    #[test]
    fn small_d_matches_generator_exponential() {
        for j in 0..=3 {
            for beta in [0.0, 0.4, 1.9, PI] {
                let d = wigner_small_d(j, beta).map(|x| C64::new(x, 0.0));
                assert!(
                    (d - jy_exponential(j, beta)).norm() < 1e-12,
                    "j={j} β={beta}"
                );
            }
        }
        assert_eq!(wigner_d(0, 0.3, 0.2, 0.1)[(0, 0)], C64::new(1.0, 0.0));
        let d1 = wigner_small_d(1, 0.8);
        assert!((d1[(1, 1)] - 0.8f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn wigner_d_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for j in 0..=3 {
            let (a, b, c) = (
                rng.random_range(0.0..6.0),
                rng.random_range(0.0..3.0),
                rng.random_range(0.0..6.0),
            );
            let d = wigner_d(j, a, b, c);
            let dim = d.nrows();
            assert!((d.adjoint() * &d - DMatrix::<C64>::identity(dim, dim)).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_moves_pole_to_x_axis() {
        let mut e = SphericalExpansion::new();
        e.set(1, 0, C64::new(1.0, 0.0));
        let r = rotate_expansion(&e, 0.0, PI / 2.0);
        assert!((r.evaluate(PI / 2.0, 0.0) - s_factor(1)).norm() < 1e-12);
        let id = rotate_expansion(&e, 0.0, 0.0);
        assert!(id.max_abs_diff(&e) < 1e-15);
    }

    #[test]
    fn rotation_is_pointwise_pullback() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = random_expansion(&mut rng, 3);
        let (alpha, beta) = (0.9, 2.1);
        let r = rotate_expansion(&e, alpha, beta);
        for _ in 0..20 {
            let (t, p) = (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let (ti, pi) = inverse_rotate_point(alpha, beta, t, p);
            assert!((r.evaluate(t, p) - e.evaluate(ti, pi)).norm() < 1e-10);
        }
    }

    #[test]
    fn rotations_compose_through_d_matrix_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = random_expansion(&mut rng, 3);
        let (a1, b1, a2, b2) = (0.3, 1.2, 2.2, 0.7);
        let twice = rotate_expansion(&rotate_expansion(&e, a1, b1), a2, b2);
        for j in 0..=3 {
            let d = wigner_d(j, a2, b2, 0.0) * wigner_d(j, a1, b1, 0.0);
            let ji = j as i32;
            for mp in -ji..=ji {
                let v: C64 = (-ji..=ji)
                    .map(|m| d[((mp + ji) as usize, (m + ji) as usize)] * e.get(j, m))
                    .sum();
                assert!((twice.get(j, mp) - v).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn droplet_evaluation() {
        use crate::lisa::decompose;
        use crate::spin::{single_spin, Axis};
        let d = decompose(&single_spin(1, 1, Axis::Z).unwrap()).unwrap();
        let v = evaluate_droplet(&d, DropletLabel::Single(1), 0.0, 0.0);
        assert!((v.re - 0.3454941494713355).abs() < 1e-12);
        assert_eq!(
            evaluate_droplet(&d, DropletLabel::Pair(1, 2), 0.3, 0.2),
            C64::default()
        );

        let dx = decompose(&single_spin(1, 1, Axis::X).unwrap()).unwrap();
        let mut best = (0.0, 0.0, 0.0);
        for bi in 0..=36 {
            for ai in 0..72 {
                let (t, p) = (bi as f64 * PI / 36.0, ai as f64 * PI / 36.0);
                let m = evaluate_droplet(&dx, DropletLabel::Single(1), t, p).norm();
                if m > best.0 + 1e-12 {
                    best = (m, t, p);
                }
            }
        }
        assert!((best.1 - PI / 2.0).abs() < 1e-12 && best.2.abs() < 1e-12);
    }

    #[test]
    fn sample_polar_form() {
        let s = SphericalSample {
            theta: 0.0,
            phi: 0.0,
            value: C64::new(-1.0, 0.0),
        };
        assert!((s.phase() - PI).abs() < 1e-15);
        assert_eq!(s.magnitude(), 1.0);
        let s = SphericalSample {
            value: C64::new(0.0, -2.0),
            ..s
        };
        assert!((s.phase() + PI / 2.0).abs() < 1e-15);
    }
}

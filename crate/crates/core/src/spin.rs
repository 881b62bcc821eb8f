//! Dense operator algebra for systems of `n` coupled spins 1/2.
//!
//! Spin 1 is the leftmost Kronecker factor, so `I_{kη}` is
//! `1 ⊗ … ⊗ I_η ⊗ … ⊗ 1` with `I_η` in slot `k`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Unitarity tolerance for conjugation arguments.
pub const UNITARY_TOL: f64 = 1e-10;
/// A complex scalar is treated as real when `|Im| < REAL_TOL`.
pub const REAL_TOL: f64 = 1e-10;

/// Largest supported spin count. Dimension grows as `2^n`.
pub const MAX_SPINS: usize = 10;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Single-spin Cartesian axis; `Identity` is the `I_0` factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Identity,
    X,
    Y,
    Z,
}

impl Axis {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '0' | 'e' => Ok(Axis::Identity),
            'x' | 'X' => Ok(Axis::X),
            'y' | 'Y' => Ok(Axis::Y),
            'z' | 'Z' => Ok(Axis::Z),
            other => Err(Error::Parse(format!("unknown spin axis '{other}'"))),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Axis::Identity => '0',
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    /// `I_η = σ_η / 2`, or the 2×2 identity.
    pub fn matrix(self) -> DMatrix<C64> {
        let h = C64::new(0.5, 0.0);
        match self {
            Axis::Identity => DMatrix::identity(2, 2),
            Axis::X => DMatrix::from_row_slice(2, 2, &[ZERO, h, h, ZERO]),
            Axis::Y => DMatrix::from_row_slice(2, 2, &[ZERO, -I * 0.5, I * 0.5, ZERO]),
            Axis::Z => DMatrix::from_row_slice(2, 2, &[h, ZERO, ZERO, -h]),
        }
    }
}

/// Cartesian product operator label such as `2I_{1x}I_{2z}`.
///
/// Stores the non-identity factors (1-based spin index, axis) sorted by spin.
/// The operator carries the prefactor `2^(q-1)` for `q ≥ 1` involved spins,
/// which gives `⟨C|C⟩ = 2^(n-2)` in an `n`-spin space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartesianLabel {
    factors: Vec<(usize, Axis)>,
}

impl CartesianLabel {
    pub fn new(factors: impl IntoIterator<Item = (usize, Axis)>) -> Result<Self> {
        let mut factors: Vec<(usize, Axis)> = factors
            .into_iter()
            .filter(|(_, a)| *a != Axis::Identity)
            .collect();
        if factors.iter().any(|(k, _)| *k == 0) {
            return Err(Error::InvalidArgument("spin indices are 1-based".into()));
        }
        factors.sort();
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(
                "a spin appears twice in a Cartesian label".into(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn identity() -> Self {
        Self {
            factors: Vec::new(),
        }
    }

    pub fn single(spin: usize, axis: Axis) -> Result<Self> {
        Self::new([(spin, axis)])
    }

    /// Parse a dense axis string, one character per spin: `"xzz"` is `4I_{1x}I_{2z}I_{3z}`.
    pub fn parse_dense(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .enumerate()
            .map(|(i, c)| Axis::from_char(c).map(|a| (i + 1, a)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    /// Number of non-identity factors.
    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn prefactor(&self) -> f64 {
        match self.order() {
            0 => 1.0,
            q => 2f64.powi(q as i32 - 1),
        }
    }

    pub fn axis_of(&self, spin: usize) -> Axis {
        self.factors
            .iter()
            .find(|(k, _)| *k == spin)
            .map(|(_, a)| *a)
            .unwrap_or(Axis::Identity)
    }

    pub fn max_spin(&self) -> usize {
        self.factors.last().map(|(k, _)| *k).unwrap_or(0)
    }

    /// Dense axis string over `n` spins, e.g. `"x0z"`.
    pub fn to_dense(&self, n: usize) -> String {
        (1..=n).map(|k| self.axis_of(k).as_char()).collect()
    }

    /// Same factors with every axis replaced through `f`.
    pub fn map_axes(&self, mut f: impl FnMut(usize, Axis) -> Axis) -> Result<Self> {
        Self::new(self.factors.iter().map(|&(k, a)| (k, f(k, a))))
    }
}

impl fmt::Display for CartesianLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let pre = self.prefactor();
        if pre != 1.0 {
            write!(f, "{pre}")?;
        }
        for (k, a) in &self.factors {
            write!(f, "I{k}{}", a.as_char())?;
        }
        Ok(())
    }
}

/// An operator on `n` spins 1/2, stored as a dense `2^n × 2^n` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    n_spins: usize,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(n_spins: usize, matrix: DMatrix<C64>) -> Result<Self> {
        check_spins(n_spins)?;
        let d = 1usize << n_spins;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidArgument(format!(
                "{n_spins} spins need a {d}x{d} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { n_spins, matrix })
    }

    pub fn zeros(n_spins: usize) -> Self {
        let d = 1usize << n_spins;
        Self {
            n_spins,
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(n_spins: usize) -> Self {
        let d = 1usize << n_spins;
        Self {
            n_spins,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_spins: self.n_spins,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Squared Frobenius norm, `⟨A|A⟩`.
    pub fn norm_sqr(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs(&(&self.matrix - self.matrix.adjoint())) <= tol
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        max_abs(&(&self.matrix + self.matrix.adjoint())) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim();
        max_abs(&(&self.matrix * self.matrix.adjoint() - DMatrix::<C64>::identity(d, d))) <= tol
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.n_spins, other.n_spins, "spin count mismatch");
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Frobenius distance `‖self - other‖`.
    pub fn distance(&self, other: &Operator) -> f64 {
        (self - other).norm()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            n_spins: self.n_spins,
            matrix: &self.matrix * c,
        }
    }

    /// Dagger-free product `self · rhs`.
    pub fn product(&self, rhs: &Operator) -> Result<Self> {
        same_size(self, rhs)?;
        Ok(Self {
            n_spins: self.n_spins,
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    /// Embed a `k`-spin operator acting on the first `k` spins into `n` spins.
    pub fn kron(&self, rhs: &Operator) -> Self {
        Self {
            n_spins: self.n_spins + rhs.n_spins,
            matrix: self.matrix.kronecker(&rhs.matrix),
        }
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_spins(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SPINS {
        return Err(Error::InvalidArgument(format!(
            "spin count must be in 1..={MAX_SPINS}, got {n}"
        )));
    }
    Ok(())
}

fn same_size(a: &Operator, b: &Operator) -> Result<()> {
    if a.n_spins != b.n_spins {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: {} vs {} spins",
            a.n_spins, b.n_spins
        )));
    }
    Ok(())
}

impl Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.n_spins, rhs.n_spins, "spin count mismatch");
        Operator {
            n_spins: self.n_spins,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        assert_eq!(self.n_spins, rhs.n_spins, "spin count mismatch");
        self.matrix += &rhs.matrix;
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.n_spins, rhs.n_spins, "spin count mismatch");
        Operator {
            n_spins: self.n_spins,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        &self - &rhs
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            n_spins: self.n_spins,
            matrix: -self.matrix,
        }
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.n_spins, rhs.n_spins, "spin count mismatch");
        Operator {
            n_spins: self.n_spins,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scaled(rhs)
    }
}

impl Mul<C64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scaled(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scaled(C64::new(rhs, 0.0))
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scaled(C64::new(rhs, 0.0))
    }
}

fn kron_chain(factors: impl IntoIterator<Item = DMatrix<C64>>) -> DMatrix<C64> {
    factors
        .into_iter()
        .fold(DMatrix::identity(1, 1), |acc, f| acc.kronecker(&f))
}

/// Cartesian product operator `2^(q-1) ⊗_s I_{a_s}` on `n` spins.
pub fn pauli_product(label: &CartesianLabel, n: usize) -> Result<Operator> {
    check_spins(n)?;
    if label.max_spin() > n {
        return Err(Error::InvalidArgument(format!(
            "label {label} addresses spin {} but the system has {n}",
            label.max_spin()
        )));
    }
    let m = kron_chain((1..=n).map(|k| label.axis_of(k).matrix()));
    Ok(Operator {
        n_spins: n,
        matrix: m * C64::new(label.prefactor(), 0.0),
    })
}

/// Single-spin operator `I_{kη}` (no prefactor) on `n` spins.
pub fn single_spin(n: usize, k: usize, axis: Axis) -> Result<Operator> {
    pauli_product(&CartesianLabel::single(k, axis)?, n)
}

/// Total spin operator `F_η = Σ_k I_{kη}`.
pub fn total_spin(n: usize, axis: Axis) -> Operator {
    let mut f = Operator::zeros(n);
    for k in 1..=n {
        f += &single_spin(n, k, axis).expect("spin index within range");
    }
    f
}

/// `F_+ = F_x + i F_y`.
pub fn raising(n: usize) -> Operator {
    &total_spin(n, Axis::X) + &total_spin(n, Axis::Y).scaled(I)
}

/// `F_- = F_x - i F_y`.
pub fn lowering(n: usize) -> Operator {
    &total_spin(n, Axis::X) - &total_spin(n, Axis::Y).scaled(I)
}

/// Hilbert–Schmidt scalar product `tr(lhs† rhs)`.
pub fn hs_inner(lhs: &Operator, rhs: &Operator) -> Result<C64> {
    same_size(lhs, rhs)?;
    Ok(lhs
        .matrix
        .iter()
        .zip(rhs.matrix.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Expectation value `tr(ρ B)`.
pub fn expectation(rho: &Operator, obs: &Operator) -> Result<C64> {
    same_size(rho, obs)?;
    // tr(ρB) = Σ_ij ρ_ij B_ji
    let d = rho.dim();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += rho.matrix[(i, j)] * obs.matrix[(j, i)];
        }
    }
    Ok(acc)
}

/// `exp(-i θ (n_x I_x + n_y I_y + n_z I_z))` for a unit axis `n`, closed form.
pub fn spin_half_rotation(theta: f64, axis: [f64; 3]) -> DMatrix<C64> {
    let (s, c) = (theta / 2.0).sin_cos();
    let [nx, ny, nz] = axis;
    // cos(θ/2) 1 - i sin(θ/2) n·σ
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, -s * nz),
            C64::new(-s * ny, -s * nx),
            C64::new(s * ny, -s * nx),
            C64::new(c, s * nz),
        ],
    )
}

/// Tensor product of single-spin unitaries: `factor(k)` on spin `k`.
pub fn local_unitary(n: usize, mut factor: impl FnMut(usize) -> DMatrix<C64>) -> Result<Operator> {
    check_spins(n)?;
    Ok(Operator {
        n_spins: n,
        matrix: kron_chain((1..=n).map(&mut factor)),
    })
}

/// Non-selective rotation `e^{-iαF_z} e^{-iβF_y}`.
pub fn global_rotation(n: usize, alpha: f64, beta: f64) -> Operator {
    let per_spin =
        spin_half_rotation(alpha, [0.0, 0.0, 1.0]) * spin_half_rotation(beta, [0.0, 1.0, 0.0]);
    local_unitary(n, |_| per_spin.clone()).expect("valid spin count")
}

/// Unitary conjugation `u a u†`.
pub fn conjugate(u: &Operator, a: &Operator) -> Result<Operator> {
    same_size(u, a)?;
    if !u.is_unitary(UNITARY_TOL) {
        return Err(Error::InvalidArgument(
            "conjugation requires a unitary operator".into(),
        ));
    }
    Ok(Operator {
        n_spins: a.n_spins,
        matrix: &u.matrix * &a.matrix * u.matrix.adjoint(),
    })
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    same_size(a, b)?;
    Ok(Operator {
        n_spins: a.n_spins,
        matrix: &a.matrix * &b.matrix - &b.matrix * &a.matrix,
    })
}

/// `exp(a)`. Diagonal inputs are exponentiated entrywise; everything else goes
/// through scaling-and-squaring with a degree-13 Padé approximant.
pub fn matrix_exponential(a: &Operator) -> Operator {
    let d = a.dim();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || a.matrix[(i, j)] == ZERO));
    let matrix = if diagonal {
        DMatrix::from_fn(
            d,
            d,
            |i, j| if i == j { a.matrix[(i, i)].exp() } else { ZERO },
        )
    } else {
        a.matrix.exp()
    };
    Operator {
        n_spins: a.n_spins,
        matrix,
    }
}

/// Diagonal of `F_z` in the computational basis: `(n - 2·popcount(i)) / 2`.
pub fn fz_diagonal(n: usize) -> Vec<f64> {
    (0..1usize << n)
        .map(|i| {
            let down = i.count_ones() as f64;
            (n as f64 - 2.0 * down) / 2.0
        })
        .collect()
}

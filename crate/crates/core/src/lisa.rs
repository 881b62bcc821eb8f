//! LISA spherical tensor operator basis for up to three spins 1/2.
//!
//! Axial components `T_{j0}` come from the transcribed table; the remaining
//! orders are generated with the ladder relation
//! `[F_±, T_{jm}] = √(j(j+1) - m(m±1)) T_{j,m±1}` (Condon–Shortley phase).
//! Every component is normalized in the full `n`-spin space, so a label that
//! acts on `q < n` spins carries an extra factor `2^{-(n-q)/2}`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::droplet::{DropletFunction, SphericalExpansion};
use crate::error::{Error, Result};
use crate::spin::{commutator, hs_inner, lowering, raising, Axis, Operator, C64};
use crate::tables::{axial_rows, LabelFamily};

/// Largest spin count with a complete label set.
pub const MAX_LISA_SPINS: usize = 3;

/// Droplet label `ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DropletLabel {
    Empty,
    Single(u8),
    /// Bilinear label `{kl}`, always stored with `k < l`.
    Pair(u8, u8),
    /// Trilinear permutation-symmetry label `τ_p` on spins {1,2,3}.
    Tau(u8),
}

impl DropletLabel {
    pub fn single(k: usize) -> Result<Self> {
        if !(1..=MAX_LISA_SPINS).contains(&k) {
            return Err(Error::InvalidArgument(format!("spin {k} out of range")));
        }
        Ok(Self::Single(k as u8))
    }

    pub fn pair(k: usize, l: usize) -> Result<Self> {
        let (a, b) = if k < l { (k, l) } else { (l, k) };
        if a == b || a == 0 || b > MAX_LISA_SPINS {
            return Err(Error::InvalidArgument(format!(
                "invalid spin pair ({k}, {l})"
            )));
        }
        Ok(Self::Pair(a as u8, b as u8))
    }

    pub fn tau(p: usize) -> Result<Self> {
        if !(1..=4).contains(&p) {
            return Err(Error::InvalidArgument(format!("no symmetry type tau{p}")));
        }
        Ok(Self::Tau(p as u8))
    }

    /// Admissible ranks `J(ℓ)`.
    pub fn ranks(&self) -> &'static [u32] {
        match self {
            Self::Empty => &[0],
            Self::Single(_) => &[1],
            Self::Pair(..) => &[0, 1, 2],
            Self::Tau(1) => &[1, 3],
            Self::Tau(2) | Self::Tau(3) => &[1, 2],
            Self::Tau(_) => &[0],
        }
    }

    /// Involved spins, 1-based and increasing.
    pub fn spins(&self) -> Vec<usize> {
        match *self {
            Self::Empty => vec![],
            Self::Single(k) => vec![k as usize],
            Self::Pair(k, l) => vec![k as usize, l as usize],
            Self::Tau(_) => vec![1, 2, 3],
        }
    }

    pub fn max_spin(&self) -> usize {
        self.spins().last().copied().unwrap_or(0)
    }

    fn family(&self) -> Option<LabelFamily> {
        match self {
            Self::Empty => None,
            Self::Single(_) => Some(LabelFamily::Single),
            Self::Pair(..) => Some(LabelFamily::Pair),
            Self::Tau(p) => Some(LabelFamily::Tau(*p)),
        }
    }

    pub fn has_rank(&self, j: u32) -> bool {
        self.ranks().contains(&j)
    }
}

impl fmt::Display for DropletLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "empty"),
            Self::Single(k) => write!(f, "{k}"),
            Self::Pair(k, l) => write!(f, "{k}{l}"),
            Self::Tau(p) => write!(f, "tau{p}"),
        }
    }
}

impl FromStr for DropletLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "empty" {
            return Ok(Self::Empty);
        }
        if let Some(p) = s.strip_prefix("tau") {
            let p: usize = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad droplet label '{s}'")))?;
            return Self::tau(p);
        }
        let digits: Vec<usize> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse(format!("bad droplet label '{s}'")))?;
        match digits.as_slice() {
            [k] => Self::single(*k),
            [k, l] => Self::pair(*k, *l),
            _ => Err(Error::Parse(format!("bad droplet label '{s}'"))),
        }
    }
}

/// All labels of an `n`-spin system, in canonical order.
pub fn labels_for(n: usize) -> Result<Vec<DropletLabel>> {
    check_supported(n)?;
    let mut labels = vec![DropletLabel::Empty];
    labels.extend((1..=n).map(|k| DropletLabel::Single(k as u8)));
    for k in 1..=n {
        for l in k + 1..=n {
            labels.push(DropletLabel::Pair(k as u8, l as u8));
        }
    }
    if n == 3 {
        labels.extend((1..=4).map(DropletLabel::Tau));
    }
    Ok(labels)
}

fn check_supported(n: usize) -> Result<()> {
    if n == 0 || n > MAX_LISA_SPINS {
        return Err(Error::Unsupported(format!(
            "LISA labels are defined here for 1 to {MAX_LISA_SPINS} spins, got {n}"
        )));
    }
    Ok(())
}

fn check_label(label: DropletLabel, n: usize) -> Result<()> {
    check_supported(n)?;
    let fits = match label {
        DropletLabel::Tau(_) => n == 3,
        other => other.max_spin() <= n,
    };
    if !fits {
        return Err(Error::InvalidArgument(format!(
            "droplet {label} does not exist in a {n}-spin system"
        )));
    }
    Ok(())
}

/// Product of single-spin operators `∏ I_{k a_k}` (no prefactor) on `n` spins.
pub(crate) fn monomial(n: usize, spins: &[usize], axes: &str) -> Result<Operator> {
    let axes: Vec<Axis> = axes.chars().map(Axis::from_char).collect::<Result<_>>()?;
    if axes.len() != spins.len() {
        return Err(Error::InvalidArgument(format!(
            "monomial with {} factors applied to {} spins",
            axes.len(),
            spins.len()
        )));
    }
    let factors = (1..=n).map(|k| {
        spins
            .iter()
            .position(|&s| s == k)
            .map(|i| axes[i])
            .unwrap_or(Axis::Identity)
            .matrix()
    });
    let m = factors.fold(DMatrix::<C64>::identity(1, 1), |acc, f| acc.kronecker(&f));
    Operator::new(n, m)
}

/// Normalization that carries a `q`-spin unit operator into `n` spins.
pub(crate) fn embedding_factor(n: usize, q: usize) -> f64 {
    2f64.powf(-((n - q) as f64) / 2.0)
}

/// One basis element `T_{jm}^{(ℓ)}`.
#[derive(Clone, Debug)]
pub struct TensorComponent {
    pub label: DropletLabel,
    pub j: u32,
    pub m: i32,
    pub op: Operator,
}

/// `T_{j0}^{(ℓ)}` embedded in an `n`-spin space.
pub fn axial_tensor(label: DropletLabel, j: u32, n: usize) -> Result<TensorComponent> {
    check_label(label, n)?;
    if !label.has_rank(j) {
        return Err(Error::InvalidRank { label, j });
    }
    let op = match label.family() {
        None => Operator::identity(n) * embedding_factor(n, 0),
        Some(family) => {
            let row = axial_rows()
                .into_iter()
                .find(|r| r.family == family && r.j == j)
                .ok_or(Error::InvalidRank { label, j })?;
            let spins = label.spins();
            let mut op = Operator::zeros(n);
            for (coef, axes) in row.terms {
                op += &(monomial(n, &spins, axes)? * (row.scale * coef));
            }
            op * embedding_factor(n, spins.len())
        }
    };
    Ok(TensorComponent { label, j, m: 0, op })
}

/// All orders `m = -j..=j` generated from an axial component.
pub fn ladder_generate(axial: &TensorComponent) -> Result<Vec<TensorComponent>> {
    if axial.m != 0 {
        return Err(Error::InvalidArgument(format!(
            "ladder generation starts from m = 0, got m = {}",
            axial.m
        )));
    }
    let n = axial.op.n_spins();
    let j = axial.j as i32;
    let jj = (j * (j + 1)) as f64;
    let step = |from: &Operator, ladder: &Operator, m: i32, up: bool| -> Result<Operator> {
        let norm_sq = jj - (m * if up { m + 1 } else { m - 1 }) as f64;
        if norm_sq <= 0.0 {
            return Err(Error::Contract(format!(
                "ladder normalization vanished at j = {j}, m = {m}"
            )));
        }
        Ok(commutator(ladder, from)? * (1.0 / norm_sq.sqrt()))
    };

    let (fp, fm) = (raising(n), lowering(n));
    let mut up = vec![axial.op.clone()];
    for m in 0..j {
        let next = step(up.last().unwrap(), &fp, m, true)?;
        up.push(next);
    }
    let mut down = Vec::new();
    let mut current = axial.op.clone();
    for m in (-j + 1..=0).rev() {
        current = step(&current, &fm, m, false)?;
        down.push(current.clone());
    }
    down.reverse();

    let ops = down.into_iter().chain(up);
    Ok(ops
        .enumerate()
        .map(|(i, op)| TensorComponent {
            label: axial.label,
            j: axial.j,
            m: i as i32 - j,
            op,
        })
        .collect())
}

/// Complete orthonormal LISA basis of an `n`-spin system.
#[derive(Debug)]
pub struct Basis {
    n: usize,
    components: Vec<TensorComponent>,
    index: HashMap<(DropletLabel, u32, i32), usize>,
}

impl Basis {
    fn build(n: usize) -> Result<Self> {
        let mut components = Vec::with_capacity(1 << (2 * n));
        for label in labels_for(n)? {
            for &j in label.ranks() {
                components.extend(ladder_generate(&axial_tensor(label, j, n)?)?);
            }
        }
        let index = components
            .iter()
            .enumerate()
            .map(|(i, c)| ((c.label, c.j, c.m), i))
            .collect();
        Ok(Self {
            n,
            components,
            index,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[TensorComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn get(&self, label: DropletLabel, j: u32, m: i32) -> Option<&TensorComponent> {
        self.index.get(&(label, j, m)).map(|&i| &self.components[i])
    }

    /// The axial component `T_{j0}^{(ℓ)}`.
    pub fn axial(&self, label: DropletLabel, j: u32) -> Result<&TensorComponent> {
        check_label(label, self.n)?;
        self.get(label, j, 0).ok_or(Error::InvalidRank { label, j })
    }

    /// Largest `|⟨T_a|T_b⟩ - δ_ab|` over all pairs.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, ta) in self.components.iter().enumerate() {
            for (b, tb) in self.components.iter().enumerate().skip(a) {
                let ip = hs_inner(&ta.op, &tb.op).expect("same dimension");
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        worst
    }
}

static BASES: [OnceLock<Basis>; MAX_LISA_SPINS] =
    [OnceLock::new(), OnceLock::new(), OnceLock::new()];

/// Cached basis for `n ∈ {1, 2, 3}`, ordered by label, rank, then order.
pub fn full_basis(n: usize) -> Result<&'static Basis> {
    check_supported(n)?;
    let cell = &BASES[n - 1];
    if let Some(b) = cell.get() {
        return Ok(b);
    }
    let built = Basis::build(n)?;
    Ok(cell.get_or_init(|| built))
}

/// Droplet coefficients `c_{jm}^{(ℓ)} = ⟨T_{jm}^{(ℓ)}|A⟩`.
pub fn decompose(a: &Operator) -> Result<DropletFunction> {
    let basis = full_basis(a.n_spins())?;
    let mut d = DropletFunction::new(basis.n);
    for t in basis.components() {
        let c = hs_inner(&t.op, a)?;
        d.expansion_mut(t.label).set(t.j, t.m, c);
    }
    Ok(d)
}

/// `Σ c_{jm}^{(ℓ)} T_{jm}^{(ℓ)}`, the inverse of [`decompose`].
pub fn reconstruct(d: &DropletFunction) -> Result<Operator> {
    let basis = full_basis(d.n_spins())?;
    let mut a = Operator::zeros(basis.n);
    for (label, exp) in d.iter() {
        for ((j, m), c) in exp.iter() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let t = basis.get(*label, j, m).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "no basis element ({label}, j={j}, m={m}) for {} spins",
                    basis.n
                ))
            })?;
            a += &(&t.op * c);
        }
    }
    Ok(a)
}

/// Rank-`j` part `A_j^{(ℓ)}` of an operator.
pub fn rank_component(a: &Operator, label: DropletLabel, j: u32) -> Result<Operator> {
    let d = decompose(a)?;
    let mut only = DropletFunction::new(d.n_spins());
    if let Some(exp) = d.get(label) {
        *only.expansion_mut(label) = exp.rank_part(j);
    }
    reconstruct(&only)
}

/// Relabel spins: the factor on spin `k` moves to spin `perm[k-1]`.
pub fn spin_permutation(a: &Operator, perm: &[usize]) -> Result<Operator> {
    let n = a.n_spins();
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&p| p == 0 || p > n || std::mem::replace(&mut seen[p - 1], true))
    {
        return Err(Error::InvalidArgument(format!(
            "{perm:?} is not a permutation of 1..={n}"
        )));
    }
    let d = 1usize << n;
    let bit = |k: usize| n - k;
    let mut p = DMatrix::<C64>::zeros(d, d);
    for old in 0..d {
        let mut new = 0usize;
        for k in 1..=n {
            if old >> bit(k) & 1 == 1 {
                new |= 1 << bit(perm[k - 1]);
            }
        }
        p[(new, old)] = C64::new(1.0, 0.0);
    }
    Operator::new(n, &p * a.matrix() * p.transpose())
}

/// Convenience wrapper around [`SphericalExpansion`] lookups for one label.
pub fn droplet_of(d: &DropletFunction, label: DropletLabel) -> SphericalExpansion {
    d.get(label).cloned().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{pauli_product, single_spin, total_spin, CartesianLabel};

    fn cart(s: &str) -> Operator {
        pauli_product(&CartesianLabel::parse_dense(s).unwrap(), s.len()).unwrap()
    }

    #[test]
    fn ranks_match_label_table() {
        use DropletLabel::*;
        assert_eq!(Empty.ranks(), &[0]);
        assert_eq!(Single(2).ranks(), &[1]);
        assert_eq!(Pair(1, 3).ranks(), &[0, 1, 2]);
        assert_eq!(Tau(1).ranks(), &[1, 3]);
        assert_eq!(Tau(2).ranks(), &[1, 2]);
        assert_eq!(Tau(3).ranks(), &[1, 2]);
        assert_eq!(Tau(4).ranks(), &[0]);
    }

    #[test]
    fn label_strings_round_trip() {
        for n in 1..=3 {
            for l in labels_for(n).unwrap() {
                assert_eq!(l.to_string().parse::<DropletLabel>().unwrap(), l);
            }
        }
        assert_eq!(
            "21".parse::<DropletLabel>().unwrap(),
            DropletLabel::Pair(1, 2)
        );
        assert!("tau5".parse::<DropletLabel>().is_err());
        assert!("11".parse::<DropletLabel>().is_err());
        assert!("x".parse::<DropletLabel>().is_err());
    }

    #[test]
    fn axial_examples() {
        let t = axial_tensor(DropletLabel::Single(1), 1, 1).unwrap();
        let expected = single_spin(1, 1, Axis::Z).unwrap() * 2f64.sqrt();
        assert!(t.op.max_abs_diff(&expected) < 1e-15);

        let t = axial_tensor(DropletLabel::Pair(1, 2), 0, 2).unwrap();
        let expected = (cart("xx") + cart("yy") + cart("zz")) * (1.0 / 3f64.sqrt());
        assert!(t.op.max_abs_diff(&expected) < 1e-15);

        let t = axial_tensor(DropletLabel::Tau(4), 0, 3).unwrap();
        let expected = (cart("xyz") - cart("xzy") - cart("yxz") + cart("yzx") + cart("zxy")
            - cart("zyx"))
            * (0.5 / 3f64.sqrt());
        assert!(t.op.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn axial_rejects_bad_rank_and_label() {
        assert!(matches!(
            axial_tensor(DropletLabel::Single(1), 0, 1),
            Err(Error::InvalidRank { .. })
        ));
        assert!(matches!(
            axial_tensor(DropletLabel::Tau(1), 2, 3),
            Err(Error::InvalidRank { .. })
        ));
        assert!(axial_tensor(DropletLabel::Pair(1, 3), 0, 2).is_err());
        assert!(axial_tensor(DropletLabel::Tau(1), 1, 2).is_err());
    }

    #[test]
    fn single_spin_ladder_reproduces_condon_shortley_matrices() {
        let comps = ladder_generate(&axial_tensor(DropletLabel::Single(1), 1, 1).unwrap()).unwrap();
        assert_eq!(
            comps.iter().map(|c| c.m).collect::<Vec<_>>(),
            vec![-1, 0, 1]
        );
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let t_minus = DMatrix::from_row_slice(2, 2, &[z, z, one, z]);
        let t_plus = DMatrix::from_row_slice(2, 2, &[z, -one, z, z]);
        assert!((comps[0].op.matrix() - t_minus).norm() < 1e-15);
        assert!((comps[2].op.matrix() - t_plus).norm() < 1e-15);
    }

    #[test]
    fn ladder_edge_cases() {
        let t = axial_tensor(DropletLabel::Tau(4), 0, 3).unwrap();
        assert_eq!(ladder_generate(&t).unwrap().len(), 1);

        let quad = ladder_generate(&axial_tensor(DropletLabel::Pair(1, 2), 2, 2).unwrap()).unwrap();
        assert_eq!(quad.len(), 5);
        for a in &quad {
            for b in &quad {
                let ip = hs_inner(&a.op, &b.op).unwrap();
                let target = if a.m == b.m { 1.0 } else { 0.0 };
                assert!((ip - target).norm() < 1e-12);
            }
        }

        let mut shifted = quad[1].clone();
        shifted.m = 1;
        assert!(ladder_generate(&shifted).is_err());
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(full_basis(1).unwrap().len(), 4);
        assert_eq!(full_basis(2).unwrap().len(), 16);
        assert_eq!(full_basis(3).unwrap().len(), 64);
        assert!(matches!(full_basis(4), Err(Error::Unsupported(_))));
        assert!(matches!(full_basis(0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn decompose_examples() {
        let iz = single_spin(1, 1, Axis::Z).unwrap();
        let d = decompose(&iz).unwrap();
        for (label, exp) in d.iter() {
            for ((j, m), c) in exp.iter() {
                let expected = if *label == DropletLabel::Single(1) && j == 1 && m == 0 {
                    std::f64::consts::FRAC_1_SQRT_2
                } else {
                    0.0
                };
                assert!((c - expected).norm() < 1e-15, "{label} {j} {m}");
            }
        }

        let zero = decompose(&Operator::zeros(2)).unwrap();
        assert!(zero
            .iter()
            .all(|(_, e)| e.iter().all(|(_, c)| c.norm() == 0.0)));
        assert!(reconstruct(&zero).unwrap().norm() == 0.0);
    }

    #[test]
    fn reconstruct_from_single_coefficient() {
        let mut d = DropletFunction::new(1);
        d.expansion_mut(DropletLabel::Single(1)).set(
            1,
            0,
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        );
        let a = reconstruct(&d).unwrap();
        assert!(a.max_abs_diff(&single_spin(1, 1, Axis::Z).unwrap()) < 1e-15);

        let mut bad = DropletFunction::new(1);
        bad.expansion_mut(DropletLabel::Single(1))
            .set(2, 0, C64::new(1.0, 0.0));
        assert!(reconstruct(&bad).is_err());
    }

    #[test]
    fn mixed_operator_splits_into_expected_droplets() {
        let n = 3;
        let c = |s: &str| pauli_product(&CartesianLabel::parse_dense(s).unwrap(), n).unwrap();
        // I_1z + I_2x + I_3y + 2I_1xI_2z + I_2xI_3x + I_2xI_3y + I_2xI_3z + 2I_1xI_3x + 4I_1xI_2xI_3x
        let a = c("z00")
            + c("0x0")
            + c("00y")
            + c("xz0")
            + c("0xx") * 0.5
            + c("0xy") * 0.5
            + c("0xz") * 0.5
            + c("x0x")
            + c("xxx");
        let d = decompose(&a).unwrap();
        let weight = |l: DropletLabel| d.get(l).map(|e| e.norm_sqr()).unwrap_or(0.0);
        assert!(weight(DropletLabel::Empty) < 1e-24);
        for l in ["1", "2", "3", "12", "13", "23", "tau1"] {
            assert!(weight(l.parse().unwrap()) > 1e-3, "{l}");
        }
        // 4I_xxx is invariant under every spin permutation, so the mixed and
        // antisymmetric trilinear droplets carry nothing.
        for l in ["tau2", "tau3", "tau4"] {
            assert!(weight(l.parse().unwrap()) < 1e-24, "{l}");
        }
    }

    #[test]
    fn permutation_examples() {
        let a = cart("xz");
        assert!(spin_permutation(&a, &[1, 2]).unwrap().max_abs_diff(&a) < 1e-15);
        let swapped = spin_permutation(&a, &[2, 1]).unwrap();
        assert!(swapped.max_abs_diff(&cart("zx")) < 1e-15);

        let t4 = axial_tensor(DropletLabel::Tau(4), 0, 3).unwrap().op;
        let p12 = spin_permutation(&t4, &[2, 1, 3]).unwrap();
        assert!(p12.max_abs_diff(&(t4 * -1.0)) < 1e-15);

        assert!(spin_permutation(&a, &[1, 1]).is_err());
        assert!(spin_permutation(&a, &[1, 3]).is_err());
    }

    #[test]
    fn embedded_components_are_normalized() {
        let b = full_basis(3).unwrap();
        let t = b.axial(DropletLabel::Single(2), 1).unwrap();
        let expected = single_spin(3, 2, Axis::Z).unwrap() * (2f64.sqrt() / 2.0);
        assert!(t.op.max_abs_diff(&expected) < 1e-15);
        assert!((t.op.norm_sqr() - 1.0).abs() < 1e-14);
        let _ = total_spin(3, Axis::Z);
    }
}

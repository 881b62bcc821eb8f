//! Named operators: Cartesian product operators, multiple-quantum coherences
//! and raising-operator products written as combinations of Hermitian parts.

use crate::error::{Error, Result};
use crate::spin::{pauli_product, Axis, CartesianLabel, Operator, C64};

/// An operator given as `Σ_i c_i C_i` over Cartesian product operators.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedState {
    pub name: String,
    pub n: usize,
    pub parts: Vec<(C64, CartesianLabel)>,
}

impl NamedState {
    pub fn operator(&self) -> Result<Operator> {
        let mut a = Operator::zeros(self.n);
        for (c, label) in &self.parts {
            a += &(pauli_product(label, self.n)? * *c);
        }
        Ok(a)
    }

    /// Hermitian parts with their complex weights.
    pub fn hermitian_parts(&self) -> Result<Vec<(C64, Operator)>> {
        self.parts
            .iter()
            .map(|(c, label)| Ok((*c, pauli_product(label, self.n)?)))
            .collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.parts.iter().all(|(c, _)| c.im == 0.0)
    }
}

/// `∏_{k=1}^{p} I_k^+` expanded into Cartesian products; `keep` filters by
/// whether a term carries an imaginary weight.
fn raising_product_terms(
    p: usize,
    keep: impl Fn(bool) -> bool,
) -> Result<Vec<(C64, CartesianLabel)>> {
    let mut terms = Vec::new();
    for mask in 0..1usize << p {
        let axes: Vec<(usize, Axis)> = (1..=p)
            .map(|k| {
                (
                    k,
                    if mask >> (p - k) & 1 == 1 {
                        Axis::Y
                    } else {
                        Axis::X
                    },
                )
            })
            .collect();
        let n_y = mask.count_ones();
        let weight = C64::new(0.0, 1.0).powu(n_y);
        if !keep(n_y % 2 == 1) {
            continue;
        }
        let label = CartesianLabel::new(axes)?;
        terms.push((weight / label.prefactor(), label));
    }
    Ok(terms)
}

fn real_part_of(terms: Vec<(C64, CartesianLabel)>) -> Vec<(C64, CartesianLabel)> {
    terms
        .into_iter()
        .map(|(c, l)| (C64::new(c.re, 0.0), l))
        .collect()
}

fn imag_part_of(terms: Vec<(C64, CartesianLabel)>) -> Vec<(C64, CartesianLabel)> {
    terms
        .into_iter()
        .map(|(c, l)| (C64::new(c.im, 0.0), l))
        .collect()
}

/// `I_1^+ ⋯ I_p^+` on `p` spins.
pub fn raising_product(p: usize) -> Result<NamedState> {
    Ok(NamedState {
        name: "I+".repeat(p),
        n: p,
        parts: raising_product_terms(p, |_| true)?,
    })
}

/// `DQ_x = I_1xI_2x - I_1yI_2y`.
pub fn dq_x() -> Result<NamedState> {
    let parts = real_part_of(raising_product_terms(2, |imag| !imag)?);
    Ok(NamedState {
        name: "DQx".into(),
        n: 2,
        parts,
    })
}

/// `DQ_y = I_1xI_2y + I_1yI_2x`.
pub fn dq_y() -> Result<NamedState> {
    let parts = imag_part_of(raising_product_terms(2, |imag| imag)?);
    Ok(NamedState {
        name: "DQy".into(),
        n: 2,
        parts,
    })
}

/// `TQ_x = I_xxx - I_xyy - I_yxy - I_yyx`.
pub fn tq_x() -> Result<NamedState> {
    let parts = real_part_of(raising_product_terms(3, |imag| !imag)?);
    Ok(NamedState {
        name: "TQx".into(),
        n: 3,
        parts,
    })
}

/// `TQ_y = I_yxx + I_xyx + I_xxy - I_yyy`.
pub fn tq_y() -> Result<NamedState> {
    let parts = imag_part_of(raising_product_terms(3, |imag| imag)?);
    Ok(NamedState {
        name: "TQy".into(),
        n: 3,
        parts,
    })
}

/// The eighteen Cartesian product operators with preparation sequences,
/// in dense notation.
pub const PREPARED_OPERATORS: [&str; 18] = [
    "x", "y", "z", "xx", "yy", "zz", "xy", "yx", "zx", "xxx", "yyy", "xyz", "xyy", "yxy", "yyx",
    "xxy", "xyx", "yxx",
];

/// A normalized Cartesian product operator such as `"zx"` (`2I_1zI_2x`).
pub fn cartesian(dense: &str) -> Result<NamedState> {
    let label = CartesianLabel::parse_dense(dense)?;
    Ok(NamedState {
        name: dense.to_string(),
        n: dense.len(),
        parts: vec![(C64::new(1.0, 0.0), label)],
    })
}

/// Looks up `DQx`, `DQy`, `TQx`, `TQy`, `I+`, `I+I+`, `I+I+I+` or a dense
/// Cartesian string like `xyz` or `x0z`.
pub fn named_state(name: &str) -> Result<NamedState> {
    match name {
        "DQx" => dq_x(),
        "DQy" => dq_y(),
        "TQx" => tq_x(),
        "TQy" => tq_y(),
        "I+" => raising_product(1),
        "I+I+" => raising_product(2),
        "I+I+I+" => raising_product(3),
        s if !s.is_empty() && s.chars().all(|c| "0xyz".contains(c)) => cartesian(s),
        _ => Err(Error::InvalidArgument(format!("unknown state '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{raising, single_spin};

    fn prod(axes: &str) -> Operator {
        // plain product of single-spin operators, no prefactor
        let n = axes.len();
        axes.chars()
            .enumerate()
            .fold(Operator::identity(n), |acc, (i, c)| {
                &acc * &single_spin(n, i + 1, Axis::from_char(c).unwrap()).unwrap()
            })
    }

    #[test]
    fn dq_x_lives_in_the_corners() {
        let m = dq_x().unwrap().operator().unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let corner = (r, c) == (0, 3) || (r, c) == (3, 0);
                assert_eq!(m.matrix()[(r, c)].norm() > 1e-15, corner, "({r},{c})");
            }
        }
        let expected = prod("xx") - prod("yy");
        assert!(m.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn multiple_quantum_definitions() {
        let dqy = prod("xy") + prod("yx");
        assert!(dq_y().unwrap().operator().unwrap().max_abs_diff(&dqy) < 1e-15);
        let tqx = prod("xxx") - prod("xyy") - prod("yxy") - prod("yyx");
        assert!(tq_x().unwrap().operator().unwrap().max_abs_diff(&tqx) < 1e-15);
        let tqy = prod("yxx") + prod("xyx") + prod("xxy") - prod("yyy");
        assert!(tq_y().unwrap().operator().unwrap().max_abs_diff(&tqy) < 1e-15);
        assert!(tq_y().unwrap().is_hermitian());
    }

    #[test]
    fn raising_products() {
        let ip = raising_product(1).unwrap().operator().unwrap();
        assert!(ip.max_abs_diff(&raising(1)) < 1e-15);
        let i = C64::new(0.0, 1.0);
        let dq = dq_x().unwrap().operator().unwrap() + dq_y().unwrap().operator().unwrap() * i;
        assert!(
            raising_product(2)
                .unwrap()
                .operator()
                .unwrap()
                .max_abs_diff(&dq)
                < 1e-15
        );
        let tq = tq_x().unwrap().operator().unwrap() + tq_y().unwrap().operator().unwrap() * i;
        assert!(
            raising_product(3)
                .unwrap()
                .operator()
                .unwrap()
                .max_abs_diff(&tq)
                < 1e-15
        );
        assert!(!raising_product(2).unwrap().is_hermitian());
    }

    #[test]
    fn lookup() {
        assert_eq!(named_state("zx").unwrap().n, 2);
        assert_eq!(named_state("x0z").unwrap().n, 3);
        assert_eq!(named_state("I+I+I+").unwrap().parts.len(), 8);
        assert!(named_state("foo").is_err());
        assert!(named_state("").is_err());
        for s in PREPARED_OPERATORS {
            assert!(named_state(s).unwrap().is_hermitian());
        }
    }
}

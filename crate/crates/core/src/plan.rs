//! Measurement plan: each axial tensor written as a sum of Cartesian product
//! operators, each of which is rotated onto a directly detectable one.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::lisa::{embedding_factor, full_basis, labels_for, DropletLabel, MAX_LISA_SPINS};
use crate::nmr::{detection_rotation, PulseSequence};
use crate::spin::{pauli_product, Axis, CartesianLabel, Operator};
use crate::tables::{axial_rows, detection_rows, LabelFamily};

/// Tolerance for the decomposition of an axial tensor into Cartesian terms.
pub const DECOMPOSITION_TOL: f64 = 1e-12;
/// Tolerance for a detection rotation mapping `C` onto `M`.
pub const ROTATION_TOL: f64 = 1e-10;

/// One term `r · C` of an axial tensor and how `C` is detected.
#[derive(Clone, Debug)]
pub struct PlanEntry {
    pub index: usize,
    /// Weight `r` of the normalized Cartesian operator in the axial tensor.
    pub coefficient: f64,
    pub cartesian: CartesianLabel,
    pub measurable: CartesianLabel,
    pub rotation: PulseSequence,
    /// Heisenberg-picture detector `U† M U`.
    pub detector: Operator,
}

#[derive(Clone, Debug)]
pub struct MeasurementPlan {
    n: usize,
    entries: BTreeMap<(DropletLabel, u32), Vec<PlanEntry>>,
}

fn family_of(label: DropletLabel) -> Option<LabelFamily> {
    match label {
        DropletLabel::Empty => None,
        DropletLabel::Single(_) => Some(LabelFamily::Single),
        DropletLabel::Pair(..) => Some(LabelFamily::Pair),
        DropletLabel::Tau(p) => Some(LabelFamily::Tau(p)),
    }
}

/// Places the axis characters of `axes` on the spins of `label`.
fn place(label: DropletLabel, axes: &str) -> Result<CartesianLabel> {
    let spins = label.spins();
    let axes: Vec<Axis> = axes.chars().map(Axis::from_char).collect::<Result<_>>()?;
    CartesianLabel::new(spins.into_iter().zip(axes))
}

impl MeasurementPlan {
    /// Builds and validates the plan for all labels of an `n`-spin system.
    pub fn for_system(n: usize) -> Result<Self> {
        let identity = Operator::identity(n);
        let mut entries = BTreeMap::new();
        for label in labels_for(n)? {
            let Some(family) = family_of(label) else {
                entries.insert(
                    (label, 0),
                    vec![PlanEntry {
                        index: 1,
                        coefficient: embedding_factor(n, 0),
                        cartesian: CartesianLabel::identity(),
                        measurable: CartesianLabel::identity(),
                        rotation: PulseSequence::new(),
                        detector: identity.clone(),
                    }],
                );
                continue;
            };
            let q = label.spins().len();
            for &j in label.ranks() {
                let row = axial_rows()
                    .into_iter()
                    .find(|r| r.family == family && r.j == j)
                    .ok_or(Error::PlanIncomplete { label, j })?;
                let mut list = Vec::new();
                for det in detection_rows()
                    .iter()
                    .filter(|d| d.family == family && d.j == j)
                {
                    let raw = row
                        .terms
                        .iter()
                        .find(|(_, axes)| *axes == det.cartesian)
                        .map(|(c, _)| *c)
                        .unwrap_or(0.0);
                    if raw == 0.0 {
                        continue;
                    }
                    let cartesian = place(label, det.cartesian)?;
                    let measurable = place(label, det.measurable)?;
                    let rotation = detection_rotation(&cartesian, &measurable)?;
                    let u = rotation.pulse_unitary(n, 1.0)?;
                    let m = pauli_product(&measurable, n)?;
                    let detector = &(&u.adjoint() * &m) * &u;
                    list.push(PlanEntry {
                        index: det.index,
                        coefficient: row.scale * raw / cartesian.prefactor()
                            * embedding_factor(n, q),
                        cartesian,
                        measurable,
                        rotation,
                        detector,
                    });
                }
                entries.insert((label, j), list);
            }
        }
        let plan = Self { n, entries };
        plan.validate()?;
        Ok(plan)
    }

    /// Shared validated plan for `n ∈ {1, 2, 3}`.
    pub fn builtin(n: usize) -> Result<&'static Self> {
        static PLANS: [OnceLock<MeasurementPlan>; MAX_LISA_SPINS] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        if n == 0 || n > MAX_LISA_SPINS {
            return Err(Error::Unsupported(format!(
                "no measurement plan for {n} spins"
            )));
        }
        if let Some(p) = PLANS[n - 1].get() {
            return Ok(p);
        }
        let plan = Self::for_system(n)?;
        Ok(PLANS[n - 1].get_or_init(|| plan))
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn entries(&self, label: DropletLabel, j: u32) -> Result<&[PlanEntry]> {
        self.entries
            .get(&(label, j))
            .map(Vec::as_slice)
            .ok_or(Error::PlanIncomplete { label, j })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(DropletLabel, u32), &Vec<PlanEntry>)> {
        self.entries.iter()
    }

    /// Largest deviation `‖Σ r C - T_{j0}‖_max` over all labels and ranks.
    pub fn decomposition_defect(&self) -> Result<f64> {
        let basis = full_basis(self.n)?;
        let mut worst: f64 = 0.0;
        for (&(label, j), list) in &self.entries {
            let mut sum = Operator::zeros(self.n);
            for e in list {
                sum += &(pauli_product(&e.cartesian, self.n)? * e.coefficient);
            }
            worst = worst.max(sum.max_abs_diff(&basis.axial(label, j)?.op));
        }
        Ok(worst)
    }

    /// Largest deviation `‖U C U† - M‖_max` over all entries.
    pub fn rotation_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for list in self.entries.values() {
            for e in list {
                let u = e.rotation.pulse_unitary(self.n, 1.0)?;
                let c = pauli_product(&e.cartesian, self.n)?;
                let rotated = &(&u * &c) * &u.adjoint();
                worst = worst.max(rotated.max_abs_diff(&pauli_product(&e.measurable, self.n)?));
            }
        }
        Ok(worst)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.decomposition_defect()?;
        if d > DECOMPOSITION_TOL {
            return Err(Error::Contract(format!(
                "axial tensors differ from their Cartesian expansion by {d:e}"
            )));
        }
        let r = self.rotation_defect()?;
        if r > ROTATION_TOL {
            return Err(Error::Contract(format!(
                "detection rotations miss their targets by {r:e}"
            )));
        }
        Ok(())
    }
}

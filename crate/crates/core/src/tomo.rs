//! Droplet tomography: sampling rank-`j` droplet components on an angular
//! grid through scalar products, expectation values, or rotated Cartesian
//! measurements, plus error metrics and least-squares reconstruction.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::droplet::{DropletFunction, SphericalExpansion};
use crate::error::{Error, Result};
use crate::lisa::{full_basis, DropletLabel};
use crate::nmr::{Element, Pulse};
use crate::plan::{MeasurementPlan, PlanEntry};
use crate::rng::standard_normal;
use crate::sphere::{s_factor, ylm_unchecked};
use crate::spin::{
    conjugate, expectation, global_rotation, hs_inner, pauli_product, Operator, C64,
};

const HERMITIAN_TOL: f64 = 1e-10;
const ANGLE_TOL: f64 = 1e-9;

/// Rotation angles `(β_r, α_r)` of a tomography scan, in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct TomographyGrid {
    betas: Vec<f64>,
    alphas: Vec<f64>,
}

impl Default for TomographyGrid {
    /// `β ∈ {0°, 15°, …, 180°}`, `α ∈ {0°, 15°, …, 360°}`.
    fn default() -> Self {
        Self::from_steps(15.0, 15.0).expect("15 divides 180 and 360")
    }
}

impl TomographyGrid {
    /// Equally spaced grid including both end points; the steps must divide
    /// 180° and 360°.
    pub fn from_steps(beta_step_deg: f64, alpha_step_deg: f64) -> Result<Self> {
        let count = |span: f64, step: f64, what: &str| -> Result<usize> {
            let k = span / step;
            if step.is_nan() || step <= 0.0 || !k.is_finite() || (k - k.round()).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "{what} step {step}° does not divide {span}°"
                )));
            }
            Ok(k.round() as usize)
        };
        let nb = count(180.0, beta_step_deg, "beta")?;
        let na = count(360.0, alpha_step_deg, "alpha")?;
        Ok(Self {
            betas: (0..=nb)
                .map(|i| (i as f64 * beta_step_deg).to_radians())
                .collect(),
            alphas: (0..=na)
                .map(|i| (i as f64 * alpha_step_deg).to_radians())
                .collect(),
        })
    }

    pub fn new(betas: Vec<f64>, alphas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || alphas.is_empty() {
            return Err(Error::InvalidArgument(
                "grid needs at least one angle per axis".into(),
            ));
        }
        Ok(Self { betas, alphas })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.betas.len() * self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, bi: usize, ai: usize) -> usize {
        bi * self.alphas.len() + ai
    }

    /// `(β index, α index, β, α)` in row-major order.
    pub fn points(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        self.betas.iter().enumerate().flat_map(move |(bi, &b)| {
            self.alphas
                .iter()
                .enumerate()
                .map(move |(ai, &a)| (bi, ai, b, a))
        })
    }

    pub fn matches(&self, other: &Self) -> bool {
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < ANGLE_TOL)
        };
        close(&self.betas, &other.betas) && close(&self.alphas, &other.alphas)
    }
}

/// How samples are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingPath {
    /// Hilbert–Schmidt products with rotated axial tensors.
    #[default]
    Analytic,
    /// Expectation values of rotated axial tensors.
    Expectation,
    /// Rotated state, Cartesian detection rotations, measured expectations.
    Indirect,
    /// Linear combination of several scans.
    Averaged,
}

impl fmt::Display for SamplingPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Expectation => "expectation",
            Self::Indirect => "indirect",
            Self::Averaged => "averaged",
        })
    }
}

impl FromStr for SamplingPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "expectation" => Ok(Self::Expectation),
            "indirect" => Ok(Self::Indirect),
            "averaged" => Ok(Self::Averaged),
            _ => Err(Error::Parse(format!("unknown sampling path '{s}'"))),
        }
    }
}

/// Evaluation of the indirect path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    /// Exact unitaries and Heisenberg-picture detectors.
    #[default]
    #[serde(rename = "ideal")]
    Ideal,
    /// Explicit rf pulses through the pulse simulator.
    #[serde(rename = "pulse-sim")]
    PulseSim,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ideal => "ideal",
            Self::PulseSim => "pulse-sim",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Self::Ideal),
            "pulse-sim" => Ok(Self::PulseSim),
            _ => Err(Error::Parse(format!("unknown backend '{s}'"))),
        }
    }
}

/// Gaussian noise on each measured expectation value and a relative
/// flip-angle error on every pulse.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub flip_error: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            sigma,
            flip_error: 0.0,
            seed,
        }
    }

    pub fn is_noisy(&self) -> bool {
        self.sigma != 0.0 || self.flip_error != 0.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise sigma {} must be >= 0",
                self.sigma
            )));
        }
        if !self.flip_error.is_finite() {
            return Err(Error::InvalidArgument("flip error must be finite".into()));
        }
        Ok(())
    }
}

/// Path, backend and noise settings of a scan.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScanOptions {
    /// Any path except [`SamplingPath::Averaged`], which results from [`scan_averaged`].
    pub path: SamplingPath,
    pub backend: Backend,
    pub noise: NoiseModel,
}

impl ScanOptions {
    pub fn analytic() -> Self {
        Self::default()
    }

    pub fn expectation() -> Self {
        Self {
            path: SamplingPath::Expectation,
            ..Self::default()
        }
    }

    pub fn indirect(backend: Backend, noise: NoiseModel) -> Self {
        Self {
            path: SamplingPath::Indirect,
            backend,
            noise,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.path == SamplingPath::Averaged {
            return Err(Error::InvalidArgument(
                "averaged sets come from combining scans of several parts".into(),
            ));
        }
        if self.noise.is_noisy() && self.path != SamplingPath::Indirect {
            return Err(Error::InvalidArgument(
                "noise is only modeled for the indirect path".into(),
            ));
        }
        if self.noise.flip_error != 0.0 && self.backend == Backend::Ideal {
            return Err(Error::InvalidArgument(
                "flip-angle errors need the pulse-sim backend".into(),
            ));
        }
        Ok(())
    }
}

fn check_rank(label: DropletLabel, j: u32) -> Result<()> {
    if !label.has_rank(j) {
        return Err(Error::InvalidRank { label, j });
    }
    Ok(())
}

fn require_hermitian(rho: &Operator) -> Result<()> {
    if !rho.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::InvalidArgument(
            "this sampling path needs a Hermitian density operator; use temporal averaging".into(),
        ));
    }
    Ok(())
}

fn axial_op(label: DropletLabel, j: u32, n: usize) -> Result<&'static Operator> {
    check_rank(label, j)?;
    Ok(&full_basis(n)?.axial(label, j)?.op)
}

/// `s_j ⟨R_{αβ} T_{j0}^{(ℓ)} | A⟩`.
pub fn sample_analytic(
    a: &Operator,
    label: DropletLabel,
    j: u32,
    beta: f64,
    alpha: f64,
) -> Result<C64> {
    let t = axial_op(label, j, a.n_spins())?;
    let r = global_rotation(a.n_spins(), alpha, beta);
    Ok(hs_inner(&conjugate(&r, t)?, a)? * s_factor(j))
}

/// `s_j ⟨R_{αβ} T_{j0}^{(ℓ)}⟩_ρ` for Hermitian `ρ`.
pub fn sample_expectation(
    rho: &Operator,
    label: DropletLabel,
    j: u32,
    beta: f64,
    alpha: f64,
) -> Result<C64> {
    require_hermitian(rho)?;
    let t = axial_op(label, j, rho.n_spins())?;
    let r = global_rotation(rho.n_spins(), alpha, beta);
    Ok(expectation(rho, &conjugate(&r, t)?)? * s_factor(j))
}

/// `s_j Σ_n r_n ⟨M_n⟩` measured on the inversely rotated state.
#[allow(clippy::too_many_arguments)]
pub fn sample_indirect(
    rho: &Operator,
    label: DropletLabel,
    j: u32,
    beta: f64,
    alpha: f64,
    plan: &MeasurementPlan,
    backend: Backend,
    noise: NoiseModel,
) -> Result<C64> {
    require_hermitian(rho)?;
    check_rank(label, j)?;
    let opts = ScanOptions::indirect(backend, noise);
    opts.validate()?;
    let key = [0, beta.to_bits(), alpha.to_bits()];
    indirect_value(rho, label, j, beta, alpha, plan, &opts, key)
}

fn label_code(label: DropletLabel) -> u64 {
    match label {
        DropletLabel::Empty => 0,
        DropletLabel::Single(k) => k as u64,
        DropletLabel::Pair(k, l) => 10 * k as u64 + l as u64,
        DropletLabel::Tau(p) => 100 + p as u64,
    }
}

/// `key` is `(part, β index, α index)` for the noise stream.
#[allow(clippy::too_many_arguments)]
fn indirect_value(
    rho: &Operator,
    label: DropletLabel,
    j: u32,
    beta: f64,
    alpha: f64,
    plan: &MeasurementPlan,
    opts: &ScanOptions,
    key: [u64; 3],
) -> Result<C64> {
    let n = rho.n_spins();
    if plan.n_spins() != n {
        return Err(Error::InvalidArgument(format!(
            "plan is for {} spins, state has {n}",
            plan.n_spins()
        )));
    }
    let entries = plan.entries(label, j)?;
    let scale = 1.0 + opts.noise.flip_error;
    let measured = |e: &PlanEntry, tilde: &Operator| -> Result<C64> {
        match opts.backend {
            Backend::Ideal => expectation(tilde, &e.detector),
            Backend::PulseSim => {
                let mut u = Operator::identity(n);
                for el in e.rotation.elements() {
                    if let Element::Pulse(p) = el {
                        u = &p.unitary_scaled(n, scale)? * &u;
                    }
                }
                let out = &(&u * tilde) * &u.adjoint();
                expectation(&out, &pauli_product(&e.measurable, n)?)
            }
        }
    };
    let tilde = match opts.backend {
        Backend::Ideal => {
            let r = global_rotation(n, alpha, beta);
            conjugate(&r.adjoint(), rho)?
        }
        Backend::PulseSim => {
            let targets: Vec<usize> = (1..=n).collect();
            let p = Pulse::new(beta, alpha - FRAC_PI_2, &targets).unitary_scaled(n, scale)?;
            &(&p * rho) * &p.adjoint()
        }
    };
    let mut total = C64::new(0.0, 0.0);
    for e in entries {
        let mut m = measured(e, &tilde)?;
        if opts.noise.sigma > 0.0 {
            let counters = [
                label_code(label),
                j as u64,
                key[0],
                e.index as u64,
                key[1],
                key[2],
            ];
            m += opts.noise.sigma * standard_normal(opts.noise.seed, &counters);
        }
        total += m * e.coefficient;
    }
    Ok(total * s_factor(j))
}

/// Samples `f_j^{(ℓ)}(β_r, α_r)` keyed by `(ℓ, j)`, each a row-major grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    n_spins: usize,
    grid: TomographyGrid,
    path: SamplingPath,
    seed: Option<u64>,
    data: BTreeMap<(DropletLabel, u32), Vec<C64>>,
}

impl SampleSet {
    pub fn new(
        n_spins: usize,
        grid: TomographyGrid,
        path: SamplingPath,
        seed: Option<u64>,
    ) -> Self {
        Self {
            n_spins,
            grid,
            path,
            seed,
            data: BTreeMap::new(),
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn grid(&self) -> &TomographyGrid {
        &self.grid
    }

    pub fn path(&self) -> SamplingPath {
        self.path
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn insert(&mut self, label: DropletLabel, j: u32, values: Vec<C64>) -> Result<()> {
        if values.len() != self.grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples for a grid of {} points",
                values.len(),
                self.grid.len()
            )));
        }
        self.data.insert((label, j), values);
        Ok(())
    }

    pub fn get(&self, label: DropletLabel, j: u32) -> Option<&[C64]> {
        self.data.get(&(label, j)).map(Vec::as_slice)
    }

    pub fn value(&self, label: DropletLabel, j: u32, bi: usize, ai: usize) -> Option<C64> {
        self.get(label, j).map(|v| v[self.grid.index(bi, ai)])
    }

    pub fn components(&self) -> impl Iterator<Item = (&(DropletLabel, u32), &Vec<C64>)> {
        self.data.iter()
    }

    pub fn labels(&self) -> Vec<DropletLabel> {
        let set: BTreeSet<DropletLabel> = self.data.keys().map(|(l, _)| *l).collect();
        set.into_iter().collect()
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.data.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `f^{(ℓ)} = Σ_j f_j^{(ℓ)}` on the grid.
    pub fn droplet_values(&self, label: DropletLabel) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
        for ((l, _), v) in &self.data {
            if *l == label {
                out.iter_mut().zip(v).for_each(|(o, x)| *o += x);
            }
        }
        out
    }

    /// `Σ_i c_i S_i` over sets sharing grid and components.
    pub fn linear_combination(
        parts: &[(C64, &SampleSet)],
        path: SamplingPath,
    ) -> Result<SampleSet> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("no sample sets to combine".into()))?;
        let mut out = SampleSet::new(first.n_spins, first.grid.clone(), path, first.seed);
        for (c, set) in parts {
            if !set.grid.matches(&first.grid) {
                return Err(Error::InvalidArgument(
                    "sample sets use different grids".into(),
                ));
            }
            for (key, values) in &set.data {
                let acc = out
                    .data
                    .entry(*key)
                    .or_insert_with(|| vec![C64::new(0.0, 0.0); first.grid.len()]);
                acc.iter_mut().zip(values).for_each(|(a, v)| *a += c * v);
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &SampleSet) -> f64 {
        let keys: BTreeSet<_> = self.data.keys().chain(other.data.keys()).collect();
        let zeros = vec![C64::new(0.0, 0.0); self.grid.len()];
        keys.into_iter()
            .map(|k| {
                let a = self.data.get(k).unwrap_or(&zeros);
                let b = other.data.get(k).unwrap_or(&zeros);
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Samples of the droplets of `d` (rank by rank) on `grid`.
    pub fn from_droplets(
        d: &DropletFunction,
        labels: &[DropletLabel],
        grid: &TomographyGrid,
    ) -> Self {
        let mut set = SampleSet::new(d.n_spins(), grid.clone(), SamplingPath::Analytic, None);
        for &label in labels {
            let Some(e) = d.get(label) else { continue };
            for j in e.ranks() {
                let part = e.rank_part(j);
                let values = grid
                    .points()
                    .map(|(_, _, b, a)| part.evaluate(b, a))
                    .collect();
                set.data.insert((label, j), values);
            }
        }
        set
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        let path = self.path.to_string();
        for (&(label, j), values) in &self.data {
            for (bi, ai, b, a) in self.grid.points() {
                let v = values[self.grid.index(bi, ai)];
                out.serialize(CsvRow {
                    label: label.to_string(),
                    j,
                    beta_deg: format!("{:.6}", b.to_degrees()),
                    alpha_deg: format!("{:.6}", a.to_degrees()),
                    re: v.re,
                    im: v.im,
                    path: path.clone(),
                    seed: seed.clone(),
                })?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(r);
        let mut rows = Vec::new();
        for row in reader.deserialize::<CsvRow>() {
            rows.push(row?);
        }
        let first = rows
            .first()
            .ok_or_else(|| Error::Parse("empty sample file".into()))?;
        let path: SamplingPath = first.path.parse()?;
        let seed = match first.seed.as_str() {
            "" => None,
            s => Some(
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad seed '{s}'")))?,
            ),
        };
        let parse_angle = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad angle '{s}'")))
        };
        let mut betas = Vec::<f64>::new();
        let mut alphas = Vec::<f64>::new();
        let mut parsed = Vec::with_capacity(rows.len());
        for row in &rows {
            if row.path != first.path || row.seed != first.seed {
                return Err(Error::Parse("rows disagree on path or seed".into()));
            }
            let label: DropletLabel = row.label.parse()?;
            check_rank(label, row.j)?;
            let b = parse_angle(&row.beta_deg)?;
            let a = parse_angle(&row.alpha_deg)?;
            for (list, v) in [(&mut betas, b), (&mut alphas, a)] {
                if !list.iter().any(|x| (x - v).abs() < 1e-7) {
                    list.push(v);
                }
            }
            parsed.push((label, row.j, b, a, C64::new(row.re, row.im)));
        }
        betas.sort_by(f64::total_cmp);
        alphas.sort_by(f64::total_cmp);
        let find = |list: &[f64], v: f64| list.iter().position(|x| (x - v).abs() < 1e-7).unwrap();
        let grid = TomographyGrid::new(
            betas.iter().map(|d| d.to_radians()).collect(),
            alphas.iter().map(|d| d.to_radians()).collect(),
        )?;
        let n_spins = parsed
            .iter()
            .map(|(l, ..)| match l {
                DropletLabel::Tau(_) => 3,
                other => other.max_spin(),
            })
            .max()
            .unwrap_or(1)
            .max(1);
        let mut filled: BTreeMap<(DropletLabel, u32), Vec<Option<C64>>> = BTreeMap::new();
        for (label, j, b, a, v) in parsed {
            let idx = grid.index(find(&betas, b), find(&alphas, a));
            let slot = &mut filled
                .entry((label, j))
                .or_insert_with(|| vec![None; grid.len()])[idx];
            if slot.replace(v).is_some() {
                return Err(Error::Parse(format!("duplicate sample for ({label}, {j})")));
            }
        }
        let mut set = SampleSet::new(n_spins, grid, path, seed);
        for (key, values) in filled {
            let values: Option<Vec<C64>> = values.into_iter().collect();
            let values = values.ok_or_else(|| {
                Error::Parse(format!(
                    "samples for ({}, {}) do not cover the grid",
                    key.0, key.1
                ))
            })?;
            set.data.insert(key, values);
        }
        Ok(set)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    label: String,
    j: u32,
    beta_deg: String,
    alpha_deg: String,
    re: f64,
    im: f64,
    path: String,
    seed: String,
}

/// Samples all ranks of `labels` for one Hermitian (or, on the analytic path,
/// arbitrary) operator.
pub fn scan(
    rho: &Operator,
    labels: &[DropletLabel],
    grid: &TomographyGrid,
    opts: &ScanOptions,
) -> Result<SampleSet> {
    scan_part(rho, labels, grid, opts, 0)
}

fn scan_part(
    rho: &Operator,
    labels: &[DropletLabel],
    grid: &TomographyGrid,
    opts: &ScanOptions,
    part: u64,
) -> Result<SampleSet> {
    opts.validate()?;
    let n = rho.n_spins();
    let basis = full_basis(n)?;
    if opts.path != SamplingPath::Analytic {
        require_hermitian(rho)?;
    }
    let plan = match opts.path {
        SamplingPath::Indirect => Some(MeasurementPlan::builtin(n)?),
        _ => None,
    };
    let mut components = Vec::new();
    for &label in labels {
        for &j in label.ranks() {
            basis.axial(label, j)?;
            components.push((label, j));
        }
    }
    let rotations: Vec<Operator> = grid
        .points()
        .map(|(_, _, b, a)| global_rotation(n, a, b))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..components.len())
        .flat_map(|c| (0..grid.betas().len()).map(move |bi| (c, bi)))
        .collect();
    let rows: Vec<Vec<C64>> = jobs
        .into_par_iter()
        .map(|(c, bi)| -> Result<Vec<C64>> {
            let (label, j) = components[c];
            let t = &basis.axial(label, j)?.op;
            let beta = grid.betas()[bi];
            grid.alphas()
                .iter()
                .enumerate()
                .map(|(ai, &alpha)| {
                    let r = &rotations[grid.index(bi, ai)];
                    match opts.path {
                        SamplingPath::Analytic => {
                            Ok(hs_inner(&conjugate(r, t)?, rho)? * s_factor(j))
                        }
                        SamplingPath::Expectation => {
                            Ok(expectation(rho, &conjugate(r, t)?)? * s_factor(j))
                        }
                        _ => indirect_value(
                            rho,
                            label,
                            j,
                            beta,
                            alpha,
                            plan.expect("plan for indirect path"),
                            opts,
                            [part, bi as u64, ai as u64],
                        ),
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let seed = opts.noise.is_noisy().then_some(opts.noise.seed);
    let mut set = SampleSet::new(n, grid.clone(), opts.path, seed);
    let nb = grid.betas().len();
    for (c, chunk) in rows.chunks(nb).enumerate() {
        let (label, j) = components[c];
        set.data.insert((label, j), chunk.concat());
    }
    Ok(set)
}

/// Scans each Hermitian part and combines them with their complex weights.
pub fn scan_averaged(
    parts: &[(C64, Operator)],
    labels: &[DropletLabel],
    grid: &TomographyGrid,
    opts: &ScanOptions,
) -> Result<SampleSet> {
    let sets: Vec<SampleSet> = parts
        .iter()
        .enumerate()
        .map(|(i, (_, rho))| scan_part(rho, labels, grid, opts, i as u64))
        .collect::<Result<_>>()?;
    let weighted: Vec<(C64, &SampleSet)> = parts.iter().map(|(c, _)| *c).zip(&sets).collect();
    SampleSet::linear_combination(&weighted, SamplingPath::Averaged)
}

/// `f_j^{(ℓ)} = Σ_i c_i f_j^{(i,ℓ)}` for one label and rank.
pub fn temporal_average(
    parts: &[(C64, Operator)],
    label: DropletLabel,
    j: u32,
    grid: &TomographyGrid,
    opts: &ScanOptions,
) -> Result<SampleSet> {
    check_rank(label, j)?;
    let mut set = scan_averaged(parts, &[label], grid, opts)?;
    set.data.retain(|k, _| *k == (label, j));
    Ok(set)
}

/// Root-mean-square deviations between two sample sets.
#[derive(Clone, Debug, PartialEq)]
pub struct RmsReport {
    /// Per droplet `f^{(ℓ)} = Σ_j f_j^{(ℓ)}`.
    pub per_label: BTreeMap<DropletLabel, f64>,
    /// Per rank component `f_j^{(ℓ)}`.
    pub per_component: BTreeMap<(DropletLabel, u32), f64>,
    /// Over all droplets and grid points.
    pub overall: f64,
}

/// `√(mean |f_measured - f_reference|²)` over the grid, per droplet and overall.
pub fn rms_error(measured: &SampleSet, reference: &SampleSet) -> Result<RmsReport> {
    if !measured.grid.matches(&reference.grid) {
        return Err(Error::InvalidArgument(
            "sample sets use different grids".into(),
        ));
    }
    let rms = |a: &[C64], b: &[C64]| -> f64 {
        let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        (s / a.len() as f64).sqrt()
    };
    let zeros = vec![C64::new(0.0, 0.0); measured.grid.len()];
    let keys: BTreeSet<(DropletLabel, u32)> = measured
        .data
        .keys()
        .chain(reference.data.keys())
        .copied()
        .collect();
    let per_component = keys
        .iter()
        .map(|k| {
            let a = measured.data.get(k).unwrap_or(&zeros);
            let b = reference.data.get(k).unwrap_or(&zeros);
            (*k, rms(a, b))
        })
        .collect();
    let labels: BTreeSet<DropletLabel> = keys.iter().map(|(l, _)| *l).collect();
    let mut per_label = BTreeMap::new();
    let mut total = 0.0;
    for &l in &labels {
        let e = rms(&measured.droplet_values(l), &reference.droplet_values(l));
        total += e * e;
        per_label.insert(l, e);
    }
    let overall = if labels.is_empty() {
        0.0
    } else {
        (total / labels.len() as f64).sqrt()
    };
    Ok(RmsReport {
        per_label,
        per_component,
        overall,
    })
}

/// Least-squares `Y_{jm}` coefficients for every component of a sample set.
pub fn fit_coefficients(set: &SampleSet) -> Result<DropletFunction> {
    let mut d = DropletFunction::new(set.n_spins);
    let points: Vec<(f64, f64)> = set.grid.points().map(|(_, _, b, a)| (b, a)).collect();
    for (&(label, j), values) in &set.data {
        let ji = j as i32;
        let a = DMatrix::from_fn(points.len(), (2 * j + 1) as usize, |p, c| {
            let (b, al) = points[p];
            ylm_unchecked(j, c as i32 - ji, b, al)
        });
        let ah = a.adjoint();
        let normal = &ah * &a;
        let rhs = &ah * DVector::from_column_slice(values);
        let c = normal.cholesky().map(|ch| ch.solve(&rhs)).ok_or_else(|| {
            Error::InvalidArgument(format!("grid cannot resolve rank {j} of droplet {label}"))
        })?;
        let e: &mut SphericalExpansion = d.expansion_mut(label);
        for (i, v) in c.iter().enumerate() {
            e.set(j, i as i32 - ji, *v);
        }
    }
    Ok(d)
}

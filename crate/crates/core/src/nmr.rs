//! Idealized product-operator NMR simulation: hard pulses, weak-coupling
//! evolution and gradient crushers.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{
    hs_inner, local_unitary, single_spin, spin_half_rotation, Axis, CartesianLabel, Operator, C64,
    MAX_SPINS,
};

/// Scalar coupling `J_kl` in hertz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub k: usize,
    pub l: usize,
    pub j_hz: f64,
}

/// Spin-system parameters in the format of the JSON config file. Missing
/// `gamma` and `offsets_hz` default to unit ratios on resonance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawSystem")]
pub struct SpinSystemParams {
    pub n: usize,
    pub gamma: Vec<f64>,
    pub offsets_hz: Vec<f64>,
    pub couplings: Vec<Coupling>,
}

#[derive(Deserialize)]
struct RawSystem {
    n: usize,
    #[serde(default)]
    gamma: Vec<f64>,
    #[serde(default)]
    offsets_hz: Vec<f64>,
    #[serde(default)]
    couplings: Vec<Coupling>,
}

impl From<RawSystem> for SpinSystemParams {
    fn from(r: RawSystem) -> Self {
        let or_fill = |v: Vec<f64>, x: f64| if v.is_empty() { vec![x; r.n] } else { v };
        Self {
            n: r.n,
            gamma: or_fill(r.gamma, 1.0),
            offsets_hz: or_fill(r.offsets_hz, 0.0),
            couplings: r.couplings,
        }
    }
}

impl SpinSystemParams {
    /// Unit `γ`, on resonance, no couplings.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gamma: vec![1.0; n],
            offsets_hz: vec![0.0; n],
            couplings: Vec::new(),
        }
    }

    /// Placeholder couplings `J12 = 140`, `J13 = 100`, `J23 = 40` Hz (where present).
    pub fn with_default_couplings(n: usize) -> Self {
        let mut p = Self::new(n);
        for (k, l, j) in [(1, 2, 140.0), (1, 3, 100.0), (2, 3, 40.0)] {
            if l <= n {
                p.couplings.push(Coupling { k, l, j_hz: j });
            }
        }
        p
    }

    pub fn with_gamma(mut self, gamma: &[f64]) -> Self {
        self.gamma = gamma.to_vec();
        self
    }

    pub fn with_coupling(mut self, k: usize, l: usize, j_hz: f64) -> Self {
        self.couplings.retain(|c| !same_pair(c, k, l));
        self.couplings.push(Coupling { k, l, j_hz });
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_SPINS {
            return Err(Error::InvalidArgument(format!(
                "spin count {} out of range",
                self.n
            )));
        }
        if self.gamma.len() != self.n || self.offsets_hz.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} gamma and offset values, got {} and {}",
                self.n,
                self.gamma.len(),
                self.offsets_hz.len()
            )));
        }
        for (i, c) in self.couplings.iter().enumerate() {
            if c.k == c.l || c.k == 0 || c.l == 0 || c.k > self.n || c.l > self.n {
                return Err(Error::InvalidCouplings(format!(
                    "coupling between spins {} and {} is not valid for {} spins",
                    c.k, c.l, self.n
                )));
            }
            if !c.j_hz.is_finite() {
                return Err(Error::InvalidCouplings(format!(
                    "J{}{} is not finite",
                    c.k, c.l
                )));
            }
            if self.couplings[..i].iter().any(|o| same_pair(o, c.k, c.l)) {
                return Err(Error::InvalidCouplings(format!(
                    "coupling J{}{} listed twice",
                    c.k, c.l
                )));
            }
        }
        Ok(())
    }

    /// `J_kl = J_lk`, or `None` if the pair is uncoupled.
    pub fn coupling(&self, k: usize, l: usize) -> Option<f64> {
        self.couplings
            .iter()
            .find(|c| same_pair(c, k, l))
            .map(|c| c.j_hz)
    }

    fn nonzero_coupling(&self, k: usize, l: usize) -> Result<f64> {
        match self.coupling(k, l) {
            Some(j) if j != 0.0 => Ok(j),
            _ => Err(Error::InvalidCouplings(format!(
                "delay needs a nonzero J{k}{l}"
            ))),
        }
    }

    /// `1/(4 J_kl)` in seconds.
    pub fn quarter_period(&self, k: usize, l: usize) -> Result<f64> {
        Ok(1.0 / (4.0 * self.nonzero_coupling(k, l)?))
    }
}

fn same_pair(c: &Coupling, k: usize, l: usize) -> bool {
    (c.k == k && c.l == l) || (c.k == l && c.l == k)
}

/// `ρ_th = Σ_k γ_k I_kz`.
pub fn thermal_state(params: &SpinSystemParams) -> Result<Operator> {
    params.validate()?;
    let mut rho = Operator::zeros(params.n);
    for (k, g) in params.gamma.iter().enumerate() {
        rho += &(single_spin(params.n, k + 1, Axis::Z)? * *g);
    }
    Ok(rho)
}

/// A hard rf pulse `[flip]_phase` on a set of spins.
#[derive(Clone, Debug, PartialEq)]
pub struct Pulse {
    pub flip: f64,
    pub phase: f64,
    pub targets: Vec<usize>,
}

impl Pulse {
    pub fn new(flip: f64, phase: f64, targets: &[usize]) -> Self {
        Self {
            flip,
            phase,
            targets: targets.to_vec(),
        }
    }

    /// Pulse with flip in degrees and phase named `x`, `y`, `-x` or `-y`.
    pub fn named(flip_deg: f64, phase: &str, targets: &[usize]) -> Result<Self> {
        Ok(Self::new(
            flip_deg.to_radians(),
            phase_from_name(phase)?,
            targets,
        ))
    }

    /// `exp(-i flip Σ_k (cos φ I_kx + sin φ I_ky))`.
    pub fn unitary(&self, n: usize) -> Result<Operator> {
        self.unitary_scaled(n, 1.0)
    }

    /// The same pulse with its flip angle multiplied by `scale`.
    pub fn unitary_scaled(&self, n: usize, scale: f64) -> Result<Operator> {
        check_targets(&self.targets, n)?;
        let axis = [self.phase.cos(), self.phase.sin(), 0.0];
        let rot = spin_half_rotation(self.flip * scale, axis);
        local_unitary(n, |k| {
            if self.targets.contains(&k) {
                rot.clone()
            } else {
                DMatrix::identity(2, 2)
            }
        })
    }
}

fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidArgument("pulse without target spins".into()));
    }
    if let Some(k) = targets.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::InvalidArgument(format!(
            "pulse targets spin {k} in a {n}-spin system"
        )));
    }
    Ok(())
}

fn phase_from_name(name: &str) -> Result<f64> {
    match name {
        "x" => Ok(0.0),
        "y" => Ok(FRAC_PI_2),
        "-x" => Ok(PI),
        "-y" => Ok(3.0 * FRAC_PI_2),
        _ => Err(Error::Parse(format!("unknown pulse phase '{name}'"))),
    }
}

fn phase_name(phase: f64) -> Option<&'static str> {
    let p = phase.rem_euclid(2.0 * PI);
    let near = |t: f64| (p - t).abs() < 1e-12;
    if near(0.0) || near(2.0 * PI) {
        Some("x")
    } else if near(FRAC_PI_2) {
        Some("y")
    } else if near(PI) {
        Some("-x")
    } else if near(3.0 * FRAC_PI_2) {
        Some("-y")
    } else {
        None
    }
}

/// One step of a pulse sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Pulse(Pulse),
    /// Free evolution for the given number of seconds.
    Delay(f64),
    Gradient,
}

/// Ordered list of pulses, delays and gradients, applied left to right.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSequence {
    elements: Vec<Element>,
}

impl PulseSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn push(&mut self, e: Element) -> &mut Self {
        self.elements.push(e);
        self
    }

    pub fn pulse(mut self, flip_deg: f64, phase: &str, targets: &[usize]) -> Result<Self> {
        self.elements
            .push(Element::Pulse(Pulse::named(flip_deg, phase, targets)?));
        Ok(self)
    }

    pub fn delay(mut self, seconds: f64) -> Result<Self> {
        if !(seconds >= 0.0 && seconds.is_finite()) {
            return Err(Error::InvalidCouplings(format!(
                "negative or invalid delay {seconds}"
            )));
        }
        self.elements.push(Element::Delay(seconds));
        Ok(self)
    }

    pub fn gradient(mut self) -> Self {
        self.elements.push(Element::Gradient);
        self
    }

    pub fn then(mut self, other: &PulseSequence) -> Self {
        self.elements.extend(other.elements.iter().cloned());
        self
    }

    /// Largest spin index referenced by any pulse.
    pub fn max_spin(&self) -> usize {
        self.elements
            .iter()
            .filter_map(|e| match e {
                Element::Pulse(p) => p.targets.iter().max().copied(),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Parses the whitespace-separated text form. Delay expressions may refer
    /// to couplings, e.g. `d(1/4J12)` or `d(1/4J13-1/4J12)`.
    pub fn parse(text: &str, params: &SpinSystemParams) -> Result<Self> {
        let mut seq = Self::new();
        for token in text.split_whitespace() {
            if token == "G" {
                seq = seq.gradient();
            } else if let Some(expr) = token.strip_prefix("d(").and_then(|t| t.strip_suffix(')')) {
                seq = seq.delay(delay_expression(expr, params)?)?;
            } else {
                seq.elements.push(Element::Pulse(parse_pulse(token)?));
            }
        }
        Ok(seq)
    }

    /// Unitary of the pulse-only part (delays and gradients are rejected).
    pub fn pulse_unitary(&self, n: usize, flip_scale: f64) -> Result<Operator> {
        let mut u = Operator::identity(n);
        for e in &self.elements {
            match e {
                Element::Pulse(p) => u = &p.unitary_scaled(n, flip_scale)? * &u,
                _ => {
                    return Err(Error::InvalidArgument(
                        "only pulses have a state-independent unitary here".into(),
                    ))
                }
            }
        }
        Ok(u)
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match e {
                Element::Gradient => write!(f, "G")?,
                Element::Delay(t) => write!(f, "d({t})")?,
                Element::Pulse(p) => {
                    let targets: Vec<String> = p.targets.iter().map(|k| k.to_string()).collect();
                    let flip = p.flip.to_degrees();
                    match phase_name(p.phase) {
                        Some(name) => write!(f, "{flip}{name}")?,
                        None => write!(f, "{flip}@{}", p.phase.to_degrees())?,
                    }
                    write!(f, "({})", targets.join(","))?;
                }
            }
        }
        Ok(())
    }
}

/// `90y(1)`, `180-x(1,2)` or `45@30(2)` with a phase in degrees.
fn parse_pulse(token: &str) -> Result<Pulse> {
    let bad = || Error::Parse(format!("bad sequence token '{token}'"));
    let open = token.find('(').ok_or_else(bad)?;
    let body = token[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let targets: Vec<usize> = body
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let head = &token[..open];
    let (flip, phase) = if let Some((flip, phase)) = head.split_once('@') {
        let phase: f64 = phase.parse().map_err(|_| bad())?;
        (flip, phase.to_radians())
    } else {
        let split = head
            .find(['x', 'y', '-'])
            .filter(|&i| i > 0)
            .ok_or_else(bad)?;
        (&head[..split], phase_from_name(&head[split..])?)
    };
    let flip: f64 = flip.parse().map_err(|_| bad())?;
    if targets.contains(&0) {
        return Err(bad());
    }
    Ok(Pulse::new(flip.to_radians(), phase, &targets))
}

/// Sum of signed terms, each either seconds or `1/4Jkl`.
fn delay_expression(expr: &str, params: &SpinSystemParams) -> Result<f64> {
    let bad = || Error::Parse(format!("bad delay expression '{expr}'"));
    let mut total = 0.0;
    let mut rest = expr.trim();
    let mut sign = 1.0;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1.0;
        rest = r;
    }
    loop {
        // A leading digit plus exponent like 1e-3 must not be split at '-'.
        let end = rest
            .char_indices()
            .skip(1)
            .find(|&(i, c)| (c == '+' || c == '-') && !rest[..i].ends_with(['e', 'E']))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let term = rest[..end].trim();
        let value = if let Some(pair) = term.strip_prefix("1/4J") {
            let digits: Vec<usize> = pair
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(bad)?;
            match digits.as_slice() {
                [k, l] => params.quarter_period(*k, *l)?,
                _ => return Err(bad()),
            }
        } else {
            term.parse::<f64>().map_err(|_| bad())?
        };
        total += sign * value;
        if end == rest.len() {
            break;
        }
        sign = if rest[end..].starts_with('-') {
            -1.0
        } else {
            1.0
        };
        rest = &rest[end + 1..];
    }
    if total < 0.0 {
        return Err(Error::InvalidCouplings(format!(
            "delay '{expr}' is negative ({total} s) for these couplings"
        )));
    }
    Ok(total)
}

/// Spin quantum numbers `m_k ∈ {±1/2}` of a computational basis state.
fn magnetic_numbers(n: usize, state: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |k| if state >> (n - k) & 1 == 0 { 0.5 } else { -0.5 })
}

/// Diagonal of `H = Σ_k 2πν_k I_kz + Σ_{k<l} 2πJ_kl I_kz I_lz` in rad/s.
pub fn hamiltonian_diagonal(params: &SpinSystemParams) -> Vec<f64> {
    let n = params.n;
    (0..1usize << n)
        .map(|s| {
            let m: Vec<f64> = magnetic_numbers(n, s).collect();
            let zeeman: f64 = m
                .iter()
                .zip(&params.offsets_hz)
                .map(|(m, v)| 2.0 * PI * v * m)
                .sum();
            let coupling: f64 = params
                .couplings
                .iter()
                .map(|c| 2.0 * PI * c.j_hz * m[c.k - 1] * m[c.l - 1])
                .sum();
            zeeman + coupling
        })
        .collect()
}

pub fn apply_pulse(rho: &Operator, pulse: &Pulse) -> Result<Operator> {
    apply_pulse_scaled(rho, pulse, 1.0)
}

fn apply_pulse_scaled(rho: &Operator, pulse: &Pulse, scale: f64) -> Result<Operator> {
    let u = pulse.unitary_scaled(rho.n_spins(), scale)?;
    Ok(&(&u * rho) * &u.adjoint())
}

/// Free evolution `e^{-iHt} ρ e^{iHt}` under the secular Hamiltonian.
pub fn evolve(rho: &Operator, params: &SpinSystemParams, duration: f64) -> Result<Operator> {
    if duration < 0.0 {
        return Err(Error::InvalidArgument(format!("negative delay {duration}")));
    }
    if params.n != rho.n_spins() {
        return Err(Error::InvalidArgument(format!(
            "state has {} spins but the system has {}",
            rho.n_spins(),
            params.n
        )));
    }
    let e = hamiltonian_diagonal(params);
    let m = rho.matrix();
    let out = DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| {
        m[(a, b)] * C64::from_polar(1.0, -(e[a] - e[b]) * duration)
    });
    Operator::new(rho.n_spins(), out)
}

/// Keeps only the zero-quantum part of `ρ` (elements between equal `F_z`).
pub fn apply_gradient(rho: &Operator) -> Operator {
    let n = rho.n_spins();
    let m = rho.matrix();
    let out = DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| {
        if a.count_ones() == b.count_ones() {
            m[(a, b)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Operator::new(n, out).expect("same dimension")
}

pub fn run_sequence(
    initial: &Operator,
    seq: &PulseSequence,
    params: &SpinSystemParams,
) -> Result<Operator> {
    run_sequence_scaled(initial, seq, params, 1.0)
}

/// Runs `seq` with every flip angle multiplied by `flip_scale`.
pub fn run_sequence_scaled(
    initial: &Operator,
    seq: &PulseSequence,
    params: &SpinSystemParams,
    flip_scale: f64,
) -> Result<Operator> {
    let n = initial.n_spins();
    if seq.max_spin() > n {
        return Err(Error::InvalidArgument(format!(
            "sequence addresses spin {} of a {n}-spin system",
            seq.max_spin()
        )));
    }
    let mut rho = initial.clone();
    for e in seq.elements() {
        rho = match e {
            Element::Pulse(p) => apply_pulse_scaled(&rho, p, flip_scale)?,
            Element::Delay(t) => evolve(&rho, params, *t)?,
            Element::Gradient => apply_gradient(&rho),
        };
    }
    Ok(rho)
}

/// Signed overlap `⟨T|ρ⟩ / (‖T‖ ‖ρ‖)`; 1 means `ρ` is a positive multiple of `T`.
pub fn overlap_fraction(rho: &Operator, target: &Operator) -> Result<f64> {
    let denom = rho.norm() * target.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(hs_inner(target, rho)?.re / denom)
}

/// Bilinear preparation block for phase `x` or `y`.
pub fn bilinear_block(params: &SpinSystemParams, phase: Axis) -> Result<PulseSequence> {
    let (first, refocus) = match phase {
        Axis::X => ("x", "y"),
        Axis::Y => ("y", "x"),
        _ => {
            return Err(Error::InvalidArgument(
                "bilinear block phase must be x or y".into(),
            ))
        }
    };
    let ta = params.quarter_period(1, 2)?;
    PulseSequence::new()
        .pulse(90.0, "y", &[2])?
        .gradient()
        .pulse(90.0, first, &[1])?
        .delay(ta)?
        .pulse(180.0, refocus, &[1, 2])?
        .delay(ta)
}

/// Trilinear preparation block turning `I_z` into `4I_{1x}I_{2z}I_{3z}`.
pub fn trilinear_block(params: &SpinSystemParams) -> Result<PulseSequence> {
    let q12 = params.quarter_period(1, 2)?;
    let q13 = params.quarter_period(1, 3)?;
    let tc = q13 - q12;
    if tc < 0.0 {
        return Err(Error::InvalidCouplings(format!(
            "1/(4J13) - 1/(4J12) = {tc} s is negative; the trilinear block needs J13 <= J12"
        )));
    }
    PulseSequence::new()
        .pulse(90.0, "y", &[2, 3])?
        .gradient()
        .pulse(90.0, "y", &[1])?
        .delay(q13)?
        .pulse(180.0, "y", &[1, 3])?
        .delay(tc)?
        .pulse(180.0, "y", &[2])?
        .delay(q12)
}

/// A preparation sequence together with the product operator it produces.
#[derive(Clone, Debug)]
pub struct Preparation {
    pub target: CartesianLabel,
    pub sequence: PulseSequence,
}

/// All preparation sequences from the thermal state for `params.n` spins.
pub fn preparation_sequences(params: &SpinSystemParams) -> Result<Vec<Preparation>> {
    params.validate()?;
    type Step = (f64, &'static str, &'static [usize]);
    let build = |block: &PulseSequence, target: &str, steps: &[Step]| -> Result<Preparation> {
        let mut seq = block.clone();
        for &(flip, phase, targets) in steps {
            seq = seq.pulse(flip, phase, targets)?;
        }
        Ok(Preparation {
            target: CartesianLabel::parse_dense(target)?,
            sequence: seq,
        })
    };
    let empty = PulseSequence::new();
    match params.n {
        1 => Ok(vec![
            build(&empty, "x", &[(90.0, "y", &[1])])?,
            build(&empty, "y", &[(90.0, "-x", &[1])])?,
            build(&empty, "z", &[])?,
        ]),
        2 => {
            let bx = bilinear_block(params, Axis::X)?;
            let by = bilinear_block(params, Axis::Y)?;
            Ok(vec![
                build(&bx, "xx", &[(90.0, "y", &[2])])?,
                build(&by, "yy", &[(90.0, "-x", &[2])])?,
                build(&bx, "zz", &[(90.0, "-y", &[1])])?,
                build(&bx, "xy", &[(90.0, "-x", &[2])])?,
                build(&by, "yx", &[(90.0, "y", &[2])])?,
                build(&bx, "zx", &[(90.0, "y", &[1]), (90.0, "-y", &[2])])?,
            ])
        }
        3 => {
            let t = trilinear_block(params)?;
            // Turns the leading x of 4I_xzz into y.
            const X_TO_Y: [Step; 2] = [(90.0, "-y", &[1]), (90.0, "-x", &[1])];
            let with_y1 =
                |rest: &[Step]| -> Vec<Step> { X_TO_Y.iter().chain(rest).copied().collect() };
            Ok(vec![
                build(&t, "xxx", &[(90.0, "y", &[2]), (90.0, "y", &[3])])?,
                build(
                    &t,
                    "yyy",
                    &with_y1(&[(90.0, "-x", &[2]), (90.0, "-x", &[3])]),
                )?,
                build(&t, "xyy", &[(90.0, "-x", &[2]), (90.0, "-x", &[3])])?,
                build(
                    &t,
                    "yxy",
                    &with_y1(&[(90.0, "y", &[2]), (90.0, "-x", &[3])]),
                )?,
                build(
                    &t,
                    "yyx",
                    &with_y1(&[(90.0, "-x", &[2]), (90.0, "y", &[3])]),
                )?,
                build(&t, "xxy", &[(90.0, "y", &[2]), (90.0, "-x", &[3])])?,
                build(&t, "xyx", &[(90.0, "-x", &[2]), (90.0, "y", &[3])])?,
                build(&t, "yxx", &with_y1(&[(90.0, "y", &[2]), (90.0, "y", &[3])]))?,
                build(&t, "xyz", &[(90.0, "-x", &[2])])?,
            ])
        }
        n => Err(Error::Unsupported(format!(
            "no preparation sequences for {n} spins"
        ))),
    }
}

/// Preparation sequence for a product operator given in dense form (`"zx"`).
pub fn preparation_for(params: &SpinSystemParams, target: &str) -> Result<Preparation> {
    let wanted = CartesianLabel::parse_dense(target)?;
    preparation_sequences(params)?
        .into_iter()
        .find(|p| p.target == wanted)
        .ok_or_else(|| Error::Unsupported(format!("no preparation sequence for '{target}'")))
}

/// Per-spin π/2 pulses mapping the product operator `c` onto `m`, applied
/// from the highest spin down.
pub fn detection_rotation(c: &CartesianLabel, m: &CartesianLabel) -> Result<PulseSequence> {
    let n = c.max_spin().max(m.max_spin());
    let mut seq = PulseSequence::new();
    for k in (1..=n).rev() {
        let (from, to) = (c.axis_of(k), m.axis_of(k));
        let phase = match (from, to) {
            _ if from == to => continue,
            (Axis::Z, Axis::X) => "y",
            (Axis::X, Axis::Z) => "-y",
            (Axis::Y, Axis::Z) => "x",
            (Axis::Z, Axis::Y) => "-x",
            _ => {
                return Err(Error::Unsupported(format!(
                    "no single pulse takes {}-magnetization of spin {k} to {}",
                    from.as_char(),
                    to.as_char()
                )))
            }
        };
        seq = seq.pulse(90.0, phase, &[k])?;
    }
    Ok(seq)
}

impl FromStr for Pulse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pulse(s)
    }
}

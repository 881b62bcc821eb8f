//! Droplet functions: one spherical-harmonic expansion per LISA label.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lisa::DropletLabel;
use crate::spin::C64;

/// Coefficients `c_{jm}` of `Σ_j Σ_m c_{jm} Y_{jm}`, keyed by `(j, m)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SphericalExpansion {
    coeffs: BTreeMap<(u32, i32), C64>,
}

impl SphericalExpansion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, j: u32, m: i32) -> C64 {
        self.coeffs.get(&(j, m)).copied().unwrap_or_default()
    }

    /// Sets a coefficient. Panics if `|m| > j`.
    pub fn set(&mut self, j: u32, m: i32, c: C64) {
        assert!(m.unsigned_abs() <= j, "order {m} exceeds rank {j}");
        self.coeffs.insert((j, m), c);
    }

    pub fn add(&mut self, j: u32, m: i32, c: C64) {
        let v = self.get(j, m) + c;
        self.set(j, m, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, i32), C64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn ranks(&self) -> Vec<u32> {
        let mut r: Vec<u32> = self.coeffs.keys().map(|&(j, _)| j).collect();
        r.dedup();
        r
    }

    pub fn max_rank(&self) -> Option<u32> {
        self.coeffs.keys().map(|&(j, _)| j).max()
    }

    /// Only the terms of rank `j`.
    pub fn rank_part(&self, j: u32) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|((jj, _), _)| *jj == j)
                .map(|(&k, &v)| (k, v))
                .collect(),
        }
    }

    /// `Σ |c_{jm}|²`, which equals the squared `L²` norm on the sphere.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&k, &v)| (k, v * s)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|&(j, m)| (self.get(j, m) - other.get(j, m)).norm())
            .fold(0.0, f64::max)
    }
}

/// All droplets `f^{(ℓ)}` of an operator on `n` spins.
#[derive(Clone, Debug, PartialEq)]
pub struct DropletFunction {
    n: usize,
    droplets: BTreeMap<DropletLabel, SphericalExpansion>,
}

impl DropletFunction {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            droplets: BTreeMap::new(),
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn get(&self, label: DropletLabel) -> Option<&SphericalExpansion> {
        self.droplets.get(&label)
    }

    pub fn expansion_mut(&mut self, label: DropletLabel) -> &mut SphericalExpansion {
        self.droplets.entry(label).or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DropletLabel, &SphericalExpansion)> {
        self.droplets.iter()
    }

    pub fn labels(&self) -> Vec<DropletLabel> {
        self.droplets.keys().copied().collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let empty = SphericalExpansion::default();
        self.droplets
            .keys()
            .chain(other.droplets.keys())
            .map(|l| {
                let a = self.droplets.get(l).unwrap_or(&empty);
                let b = other.droplets.get(l).unwrap_or(&empty);
                a.max_abs_diff(b)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DropletFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<DropletFile>(s)?.try_into()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct DropletFile {
    n: usize,
    droplets: Vec<DropletEntry>,
}

#[derive(Serialize, Deserialize)]
struct DropletEntry {
    label: String,
    terms: Vec<TermEntry>,
}

#[derive(Serialize, Deserialize)]
struct TermEntry {
    j: u32,
    m: i32,
    re: f64,
    im: f64,
}

impl From<&DropletFunction> for DropletFile {
    fn from(d: &DropletFunction) -> Self {
        Self {
            n: d.n,
            droplets: d
                .droplets
                .iter()
                .map(|(label, exp)| DropletEntry {
                    label: label.to_string(),
                    terms: exp
                        .iter()
                        .map(|((j, m), c)| TermEntry {
                            j,
                            m,
                            re: c.re,
                            im: c.im,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<DropletFile> for DropletFunction {
    type Error = Error;

    fn try_from(f: DropletFile) -> Result<Self> {
        let mut d = DropletFunction::new(f.n);
        for entry in f.droplets {
            let label: DropletLabel = entry.label.parse()?;
            let exp = d.expansion_mut(label);
            for t in entry.terms {
                if t.m.unsigned_abs() > t.j {
                    return Err(Error::Parse(format!(
                        "order {} exceeds rank {} in droplet {label}",
                        t.m, t.j
                    )));
                }
                exp.set(t.j, t.m, C64::new(t.re, t.im));
            }
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_bookkeeping() {
        let mut e = SphericalExpansion::new();
        e.set(2, -1, C64::new(1.0, 2.0));
        e.add(2, -1, C64::new(0.5, 0.0));
        e.set(0, 0, C64::new(3.0, 0.0));
        assert_eq!(e.get(2, -1), C64::new(1.5, 2.0));
        assert_eq!(e.get(1, 0), C64::default());
        assert_eq!(e.ranks(), vec![0, 2]);
        assert_eq!(e.max_rank(), Some(2));
        assert!((e.norm_sqr() - (2.25 + 4.0 + 9.0)).abs() < 1e-15);
        assert_eq!(e.rank_part(0).iter().count(), 1);
    }

    #[test]
    #[should_panic]
    fn order_above_rank_panics() {
        SphericalExpansion::new().set(1, 2, C64::default());
    }

    #[test]
    fn json_round_trip() {
        let mut d = DropletFunction::new(2);
        d.expansion_mut(DropletLabel::Pair(1, 2))
            .set(2, -2, C64::new(0.25, -0.5));
        d.expansion_mut(DropletLabel::Single(1))
            .set(1, 0, C64::new(1.0, 0.0));
        let back = DropletFunction::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_rejects_bad_input() {
        let bad = r#"{"n":1,"droplets":[{"label":"1","terms":[{"j":0,"m":1,"re":0,"im":0}]}]}"#;
        assert!(DropletFunction::from_json(bad).is_err());
        let bad = r#"{"n":1,"droplets":[{"label":"q","terms":[]}]}"#;
        assert!(DropletFunction::from_json(bad).is_err());
    }
}

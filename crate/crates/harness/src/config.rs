//! Sweep configuration read from TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gapstress_core::{InclusionPairGeometry, LameParams, Outer};
use gapstress_fem::{MeshOptions, Order};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

/// Named outer boundary data. The presets are symmetric or antisymmetric
/// under the two coordinate reflections, which the blow-up theorems assume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Preset {
    /// `(x_2, 0)`
    Shear,
    /// `(0, x_2)`
    Stretch,
    /// Rigid motion number `alpha` (1-based).
    Rigid(usize),
    Zero,
}

impl Preset {
    pub fn eval(self, x: [f64; 2]) -> [f64; 2] {
        match self {
            Preset::Shear => [x[1], 0.0],
            Preset::Stretch => [0.0, x[1]],
            Preset::Rigid(1) => [1.0, 0.0],
            Preset::Rigid(2) => [0.0, 1.0],
            Preset::Rigid(_) => [-x[1], x[0]],
            Preset::Zero => [0.0, 0.0],
        }
    }
}

impl FromStr for Preset {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shear" => Ok(Preset::Shear),
            "stretch" => Ok(Preset::Stretch),
            "zero" => Ok(Preset::Zero),
            _ => match s.strip_prefix("rigid-").and_then(|a| a.parse::<usize>().ok()) {
                Some(a @ 1..=3) => Ok(Preset::Rigid(a)),
                _ => Err(HarnessError::Config(format!("unknown boundary preset '{s}'"))),
            },
        }
    }
}

impl TryFrom<String> for Preset {
    type Error = HarnessError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Preset> for String {
    fn from(p: Preset) -> String {
        p.to_string()
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Shear => write!(f, "shear"),
            Preset::Stretch => write!(f, "stretch"),
            Preset::Rigid(a) => write!(f, "rigid-{a}"),
            Preset::Zero => write!(f, "zero"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    /// Two disks in an outer disk.
    Disks,
    /// Two congruent superellipses in an outer disk.
    Superellipses,
    /// Period cell with one superellipse per cell.
    Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub kind: GeometryKind,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "two")]
    pub m: u32,
    #[serde(default = "hundred")]
    pub outer_radius: f64,
    #[serde(default = "cell_width")]
    pub cell_half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub preset: Preset,
    pub eps: Vec<f64>,
    /// Mesh sizes near the inclusions; the smallest is the finest level.
    #[serde(default = "default_levels")]
    pub h_levels: Vec<f64>,
    #[serde(default = "four")]
    pub n_layers: usize,
    /// Far-field element size (outer disk geometries).
    pub far_h: Option<f64>,
    #[serde(default)]
    pub order: Order,
    /// Narrow-region probe points per sweep point.
    #[serde(default = "sixty")]
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "results_dir")]
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: results_dir() }
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> u32 {
    2
}
fn four() -> usize {
    4
}
fn sixty() -> usize {
    60
}
fn hundred() -> f64 {
    100.0
}
fn cell_width() -> f64 {
    1.5
}
fn default_levels() -> Vec<f64> {
    vec![0.2]
}
fn results_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub geometry: GeometrySection,
    pub material: MaterialSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Geometric ladder `start, start/2, ...` with `n` entries.
pub fn halving_ladder(start: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| start / 2f64.powi(k as i32)).collect()
}

impl SweepConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let eps = &self.sweep.eps;
        if eps.len() < 3 {
            return Err(HarnessError::Config(format!("need at least 3 eps values, got {}", eps.len())));
        }
        if !eps.windows(2).all(|w| w[1] < w[0]) {
            return Err(HarnessError::Config("eps list must be strictly decreasing".into()));
        }
        if !eps.iter().all(|&e| e > 0.0 && e < 0.5) {
            return Err(HarnessError::Config("every eps must lie in (0, 1/2)".into()));
        }
        if self.sweep.h_levels.is_empty() || !self.sweep.h_levels.iter().all(|&h| h > 0.0) {
            return Err(HarnessError::Config("h_levels must be non-empty and positive".into()));
        }
        self.params()?;
        for &e in eps {
            self.geometry_at(e)?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<LameParams> {
        Ok(LameParams::new(self.material.lambda, self.material.mu, 2)?)
    }

    pub fn geometry_at(&self, eps: f64) -> Result<InclusionPairGeometry> {
        let g = &self.geometry;
        let out = match g.kind {
            GeometryKind::Disks => InclusionPairGeometry::disks_to_model(g.r, g.r, eps, g.outer_radius)?,
            GeometryKind::Superellipses => {
                InclusionPairGeometry::superellipses(g.r, g.m, eps, Outer::Disk { radius: g.outer_radius })?
            }
            GeometryKind::Cell => InclusionPairGeometry::period_cell(g.r, g.m, eps, g.cell_half_width)?,
        };
        Ok(out)
    }

    pub fn mesh_options(&self, h: f64) -> MeshOptions {
        let mut o = MeshOptions::new(h, self.sweep.n_layers);
        if self.geometry.kind != GeometryKind::Cell {
            // grade out to the outer boundary: ~15 elements per radius there
            let far = self.sweep.far_h.unwrap_or((self.geometry.outer_radius / 15.0).max(h));
            o = o.with_far_h(far);
        }
        o
    }

    /// Finest mesh level.
    pub fn finest_h(&self) -> f64 {
        self.sweep.h_levels.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[geometry]
kind = "disks"
outer_radius = 20.0

[material]
lambda = 1.0
mu = 1.0

[sweep]
preset = "rigid-2"
eps = [0.08, 0.04, 0.02]
"#;

    #[test]
    fn parses_with_defaults() {
        let c = SweepConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(c.sweep.preset, Preset::Rigid(2));
        assert_eq!(c.sweep.h_levels, vec![0.2]);
        assert_eq!(c.geometry.r, 1.0);
        assert_eq!(c.output.dir, PathBuf::from("results"));
        let back = SweepConfig::from_toml_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn rejects_bad_ladders() {
        for eps in ["[0.08, 0.04]", "[0.04, 0.08, 0.02]", "[0.6, 0.3, 0.1]"] {
            let s = SAMPLE.replace("[0.08, 0.04, 0.02]", eps);
            assert!(SweepConfig::from_toml_str(&s).is_err(), "{eps}");
        }
        assert!(SweepConfig::from_toml_str(&SAMPLE.replace("rigid-2", "rigid-4")).is_err());
    }

    #[test]
    fn ladder_halves() {
        assert_eq!(halving_ladder(0.08, 4), vec![0.08, 0.04, 0.02, 0.01]);
    }
}

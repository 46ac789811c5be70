//! Scenario files.
//!
//! A scenario is a TOML document with four blocks:
//!
//! ```toml
//! [problem]
//! dim = 3
//! nodes = 200
//! p = 2.0
//! amplitude = 47.25
//! weight = { kind = "constant", c = 1.0 }
//! profile = { name = "parabolic" }
//!
//! [solver]          # every key optional
//! T_max = 1.0
//!
//! [constants]       # every key optional
//! gn_safety = 10.0
//!
//! [outputs]         # every key optional
//! dir = "out"
//! plot = true
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use blowup_core::problem::validate_spec;
use blowup_core::variational::{ConstantsOptions, GnOptions, SobolevOptions};
use blowup_core::{ProblemSpec, Profile, RadialGrid, SolverConfig, WeightSchedule};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub problem: ProblemBlock,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub constants: ConstantsBlock,
    #[serde(default)]
    pub outputs: OutputsBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub dim: u32,
    #[serde(default = "unit")]
    pub radius: f64,
    pub nodes: usize,
    pub p: f64,
    pub weight: WeightSchedule,
    pub profile: Profile,
    pub amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsBlock {
    pub sobolev_tol: f64,
    pub sobolev_max_iter: usize,
    pub eigen_tol: f64,
    pub gn_family_size: usize,
    pub gn_safety: f64,
    /// Seed of every randomized component; `--seed` overrides it.
    pub seed: u64,
    /// Relative slack allowed above an upper bound before a verdict fails.
    pub tol_upper: f64,
}

impl Default for ConstantsBlock {
    fn default() -> Self {
        let s = SobolevOptions::default();
        let g = GnOptions::default();
        Self {
            sobolev_tol: s.tol,
            sobolev_max_iter: s.max_iter,
            eigen_tol: 1e-12,
            gn_family_size: g.family_size,
            gn_safety: g.safety,
            seed: 0,
            tol_upper: 0.1,
        }
    }
}

impl ConstantsBlock {
    pub fn options(&self) -> ConstantsOptions {
        ConstantsOptions {
            sobolev: SobolevOptions {
                tol: self.sobolev_tol,
                max_iter: self.sobolev_max_iter,
                seed: self.seed,
                ..SobolevOptions::default()
            },
            eigen_tol: self.eigen_tol,
            gn: GnOptions { family_size: self.gn_family_size, seed: self.seed, safety: self.gn_safety },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsBlock {
    pub dir: PathBuf,
    /// File stem shared by every artifact of the scenario.
    pub prefix: String,
    pub csv: bool,
    pub json: bool,
    pub plot: bool,
}

impl Default for OutputsBlock {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), prefix: "scenario".into(), csv: true, json: true, plot: false }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid scenario {}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Command-line overrides. `None` leaves the file's value.
    pub fn apply_overrides(&mut self, out_dir: Option<&Path>, seed: Option<u64>, plot: bool) {
        if let Some(dir) = out_dir {
            self.outputs.dir = dir.to_path_buf();
        }
        if let Some(seed) = seed {
            self.constants.seed = seed;
        }
        self.outputs.plot |= plot;
    }

    pub fn grid(&self) -> anyhow::Result<RadialGrid> {
        let p = &self.problem;
        Ok(RadialGrid::new(p.dim, p.radius, p.nodes)?)
    }

    /// Builds and validates the problem. Every failure here is a
    /// configuration error.
    pub fn spec(&self) -> anyhow::Result<ProblemSpec> {
        let grid = self.grid()?;
        let p = &self.problem;
        let u0 = p.profile.sample(&grid, p.amplitude)?;
        let spec = ProblemSpec::new(grid, p.p, p.weight, u0);
        let report = validate_spec(&spec);
        if !report.is_valid() {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            bail!("{}", msgs.join("; "));
        }
        self.solver.validate()?;
        if !(self.constants.tol_upper >= 0.0) {
            bail!("tol_upper = {} must be nonnegative", self.constants.tol_upper);
        }
        Ok(spec)
    }
}

/// Creates `dir` if needed and proves it writable by creating and removing a
/// probe file.
pub fn ensure_writable(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let probe = dir.join(".blowup-write-probe");
    fs::write(&probe, b"").with_context(|| format!("output directory {} is not writable", dir.display()))?;
    fs::remove_file(&probe).ok();
    Ok(())
}

//! Experiment configuration in TOML.
//!
//! ```toml
//! seed = 7
//! mesh_h = 0.05
//! d = 0.1
//! scales = [1e-4, 1e-3, 1e-2, 1e-1]
//! checks = ["holder_stability", "lps"]
//!
//! [domain]
//! kind = "unit_disk"
//!
//! [lame.mu]
//! background = 1.0
//! inclusions = [{ center = [-0.3, 0.2], radius = 0.2, contrast = 0.5 }]
//!
//! [boundary_g]
//! kind = "affine"
//! matrix = [[1.0, 0.3], [0.3, -0.5]]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use lamestab_core::fields::{BoundaryGenerator, FourierMode, Inclusion, PhantomSpec};
use lamestab_core::geometry::{DomainKind, DomainSpec};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Check families a config can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    IntegralEstimate,
    Interpolation,
    ThreeSphere,
    Doubling,
    Lps,
    StrainLowerBound,
    HolderStability,
    Reconstruction,
}

impl CheckName {
    pub const ALL: [CheckName; 8] = [
        CheckName::IntegralEstimate,
        CheckName::Interpolation,
        CheckName::ThreeSphere,
        CheckName::Doubling,
        CheckName::Lps,
        CheckName::StrainLowerBound,
        CheckName::HolderStability,
        CheckName::Reconstruction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::IntegralEstimate => "integral_estimate",
            CheckName::Interpolation => "interpolation",
            CheckName::ThreeSphere => "three_sphere",
            CheckName::Doubling => "doubling",
            CheckName::Lps => "lps",
            CheckName::StrainLowerBound => "strain_lower_bound",
            CheckName::HolderStability => "holder_stability",
            CheckName::Reconstruction => "reconstruction",
        }
    }

    /// Needs the perturbation family `μ₁ + t · shape`.
    pub fn uses_family(self) -> bool {
        matches!(
            self,
            CheckName::IntegralEstimate | CheckName::Interpolation | CheckName::HolderStability
        )
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    UnitDisk {
        #[serde(default = "one")]
        scale: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    SmoothedSquare {
        corner_radius: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig::UnitDisk { scale: 1.0 }
    }
}

impl DomainConfig {
    pub fn spec(&self) -> DomainSpec {
        match *self {
            DomainConfig::UnitDisk { scale } => DomainSpec {
                kind: DomainKind::UnitDisk,
                scale,
            },
            DomainConfig::Ellipse { a, b, scale } => DomainSpec {
                kind: DomainKind::Ellipse { a, b },
                scale,
            },
            DomainConfig::SmoothedSquare {
                corner_radius,
                scale,
            } => DomainSpec {
                kind: DomainKind::SmoothedSquare { corner_radius },
                scale,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionConfig {
    pub center: [f64; 2],
    pub radius: f64,
    pub contrast: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhantomConfig {
    pub background: f64,
    #[serde(default)]
    pub inclusions: Vec<InclusionConfig>,
    #[serde(default = "default_width")]
    pub mollification_width: f64,
    #[serde(default)]
    pub floor: Option<f64>,
}

fn default_width() -> f64 {
    0.15
}

impl PhantomConfig {
    pub fn constant(background: f64) -> Self {
        PhantomConfig {
            background,
            inclusions: Vec::new(),
            mollification_width: default_width(),
            floor: None,
        }
    }

    pub fn spec(&self) -> PhantomSpec {
        PhantomSpec {
            background: self.background,
            inclusions: self
                .inclusions
                .iter()
                .map(|i| Inclusion {
                    center: i.center,
                    radius: i.radius,
                    contrast: i.contrast,
                })
                .collect(),
            mollification_width: self.mollification_width,
            floor: self.floor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LameConfig {
    #[serde(default = "default_lambda")]
    pub lambda: PhantomConfig,
    #[serde(default = "default_mu")]
    pub mu: PhantomConfig,
    /// Perturbation shape for the family `μ₂ = μ₁ + t · shape`.
    #[serde(default = "default_shape")]
    pub shape: PhantomConfig,
    #[serde(default = "half")]
    pub alpha0: f64,
    #[serde(default = "half")]
    pub beta0: f64,
    #[serde(default = "default_m")]
    pub m_bound: f64,
    /// Polynomial degree of the sampled coefficients.
    #[serde(default = "default_degree")]
    pub degree: u8,
}

fn default_lambda() -> PhantomConfig {
    PhantomConfig::constant(1.0)
}

fn default_mu() -> PhantomConfig {
    PhantomConfig::constant(1.0)
}

fn default_shape() -> PhantomConfig {
    PhantomConfig {
        background: 0.0,
        inclusions: vec![InclusionConfig {
            center: [0.2, -0.1],
            radius: 0.15,
            contrast: 1.0,
        }],
        mollification_width: default_width(),
        floor: None,
    }
}

fn half() -> f64 {
    0.5
}

fn default_m() -> f64 {
    20.0
}

fn default_degree() -> u8 {
    1
}

impl Default for LameConfig {
    fn default() -> Self {
        LameConfig {
            lambda: default_lambda(),
            mu: default_mu(),
            shape: default_shape(),
            alpha0: half(),
            beta0: half(),
            m_bound: default_m(),
            degree: default_degree(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub component: usize,
    pub k: u32,
    #[serde(default)]
    pub amp_cos: f64,
    #[serde(default)]
    pub amp_sin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Affine {
        matrix: [[f64; 2]; 2],
        #[serde(default)]
        offset: [f64; 2],
    },
    FourierModes {
        modes: Vec<ModeConfig>,
    },
    Rigid {
        #[serde(default)]
        a: [f64; 2],
        #[serde(default)]
        w: f64,
    },
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig::Affine {
            matrix: [[1.0, 0.3], [0.3, -0.5]],
            offset: [0.0, 0.0],
        }
    }
}

impl BoundaryConfig {
    pub fn generator(&self) -> BoundaryGenerator {
        match self {
            BoundaryConfig::Affine { matrix, offset } => BoundaryGenerator::Affine {
                matrix: *matrix,
                offset: *offset,
            },
            BoundaryConfig::FourierModes { modes } => BoundaryGenerator::FourierModes(
                modes
                    .iter()
                    .map(|m| FourierMode {
                        component: m.component,
                        k: m.k,
                        amp_cos: m.amp_cos,
                        amp_sin: m.amp_sin,
                    })
                    .collect(),
            ),
            BoundaryConfig::Rigid { a, w } => BoundaryGenerator::Rigid { a: *a, w: *w },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThreeSphereConfig {
    pub radii: [f64; 3],
    /// Random centers drawn uniformly from `Ω_{r₃ + d}`.
    pub centers: usize,
    pub relax: f64,
    pub window: [f64; 2],
}

impl Default for ThreeSphereConfig {
    fn default() -> Self {
        ThreeSphereConfig {
            radii: [0.05, 0.1, 0.2],
            centers: 20,
            relax: 1.5,
            window: [0.05, 0.95],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoublingConfig {
    pub radii: Vec<f64>,
    pub center: [f64; 2],
    pub margin: f64,
}

impl Default for DoublingConfig {
    fn default() -> Self {
        DoublingConfig {
            radii: vec![0.02, 0.04, 0.06, 0.08, 0.1],
            center: [-0.2, 0.1],
            margin: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LpsConfig {
    pub rho: f64,
    /// Wave numbers `k` of the trend family `g_k = (cos kθ, 0)`.
    pub frequencies: Vec<u32>,
    /// Allowed increases of `C_ρ` along the trend family.
    pub max_inversions: usize,
}

impl Default for LpsConfig {
    fn default() -> Self {
        LpsConfig {
            rho: 0.1,
            frequencies: vec![1, 2, 3, 4],
            max_inversions: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrainBoundConfig {
    /// Radii as fractions of `d`.
    pub radius_fractions: Vec<f64>,
    /// Defaults to the peak of `|shape|` in `Ω_d`.
    pub x0: Option<[f64; 2]>,
}

impl Default for StrainBoundConfig {
    fn default() -> Self {
        StrainBoundConfig {
            radius_fractions: vec![0.125, 0.25, 0.375, 0.5, 0.75, 1.0],
            x0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructionConfig {
    pub noise_levels: Vec<f64>,
    /// Defaults to `10⁻⁶ ·` mean strain energy density.
    pub reg_weight: Option<f64>,
    /// Sample `μ_true` at the P2 nodes so the P1 unknown cannot represent
    /// it exactly.
    pub truth_degree: u8,
    pub max_inversions: usize,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            noise_levels: vec![0.0, 1e-6, 1e-5, 1e-4, 1e-3],
            reg_weight: None,
            truth_degree: 2,
            max_inversions: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub domain: DomainConfig,
    pub mesh_h: f64,
    #[serde(default)]
    pub lame: LameConfig,
    #[serde(default)]
    pub boundary_g: BoundaryConfig,
    #[serde(default = "default_d")]
    pub d: f64,
    #[serde(default)]
    pub scales: Vec<f64>,
    #[serde(default)]
    pub checks: Vec<CheckName>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub three_sphere: ThreeSphereConfig,
    #[serde(default)]
    pub doubling: DoublingConfig,
    #[serde(default)]
    pub lps: LpsConfig,
    #[serde(default)]
    pub strain_lower_bound: StrainBoundConfig,
    #[serde(default)]
    pub reconstruction: ReconstructionConfig,
}

fn default_d() -> f64 {
    0.1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    pub fn wants(&self, check: CheckName) -> bool {
        self.checks.contains(&check)
    }

    pub fn wants_family(&self) -> bool {
        self.checks.iter().any(|c| c.uses_family())
    }

    /// Static checks that need no mesh.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if !(self.mesh_h > 0.0) {
            return bad(format!("mesh_h must be positive, got {}", self.mesh_h));
        }
        if !(self.d > 0.0) {
            return bad(format!("d must be positive, got {}", self.d));
        }
        if self.wants_family() {
            let nonzero: Vec<f64> = self
                .scales
                .iter()
                .copied()
                .filter(|t| *t != 0.0)
                .map(f64::abs)
                .collect();
            if nonzero.len() < 2 {
                return bad(
                    "scales must hold at least two nonzero values for the perturbation family"
                        .into(),
                );
            }
            if self.scales.iter().any(|t| !t.is_finite()) {
                return bad("scales must be finite".into());
            }
        }
        if ![1, 2].contains(&self.lame.degree)
            || ![1, 2].contains(&self.reconstruction.truth_degree)
        {
            return bad("coefficient degrees must be 1 or 2".into());
        }
        if self.wants(CheckName::Reconstruction) {
            let l = &self.reconstruction.noise_levels;
            if l.first() != Some(&0.0) || l.windows(2).any(|w| !(w[0] <= w[1])) {
                return bad(format!(
                    "reconstruction.noise_levels must be ascending and start at 0, got {l:?}"
                ));
            }
        }
        let r = self.three_sphere.radii;
        if !(0.0 < r[0] && r[0] < r[1] && r[1] < r[2]) {
            return bad(format!("three_sphere.radii must increase, got {r:?}"));
        }
        if self.lps.rho <= 0.0 {
            return bad("lps.rho must be positive".into());
        }
        let mut seen = self.checks.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.checks.len() {
            return bad("checks lists a name twice".into());
        }
        Ok(())
    }
}

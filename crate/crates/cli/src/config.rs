//! Run configuration: named families, grids and corpora plus an ordered
//! check list.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use wfs::funcspace::{CorpusKind, GridDescriptor};
use wfs::kernel::DecayThresholds;
use wfs::weights::{DefiningFamily, FamilySpec, IndexLabel};

/// A configuration or usage problem (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<wfs::Error> for ConfigError {
    fn from(e: wfs::Error) -> Self {
        Self(e.to_string())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub families: BTreeMap<String, FamilySpec>,
    #[serde(default)]
    pub grids: BTreeMap<String, GridDescriptor>,
    #[serde(default)]
    pub corpora: BTreeMap<String, CorpusSpec>,
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub checks: Vec<CheckSpec>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    pub tol: f64,
    pub ball_points: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            ball_points: 16,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub kind: CorpusKind,
    pub n: usize,
    /// Real dimension, or complex dimension for `entire`.
    pub k: usize,
    pub grid: String,
    #[serde(default)]
    pub scale: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeminormForm {
    Sup,
    Lp,
    AnalyticSup,
    AnalyticLp,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    GaussianDifference { k: usize },
    GaussianProduct { kx: usize, ky: usize },
    Min,
    Expr { kx: usize, ky: usize, expr: String },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaTerm {
    pub at: Vec<f64>,
    pub c: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionalSpec {
    Delta {
        at: Vec<f64>,
    },
    Combination {
        terms: Vec<DeltaTerm>,
    },
    /// Quadrature over the y-grid.
    Quadrature,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightRef {
    pub family: String,
    pub index: IndexLabel<f64>,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn three() -> usize {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckFamilyCheck {
    #[serde(default)]
    pub name: Option<String>,
    pub family: String,
    pub grid: String,
    #[serde(default = "one")]
    pub p: f64,
    #[serde(default)]
    pub ball_points: Option<usize>,
    #[serde(default)]
    pub decay_threshold: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeminormCheck {
    #[serde(default)]
    pub name: Option<String>,
    pub family: String,
    pub corpus: String,
    pub gamma: IndexLabel<f64>,
    #[serde(default)]
    pub m: usize,
    pub form: SeminormForm,
    #[serde(default)]
    pub p: Option<f64>,
    /// Reference values, one per corpus member.
    #[serde(default)]
    pub expected: Option<Vec<f64>>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceCheck {
    #[serde(default)]
    pub name: Option<String>,
    pub family: String,
    pub corpus: String,
    pub gamma: IndexLabel<f64>,
    #[serde(default)]
    pub m: usize,
    #[serde(default = "two")]
    pub p: f64,
    /// Cauchy radius; required for entire-function corpora.
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub radius_fraction: Option<f64>,
    #[serde(default)]
    pub nodes_per_radius: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuclearityCheck {
    #[serde(default)]
    pub name: Option<String>,
    pub family: String,
    pub corpus: String,
    pub gamma: IndexLabel<f64>,
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub radius_fraction: Option<f64>,
    #[serde(default)]
    pub nodes_per_radius: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDiffCheck {
    #[serde(default)]
    pub name: Option<String>,
    pub kernel: KernelSpec,
    pub functional: FunctionalSpec,
    pub mu: Vec<usize>,
    pub x_grid: String,
    pub y_grid: String,
    #[serde(default = "three")]
    pub levels: usize,
    /// Accepted error ratio per halving.
    #[serde(default)]
    pub ratio_range: Option<[f64; 2]>,
    /// Errors at or below this count as exact.
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDecomposeCheck {
    #[serde(default)]
    pub name: Option<String>,
    pub kernel: KernelSpec,
    pub x_grid: String,
    pub y_grid: String,
    #[serde(default)]
    pub x_weight: Option<WeightRef>,
    #[serde(default)]
    pub y_weight: Option<WeightRef>,
    pub rank: usize,
    #[serde(default)]
    pub r_max: Option<usize>,
    /// Residual bound at `rank`; without it only monotonicity is checked.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub thresholds: Option<DecayThresholds>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CheckSpec {
    CheckFamily(CheckFamilyCheck),
    Seminorm(SeminormCheck),
    Equivalence(EquivalenceCheck),
    Nuclearity(NuclearityCheck),
    KernelDiff(KernelDiffCheck),
    KernelDecompose(KernelDecomposeCheck),
}

impl CheckSpec {
    pub fn type_name(&self) -> &'static str {
        match self {
            Self::CheckFamily(_) => "check-family",
            Self::Seminorm(_) => "seminorm",
            Self::Equivalence(_) => "equivalence",
            Self::Nuclearity(_) => "nuclearity",
            Self::KernelDiff(_) => "kernel-diff",
            Self::KernelDecompose(_) => "kernel-decompose",
        }
    }

    fn given_name(&self) -> Option<&str> {
        match self {
            Self::CheckFamily(c) => c.name.as_deref(),
            Self::Seminorm(c) => c.name.as_deref(),
            Self::Equivalence(c) => c.name.as_deref(),
            Self::Nuclearity(c) => c.name.as_deref(),
            Self::KernelDiff(c) => c.name.as_deref(),
            Self::KernelDecompose(c) => c.name.as_deref(),
        }
    }

    /// Name from the config, or `<type>-<position>`.
    pub fn name(&self, position: usize) -> String {
        self.given_name()
            .map_or_else(|| format!("{}-{position}", self.type_name()), str::to_owned)
    }

    fn tolerances(&self) -> Vec<Option<f64>> {
        match self {
            Self::CheckFamily(c) => vec![c.tol, c.decay_threshold],
            Self::Seminorm(c) => vec![c.tol],
            Self::Equivalence(c) => vec![c.tol, c.radius_fraction, c.r],
            Self::Nuclearity(c) => vec![c.tol, c.radius_fraction],
            Self::KernelDiff(c) => vec![c.tol],
            Self::KernelDecompose(c) => vec![c.tol],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("malformed config {}: {e}", path.display())))
    }

    pub fn families(&self) -> Result<BTreeMap<String, DefiningFamily<f64>>, ConfigError> {
        self.families
            .iter()
            .map(|(name, spec)| {
                spec.build()
                    .map(|f| (name.clone(), f))
                    .map_err(|e| ConfigError(format!("family '{name}': {e}")))
            })
            .collect()
    }

    /// Static validation: references resolve, indices exist, tolerances are
    /// positive.
    pub fn validate(
        &self,
        families: &BTreeMap<String, DefiningFamily<f64>>,
    ) -> Result<(), ConfigError> {
        if !(self.defaults.tol > 0.0) {
            return Err(ConfigError("defaults.tol must be positive".into()));
        }
        for (name, c) in &self.corpora {
            if !self.grids.contains_key(&c.grid) {
                return Err(ConfigError(format!(
                    "corpus '{name}': unknown grid '{}'",
                    c.grid
                )));
            }
        }
        for (i, check) in self.checks.iter().enumerate() {
            let name = check.name(i);
            let err = |msg: String| ConfigError(format!("check '{name}': {msg}"));
            if check.tolerances().iter().flatten().any(|t| !(*t > 0.0)) {
                return Err(err("tolerances and radii must be positive".into()));
            }
            let family = |f: &str| {
                families
                    .get(f)
                    .ok_or_else(|| err(format!("unknown family '{f}'")))
            };
            let index = |f: &str, g: &IndexLabel<f64>| -> Result<(), ConfigError> {
                let fam = family(f)?;
                fam.member(g).map(|_| ()).map_err(|_| {
                    let listed: Vec<String> =
                        fam.indices().iter().map(ToString::to_string).collect();
                    err(format!(
                        "index {g} not in family '{f}' (indices {})",
                        listed.join(", ")
                    ))
                })
            };
            let grid = |g: &str| {
                if self.grids.contains_key(g) {
                    Ok(())
                } else {
                    Err(err(format!("unknown grid '{g}'")))
                }
            };
            let corpus = |c: &str| {
                if self.corpora.contains_key(c) {
                    Ok(())
                } else {
                    Err(err(format!("unknown corpus '{c}'")))
                }
            };
            match check {
                CheckSpec::CheckFamily(c) => {
                    family(&c.family)?;
                    grid(&c.grid)?;
                }
                CheckSpec::Seminorm(c) => {
                    index(&c.family, &c.gamma)?;
                    corpus(&c.corpus)?;
                    if matches!(c.form, SeminormForm::Lp | SeminormForm::AnalyticLp)
                        && c.p.is_none()
                    {
                        return Err(err("L^p forms need `p`".into()));
                    }
                }
                CheckSpec::Equivalence(c) => {
                    index(&c.family, &c.gamma)?;
                    corpus(&c.corpus)?;
                }
                CheckSpec::Nuclearity(c) => {
                    index(&c.family, &c.gamma)?;
                    corpus(&c.corpus)?;
                }
                CheckSpec::KernelDiff(c) => {
                    grid(&c.x_grid)?;
                    grid(&c.y_grid)?;
                    if c.levels < 2 {
                        return Err(err("kernel-diff needs at least 2 levels".into()));
                    }
                }
                CheckSpec::KernelDecompose(c) => {
                    grid(&c.x_grid)?;
                    grid(&c.y_grid)?;
                    for w in [&c.x_weight, &c.y_weight].into_iter().flatten() {
                        index(&w.family, &w.index)?;
                    }
                    if c.rank == 0 {
                        return Err(err("rank must be at least 1".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

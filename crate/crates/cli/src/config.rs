use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use roughform::funcrep::FunctionSpec;
use roughform::geometry::DomainSpec;
use roughform::{FunctionRep, Rectangle};
use serde::{Deserialize, Serialize};

/// Integrand file: `{"f": …, "g": [ … ], "rect": {"lo": […], "hi": […]}}`.
///
/// The dimension is the number of `g` components; `rect` defaults to the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub f: FunctionSpec,
    pub g: Vec<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<RectSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

pub struct Form {
    pub f: FunctionRep,
    pub g: Vec<FunctionRep>,
    pub rect: Rectangle,
}

impl FormSpec {
    pub fn build(&self) -> roughform::Result<Form> {
        let d = self.g.len();
        if d == 0 {
            return Err(roughform::Error::invalid("\"g\" must have at least one component"));
        }
        let f = self.f.build(d)?;
        let g = self.g.iter().map(|s| s.build(d)).collect::<roughform::Result<Vec<_>>>()?;
        let rect = match &self.rect {
            Some(r) => Rectangle::new(r.lo.clone(), r.hi.clone())?,
            None => Rectangle::unit(d),
        };
        if rect.dim() != d {
            return Err(roughform::Error::DimensionMismatch { expected: d, got: rect.dim() });
        }
        Ok(Form { f, g, rect })
    }
}

/// Inclusive level window `j_min:j_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Levels {
    pub min: u32,
    pub max: u32,
}

impl std::str::FromStr for Levels {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected j_min:j_max, got {s:?}"))?;
        let min: u32 = a.trim().parse().map_err(|e| format!("j_min: {e}"))?;
        let max: u32 = b.trim().parse().map_err(|e| format!("j_max: {e}"))?;
        if min > max {
            return Err(format!("j_min {min} exceeds j_max {max}"));
        }
        Ok(Levels { min, max })
    }
}

/// Everything a run depends on, echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<FormSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub levels: Levels,
    pub basis_order: u32,
    pub tol: f64,
    pub max_level: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub sequential: bool,
}

/// Marks errors that come from reading or parsing inputs.
#[derive(Debug)]
pub struct BadInput(pub String);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for BadInput {}

fn resolve(p: &Path) -> Result<PathBuf> {
    std::fs::canonicalize(p).map_err(|e| BadInput(format!("{}: {e}", p.display())).into())
}

fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T> {
    let text = std::fs::read_to_string(p).map_err(|e| BadInput(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| BadInput(format!("{}: {e}", p.display())).into())
}

pub fn load_spec(p: &Path) -> Result<(PathBuf, FormSpec)> {
    let path = resolve(p)?;
    let spec = read_json(&path)?;
    Ok((path, spec))
}

pub fn load_domain(p: &Path) -> Result<(PathBuf, DomainSpec)> {
    let path = resolve(p)?;
    let mut spec: DomainSpec = read_json(&path)?;
    if let Some(dir) = path.parent() {
        spec.resolve_paths(dir);
    }
    Ok((path, spec))
}

pub fn prepare_out(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    resolve(dir)
}

pub fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    match v {
        Some(v) => Ok(v),
        None => bail!(BadInput(format!("{flag} is required for this command"))),
    }
}

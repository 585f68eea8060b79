//! JSON description of functions, as consumed by the command-line tool.
//!
//! Axes are numbered from 1 in JSON.

use serde::{Deserialize, Serialize};

use super::{make_f_gamma_delta, make_lacunary, make_random_schauder, mollify, FunctionRep};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Schauder {
        gamma: f64,
        #[serde(default)]
        delta: f64,
        #[serde(rename = "J")]
        j: u32,
    },
    RandomSchauder {
        gamma: f64,
        #[serde(rename = "J")]
        j: u32,
        seed: u64,
        #[serde(default = "one")]
        scale: f64,
    },
    Lacunary {
        beta: f64,
        #[serde(rename = "J")]
        j: u32,
    },
    Preset {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axis: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        power: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<Vec<f64>>,
    },
    Tensor1d {
        of: Box<FunctionSpec>,
        axis: usize,
    },
    Sum {
        of: Vec<FunctionSpec>,
    },
    Product {
        of: Vec<FunctionSpec>,
    },
    Scaled {
        factor: f64,
        of: Box<FunctionSpec>,
    },
    Mollified {
        of: Box<FunctionSpec>,
        n: u32,
    },
    Exponent {
        exponent: f64,
        of: Box<FunctionSpec>,
    },
}

fn one() -> f64 {
    1.0
}

fn zero_based(axis: Option<usize>, dim: usize) -> Result<usize> {
    let a = axis.ok_or_else(|| Error::invalid("preset needs an \"axis\""))?;
    if a == 0 || a > dim {
        return Err(Error::invalid(format!("axis {a} out of range 1..={dim}")));
    }
    Ok(a - 1)
}

impl FunctionSpec {
    /// Builds the function on `ℝ^dim`.
    pub fn build(&self, dim: usize) -> Result<FunctionRep> {
        let one_dim = |f: FunctionRep| -> Result<FunctionRep> {
            if dim != 1 {
                return Err(Error::invalid(format!(
                    "one-dimensional series used in dimension {dim}; wrap it in tensor1d"
                )));
            }
            Ok(f)
        };
        match self {
            FunctionSpec::Schauder { gamma, delta, j } => one_dim(make_f_gamma_delta(*gamma, *delta, *j)?),
            FunctionSpec::RandomSchauder { gamma, j, seed, scale } => {
                one_dim(make_random_schauder(*gamma, *j, *seed, *scale)?)
            }
            FunctionSpec::Lacunary { beta, j } => one_dim(make_lacunary(*beta, *j)?),
            FunctionSpec::Preset {
                name,
                axis,
                value,
                power,
                lo,
                hi,
            } => match name.as_str() {
                "constant" => Ok(FunctionRep::constant(
                    dim,
                    value.ok_or_else(|| Error::invalid("constant preset needs a \"value\""))?,
                )),
                "coordinate" => Ok(FunctionRep::coordinate(dim, zero_based(*axis, dim)?)),
                "monomial" => Ok(FunctionRep::monomial(
                    dim,
                    zero_based(*axis, dim)?,
                    power.ok_or_else(|| Error::invalid("monomial preset needs a \"power\""))?,
                )),
                "bump" => FunctionRep::bump(
                    lo.clone().unwrap_or_else(|| vec![0.0; dim]),
                    hi.clone().unwrap_or_else(|| vec![1.0; dim]),
                ),
                other => Err(Error::invalid(format!("unknown preset \"{other}\""))),
            },
            FunctionSpec::Tensor1d { of, axis } => FunctionRep::tensor1d(of.build(1)?, zero_based(Some(*axis), dim)?, dim),
            FunctionSpec::Sum { of } => FunctionRep::sum(of.iter().map(|s| s.build(dim)).collect::<Result<_>>()?),
            FunctionSpec::Product { of } => {
                FunctionRep::product(of.iter().map(|s| s.build(dim)).collect::<Result<_>>()?)
            }
            FunctionSpec::Scaled { factor, of } => Ok(of.build(dim)?.scaled(*factor)),
            FunctionSpec::Mollified { of, n } => mollify(&of.build(dim)?, *n),
            FunctionSpec::Exponent { exponent, of } => Ok(of.build(dim)?.with_exponent(*exponent)),
        }
    }
}

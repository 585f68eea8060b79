//! Lacunary sine series `W(x) = Σ_{m=1}^{J} 2^{−βm} sin(2π 2^m x)` on `[0,1]`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{FunctionRep, HolderData, Node};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lacunary {
    pub beta: f64,
    pub terms: u32,
}

impl Lacunary {
    /// Evaluated at `clamp(x, 0, 1)`; `W(0) = W(1) = 0`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let mut v = 0.0;
        let mut y = x;
        let mut a = 1.0;
        let q = f64::powf(2.0, -self.beta);
        for _ in 0..self.terms {
            // 2^m x mod 1 is exact
            y = (2.0 * y).fract();
            a *= q;
            v += a * (TAU * y).sin();
        }
        v
    }

    pub fn sup_bound(&self) -> f64 {
        let q = f64::powf(2.0, -self.beta);
        q * (1.0 - q.powi(self.terms as i32)) / (1.0 - q)
    }

    /// `|W(x) − W(y)| ≤ C |x − y|^β` from `|Δ sin| ≤ min(2π 2^m |h|, 2)`.
    pub fn seminorm_bound(&self) -> f64 {
        let b = self.beta;
        TAU / (f64::powf(2.0, 1.0 - b) - 1.0) * f64::powf(2.0, 1.0 - b) + 2.0 / (1.0 - f64::powf(2.0, -b))
    }
}

/// The lacunary series with `J` terms, declared `β`-Hölder.
pub fn make_lacunary(beta: f64, terms: u32) -> Result<FunctionRep> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid(format!("beta = {beta} must lie in (0,1)")));
    }
    if terms == 0 || terms > 48 {
        return Err(Error::invalid("lacunary series needs 1..=48 terms"));
    }
    let w = Lacunary { beta, terms };
    let holder = HolderData {
        exponent: beta,
        seminorm: Some(w.seminorm_bound()),
        sup: Some(w.sup_bound()),
    };
    Ok(FunctionRep::from_node(
        Node::Lacunary(w),
        1,
        holder,
        format!("lacunary[beta={beta},J={terms}]"),
    ))
}

//! Faber–Schauder hat expansions on `[0,1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FunctionRep;
use crate::error::{Error, Result};
use crate::par::Execution;

/// `Λ(x) = x` on `[0,1/2]`, `1 − x` on `[1/2,1]`, zero elsewhere.
#[inline]
pub fn hat(x: f64) -> f64 {
    if (0.0..=1.0).contains(&x) {
        x.min(1.0 - x)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LevelCoeffs {
    /// Same coefficient for every `k`.
    Uniform(f64),
    /// One coefficient per `k ∈ 0..2^j`.
    Explicit(Vec<f64>),
}

impl LevelCoeffs {
    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        match self {
            LevelCoeffs::Uniform(c) => *c,
            LevelCoeffs::Explicit(v) => v[k],
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            LevelCoeffs::Uniform(c) => c.abs(),
            LevelCoeffs::Explicit(v) => v.iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }

    fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }
}

/// `f(x) = f(0) + (f(1) − f(0)) x + Σ_{j ≤ J} Σ_k c_{j,k} Λ(2^j x − k)`.
///
/// Evaluated at `clamp(x, 0, 1)`, i.e. extended by constants outside `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchauderSeries {
    pub f0: f64,
    pub slope: f64,
    /// `levels[j]` holds the coefficients of generation `j`.
    pub levels: Vec<LevelCoeffs>,
    pub exponent: f64,
    /// Bound on the sup norm of the discarded levels.
    pub tail_bound: f64,
    pub description: String,
}

impl SchauderSeries {
    /// Highest stored generation `J_max`.
    pub fn truncation(&self) -> u32 {
        self.levels.len().saturating_sub(1) as u32
    }

    pub fn coeff(&self, j: u32, k: usize) -> f64 {
        self.levels.get(j as usize).map_or(0.0, |l| l.get(k))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let mut v = self.f0 + self.slope * x;
        let mut scale = 1.0;
        for (j, lvl) in self.levels.iter().enumerate() {
            let n = 1usize << j;
            let y = x * scale;
            let k = (y.floor() as usize).min(n - 1);
            let c = lvl.get(k);
            if c != 0.0 {
                v += c * hat(y - k as f64);
            }
            scale *= 2.0;
        }
        v
    }

    pub fn sup_bound(&self) -> f64 {
        self.f0.abs()
            + self.slope.abs()
            + self.levels.iter().map(|l| 0.5 * l.max_abs()).sum::<f64>()
            + self.tail_bound
    }

    pub(crate) fn is_zero_oscillation(&self) -> bool {
        self.slope == 0.0 && self.tail_bound == 0.0 && self.levels.iter().all(LevelCoeffs::is_zero)
    }
}

/// `Σ_{j > J} 2^{−γ j} j^δ / 2`, summed until the terms are negligible.
fn power_tail(gamma: f64, delta: f64, jmax: u32) -> f64 {
    let mut s = 0.0;
    for j in jmax + 1..jmax + 2000 {
        let t = 0.5 * f64::powf(2.0, -gamma * j as f64) * (j as f64).powf(delta);
        s += t;
        if t < 1e-18 * s {
            break;
        }
    }
    s
}

/// Partial sum `Σ_{j=1}^{J} Σ_k 2^{−γ j} j^δ Λ_{j,k}`.
pub fn make_f_gamma_delta(gamma: f64, delta: f64, j_trunc: u32) -> Result<FunctionRep> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("gamma = {gamma} must lie in (0,1)")));
    }
    if j_trunc < 1 {
        return Err(Error::invalid("truncation level must be at least 1"));
    }
    let mut levels = vec![LevelCoeffs::Uniform(0.0)];
    for j in 1..=j_trunc {
        let jf = j as f64;
        levels.push(LevelCoeffs::Uniform(f64::powf(2.0, -gamma * jf) * jf.powf(delta)));
    }
    Ok(FunctionRep::schauder(SchauderSeries {
        f0: 0.0,
        slope: 0.0,
        levels,
        exponent: gamma,
        tail_bound: power_tail(gamma, delta, j_trunc),
        description: format!("f[gamma={gamma},delta={delta},J={j_trunc}]"),
    }))
}

/// `g_β = f_{2−β, −2}`, for `β ∈ (1,2)`.
pub fn make_g_beta(beta: f64, j_trunc: u32) -> Result<FunctionRep> {
    if !(beta > 1.0 && beta < 2.0) {
        return Err(Error::invalid(format!("beta = {beta} must lie in (1,2)")));
    }
    make_f_gamma_delta(2.0 - beta, -2.0, j_trunc)
}

/// Series with `c_{j,k} = scale · 2^{−γ j} · u_{j,k}`, `u` uniform on
/// `[−1,1]` from a seeded ChaCha stream; `f(0) = f(1) = 0`.
pub fn make_random_schauder(gamma: f64, j_trunc: u32, seed: u64, scale: f64) -> Result<FunctionRep> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma = {gamma} must lie in (0,1]")));
    }
    if j_trunc > 24 {
        return Err(Error::invalid("random Schauder truncation above 24 is not supported"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = (0..=j_trunc)
        .map(|j| {
            let w = scale * f64::powf(2.0, -gamma * j as f64);
            LevelCoeffs::Explicit((0..1usize << j).map(|_| w * rng.gen_range(-1.0..=1.0)).collect())
        })
        .collect();
    Ok(FunctionRep::schauder(SchauderSeries {
        f0: 0.0,
        slope: 0.0,
        levels,
        exponent: gamma,
        tail_bound: scale.abs() * power_tail(gamma, 0.0, j_trunc),
        description: format!("random_schauder[gamma={gamma},J={j_trunc},seed={seed},scale={scale}]"),
    }))
}

/// Midpoint second differences `c_{j,k} = 2f((k+½)2^{−j}) − f((k+1)2^{−j}) − f(k 2^{−j})`
/// for `j ≤ J`.
pub fn schauder_coeffs(f: &FunctionRep, j_trunc: u32) -> Result<SchauderSeries> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
    }
    if j_trunc > 24 {
        return Err(Error::invalid("Schauder truncation above 24 is not supported"));
    }
    let n = 1usize << (j_trunc + 1);
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let v = f.eval_grid(&[&xs], Execution::Parallel);
    let levels = (0..=j_trunc)
        .map(|j| {
            let step = n >> j;
            LevelCoeffs::Explicit(
                (0..1usize << j)
                    .map(|k| {
                        let i = k * step;
                        2.0 * v[i + step / 2] - v[i + step] - v[i]
                    })
                    .collect(),
            )
        })
        .collect();
    let tail_bound = match f.schauder_series() {
        Some(s) => {
            s.tail_bound
                + s.levels
                    .iter()
                    .skip(j_trunc as usize + 1)
                    .map(|l| 0.5 * l.max_abs())
                    .sum::<f64>()
        }
        None => 0.0,
    };
    Ok(SchauderSeries {
        f0: v[0],
        slope: v[n] - v[0],
        levels,
        exponent: f.declared_exponent(),
        tail_bound,
        description: format!("schauder_expansion[{};J={j_trunc}]", f.description()),
    })
}

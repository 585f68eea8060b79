//! Compactly supported Daubechies wavelets evaluated on dyadic grids.

mod coeffs;
mod field;
mod filters;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcrep::{Factor, FunctionRep};

pub use coeffs::{function_coeffs, function_coeffs_with, CoeffOptions};
pub use field::{CoefficientField, DetailKey, Entry, Normalization};
pub(crate) use coeffs::contract_axes;

pub const DEFAULT_ORDER: u32 = 4;
pub const DEFAULT_CASCADE_LEVEL: u32 = 10;

/// Filter pair and exact dyadic tables of `φ` and `ψ` on `[0, N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletBasis {
    order: u32,
    level: u32,
    h: Vec<f64>,
    g: Vec<f64>,
    /// `phi[i] = φ(i / 2^level)`, `i = 0..=N·2^level`.
    phi: Vec<f64>,
    psi: Vec<f64>,
    phi_bounds: (f64, f64),
    psi_bounds: (f64, f64),
}

/// Builds the order-`p` Daubechies basis (`p` vanishing moments, support
/// length `N = 2p − 1`) with tables at generation `cascade_level`.
///
/// Order 1 is the Haar system.
pub fn build_basis(order: u32, cascade_level: u32) -> Result<WaveletBasis> {
    let h = filters::lowpass(order).ok_or(Error::UnsupportedOrder(order))?.to_vec();
    if !(6..=20).contains(&cascade_level) {
        return Err(Error::invalid(format!("cascade level {cascade_level} outside 6..=20")));
    }
    let n = h.len() - 1;
    let g: Vec<f64> = (0..=n)
        .map(|k| if k % 2 == 0 { h[n - k] } else { -h[n - k] })
        .collect();
    let s2 = std::f64::consts::SQRT_2;

    // values at the integers: eigenvector of (√2 h_{2m−l}) for eigenvalue 1
    let mut phi: Vec<f64> = if n == 1 {
        vec![1.0, 0.0]
    } else {
        let m = n + 1;
        let mut a = DMatrix::<f64>::zeros(m, m);
        for r in 0..m {
            for c in 0..m {
                let idx = 2 * r as i64 - c as i64;
                if (0..=n as i64).contains(&idx) {
                    a[(r, c)] = s2 * h[idx as usize];
                }
            }
            a[(r, r)] -= 1.0;
        }
        // replace the last (redundant) equation by Σ φ(m) = 1
        for c in 0..m {
            a[(m - 1, c)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(m);
        rhs[m - 1] = 1.0;
        let v = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::invalid("singular refinement system"))?;
        v.iter().copied().collect()
    };
    phi[0] = if n == 1 { 1.0 } else { 0.0 };
    phi[n] = 0.0;

    // exact refinement φ(i/2^g) = √2 Σ h_k φ(i/2^{g−1} − k)
    for gen in 1..=cascade_level {
        let half = 1usize << (gen - 1);
        let len = n * (1usize << gen) + 1;
        let next: Vec<f64> = (0..len)
            .map(|i| {
                let mut v = 0.0;
                for (k, hk) in h.iter().enumerate() {
                    let off = k * half;
                    if i >= off && i - off < phi.len() {
                        v += hk * phi[i - off];
                    }
                }
                s2 * v
            })
            .collect();
        phi = next;
    }

    let scale = 1usize << cascade_level;
    let psi: Vec<f64> = (0..phi.len())
        .map(|i| {
            let mut v = 0.0;
            for (k, gk) in g.iter().enumerate() {
                let idx = 2 * i as i64 - (k * scale) as i64;
                if idx >= 0 && (idx as usize) < phi.len() {
                    v += gk * phi[idx as usize];
                }
            }
            s2 * v
        })
        .collect();

    let step = 1.0 / scale as f64;
    let bounds = |t: &[f64]| {
        let sup = t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let lip = t.windows(2).fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs())) / step;
        (sup, lip)
    };
    Ok(WaveletBasis {
        order,
        level: cascade_level,
        phi_bounds: bounds(&phi),
        psi_bounds: bounds(&psi),
        h,
        g,
        phi,
        psi,
    })
}

/// Tensor wavelet `ψ^{(i)}` on `ℝ^d`: bit `a` of `i` selects `ψ` (set) or
/// `φ` (clear) on axis `a`.
pub fn tensor_wavelet(basis: &Arc<WaveletBasis>, i: u32, d: usize) -> Result<FunctionRep> {
    let pattern = pattern_of(i, d)?;
    Ok(FunctionRep::wavelet(basis.clone(), pattern, 0, vec![0; d]))
}

/// Per-axis factors of pattern `i`; `i = 0` (pure scaling) is rejected.
pub fn pattern_of(i: u32, d: usize) -> Result<Vec<Factor>> {
    if i == 0 || d == 0 || d > 16 || i >= (1u32 << d) {
        return Err(Error::InvalidPattern { pattern: i, dim: d });
    }
    Ok(pattern_bits(i, d))
}

pub(crate) fn pattern_bits(i: u32, d: usize) -> Vec<Factor> {
    (0..d)
        .map(|a| if i >> a & 1 == 1 { Factor::Psi } else { Factor::Phi })
        .collect()
}

impl WaveletBasis {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn cascade_level(&self) -> u32 {
        self.level
    }

    /// Support length `N`; `φ` and `ψ` vanish outside `[0, N]`.
    pub fn support_len(&self) -> usize {
        self.h.len() - 1
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.h
    }

    pub fn highpass(&self) -> &[f64] {
        &self.g
    }

    pub fn phi_table(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi_table(&self) -> &[f64] {
        &self.psi
    }

    pub fn table(&self, f: Factor) -> &[f64] {
        match f {
            Factor::Phi => &self.phi,
            Factor::Psi => &self.psi,
        }
    }

    /// Table values at generation `gen ≤ cascade_level`.
    pub fn samples(&self, f: Factor, gen: u32) -> Vec<f64> {
        assert!(gen <= self.level);
        let stride = 1usize << (self.level - gen);
        self.table(f).iter().step_by(stride).copied().collect()
    }

    /// `(sup, Lipschitz constant)` of the tabulated factor.
    pub(crate) fn factor_bounds(&self, f: Factor) -> (f64, f64) {
        match f {
            Factor::Phi => self.phi_bounds,
            Factor::Psi => self.psi_bounds,
        }
    }

    #[inline]
    fn lookup(&self, table: &[f64], t: f64) -> f64 {
        let n = self.support_len() as f64;
        if !(0.0..=n).contains(&t) {
            return 0.0;
        }
        let s = t * f64::powi(2.0, self.level as i32);
        let i = s.floor();
        let fr = s - i;
        let i = i as usize;
        if fr == 0.0 || i + 1 >= table.len() {
            table[i.min(table.len() - 1)]
        } else {
            table[i] + fr * (table[i + 1] - table[i])
        }
    }

    /// `φ(t)`, exact at dyadics of generation ≤ cascade level, linear in between.
    #[inline]
    pub fn phi(&self, t: f64) -> f64 {
        self.lookup(&self.phi, t)
    }

    #[inline]
    pub fn psi(&self, t: f64) -> f64 {
        self.lookup(&self.psi, t)
    }
}

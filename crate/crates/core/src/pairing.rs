//! Duality pairing `⟨T, h⟩` of two coefficient fields and integration of
//! `f dg` over grid domains.

use serde::{Deserialize, Serialize};

use crate::distribution::{holder_constant, regularity_fit, DistributionRep};
use crate::error::{Error, Result};
use crate::geometry::{besov_criterion, indicator_coeffs, DomainSpec, GridDomain, Verdict, DEFAULT_SUBSAMPLES, INDICATOR_MARGIN};
use crate::par::{self, Execution};
use crate::wavelets::CoefficientField;

/// One block of the Parseval sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelTerm {
    /// `None` for the scaling block.
    pub j: Option<u32>,
    pub value: f64,
    /// `ℓ¹` mass of the second field on this block.
    pub h_l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: f64,
    #[serde(rename = "J")]
    pub j: u32,
    /// Extrapolated size of the neglected levels `j > J` (heuristic).
    pub tail_estimate: f64,
    /// `Σ |c(h)| · err(c(T))` with the error surrogates stored in `T`.
    pub sewing_error: f64,
    pub per_level: Vec<LevelTerm>,
    pub warnings: Vec<String>,
}

impl PairingResult {
    pub fn error_bound(&self) -> f64 {
        self.tail_estimate + self.sewing_error
    }
}

/// `Σ_k c_k(T) c_k(h) + Σ_{j ≤ J} Σ_{i,k} 2^{−dj} c_{ijk}(T) c_{ijk}(h)`.
pub fn pair(t: &CoefficientField, h: &CoefficientField, j_max: u32) -> Result<PairingResult> {
    pair_with(t, h, j_max, Execution::Parallel)
}

pub fn pair_with(t: &CoefficientField, h: &CoefficientField, j_max: u32, exec: Execution) -> Result<PairingResult> {
    t.check_compatible(h)?;
    let mut warnings = Vec::new();
    if h.is_empty() {
        return Ok(PairingResult {
            value: 0.0,
            j: j_max,
            tail_estimate: 0.0,
            sewing_error: 0.0,
            per_level: Vec::new(),
            warnings,
        });
    }
    for f in [h, t] {
        if !f.populated_to.is_some_and(|p| p >= j_max) {
            return Err(Error::NotPopulated(j_max));
        }
    }
    if !t.complete || !h.complete {
        warnings.push("a coefficient field is incomplete".into());
    }
    let d = t.d as i32;
    // block 0 is the scaling block, block j + 1 is level j
    let blocks = par::map_range(exec, j_max as usize + 2, |b| {
        let (mut v, mut e, mut l1) = (0.0, 0.0, 0.0);
        if b == 0 {
            for (k, c) in &h.scaling {
                if let Some(ct) = t.scaling.get(k) {
                    v += ct.value * c.value;
                    e += ct.error * c.value.abs();
                }
                l1 += c.value.abs();
            }
        } else {
            let j = b as u32 - 1;
            let w = f64::powi(2.0, -d * j as i32);
            for (key, c) in h.level(j) {
                if let Some(ct) = t.detail.get(key) {
                    v += w * ct.value * c.value;
                    e += w * ct.error * c.value.abs();
                }
                l1 += c.value.abs();
            }
        }
        (v, e, l1)
    });
    let mut value = 0.0;
    let mut sewing_error = 0.0;
    let mut per_level = Vec::with_capacity(blocks.len());
    for (b, &(v, e, l1)) in blocks.iter().enumerate() {
        value += v;
        sewing_error += e;
        per_level.push(LevelTerm {
            j: if b == 0 { None } else { Some(b as u32 - 1) },
            value: v,
            h_l1: l1,
        });
    }
    let tail_estimate = tail(t, &per_level, j_max, &mut warnings);
    Ok(PairingResult {
        value,
        j: j_max,
        tail_estimate,
        sewing_error,
        per_level,
        warnings,
    })
}

/// `Ĉ Σ_{j > J} 2^{(γ̂ − d) j} L_j` with `L_j` continued geometrically from
/// the last three levels of `h`, `γ̂` fitted on the last five levels of `T`
/// and `Ĉ` the envelope constant of `T` for that exponent.
fn tail(t: &CoefficientField, per_level: &[LevelTerm], j_max: u32, warnings: &mut Vec<String>) -> f64 {
    let mass: Vec<f64> = per_level[1..].iter().map(|l| l.h_l1).collect();
    let last = mass[j_max as usize];
    if last == 0.0 {
        return 0.0;
    }
    if t.levels().is_empty() {
        return 0.0;
    }
    let lo = j_max.saturating_sub(4);
    let (gamma, c) = match regularity_fit(t, lo, j_max) {
        Ok(fit) => (fit.slope, holder_constant(t, fit.slope, lo, j_max)),
        Err(_) => {
            warnings.push("tail estimate uses a level-flat bound".into());
            (0.0, holder_constant(t, 0.0, 0, j_max))
        }
    };
    let rho = if j_max >= 2 && mass[j_max as usize - 2] > 0.0 {
        (last / mass[j_max as usize - 2]).sqrt()
    } else if j_max >= 1 && mass[j_max as usize - 1] > 0.0 {
        last / mass[j_max as usize - 1]
    } else {
        2.0
    };
    let q = f64::powf(2.0, gamma - t.d as f64) * rho;
    if q >= 1.0 {
        warnings.push(format!("tail not summable at the fitted rates (ratio {q:.3})"));
        return f64::INFINITY;
    }
    c * f64::powf(2.0, (gamma - t.d as f64) * j_max as f64) * last * q / (1.0 - q)
}

/// Options for [`integrate_over_domain`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainOptions {
    /// Grid levels beyond `J` (at least the indicator margin).
    pub grid_margin: u32,
    pub subsamples: usize,
    pub execution: Execution,
}

impl Default for DomainOptions {
    fn default() -> Self {
        DomainOptions {
            grid_margin: INDICATOR_MARGIN,
            subsamples: DEFAULT_SUBSAMPLES,
            execution: Execution::Parallel,
        }
    }
}

/// `∫_Ω f dg¹∧…∧dgᵈ` as `⟨f dg, 𝟙_Ω⟩` truncated at level `J`.
pub fn integrate_over_domain(dist: &DistributionRep, spec: &DomainSpec, j_max: u32, opts: DomainOptions) -> Result<PairingResult> {
    let (dom, bounding) = spec.build()?;
    if dom.dim() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist.dim(),
            got: dom.dim(),
        });
    }
    let level = j_max + opts.grid_margin.max(INDICATOR_MARGIN);
    let grid = GridDomain::build(&dom, &bounding, level, opts.subsamples, opts.execution)?;
    let mut warnings = Vec::new();
    let lb = grid.lebesgue_boundary();
    if !lb.is_empty() {
        let counts = lb.counts(0, level);
        match besov_criterion(&counts, dist.beta(), level) {
            Ok(r) if r.verdict == Verdict::Converging => {}
            Ok(r) => warnings.push(format!(
                "summability criterion at beta = {} is {:?} (heuristic); proceeding",
                dist.beta(),
                r.verdict
            )),
            Err(e) => warnings.push(format!("summability criterion unavailable: {e}")),
        }
    }
    let h = indicator_coeffs(&grid, dist.basis(), j_max)?;
    let t = dist.coeff_sweep(j_max, &bounding)?;
    let mut r = pair_with(&t, &h, j_max, opts.execution)?;
    warnings.extend(dist.warnings().iter().cloned());
    warnings.append(&mut r.warnings);
    r.warnings = warnings;
    Ok(r)
}

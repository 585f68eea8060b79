//! Wavelet coefficients of the distribution `f dg¹∧…∧dgᵈ`.
//!
//! A coefficient `c_{ijk} = 2^{dj} ∫_{Q_{jk}} f ψ_{ijk} dg¹∧…∧dgᵈ` is the
//! sewing limit of `Σ_P f(a_P) ψ_{ijk}(a_P) B(P)` over the cells `P` of the
//! lattice `2^{−ℓ} ℤ^d` inside the support cube `Q_{jk} = 2^{−j}[k, k+N]`.
//! Neighbouring coefficients share cells, so coefficients are computed in
//! tiles: one lattice window holds `H(P) = f(a_P) B(P)` and every coefficient
//! of the tile is a separable filter contraction of `H`. The value of a
//! coefficient does not depend on the tile it was computed in.

use std::collections::BTreeMap;
use std::sync::Arc;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::dyadic::{dyadic_step, Rectangle};
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::funcrep::{mollify, Factor, FunctionRep};
use crate::par::Execution;
use crate::sewing::{exponent_warning, germ_field, CellGrid, MAX_DIM};
use crate::wavelets::{contract_axes, CoefficientField, Entry, WaveletBasis};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionConfig {
    /// First lattice level is `j + start_offset`.
    pub start_offset: u32,
    /// Last lattice level is `j + max_offset`.
    pub max_offset: u32,
    /// A coefficient is accepted once its Cauchy gap is at most
    /// `tolerance · 2^{γ j}`.
    pub tolerance: f64,
    /// When false every coefficient is taken at `j + max_offset`.
    pub adaptive: bool,
    pub face_level_offset: u32,
    /// Target number of lattice cells per tile.
    pub tile_cells: usize,
    /// Total lattice cells a sweep may evaluate.
    pub cell_budget: u64,
    pub memo_capacity: usize,
    pub execution: Execution,
}

impl Default for DistributionConfig {
    fn default() -> Self {
        DistributionConfig {
            start_offset: 4,
            max_offset: 6,
            tolerance: 1e-3,
            adaptive: true,
            face_level_offset: 0,
            tile_cells: 1 << 20,
            cell_budget: 1 << 34,
            memo_capacity: 1 << 26,
            execution: Execution::Parallel,
        }
    }
}

impl DistributionConfig {
    pub fn validate(&self, basis: &WaveletBasis) -> Result<()> {
        if self.start_offset > self.max_offset {
            return Err(Error::invalid("start_offset exceeds max_offset"));
        }
        if self.max_offset > basis.cascade_level() {
            return Err(Error::invalid(format!(
                "max_offset {} exceeds the cascade level {}",
                self.max_offset,
                basis.cascade_level()
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        Ok(())
    }
}

/// `f dg¹∧…∧dgᵈ` with its exponents and a coefficient cache.
#[derive(Debug)]
pub struct DistributionRep {
    f: FunctionRep,
    g: Vec<FunctionRep>,
    basis: Arc<WaveletBasis>,
    config: DistributionConfig,
    alpha: f64,
    betas: Vec<f64>,
    warnings: Vec<String>,
    cache: Mutex<BTreeMap<(u32, u32, Vec<i64>), Entry>>,
}

/// Result of one tile: entries keyed by `(i, k)`, cells spent.
struct Tile {
    entries: Vec<(u32, Vec<i64>, Entry)>,
    cells: u64,
    unconverged: usize,
}

impl DistributionRep {
    pub fn new(f: FunctionRep, g: Vec<FunctionRep>, basis: Arc<WaveletBasis>, config: DistributionConfig) -> Result<Self> {
        let d = f.dim();
        if d == 0 || d > MAX_DIM {
            return Err(Error::invalid(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if g.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: g.len() });
        }
        if let Some(h) = g.iter().find(|h| h.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: h.dim() });
        }
        config.validate(&basis)?;
        let warnings = exponent_warning(&f, &g).into_iter().collect();
        Ok(DistributionRep {
            alpha: f.declared_exponent(),
            betas: g.iter().map(FunctionRep::declared_exponent).collect(),
            f,
            g,
            basis,
            config,
            warnings,
            cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn f(&self) -> &FunctionRep {
        &self.f
    }

    pub fn g(&self) -> &[FunctionRep] {
        &self.g
    }

    pub fn basis(&self) -> &Arc<WaveletBasis> {
        &self.basis
    }

    pub fn config(&self) -> &DistributionConfig {
        &self.config
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn beta(&self) -> f64 {
        self.betas.iter().sum()
    }

    /// `γ = d − β`.
    pub fn gamma(&self) -> f64 {
        self.dim() as f64 - self.beta()
    }

    /// Non-empty when `α + β ≤ d`; results then carry no convergence guarantee.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Same `f` and configuration with new `g`.
    pub fn with_g(&self, g: Vec<FunctionRep>) -> Result<Self> {
        DistributionRep::new(self.f.clone(), g, self.basis.clone(), self.config)
    }

    /// `f · ψ^{(i)}(2^j · − k)` as a product function.
    pub fn integrand(&self, i: u32, j: u32, k: &[i64]) -> Result<FunctionRep> {
        let pattern = if i == 0 && j == 0 {
            vec![Factor::Phi; self.dim()]
        } else {
            crate::wavelets::pattern_of(i, self.dim())?
        };
        let w = FunctionRep::wavelet(self.basis.clone(), pattern, j, k.to_vec());
        FunctionRep::product(vec![self.f.clone(), w])
    }

    /// Every coefficient is exactly zero.
    fn trivially_zero(&self) -> bool {
        self.g.iter().any(FunctionRep::is_constant) || (self.f.is_constant() && self.f.eval(&vec![0.0; self.dim()]) == 0.0)
    }

    /// `c_{ijk}`; `i = 0, j = 0` gives the scaling coefficient `c_k`.
    pub fn dist_coeff(&self, i: u32, j: u32, k: &[i64]) -> Result<f64> {
        Ok(self.dist_entry(i, j, k)?.value)
    }

    /// `c_{ijk}` with its Cauchy gap.
    pub fn dist_entry(&self, i: u32, j: u32, k: &[i64]) -> Result<Entry> {
        let d = self.dim();
        if k.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: k.len() });
        }
        if !(i == 0 && j == 0) {
            crate::wavelets::pattern_of(i, d)?;
        }
        if let Some(e) = self.cache.lock().get(&(i, j, k.to_vec())) {
            return Ok(*e);
        }
        if self.trivially_zero() {
            return Ok(Entry::exact(0.0));
        }
        let tile = self.tile(j, k, &vec![1; d])?;
        let mut out = Entry::exact(0.0);
        let mut cache = self.cache.lock();
        for (ii, kk, e) in tile.entries {
            if ii == i {
                out = e;
            }
            cache.entry((ii, j, kk)).or_insert(e);
        }
        Ok(out)
    }

    /// Indices `k` (per axis, inclusive) whose support cube meets `region`
    /// and the support box of `f`.
    fn k_ranges(&self, j: u32, region: &Rectangle) -> Option<Vec<(i64, i64)>> {
        let s = f64::powi(2.0, j as i32);
        let n = self.basis.support_len() as f64;
        let supp = self.f.support_box();
        let mut out = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let mut lo = (region.a[a] * s - n).ceil() as i64;
            let mut hi = (region.b[a] * s).floor() as i64;
            if let Some(b) = &supp {
                lo = lo.max((b.a[a] * s - n).ceil() as i64);
                hi = hi.min((b.b[a] * s).floor() as i64);
            }
            if lo > hi {
                return None;
            }
            out.push((lo, hi));
        }
        Some(out)
    }

    /// Coefficients per axis of a tile, sized so the deepest window stays
    /// near `tile_cells` cells.
    fn tile_side(&self) -> i64 {
        let d = self.dim() as f64;
        let n = self.basis.support_len() as i64;
        let per_axis = (self.config.tile_cells as f64).powf(1.0 / d).round() as i64;
        (per_axis / (1i64 << self.config.max_offset) - (n - 1)).max(1)
    }

    /// All coefficients `c_k` and `c_{ijk}` (`j ≤ j_max`) whose support cube meets
    /// `region`. Coefficients that vanish because the support cube misses the
    /// support box of `f` are not stored. When the cell budget runs out the
    /// field is returned with `complete = false` and `populated_to` at the last
    /// finished level.
    pub fn coeff_sweep(&self, j_max: u32, region: &Rectangle) -> Result<CoefficientField> {
        let d = self.dim();
        if region.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: region.dim() });
        }
        let mut field = CoefficientField::new(d, self.basis.order());
        if self.trivially_zero() {
            field.populated_to = Some(j_max);
            return Ok(field);
        }
        let mut spent = 0u64;
        let mut unconverged = 0usize;
        for j in 0..=j_max {
            if let Some(ranges) = self.k_ranges(j, region) {
                let side = self.tile_side();
                let tiles_per_axis: Vec<i64> = ranges.iter().map(|(lo, hi)| (hi - lo + side) / side).collect();
                let total: i64 = tiles_per_axis.iter().product();
                for t in 0..total {
                    let mut lo = vec![0i64; d];
                    let mut cnt = vec![0usize; d];
                    let mut r = t;
                    for a in (0..d).rev() {
                        let ti = r % tiles_per_axis[a];
                        r /= tiles_per_axis[a];
                        lo[a] = ranges[a].0 + ti * side;
                        cnt[a] = (ranges[a].1 - lo[a] + 1).min(side) as usize;
                    }
                    let estimate = self.tile_estimate(&cnt);
                    if spent + estimate > self.config.cell_budget {
                        log::warn!("cell budget {} exhausted at level {j}", self.config.cell_budget);
                        field.complete = false;
                        return Ok(field);
                    }
                    let tile = self.tile(j, &lo, &cnt)?;
                    spent += tile.cells;
                    unconverged += tile.unconverged;
                    let mut cache = self.cache.lock();
                    for (i, k, e) in tile.entries {
                        cache.entry((i, j, k.clone())).or_insert(e);
                        if i == 0 {
                            field.scaling.insert(k, e);
                        } else {
                            field.insert_detail(i, j, k, e);
                        }
                    }
                }
            }
            field.populated_to = Some(j);
        }
        if unconverged > 0 {
            log::warn!("{unconverged} coefficients did not reach the tolerance");
        }
        Ok(field)
    }

    /// Upper bound on the cells of a tile over all levels.
    fn tile_estimate(&self, cnt: &[usize]) -> u64 {
        let n = self.basis.support_len() as u64;
        let cfg = &self.config;
        (cfg.start_offset..=cfg.max_offset)
            .map(|e| cnt.iter().map(|&c| (c as u64 + n - 1) << e).product::<u64>())
            .sum()
    }

    /// Coefficients of the tile `k ∈ lo + [0, cnt)` at level `j`.
    fn tile(&self, j: u32, lo: &[i64], cnt: &[usize]) -> Result<Tile> {
        let d = self.dim();
        let cfg = &self.config;
        let n = self.basis.support_len() as i64;
        let total: usize = cnt.iter().product();
        let patterns: Vec<u32> = if j == 0 { (0..1u32 << d).collect() } else { (1..1u32 << d).collect() };
        let norm = f64::powi(2.0, (d as u32 * j) as i32);
        let target = cfg.tolerance * f64::powf(2.0, self.gamma() * j as f64);
        let supp = self.f.support_box();

        // per (pattern, flat k): current value, last gap, settled
        let slots = patterns.len() * total;
        let mut value = vec![0.0; slots];
        let mut gap = vec![f64::INFINITY; slots];
        let mut settled = vec![false; slots];
        let mut cells = 0u64;

        for e in cfg.start_offset..=cfg.max_offset {
            let level = j + e;
            let sfac = 1i64 << e;
            // window of cells [wl, wu) on the level lattice
            let mut wl = Vec::with_capacity(d);
            let mut wu = Vec::with_capacity(d);
            let mut empty = false;
            for a in 0..d {
                let mut l = lo[a] * sfac;
                let mut u = (lo[a] + cnt[a] as i64 - 1 + n) * sfac;
                if let Some(b) = &supp {
                    let s = f64::powi(2.0, level as i32);
                    l = l.max((b.a[a] * s).floor() as i64);
                    u = u.min((b.b[a] * s).ceil() as i64);
                }
                if l >= u {
                    empty = true;
                }
                wl.push(l);
                wu.push(u);
            }
            let fresh: Vec<f64> = if empty {
                vec![0.0; slots]
            } else {
                let step = dyadic_step(level);
                let rect = Rectangle {
                    a: wl.iter().map(|&l| l as f64 * step).collect(),
                    b: wu.iter().map(|&u| u as f64 * step).collect(),
                };
                let grid = CellGrid::lattice(&rect, level, cfg.face_level_offset)?;
                cells += grid.cell_count() as u64;
                let refs: Vec<&[f64]> = grid.axes.iter().map(Vec::as_slice).collect();
                let gvals: Vec<Vec<f64>> = self.g.iter().map(|g| g.eval_grid(&refs, cfg.execution)).collect();
                let germs = germ_field(&gvals, &grid, cfg.execution, cfg.memo_capacity)?;
                let anchors = grid.anchor_axes();
                let arefs: Vec<&[f64]> = anchors.iter().map(Vec::as_slice).collect();
                let mut h = self.f.eval_grid(&arefs, cfg.execution);
                h.iter_mut().zip(&germs).for_each(|(x, b)| *x *= b);
                let taps = (n as usize) << e;
                let phi = &self.basis.samples(Factor::Phi, e)[..taps];
                let psi = &self.basis.samples(Factor::Psi, e)[..taps];
                let shape = grid.cells_per_axis();
                let shift: Vec<usize> = (0..d).map(|a| (wl[a] - lo[a] * sfac) as usize).collect();
                let blocks = contract_axes(&h, &shape, phi, psi, sfac as usize, &shift, cnt, cfg.execution);
                let mut out = Vec::with_capacity(slots);
                for &p in &patterns {
                    out.extend(blocks[p as usize].iter().map(|v| norm * v));
                }
                out
            };
            let first = e == cfg.start_offset;
            let last = e == cfg.max_offset;
            for s in 0..slots {
                if settled[s] {
                    continue;
                }
                if !first {
                    gap[s] = (fresh[s] - value[s]).abs();
                }
                value[s] = fresh[s];
                if cfg.adaptive && !first && gap[s] <= target {
                    settled[s] = true;
                }
            }
            if last || (cfg.adaptive && settled.iter().all(|&x| x)) {
                break;
            }
        }

        let mut entries = Vec::with_capacity(slots);
        let mut unconverged = 0;
        for (pi, &p) in patterns.iter().enumerate() {
            for flat in 0..total {
                let s = pi * total + flat;
                let mut k = vec![0i64; d];
                let mut r = flat;
                for a in (0..d).rev() {
                    k[a] = lo[a] + (r % cnt[a]) as i64;
                    r /= cnt[a];
                }
                if !(gap[s] <= target) {
                    unconverged += 1;
                }
                entries.push((p, k, Entry { value: value[s], error: gap[s] }));
            }
        }
        Ok(Tile { entries, cells, unconverged })
    }
}

/// Least-squares fit of `log₂ max_{i,k} |c_{ijk}|` against `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(j, max |c_{ijk}|)` of the levels used.
    pub levels: Vec<(u32, f64)>,
    pub window: (u32, u32),
}

pub fn regularity_fit(c: &CoefficientField, j_min: u32, j_max: u32) -> Result<RegularityFit> {
    if j_min > j_max {
        return Err(Error::invalid("empty level window"));
    }
    match c.populated_to {
        Some(p) if p >= j_max => {}
        _ => return Err(Error::NotPopulated(j_max)),
    }
    let levels: Vec<(u32, f64)> = (j_min..=j_max)
        .map(|j| (j, c.level_max_abs(j)))
        .filter(|&(_, m)| m > 0.0)
        .collect();
    if levels.len() < 3 {
        return Err(Error::InsufficientLevels(format!(
            "{} non-zero levels in {j_min}..={j_max}, need 3",
            levels.len()
        )));
    }
    let xs: Vec<f64> = levels.iter().map(|&(j, _)| j as f64).collect();
    let ys: Vec<f64> = levels.iter().map(|&(_, m)| m.log2()).collect();
    let line = fit_line(&xs, &ys)?;
    Ok(RegularityFit {
        slope: line.slope,
        intercept: line.intercept,
        levels,
        window: (j_min, j_max),
    })
}

/// `max_j max_{i,k} |c_{ijk}| 2^{−γ j}` over the window.
pub fn holder_constant(c: &CoefficientField, gamma: f64, j_min: u32, j_max: u32) -> f64 {
    (j_min..=j_max)
        .map(|j| c.level_max_abs(j) * f64::powf(2.0, -gamma * j as f64))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub n: u32,
    /// `sup |c(f dg_n) − c(f dg)| · 2^{−γ' j}` over the window.
    pub distance: f64,
}

/// Weighted coefficient distances between `f dg` and `f dg_n`, `g_n` the
/// mollified `g`, over the coefficients with `j ≤ j_max` meeting `region`.
/// The weight exponent is `γ' = γ + 0.2`.
pub fn continuity_study(dist: &DistributionRep, levels: &[u32], j_max: u32, region: &Rectangle) -> Result<Vec<ContinuityRow>> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("mollification levels must be increasing"));
    }
    let gp = dist.gamma() + 0.2;
    let base = dist.coeff_sweep(j_max, region)?;
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let gn = dist.g().iter().map(|g| mollify(g, n)).collect::<Result<Vec<_>>>()?;
        let other = dist.with_g(gn)?.coeff_sweep(j_max, region)?;
        rows.push(ContinuityRow {
            n,
            distance: field_distance(&base, &other, gp),
        });
    }
    Ok(rows)
}

/// `sup |a − b| · 2^{−w j}` over the union of stored keys (scaling at `j = 0`).
pub fn field_distance(a: &CoefficientField, b: &CoefficientField, w: f64) -> f64 {
    let mut m = 0.0f64;
    for k in a.scaling.keys().chain(b.scaling.keys()) {
        m = m.max((a.scaling(k) - b.scaling(k)).abs());
    }
    for key in a.detail.keys().chain(b.detail.keys()) {
        let diff = (a.detail(key.i, key.j, &key.k) - b.detail(key.i, key.j, &key.k)).abs();
        m = m.max(diff * f64::powf(2.0, -w * key.j as f64));
    }
    m
}

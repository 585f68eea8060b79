//! Dyadic cube classification of a domain and its grid Lebesgue boundary.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::boxcount::{BoxCounts, TargetTag};
use super::Domain;
use crate::dyadic::{dyadic_step, Rectangle};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Subsamples per axis per cube.
pub const DEFAULT_SUBSAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubeClass {
    Empty,
    Full,
    Mixed,
}

/// Cubes of `2^{−level} ℤ^d` covering a bounding box, with the number of
/// interior subsample points (`s^d` per cube, at the centres of an `s`-fold
/// subdivision) that lie in the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    pub d: usize,
    pub level: u32,
    pub subsamples: usize,
    /// Index `k` of the first cube per axis.
    pub origin: Vec<i64>,
    pub shape: Vec<usize>,
    pub counts: Vec<u32>,
    /// Classification from closed-cube samples (faces included), which also
    /// sees null sets lying on cube faces.
    closed: Vec<CubeClass>,
}

impl GridDomain {
    pub fn build(dom: &Domain, bounding: &Rectangle, level: u32, subsamples: usize, exec: Execution) -> Result<Self> {
        let d = dom.dim();
        if bounding.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: bounding.dim() });
        }
        if subsamples < 4 {
            return Err(Error::invalid("at least 4 subsamples per axis are required"));
        }
        if level > 16 {
            return Err(Error::invalid("grid level above 16 is not supported"));
        }
        let s = f64::powi(2.0, level as i32);
        let origin: Vec<i64> = bounding.a.iter().map(|a| (a * s).floor() as i64).collect();
        let upper: Vec<i64> = bounding.b.iter().map(|b| (b * s).ceil() as i64).collect();
        let shape: Vec<usize> = origin.iter().zip(&upper).map(|(o, u)| (u - o).max(1) as usize).collect();
        let cubes: usize = shape.iter().product();
        let per_cube = (subsamples + 1).pow(d as u32) + subsamples.pow(d as u32);
        if (cubes as u64).saturating_mul(per_cube as u64) > 1 << 34 {
            return Err(Error::BudgetExceeded {
                what: format!("{cubes} cubes at level {level} with {subsamples} subsamples"),
                partial: None,
            });
        }
        let h = dyadic_step(level);
        let ss = subsamples;
        let results = par::map_range(exec, cubes, |flat| {
            let mut k = vec![0i64; d];
            let mut r = flat;
            for a in (0..d).rev() {
                k[a] = origin[a] + (r % shape[a]) as i64;
                r /= shape[a];
            }
            let mut x = vec![0.0; d];
            let mut inside = 0u32;
            for sub in 0..ss.pow(d as u32) {
                let mut r = sub;
                for a in (0..d).rev() {
                    x[a] = (k[a] as f64 + ((r % ss) as f64 + 0.5) / ss as f64) * h;
                    r /= ss;
                }
                inside += dom.contains(&x) as u32;
            }
            let (mut any_in, mut any_out) = (false, false);
            for sub in 0..(ss + 1).pow(d as u32) {
                let mut r = sub;
                for a in (0..d).rev() {
                    x[a] = (k[a] as f64 + (r % (ss + 1)) as f64 / ss as f64) * h;
                    r /= ss + 1;
                }
                if dom.contains(&x) {
                    any_in = true;
                } else {
                    any_out = true;
                }
                if any_in && any_out {
                    break;
                }
            }
            let closed = match (any_in, any_out) {
                (true, true) => CubeClass::Mixed,
                (true, false) => CubeClass::Full,
                _ => CubeClass::Empty,
            };
            (inside, closed)
        });
        let (counts, closed) = results.into_iter().unzip();
        Ok(GridDomain {
            d,
            level,
            subsamples,
            origin,
            shape,
            counts,
            closed,
        })
    }

    pub fn cube_count(&self) -> usize {
        self.counts.len()
    }

    fn full_count(&self) -> u32 {
        self.subsamples.pow(self.d as u32) as u32
    }

    /// Fraction of subsamples inside.
    pub fn fraction(&self, flat: usize) -> f64 {
        self.counts[flat] as f64 / self.full_count() as f64
    }

    /// Positive-measure classification: any strict fraction is mixed.
    pub fn class(&self, flat: usize) -> CubeClass {
        match self.counts[flat] {
            0 => CubeClass::Empty,
            c if c == self.full_count() => CubeClass::Full,
            _ => CubeClass::Mixed,
        }
    }

    pub fn cube_index(&self, flat: usize) -> Vec<i64> {
        let mut k = vec![0i64; self.d];
        let mut r = flat;
        for a in (0..self.d).rev() {
            k[a] = self.origin[a] + (r % self.shape[a]) as i64;
            r /= self.shape[a];
        }
        k
    }

    /// The grid with every cube replaced by its classification (full cubes
    /// saturated, empty cubes cleared, mixed cubes kept).
    pub fn regularized(&self) -> GridDomain {
        let full = self.full_count();
        let mut out = self.clone();
        for (i, c) in out.counts.iter_mut().enumerate() {
            *c = match self.class(i) {
                CubeClass::Empty => 0,
                CubeClass::Full => full,
                CubeClass::Mixed => *c,
            };
        }
        out
    }

    fn boundary_from(&self, class: impl Fn(usize) -> CubeClass + Sync) -> LebesgueBoundary {
        let d = self.d;
        let mut strides = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.shape[a + 1];
        }
        let n = self.cube_count();
        let flags = par::map_range(Execution::Parallel, n, |flat| {
            let c = class(flat);
            let want = match c {
                CubeClass::Mixed => return true,
                CubeClass::Full => CubeClass::Empty,
                CubeClass::Empty => CubeClass::Full,
            };
            let idx: Vec<usize> = (0..d).map(|a| flat / strides[a] % self.shape[a]).collect();
            for nb in 0..3usize.pow(d as u32) {
                let mut r = nb;
                let mut other = 0usize;
                let mut ok = true;
                for a in (0..d).rev() {
                    let off = (r % 3) as i64 - 1;
                    r /= 3;
                    let p = idx[a] as i64 + off;
                    if p < 0 || p >= self.shape[a] as i64 {
                        ok = false;
                        break;
                    }
                    other += p as usize * strides[a];
                }
                if ok && class(other) == want {
                    return true;
                }
            }
            false
        });
        LebesgueBoundary {
            d,
            level: self.level,
            cubes: flags
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| self.cube_index(i))
                .collect(),
        }
    }

    /// Cubes that are mixed by subsample mass, together with pure cubes
    /// touching a pure cube of the opposite class (the boundary then runs
    /// along their common closed face).
    pub fn lebesgue_boundary(&self) -> LebesgueBoundary {
        self.boundary_from(|i| self.class(i))
    }

    /// The same construction from closed-cube membership samples.
    pub fn topological_boundary(&self) -> LebesgueBoundary {
        self.boundary_from(|i| {
            if self.closed[i] == CubeClass::Mixed {
                CubeClass::Mixed
            } else {
                // mass evidence disagreeing with face samples also marks the cube
                match (self.closed[i], self.class(i)) {
                    (a, b) if a == b => a,
                    _ => CubeClass::Mixed,
                }
            }
        })
    }
}

/// A set of cubes at one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LebesgueBoundary {
    pub d: usize,
    pub level: u32,
    pub cubes: BTreeSet<Vec<i64>>,
}

impl LebesgueBoundary {
    /// Level-`j` cubes containing a boundary cube, `j ≤ level`.
    pub fn at_level(&self, j: u32) -> BTreeSet<Vec<i64>> {
        assert!(j <= self.level);
        let sh = self.level - j;
        self.cubes.iter().map(|k| k.iter().map(|&v| v >> sh).collect()).collect()
    }

    pub fn count(&self, j: u32) -> u64 {
        self.at_level(j).len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn counts(&self, j_min: u32, j_max: u32) -> BoxCounts {
        let mut out = BoxCounts::new(TargetTag::LebesgueBoundary);
        for j in j_min..=j_max.min(self.level) {
            out.insert(j, self.count(j), true);
        }
        out
    }
}

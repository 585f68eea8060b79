//! Closed dyadic box counts `N_j(A)` and the summability test for
//! `Σ 2^{−βj} N_j`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::grid::LebesgueBoundary;
use crate::dyadic::{cubes_at_level, dyadic_step, Rectangle};
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::funcrep::FunctionRep;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetTag {
    Boundary,
    LebesgueBoundary,
    Graph,
    RawSet,
}

/// Sets whose closed-cube counts can be computed.
#[derive(Debug, Clone)]
pub enum BoxTarget {
    /// Topological boundary of a box.
    RectBoundary(Rectangle),
    Point(Vec<f64>),
    /// Graph of a 1-D function over `[0,1]` (exact for Schauder series).
    Graph(FunctionRep),
    /// Euclidean sphere.
    Sphere { center: Vec<f64>, radius: f64 },
    /// A union of cubes at a finer level.
    Cubes(LebesgueBoundary),
    /// Finite sample of a set; the count is a lower bound.
    Samples(Vec<Vec<f64>>),
}

impl BoxTarget {
    pub fn tag(&self) -> TargetTag {
        match self {
            BoxTarget::RectBoundary(_) | BoxTarget::Sphere { .. } => TargetTag::Boundary,
            BoxTarget::Graph(_) => TargetTag::Graph,
            BoxTarget::Cubes(_) => TargetTag::LebesgueBoundary,
            BoxTarget::Point(_) | BoxTarget::Samples(_) => TargetTag::RawSet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCount {
    pub count: u64,
    /// False for sampled (lower-bound) counts.
    pub exact: bool,
}

/// Table `j ↦ N_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCounts {
    pub target: TargetTag,
    pub counts: BTreeMap<u32, u64>,
    pub exact: bool,
}

impl BoxCounts {
    pub fn new(target: TargetTag) -> Self {
        BoxCounts {
            target,
            counts: BTreeMap::new(),
            exact: true,
        }
    }

    pub fn insert(&mut self, j: u32, n: u64, exact: bool) {
        self.counts.insert(j, n);
        self.exact &= exact;
    }

    pub fn get(&self, j: u32) -> Option<u64> {
        self.counts.get(&j).copied()
    }

    /// Counts for `j_min ..= j_max`.
    pub fn measure(target: &BoxTarget, j_min: u32, j_max: u32) -> Self {
        let mut out = BoxCounts::new(target.tag());
        for j in j_min..=j_max {
            let c = box_count(target, j);
            out.insert(j, c.count, c.exact);
        }
        out
    }

    /// Rows `j,N_j`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["j", "N_j"])?;
        for (j, n) in &self.counts {
            wr.write_record([j.to_string(), n.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// `N_j(A)`: closed cubes `2^{−j}([0,1]^d + k)` meeting `A`.
pub fn box_count(target: &BoxTarget, j: u32) -> BoxCount {
    let exact = |count| BoxCount { count, exact: true };
    match target {
        BoxTarget::RectBoundary(r) => exact(rect_boundary_count(r, j)),
        BoxTarget::Point(p) => {
            let s = f64::powi(2.0, j as i32);
            exact(p.iter().map(|&x| if (x * s).fract() == 0.0 { 2 } else { 1 }).product())
        }
        BoxTarget::Graph(f) => graph_count(f, j),
        BoxTarget::Sphere { center, radius } => exact(sphere_count(center, *radius, j)),
        BoxTarget::Cubes(lb) => {
            if j <= lb.level {
                exact(lb.count(j))
            } else {
                // closed cubes of a finer level meeting the union of coarse cubes
                let sh = j - lb.level;
                let mut set = std::collections::BTreeSet::new();
                for k in &lb.cubes {
                    let lo: Vec<i64> = k.iter().map(|&v| (v << sh) - 1).collect();
                    let n = (1i64 << sh) + 2;
                    let total = n.pow(k.len() as u32);
                    for flat in 0..total {
                        let mut r = flat;
                        let mut c = lo.clone();
                        for a in (0..k.len()).rev() {
                            c[a] += r % n;
                            r /= n;
                        }
                        set.insert(c);
                    }
                }
                exact(set.len() as u64)
            }
        }
        BoxTarget::Samples(pts) => {
            let mut set = std::collections::BTreeSet::new();
            for p in pts {
                let r = Rectangle { a: p.clone(), b: p.clone() };
                for c in cubes_at_level(j, &r) {
                    set.insert(c.k);
                }
            }
            BoxCount {
                count: set.len() as u64,
                exact: false,
            }
        }
    }
}

fn rect_boundary_count(r: &Rectangle, j: u32) -> u64 {
    let s = f64::powi(2.0, j as i32);
    let mut meet = 1u64;
    let mut inner = 1u64;
    for a in 0..r.dim() {
        let lo = (r.a[a] * s - 1.0).ceil() as i64;
        let hi = (r.b[a] * s).floor() as i64;
        meet *= (hi - lo + 1).max(0) as u64;
        // closed cube inside the open box
        let ilo = (r.a[a] * s).floor() as i64 + 1;
        let ihi = (r.b[a] * s).ceil() as i64 - 2;
        inner *= (ihi - ilo + 1).max(0) as u64;
    }
    meet - inner
}

fn sphere_count(center: &[f64], radius: f64, j: u32) -> u64 {
    let h = dyadic_step(j);
    let bb = Rectangle {
        a: center.iter().map(|c| c - radius).collect(),
        b: center.iter().map(|c| c + radius).collect(),
    };
    cubes_at_level(j, &bb)
        .filter(|q| {
            let (mut near, mut far) = (0.0, 0.0);
            for (a, &c) in center.iter().enumerate() {
                let lo = q.k[a] as f64 * h;
                let hi = lo + h;
                let dn = if c < lo {
                    lo - c
                } else if c > hi {
                    c - hi
                } else {
                    0.0
                };
                let df = (c - lo).abs().max((hi - c).abs());
                near += dn * dn;
                far += df * df;
            }
            near <= radius * radius && radius * radius <= far
        })
        .count() as u64
}

/// Number of `k₂` with `[k₂, k₂+1]` meeting `[lo, hi]` (scaled units).
fn rows_meeting(lo: f64, hi: f64) -> u64 {
    ((hi.floor() - (lo - 1.0).ceil()) as i64 + 1).max(0) as u64
}

fn graph_count(f: &FunctionRep, j: u32) -> BoxCount {
    let s = f64::powi(2.0, j as i32);
    // piecewise linear between nodes of generation `fine` for Schauder series
    let (fine, exact) = match f.schauder_series() {
        Some(series) => ((series.truncation() + 1).max(j), true),
        None => (j + 8, false),
    };
    let per = 1usize << (fine - j);
    let n_nodes = (1usize << fine) + 1;
    let step = dyadic_step(fine);
    let vals: Vec<f64> = (0..n_nodes).map(|i| f.eval(&[i as f64 * step])).collect();
    let cols = 1usize << j;
    let mut count = 0u64;
    for c in 0..cols {
        let seg = &vals[c * per..=(c + 1) * per];
        let lo = seg.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        count += rows_meeting(lo * s, hi * s);
    }
    // columns touching the graph only at x = 0 and x = 1
    count += rows_meeting(vals[0] * s, vals[0] * s);
    count += rows_meeting(vals[n_nodes - 1] * s, vals[n_nodes - 1] * s);
    BoxCount { count, exact }
}

/// Least-squares slope of `log N_j` against `log 2^j`.
pub fn box_dimension_estimate(counts: &BoxCounts, j_min: u32, j_max: u32) -> Result<f64> {
    let pts: Vec<(f64, f64)> = counts
        .counts
        .range(j_min..=j_max)
        .filter(|(_, &n)| n > 0)
        .map(|(&j, &n)| (j as f64, (n as f64).log2()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientLevels(format!(
            "{} levels with N_j > 0 in {j_min}..={j_max}, need 3",
            pts.len()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Ok(fit_line(&xs, &ys)?.slope)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

/// Terms `2^{−βj} N_j`, their partial sums and a heuristic verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovReport {
    pub beta: f64,
    pub terms: Vec<(u32, f64)>,
    pub partial_sums: Vec<(u32, f64)>,
    /// Ratios of consecutive terms over the last four steps.
    pub tail_ratios: Vec<f64>,
    /// `p` of the fit `terms ≈ C j^{−p}`.
    pub power: Option<f64>,
    pub verdict: Verdict,
    /// Always true: finitely many terms cannot decide a series.
    pub heuristic: bool,
}

/// Ratio threshold for geometric decay.
const RATIO_MAX: f64 = 0.95;
/// Smallest fitted power counted as summable.
const POWER_MIN: f64 = 1.1;

pub fn besov_criterion(counts: &BoxCounts, beta: f64, j_max: u32) -> Result<BesovReport> {
    if counts.get(j_max).is_none() {
        return Err(Error::NotPopulated(j_max));
    }
    let terms: Vec<(u32, f64)> = counts
        .counts
        .range(..=j_max)
        .map(|(&j, &n)| (j, f64::powf(2.0, -beta * j as f64) * n as f64))
        .collect();
    let mut acc = 0.0;
    let partial_sums = terms
        .iter()
        .map(|&(j, t)| {
            acc += t;
            (j, acc)
        })
        .collect();
    let tail: Vec<f64> = terms.iter().rev().take(5).rev().map(|p| p.1).collect();
    let tail_ratios: Vec<f64> = if tail.len() == 5 {
        tail.windows(2).map(|w| w[1] / w[0]).collect()
    } else {
        Vec::new()
    };
    let fit_pts: Vec<(f64, f64)> = terms
        .iter()
        .filter(|&&(j, t)| j >= 1 && t > 0.0)
        .map(|&(j, t)| ((j as f64).log2(), t.log2()))
        .collect();
    let power = if fit_pts.len() >= 3 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = fit_pts.into_iter().unzip();
        Some(-fit_line(&xs, &ys)?.slope)
    } else {
        None
    };
    let verdict = if tail_ratios.is_empty() {
        Verdict::Inconclusive
    } else if tail_ratios.iter().all(|&r| r <= RATIO_MAX) {
        Verdict::Converging
    } else if tail_ratios.iter().all(|&r| r < 1.0) && power.is_some_and(|p| p > POWER_MIN) {
        Verdict::Converging
    } else if tail_ratios.iter().all(|&r| r >= 1.0) {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    };
    Ok(BesovReport {
        beta,
        terms,
        partial_sums,
        tail_ratios,
        power,
        verdict,
        heuristic: true,
    })
}

//! Domains, dyadic box counts and grid Lebesgue boundaries.

mod bitmap;
mod boxcount;
mod grid;
mod indicator;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dyadic::Rectangle;
use crate::error::{Error, Result};
use crate::funcrep::{FunctionRep, FunctionSpec};

pub use bitmap::Bitmap;
pub use boxcount::{
    besov_criterion, box_count, box_dimension_estimate, BesovReport, BoxCount, BoxCounts, BoxTarget, TargetTag, Verdict,
};
pub use grid::{CubeClass, GridDomain, LebesgueBoundary, DEFAULT_SUBSAMPLES};
pub use indicator::{indicator_coeffs, indicator_coeffs_with, INDICATOR_MARGIN};

/// A bounded domain given by a membership test.
#[derive(Debug, Clone)]
pub enum Domain {
    /// Closed (or open) axis-parallel box.
    Rectangle { rect: Rectangle, open: bool },
    /// Closed Euclidean ball.
    Disk { center: Vec<f64>, radius: f64 },
    /// `{(x, y) : 0 ≤ x ≤ 1, 0 ≤ y ≤ h(x)}` for a 1-D `h`.
    Epigraph(FunctionRep),
    /// Union of the pixels set in a bitmap over `[0,1]^d`.
    Bitmap(Bitmap),
    /// `base` together with closed segments (a null set for `d ≥ 2`).
    Decorated { base: Box<Domain>, segments: Vec<(Vec<f64>, Vec<f64>)> },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Rectangle { rect, .. } => rect.dim(),
            Domain::Disk { center, .. } => center.len(),
            Domain::Epigraph(_) => 2,
            Domain::Bitmap(b) => b.d,
            Domain::Decorated { base, .. } => base.dim(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Rectangle { rect, open } => {
                if *open {
                    x.iter().enumerate().all(|(i, &v)| rect.a[i] < v && v < rect.b[i])
                } else {
                    rect.contains(x)
                }
            }
            Domain::Disk { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                r2 <= radius * radius
            }
            Domain::Epigraph(h) => (0.0..=1.0).contains(&x[0]) && x[1] >= 0.0 && x[1] <= h.eval(&x[..1]),
            Domain::Bitmap(b) => b.contains(x),
            Domain::Decorated { base, segments } => base.contains(x) || segments.iter().any(|(a, b)| on_segment(x, a, b)),
        }
    }

    /// Smallest closed box containing the domain.
    pub fn extent(&self) -> Rectangle {
        match self {
            Domain::Rectangle { rect, .. } => rect.clone(),
            Domain::Disk { center, radius } => Rectangle {
                a: center.iter().map(|c| c - radius).collect(),
                b: center.iter().map(|c| c + radius).collect(),
            },
            Domain::Epigraph(h) => {
                let (lo, hi) = epigraph_range(h);
                Rectangle {
                    a: vec![0.0, lo.min(0.0)],
                    b: vec![1.0, hi.max(0.0)],
                }
            }
            Domain::Bitmap(b) => Rectangle::unit(b.d),
            Domain::Decorated { base, segments } => {
                let mut r = base.extent();
                for (a, b) in segments {
                    let s = Rectangle {
                        a: a.iter().zip(b).map(|(x, y)| x.min(*y)).collect(),
                        b: a.iter().zip(b).map(|(x, y)| x.max(*y)).collect(),
                    };
                    r = r.hull(&s);
                }
                r
            }
        }
    }

    /// Extent fattened by an eighth of its largest side, so the boundary lies
    /// inside the box.
    pub fn default_bounding(&self) -> Rectangle {
        let e = self.extent();
        let pad = 0.125 * e.delta().max(f64::MIN_POSITIVE);
        e.fatten(pad)
    }
}

/// Range of `h` on `[0,1]`: exact node extrema for Schauder series, dense
/// sampling otherwise.
fn epigraph_range(h: &FunctionRep) -> (f64, f64) {
    let n = match h.schauder_series() {
        Some(s) => 1usize << (s.truncation() + 1).min(22),
        None => 1 << 14,
    };
    (0..=n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        let v = h.eval(&[i as f64 / n as f64]);
        (lo.min(v), hi.max(v))
    })
}

fn on_segment(x: &[f64], a: &[f64], b: &[f64]) -> bool {
    let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
    let len2: f64 = d.iter().map(|v| v * v).sum();
    let rel: Vec<f64> = x.iter().zip(a).map(|(p, q)| p - q).collect();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (rel.iter().zip(&d).map(|(p, q)| p * q).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    rel.iter().zip(&d).all(|(r, v)| (r - t * v).abs() <= 1e-12)
}

/// JSON domain description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Rectangle {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default)]
        open: bool,
        #[serde(default)]
        bounding: Option<(Vec<f64>, Vec<f64>)>,
    },
    Disk {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        bounding: Option<(Vec<f64>, Vec<f64>)>,
    },
    Epigraph {
        of: FunctionSpec,
        #[serde(default)]
        bounding: Option<(Vec<f64>, Vec<f64>)>,
    },
    /// A `DGRID` file; relative paths are resolved by the caller.
    Bitmap {
        path: PathBuf,
        #[serde(default)]
        bounding: Option<(Vec<f64>, Vec<f64>)>,
    },
    Decorated {
        base: Box<DomainSpec>,
        segments: Vec<(Vec<f64>, Vec<f64>)>,
        #[serde(default)]
        bounding: Option<(Vec<f64>, Vec<f64>)>,
    },
}

impl DomainSpec {
    /// The domain and its bounding box.
    pub fn build(&self) -> Result<(Domain, Rectangle)> {
        let (dom, bounding) = match self {
            DomainSpec::Rectangle { lo, hi, open, bounding } => (
                Domain::Rectangle {
                    rect: Rectangle::new(lo.clone(), hi.clone())?,
                    open: *open,
                },
                bounding,
            ),
            DomainSpec::Disk { center, radius, bounding } => {
                if !(*radius > 0.0) {
                    return Err(Error::invalid("disk radius must be positive"));
                }
                (
                    Domain::Disk {
                        center: center.clone(),
                        radius: *radius,
                    },
                    bounding,
                )
            }
            DomainSpec::Epigraph { of, bounding } => (Domain::Epigraph(of.build(1)?), bounding),
            DomainSpec::Bitmap { path, bounding } => (Domain::Bitmap(Bitmap::read_path(path)?), bounding),
            DomainSpec::Decorated { base, segments, bounding } => {
                let (b, bound) = base.build()?;
                let d = b.dim();
                if segments.iter().any(|(p, q)| p.len() != d || q.len() != d) {
                    return Err(Error::invalid("segment endpoints must match the domain dimension"));
                }
                let dom = Domain::Decorated {
                    base: Box::new(b),
                    segments: segments.clone(),
                };
                let bound = match bounding {
                    Some((a, b)) => Rectangle::new(a.clone(), b.clone())?,
                    None => bound.hull(&dom.default_bounding()),
                };
                return Ok((dom, bound));
            }
        };
        let bounding = match bounding {
            Some((a, b)) => Rectangle::new(a.clone(), b.clone())?,
            None => dom.default_bounding(),
        };
        if bounding.dim() != dom.dim() {
            return Err(Error::DimensionMismatch {
                expected: dom.dim(),
                got: bounding.dim(),
            });
        }
        Ok((dom, bounding))
    }

    /// Rewrites bitmap paths relative to `dir`.
    pub fn resolve_paths(&mut self, dir: &std::path::Path) {
        match self {
            DomainSpec::Bitmap { path, .. } if path.is_relative() => *path = dir.join(&*path),
            DomainSpec::Decorated { base, .. } => base.resolve_paths(dir),
            _ => {}
        }
    }
}

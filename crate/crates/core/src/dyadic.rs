//! Rectangles, dyadic cubes and oriented faces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed axis-aligned box `∏ [a_i, b_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Rectangle {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::invalid("rectangle needs at least one axis"));
        }
        for (i, (x, y)) in a.iter().zip(&b).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::invalid(format!("non-finite corner on axis {i}")));
            }
            if x > y {
                return Err(Error::invalid(format!("a_{i} = {x} exceeds b_{i} = {y}")));
            }
        }
        Ok(Rectangle { a, b })
    }

    /// `[0,1]^d`.
    pub fn unit(d: usize) -> Self {
        Rectangle {
            a: vec![0.0; d],
            b: vec![1.0; d],
        }
    }

    /// `[lo,hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Self {
        Rectangle {
            a: vec![lo; d],
            b: vec![hi; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.b[axis] - self.a[axis]
    }

    /// `δ(R) = max_i (b_i − a_i)`.
    pub fn delta(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).fold(0.0, f64::max)
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).product()
    }

    pub fn is_degenerate(&self) -> bool {
        (0..self.dim()).any(|i| self.side(i) <= 0.0)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(i, &v)| self.a[i] <= v && v <= self.b[i])
    }

    /// Closed intersection, `None` when empty.
    pub fn intersect(&self, other: &Rectangle) -> Option<Rectangle> {
        let d = self.dim();
        let mut a = Vec::with_capacity(d);
        let mut b = Vec::with_capacity(d);
        for i in 0..d {
            let lo = self.a[i].max(other.a[i]);
            let hi = self.b[i].min(other.b[i]);
            if lo > hi {
                return None;
            }
            a.push(lo);
            b.push(hi);
        }
        Some(Rectangle { a, b })
    }

    /// Smallest rectangle containing both.
    pub fn hull(&self, other: &Rectangle) -> Rectangle {
        Rectangle {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x.min(*y)).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x.max(*y)).collect(),
        }
    }

    pub fn fatten(&self, r: f64) -> Rectangle {
        Rectangle {
            a: self.a.iter().map(|x| x - r).collect(),
            b: self.b.iter().map(|x| x + r).collect(),
        }
    }

    /// Splits at the midpoint of `axis` into (lower, upper).
    pub fn split_half(&self, axis: usize) -> (Rectangle, Rectangle) {
        let m = 0.5 * (self.a[axis] + self.b[axis]);
        let mut lo = self.clone();
        let mut hi = self.clone();
        lo.b[axis] = m;
        hi.a[axis] = m;
        (lo, hi)
    }

    /// Coordinate of the `i`-th of `n` equal steps along `axis`; exact at both ends.
    pub(crate) fn grid_coord(&self, axis: usize, i: u64, n: u64) -> f64 {
        if i == n {
            self.b[axis]
        } else {
            self.a[axis] + self.side(axis) * (i as f64 / n as f64)
        }
    }

    /// Drops `axis`, keeping the remaining coordinates in order.
    pub fn without_axis(&self, axis: usize) -> Rectangle {
        let keep = |v: &Vec<f64>| {
            v.iter()
                .enumerate()
                .filter(|(i, _)| *i != axis)
                .map(|(_, x)| *x)
                .collect()
        };
        Rectangle {
            a: keep(&self.a),
            b: keep(&self.b),
        }
    }
}

/// `2^{d·depth}` congruent cells tiling `r`, row-major (axis 0 slowest).
pub fn subdivide(r: &Rectangle, depth: u32) -> Vec<Rectangle> {
    let d = r.dim();
    let n = 1u64 << depth;
    let total = (n as usize).pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0u64; d];
    for _ in 0..total {
        let a = (0..d).map(|ax| r.grid_coord(ax, idx[ax], n)).collect();
        let b = (0..d).map(|ax| r.grid_coord(ax, idx[ax] + 1, n)).collect();
        out.push(Rectangle { a, b });
        for ax in (0..d).rev() {
            idx[ax] += 1;
            if idx[ax] < n {
                break;
            }
            idx[ax] = 0;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScaleBase {
    /// Cubes of the lattice `2^{-j} ℤ^d`.
    Unit,
    /// Cubes of the dyadic subdivision of a rectangle.
    Relative(Rectangle),
}

/// Dyadic cube stored as integer indices at a level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: u32,
    pub k: Vec<i64>,
    pub base: ScaleBase,
}

impl DyadicCube {
    pub fn unit(level: u32, k: Vec<i64>) -> Self {
        DyadicCube {
            level,
            k,
            base: ScaleBase::Unit,
        }
    }

    pub fn to_rectangle(&self) -> Rectangle {
        match &self.base {
            ScaleBase::Unit => {
                let s = dyadic_step(self.level);
                Rectangle {
                    a: self.k.iter().map(|&k| k as f64 * s).collect(),
                    b: self.k.iter().map(|&k| (k + 1) as f64 * s).collect(),
                }
            }
            ScaleBase::Relative(r) => {
                let n = 1u64 << self.level;
                Rectangle {
                    a: (0..r.dim()).map(|ax| r.grid_coord(ax, self.k[ax] as u64, n)).collect(),
                    b: (0..r.dim())
                        .map(|ax| r.grid_coord(ax, self.k[ax] as u64 + 1, n))
                        .collect(),
                }
            }
        }
    }
}

/// `2^{-j}` computed exactly.
pub fn dyadic_step(j: u32) -> f64 {
    f64::powi(2.0, -(j as i32))
}

/// Integer range of lattice indices `k` with `[k,k+1]·2^{-j}` meeting `[lo,hi]`.
pub fn closed_index_range(lo: f64, hi: f64, j: u32) -> (i64, i64) {
    let s = f64::powi(2.0, j as i32);
    ((lo * s - 1.0).ceil() as i64, (hi * s).floor() as i64)
}

/// Unit-lattice cubes of side `2^{-j}` whose closed form meets `bounding`.
pub fn cubes_at_level(j: u32, bounding: &Rectangle) -> impl Iterator<Item = DyadicCube> {
    let ranges: Vec<(i64, i64)> = (0..bounding.dim())
        .map(|i| closed_index_range(bounding.a[i], bounding.b[i], j))
        .collect();
    let empty = ranges.iter().any(|(lo, hi)| lo > hi);
    let mut cur: Option<Vec<i64>> = if empty {
        None
    } else {
        Some(ranges.iter().map(|r| r.0).collect())
    };
    std::iter::from_fn(move || {
        let k = cur.take()?;
        let mut next = k.clone();
        let mut ax = next.len();
        loop {
            if ax == 0 {
                break;
            }
            ax -= 1;
            next[ax] += 1;
            if next[ax] <= ranges[ax].1 {
                cur = Some(next);
                break;
            }
            next[ax] = ranges[ax].0;
        }
        Some(DyadicCube::unit(j, k))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

/// A face of a rectangle with its Stokes orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub parent: Rectangle,
    /// Zero-based axis that is pinned.
    pub axis: usize,
    pub side: Side,
    pub sign: f64,
}

impl Face {
    /// Value of the pinned coordinate.
    pub fn pinned(&self) -> f64 {
        match self.side {
            Side::Lower => self.parent.a[self.axis],
            Side::Upper => self.parent.b[self.axis],
        }
    }

    /// The face as a `(d−1)`-rectangle in the remaining coordinates.
    pub fn rect(&self) -> Rectangle {
        self.parent.without_axis(self.axis)
    }
}

/// Orientation sign for the face pinning zero-based `axis` on `side`.
pub fn face_sign(axis: usize, side: Side) -> f64 {
    let s = if axis % 2 == 0 { 1.0 } else { -1.0 };
    match side {
        Side::Upper => s,
        Side::Lower => -s,
    }
}

/// The `2d` oriented faces, ordered by axis then (upper, lower).
pub fn faces(r: &Rectangle) -> Result<Vec<Face>> {
    if r.is_degenerate() {
        return Err(Error::DegenerateRectangle);
    }
    let mut out = Vec::with_capacity(2 * r.dim());
    for axis in 0..r.dim() {
        for side in [Side::Upper, Side::Lower] {
            out.push(Face {
                parent: r.clone(),
                axis,
                side,
                sign: face_sign(axis, side),
            });
        }
    }
    Ok(out)
}

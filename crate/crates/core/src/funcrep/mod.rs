//! Evaluable Hölder functions on `ℝ^d`.
//!
//! A [`FunctionRep`] is an immutable expression tree (cheap to clone) with a
//! declared Hölder exponent. Grid evaluation exploits tensor structure: a
//! function of one coordinate is evaluated once per node on that axis and
//! broadcast.

mod estimate;
mod lacunary;
mod mollify;
mod schauder;
mod spec;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dyadic::Rectangle;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::wavelets::WaveletBasis;

pub use estimate::{holder_seminorm_estimate, oscillation};
pub use lacunary::{make_lacunary, Lacunary};
pub use mollify::{mollify, MOLLIFIER_NODES};
pub use schauder::{hat, make_f_gamma_delta, make_g_beta, make_random_schauder, schauder_coeffs, LevelCoeffs, SchauderSeries};
pub use spec::FunctionSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Preset,
    Schauder,
    GridSample,
    Mollified,
    Composite,
}

/// Declared regularity data carried along with a function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderData {
    pub exponent: f64,
    /// Upper bound for the seminorm at `exponent`, when one is known.
    pub seminorm: Option<f64>,
    /// Upper bound for the sup norm, when one is known.
    pub sup: Option<f64>,
}

impl HolderData {
    fn lipschitz(seminorm: Option<f64>, sup: Option<f64>) -> Self {
        HolderData {
            exponent: 1.0,
            seminorm,
            sup,
        }
    }

    /// `‖fg‖_α ≤ ‖f‖_∞‖g‖_α + ‖g‖_∞‖f‖_α` with `α` the smaller exponent.
    fn product(&self, o: &HolderData) -> HolderData {
        let seminorm = match (self.sup, self.seminorm, o.sup, o.seminorm) {
            (Some(s1), Some(h1), Some(s2), Some(h2)) => Some(s1 * h2 + s2 * h1),
            _ => None,
        };
        HolderData {
            exponent: self.exponent.min(o.exponent),
            seminorm,
            sup: self.sup.zip(o.sup).map(|(a, b)| a * b),
        }
    }

    fn sum(&self, o: &HolderData) -> HolderData {
        HolderData {
            exponent: self.exponent.min(o.exponent),
            seminorm: self.seminorm.zip(o.seminorm).map(|(a, b)| a + b),
            sup: self.sup.zip(o.sup).map(|(a, b)| a + b),
        }
    }
}

/// One factor of a tensor wavelet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    Phi,
    Psi,
}

#[derive(Clone)]
pub(crate) struct WaveletFn {
    pub basis: Arc<WaveletBasis>,
    pub pattern: Vec<Factor>,
    pub j: u32,
    pub k: Vec<i64>,
}

impl WaveletFn {
    #[inline]
    fn factor(&self, axis: usize, x: f64) -> f64 {
        let t = x * f64::powi(2.0, self.j as i32) - self.k[axis] as f64;
        match self.pattern[axis] {
            Factor::Phi => self.basis.phi(t),
            Factor::Psi => self.basis.psi(t),
        }
    }
}

#[derive(Clone)]
pub(crate) struct GridSample {
    pub region: Rectangle,
    /// Nodes per axis.
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone)]
pub(crate) enum Node {
    Constant(f64),
    Coordinate(usize),
    Monomial { axis: usize, power: f64 },
    /// `∏ b((x_i − lo_i)/(hi_i − lo_i))` with `b(s) = 16 s²(1−s)²` on `[0,1]`.
    Bump { lo: Vec<f64>, hi: Vec<f64> },
    Schauder(Arc<SchauderSeries>),
    Lacunary(Lacunary),
    Tensor1d { of: FunctionRep, axis: usize },
    Sum(Vec<FunctionRep>),
    Product(Vec<FunctionRep>),
    Scaled { factor: f64, of: FunctionRep },
    Mollified { of: FunctionRep, nodes: Arc<Vec<(f64, f64)>> },
    Grid(Arc<GridSample>),
    Wavelet(WaveletFn),
    Restricted { of: FunctionRep, axis: usize, value: f64 },
}

#[derive(Clone)]
pub struct FunctionRep {
    node: Arc<Node>,
    dim: usize,
    holder: HolderData,
    description: Arc<str>,
}

impl fmt::Debug for FunctionRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionRep({}; d={}, exponent={})", self.description, self.dim, self.holder.exponent)
    }
}

impl fmt::Display for FunctionRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

fn check_dims(parts: &[FunctionRep]) -> Result<usize> {
    let d = parts
        .first()
        .ok_or_else(|| Error::invalid("empty sum/product"))?
        .dim;
    for p in parts {
        if p.dim != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim });
        }
    }
    Ok(d)
}

fn join(parts: &[FunctionRep], sep: &str) -> String {
    parts.iter().map(|p| p.description.to_string()).collect::<Vec<_>>().join(sep)
}

impl FunctionRep {
    fn from_node(node: Node, dim: usize, holder: HolderData, description: String) -> Self {
        FunctionRep {
            node: Arc::new(node),
            dim,
            holder,
            description: description.into(),
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::from_node(
            Node::Constant(value),
            dim,
            HolderData::lipschitz(Some(0.0), Some(value.abs())),
            format!("{value}"),
        )
    }

    /// `x ↦ x_axis` (zero-based axis).
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for d={dim}");
        Self::from_node(
            Node::Coordinate(axis),
            dim,
            HolderData::lipschitz(Some(1.0), None),
            format!("x{}", axis + 1),
        )
    }

    /// `(x_0, …, x_{d−1})` as a list of coordinate functions.
    pub fn identity(dim: usize) -> Vec<FunctionRep> {
        (0..dim).map(|i| Self::coordinate(dim, i)).collect()
    }

    /// `x ↦ x_axis^power`.
    pub fn monomial(dim: usize, axis: usize, power: f64) -> Self {
        assert!(axis < dim);
        let exponent = if power >= 1.0 || power == 0.0 { 1.0 } else { power };
        Self::from_node(
            Node::Monomial { axis, power },
            dim,
            HolderData {
                exponent,
                seminorm: None,
                sup: None,
            },
            format!("x{}^{}", axis + 1, power),
        )
    }

    /// Compactly supported `C¹` bump on the box `[lo, hi]`, peak value 1.
    pub fn bump(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let r = Rectangle::new(lo.clone(), hi.clone())?;
        if r.is_degenerate() {
            return Err(Error::invalid("bump support must have positive width"));
        }
        let dim = lo.len();
        // max |b'| = 32 s(1−s)(1−2s) at s = (1 − 1/√3)/2
        let lip = 32.0 / (6.0 * 3f64.sqrt());
        let min_w = (0..dim).map(|i| r.side(i)).fold(f64::INFINITY, f64::min);
        let description = format!("bump({:?},{:?})", lo, hi);
        Ok(Self::from_node(
            Node::Bump { lo, hi },
            dim,
            HolderData::lipschitz(Some(lip * dim as f64 / min_w), Some(1.0)),
            description,
        ))
    }

    pub(crate) fn schauder(series: SchauderSeries) -> Self {
        let holder = HolderData {
            exponent: series.exponent,
            seminorm: None,
            sup: Some(series.sup_bound()),
        };
        let description = series.description.clone();
        Self::from_node(Node::Schauder(Arc::new(series)), 1, holder, description)
    }

    /// Lifts a one-dimensional function to `x ↦ of(x_axis)` on `ℝ^dim`.
    pub fn tensor1d(of: FunctionRep, axis: usize, dim: usize) -> Result<Self> {
        if of.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: of.dim });
        }
        if axis >= dim {
            return Err(Error::invalid(format!("axis {} out of range for d={dim}", axis + 1)));
        }
        let description = format!("{}(x{})", of.description, axis + 1);
        let holder = of.holder;
        Ok(Self::from_node(Node::Tensor1d { of, axis }, dim, holder, description))
    }

    pub fn sum(parts: Vec<FunctionRep>) -> Result<Self> {
        let dim = check_dims(&parts)?;
        if parts.len() == 1 {
            return Ok(parts.into_iter().next().unwrap());
        }
        let holder = parts[1..].iter().fold(parts[0].holder, |h, p| h.sum(&p.holder));
        let description = format!("({})", join(&parts, " + "));
        Ok(Self::from_node(Node::Sum(parts), dim, holder, description))
    }

    pub fn product(parts: Vec<FunctionRep>) -> Result<Self> {
        let dim = check_dims(&parts)?;
        if parts.len() == 1 {
            return Ok(parts.into_iter().next().unwrap());
        }
        let holder = parts[1..].iter().fold(parts[0].holder, |h, p| h.product(&p.holder));
        let description = format!("({})", join(&parts, " * "));
        Ok(Self::from_node(Node::Product(parts), dim, holder, description))
    }

    pub fn scaled(self, factor: f64) -> Self {
        let h = self.holder;
        let holder = HolderData {
            exponent: h.exponent,
            seminorm: h.seminorm.map(|s| s * factor.abs()),
            sup: h.sup.map(|s| s * factor.abs()),
        };
        let description = format!("{factor}*{}", self.description);
        let dim = self.dim;
        Self::from_node(Node::Scaled { factor, of: self }, dim, holder, description)
    }

    /// Samples on a uniform node grid over `region` (row-major, axis 0
    /// slowest), evaluated by multilinear interpolation and clamped outside.
    pub fn grid_sample(region: Rectangle, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let dim = region.dim();
        if shape.len() != dim || shape.iter().any(|&n| n < 2) {
            return Err(Error::invalid("grid sample needs at least 2 nodes per axis"));
        }
        if shape.iter().product::<usize>() != values.len() {
            return Err(Error::invalid("grid sample value count does not match shape"));
        }
        let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let description = format!("grid{:?}", shape);
        Ok(Self::from_node(
            Node::Grid(Arc::new(GridSample { region, shape, values })),
            dim,
            HolderData::lipschitz(None, Some(sup)),
            description,
        ))
    }

    /// `x ↦ φ/ψ pattern (2^j x − k)` without any normalisation factor.
    pub(crate) fn wavelet(basis: Arc<WaveletBasis>, pattern: Vec<Factor>, j: u32, k: Vec<i64>) -> Self {
        let dim = pattern.len();
        let scale = f64::powi(2.0, j as i32);
        let mut sup = 1.0;
        let mut holder: Option<HolderData> = None;
        for f in &pattern {
            let (s, lip) = basis.factor_bounds(*f);
            sup *= s;
            let h = HolderData::lipschitz(Some(lip * scale), Some(s));
            holder = Some(match holder {
                None => h,
                Some(acc) => acc.product(&h),
            });
        }
        let mut holder = holder.unwrap_or(HolderData::lipschitz(Some(0.0), Some(1.0)));
        holder.sup = Some(sup);
        let pat: String = pattern
            .iter()
            .map(|f| match f {
                Factor::Phi => 'φ',
                Factor::Psi => 'ψ',
            })
            .collect();
        let description = format!("{pat}[db{}](2^{j}x-{:?})", basis.order(), k);
        Self::from_node(
            Node::Wavelet(WaveletFn { basis, pattern, j, k }),
            dim,
            holder,
            description,
        )
    }

    /// Restriction to the hyperplane `x_axis = value`, as a function of the
    /// remaining `d − 1` coordinates.
    pub fn restrict(&self, axis: usize, value: f64) -> Result<Self> {
        if self.dim < 2 || axis >= self.dim {
            return Err(Error::invalid(format!("cannot pin axis {} of a {}-dimensional function", axis + 1, self.dim)));
        }
        let description = format!("{}|x{}={}", self.description, axis + 1, value);
        Ok(Self::from_node(
            Node::Restricted {
                of: self.clone(),
                axis,
                value,
            },
            self.dim - 1,
            self.holder,
            description,
        ))
    }

    /// Overrides the declared exponent.
    pub fn with_exponent(mut self, exponent: f64) -> Self {
        self.holder.exponent = exponent;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn declared_exponent(&self) -> f64 {
        self.holder.exponent
    }

    pub fn holder(&self) -> HolderData {
        self.holder
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn kind(&self) -> Kind {
        match &*self.node {
            Node::Constant(_) | Node::Coordinate(_) | Node::Monomial { .. } | Node::Bump { .. } => Kind::Preset,
            Node::Schauder(_) => Kind::Schauder,
            Node::Lacunary(_) => Kind::Preset,
            Node::Grid(_) => Kind::GridSample,
            Node::Mollified { .. } => Kind::Mollified,
            Node::Tensor1d { of, .. } | Node::Restricted { of, .. } | Node::Scaled { of, .. } => of.kind(),
            _ => Kind::Composite,
        }
    }

    pub(crate) fn node(&self) -> &Node {
        &self.node
    }

    pub(crate) fn schauder_series(&self) -> Option<&SchauderSeries> {
        match &*self.node {
            Node::Schauder(s) => Some(s),
            _ => None,
        }
    }

    /// Structural constancy (does not evaluate).
    pub fn is_constant(&self) -> bool {
        match &*self.node {
            Node::Constant(_) => true,
            Node::Coordinate(_) | Node::Bump { .. } | Node::Wavelet(_) | Node::Grid(_) => false,
            Node::Monomial { power, .. } => *power == 0.0,
            Node::Schauder(s) => s.is_zero_oscillation(),
            Node::Lacunary(_) => false,
            Node::Tensor1d { of, .. } | Node::Mollified { of, .. } => of.is_constant(),
            Node::Scaled { factor, of } => *factor == 0.0 || of.is_constant(),
            Node::Sum(p) => p.iter().all(FunctionRep::is_constant),
            Node::Product(p) => {
                p.iter().all(FunctionRep::is_constant) || p.iter().any(|q| q.is_zero())
            }
            Node::Restricted { of, axis, .. } => of.is_constant() || of.depends_only_on(*axis),
        }
    }

    fn is_zero(&self) -> bool {
        match &*self.node {
            Node::Constant(c) => *c == 0.0,
            Node::Scaled { factor, of } => *factor == 0.0 || of.is_zero(),
            Node::Product(p) => p.iter().any(FunctionRep::is_zero),
            Node::Sum(p) => p.iter().all(FunctionRep::is_zero),
            Node::Tensor1d { of, .. } | Node::Mollified { of, .. } => of.is_zero(),
            _ => false,
        }
    }

    /// True when the value depends on `axis` alone (or on nothing).
    fn depends_only_on(&self, axis: usize) -> bool {
        match &*self.node {
            Node::Constant(_) => true,
            Node::Coordinate(a) | Node::Monomial { axis: a, .. } | Node::Tensor1d { axis: a, .. } => *a == axis,
            Node::Scaled { of, .. } => of.depends_only_on(axis),
            Node::Sum(p) | Node::Product(p) => p.iter().all(|q| q.depends_only_on(axis)),
            _ => false,
        }
    }

    /// Closed box outside of which the function vanishes, if known.
    pub fn support_box(&self) -> Option<Rectangle> {
        match &*self.node {
            Node::Bump { lo, hi } => Some(Rectangle { a: lo.clone(), b: hi.clone() }),
            Node::Wavelet(w) => {
                let s = crate::dyadic::dyadic_step(w.j);
                let n = w.basis.support_len() as i64;
                Some(Rectangle {
                    a: w.k.iter().map(|&k| k as f64 * s).collect(),
                    b: w.k.iter().map(|&k| (k + n) as f64 * s).collect(),
                })
            }
            Node::Product(p) => {
                let mut acc: Option<Rectangle> = None;
                for q in p {
                    if let Some(b) = q.support_box() {
                        acc = Some(match acc {
                            None => b,
                            Some(a) => a.intersect(&b).unwrap_or_else(|| {
                                // disjoint supports: collapse to a point
                                Rectangle { a: a.a.clone(), b: a.a.clone() }
                            }),
                        });
                    }
                }
                acc
            }
            Node::Sum(p) => {
                let mut acc: Option<Rectangle> = None;
                for q in p {
                    let b = q.support_box()?;
                    acc = Some(match acc {
                        None => b,
                        Some(a) => a.hull(&b),
                    });
                }
                acc
            }
            Node::Scaled { of, .. } => of.support_box(),
            Node::Restricted { of, axis, .. } => of.support_box().map(|b| b.without_axis(*axis)),
            _ => None,
        }
    }

    /// Pointwise evaluation.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &*self.node {
            Node::Constant(c) => *c,
            Node::Coordinate(a) => x[*a],
            Node::Monomial { axis, power } => x[*axis].powf(*power),
            Node::Bump { lo, hi } => {
                let mut v = 1.0;
                for i in 0..lo.len() {
                    v *= bump1((x[i] - lo[i]) / (hi[i] - lo[i]));
                }
                v
            }
            Node::Schauder(s) => s.eval(x[0]),
            Node::Lacunary(w) => w.eval(x[0]),
            Node::Tensor1d { of, axis } => of.eval(&[x[*axis]]),
            Node::Sum(p) => {
                let mut v = p[0].eval(x);
                for q in &p[1..] {
                    v += q.eval(x);
                }
                v
            }
            Node::Product(p) => {
                let mut v = p[0].eval(x);
                for q in &p[1..] {
                    v *= q.eval(x);
                }
                v
            }
            Node::Scaled { factor, of } => factor * of.eval(x),
            Node::Mollified { of, nodes, .. } => mollify::eval_mollified(of, nodes, x),
            Node::Grid(g) => g.eval(x),
            Node::Wavelet(w) => {
                let mut v = w.factor(0, x[0]);
                for (a, &xa) in x.iter().enumerate().skip(1) {
                    v *= w.factor(a, xa);
                }
                v
            }
            Node::Restricted { of, axis, value } => {
                let mut y = Vec::with_capacity(x.len() + 1);
                y.extend_from_slice(&x[..*axis]);
                y.push(*value);
                y.extend_from_slice(&x[*axis..]);
                of.eval(&y)
            }
        }
    }

    /// Values on the tensor grid `axes[0] × … × axes[d−1]`, row-major with
    /// axis 0 slowest. Bitwise equal to pointwise [`eval`](Self::eval).
    pub fn eval_grid(&self, axes: &[&[f64]], exec: Execution) -> Vec<f64> {
        assert_eq!(axes.len(), self.dim, "grid dimension mismatch");
        let shape: Vec<usize> = axes.iter().map(|a| a.len()).collect();
        let total: usize = shape.iter().product();
        match &*self.node {
            Node::Constant(c) => vec![*c; total],
            Node::Coordinate(a) => broadcast(axes[*a], *a, &shape),
            Node::Monomial { axis, power } => {
                let v: Vec<f64> = axes[*axis].iter().map(|t| t.powf(*power)).collect();
                broadcast(&v, *axis, &shape)
            }
            Node::Bump { lo, hi } => {
                let mut out = vec![1.0; total];
                for i in 0..lo.len() {
                    let v: Vec<f64> = axes[i].iter().map(|t| bump1((t - lo[i]) / (hi[i] - lo[i]))).collect();
                    mul_broadcast(&mut out, &v, i, &shape);
                }
                out
            }
            Node::Schauder(s) => axes[0].iter().map(|&t| s.eval(t)).collect(),
            Node::Lacunary(w) => axes[0].iter().map(|&t| w.eval(t)).collect(),
            Node::Tensor1d { of, axis } => {
                let v = of.eval_grid(&[axes[*axis]], exec);
                broadcast(&v, *axis, &shape)
            }
            Node::Sum(p) => {
                let mut out = p[0].eval_grid(axes, exec);
                for q in &p[1..] {
                    let v = q.eval_grid(axes, exec);
                    out.iter_mut().zip(&v).for_each(|(o, x)| *o += x);
                }
                out
            }
            Node::Product(p) => {
                let mut out = p[0].eval_grid(axes, exec);
                for q in &p[1..] {
                    let v = q.eval_grid(axes, exec);
                    out.iter_mut().zip(&v).for_each(|(o, x)| *o *= x);
                }
                out
            }
            Node::Scaled { factor, of } => {
                let mut out = of.eval_grid(axes, exec);
                out.iter_mut().for_each(|o| *o *= factor);
                out
            }
            Node::Wavelet(w) => {
                let v0: Vec<f64> = axes[0].iter().map(|&t| w.factor(0, t)).collect();
                let mut out = broadcast(&v0, 0, &shape);
                for a in 1..shape.len() {
                    let v: Vec<f64> = axes[a].iter().map(|&t| w.factor(a, t)).collect();
                    mul_broadcast(&mut out, &v, a, &shape);
                }
                out
            }
            Node::Restricted { of, axis, value } => {
                let pinned = [*value];
                let mut child: Vec<&[f64]> = Vec::with_capacity(axes.len() + 1);
                child.extend_from_slice(&axes[..*axis]);
                child.push(&pinned);
                child.extend_from_slice(&axes[*axis..]);
                of.eval_grid(&child, exec)
            }
            Node::Mollified { .. } | Node::Grid(_) => {
                let d = shape.len();
                par::map_range(exec, total, |flat| {
                    let mut x = vec![0.0; d];
                    let mut r = flat;
                    for a in (0..d).rev() {
                        x[a] = axes[a][r % shape[a]];
                        r /= shape[a];
                    }
                    self.eval(&x)
                })
            }
        }
    }
}

#[inline]
fn bump1(s: f64) -> f64 {
    if (0.0..=1.0).contains(&s) {
        let t = s * (1.0 - s);
        16.0 * t * t
    } else {
        0.0
    }
}

fn broadcast(v: &[f64], axis: usize, shape: &[usize]) -> Vec<f64> {
    let total: usize = shape.iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let n = shape[axis];
    (0..total).map(|i| v[(i / inner) % n]).collect()
}

fn mul_broadcast(out: &mut [f64], v: &[f64], axis: usize, shape: &[usize]) {
    let inner: usize = shape[axis + 1..].iter().product();
    let n = shape[axis];
    for (i, o) in out.iter_mut().enumerate() {
        *o *= v[(i / inner) % n];
    }
}

impl GridSample {
    fn eval(&self, x: &[f64]) -> f64 {
        let d = self.shape.len();
        let mut base = 0usize;
        let mut fr = vec![0.0; d];
        let mut stride = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            stride[a] = stride[a + 1] * self.shape[a + 1];
        }
        for a in 0..d {
            let n = self.shape[a] - 1;
            let w = self.region.side(a);
            let s = if w > 0.0 {
                ((x[a] - self.region.a[a]) / w).clamp(0.0, 1.0) * n as f64
            } else {
                0.0
            };
            let i = (s.floor() as usize).min(n - 1);
            fr[a] = s - i as f64;
            base += i * stride[a];
        }
        let mut v = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut idx = base;
            for a in 0..d {
                if corner >> a & 1 == 1 {
                    w *= fr[a];
                    idx += stride[a];
                } else {
                    w *= 1.0 - fr[a];
                }
            }
            if w != 0.0 {
                v += w * self.values[idx];
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_matches_pointwise(f: &FunctionRep, axes: &[Vec<f64>]) {
        let refs: Vec<&[f64]> = axes.iter().map(|a| a.as_slice()).collect();
        let g = f.eval_grid(&refs, Execution::Sequential);
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let d = shape.len();
        for (flat, gv) in g.iter().enumerate() {
            let mut x = vec![0.0; d];
            let mut r = flat;
            for a in (0..d).rev() {
                x[a] = axes[a][r % shape[a]];
                r /= shape[a];
            }
            assert_eq!(gv.to_bits(), f.eval(&x).to_bits(), "{f} at {x:?}");
        }
    }

    #[test]
    fn grid_and_pointwise_agree() {
        let s = make_f_gamma_delta(0.6, 0.0, 8).unwrap();
        let f = FunctionRep::sum(vec![
            FunctionRep::tensor1d(s.clone(), 0, 2).unwrap(),
            FunctionRep::product(vec![
                FunctionRep::coordinate(2, 1),
                FunctionRep::tensor1d(s, 1, 2).unwrap(),
                FunctionRep::bump(vec![0.0, 0.0], vec![1.0, 0.75]).unwrap(),
            ])
            .unwrap(),
            FunctionRep::monomial(2, 0, 2.0).scaled(-0.5),
        ])
        .unwrap();
        let ax0: Vec<f64> = (0..17).map(|i| i as f64 / 16.0).collect();
        let ax1: Vec<f64> = (0..9).map(|i| 0.1 + i as f64 / 11.0).collect();
        grid_matches_pointwise(&f, &[ax0.clone(), ax1.clone()]);
        let r = f.restrict(0, 0.375).unwrap();
        assert_eq!(r.dim(), 1);
        grid_matches_pointwise(&r, &[ax1]);
    }

    #[test]
    fn restriction_pins_axis() {
        let f = FunctionRep::sum(vec![FunctionRep::coordinate(3, 0), FunctionRep::coordinate(3, 2).scaled(10.0)]).unwrap();
        let r = f.restrict(1, 7.0).unwrap();
        assert_eq!(r.eval(&[1.0, 2.0]), 21.0);
        let r0 = f.restrict(0, 7.0).unwrap();
        assert_eq!(r0.eval(&[1.0, 2.0]), 27.0);
    }

    #[test]
    fn constancy_is_structural() {
        assert!(FunctionRep::constant(2, 3.0).is_constant());
        assert!(!FunctionRep::coordinate(2, 0).is_constant());
        let x = FunctionRep::coordinate(2, 0);
        assert!(x.restrict(0, 0.5).unwrap().is_constant());
        assert!(!x.restrict(1, 0.5).unwrap().is_constant());
        let z = FunctionRep::product(vec![x.clone(), FunctionRep::constant(2, 0.0)]).unwrap();
        assert!(z.is_constant());
    }

    #[test]
    fn grid_sample_interpolates() {
        let r = Rectangle::unit(2);
        // f(x,y) = x + 2y sampled on a 3x3 grid is reproduced exactly
        let mut vals = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                vals.push(i as f64 * 0.5 + 2.0 * (j as f64 * 0.5));
            }
        }
        let f = FunctionRep::grid_sample(r, vec![3, 3], vals).unwrap();
        assert!((f.eval(&[0.3, 0.7]) - 1.7).abs() < 1e-14);
        assert!((f.eval(&[2.0, -1.0]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_holder_rule() {
        let a = HolderData { exponent: 0.5, seminorm: Some(2.0), sup: Some(3.0) };
        let b = HolderData { exponent: 0.8, seminorm: Some(5.0), sup: Some(7.0) };
        let p = a.product(&b);
        assert_eq!(p.exponent, 0.5);
        assert_eq!(p.seminorm, Some(3.0 * 5.0 + 7.0 * 2.0));
        assert_eq!(p.sup, Some(21.0));
    }

    #[test]
    fn bump_support() {
        let b = FunctionRep::bump(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(b.eval(&[0.5, 0.5]), 1.0);
        assert_eq!(b.eval(&[1.2, 0.5]), 0.0);
        assert_eq!(b.support_box(), Some(Rectangle::unit(2)));
        let p = FunctionRep::product(vec![b, FunctionRep::coordinate(2, 0)]).unwrap();
        assert_eq!(p.support_box(), Some(Rectangle::unit(2)));
    }
}

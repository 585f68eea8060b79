//! Sewing integrals `∫_R f dg¹∧…∧dgᵈ` over rectangles.

mod germ;

use serde::{Deserialize, Serialize};

use crate::dyadic::{faces, Rectangle};
use crate::error::{Error, Result};
use crate::funcrep::FunctionRep;
use crate::par::{self, Execution};

pub use germ::CellGrid;
pub(crate) use germ::germ_field;

/// Largest dimension handled by the germ engine.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SewingConfig {
    pub max_level: u32,
    pub tolerance: f64,
    /// Extra refinement of face integrals below the cell level.
    pub face_level_offset: u32,
    /// Maximum number of tabulated face integrals per level.
    pub memo_capacity: usize,
    /// First refinement level.
    pub start_level: u32,
    pub execution: Execution,
}

impl Default for SewingConfig {
    fn default() -> Self {
        SewingConfig {
            max_level: 10,
            tolerance: 1e-6,
            face_level_offset: 0,
            memo_capacity: 1 << 26,
            start_level: 1,
            execution: Execution::Parallel,
        }
    }
}

impl SewingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_level < 1 {
            return Err(Error::invalid("max_level must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if self.start_level > self.max_level {
            return Err(Error::invalid("start_level exceeds max_level"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: u32,
    pub value: f64,
    /// `|value − previous value|`, absent at the first level.
    pub gap: Option<f64>,
    pub cells: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub level_used: u32,
    pub cauchy_gap: f64,
    /// Cells evaluated over all levels.
    pub cost: u64,
    pub converged: bool,
    pub degenerate: bool,
    pub history: Vec<LevelRecord>,
    pub warnings: Vec<String>,
}

impl IntegralResult {
    fn trivial(value: f64, degenerate: bool) -> Self {
        IntegralResult {
            value,
            level_used: 1,
            cauchy_gap: 0.0,
            cost: 0,
            converged: true,
            degenerate,
            history: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// `(level, gap)` pairs of the refinement history.
    pub fn gaps(&self) -> Vec<(u32, f64)> {
        self.history.iter().filter_map(|r| r.gap.map(|g| (r.level, g))).collect()
    }
}

/// One refinement level: `Σ_P f(a_P) · germ(P)`, pairwise-summed.
///
/// How a level sum came about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LevelKind {
    Regular,
    /// some `g^i` is constant on this lattice; the sum is zero here only
    Degenerate,
    /// some `g^i` is constant outright
    Constant,
}

/// Returns `(value, cells, kind)`.
pub(crate) fn level_sum(
    f: &FunctionRep,
    g: &[FunctionRep],
    grid: &CellGrid,
    exec: Execution,
    capacity: usize,
) -> Result<(f64, u64, LevelKind)> {
    let cells = grid.cell_count() as u64;
    let refs: Vec<&[f64]> = grid.axes.iter().map(Vec::as_slice).collect();
    if g.iter().any(FunctionRep::is_constant) {
        return Ok((0.0, cells, LevelKind::Constant));
    }
    let mut gvals = Vec::with_capacity(g.len());
    for gi in g {
        let v = gi.eval_grid(&refs, exec);
        // constant on this lattice only: the level sum vanishes, finer ones may not
        if v.iter().all(|&x| x.to_bits() == v[0].to_bits()) {
            return Ok((0.0, cells, LevelKind::Degenerate));
        }
        gvals.push(v);
    }
    let germs = germ_field(&gvals, grid, exec, capacity)?;
    let anchors = grid.anchor_axes();
    let arefs: Vec<&[f64]> = anchors.iter().map(Vec::as_slice).collect();
    let mut fa = f.eval_grid(&arefs, exec);
    fa.iter_mut().zip(&germs).for_each(|(a, b)| *a *= b);
    Ok((par::pairwise_sum(exec, &fa), cells, LevelKind::Regular))
}

fn noise_floor(value: f64) -> f64 {
    1e3 * f64::EPSILON * value.abs().max(1.0)
}

/// Runs `step(level)` for increasing levels until the Cauchy gap drops to
/// `tol` or `max_level` is reached.
pub(crate) fn refine<F>(start: u32, max: u32, tol: f64, mut step: F) -> Result<IntegralResult>
where
    F: FnMut(u32) -> Result<(f64, u64, LevelKind)>,
{
    let mut res = IntegralResult::trivial(0.0, false);
    res.converged = false;
    res.cauchy_gap = f64::INFINITY;
    let mut prev: Option<f64> = None;
    let mut prev_gap: Option<f64> = None;
    let mut rising = 0;
    let mut prev_degenerate = false;
    for level in start.max(1)..=max {
        let (value, cells, kind) = match step(level) {
            Ok(v) => v,
            Err(Error::BudgetExceeded { what, .. }) => {
                let partial = (!res.history.is_empty()).then(|| Box::new(res.clone()));
                return Err(Error::BudgetExceeded { what, partial });
            }
            Err(e) => return Err(e),
        };
        res.cost += cells;
        res.value = value;
        res.level_used = level;
        if kind == LevelKind::Constant {
            res.cauchy_gap = 0.0;
            res.converged = true;
            res.history.push(LevelRecord { level, value, gap: None, cells });
            res.warnings.push("a g component is constant; integral is exactly zero".into());
            return Ok(res);
        }
        let gap = prev.map(|p| (value - p).abs());
        res.history.push(LevelRecord { level, value, gap, cells });
        if let Some(gap) = gap {
            res.cauchy_gap = gap;
            let degenerate = prev_degenerate || kind == LevelKind::Degenerate;
            if gap <= tol && !degenerate {
                res.converged = true;
                return Ok(res);
            }
            if let Some(pg) = prev_gap {
                if gap > pg && gap > noise_floor(value) {
                    rising += 1;
                } else {
                    rising = 0;
                }
            }
            if rising >= 3 {
                return Err(Error::NoConvergence { level, gap });
            }
            prev_gap = Some(gap);
        }
        prev = Some(value);
        prev_degenerate = kind == LevelKind::Degenerate;
    }
    if res.history.len() == 1 {
        res.cauchy_gap = f64::INFINITY;
    }
    res.warnings.push(format!(
        "tolerance {tol:e} not reached by level {max}; last gap {:e}",
        res.cauchy_gap
    ));
    Ok(res)
}

fn check_inputs(f: &FunctionRep, g: &[FunctionRep], r: &Rectangle) -> Result<()> {
    let d = r.dim();
    if d == 0 || d > MAX_DIM {
        return Err(Error::invalid(format!("dimension {d} outside 1..={MAX_DIM}")));
    }
    if g.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: g.len() });
    }
    for h in std::iter::once(f).chain(g) {
        if h.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: h.dim() });
        }
    }
    Ok(())
}

/// Warning text when `α + Σ β_i ≤ d`.
pub fn exponent_warning(f: &FunctionRep, g: &[FunctionRep]) -> Option<String> {
    let alpha = f.declared_exponent();
    let beta: f64 = g.iter().map(FunctionRep::declared_exponent).sum();
    let d = g.len() as f64;
    (alpha + beta <= d).then(|| {
        format!("exponent condition violated: alpha + sum(beta) = {} <= d = {d}; no convergence guarantee", alpha + beta)
    })
}

/// `∫_R f dg¹∧…∧dgᵈ` as the limit of lower-corner germ sums over the dyadic
/// subdivisions of `R`.
pub fn zust_integral(f: &FunctionRep, g: &[FunctionRep], r: &Rectangle, cfg: &SewingConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    check_inputs(f, g, r)?;
    if r.is_degenerate() {
        return Ok(IntegralResult::trivial(0.0, true));
    }
    let warn = exponent_warning(f, g);
    let mut res = refine(cfg.start_level, cfg.max_level, cfg.tolerance, |level| {
        let grid = CellGrid::relative(r, level, cfg.face_level_offset);
        level_sum(f, g, &grid, cfg.execution, cfg.memo_capacity)
    })?;
    if let Some(w) = warn {
        res.warnings.insert(0, w);
    }
    Ok(res)
}

/// `∫_R dg¹∧…∧dgᵈ` via the oriented faces of `R`:
/// `Σ_F ± ∫_F g¹ dg²∧…∧dgᵈ`, and `g¹(b) − g¹(a)` when `d = 1`.
pub fn boundary_integral(g: &[FunctionRep], r: &Rectangle, cfg: &SewingConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    let d = r.dim();
    if g.is_empty() {
        return Err(Error::invalid("boundary integral needs at least one function"));
    }
    check_inputs(&g[0], g, r)?;
    if r.is_degenerate() {
        return Ok(IntegralResult::trivial(0.0, true));
    }
    if d == 1 {
        return Ok(IntegralResult::trivial(g[0].eval(&r.b) - g[0].eval(&r.a), false));
    }
    let mut out = IntegralResult::trivial(0.0, false);
    let mut terms = Vec::new();
    for face in faces(r)? {
        let v = face.pinned();
        let fr = g[0].restrict(face.axis, v)?;
        let gr = g[1..].iter().map(|h| h.restrict(face.axis, v)).collect::<Result<Vec<_>>>()?;
        let sub = zust_integral(&fr, &gr, &face.rect(), cfg)?;
        terms.push(face.sign * sub.value);
        out.level_used = out.level_used.max(sub.level_used);
        out.cauchy_gap += sub.cauchy_gap;
        out.cost += sub.cost;
        out.converged &= sub.converged;
        out.warnings.extend(sub.warnings);
    }
    out.value = terms.iter().sum();
    Ok(out)
}

/// Midpoint rule for `∫_R f det(Dg)` with the Jacobian from central
/// differences across each cell (`2^grid_level` cells per axis).
pub fn lipschitz_oracle(f: &FunctionRep, g: &[FunctionRep], r: &Rectangle, grid_level: u32) -> Result<f64> {
    check_inputs(f, g, r)?;
    let d = r.dim();
    let n = 1u64 << grid_level;
    let edges: Vec<Vec<f64>> = (0..d).map(|a| (0..=n).map(|i| r.grid_coord(a, i, n)).collect()).collect();
    let mids: Vec<Vec<f64>> = edges.iter().map(|e| e.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()).collect();
    let h: Vec<f64> = (0..d).map(|a| r.side(a) / n as f64).collect();
    let exec = Execution::Parallel;
    let cells = (n as usize).pow(d as u32);
    // jac[i][a]: ∂g^i/∂x_a at every cell centre
    let mut jac: Vec<Vec<Vec<f64>>> = Vec::with_capacity(d);
    for gi in g {
        let mut cols = Vec::with_capacity(d);
        for a in 0..d {
            let axes: Vec<&[f64]> = (0..d).map(|b| if b == a { edges[b].as_slice() } else { mids[b].as_slice() }).collect();
            let shape: Vec<usize> = axes.iter().map(|x| x.len()).collect();
            let vals = gi.eval_grid(&axes, exec);
            let inner: usize = shape[a + 1..].iter().product();
            let col = par::map_range(exec, cells, |c| {
                let outer = c / (inner * n as usize);
                let ia = c / inner % n as usize;
                let rest = c % inner;
                let lo = (outer * shape[a] + ia) * inner + rest;
                (vals[lo + inner] - vals[lo]) / h[a]
            });
            cols.push(col);
        }
        jac.push(cols);
    }
    let mrefs: Vec<&[f64]> = mids.iter().map(Vec::as_slice).collect();
    let fv = f.eval_grid(&mrefs, exec);
    let vol: f64 = h.iter().product();
    let terms = par::map_range(exec, cells, |c| {
        let m = nalgebra::DMatrix::from_fn(d, d, |i, a| jac[i][a][c]);
        fv[c] * m.determinant() * vol
    });
    Ok(par::pairwise_sum(exec, &terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::{make_f_gamma_delta, mollify};

    fn cfg(max_level: u32, tol: f64) -> SewingConfig {
        SewingConfig {
            max_level,
            tolerance: tol,
            ..SewingConfig::default()
        }
    }

    #[test]
    fn one_dimensional_boundary() {
        let g = vec![FunctionRep::monomial(1, 0, 2.0)];
        let r = Rectangle::new(vec![0.0], vec![3.0]).unwrap();
        assert_eq!(boundary_integral(&g, &r, &cfg(4, 1e-9)).unwrap().value, 9.0);
    }

    #[test]
    fn area_from_faces() {
        for d in 2..=3 {
            let r = Rectangle::new(vec![0.0; d], (0..d).map(|a| 1.0 + 0.5 * a as f64).collect()).unwrap();
            let b = boundary_integral(&FunctionRep::identity(d), &r, &cfg(4, 1e-12)).unwrap();
            assert!((b.value - r.volume()).abs() < 1e-12, "d={d}: {}", b.value);
        }
    }

    #[test]
    fn constant_component_kills_boundary() {
        let g = vec![FunctionRep::constant(2, 2.0), FunctionRep::coordinate(2, 1)];
        let b = boundary_integral(&g, &Rectangle::unit(2), &cfg(4, 1e-12)).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn polynomial_integrands() {
        let id = FunctionRep::identity(2);
        let one = FunctionRep::constant(2, 1.0);
        let r = zust_integral(&one, &id, &Rectangle::unit(2), &cfg(6, 1e-12)).unwrap();
        assert_eq!(r.value, 1.0);
        let xy = FunctionRep::sum(id.clone()).unwrap();
        let r = zust_integral(&xy, &id, &Rectangle::unit(2), &cfg(12, 1e-3)).unwrap();
        // lower-corner rule: 1 − 2^{−J}
        assert!((r.value - 1.0).abs() <= 2.0 * r.cauchy_gap + 1e-12, "{r:?}");
    }

    #[test]
    fn degenerate_rectangle_is_zero() {
        let id = FunctionRep::identity(2);
        let r = Rectangle::new(vec![0.0, 0.5], vec![1.0, 0.5]).unwrap();
        let res = zust_integral(&FunctionRep::constant(2, 1.0), &id, &r, &cfg(4, 1e-9)).unwrap();
        assert!(res.degenerate);
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn fubini_reduction_for_a_one_variable_g() {
        let s = make_f_gamma_delta(0.75, 0.0, 14).unwrap();
        let g1 = FunctionRep::tensor1d(s.clone(), 0, 2).unwrap();
        let g = vec![g1, FunctionRep::coordinate(2, 1)];
        let res = zust_integral(&FunctionRep::constant(2, 1.0), &g, &Rectangle::unit(2), &cfg(9, 1e-12)).unwrap();
        let want = s.eval(&[1.0]) - s.eval(&[0.0]);
        assert!((res.value - want).abs() < 1e-12, "{} vs {want}", res.value);
    }

    #[test]
    fn lipschitz_oracle_examples() {
        let r = Rectangle::unit(2);
        let one = FunctionRep::constant(2, 1.0);
        assert!((lipschitz_oracle(&one, &FunctionRep::identity(2), &r, 4).unwrap() - 1.0).abs() < 1e-13);
        let x = FunctionRep::coordinate(2, 0);
        let same = vec![x.clone(), x.clone()];
        assert_eq!(lipschitz_oracle(&one, &same, &r, 4).unwrap(), 0.0);
        let g = vec![FunctionRep::monomial(2, 0, 2.0), FunctionRep::coordinate(2, 1)];
        let v = lipschitz_oracle(&x, &g, &r, 8).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-5, "{v}");
        let r3 = Rectangle::unit(3);
        let one3 = FunctionRep::constant(3, 1.0);
        assert!((lipschitz_oracle(&one3, &FunctionRep::identity(3), &r3, 3).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn mollified_agreement() {
        let s = make_f_gamma_delta(0.8, 0.0, 10).unwrap();
        let g1 = mollify(&FunctionRep::tensor1d(s.clone(), 0, 2).unwrap(), 8).unwrap();
        let g2 = FunctionRep::sum(vec![FunctionRep::coordinate(2, 1), mollify(&FunctionRep::tensor1d(s, 1, 2).unwrap(), 8).unwrap().scaled(0.5)]).unwrap();
        let f = FunctionRep::sum(vec![FunctionRep::coordinate(2, 0), FunctionRep::constant(2, 0.5)]).unwrap();
        let g = vec![g1, g2];
        let r = Rectangle::unit(2);
        let z = zust_integral(&f, &g, &r, &cfg(10, 1e-5)).unwrap();
        let o = lipschitz_oracle(&f, &g, &r, 10).unwrap();
        assert!((z.value - o).abs() < 1e-3, "{} vs {o} (gap {})", z.value, z.cauchy_gap);
    }
}

//! Cell germs `∫_P dg¹∧…∧dgᵈ` on a uniform node lattice.
//!
//! A cell's germ is the signed sum of its face integrals, each face integral
//! being the `(d−1)`-dimensional germ sum over the face's sub-cells. Face
//! values are tabulated once per hyperplane position, so the face shared by
//! two neighbouring cells is computed a single time. The germ is averaged over
//! all orderings of the `g` columns with permutation signs, which makes it
//! exactly antisymmetric in the columns.

use crate::dyadic::{dyadic_step, Rectangle};
use crate::error::{Error, Result};
use crate::numeric::{factorial, fsum, signed_permutations};
use crate::par::{self, Execution};

/// Uniform cells whose edges span `m` node steps.
#[derive(Debug, Clone)]
pub struct CellGrid {
    /// Node coordinates per axis.
    pub axes: Vec<Vec<f64>>,
    pub m: usize,
}

impl CellGrid {
    /// `2^level` cells per axis of `r`, nodes at `2^{level+offset}` steps.
    pub fn relative(r: &Rectangle, level: u32, offset: u32) -> Self {
        let n = 1u64 << (level + offset);
        let axes = (0..r.dim())
            .map(|a| (0..=n).map(|i| r.grid_coord(a, i, n)).collect())
            .collect();
        CellGrid {
            axes,
            m: 1 << offset,
        }
    }

    /// Cells of the absolute lattice `2^{−level} ℤ^d` inside `r`, whose
    /// corners must lie on that lattice.
    pub fn lattice(r: &Rectangle, level: u32, offset: u32) -> Result<Self> {
        let fine = level + offset;
        let s = f64::powi(2.0, fine as i32);
        let step = dyadic_step(fine);
        let mut axes = Vec::with_capacity(r.dim());
        for a in 0..r.dim() {
            let lo = r.a[a] * s;
            let hi = r.b[a] * s;
            let coarse = f64::powi(2.0, level as i32);
            if (r.a[a] * coarse).fract() != 0.0 || (r.b[a] * coarse).fract() != 0.0 {
                return Err(Error::invalid(format!("rectangle is not aligned to the level-{level} lattice")));
            }
            let (lo, hi) = (lo as i64, hi as i64);
            axes.push((lo..=hi).map(|i| i as f64 * step).collect());
        }
        Ok(CellGrid {
            axes,
            m: 1 << offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn node_shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn cells_per_axis(&self) -> Vec<usize> {
        self.axes.iter().map(|a| (a.len() - 1) / self.m).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_axis().iter().product()
    }

    /// Lower-corner coordinates of the cells, per axis.
    pub fn anchor_axes(&self) -> Vec<Vec<f64>> {
        self.axes
            .iter()
            .map(|a| a[..a.len() - 1].iter().step_by(self.m).copied().collect())
            .collect()
    }

    /// Number of face-table entries a germ evaluation needs.
    pub fn face_entries(&self) -> usize {
        let d = self.dim();
        if d < 2 {
            return 0;
        }
        let n = self.cells_per_axis();
        let per_perm: usize = (0..d)
            .map(|p| (0..d).map(|a| if a == p { n[a] + 1 } else { n[a] }).product::<usize>())
            .sum();
        factorial(d) as usize * per_perm
    }
}

fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * shape[a + 1];
    }
    s
}

/// Depth-zero boundary germ of the one-node cell at `base` spanned by the
/// axes in `free` (bitmask), with columns `cols`.
fn boundary_germ(cols: &[&[f64]], base: usize, free: u32, strides: &[usize]) -> f64 {
    if free.count_ones() == 1 {
        let a = free.trailing_zeros() as usize;
        return cols[0][base + strides[a]] - cols[0][base];
    }
    let mut s = 0.0;
    let mut pos = 0;
    let mut rest = free;
    while rest != 0 {
        let a = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
        let sub = free & !(1 << a);
        let up = base + strides[a];
        s += sign * cols[0][up] * boundary_germ(&cols[1..], up, sub, strides);
        s -= sign * cols[0][base] * boundary_germ(&cols[1..], base, sub, strides);
        pos += 1;
    }
    s
}

/// Antisymmetrised germ of every cell, row-major over cells.
pub(crate) fn germ_field(gvals: &[Vec<f64>], grid: &CellGrid, exec: Execution, capacity: usize) -> Result<Vec<f64>> {
    let d = grid.dim();
    assert_eq!(gvals.len(), d);
    let shape = grid.node_shape();
    let strides = strides_of(&shape);
    let n = grid.cells_per_axis();
    let m = grid.m;
    let cells: usize = n.iter().product();
    if d == 1 {
        let g = &gvals[0];
        return Ok(par::map_range(exec, cells, |c| g[(c + 1) * m] - g[c * m]));
    }
    let entries = grid.face_entries();
    if entries > capacity {
        return Err(Error::BudgetExceeded {
            what: format!("{entries} face entries exceed the memo capacity {capacity}"),
            partial: None,
        });
    }
    let perms = signed_permutations(d);
    let all: u32 = (1u32 << d) - 1;
    // tables[σ][p]: face integrals on hyperplanes orthogonal to p
    let mut tables: Vec<Vec<Vec<f64>>> = Vec::with_capacity(perms.len());
    for (perm, _) in &perms {
        let cols: Vec<&[f64]> = perm.iter().map(|&i| gvals[i].as_slice()).collect();
        let mut per_axis = Vec::with_capacity(d);
        for p in 0..d {
            let fshape: Vec<usize> = (0..d).map(|a| if a == p { n[a] + 1 } else { n[a] }).collect();
            let fstrides = strides_of(&fshape);
            let total: usize = fshape.iter().product();
            let free = all & !(1 << p);
            let sub_count = m.pow(d as u32 - 1);
            let table = par::map_range(exec, total, |fi| {
                let mut base = 0;
                for a in 0..d {
                    base += (fi / fstrides[a] % fshape[a]) * m * strides[a];
                }
                let mut z = 0.0;
                for sub in 0..sub_count {
                    let mut off = 0;
                    let mut r = sub;
                    for a in 0..d {
                        if a != p {
                            off += (r % m) * strides[a];
                            r /= m;
                        }
                    }
                    let b = base + off;
                    z += cols[0][b] * boundary_germ(&cols[1..], b, free, &strides);
                }
                z
            });
            per_axis.push(table);
        }
        tables.push(per_axis);
    }
    let inv = 1.0 / factorial(d);
    let exact_div = d == 2;
    let cstrides = strides_of(&n);
    let germs = par::map_range(exec, cells, |c| {
        let mut idx = [0usize; 16];
        for a in 0..d {
            idx[a] = c / cstrides[a] % n[a];
        }
        let mut terms = [0.0f64; 24];
        for (si, (_, sgn)) in perms.iter().enumerate() {
            let mut b = 0.0;
            for p in 0..d {
                let fshape_p = |a: usize| if a == p { n[a] + 1 } else { n[a] };
                let mut lo = 0;
                let mut stride = 1;
                for a in (0..d).rev() {
                    lo += idx[a] * stride;
                    stride *= fshape_p(a);
                }
                let mut step_p = 1;
                for a in p + 1..d {
                    step_p *= fshape_p(a);
                }
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                let t = &tables[si][p];
                b += sign * t[lo + step_p];
                b -= sign * t[lo];
            }
            terms[si] = sgn * b;
        }
        let s = fsum(&terms[..perms.len()]);
        if exact_div {
            0.5 * s
        } else {
            s * inv
        }
    });
    Ok(germs)
}

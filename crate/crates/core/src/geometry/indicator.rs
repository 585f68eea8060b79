//! Wavelet coefficients of the indicator of a grid domain.
//!
//! The indicator is replaced by the cube fractions of the grid, a function
//! constant on every grid cube. Against such a function the pairing with
//! `φ(2^j · − k)` reduces per axis to increments of the primitive
//! `Φ(t) = ∫_0^t φ` over intervals of length `2^{−e}`, `e = level − j`.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::grid::GridDomain;
use crate::error::{Error, Result};
use crate::funcrep::Factor;
use crate::par::Execution;
use crate::wavelets::{contract_axes, CoefficientField, Entry, WaveletBasis};

/// Grid levels required beyond `j_max`.
pub const INDICATOR_MARGIN: u32 = 2;

/// Primitive of the piecewise linear interpolant of a cascade table.
struct Primitive<'a> {
    table: &'a [f64],
    prefix: Vec<f64>,
    h: f64,
}

impl<'a> Primitive<'a> {
    fn new(table: &'a [f64], level: u32) -> Self {
        let h = crate::dyadic::dyadic_step(level);
        let mut prefix = Vec::with_capacity(table.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for w in table.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            prefix.push(acc);
        }
        Primitive { table, prefix, h }
    }

    fn at(&self, t: f64) -> f64 {
        let s = (t / self.h).max(0.0);
        let i = s.floor() as usize;
        if i + 1 >= self.table.len() {
            return self.prefix[self.prefix.len() - 1];
        }
        let fr = s - i as f64;
        let (a, b) = (self.table[i], self.table[i + 1]);
        self.prefix[i] + self.h * (fr * a + 0.5 * fr * fr * (b - a))
    }

    /// `w[r] = Φ((r+1)/2^e) − Φ(r/2^e)`, `r = 0 .. N·2^e`.
    fn increments(&self, n: usize, e: u32) -> Vec<f64> {
        let m = n << e;
        let step = crate::dyadic::dyadic_step(e);
        let vals: Vec<f64> = (0..=m).map(|r| self.at(r as f64 * step)).collect();
        vals.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// `c_k` and `c_{ijk}` (`j ≤ j_max`) of the cube-fraction function of `grid`.
///
/// Detail coefficients are kept only for `k` whose support cube overlaps a
/// level-`j` cube holding a Lebesgue-boundary cube of the grid; elsewhere the
/// indicator is constant on the support and the coefficient vanishes.
pub fn indicator_coeffs(grid: &GridDomain, basis: &Arc<WaveletBasis>, j_max: u32) -> Result<CoefficientField> {
    indicator_coeffs_with(grid, basis, j_max, Execution::Parallel)
}

pub fn indicator_coeffs_with(
    grid: &GridDomain,
    basis: &Arc<WaveletBasis>,
    j_max: u32,
    exec: Execution,
) -> Result<CoefficientField> {
    let required = j_max + INDICATOR_MARGIN;
    if grid.level < required {
        return Err(Error::ResolutionInsufficient {
            have: grid.level,
            required,
        });
    }
    let d = grid.d;
    let n = basis.support_len();
    let mut field = CoefficientField::new(d, basis.order());
    let data: Vec<f64> = (0..grid.cube_count()).map(|i| grid.fraction(i)).collect();
    if data.iter().all(|&v| v == 0.0) {
        field.populated_to = Some(j_max);
        return Ok(field);
    }
    let level = basis.cascade_level();
    let phi_p = Primitive::new(basis.table(Factor::Phi), level);
    let psi_p = Primitive::new(basis.table(Factor::Psi), level);
    let boundary = grid.lebesgue_boundary();

    for j in 0..=j_max {
        let e = grid.level - j;
        let phi = phi_p.increments(n, e);
        let psi = psi_p.increments(n, e);
        let stride = 1usize << e;
        // k range covering every support that meets the grid box
        let klo: Vec<i64> = grid.origin.iter().map(|&o| (o >> e) - n as i64).collect();
        let khi: Vec<i64> = grid
            .origin
            .iter()
            .zip(&grid.shape)
            .map(|(&o, &s)| (o + s as i64 - 1) >> e)
            .collect();
        let counts: Vec<usize> = klo.iter().zip(&khi).map(|(l, h)| (h - l + 1) as usize).collect();
        let shift: Vec<usize> = grid
            .origin
            .iter()
            .zip(&klo)
            .map(|(&o, &l)| (o - (l << e)) as usize)
            .collect();
        let blocks = contract_axes(&data, &grid.shape, &phi, &psi, stride, &shift, &counts, exec);
        let flat_of = |k: &[i64]| -> Option<usize> {
            let mut flat = 0usize;
            for a in 0..d {
                let r = k[a] - klo[a];
                if r < 0 || r >= counts[a] as i64 {
                    return None;
                }
                flat = flat * counts[a] + r as usize;
            }
            Some(flat)
        };
        if j == 0 {
            let total: usize = counts.iter().product();
            for flat in 0..total {
                let v = blocks[0][flat];
                if v != 0.0 {
                    let mut k = vec![0i64; d];
                    let mut r = flat;
                    for a in (0..d).rev() {
                        k[a] = klo[a] + (r % counts[a]) as i64;
                        r /= counts[a];
                    }
                    field.scaling.insert(k, Entry::exact(v));
                }
            }
        }
        let mut keep: BTreeSet<Vec<i64>> = BTreeSet::new();
        for c in boundary.at_level(j) {
            for off in 0..n.pow(d as u32) {
                let mut r = off;
                let mut k = c.clone();
                for a in (0..d).rev() {
                    k[a] -= (r % n) as i64;
                    r /= n;
                }
                keep.insert(k);
            }
        }
        for k in keep {
            let Some(flat) = flat_of(&k) else { continue };
            for (i, block) in blocks.iter().enumerate().skip(1) {
                let v = block[flat];
                if v != 0.0 {
                    field.insert_detail(i as u32, j, k.clone(), Entry::exact(v));
                }
            }
        }
        field.populated_to = Some(j);
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Rectangle;
    use crate::geometry::Domain;
    use crate::wavelets::build_basis;

    fn basis() -> Arc<WaveletBasis> {
        Arc::new(build_basis(2, 10).unwrap())
    }

    #[test]
    fn primitive_matches_trapezoid_at_nodes() {
        let b = basis();
        let p = Primitive::new(b.phi_table(), 10);
        let w = p.increments(b.support_len(), 10);
        let direct: Vec<f64> = b.phi_table().windows(2).map(|t| 0.5 * (t[0] + t[1]) / 1024.0).collect();
        for (a, c) in w.iter().zip(&direct) {
            assert!((a - c).abs() < 1e-15);
        }
        // finer than the table: interpolant integrals still add up
        let fine = p.increments(b.support_len(), 12);
        let coarse: Vec<f64> = fine.chunks(4).map(|c| c.iter().sum()).collect();
        for (a, c) in coarse.iter().zip(&w) {
            assert!((a - c).abs() < 1e-14);
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_domain_gives_empty_field() {
        let dom = Domain::Disk {
            center: vec![5.0, 5.0],
            radius: 0.1,
        };
        let g = GridDomain::build(&dom, &Rectangle::unit(2), 5, 4, Execution::Parallel).unwrap();
        let f = indicator_coeffs(&g, &basis(), 3).unwrap();
        assert!(f.is_empty());
        assert_eq!(f.populated_to, Some(3));
    }

    #[test]
    fn resolution_is_checked() {
        let dom = Domain::Rectangle {
            rect: Rectangle::unit(2),
            open: false,
        };
        let g = GridDomain::build(&dom, &Rectangle::cube(2, -0.25, 1.25), 5, 4, Execution::Parallel).unwrap();
        match indicator_coeffs(&g, &basis(), 4) {
            Err(Error::ResolutionInsufficient { have: 5, required: 6 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interval_matches_function_quadrature() {
        // 1-D indicator of [1/4, 5/8] aligned with the grid: cube fractions are exact
        let dom = Domain::Rectangle {
            rect: Rectangle::new(vec![0.25], vec![0.625]).unwrap(),
            open: false,
        };
        let bound = Rectangle::new(vec![-1.0], vec![2.0]).unwrap();
        let g = GridDomain::build(&dom, &bound, 9, 8, Execution::Sequential).unwrap();
        let b = basis();
        let ind = indicator_coeffs(&g, &b, 5).unwrap();
        // midpoint sums of the interpolated tables over [1/4, 5/8]
        let m = 1usize << 16;
        let h = 0.375 / m as f64;
        let quad = |f: &dyn Fn(f64) -> f64| (0..m).map(|t| f(0.25 + (t as f64 + 0.5) * h)).sum::<f64>() * h;
        for k in -3..1i64 {
            let want = quad(&|x| b.phi(x - k as f64));
            assert!((ind.scaling(&[k]) - want).abs() < 1e-8, "k={k}");
        }
        for j in 0..=5u32 {
            let s = f64::powi(2.0, j as i32);
            for k in -4..(1i64 << j) {
                let want = s * quad(&|x| b.psi(s * x - k as f64));
                assert!((ind.detail(1, j, &[k]) - want).abs() < 1e-7 * s, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn square_sparsity_bound() {
        let dom = Domain::Rectangle {
            rect: Rectangle::unit(2),
            open: false,
        };
        let b = basis();
        let g = GridDomain::build(&dom, &Rectangle::cube(2, -0.25, 1.25), 7, 4, Execution::Parallel).unwrap();
        let f = indicator_coeffs(&g, &b, 5).unwrap();
        let lb = g.lebesgue_boundary();
        let n = b.support_len() as u64;
        for j in 0..=5 {
            for i in 1..4u32 {
                let count = f.level(j).filter(|(key, _)| key.i == i).count() as u64;
                assert!(count <= n * n * lb.count(j), "i={i} j={j}");
                assert!(count > 0);
            }
        }
        // ∫ 𝟙 φ(x − k) sums to the area
        let area: f64 = f.scaling.values().map(|e| e.value).sum();
        assert!((area - 1.0).abs() < 1e-6);
    }
}

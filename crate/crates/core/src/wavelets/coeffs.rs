//! Wavelet coefficients of ordinary functions by quadrature on dyadic lattices.

use std::sync::Arc;

use super::{CoefficientField, Entry, WaveletBasis};
use crate::dyadic::Rectangle;
use crate::error::{Error, Result};
use crate::funcrep::{Factor, FunctionRep};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy)]
pub struct CoeffOptions {
    /// Quadrature nodes per unit of `2^{-j}`, as a generation (`None`: 10, 6, 4
    /// for d = 1, 2, ≥3, capped by the cascade level).
    pub quad_level: Option<u32>,
    pub exec: Execution,
}

impl Default for CoeffOptions {
    fn default() -> Self {
        CoeffOptions {
            quad_level: None,
            exec: Execution::Parallel,
        }
    }
}

pub(crate) fn default_quad_level(d: usize, basis: &WaveletBasis) -> u32 {
    let q = match d {
        1 => 10,
        2 => 6,
        _ => 4,
    };
    q.min(basis.cascade_level())
}

/// Nodes `m / 2^q` for `m = start .. start + count`.
pub(crate) fn lattice_axis(start: i64, count: usize, q: u32) -> Vec<f64> {
    let s = crate::dyadic::dyadic_step(q);
    (0..count as i64).map(|m| (start + m) as f64 * s).collect()
}

/// `out[k] = Σ_t filter[t] · data[k·stride + t − shift]` along `axis`, with
/// out-of-range data treated as zero.
#[allow(clippy::too_many_arguments)]
fn contract(
    data: &[f64],
    shape: &[usize],
    axis: usize,
    filter: &[f64],
    stride: usize,
    shift: usize,
    count: usize,
    exec: Execution,
) -> Vec<f64> {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let n = shape[axis];
    let rows = par::map_range(exec, outer * count, |row| {
        let o = row / count;
        let kk = row % count;
        let mut acc = vec![0.0; inner];
        let base = kk * stride;
        for (t, &w) in filter.iter().enumerate() {
            if base + t < shift {
                continue;
            }
            let m = base + t - shift;
            if m >= n {
                break;
            }
            if w == 0.0 {
                continue;
            }
            let src = &data[(o * n + m) * inner..(o * n + m + 1) * inner];
            for (a, s) in acc.iter_mut().zip(src) {
                *a += w * s;
            }
        }
        acc
    });
    rows.concat()
}

/// Contracts every axis with both filters; result `p` uses `ψ` on the axes
/// whose bit is set in `p`. Output arrays have shape `counts`; `shift[a]` is
/// the data index of the first filter tap of output 0 counted backwards.
#[allow(clippy::too_many_arguments)]
pub(crate) fn contract_axes(
    data: &[f64],
    shape: &[usize],
    phi: &[f64],
    psi: &[f64],
    stride: usize,
    shift: &[usize],
    counts: &[usize],
    exec: Execution,
) -> Vec<Vec<f64>> {
    let d = shape.len();
    let mut results: Vec<(u32, Vec<f64>, Vec<usize>)> = vec![(0, data.to_vec(), shape.to_vec())];
    for axis in (0..d).rev() {
        let mut next = Vec::with_capacity(results.len() * 2);
        for (bits, arr, shp) in &results {
            for (bit, filt) in [(0u32, phi), (1u32, psi)] {
                let out = contract(arr, shp, axis, filt, stride, shift[axis], counts[axis], exec);
                let mut s = shp.clone();
                s[axis] = counts[axis];
                next.push((bits | (bit << axis), out, s));
            }
        }
        results = next;
    }
    let mut by_pattern = vec![Vec::new(); 1 << d];
    for (bits, arr, _) in results {
        by_pattern[bits as usize] = arr;
    }
    by_pattern
}

/// `c_k = ∫ h φ(x − k) dx` and `c_{ijk} = 2^{dj} ∫ h ψ^{(i)}(2^j x − k) dx` for
/// `j ≤ j_max` and every `k` whose support cube `[k, k+N]·2^{−j}` meets `region`.
pub fn function_coeffs(h: &FunctionRep, basis: &Arc<WaveletBasis>, j_max: u32, region: &Rectangle) -> Result<CoefficientField> {
    function_coeffs_with(h, basis, j_max, region, CoeffOptions::default())
}

pub fn function_coeffs_with(
    h: &FunctionRep,
    basis: &Arc<WaveletBasis>,
    j_max: u32,
    region: &Rectangle,
    opts: CoeffOptions,
) -> Result<CoefficientField> {
    let d = h.dim();
    if region.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: region.dim() });
    }
    let lq = opts.quad_level.unwrap_or_else(|| default_quad_level(d, basis));
    if lq > basis.cascade_level() {
        return Err(Error::invalid("quadrature level exceeds the cascade level"));
    }
    let n_sup = basis.support_len() as i64;
    let per = 1usize << lq;
    let mut field = CoefficientField::new(d, basis.order());
    for j in 0..=j_max {
        let q = j + lq;
        let w = crate::dyadic::dyadic_step(q);
        let phi: Vec<f64> = basis.samples(Factor::Phi, lq).iter().map(|v| v * w).collect();
        let psi: Vec<f64> = basis.samples(Factor::Psi, lq).iter().map(|v| v * w).collect();
        let s = f64::powi(2.0, j as i32);
        let kr: Vec<(i64, i64)> = (0..d)
            .map(|a| ((region.a[a] * s - n_sup as f64).ceil() as i64, (region.b[a] * s).floor() as i64))
            .collect();
        let counts: Vec<usize> = kr.iter().map(|(lo, hi)| (hi - lo + 1) as usize).collect();
        let axes: Vec<Vec<f64>> = kr
            .iter()
            .zip(&counts)
            .map(|((lo, _), &c)| lattice_axis(lo * per as i64, (c - 1 + n_sup as usize) * per + 1, q))
            .collect();
        let refs: Vec<&[f64]> = axes.iter().map(Vec::as_slice).collect();
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let vals = h.eval_grid(&refs, opts.exec);
        let blocks = contract_axes(&vals, &shape, &phi, &psi, per, &vec![0; d], &counts, opts.exec);
        let norm = f64::powi(2.0, (d as u32 * j) as i32);
        let total: usize = counts.iter().product();
        for flat in 0..total {
            let mut k = vec![0i64; d];
            let mut r = flat;
            for a in (0..d).rev() {
                k[a] = kr[a].0 + (r % counts[a]) as i64;
                r /= counts[a];
            }
            if j == 0 {
                field.scaling.insert(k.clone(), Entry::exact(blocks[0][flat]));
            }
            for (i, block) in blocks.iter().enumerate().skip(1) {
                field.insert_detail(i as u32, j, k.clone(), Entry::exact(norm * block[flat]));
            }
        }
        field.populated_to = Some(j);
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::super::build_basis;
    use super::*;

    #[test]
    fn contraction_matches_direct_sum() {
        let shape = [7usize, 9];
        let data: Vec<f64> = (0..63).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let phi = [0.5, 1.0, -0.25];
        let psi = [1.0, -1.0, 0.0];
        let counts = [3usize, 4];
        for shift in [[0usize, 0], [1, 3]] {
            let out = contract_axes(&data, &shape, &phi, &psi, 2, &shift, &counts, Execution::Sequential);
            for p in 0..4u32 {
                for k0 in 0..3 {
                    for k1 in 0..4 {
                        let f0 = if p & 1 == 1 { &psi } else { &phi };
                        let f1 = if p & 2 == 2 { &psi } else { &phi };
                        let mut want = 0.0;
                        for t0 in 0..3 {
                            for t1 in 0..3 {
                                let m0 = (2 * k0 + t0) as i64 - shift[0] as i64;
                                let m1 = (2 * k1 + t1) as i64 - shift[1] as i64;
                                if (0..7).contains(&m0) && (0..9).contains(&m1) {
                                    want += f0[t0] * f1[t1] * data[(m0 * 9 + m1) as usize];
                                }
                            }
                        }
                        assert!((out[p as usize][k0 * 4 + k1] - want).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn constant_function() {
        let b = Arc::new(build_basis(4, 10).unwrap());
        let f = function_coeffs(&FunctionRep::constant(1, 1.0), &b, 4, &Rectangle::unit(1)).unwrap();
        for e in f.scaling.values() {
            assert!((e.value - 1.0).abs() < 1e-10);
        }
        for e in f.detail.values() {
            assert!(e.value.abs() < 1e-8, "{}", e.value);
        }
    }

    #[test]
    fn scaling_function_is_orthonormal() {
        let b = Arc::new(build_basis(4, 10).unwrap());
        let phi0 = FunctionRep::wavelet(b.clone(), vec![Factor::Phi], 0, vec![0]);
        let f = function_coeffs(&phi0, &b, 0, &Rectangle::new(vec![-3.0], vec![3.0]).unwrap()).unwrap();
        for (k, e) in &f.scaling {
            let want = if k[0] == 0 { 1.0 } else { 0.0 };
            assert!((e.value - want).abs() < 1e-5, "k={k:?}: {}", e.value);
        }
    }

    #[test]
    fn support_is_structural() {
        let b = Arc::new(build_basis(2, 8).unwrap());
        let region = Rectangle::new(vec![0.25, 0.5], vec![0.5, 0.75]).unwrap();
        let f = function_coeffs(&FunctionRep::coordinate(2, 0), &b, 3, &region).unwrap();
        let n = b.support_len() as i64;
        for key in f.detail.keys() {
            let s = f64::powi(2.0, key.j as i32);
            for a in 0..2 {
                assert!(key.k[a] as f64 / s <= region.b[a]);
                assert!((key.k[a] + n) as f64 / s >= region.a[a]);
            }
        }
        // and every meeting cube is present
        for j in 0..=3u32 {
            let s = 1i64 << j;
            let mut expect = 0;
            for k0 in -20..20i64 {
                for k1 in -20..20i64 {
                    let ok = |k: i64, a: usize| {
                        (k as f64) / s as f64 <= region.b[a] && ((k + n) as f64) / s as f64 >= region.a[a]
                    };
                    if ok(k0, 0) && ok(k1, 1) {
                        expect += 3;
                    }
                }
            }
            assert_eq!(f.detail_count(j), expect);
        }
    }
}

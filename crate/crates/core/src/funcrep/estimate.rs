//! Sampled oscillation and Hölder seminorm lower bounds.

use super::FunctionRep;
use crate::dyadic::Rectangle;
use crate::par::{self, Execution};

/// `max − min` of a one-dimensional function over `samples` equispaced
/// points of `[lo, hi]` (both ends included).
pub fn oscillation(f: &FunctionRep, interval: (f64, f64), samples: usize) -> f64 {
    assert!(samples >= 2, "oscillation needs at least two samples");
    assert_eq!(f.dim(), 1);
    let (lo, hi) = interval;
    let n = samples - 1;
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * (i as f64 / n as f64) })
        .collect();
    let v = f.eval_grid(&[&xs], Execution::Parallel);
    let (mn, mx) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    mx - mn
}

const NEAR_DIAGONAL: f64 = 0.25;

/// Largest `|f(y) − f(x)| / |y − x|^α` over grid pairs with `|x − y| ≤ 1/4`,
/// plus all pairs of a coarser grid. A lower bound for the seminorm on
/// `region`.
pub fn holder_seminorm_estimate(f: &FunctionRep, alpha: f64, region: &Rectangle, grid_level: u32) -> f64 {
    assert!(grid_level >= 1);
    assert_eq!(f.dim(), region.dim());
    let d = f.dim();
    let near = near_pairs(f, alpha, region, grid_level, d);
    let coarse_level = match d {
        1 => grid_level.min(10),
        2 => grid_level.min(5),
        _ => grid_level.min(3),
    };
    near.max(all_pairs(f, alpha, region, coarse_level))
}

fn axes_for(region: &Rectangle, level: u32) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = 1u64 << level;
    let axes = (0..region.dim())
        .map(|a| (0..=n).map(|i| region.grid_coord(a, i, n)).collect())
        .collect();
    let steps = (0..region.dim()).map(|a| region.side(a) / n as f64).collect();
    (axes, steps)
}

fn near_pairs(f: &FunctionRep, alpha: f64, region: &Rectangle, level: u32, d: usize) -> f64 {
    let (axes, steps) = axes_for(region, level);
    let refs: Vec<&[f64]> = axes.iter().map(|a| a.as_slice()).collect();
    let vals = f.eval_grid(&refs, Execution::Parallel);
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let cap = match d {
        1 => usize::MAX,
        2 => 16,
        _ => 4,
    };
    let reach: Vec<usize> = steps
        .iter()
        .zip(&shape)
        .map(|(&h, &n)| {
            let r = if h > 0.0 { (NEAR_DIAGONAL / h).floor() as usize } else { 0 };
            r.min(n - 1).min(cap)
        })
        .collect();
    // lexicographically positive offsets within the near-diagonal ball
    let widths: Vec<usize> = reach.iter().map(|&r| 2 * r + 1).collect();
    let mut offsets: Vec<Vec<i64>> = Vec::new();
    for flat in 0..widths.iter().product::<usize>() {
        let mut o = vec![0i64; d];
        let mut r = flat;
        for a in (0..d).rev() {
            o[a] = (r % widths[a]) as i64 - reach[a] as i64;
            r /= widths[a];
        }
        if !matches!(o.iter().find(|&&c| c != 0), Some(&c) if c > 0) {
            continue;
        }
        let dist2: f64 = o.iter().zip(&steps).map(|(&c, h)| (c as f64 * h).powi(2)).sum();
        if dist2.sqrt() <= NEAR_DIAGONAL {
            offsets.push(o);
        }
    }
    let mut strides = vec![1usize; d];
    for a in (0..d.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    let per_offset = par::map_range(Execution::Parallel, offsets.len(), |oi| {
        let off = &offsets[oi];
        let dist: f64 = off.iter().zip(&steps).map(|(&c, h)| (c as f64 * h).powi(2)).sum::<f64>().sqrt();
        if dist == 0.0 {
            return 0.0;
        }
        let inv = 1.0 / dist.powf(alpha);
        let total = vals.len();
        let mut best = 0.0f64;
        'points: for flat in 0..total {
            let mut other = flat as i64;
            let mut r = flat;
            for a in (0..d).rev() {
                let i = (r % shape[a]) as i64;
                r /= shape[a];
                let t = i + off[a];
                if t < 0 || t >= shape[a] as i64 {
                    continue 'points;
                }
                other += off[a] * strides[a] as i64;
            }
            best = best.max((vals[other as usize] - vals[flat]).abs());
        }
        best * inv
    });
    per_offset.into_iter().fold(0.0, f64::max)
}

fn all_pairs(f: &FunctionRep, alpha: f64, region: &Rectangle, level: u32) -> f64 {
    let (axes, _) = axes_for(region, level);
    let refs: Vec<&[f64]> = axes.iter().map(|a| a.as_slice()).collect();
    let vals = f.eval_grid(&refs, Execution::Parallel);
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let d = shape.len();
    let coords = |flat: usize| {
        let mut x = vec![0.0; d];
        let mut r = flat;
        for a in (0..d).rev() {
            x[a] = axes[a][r % shape[a]];
            r /= shape[a];
        }
        x
    };
    let pts: Vec<Vec<f64>> = (0..vals.len()).map(coords).collect();
    let rows = par::map_range(Execution::Parallel, vals.len(), |i| {
        let mut best = 0.0f64;
        for k in i + 1..vals.len() {
            let dist: f64 = pts[i].iter().zip(&pts[k]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if dist > 0.0 {
                best = best.max((vals[k] - vals[i]).abs() / dist.powf(alpha));
            }
        }
        best
    });
    rows.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::{make_f_gamma_delta, make_g_beta, make_random_schauder};

    #[test]
    fn oscillation_basics() {
        assert_eq!(oscillation(&FunctionRep::constant(1, 4.0), (0.0, 1.0), 17), 0.0);
        assert_eq!(oscillation(&FunctionRep::coordinate(1, 0), (0.0, 1.0), 2), 1.0);
    }

    #[test]
    fn oscillation_lower_bound_on_dyadic_intervals() {
        let (g, d, jt) = (0.6, 1.0, 12);
        let f = make_f_gamma_delta(g, d, jt).unwrap();
        for j in 1..=8u32 {
            let w = f64::powi(2.0, -(j as i32));
            let samples = (1usize << (jt + 1 - j)) + 1;
            let bound = f64::powf(2.0, -g * j as f64) * (j as f64).powf(d) / 2.0;
            for k in [0usize, (1 << j) / 3, (1 << j) - 1] {
                let o = oscillation(&f, (k as f64 * w, (k + 1) as f64 * w), samples);
                assert!(o >= bound - 1e-15, "j={j} k={k}: {o} < {bound}");
            }
        }
    }

    #[test]
    fn seminorm_presets() {
        let r = Rectangle::unit(1);
        let s = holder_seminorm_estimate(&FunctionRep::coordinate(1, 0), 1.0, &r, 8);
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(holder_seminorm_estimate(&FunctionRep::constant(1, 2.0), 0.3, &r, 8), 0.0);
        let r2 = Rectangle::unit(2);
        let s2 = holder_seminorm_estimate(&FunctionRep::coordinate(2, 1), 1.0, &r2, 6);
        assert!((s2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seminorm_plateau_for_g_beta() {
        let g = make_g_beta(1.5, 20).unwrap();
        let r = Rectangle::unit(1);
        let s10 = holder_seminorm_estimate(&g, 0.5, &r, 10);
        let s14 = holder_seminorm_estimate(&g, 0.5, &r, 14);
        assert!(s10.is_finite() && s10 > 0.0);
        assert!(s14 >= s10 * 0.999);
        assert!(s14 <= 1.1 * s10, "{s10} -> {s14}");
    }

    #[test]
    fn schauder_criterion_bound() {
        // |c_{j,k}| ≤ C 2^{−γ j} with C = 1
        let f = make_random_schauder(0.7, 16, 3, 1.0).unwrap();
        let r = Rectangle::unit(1);
        for lvl in 8..=14 {
            let s = holder_seminorm_estimate(&f, 0.7, &r, lvl);
            assert!(s <= 8.0, "level {lvl}: {s}");
        }
    }
}

//! Data-parallel helpers.
//!
//! With the `parallel` feature the loops run on the rayon pool; without it, or
//! when [`Execution::Sequential`] is requested, they run on the calling thread.
//! Reductions use a fixed pairwise tree, so results do not depend on the
//! thread count.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    #[inline]
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

const PAIRWISE_LEAF: usize = 128;
#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 1 << 14;

/// `(0..n).map(f).collect()`, in parallel when allowed.
pub fn map_range<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Applies `f` to every element of `out` with its index.
pub fn fill_indexed<T, F>(exec: Execution, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && out.len() >= 1024 {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
        return;
    }
    let _ = exec;
    out.iter_mut().enumerate().for_each(|(i, v)| f(i, v));
}

/// Pairwise (tree) summation. The split points depend only on the length.
pub fn pairwise_sum(exec: Execution, xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    let (a, b) = xs.split_at(mid);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && xs.len() >= PAR_MIN_LEN {
        let (sa, sb) = rayon::join(|| pairwise_sum(exec, a), || pairwise_sum(exec, b));
        return sa + sb;
    }
    pairwise_sum(exec, a) + pairwise_sum(exec, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_between_modes() {
        let xs: Vec<f64> = (0..100_000).map(|i| ((i as f64) * 0.37).sin() / (1.0 + i as f64)).collect();
        let a = pairwise_sum(Execution::Parallel, &xs);
        let b = pairwise_sum(Execution::Sequential, &xs);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn pairwise_is_odd() {
        let xs: Vec<f64> = (0..5000).map(|i| (i as f64).cos() * 1e-3 + 0.1).collect();
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_eq!(pairwise_sum(Execution::Parallel, &xs), -pairwise_sum(Execution::Parallel, &neg));
    }

    #[test]
    fn map_range_keeps_order() {
        let v = map_range(Execution::Parallel, 50_000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }
}

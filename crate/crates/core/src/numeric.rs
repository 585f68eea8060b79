//! Small floating-point utilities.

/// Correctly rounded sum of a short slice (Shewchuk partials with the final
/// half-way correction).
///
/// The result is the exact sum rounded once, so it is independent of the
/// order of the inputs and `fsum(-x) == -fsum(x)` bit for bit.
pub fn fsum(xs: &[f64]) -> f64 {
    let mut partials: Vec<f64> = Vec::with_capacity(8);
    for &x0 in xs {
        let mut x = x0;
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    // half-way case: make the rounding of hi+lo+rest correct
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}

/// `n!` as a float (small `n` only).
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// All permutations of `0..n` in lexicographic order, paired with their sign.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        out.push((perm.clone(), permutation_sign(&perm)));
        // next lexicographic permutation
        let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..perm.len()).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    out
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fsum_exact_cases() {
        assert_eq!(fsum(&[1e100, 1.0, -1e100]), 1.0);
        assert_eq!(fsum(&[0.1; 10]), 1.0);
        assert_eq!(fsum(&[]), 0.0);
    }

    #[test]
    fn permutations_of_three() {
        let p = signed_permutations(3);
        assert_eq!(p.len(), 6);
        let total: f64 = p.iter().map(|(_, s)| s).sum();
        assert_eq!(total, 0.0);
        assert_eq!(p[0], (vec![0, 1, 2], 1.0));
        assert_eq!(p[1], (vec![0, 2, 1], -1.0));
    }

    proptest! {
        #[test]
        fn fsum_is_odd_and_order_free(xs in proptest::collection::vec(-1e6f64..1e6, 0..12), seed in 0u64..1000) {
            let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
            prop_assert_eq!(fsum(&xs), -fsum(&neg));
            let mut shuffled = xs.clone();
            let n = shuffled.len();
            if n > 1 {
                let k = (seed as usize) % n;
                shuffled.rotate_left(k);
                shuffled.swap(0, n - 1);
            }
            prop_assert_eq!(fsum(&xs), fsum(&shuffled));
        }
    }
}

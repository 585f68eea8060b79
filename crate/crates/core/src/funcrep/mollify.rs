//! Convolution with a compactly supported polynomial bump.

use std::sync::Arc;

use super::{FunctionRep, Node};
use crate::error::{Error, Result};

/// Quadrature nodes per axis.
pub const MOLLIFIER_NODES: usize = 64;

/// Midpoint nodes of `[−1/n, 1/n]` with weights `∝ (1 − (n t)²)²`, summing to 1.
fn kernel_nodes(n: u32) -> Vec<(f64, f64)> {
    let r = 1.0 / n as f64;
    let h = 2.0 * r / MOLLIFIER_NODES as f64;
    let raw: Vec<(f64, f64)> = (0..MOLLIFIER_NODES)
        .map(|i| {
            let t = (i as f64 + 0.5 - MOLLIFIER_NODES as f64 / 2.0) * h;
            let u = 1.0 - (t * n as f64).powi(2);
            (t, u * u)
        })
        .collect();
    let mass: f64 = raw.iter().map(|p| p.1).sum();
    raw.into_iter().map(|(t, w)| (t, w / mass)).collect()
}

/// `f * ρ_n` with `ρ_n(t) = ∏_i n ρ(n t_i)`.
///
/// Affine pieces are returned unchanged; sums, scalings and one-coordinate
/// lifts are mollified component-wise (the kernel is a tensor product).
pub fn mollify(f: &FunctionRep, n: u32) -> Result<FunctionRep> {
    if n == 0 {
        return Err(Error::invalid("mollification parameter must be at least 1"));
    }
    match f.node() {
        Node::Constant(_) | Node::Coordinate(_) => Ok(f.clone()),
        Node::Monomial { power, .. } if *power == 0.0 || *power == 1.0 => Ok(f.clone()),
        Node::Sum(parts) => FunctionRep::sum(parts.iter().map(|p| mollify(p, n)).collect::<Result<_>>()?),
        Node::Scaled { factor, of } => Ok(mollify(of, n)?.scaled(*factor)),
        Node::Tensor1d { of, axis } => FunctionRep::tensor1d(mollify(of, n)?, *axis, f.dim()),
        _ => {
            let description = format!("mollify({},n={n})", f.description());
            Ok(FunctionRep::from_node(
                Node::Mollified {
                    of: f.clone(),
                    nodes: Arc::new(kernel_nodes(n)),
                },
                f.dim(),
                f.holder(),
                description,
            ))
        }
    }
}

pub(super) fn eval_mollified(of: &FunctionRep, nodes: &[(f64, f64)], x: &[f64]) -> f64 {
    let d = x.len();
    if d == 1 {
        let mut s = 0.0;
        for &(t, w) in nodes {
            s += w * of.eval(&[x[0] - t]);
        }
        return s;
    }
    let m = nodes.len();
    let mut y = x.to_vec();
    let mut s = 0.0;
    for flat in 0..m.pow(d as u32) {
        let mut r = flat;
        let mut w = 1.0;
        for a in (0..d).rev() {
            let (t, wa) = nodes[r % m];
            r /= m;
            y[a] = x[a] - t;
            w *= wa;
        }
        s += w * of.eval(&y);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Rectangle;
    use crate::fit::fit_line;
    use crate::funcrep::{holder_seminorm_estimate, make_f_gamma_delta, make_random_schauder};
    use crate::par::Execution;

    #[test]
    fn weights_are_a_symmetric_probability() {
        let k = kernel_nodes(5);
        let mass: f64 = k.iter().map(|p| p.1).sum();
        assert!((mass - 1.0).abs() < 1e-15);
        for i in 0..MOLLIFIER_NODES {
            let j = MOLLIFIER_NODES - 1 - i;
            assert!((k[i].0 + k[j].0).abs() < 1e-15);
            assert_eq!(k[i].1, k[j].1);
        }
    }

    #[test]
    fn affine_inputs_unchanged() {
        let c = FunctionRep::constant(2, 3.5);
        assert_eq!(mollify(&c, 4).unwrap().eval(&[0.1, 0.2]), 3.5);
        let x = FunctionRep::coordinate(2, 1);
        assert_eq!(mollify(&x, 4).unwrap().eval(&[0.1, 0.2]), 0.2);
        // general path: a constant hidden in a product still averages to itself
        let p = FunctionRep::product(vec![FunctionRep::constant(1, 2.0), FunctionRep::constant(1, 1.5)]).unwrap();
        assert!((mollify(&p, 3).unwrap().eval(&[0.4]) - 3.0).abs() < 1e-14);
        let lin = FunctionRep::grid_sample(Rectangle::new(vec![-5.0], vec![5.0]).unwrap(), vec![2], vec![-5.0, 5.0]).unwrap();
        assert!((mollify(&lin, 3).unwrap().eval(&[0.4]) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn sup_distance_rate() {
        let f = make_f_gamma_delta(0.5, 0.0, 18).unwrap();
        let xs: Vec<f64> = (0..=8192).map(|i| i as f64 / 8192.0).collect();
        let fv = f.eval_grid(&[&xs], Execution::Parallel);
        let seminorm = holder_seminorm_estimate(&f, 0.5, &Rectangle::unit(1), 12);
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for n in [4u32, 8, 16, 32, 64, 128, 256] {
            let m = mollify(&f, n).unwrap();
            let mv = m.eval_grid(&[&xs], Execution::Parallel);
            let dist = fv.iter().zip(&mv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(dist <= seminorm * (n as f64).powf(-0.5), "n={n}");
            lx.push((n as f64).log2());
            ly.push(dist.log2());
        }
        // coarse n sit before the asymptotic regime (peak at 1/2 cancels against deeper valleys)
        let coarse = fit_line(&lx[..4], &ly[..4]).unwrap().slope;
        assert!(coarse < -0.25 && coarse > -0.6, "coarse slope {coarse}");
        let slope = fit_line(&lx[3..], &ly[3..]).unwrap().slope;
        assert!((slope + 0.5).abs() <= 0.1, "slope {slope}, {ly:?}");
    }

    #[test]
    fn seminorm_does_not_increase() {
        let f = make_random_schauder(0.6, 14, 11, 1.0).unwrap();
        let k = Rectangle::new(vec![0.25], vec![0.75]).unwrap();
        for n in [4u32, 16] {
            let m = mollify(&f, n).unwrap();
            let fat = k.fatten(1.0 / n as f64);
            let sm = holder_seminorm_estimate(&m, 0.6, &k, 11);
            let sf = holder_seminorm_estimate(&f, 0.6, &fat, 11);
            assert!(sm <= sf, "n={n}: {sm} > {sf}");
        }
    }
}

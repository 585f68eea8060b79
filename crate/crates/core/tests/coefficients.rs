use std::sync::Arc;

use roughform::funcrep::make_random_schauder;
use roughform::par::Execution;
use roughform::sewing::zust_integral;
use roughform::wavelets::{build_basis, WaveletBasis};
use roughform::{CoefficientField, DistributionConfig, DistributionRep, FunctionRep, Rectangle, SewingConfig};

fn basis() -> Arc<WaveletBasis> {
    Arc::new(build_basis(2, 10).unwrap())
}

fn quick(exec: Execution) -> DistributionConfig {
    DistributionConfig {
        start_offset: 3,
        max_offset: 4,
        execution: exec,
        ..Default::default()
    }
}

fn rough(seed: u64, axis: usize) -> FunctionRep {
    FunctionRep::tensor1d(make_random_schauder(0.8, 10, seed, 1.0).unwrap(), axis, 2).unwrap()
}

fn holder_g() -> Vec<FunctionRep> {
    vec![
        FunctionRep::sum(vec![FunctionRep::coordinate(2, 0), rough(3, 0), rough(4, 1)]).unwrap(),
        FunctionRep::sum(vec![FunctionRep::coordinate(2, 1), rough(5, 1), rough(6, 0)]).unwrap(),
    ]
}

fn bump() -> FunctionRep {
    FunctionRep::bump(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
}

fn sweep(f: FunctionRep, g: Vec<FunctionRep>, region: &Rectangle, exec: Execution) -> CoefficientField {
    DistributionRep::new(f, g, basis(), quick(exec))
        .unwrap()
        .coeff_sweep(2, region)
        .unwrap()
}

fn entries(c: &CoefficientField) -> Vec<(u32, u32, Vec<i64>, f64)> {
    let mut v: Vec<_> = c.scaling.iter().map(|(k, e)| (0, 0, k.clone(), e.value)).collect();
    v.extend(c.detail.iter().map(|(key, e)| (key.i, key.j, key.k.clone(), e.value)));
    v
}

#[test]
fn supported_f_makes_the_region_irrelevant() {
    let small = sweep(bump(), holder_g(), &Rectangle::cube(2, -1.0, 2.0), Execution::Parallel);
    let large = sweep(bump(), holder_g(), &Rectangle::cube(2, -3.0, 4.0), Execution::Parallel);
    for (i, j, k, v) in entries(&small) {
        let w = if i == 0 { large.scaling(&k) } else { large.detail(i, j, &k) };
        assert_eq!(v.to_bits(), w.to_bits(), "i={i} j={j} k={k:?}");
    }
    assert!(!small.is_empty());
}

#[test]
fn swapping_g_negates_every_coefficient() {
    let r = Rectangle::cube(2, -0.5, 1.5);
    let g = holder_g();
    let a = sweep(bump(), g.clone(), &r, Execution::Parallel);
    let b = sweep(bump(), vec![g[1].clone(), g[0].clone()], &r, Execution::Parallel);
    let (ea, eb) = (entries(&a), entries(&b));
    assert_eq!(ea.len(), eb.len());
    for (x, y) in ea.iter().zip(&eb) {
        assert_eq!((x.0, x.1, &x.2), (y.0, y.1, &y.2));
        assert!(x.3 == -y.3, "{} vs {}", x.3, y.3);
    }
}

#[test]
fn linear_in_f() {
    let r = Rectangle::cube(2, -0.5, 1.5);
    let f1 = bump();
    let f2 = FunctionRep::product(vec![bump(), rough(9, 1)]).unwrap();
    let lam = -0.75;
    let combo = FunctionRep::sum(vec![f1.clone(), f2.clone().scaled(lam)]).unwrap();
    let a = sweep(f1, holder_g(), &r, Execution::Parallel);
    let b = sweep(f2, holder_g(), &r, Execution::Parallel);
    let c = sweep(combo, holder_g(), &r, Execution::Parallel);
    for (i, j, k, v) in entries(&c) {
        let (x, y) = if i == 0 {
            (a.scaling(&k), b.scaling(&k))
        } else {
            (a.detail(i, j, &k), b.detail(i, j, &k))
        };
        // adaptive stopping may pick different lattices per term
        assert!((v - (x + lam * y)).abs() <= 1e-3 * f64::powf(2.0, 0.4 * j as f64) + 1e-12, "i={i} j={j} k={k:?}");
    }
}

#[test]
fn execution_modes_agree_bitwise() {
    let r = Rectangle::cube(2, -0.5, 1.5);
    let a = sweep(bump(), holder_g(), &r, Execution::Parallel);
    let b = sweep(bump(), holder_g(), &r, Execution::Sequential);
    assert_eq!(entries(&a).len(), entries(&b).len());
    for (x, y) in entries(&a).iter().zip(&entries(&b)) {
        assert_eq!(x.3.to_bits(), y.3.to_bits());
    }
    let f = FunctionRep::sum(vec![FunctionRep::constant(2, 1.0), rough(1, 0)]).unwrap();
    let cfg = |execution| SewingConfig {
        max_level: 8,
        tolerance: 1e-12,
        execution,
        ..Default::default()
    };
    let p = zust_integral(&f, &holder_g(), &Rectangle::unit(2), &cfg(Execution::Parallel)).unwrap();
    let s = zust_integral(&f, &holder_g(), &Rectangle::unit(2), &cfg(Execution::Sequential)).unwrap();
    assert_eq!(p, s);
}

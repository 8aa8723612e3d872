use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use syscow_core::flat_model::{
    covering_pushforward, product_model_stsys, spherical_restricted_systole, torus_stable_2_systole,
    FlatTorusMetric, H2Class, ModelFile, ProductModel,
};

/// Gram matrix `AᵀA + εI` from random entries.
fn gram(n: usize) -> impl Strategy<Value = FlatTorusMetric> {
    prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |e| {
        let a = DMatrix::from_row_slice(n, n, &e);
        FlatTorusMetric::new(a.transpose() * &a + DMatrix::identity(n, n) * 0.3).unwrap()
    })
}

fn unimodular(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec((0..n, 0..n, -1i64..=1), 0..5).prop_map(move |ops| {
        let mut u = DMatrix::<f64>::identity(n, n);
        for (i, j, c) in ops {
            if i != j {
                let col = u.column(j) * c as f64;
                let mut target = u.column_mut(i);
                target += col;
            }
        }
        u
    })
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_torus_systole_is_the_area(g in gram(2)) {
        let s = torus_stable_2_systole(&g).unwrap().value;
        prop_assert!(rel_close(s, g.gram().determinant().sqrt()));
    }

    #[test]
    fn systole_scales_with_area(g in (2usize..=4).prop_flat_map(gram), c in 0.2f64..5.0) {
        let a = torus_stable_2_systole(&g).unwrap().value;
        let b = torus_stable_2_systole(&g.scaled(c * c).unwrap()).unwrap().value;
        prop_assert!(rel_close(a * c * c, b));
    }

    #[test]
    fn systole_is_invariant_under_integral_basis_change(
        (g, u) in (2usize..=4).prop_flat_map(|n| (gram(n), unimodular(n))),
    ) {
        let m = u.transpose() * g.gram() * &u;
        let moved = FlatTorusMetric::new((&m + m.transpose()) * 0.5).unwrap();
        let a = torus_stable_2_systole(&g).unwrap().value;
        let b = torus_stable_2_systole(&moved).unwrap().value;
        prop_assert!(rel_close(a, b), "{} vs {}", a, b);
    }

    #[test]
    fn covers_never_shrink_the_systole(g in (2usize..=3).prop_flat_map(gram), r in 0.3f64..3.0, l in 1i64..5) {
        let base = ProductModel::new(vec![r], Some(g)).unwrap();
        let a = product_model_stsys(&base).unwrap().value;
        let b = product_model_stsys(&base.covered(l).unwrap()).unwrap().value;
        prop_assert!(b >= a * (1.0 - 1e-12));
        let sa = spherical_restricted_systole(&base).unwrap().value;
        let sb = spherical_restricted_systole(&base.covered(l).unwrap()).unwrap().value;
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn pushforward_scales_torus_norms(g in (2usize..=4).prop_flat_map(gram), l in 1i64..6, seed in prop::collection::vec(-3i64..=3, 6)) {
        let n = g.dim();
        let pairs: Vec<i64> = seed.into_iter().take(n * (n - 1) / 2).collect();
        prop_assume!(pairs.iter().any(|&x| x != 0));
        let cls = H2Class::torus_from_pairs(n, &pairs);
        let model = ProductModel::new(vec![], Some(g)).unwrap();
        let pushed = covering_pushforward(&cls, l).unwrap();
        let a = model.class_norm(&pushed).unwrap();
        let b = model.class_norm(&cls).unwrap() * (l * l) as f64;
        prop_assert!(rel_close(a, b));
    }
}

#[test]
fn unit_sphere_products() {
    let m = ProductModel::new(vec![1.0, 1.0], None).unwrap();
    let s = product_model_stsys(&m).unwrap();
    assert!((s.value - 4.0 * PI).abs() < 1e-12);
    assert_eq!(s.over_pi, Some(4.0));
    let m = ProductModel::new(vec![2.0, 0.5, 1.0], None).unwrap();
    let s = product_model_stsys(&m).unwrap();
    assert!((s.value - PI).abs() < 1e-12);
    assert_eq!(s.witness.sphere_part, vec![0, 1, 0]);
}

#[test]
fn mixed_classes_cost_the_sum_of_parts() {
    let t = FlatTorusMetric::diagonal(&[1.0, 4.0]).unwrap();
    let m = ProductModel::new(vec![1.0], Some(t)).unwrap();
    let mut cls = H2Class::torus_from_pairs(2, &[1]);
    cls.sphere_part = vec![1];
    assert!((m.class_norm(&cls).unwrap() - (4.0 * PI + 2.0)).abs() < 1e-12);
    let s = product_model_stsys(&m).unwrap();
    assert!((s.value - 2.0).abs() < 1e-12);
    assert_eq!(s.witness.torus_pairs(), vec![1]);
}

#[test]
fn rectangular_torus_enumeration() {
    for sides in [[1.0, 2.0, 3.0], [0.3, 5.0, 0.7], [2.0, 2.0, 2.0]] {
        let g = FlatTorusMetric::diagonal(&sides.map(|s| s * s)).unwrap();
        let got = torus_stable_2_systole(&g).unwrap().value;
        let want = (sides[0] * sides[1]).min(sides[0] * sides[2]).min(sides[1] * sides[2]);
        assert!(rel_close(got, want));
    }
}

#[test]
fn model_files() {
    let f: ModelFile = serde_json::from_str(r#"{"spheres": [1.5], "torus": {"gram": [[1, 0], [0, 9]]}}"#).unwrap();
    let m = ProductModel::from_file(&f).unwrap();
    assert!((product_model_stsys(&m).unwrap().value - 3.0).abs() < 1e-12);
    let bad: ModelFile = serde_json::from_str(r#"{"spheres": [1.0], "torus": {"gram": [[1, 2], [2, 1]]}}"#).unwrap();
    assert!(ProductModel::from_file(&bad).is_err());
    assert!(ProductModel::new(vec![-1.0], None).is_err());
    assert!(ProductModel::new(vec![], None).is_err());
}

use std::f64::consts::PI;

use folpi::ode::OdeOptions;
use folpi::saddle::{
    col_passage, dulac_map, flow, holonomy, winding_bound, FieldKind, SaddleModel, DECADES,
};
use num_complex::Complex64 as C;

fn loop_drift(model: &SaddleModel, u: f64) -> f64 {
    let path = [C::new(0.0, 0.0), C::new(0.0, 2.0 * PI)];
    let tr = flow(model, (C::new(1.0, 0.0), C::new(u, 0.0)), FieldKind::X, &path, &OdeOptions::default()).unwrap();
    tr.first_integral_drift.unwrap()
}

#[test]
fn drift_scales_like_inverse_leaf_size() {
    let m = SaddleModel::normal_form(1, 1, 1, C::new(0.5, 0.0)).unwrap();
    let scaled: Vec<f64> = [1e-3, 1e-2, 5e-2].iter().map(|&u| loop_drift(&m, u) * u).collect();
    let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    assert!(hi < 1e-8, "{scaled:?}");
    assert!(hi / lo < 20.0, "{scaled:?}");
}

#[test]
fn dulac_methods_agree_below_one() {
    for (p, q) in [(1, 3), (2, 5)] {
        let m = SaddleModel::linear(p, q).unwrap();
        for r in DECADES {
            let v = dulac_map(&m, r, 0.5, 0.0).unwrap();
            assert!(v.agreement.unwrap() < 1e-7, "{p}/{q} r={r} {v:?}");
        }
    }
}

#[test]
fn linear_holonomy_is_a_rotation() {
    let m = SaddleModel::linear(2, 5).unwrap();
    let y0 = C::from_polar(0.03, 1.1);
    let h = holonomy(&m, y0).unwrap();
    let expect = y0 * C::from_polar(1.0, -2.0 * PI * m.lambda());
    assert!((h - expect).norm() < 1e-10, "{h} vs {expect}");
}

#[test]
fn windings_respect_the_bound() {
    for spec in ["linear:3", "normal:1:k=1:alpha=0.5", "dulac:1:x*y"] {
        let m = SaddleModel::parse(spec).unwrap();
        let w = winding_bound(&m, &[1e-2, 5e-2]).unwrap();
        assert!(w.ok, "{spec}: {w:?}");
    }
}

#[test]
fn col_passage_reaches_the_unit_circle() {
    let m = SaddleModel::parse("dulac:1/2:x*y").unwrap();
    for x in [C::new(1e-2, 0.0), C::from_polar(1e-3, 2.0)] {
        let c = col_passage(&m, x, 0.3).unwrap();
        assert!((c.x.norm() - 1.0).abs() < 1e-9);
        assert!(c.y.norm() < 1.0 && c.tau > 0.0);
    }
}

#[test]
fn out_of_range_inputs_are_rejected() {
    let m = SaddleModel::linear(1, 1).unwrap();
    assert!(col_passage(&m, C::new(0.5, 0.0), 0.0).is_err());
    assert!(SaddleModel::parse("linear:0").is_err());
    assert!(SaddleModel::parse("normal:1:k=0:alpha=0").is_err());
}

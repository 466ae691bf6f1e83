use std::f64::consts::TAU;

use folpi::rabotage::{collar_contains, collar_slice, sweep_domain, verify_bounds_sweep_with, SWEEP_SIZES};
use folpi::saddle::{ExponentConvention, SaddleModel};
use num_complex::Complex64 as C;

#[test]
fn slice_boundary_matches_leaf_membership() {
    for spec in ["linear:1", "dulac:1:x*y", "normal:1:k=1:alpha=0.5"] {
        let m = SaddleModel::parse(spec).unwrap();
        let delta = sweep_domain(2e-2, 1024).unwrap();
        let (slice, _) = collar_slice(&m, &delta, 0.0).unwrap();
        for i in 0..32 {
            let psi = (i as f64 + 0.5) * TAU / 32.0;
            let r = slice.radius(psi);
            let inner = collar_contains(&m, &delta, C::from_polar(0.999 * r, psi), 0.0).unwrap();
            let outer = collar_contains(&m, &delta, C::from_polar(1.001 * r, psi), 0.0).unwrap();
            assert!(inner && !outer, "{spec} psi={psi} r={r}");
        }
    }
}

#[test]
fn normal_form_sweep_shrinks_like_the_domain() {
    for spec in ["normal:1:k=1:alpha=0", "normal:1:k=1:alpha=0.5"] {
        let m = SaddleModel::parse(spec).unwrap();
        let rep = verify_bounds_sweep_with(&m, &SWEEP_SIZES, 1024);
        assert!(rep.aborted.is_none(), "{spec}: {:?}", rep.aborted);
        assert!(rep.loss_decreasing, "{spec}");
        assert!(rep.rows.iter().all(|r| r.size_prime < r.size), "{spec}");
        let slope = rep.slope.unwrap();
        assert!((slope - 1.0).abs() < 0.05, "{spec}: {slope}");
        assert!(!matches!(rep.convention, None | Some(ExponentConvention::Neither)), "{spec}");
    }
}

use std::f64::consts::PI;

use fdpb_core::algebra::{buchdahl_rep, derived_ops, FdpbRep};
use fdpb_core::matrix::{commutator, eig_general, sort_complex, Matrix, Tolerance, C64};
use fdpb_core::models::chain_spectrum;
use fdpb_core::{n4_alpha, shifted_oscillator, swanson, swanson_spectrum_report, Error};

const THETAS: [f64; 6] = [PI / 12.0, -PI / 12.0, PI / 8.0, -PI / 8.0, PI / 6.0, -PI / 6.0];

fn base(n: usize) -> FdpbRep {
    buchdahl_rep(n).unwrap().as_fdpb()
}

fn audit_tol() -> Tolerance {
    Tolerance::absolute(1e-8).unwrap()
}

#[test]
fn rotation_keeps_the_commutator() {
    for n in 2..=8 {
        let rep = base(n);
        for theta in THETAS {
            let m = swanson(&rep, theta, Tolerance::default()).unwrap();
            let comm = commutator(&m.a_theta, &m.b_theta).unwrap();
            assert!(comm.max_abs_diff(&rep.deformation()) < 1e-12);
            assert!(m.h_theta.max_abs_diff(&m.h_theta_ladder) < 1e-10);
        }
    }
}

#[test]
fn realness_iff_intertwining() {
    for n in 2..=8 {
        for theta in THETAS {
            let m = swanson(&base(n), theta, Tolerance::default()).unwrap();
            let r = swanson_spectrum_report(&m, audit_tol()).unwrap();
            assert_eq!(r.computed.len(), n);
            assert!(r.biconditional_holds(), "n = {n}, theta = {theta}: {r:?}");
            assert!(r.biorthonormality_residual < 1e-8);
        }
    }
}

#[test]
fn two_dimensional_closed_form() {
    for theta in THETAS {
        let m = swanson(&base(2), theta, Tolerance::default()).unwrap();
        let r = swanson_spectrum_report(&m, audit_tol()).unwrap();
        for z in &r.computed {
            assert!((z.re - 0.5).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
        assert!(r.match_unscaled);
        assert!(!r.match_scaled);
        assert!(r.all_real && r.intertwines);
    }
}

#[test]
fn scaled_pattern_fails_beyond_two() {
    // For n ≥ 3 the truncated H_θ has complex pairs, so neither pattern matches.
    let m = swanson(&base(3), PI / 12.0, Tolerance::default()).unwrap();
    let r = swanson_spectrum_report(&m, audit_tol()).unwrap();
    assert!(r.max_imag > 0.1);
    assert!(!r.match_scaled && !r.match_unscaled);
    assert!(!r.all_real && !r.intertwines);
}

#[test]
fn small_angle_is_close_to_h() {
    // Odd n: the spectrum of h is simple and the first-order shift vanishes.
    for n in [3, 5, 7] {
        let m = swanson(&base(n), 1e-3, Tolerance::default()).unwrap();
        let r = swanson_spectrum_report(&m, audit_tol()).unwrap();
        for (z, e) in r.computed.iter().zip(chain_spectrum(n)) {
            assert!((C64::from(*z) - C64::new(e, 0.0)).norm() < 1e-4, "{r:?}");
        }
    }
}

#[test]
fn small_angle_splits_the_doubled_level() {
    // Even n: (n−1)/2 is reached twice and the pair splits linearly in θ into
    // a complex-conjugate pair; the simple levels stay within O(θ²).
    let n = 4;
    let theta = 1e-3;
    let m = swanson(&base(n), theta, Tolerance::default()).unwrap();
    let r = swanson_spectrum_report(&m, audit_tol()).unwrap();
    let z: Vec<C64> = r.computed.iter().map(|&z| z.into()).collect();
    assert!((z[0] - C64::new(0.5, 0.0)).norm() < 1e-4);
    assert!((z[3] - C64::new(2.5, 0.0)).norm() < 1e-4);
    for w in &z[1..3] {
        assert!((w.re - 1.5).abs() < 1e-4);
        assert!((w.im.abs() - 6f64.sqrt() * theta).abs() < 1e-5, "{z:?}");
    }
}

#[test]
fn deformed_base_is_accepted() {
    let rep = n4_alpha(0.5).unwrap();
    let m = swanson(&rep, PI / 8.0, Tolerance::default()).unwrap();
    assert!(m.report.pass);
    let r = swanson_spectrum_report(&m, audit_tol()).unwrap();
    assert!(r.biconditional_holds());
}

#[test]
fn theta_guard() {
    let rep = base(3);
    assert!(matches!(
        swanson(&rep, 1e-13, Tolerance::default()),
        Err(Error::InvalidParameter(_))
    ));
    assert!(swanson(&rep, PI / 4.0, Tolerance::default()).is_err());
}

#[test]
fn report_serializes_with_documented_keys() {
    let m = swanson(&base(3), PI / 8.0, Tolerance::default()).unwrap();
    let r = swanson_spectrum_report(&m, audit_tol()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in [
        "theta",
        "omega",
        "computed",
        "match_scaled",
        "match_unscaled",
        "max_imag",
        "intertwiner_residual",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["computed"][0].get("re").is_some() && v["computed"][0].get("im").is_some());
}

#[test]
fn shifted_two_dimensional_closed_form() {
    let s = shifted_oscillator(&base(2), 1.0).unwrap();
    let expected = Matrix::from_rows(&[
        vec![C64::new(0.5, 0.0), C64::new(1.0, 0.0)],
        vec![C64::new(-1.0, 0.0), C64::new(0.5, 0.0)],
    ])
    .unwrap();
    assert!(s.h_beta.max_abs_diff(&expected) < 1e-15);
    // Eigenvalues of [[1/2, 1], [−1, 1/2]] are 1/2 ± i.
    let mut want = vec![C64::new(0.5, -1.0), C64::new(0.5, 1.0)];
    sort_complex(&mut want);
    for (z, w) in s.spectrum.iter().zip(&want) {
        assert!((z - w).norm() < 1e-12);
    }
    assert!((s.max_imag - 1.0).abs() < 1e-12);
}

#[test]
fn shifted_is_linear_in_beta() {
    for rep in [base(5), n4_alpha(0.5).unwrap()] {
        let d = derived_ops(&rep);
        let quad = (&d.p * &d.p + &d.q * &d.q) * 0.5;
        let one = shifted_oscillator(&rep, 1.0).unwrap().h_beta;
        let two = shifted_oscillator(&rep, 2.0).unwrap().h_beta;
        assert!((two - one).max_abs_diff(&quad) < 1e-12);
    }
    let s = shifted_oscillator(&n4_alpha(0.5).unwrap(), 1.0).unwrap();
    let mut check = eig_general(&s.h_beta).unwrap().values;
    sort_complex(&mut check);
    assert_eq!(check.len(), 4);
    assert!(s.max_imag.is_finite());
}

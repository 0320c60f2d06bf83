use fdpb_core::algebra::{buchdahl_rep, derived_ops, random_s0, similarity_deform, validate_rep, FdpbRep};
use fdpb_core::chain::{build_system, reconstruct_operators};
use fdpb_core::matrix::{eig_general, sort_complex, Matrix, Tolerance, C64};
use fdpb_core::run_pipeline;

/// `{1/2, 3/2, ..., n − 3/2} ∪ {(n − 1)/2}`, ascending.
fn expected_spectrum(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n - 1).map(|j| j as f64 + 0.5).collect();
    v.push((n as f64 - 1.0) / 2.0);
    v.sort_by(f64::total_cmp);
    v
}

fn deformed(n: usize, seed: u64) -> FdpbRep {
    let base = buchdahl_rep(n).unwrap();
    let s0 = random_s0(n, seed, 100.0).unwrap();
    similarity_deform(&base, &s0, C64::ONE, Tolerance::default()).unwrap()
}

fn assert_spectrum(rep: &FdpbRep) {
    let n = rep.n();
    let mut values = eig_general(&derived_ops(rep).h).unwrap().values;
    sort_complex(&mut values);
    for (z, e) in values.iter().zip(expected_spectrum(n)) {
        assert!((z.re - e).abs() < 1e-8 && z.im.abs() < 1e-8, "n = {n}: {values:?}");
    }
    let tr = derived_ops(rep).h.trace();
    assert!((tr.re - (n * (n - 1)) as f64 / 2.0).abs() < 1e-8 && tr.im.abs() < 1e-8);
}

#[test]
fn buchdahl_corpus() {
    for n in 2..=12 {
        let rep = buchdahl_rep(n).unwrap().as_fdpb();
        let out = run_pipeline(&rep, Tolerance::default());
        assert!(out.report.pass, "n = {n}\n{}", out.report);
        assert!(out.report.max_residual() < 1e-12, "n = {n}\n{}", out.report);
        assert_spectrum(&rep);
    }
}

#[test]
fn seeded_deformations() {
    for n in 2..=8 {
        for seed in 0..20 {
            let rep = deformed(n, seed);
            let out = run_pipeline(&rep, Tolerance::default());
            assert!(out.report.pass, "n = {n}, seed = {seed}\n{}", out.report);
            assert!(out.report.max_residual() < 1e-8);
            assert_spectrum(&rep);
            let sys = out.system.unwrap();
            let mut labels: Vec<f64> = sys.labels.iter().map(|l| l.h()).collect();
            labels.sort_by(f64::total_cmp);
            assert_eq!(labels, expected_spectrum(n));
        }
    }
}

#[test]
fn rank_one_reconstruction() {
    let rep = deformed(6, 7);
    let sys = build_system(&rep, Tolerance::default()).unwrap();
    let (a, b) = reconstruct_operators(&sys);
    assert!(a.max_abs_diff(rep.a()) < 1e-10);
    assert!(b.max_abs_diff(rep.b()) < 1e-10);
}

#[test]
fn deformation_is_reproducible() {
    let x = deformed(5, 42);
    let y = deformed(5, 42);
    assert_eq!(x.a().max_abs_diff(y.a()), 0.0);
    assert!(deformed(5, 43).a().max_abs_diff(x.a()) > 0.0);
}

#[test]
fn unitary_deformation_keeps_adjointness() {
    let n = 4;
    let base = buchdahl_rep(n).unwrap();
    let t = 0.3f64;
    let u = Matrix::from_rows(&[
        vec![C64::new(t.cos(), 0.0), C64::new(0.0, t.sin()), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, t.sin()), C64::new(t.cos(), 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0)],
    ])
    .unwrap();
    let rep = similarity_deform(&base, &u, C64::from_polar(1.0, 1.1), Tolerance::default()).unwrap();
    assert!(rep.b().max_abs_diff(&rep.a().adjoint()) < 1e-10);
    let generic = deformed(n, 1);
    assert!(generic.b().max_abs_diff(&generic.a().adjoint()) > 1e-3);
}

#[test]
fn perturbed_triple_is_rejected() {
    let rep = deformed(4, 3);
    let mut a = rep.a().clone();
    a[(0, 1)] += C64::new(1e-6, 0.0);
    let broken = FdpbRep::new(a, rep.b().clone(), rep.k().clone()).unwrap();
    let r = validate_rep(&broken, Tolerance::default());
    assert!(!r.pass);
}

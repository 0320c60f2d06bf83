//! Finite-dimensional pseudo-bosonic triples `(a, b, k)` with
//! `[a, b] = 1 - n k`, `k a = b k = 0` and `k` an orthogonal projector, and
//! their Hermitian counterpart `(c, K)` with `[c, c^H] = 1 - n K`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{anticommutator, c64, commutator, condition_number, inverse, Matrix, Tolerance, C64};
use crate::report::ValidationReport;

/// Similarity transforms worse conditioned than this are rejected.
pub const MAX_DEFORM_CONDITION: f64 = 1e6;

/// A triple `(a, b, k)` of `n x n` matrices. Construction only checks shapes;
/// whether the triple obeys the deformed rule is decided by [`validate_rep`].
#[derive(Clone, Debug, PartialEq)]
pub struct FdpbRep {
    n: usize,
    a: Matrix,
    b: Matrix,
    k: Matrix,
}

impl FdpbRep {
    pub fn new(a: Matrix, b: Matrix, k: Matrix) -> Result<Self> {
        let n = a.dim();
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        for m in [&b, &k] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
        }
        Ok(FdpbRep { n, a, b, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn k(&self) -> &Matrix {
        &self.k
    }

    /// `1 - n k`.
    pub fn deformation(&self) -> Matrix {
        Matrix::identity(self.n) - &self.k * self.n as f64
    }

    /// The adjoint triple `(A, B, k) = (b^H, a^H, k)`, which obeys the same rule.
    pub fn adjoint_pair(&self) -> (Matrix, Matrix) {
        (self.b.adjoint(), self.a.adjoint())
    }
}

/// `(c, K)` with `[c, c^H] = 1 - n K`, `K c = 0`, `K` an orthogonal projector.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianRep {
    pub n: usize,
    pub c: Matrix,
    pub big_k: Matrix,
}

impl HermitianRep {
    /// The triple `(c, c^H, K)`.
    pub fn as_fdpb(&self) -> FdpbRep {
        FdpbRep {
            n: self.n,
            a: self.c.clone(),
            b: self.c.adjoint(),
            k: self.big_k.clone(),
        }
    }

    pub fn validate(&self, tol: Tolerance) -> ValidationReport {
        let n = self.n;
        let c = &self.c;
        let kk = &self.big_k;
        let cd = c.adjoint();
        let mut r = ValidationReport::new();
        let rule = Matrix::identity(n) - kk * n as f64;
        let comm = c * &cd - &cd * c;
        r.record(
            "[c,c†] − (1 − n·K)",
            comm.max_abs_diff(&rule),
            tol.threshold(prod_scale(c, &cd)),
        );
        r.record("K·c", (kk * c).max_abs(), tol.threshold(prod_scale(kk, c)));
        r.record("K − K²", kk.max_abs_diff(&(kk * kk)), tol.threshold(prod_scale(kk, kk)));
        r.record("K − K†", kk.max_abs_diff(&kk.adjoint()), tol.threshold(kk.max_abs()));
        r
    }
}

/// Rounding scale of a product `x y`.
pub(crate) fn prod_scale(x: &Matrix, y: &Matrix) -> f64 {
    x.dim() as f64 * x.max_abs() * y.max_abs()
}

/// Truncated oscillator: `c[m-1][m] = sqrt(m)`, `K` the projector on the last
/// basis vector.
pub fn buchdahl_rep(n: usize) -> Result<HermitianRep> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    let mut c = Matrix::zeros(n);
    for m in 1..n {
        c[(m - 1, m)] = c64((m as f64).sqrt(), 0.0);
    }
    let mut big_k = Matrix::zeros(n);
    big_k[(n - 1, n - 1)] = C64::ONE;
    Ok(HermitianRep { n, c, big_k })
}

/// Conjugates the Hermitian base by `S = diag(s0, s)`:
/// `a = S c S^-1`, `b = S c^H S^-1`, `k = S K S^-1`.
pub fn similarity_deform(base: &HermitianRep, s0: &Matrix, s: C64, tol: Tolerance) -> Result<FdpbRep> {
    let n = base.n;
    if s0.dim() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: s0.dim(),
        });
    }
    if s.norm() == 0.0 {
        return Err(Error::InvalidParameter("s must be non-zero".into()));
    }
    let big_s = Matrix::block_diag(s0, s);
    let s_inv = inverse(&big_s, tol)?;
    let cond = condition_number(&big_s)?;
    if cond > MAX_DEFORM_CONDITION {
        return Err(Error::IllConditioned {
            condition: cond,
            cap: MAX_DEFORM_CONDITION,
        });
    }
    let a = &big_s * &base.c * &s_inv;
    let b = &big_s * base.c.adjoint() * &s_inv;
    let k = &big_s * &base.big_k * &s_inv;
    let rep = FdpbRep { n, a, b, k };
    let report = validate_rep(&rep, tol);
    if !report.pass {
        return Err(Error::CheckFailed {
            stage: "similarity_deform",
            report: Box::new(report),
        });
    }
    Ok(rep)
}

/// Seeded random `(n-1) x (n-1)` block for [`similarity_deform`]: entries
/// uniform in `[-1, 1] + i[-1, 1]`, redrawn until `cond(diag(s0, 1))` is below
/// `condition_cap`.
pub fn random_s0(n: usize, seed: u64, condition_cap: f64) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    if condition_cap.is_nan() || condition_cap <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "condition cap must exceed 1, got {condition_cap}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n - 1;
    for _ in 0..100_000 {
        let s0 = Matrix::from_fn(m, |_, _| c64(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)));
        let cond = condition_number(&Matrix::block_diag(&s0, C64::ONE))?;
        if cond < condition_cap {
            return Ok(s0);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no draw met condition cap {condition_cap} for n = {n}"
    )))
}

/// Residuals of the deformed rule and its side conditions. The trace check
/// comes first: `tr [a, b] = 0` forces `tr k = 1`, so it is the cheapest way
/// to reject a triple outright.
pub fn validate_rep(rep: &FdpbRep, tol: Tolerance) -> ValidationReport {
    let n = rep.n;
    let (a, b, k) = (&rep.a, &rep.b, &rep.k);
    let mut r = ValidationReport::new();
    r.record(
        "tr(k) − 1",
        (k.trace() - C64::ONE).norm(),
        tol.threshold(n as f64 * k.max_abs()),
    );
    let comm = a * b - b * a;
    r.record(
        "[a,b] − (1 − n·k)",
        comm.max_abs_diff(&rep.deformation()),
        tol.threshold(prod_scale(a, b)),
    );
    r.record("k·a", (k * a).max_abs(), tol.threshold(prod_scale(k, a)));
    r.record("b·k", (b * k).max_abs(), tol.threshold(prod_scale(b, k)));
    r.record("k − k²", k.max_abs_diff(&(k * k)), tol.threshold(prod_scale(k, k)));
    r.record("k − k†", k.max_abs_diff(&k.adjoint()), tol.threshold(k.max_abs()));
    r
}

/// Position/momentum-like operators and the Hamiltonians built from a triple.
#[derive(Clone, Debug)]
pub struct DerivedOperators {
    pub q: Matrix,
    pub p: Matrix,
    pub h: Matrix,
    pub h_adj: Matrix,
    /// `a b`
    pub mhat: Matrix,
    /// `b a`
    pub nhat: Matrix,
}

pub fn derived_ops(rep: &FdpbRep) -> DerivedOperators {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&rep.a + &rep.b) * inv_sqrt2;
    // 1/(sqrt(2) i) = -i/sqrt(2)
    let p = (&rep.a - &rep.b) * c64(0.0, -inv_sqrt2);
    let h = (&p * &p + &q * &q) * 0.5;
    let h_adj = h.adjoint();
    let mhat = &rep.a * &rep.b;
    let nhat = &rep.b * &rep.a;
    DerivedOperators {
        q,
        p,
        h,
        h_adj,
        mhat,
        nhat,
    }
}

/// Residuals of the operator identities that follow from the deformed rule.
pub fn check_identities(rep: &FdpbRep, tol: Tolerance) -> ValidationReport {
    let n = rep.n;
    let nf = n as f64;
    let (a, b, k) = (&rep.a, &rep.b, &rep.k);
    let d = derived_ops(rep);
    let h = &d.h;
    let half_rule = rep.deformation() * 0.5;
    let mut r = ValidationReport::new();

    let lhs = commutator(a, h).expect("shapes checked at construction");
    let rhs = a - (a * k) * (0.5 * nf);
    r.record(
        "[a,h] − (a − ½n·a·k)",
        lhs.max_abs_diff(&rhs),
        tol.threshold(prod_scale(a, h)),
    );

    let lhs = commutator(b, h).expect("shapes checked at construction");
    let rhs = (k * b) * (0.5 * nf) - b;
    r.record(
        "[b,h] − (−b + ½n·k·b)",
        lhs.max_abs_diff(&rhs),
        tol.threshold(prod_scale(b, h)),
    );

    let scale_ab = prod_scale(a, b).max(h.max_abs());
    r.record(
        "h − (b·a + ½(1 − n·k))",
        h.max_abs_diff(&(&d.nhat + &half_rule)),
        tol.threshold(scale_ab),
    );
    r.record(
        "h − (a·b − ½(1 − n·k))",
        h.max_abs_diff(&(&d.mhat - &half_rule)),
        tol.threshold(scale_ab),
    );

    let anti = anticommutator(a, b).expect("shapes checked at construction");
    r.record("{a,b} − 2h", anti.max_abs_diff(&(h * 2.0)), tol.threshold(scale_ab));

    let kh = k * h;
    let hk = h * k;
    r.record("k·h − h·k", kh.max_abs_diff(&hk), tol.threshold(prod_scale(k, h)));
    r.record(
        "k·h + ½(1 − n)·k",
        (&kh + k * (0.5 * (1.0 - nf))).max_abs(),
        tol.threshold(prod_scale(k, h)),
    );

    for (name, x, y) in [
        ("[N̂,h]", &d.nhat, h),
        ("[M̂,h]", &d.mhat, h),
        ("[N̂,k]", &d.nhat, k),
        ("[M̂,k]", &d.mhat, k),
    ] {
        let c = commutator(x, y).expect("shapes checked at construction");
        r.record(name, c.max_abs(), tol.threshold(prod_scale(x, y)));
    }

    let qp = commutator(&d.q, &d.p).expect("shapes checked at construction");
    r.record(
        "[q,p] − i(1 − n·k)",
        qp.max_abs_diff(&rep.deformation().scale(C64::I)),
        tol.threshold(prod_scale(&d.q, &d.p)),
    );
    let a_back = (&d.q + d.p.scale(C64::I)) * std::f64::consts::FRAC_1_SQRT_2;
    r.record("a − (q + i·p)/√2", a.max_abs_diff(&a_back), tol.threshold(a.max_abs()));

    let expected_trace = nf * (nf - 1.0) / 2.0;
    r.record(
        "tr(h) − n(n−1)/2",
        (h.trace() - c64(expected_trace, 0.0)).norm(),
        tol.threshold(nf * h.max_abs()),
    );
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn buchdahl_small_cases() {
        let r2 = buchdahl_rep(2).unwrap();
        assert_eq!(r2.c, Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap());
        assert_eq!(r2.big_k, Matrix::diag_real(&[0.0, 1.0]));

        let r3 = buchdahl_rep(3).unwrap();
        let s2 = 2f64.sqrt();
        let c3 = Matrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, s2], vec![0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(r3.c, c3);
        let comm = commutator(&r3.c, &r3.c.adjoint()).unwrap();
        assert!(comm.max_abs_diff(&Matrix::diag_real(&[1.0, 1.0, -2.0])) < 1e-15);

        let r4 = buchdahl_rep(4).unwrap();
        let comm = commutator(&r4.c, &r4.c.adjoint()).unwrap();
        assert!(comm.max_abs_diff(&Matrix::diag_real(&[1.0, 1.0, 1.0, -3.0])) < 1e-15);
        assert!(r4.validate(tol()).pass);
    }

    #[test]
    fn buchdahl_rejects_n_below_two() {
        assert!(buchdahl_rep(1).is_err());
        assert!(buchdahl_rep(0).is_err());
    }

    #[test]
    fn trivial_similarity_is_identity() {
        let base = buchdahl_rep(4).unwrap();
        let rep = similarity_deform(&base, &Matrix::identity(3), C64::ONE, tol()).unwrap();
        assert_eq!(rep.a(), &base.c);
        assert_eq!(rep.b(), &base.c.adjoint());
        assert_eq!(rep.k(), &base.big_k);
    }

    #[test]
    fn diagonal_similarity_breaks_adjointness() {
        let base = buchdahl_rep(4).unwrap();
        let rep = similarity_deform(&base, &Matrix::diag_real(&[2.0, 1.0, 1.0]), C64::ONE, tol()).unwrap();
        let report = validate_rep(&rep, tol());
        assert!(report.pass);
        assert!(report.max_residual() < 1e-12, "{report}");
        assert!(rep.b().max_abs_diff(&rep.a().adjoint()) > 0.1);
    }

    #[test]
    fn unitary_similarity_keeps_adjointness() {
        let base = buchdahl_rep(3).unwrap();
        let (cs, sn) = (0.3f64.cos(), 0.3f64.sin());
        let u = Matrix::from_rows(&[vec![c64(cs, 0.0), c64(0.0, sn)], vec![c64(0.0, sn), c64(cs, 0.0)]]).unwrap();
        let rep = similarity_deform(&base, &u, c64(0.6, 0.8), tol()).unwrap();
        assert!(rep.b().max_abs_diff(&rep.a().adjoint()) < 1e-10);
    }

    #[test]
    fn similarity_rejects_singular_and_ill_conditioned() {
        let base = buchdahl_rep(3).unwrap();
        let singular = Matrix::diag_real(&[1.0, 0.0]);
        assert!(matches!(
            similarity_deform(&base, &singular, C64::ONE, tol()),
            Err(Error::Singular { .. })
        ));
        let stiff = Matrix::diag_real(&[1e4, 1e-4]);
        assert!(matches!(
            similarity_deform(&base, &stiff, C64::ONE, tol()),
            Err(Error::IllConditioned { .. })
        ));
        assert!(similarity_deform(&base, &Matrix::identity(2), C64::ZERO, tol()).is_err());
        assert!(similarity_deform(&base, &Matrix::identity(3), C64::ONE, tol()).is_err());
    }

    #[test]
    fn zero_projector_fails_on_trace_first() {
        let base = buchdahl_rep(3).unwrap();
        let rep = FdpbRep::new(base.c.clone(), base.c.adjoint(), Matrix::zeros(3)).unwrap();
        let report = validate_rep(&rep, tol());
        assert!(!report.pass);
        let first = report.first_failure().unwrap();
        assert_eq!(first.name, "tr(k) − 1");
        assert!((first.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_hamiltonian() {
        let rep = buchdahl_rep(2).unwrap().as_fdpb();
        let d = derived_ops(&rep);
        assert!(d.h.max_abs_diff(&Matrix::diag_real(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn identities_hold_exactly_on_buchdahl() {
        for n in 2..=6 {
            let rep = buchdahl_rep(n).unwrap().as_fdpb();
            let r = check_identities(&rep, tol());
            assert!(r.pass, "n={n}\n{r}");
            assert!(r.max_residual() < 1e-13, "n={n}\n{r}");
        }
    }

    #[test]
    fn random_s0_is_reproducible_and_capped() {
        let x = random_s0(5, 42, 100.0).unwrap();
        let y = random_s0(5, 42, 100.0).unwrap();
        assert_eq!(x, y);
        assert_ne!(x, random_s0(5, 43, 100.0).unwrap());
        assert!(condition_number(&Matrix::block_diag(&x, C64::ONE)).unwrap() < 100.0);
    }
}

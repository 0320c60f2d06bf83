//! Concrete systems: the explicit four-dimensional `alpha` family, the
//! truncated Swanson Hamiltonian and the truncated shifted oscillator.
//!
//! The Swanson rotation `A_θ = a cos θ + i b sin θ` keeps `[A_θ, B_θ] = 1 - n k`
//! but not `k A_θ = 0`, so its eigenvectors are obtained by direct
//! diagonalization rather than by the ladder chain. Its spectrum is measured
//! and compared against two candidate patterns; neither is assumed.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::algebra::{derived_ops, prod_scale, validate_rep, FdpbRep};
use crate::chain::Label;
use crate::error::{Error, Result};
use crate::matrix::{c64, commutator, diagonalize, eig_general, inverse, Matrix, Tolerance, C64};
use crate::report::ValidationReport;

/// Smallest `|theta|` accepted by [`swanson`].
pub const MIN_THETA: f64 = 1e-12;

/// JSON form of a complex number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for C64 {
    fn from(z: ComplexValue) -> Self {
        c64(z.re, z.im)
    }
}

/// The four-dimensional family with `k = diag(0, 0, 0, 1)`.
pub fn n4_alpha(alpha: f64) -> Result<FdpbRep> {
    let d = 1.0 + alpha.powi(3);
    if !alpha.is_finite() || d.abs() < 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "singular family parameter: alpha = {alpha} (1 + alpha^3 = {d:e})"
        )));
    }
    let (a1, a2, a3) = (alpha, alpha * alpha, alpha.powi(3));
    let s2 = SQRT_2;
    let s3 = 3f64.sqrt();
    let a = Matrix::from_real_rows(&[
        vec![(1.0 - s2) * a2, 1.0 + s2 * a3, (s2 - 1.0) * a1, 0.0],
        vec![-s2 * a1, s2 * a2, s2, s3 * a1 * d],
        vec![a3, a1, -a2, s3 * d],
        vec![0.0, 0.0, 0.0, 0.0],
    ])? * (1.0 / d);
    let b = Matrix::from_real_rows(&[
        vec![a1, -a2, a3, 0.0],
        vec![1.0 + s2 * a3, (s2 - 1.0) * a1, (1.0 - s2) * a2, 0.0],
        vec![s2 * a2, s2, -s2 * a1, 0.0],
        vec![-s3 * a1, s3 * a2, s3, 0.0],
    ])? * (1.0 / d);
    let k = Matrix::diag_real(&[0.0, 0.0, 0.0, 1.0]);
    let rep = FdpbRep::new(a, b, k)?;
    let report = validate_rep(&rep, Tolerance::default());
    if !report.pass {
        return Err(Error::CheckFailed {
            stage: "n4_alpha",
            report: Box::new(report),
        });
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct SwansonModel {
    pub theta: f64,
    pub omega: f64,
    pub a_theta: Matrix,
    pub b_theta: Matrix,
    /// `½(p² + x²) − (i/2) tan 2θ (p² − x²)`
    pub h_theta: Matrix,
    /// `ω (B_θ A_θ + ½(1 − n k))`
    pub h_theta_ladder: Matrix,
    pub base_rep: FdpbRep,
    pub report: ValidationReport,
}

pub fn swanson(rep: &FdpbRep, theta: f64, tol: Tolerance) -> Result<SwansonModel> {
    if !theta.is_finite() || theta.abs() <= MIN_THETA || theta.abs() >= FRAC_PI_4 {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (-pi/4, pi/4) \\ {{0}}, got {theta}"
        )));
    }
    let base = validate_rep(rep, tol);
    if !base.pass {
        return Err(Error::CheckFailed {
            stage: "swanson",
            report: Box::new(base),
        });
    }
    let n = rep.n();
    let d = derived_ops(rep);
    let (x, p) = (&d.q, &d.p);
    let e_plus = C64::from_polar(1.0, theta);
    let e_minus = C64::from_polar(1.0, -theta);
    let a_theta = (x.scale(e_plus) + p.scale(C64::I * e_minus)) * FRAC_1_SQRT_2;
    let b_theta = (x.scale(e_plus) - p.scale(C64::I * e_minus)) * FRAC_1_SQRT_2;
    let omega = 1.0 / (2.0 * theta).cos();

    let p2 = p * p;
    let x2 = x * x;
    let h_theta = (&p2 + &x2) * 0.5 - (&p2 - &x2).scale(c64(0.0, 0.5 * (2.0 * theta).tan()));
    let h_theta_ladder = (&b_theta * &a_theta + rep.deformation() * 0.5) * omega;

    let mut report = ValidationReport::new();
    let comm = commutator(&a_theta, &b_theta)?;
    report.record(
        "[A_θ,B_θ] − (1 − n·k)",
        comm.max_abs_diff(&rep.deformation()),
        tol.threshold(prod_scale(&a_theta, &b_theta)),
    );
    let rotation = (rep.a().scale(c64(theta.cos(), 0.0)) + rep.b().scale(c64(0.0, theta.sin()))).max_abs_diff(&a_theta);
    report.record(
        "A_θ − (a cos θ + i b sin θ)",
        rotation,
        tol.threshold(a_theta.max_abs()),
    );
    report.record(
        "H_θ(x,p) − H_θ(A_θ,B_θ)",
        h_theta.max_abs_diff(&h_theta_ladder),
        tol.threshold(omega * (prod_scale(x, x) + prod_scale(p, p)) + n as f64 * omega),
    );
    if !report.pass {
        return Err(Error::CheckFailed {
            stage: "swanson",
            report: Box::new(report),
        });
    }
    Ok(SwansonModel {
        theta,
        omega,
        a_theta,
        b_theta,
        h_theta,
        h_theta_ladder,
        base_rep: rep.clone(),
        report,
    })
}

/// Eigenvalue pattern of the ladder chain, `{1/2, 3/2, ..., n − 3/2} ∪ {(n−1)/2}`,
/// ascending.
pub fn chain_spectrum(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = Label::chain(n).iter().map(Label::h).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub theta: f64,
    pub omega: f64,
    pub computed: Vec<ComplexValue>,
    pub hypothesis_scaled: Vec<f64>,
    pub hypothesis_unscaled: Vec<f64>,
    pub match_scaled: bool,
    pub match_unscaled: bool,
    pub max_imag: f64,
    pub intertwiner_residual: f64,
    pub biorthonormality_residual: f64,
    pub all_real: bool,
    pub intertwines: bool,
}

impl SpectrumReport {
    /// Realness of the spectrum and the intertwining relation must agree.
    pub fn biconditional_holds(&self) -> bool {
        self.all_real == self.intertwines
    }
}

fn matches_pattern(computed: &[C64], pattern: &[f64], threshold: f64) -> bool {
    let mut c: Vec<C64> = computed.to_vec();
    c.sort_by(|x, y| x.re.total_cmp(&y.re));
    c.len() == pattern.len()
        && c.iter()
            .zip(pattern)
            .all(|(z, &p)| (z - c64(p, 0.0)).norm() <= threshold)
}

/// Diagonalizes `H_θ`, tests both spectral hypotheses and measures
/// `‖H_θ S_φ − S_φ H_θ†‖` with `S_φ` built from unit right eigenvectors.
pub fn swanson_spectrum_report(model: &SwansonModel, tol: Tolerance) -> Result<SpectrumReport> {
    let h = &model.h_theta;
    let n = h.dim();
    let eig = diagonalize(h)?;
    let spread = eig.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let threshold = tol.threshold(spread);

    let unscaled = chain_spectrum(n);
    let scaled: Vec<f64> = unscaled.iter().map(|x| model.omega * x).collect();
    let match_unscaled = matches_pattern(&eig.values, &unscaled, threshold);
    let match_scaled = matches_pattern(&eig.values, &scaled, threshold);
    let max_imag = eig.max_imag();

    let v = Matrix::from_columns(&eig.vectors)?;
    // Columns of (V^-1)^H are the eigenvectors of H^H biorthonormal to V.
    let w = inverse(&v, tol)?.adjoint();
    let biorthonormality_residual = (w.adjoint() * &v).max_abs_diff(&Matrix::identity(n));
    let s_phi = &v * v.adjoint();
    let intertwiner_residual = (h * &s_phi).max_abs_diff(&(&s_phi * h.adjoint()));

    Ok(SpectrumReport {
        theta: model.theta,
        omega: model.omega,
        computed: eig.values.iter().map(|&z| z.into()).collect(),
        hypothesis_scaled: scaled,
        hypothesis_unscaled: unscaled,
        match_scaled,
        match_unscaled,
        max_imag,
        intertwiner_residual,
        biorthonormality_residual,
        all_real: max_imag <= threshold,
        intertwines: intertwiner_residual < tol.threshold(prod_scale(h, &s_phi)),
    })
}

#[derive(Clone, Debug)]
pub struct ShiftedOscillator {
    pub beta: f64,
    pub h_beta: Matrix,
    pub spectrum: Vec<C64>,
    pub max_imag: f64,
}

/// `H_β = (β/2)(p² + x²) + i√2 p`; the spectrum is reported, not asserted.
pub fn shifted_oscillator(rep: &FdpbRep, beta: f64) -> Result<ShiftedOscillator> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let d = derived_ops(rep);
    let h_beta = (&d.p * &d.p + &d.q * &d.q) * (0.5 * beta) + d.p.scale(c64(0.0, SQRT_2));
    let eig = eig_general(&h_beta)?;
    Ok(ShiftedOscillator {
        beta,
        max_imag: eig.max_imag(),
        spectrum: eig.values,
        h_beta,
    })
}

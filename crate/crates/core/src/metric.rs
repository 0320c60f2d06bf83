//! Metric operators `S_φ = Σ|φ⟩⟨φ|`, `S_ψ = Σ|ψ⟩⟨ψ|` and the hermitization
//! `c = S_ψ^{1/2} a S_ψ^{-1/2}`, `K = S_ψ^{1/2} k S_ψ^{-1/2}`,
//! `e = S_ψ^{1/2} φ`.

use serde::{Deserialize, Serialize};

use crate::algebra::{derived_ops, prod_scale, FdpbRep, HermitianRep};
use crate::chain::{BiorthogonalSystem, Label};
use crate::error::{Error, Result};
use crate::matrix::{c64, eig_hermitian, inverse, sqrt_pd, Matrix, Tolerance, Vector};
use crate::report::ValidationReport;

#[derive(Clone, Debug)]
pub struct MetricPair {
    pub s_phi: Matrix,
    pub s_psi: Matrix,
    pub s_psi_sqrt: Matrix,
    pub s_psi_sqrt_inv: Matrix,
}

impl MetricPair {
    fn invariants(&self, tol: Tolerance) -> ValidationReport {
        let n = self.s_phi.dim();
        let id = Matrix::identity(n);
        let mut r = ValidationReport::new();
        r.record(
            "S_phi − S_phi†",
            self.s_phi.hermiticity_defect().2,
            tol.threshold(self.s_phi.max_abs()),
        );
        r.record(
            "S_psi − S_psi†",
            self.s_psi.hermiticity_defect().2,
            tol.threshold(self.s_psi.max_abs()),
        );
        r.record(
            "S_phi·S_psi − I",
            (&self.s_phi * &self.s_psi).max_abs_diff(&id),
            tol.threshold(prod_scale(&self.s_phi, &self.s_psi)),
        );
        r.record(
            "S_psi·S_phi − I",
            (&self.s_psi * &self.s_phi).max_abs_diff(&id),
            tol.threshold(prod_scale(&self.s_phi, &self.s_psi)),
        );
        r.record(
            "S_psi^½·S_psi^½ − S_psi",
            (&self.s_psi_sqrt * &self.s_psi_sqrt).max_abs_diff(&self.s_psi),
            tol.threshold(prod_scale(&self.s_psi_sqrt, &self.s_psi_sqrt)),
        );
        r.record(
            "S_psi^½·S_psi^−½ − I",
            (&self.s_psi_sqrt * &self.s_psi_sqrt_inv).max_abs_diff(&id),
            tol.threshold(prod_scale(&self.s_psi_sqrt, &self.s_psi_sqrt_inv)),
        );
        r
    }
}

fn gram_sum(vs: &[Vector]) -> Matrix {
    let n = vs[0].dim();
    vs.iter().fold(Matrix::zeros(n), |acc, v| acc + Matrix::outer(v, v))
}

pub fn build_metrics(sys: &BiorthogonalSystem, tol: Tolerance) -> Result<MetricPair> {
    let s_phi = gram_sum(&sys.phis);
    let s_psi = gram_sum(&sys.psis);
    let lowest = eig_hermitian(&s_phi, tol)?.values[0];
    if lowest <= tol.abs_eps {
        return Err(Error::NotPositiveDefinite { eigenvalue: lowest });
    }
    let s_psi_sqrt = sqrt_pd(&s_psi, tol)?;
    let s_psi_sqrt_inv = inverse(&s_psi_sqrt, tol)?;
    let mp = MetricPair {
        s_phi,
        s_psi,
        s_psi_sqrt,
        s_psi_sqrt_inv,
    };
    let report = mp.invariants(tol);
    if !report.pass {
        return Err(Error::CheckFailed {
            stage: "build_metrics",
            report: Box::new(report),
        });
    }
    Ok(mp)
}

/// Metric exchange of the two families, intertwining relations and the
/// metric invariants.
pub fn verify_metrics(rep: &FdpbRep, sys: &BiorthogonalSystem, mp: &MetricPair, tol: Tolerance) -> ValidationReport {
    let n = sys.n as f64;
    let mut r = mp.invariants(tol);
    let (a, b, k) = (rep.a(), rep.b(), rep.k());
    for ((label, phi), psi) in sys.labels.iter().zip(&sys.phis).zip(&sys.psis) {
        let s1 = n * mp.s_phi.max_abs() * psi.max_abs();
        r.record(
            format!("S_phi·ψ − φ {label}"),
            mp.s_phi.apply(psi).max_abs_diff(phi),
            tol.threshold(s1),
        );
        let s2 = n * mp.s_psi.max_abs() * phi.max_abs();
        r.record(
            format!("S_psi·φ − ψ {label}"),
            mp.s_psi.apply(phi).max_abs_diff(psi),
            tol.threshold(s2),
        );
    }
    let lhs = &mp.s_psi * b;
    let rhs = a.adjoint() * &mp.s_psi;
    r.record(
        "S_psi·b − a†·S_psi",
        lhs.max_abs_diff(&rhs),
        tol.threshold(prod_scale(&mp.s_psi, b).max(prod_scale(a, &mp.s_psi))),
    );
    r.record(
        "[k,S_psi]",
        (k * &mp.s_psi - &mp.s_psi * k).max_abs(),
        tol.threshold(prod_scale(k, &mp.s_psi)),
    );
    let d = derived_ops(rep);
    r.record(
        "h·S_phi − S_phi·h†",
        (&d.h * &mp.s_phi).max_abs_diff(&(&mp.s_phi * &d.h_adj)),
        tol.threshold(prod_scale(&d.h, &mp.s_phi)),
    );
    r
}

/// Hermitized triple `(c, K)`, the orthonormal basis `e` and
/// `H0 = c†c + ½(1 − n K)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HermitianSystem {
    pub n: usize,
    pub c: Matrix,
    #[serde(rename = "K")]
    pub big_k: Matrix,
    pub labels: Vec<Label>,
    #[serde(rename = "e")]
    pub e_basis: Vec<Vector>,
    #[serde(rename = "H0")]
    pub h0: Matrix,
}

impl HermitianSystem {
    pub fn as_hermitian_rep(&self) -> HermitianRep {
        HermitianRep {
            n: self.n,
            c: self.c.clone(),
            big_k: self.big_k.clone(),
        }
    }

    /// Buchdahl rule for `(c, K)`, orthonormality of `e`, and the eigen
    /// equations `H0 e = h' e`, `K e = k' e`.
    pub fn report(&self, tol: Tolerance) -> ValidationReport {
        let n = self.n;
        let nf = n as f64;
        let mut r = self.as_hermitian_rep().validate(tol);
        let gram = Matrix::from_fn(n, |i, j| self.e_basis[i].inner(&self.e_basis[j]));
        r.record(
            "Gram(e) − I",
            gram.max_abs_diff(&Matrix::identity(n)),
            tol.threshold(nf),
        );
        r.record(
            "H0 − H0†",
            self.h0.hermiticity_defect().2,
            tol.threshold(self.h0.max_abs()),
        );
        for (label, e) in self.labels.iter().zip(&self.e_basis) {
            r.record(
                format!("H0·e − h′e {label}"),
                self.h0.apply(e).max_abs_diff(&e.scale(c64(label.h(), 0.0))),
                tol.threshold(nf * self.h0.max_abs() * e.max_abs()),
            );
            r.record(
                format!("K·e − k′e {label}"),
                self.big_k.apply(e).max_abs_diff(&e.scale(c64(label.k as f64, 0.0))),
                tol.threshold(nf * self.big_k.max_abs() * e.max_abs()),
            );
        }
        r
    }
}

pub fn hermitize(rep: &FdpbRep, sys: &BiorthogonalSystem, mp: &MetricPair, tol: Tolerance) -> Result<HermitianSystem> {
    let n = rep.n();
    let root = &mp.s_psi_sqrt;
    let root_inv = &mp.s_psi_sqrt_inv;
    let c = root * rep.a() * root_inv;
    let c_dag_alt = root * rep.b() * root_inv;
    let residual = c.adjoint().max_abs_diff(&c_dag_alt);
    let scale = prod_scale(root, rep.b()) * root_inv.max_abs();
    if residual > tol.threshold(scale) {
        return Err(Error::ConventionViolated { residual });
    }
    let big_k = root * rep.k() * root_inv;
    let e_basis: Vec<Vector> = sys.phis.iter().map(|phi| root.apply(phi)).collect();
    let half_rule = (Matrix::identity(n) - &big_k * n as f64) * 0.5;
    let h0 = c.adjoint() * &c + half_rule;
    let hs = HermitianSystem {
        n,
        c,
        big_k,
        labels: sys.labels.clone(),
        e_basis,
        h0,
    };
    let report = hs.report(tol);
    if !report.pass {
        return Err(Error::CheckFailed {
            stage: "hermitize",
            report: Box::new(report),
        });
    }
    Ok(hs)
}

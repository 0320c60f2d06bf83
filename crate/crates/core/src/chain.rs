//! Ladder chains of eigenvectors of `h` and `h^H`.
//!
//! The `phi` chain starts at the kernel of `b` (the `k' = 1` vector with
//! `h' = (n-1)/2`) and is lowered by `a`; the `psi` chain starts at the kernel
//! of `a^H` and is lowered by `A = b^H`. At the step whose source has
//! `N̂`-eigenvalue `m` both chains are divided by `sqrt(m)`, so
//! `nu = mu = sqrt(m)` and the top pairing `<psi, phi> = 1` telescopes down the
//! whole chain.

use serde::{Deserialize, Serialize};

use crate::algebra::{derived_ops, prod_scale, FdpbRep};
use crate::error::{Error, Result};
use crate::matrix::{c64, null_space, Matrix, Tolerance, Vector, C64};
use crate::report::ValidationReport;

/// Relative cutoff for the "first non-zero component" used in phase fixing.
const PHASE_CUTOFF: f64 = 1e-8;

/// Eigenvalue pair `(h', k')`; `h2` stores `2 h'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub h2: i64,
    pub k: u8,
}

impl Label {
    pub fn new(h2: i64, k: u8) -> Self {
        Label { h2, k }
    }

    pub fn h(&self) -> f64 {
        self.h2 as f64 / 2.0
    }

    /// Labels of an `n`-dimensional chain, top first:
    /// `((n-1)/2, 1), (n - 3/2, 0), ..., (1/2, 0)`.
    pub fn chain(n: usize) -> Vec<Label> {
        let n = n as i64;
        std::iter::once(Label::new(n - 1, 1))
            .chain((1..n).rev().map(|m| Label::new(2 * m - 1, 0)))
            .collect()
    }

    pub fn is_valid(&self, n: usize) -> bool {
        let n = n as i64;
        match self.k {
            1 => self.h2 == n - 1,
            0 => self.h2 % 2 == 1 && self.h2 >= 1 && self.h2 <= 2 * n - 3,
            _ => false,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.h2 % 2 == 0 {
            write!(f, "({}, {})", self.h2 / 2, self.k)
        } else {
            write!(f, "({}/2, {})", self.h2, self.k)
        }
    }
}

/// Biorthonormal eigenvector families of `h` (phis) and `h^H` (psis), top of
/// the chain first. `nus[i]`/`mus[i]` belong to the step from vector `i` to
/// vector `i + 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BiorthogonalSystem {
    pub n: usize,
    pub labels: Vec<Label>,
    pub phis: Vec<Vector>,
    pub psis: Vec<Vector>,
    pub nus: Vec<f64>,
    pub mus: Vec<f64>,
}

impl BiorthogonalSystem {
    /// `N̂ = b a` eigenvalue of chain vector `i`.
    pub fn nhat_eigenvalue(&self, i: usize) -> usize {
        self.n - 1 - i
    }

    /// `M̂ = a b` eigenvalue of chain vector `i`: zero on the top vector,
    /// `m + 1` on a `k' = 0` vector with `N̂`-eigenvalue `m`.
    pub fn mhat_eigenvalue(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.nhat_eigenvalue(i) + 1
        }
    }

    /// Gram matrix `G[i][j] = <psi_i, phi_j>`.
    pub fn pairing(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self.psis[i].inner(&self.phis[j]))
    }

    pub fn biorthonormality_residual(&self) -> f64 {
        self.pairing().max_abs_diff(&Matrix::identity(self.n))
    }

    fn scale(&self) -> f64 {
        let pm = self.phis.iter().map(Vector::norm).fold(0.0, f64::max);
        let sm = self.psis.iter().map(Vector::norm).fold(0.0, f64::max);
        self.n as f64 * pm * sm
    }
}

fn seed(op: &Matrix, k: &Matrix, name: &'static str, tol: Tolerance) -> Result<Vector> {
    let kernel = null_space(op, tol)?;
    if kernel.len() != 1 {
        return Err(Error::DegenerateRepresentation {
            operator: name,
            dim: kernel.len(),
        });
    }
    let v = kernel[0].normalized().phase_fixed(PHASE_CUTOFF);
    let residual = k.apply(&v).max_abs_diff(&v);
    if residual > tol.threshold(k.dim() as f64 * k.max_abs()) {
        return Err(Error::SeedNotInProjector {
            operator: name,
            residual,
        });
    }
    Ok(v)
}

/// Unit vector spanning `ker b`, phase fixed; must satisfy `k phi = phi`.
pub fn seed_phi(rep: &FdpbRep, tol: Tolerance) -> Result<Vector> {
    seed(rep.b(), rep.k(), "b", tol)
}

/// Unit vector spanning `ker a^H`, phase fixed; must satisfy `k psi = psi`.
pub fn seed_psi(rep: &FdpbRep, tol: Tolerance) -> Result<Vector> {
    seed(&rep.a().adjoint(), rep.k(), "a†", tol)
}

pub fn build_system(rep: &FdpbRep, tol: Tolerance) -> Result<BiorthogonalSystem> {
    let n = rep.n();
    let a = rep.a();
    let lower_psi = rep.b().adjoint();

    let phi_top = seed_phi(rep, tol)?;
    let psi_seed = seed_psi(rep, tol)?;
    let overlap = psi_seed.inner(&phi_top);
    if overlap.norm() <= tol.threshold(1.0) {
        return Err(Error::NonDiagonalizablePairing {
            overlap: overlap.norm(),
        });
    }
    let psi_top = psi_seed.scale(C64::ONE / overlap.conj());

    let mut phis = vec![phi_top];
    let mut psis = vec![psi_top];
    let mut nus = Vec::with_capacity(n - 1);
    for (step, m) in (1..n).rev().enumerate() {
        let coeff = (m as f64).sqrt();
        let raw_phi = a.apply(&phis[step]);
        let raw_psi = lower_psi.apply(&psis[step]);
        let floor = tol.threshold(prod_scale(a, a).sqrt() * phis[step].norm());
        if raw_phi.norm() <= floor {
            return Err(Error::BrokenChain {
                step: step + 1,
                norm: raw_phi.norm(),
            });
        }
        if raw_psi.norm() <= tol.threshold(prod_scale(&lower_psi, &lower_psi).sqrt() * psis[step].norm()) {
            return Err(Error::BrokenChain {
                step: step + 1,
                norm: raw_psi.norm(),
            });
        }
        phis.push(raw_phi.scale(c64(1.0 / coeff, 0.0)));
        psis.push(raw_psi.scale(c64(1.0 / coeff, 0.0)));
        nus.push(coeff);
    }

    let last_phi = a.apply(&phis[n - 1]).norm();
    let last_psi = lower_psi.apply(&psis[n - 1]).norm();
    let end_scale = n as f64 * a.max_abs().max(lower_psi.max_abs()) * phis[n - 1].norm().max(psis[n - 1].norm());
    let residual = last_phi.max(last_psi);
    if residual > tol.threshold(end_scale) {
        return Err(Error::ChainNotTerminated { residual });
    }

    let sys = BiorthogonalSystem {
        n,
        labels: Label::chain(n),
        phis,
        psis,
        mus: nus.clone(),
        nus,
    };
    let residual = sys.biorthonormality_residual();
    if residual > tol.threshold(sys.scale()) {
        return Err(Error::NotBiorthonormal { residual });
    }
    Ok(sys)
}

fn record_vec(r: &mut ValidationReport, name: String, lhs: &Vector, rhs: &Vector, scale: f64, tol: Tolerance) {
    r.record(name, lhs.max_abs_diff(rhs), tol.threshold(scale));
}

/// Eigen-equations, ladder relations, biorthonormality and resolution of the
/// identity for a built system.
pub fn verify_system(rep: &FdpbRep, sys: &BiorthogonalSystem, tol: Tolerance) -> ValidationReport {
    let n = sys.n;
    let d = derived_ops(rep);
    let (a, b, k) = (rep.a(), rep.b(), rep.k());
    let nf = n as f64;
    let mut r = ValidationReport::new();

    for (i, label) in sys.labels.iter().enumerate() {
        let phi = &sys.phis[i];
        let psi = &sys.psis[i];
        let hp = c64(label.h(), 0.0);
        let kp = c64(label.k as f64, 0.0);
        let vs = nf * phi.max_abs();
        let ws = nf * psi.max_abs();
        record_vec(
            &mut r,
            format!("h·φ − h′φ {label}"),
            &d.h.apply(phi),
            &phi.scale(hp),
            d.h.max_abs() * vs,
            tol,
        );
        record_vec(
            &mut r,
            format!("k·φ − k′φ {label}"),
            &k.apply(phi),
            &phi.scale(kp),
            k.max_abs() * vs,
            tol,
        );
        record_vec(
            &mut r,
            format!("h†·ψ − h′ψ {label}"),
            &d.h_adj.apply(psi),
            &psi.scale(hp),
            d.h_adj.max_abs() * ws,
            tol,
        );
        record_vec(
            &mut r,
            format!("k·ψ − k′ψ {label}"),
            &k.apply(psi),
            &psi.scale(kp),
            k.max_abs() * ws,
            tol,
        );
        let m_n = c64(sys.nhat_eigenvalue(i) as f64, 0.0);
        let m_m = c64(sys.mhat_eigenvalue(i) as f64, 0.0);
        record_vec(
            &mut r,
            format!("N̂·φ − mφ {label}"),
            &d.nhat.apply(phi),
            &phi.scale(m_n),
            d.nhat.max_abs() * vs,
            tol,
        );
        record_vec(
            &mut r,
            format!("M̂·φ − m′φ {label}"),
            &d.mhat.apply(phi),
            &phi.scale(m_m),
            d.mhat.max_abs() * vs,
            tol,
        );
    }

    let (big_a, big_b) = rep.adjoint_pair();
    for step in 0..n - 1 {
        let m = sys.nhat_eigenvalue(step) as f64;
        let (nu, mu) = (sys.nus[step], sys.mus[step]);
        let (src, dst) = (step, step + 1);
        let tag = format!("step m={}", m as usize);
        let vs = nf * sys.phis[src].max_abs().max(sys.phis[dst].max_abs());
        let ws = nf * sys.psis[src].max_abs().max(sys.psis[dst].max_abs());
        record_vec(
            &mut r,
            format!("a·φ − ν·φ′ {tag}"),
            &a.apply(&sys.phis[src]),
            &sys.phis[dst].scale(c64(nu, 0.0)),
            a.max_abs() * vs,
            tol,
        );
        record_vec(
            &mut r,
            format!("b·φ′ − (m/ν)·φ {tag}"),
            &b.apply(&sys.phis[dst]),
            &sys.phis[src].scale(c64(m / nu, 0.0)),
            b.max_abs() * vs,
            tol,
        );
        record_vec(
            &mut r,
            format!("A·ψ − μ·ψ′ {tag}"),
            &big_a.apply(&sys.psis[src]),
            &sys.psis[dst].scale(c64(mu, 0.0)),
            big_a.max_abs() * ws,
            tol,
        );
        record_vec(
            &mut r,
            format!("B·ψ′ − (m/μ)·ψ {tag}"),
            &big_b.apply(&sys.psis[dst]),
            &sys.psis[src].scale(c64(m / mu, 0.0)),
            big_b.max_abs() * ws,
            tol,
        );
        r.record(format!("ν − μ {tag}"), (nu - mu).abs(), tol.threshold(nu.abs()));
        let pair_src = sys.psis[src].inner(&sys.phis[src]);
        let pair_dst = sys.psis[dst].inner(&sys.phis[dst]);
        r.record(
            format!("⟨ψ′,φ′⟩ − ⟨ψ,φ⟩ {tag}"),
            (pair_dst - pair_src).norm(),
            tol.threshold(sys.scale()),
        );
    }

    let a_end = a.apply(&sys.phis[n - 1]);
    r.record(
        "a·φ(1/2,0)",
        a_end.max_abs(),
        tol.threshold(nf * a.max_abs() * sys.phis[n - 1].max_abs()),
    );
    let b_top = b.apply(&sys.phis[0]);
    r.record(
        format!("b·φ{}", sys.labels[0]),
        b_top.max_abs(),
        tol.threshold(nf * b.max_abs() * sys.phis[0].max_abs()),
    );

    r.record(
        "⟨ψ_i,φ_j⟩ − δ_ij",
        sys.biorthonormality_residual(),
        tol.threshold(sys.scale()),
    );
    // Eigenvectors of k with different eigenvalues are orthogonal.
    let mut sector = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if sys.labels[i].k != sys.labels[j].k {
                sector = sector.max(sys.phis[i].inner(&sys.phis[j]).norm());
            }
        }
    }
    r.record("⟨φ(k′=1),φ(k′=0)⟩", sector, tol.threshold(sys.scale()));

    let id = Matrix::identity(n);
    let mut phi_psi = Matrix::zeros(n);
    let mut psi_phi = Matrix::zeros(n);
    for (phi, psi) in sys.phis.iter().zip(&sys.psis) {
        phi_psi = phi_psi + Matrix::outer(phi, psi);
        psi_phi = psi_phi + Matrix::outer(psi, phi);
    }
    r.record("Σ|φ⟩⟨ψ| − 1", phi_psi.max_abs_diff(&id), tol.threshold(sys.scale()));
    r.record("Σ|ψ⟩⟨φ| − 1", psi_phi.max_abs_diff(&id), tol.threshold(sys.scale()));

    let (a_rec, b_rec) = reconstruct_operators(sys);
    let (lower_psi, raise_psi) = reconstruct_adjoint_ladders(sys);
    r.record(
        "a_rec − a",
        a_rec.max_abs_diff(a),
        tol.threshold(sys.scale() * a.max_abs()),
    );
    r.record(
        "b_rec − b",
        b_rec.max_abs_diff(b),
        tol.threshold(sys.scale() * b.max_abs()),
    );
    r.record(
        "a_rec† − B_ψ",
        a_rec.adjoint().max_abs_diff(&raise_psi),
        tol.threshold(sys.scale() * a.max_abs()),
    );
    r.record(
        "b_rec† − A_ψ",
        b_rec.adjoint().max_abs_diff(&lower_psi),
        tol.threshold(sys.scale() * b.max_abs()),
    );
    r
}

/// Rank-one expansions of the ladder operators on the `phi` chain:
/// `a = Σ ν |φ_target⟩⟨ψ_source|`, `b = Σ (m/ν) |φ_source⟩⟨ψ_target|`.
pub fn reconstruct_operators(sys: &BiorthogonalSystem) -> (Matrix, Matrix) {
    let n = sys.n;
    let mut a = Matrix::zeros(n);
    let mut b = Matrix::zeros(n);
    for step in 0..n - 1 {
        let m = sys.nhat_eigenvalue(step) as f64;
        let nu = sys.nus[step];
        a = a + Matrix::outer(&sys.phis[step + 1], &sys.psis[step]).scale(c64(nu, 0.0));
        b = b + Matrix::outer(&sys.phis[step], &sys.psis[step + 1]).scale(c64(m / nu, 0.0));
    }
    (a, b)
}

/// The same expansion for the `psi` chain: returns `(A, B)` with
/// `A = Σ μ |ψ_target⟩⟨φ_source|` and `B = Σ (m/μ) |ψ_source⟩⟨φ_target|`.
pub fn reconstruct_adjoint_ladders(sys: &BiorthogonalSystem) -> (Matrix, Matrix) {
    let n = sys.n;
    let mut lower = Matrix::zeros(n);
    let mut raise = Matrix::zeros(n);
    for step in 0..n - 1 {
        let m = sys.nhat_eigenvalue(step) as f64;
        let mu = sys.mus[step];
        lower = lower + Matrix::outer(&sys.psis[step + 1], &sys.phis[step]).scale(c64(mu, 0.0));
        raise = raise + Matrix::outer(&sys.psis[step], &sys.phis[step + 1]).scale(c64(m / mu, 0.0));
    }
    (lower, raise)
}

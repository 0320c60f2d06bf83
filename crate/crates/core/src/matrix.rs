//! Dense complex square matrices and the decompositions the rest of the crate
//! is built on.
//!
//! Storage is a `nalgebra::DMatrix<Complex64>`; the SVD, the Hermitian
//! eigensolver and the complex Schur form come from nalgebra. General
//! eigenvectors are recovered from the Schur form by triangular
//! back-substitution.
//!
//! All "equal within tolerance" comparisons use the maximum absolute entry
//! difference.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const MAX_SWEEPS: usize = 10_000;

/// Eigenvector matrices worse conditioned than this are treated as defective.
const EXCEPTIONAL_CONDITION: f64 = 1e10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Absolute/relative tolerance pair. A quantity of magnitude `scale` is
/// considered zero when it is at most `abs_eps + rel_eps * scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_eps: 1e-10,
            rel_eps: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Result<Self> {
        let ok = abs_eps.is_finite()
            && rel_eps.is_finite()
            && abs_eps >= 0.0
            && rel_eps >= 0.0
            && (abs_eps > 0.0 || rel_eps > 0.0);
        if ok {
            Ok(Tolerance { abs_eps, rel_eps })
        } else {
            Err(Error::InvalidTolerance {
                abs: abs_eps,
                rel: rel_eps,
            })
        }
    }

    pub fn absolute(abs_eps: f64) -> Result<Self> {
        Self::new(abs_eps, 0.0)
    }

    #[inline]
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs_eps + self.rel_eps * scale.abs()
    }
}

/// Dense complex square matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<C64>);

/// Dense complex column vector with finite entries.
#[derive(Clone, PartialEq)]
pub struct Vector(DVector<C64>);

impl Matrix {
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Matrix(m))
    }

    pub fn zeros(n: usize) -> Self {
        Matrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Matrix(DMatrix::from_fn(n, n, f))
    }

    /// Row-major construction; every row must have the same length as the
    /// number of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: r.len() });
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| c64(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diag(d: &[C64]) -> Self {
        let n = d.len();
        Matrix(DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { C64::ZERO }))
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let d: Vec<C64> = d.iter().map(|&x| c64(x, 0.0)).collect();
        Self::diag(&d)
    }

    /// Columns stacked left to right.
    pub fn from_columns(cols: &[Vector]) -> Result<Self> {
        let n = cols.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if let Some(c) = cols.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.dim(),
            });
        }
        Ok(Matrix(DMatrix::from_fn(n, n, |i, j| cols[j][i])))
    }

    /// Rank-one operator |u><v|.
    pub fn outer(u: &Vector, v: &Vector) -> Self {
        Matrix(&u.0 * v.0.adjoint())
    }

    /// Block-diagonal matrix diag(block, s).
    pub fn block_diag(block: &Matrix, s: C64) -> Self {
        let m = block.dim();
        let mut out = DMatrix::zeros(m + 1, m + 1);
        out.view_mut((0, 0), (m, m)).copy_from(&block.0);
        out[(m, m)] = s;
        Matrix(out)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Matrix(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector(self.0.column(j).into_owned())
    }

    pub fn scale(&self, z: C64) -> Self {
        Matrix(&self.0 * z)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of |M - M^H| and where it occurs.
    pub fn hermiticity_defect(&self) -> (usize, usize, f64) {
        let n = self.dim();
        let mut worst = (0, 0, 0.0);
        for i in 0..n {
            for j in i..n {
                let d = (self.0[(i, j)] - self.0[(j, i)].conj()).norm();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        worst
    }

    pub fn is_exactly_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == C64::ZERO))
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.dim(), v.dim(), "dimension mismatch");
        Vector(&self.0 * &v.0)
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        same_dim(self, other)?;
        Ok(self * other)
    }

    /// Row-major copy of the entries.
    pub fn rows(&self) -> Vec<Vec<C64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.0[(i, j)]).collect()).collect()
    }
}

fn same_dim(x: &Matrix, y: &Matrix) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Matrix> for &Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                Matrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Matrix> for Matrix {
            type Output = Matrix;
            fn $method(self, rhs: Matrix) -> Matrix {
                Matrix(self.0 $op rhs.0)
            }
        }
        impl $trait<&Matrix> for Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                Matrix(self.0 $op &rhs.0)
            }
        }
        impl $trait<Matrix> for &Matrix {
            type Output = Matrix;
            fn $method(self, rhs: Matrix) -> Matrix {
                Matrix(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<C64> for &Matrix {
    type Output = Matrix;
    fn mul(self, z: C64) -> Matrix {
        self.scale(z)
    }
}

impl Mul<C64> for Matrix {
    type Output = Matrix;
    fn mul(self, z: C64) -> Matrix {
        Matrix(self.0 * z)
    }
}

impl Mul<f64> for &Matrix {
    type Output = Matrix;
    fn mul(self, x: f64) -> Matrix {
        self.scale(c64(x, 0.0))
    }
}

impl Mul<f64> for Matrix {
    type Output = Matrix;
    fn mul(self, x: f64) -> Matrix {
        Matrix(self.0 * c64(x, 0.0))
    }
}

impl Mul<&Vector> for &Matrix {
    type Output = Vector;
    fn mul(self, v: &Vector) -> Vector {
        self.apply(v)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-&self.0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim(), self.dim())?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Vector {
    pub fn from_dvector(v: DVector<C64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(i) = v.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Vector(v))
    }

    pub fn from_vec(v: Vec<C64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(v))
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        Self::from_vec(v.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Vector(DVector::zeros(n))
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = C64::ONE;
        Vector(v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.0.iter()
    }

    pub fn to_vec(&self) -> Vec<C64> {
        self.0.iter().copied().collect()
    }

    /// <self, other>, conjugate-linear in `self`.
    pub fn inner(&self, other: &Vector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0.dotc(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, z: C64) -> Vector {
        Vector(&self.0 * z)
    }

    pub fn normalized(&self) -> Vector {
        let n = self.norm();
        Vector(&self.0 / c64(n, 0.0))
    }

    /// Rotates the phase so the first component with modulus above
    /// `cutoff * max_abs` is real and positive.
    pub fn phase_fixed(&self, cutoff: f64) -> Vector {
        let floor = cutoff * self.max_abs();
        match self.0.iter().find(|z| z.norm() > floor) {
            Some(z) => {
                let phase = z.conj() / z.norm();
                Vector(&self.0 * phase)
            }
            None => self.clone(),
        }
    }
}

impl Index<usize> for Vector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl Sub<&Vector> for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(&self.0 - &rhs.0)
    }
}

impl Add<&Vector> for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(&self.0 + &rhs.0)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.0.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
        write!(f, "Vector[{}]", cells.join(", "))
    }
}

// ---------------------------------------------------------------------------
// JSON forms: {"dim": n, "re": [[..]], "im": [[..]]} and {"re": [..], "im": [..]}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        let n = r.dim;
        if n == 0 {
            return Err(Error::Empty);
        }
        for part in [&r.re, &r.im] {
            if part.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: part.len(),
                });
            }
            if let Some(row) = part.iter().find(|row| row.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Matrix::from_dmatrix(DMatrix::from_fn(n, n, |i, j| c64(r.re[i][j], r.im[i][j])))
    }
}

impl From<&Matrix> for MatrixRepr {
    fn from(m: &Matrix) -> Self {
        let n = m.dim();
        MatrixRepr {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        Matrix::try_from(r).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for Vector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorRepr {
            re: self.0.iter().map(|z| z.re).collect(),
            im: self.0.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = VectorRepr::deserialize(d)?;
        if r.re.len() != r.im.len() {
            return Err(serde::de::Error::custom(Error::DimensionMismatch {
                expected: r.re.len(),
                found: r.im.len(),
            }));
        }
        let v = r.re.iter().zip(&r.im).map(|(&x, &y)| c64(x, y)).collect();
        Vector::from_vec(v).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Operations

/// XY - YX.
pub fn commutator(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    same_dim(x, y)?;
    Ok(x * y - y * x)
}

/// XY + YX.
pub fn anticommutator(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    same_dim(x, y)?;
    Ok(x * y + y * x)
}

fn svd(m: &Matrix, compute_u: bool, compute_v: bool) -> Result<SVD<C64, nalgebra::Dyn, nalgebra::Dyn>> {
    SVD::try_new(m.0.clone(), compute_u, compute_v, f64::EPSILON, MAX_SWEEPS * m.dim())
        .ok_or(Error::NoConvergence("singular value decomposition"))
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = svd(m, false, false)?.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// 2-norm condition number sigma_max / sigma_min (infinite when singular).
pub fn condition_number(m: &Matrix) -> Result<f64> {
    let s = singular_values(m)?;
    let (max, min) = (s[0], s[s.len() - 1]);
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is at most `abs_eps + rel_eps * sigma_max`.
pub fn null_space(m: &Matrix, tol: Tolerance) -> Result<Vec<Vector>> {
    let dec = svd(m, false, true)?;
    let sigma = &dec.singular_values;
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let cut = tol.threshold(sigma_max);
    let v_t = dec
        .v_t
        .as_ref()
        .ok_or(Error::NoConvergence("singular value decomposition"))?;
    let mut idx: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] <= cut).collect();
    idx.sort_by(|&i, &j| sigma[i].total_cmp(&sigma[j]));
    Ok(idx.into_iter().map(|i| Vector(v_t.row(i).adjoint())).collect())
}

/// Eigenpairs of a Hermitian matrix, values ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vector>,
}

pub fn eig_hermitian(m: &Matrix, tol: Tolerance) -> Result<HermitianEigen> {
    let (row, col, deviation) = m.hermiticity_defect();
    if deviation > tol.threshold(m.max_abs()) {
        return Err(Error::NotHermitian { row, col, deviation });
    }
    let sym = (&m.0 + m.0.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS * m.dim())
        .ok_or(Error::NoConvergence("Hermitian eigensolver"))?;
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    Ok(HermitianEigen {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order
            .iter()
            .map(|&i| Vector(eig.eigenvectors.column(i).into_owned()))
            .collect(),
    })
}

/// Eigenvalues and unit right eigenvectors of a general matrix, sorted by
/// real part then imaginary part.
#[derive(Clone, Debug)]
pub struct GeneralEigen {
    pub values: Vec<C64>,
    pub vectors: Vec<Vector>,
}

impl GeneralEigen {
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

fn cmp_complex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn sort_complex(values: &mut [C64]) {
    values.sort_by(cmp_complex);
}

pub fn eig_general(m: &Matrix) -> Result<GeneralEigen> {
    let n = m.dim();
    let schur =
        Schur::try_new(m.0.clone(), f64::EPSILON, MAX_SWEEPS * n).ok_or(Error::NoConvergence("Schur decomposition"))?;
    let (q, t) = schur.unpack();
    let t_norm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut pairs: Vec<(C64, Vector)> = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = t[(i, i)];
        // Perturbed pivots for (near-)repeated eigenvalues, as in LAPACK's xTREVC.
        let smin = f64::EPSILON * lambda.norm().max(t_norm).max(f64::MIN_POSITIVE);
        let mut y = DVector::<C64>::zeros(n);
        y[i] = C64::ONE;
        for j in (0..i).rev() {
            let mut s = C64::ZERO;
            for l in j + 1..=i {
                s += t[(j, l)] * y[l];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < smin {
                d = c64(smin, 0.0);
            }
            y[j] = -s / d;
            let big = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if big > 1e100 {
                y /= c64(big, 0.0);
            }
        }
        let v = Vector(&q * y).normalized();
        pairs.push((lambda, v));
    }
    pairs.sort_by(|a, b| cmp_complex(&a.0, &b.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(GeneralEigen { values, vectors })
}

/// Eigendecomposition that is guaranteed to be a basis. Clusters of
/// numerically repeated eigenvalues get their eigenvectors from the kernel of
/// `M - lambda`; a cluster whose kernel is too small, or an ill-conditioned
/// eigenvector matrix, means `M` sits at (or next to) an exceptional point.
pub fn diagonalize(m: &Matrix) -> Result<GeneralEigen> {
    let n = m.dim();
    let mut eig = eig_general(m)?;
    let scale = m.max_abs().max(1.0);
    let cluster_eps = 1e-8 * scale;
    let kernel_tol = Tolerance {
        abs_eps: 1e-7 * scale,
        rel_eps: 0.0,
    };

    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && (eig.values[j] - eig.values[i]).norm() <= cluster_eps)
            .collect();
        for &j in &members {
            assigned[j] = true;
        }
        if members.len() == 1 {
            continue;
        }
        let mean = members.iter().map(|&j| eig.values[j]).sum::<C64>() / members.len() as f64;
        let shifted = m - &Matrix::identity(n).scale(mean);
        let kernel = null_space(&shifted, kernel_tol)?;
        if kernel.len() < members.len() {
            return Err(Error::ExceptionalPoint(format!(
                "eigenvalue {:.6}{:+.6}i has algebraic multiplicity {} but geometric multiplicity {}",
                mean.re,
                mean.im,
                members.len(),
                kernel.len()
            )));
        }
        for (&j, v) in members.iter().zip(kernel) {
            eig.vectors[j] = v;
        }
    }

    let basis = Matrix::from_columns(&eig.vectors)?;
    let cond = condition_number(&basis)?;
    if !cond.is_finite() || cond > EXCEPTIONAL_CONDITION {
        return Err(Error::ExceptionalPoint(format!(
            "eigenvector matrix condition number {cond:e}"
        )));
    }
    Ok(eig)
}

/// The unique Hermitian positive-definite square root.
pub fn sqrt_pd(m: &Matrix, tol: Tolerance) -> Result<Matrix> {
    let n = m.dim();
    if m.is_exactly_diagonal() && (0..n).all(|i| m[(i, i)].im == 0.0) {
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let x = m[(i, i)].re;
            if x <= tol.abs_eps {
                return Err(Error::NotPositiveDefinite { eigenvalue: x });
            }
            d.push(x.sqrt());
        }
        return Ok(Matrix::diag_real(&d));
    }
    let eig = eig_hermitian(m, tol)?;
    if let Some(&bad) = eig.values.iter().find(|&&x| x <= tol.abs_eps) {
        return Err(Error::NotPositiveDefinite { eigenvalue: bad });
    }
    let mut r = DMatrix::<C64>::zeros(n, n);
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        r += (&v.0 * v.0.adjoint()) * c64(lambda.sqrt(), 0.0);
    }
    let r = (&r + r.adjoint()) * c64(0.5, 0.0);
    Ok(Matrix(r))
}

/// Matrix inverse; rejects inputs whose smallest singular value is at most
/// `abs_eps`.
pub fn inverse(m: &Matrix, tol: Tolerance) -> Result<Matrix> {
    let s = singular_values(m)?;
    let sigma_min = s[s.len() - 1];
    if sigma_min <= tol.abs_eps {
        return Err(Error::Singular { sigma_min });
    }
    m.0.clone()
        .try_inverse()
        .map(Matrix)
        .ok_or(Error::Singular { sigma_min })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn tolerance_rejects_all_zero_and_negative() {
        assert!(Tolerance::new(0.0, 0.0).is_err());
        assert!(Tolerance::new(-1.0, 1.0).is_err());
        assert!(Tolerance::new(0.0, 1e-12).is_ok());
    }

    #[test]
    fn identity_commutes() {
        let y = Matrix::from_fn(3, |i, j| c64(i as f64 + 0.3, j as f64 - 1.0));
        let z = commutator(&Matrix::identity(3), &y).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn raising_lowering_commutator() {
        let x = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let z = commutator(&x, &x.adjoint()).unwrap();
        assert_eq!(z, Matrix::diag_real(&[1.0, -1.0]));
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let e = commutator(&Matrix::identity(2), &Matrix::identity(3));
        assert!(matches!(e, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn null_space_of_zero_and_identity() {
        let k = null_space(&Matrix::zeros(2), tol()).unwrap();
        assert_eq!(k.len(), 2);
        assert!(k[0].inner(&k[1]).norm() < 1e-14);
        assert!(null_space(&Matrix::identity(3), tol()).unwrap().is_empty());
    }

    #[test]
    fn eig_hermitian_diagonal() {
        let e = eig_hermitian(&Matrix::diag_real(&[3.0, 1.0, 2.0]), tol()).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert!((e.vectors[0][1].norm() - 1.0).abs() < 1e-14);
        assert!((e.vectors[1][2].norm() - 1.0).abs() < 1e-14);
        assert!((e.vectors[2][0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_hermitian_pauli_x() {
        let x = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = eig_hermitian(&x, tol()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_hermitian_rejects_non_hermitian() {
        let x = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        match eig_hermitian(&x, tol()) {
            Err(Error::NotHermitian { row, col, deviation }) => {
                assert_eq!((row, col), (0, 1));
                assert_eq!(deviation, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eig_general_simple_cases() {
        let e = eig_general(&Matrix::diag_real(&[1.5, 0.5])).unwrap();
        assert!((e.values[0] - c64(0.5, 0.0)).norm() < 1e-14);
        assert!((e.values[1] - c64(1.5, 0.0)).norm() < 1e-14);

        let nil = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let e = eig_general(&nil).unwrap();
        assert!(e.values.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn eig_general_rotation_has_complex_pair() {
        let r = Matrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let e = eig_general(&r).unwrap();
        assert!((e.values[0] - c64(0.0, -1.0)).norm() < 1e-13);
        assert!((e.values[1] - c64(0.0, 1.0)).norm() < 1e-13);
        for (l, v) in e.values.iter().zip(&e.vectors) {
            assert!((&r * v).max_abs_diff(&v.scale(*l)) < 1e-13);
        }
    }

    #[test]
    fn diagonalize_flags_jordan_block() {
        let j = Matrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(diagonalize(&j), Err(Error::ExceptionalPoint(_))));
        let d = diagonalize(&Matrix::identity(3).scale(c64(0.5, 0.0))).unwrap();
        let basis = Matrix::from_columns(&d.vectors).unwrap();
        assert!(condition_number(&basis).unwrap() < 1.0 + 1e-12);
    }

    #[test]
    fn sqrt_pd_simple() {
        assert_eq!(sqrt_pd(&Matrix::identity(4), tol()).unwrap(), Matrix::identity(4));
        let r = sqrt_pd(&Matrix::diag_real(&[4.0, 9.0]), tol()).unwrap();
        assert_eq!(r, Matrix::diag_real(&[2.0, 3.0]));
    }

    #[test]
    fn sqrt_pd_rejects_indefinite() {
        let m = Matrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        match sqrt_pd(&m, tol()) {
            Err(Error::NotPositiveDefinite { eigenvalue }) => assert!((eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inverse_simple() {
        let inv = inverse(&Matrix::diag_real(&[2.0, 4.0]), tol()).unwrap();
        assert_eq!(inv, Matrix::diag_real(&[0.5, 0.25]));
        assert_eq!(inverse(&Matrix::identity(5), tol()).unwrap(), Matrix::identity(5));
        match inverse(&Matrix::diag_real(&[1.0, 0.0]), tol()) {
            Err(Error::Singular { sigma_min }) => assert_eq!(sigma_min, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn matrix_json_requires_both_parts() {
        let ok: Matrix = serde_json::from_str(r#"{"dim":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#).unwrap();
        assert_eq!(ok, Matrix::identity(2));
        assert!(serde_json::from_str::<Matrix>(r#"{"dim":2,"re":[[1,0],[0,1]]}"#).is_err());
        assert!(serde_json::from_str::<Matrix>(r#"{"dim":2,"re":[[1,0]],"im":[[0,0]]}"#).is_err());
    }

    #[test]
    fn phase_fixing_makes_first_component_positive() {
        let v = Vector::from_vec(vec![C64::ZERO, c64(0.0, -2.0), c64(1.0, 1.0)]).unwrap();
        let w = v.phase_fixed(1e-8);
        assert!(w[1].im.abs() < 1e-15 && w[1].re > 0.0);
    }
}

//! Small dense real matrices, symmetric eigendecomposition and the continuous
//! functional calculus built on it.

mod eigen;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar_funcs::{beta_unchecked, FunctionSpec, Interval};

pub use eigen::{eig_sym, SpectralDecomposition, MAX_SWEEPS};

/// Relative tolerance for symmetry at construction.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues this close outside a declared spectral window are clamped onto it.
pub const SPECTRAL_CLAMP_TOL: f64 = 1e-10;

/// Square dense matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("matrix must have at least one row".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { n, data })
    }

    /// Builds an `n × n` matrix from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .unwrap_or(col);
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in (col + 1)..n {
                let factor = a[r * n + col] / p;
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
        det
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            })
        }
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| op(*a, *b)).collect(),
        })
    }
}

/// Real symmetric matrix.
///
/// Construction averages `a_ij` and `a_ji` after checking they agree within
/// [`SYMMETRY_TOL`], so the stored entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let n = m.n;
        if m.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        let mut out = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (out.get(i, j), out.get(j, i));
                if (a - b).abs() > SYMMETRY_TOL * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                let avg = 0.5 * (a + b);
                out.set(i, j, avg);
                out.set(j, i, avg);
            }
        }
        Ok(Self(out))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// Symmetric part `(X + Xᵀ)/2` of an arbitrary square matrix.
    pub fn symmetrize(m: &Matrix) -> Self {
        Self(Matrix::from_fn(m.n, |i, j| 0.5 * (m.get(i, j) + m.get(j, i))))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n))
    }

    /// `c·I`.
    pub fn scalar(n: usize, c: f64) -> Self {
        Self(Matrix::identity(n).scale(c))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self(Matrix::from_fn(n, |i, j| if i == j { values[i] } else { 0.0 }))
    }

    /// `Q · diag(values) · Qᵀ`.
    pub fn from_spectrum(q: &Matrix, values: &[f64]) -> Result<Self> {
        if q.n != values.len() {
            return Err(Error::DimensionMismatch {
                expected: q.n,
                found: values.len(),
            });
        }
        let n = q.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..n).map(|k| q.get(i, k) * values[k] * q.get(j, k)).sum();
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        Ok(Self(out))
    }

    pub fn order(&self) -> usize {
        self.0.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(c))
    }

    /// `self + c·I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut out = self.0.clone();
        for i in 0..out.n {
            let v = out.get(i, i) + c;
            out.set(i, i, v);
        }
        Self(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.zip_with(&other.0, |a, b| a + b)?))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.zip_with(&other.0, |a, b| a - b)?))
    }

    /// Congruence `Uᵀ · self · U`.
    pub fn congruence(&self, u: &Matrix) -> Result<Self> {
        let inner = self.0.matmul(u)?;
        Ok(Self::symmetrize(&u.transpose().matmul(&inner)?))
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.0.zip_with(&other.0, |a, b| a - b)?.max_abs())
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        eig_sym(self)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.min())
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.max())
    }
}

/// Panicking arithmetic for operands whose orders are already known to agree.
impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        self.try_add(rhs).expect("order mismatch in SymMatrix addition")
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        self.try_sub(rhs).expect("order mismatch in SymMatrix subtraction")
    }
}

impl Mul<&SymMatrix> for f64 {
    type Output = SymMatrix;
    fn mul(self, rhs: &SymMatrix) -> SymMatrix {
        rhs.scale(self)
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self.scale(-1.0)
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Applies a scalar map to the spectrum, after clamping eigenvalues that sit
/// within [`SPECTRAL_CLAMP_TOL`] of `[lo, hi]` onto the window.
fn spectral_map(a: &SymMatrix, lo: f64, hi: f64, what: &str, g: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let dec = a.eig()?;
    let mut values = Vec::with_capacity(dec.eigenvalues.len());
    for &lambda in &dec.eigenvalues {
        if lambda < lo - SPECTRAL_CLAMP_TOL || lambda > hi + SPECTRAL_CLAMP_TOL {
            return Err(Error::Domain(format!(
                "{what}: eigenvalue {lambda} lies outside [{lo}, {hi}]"
            )));
        }
        values.push(g(lambda.clamp(lo, hi)));
    }
    SymMatrix::from_spectrum(&dec.q, &values)
}

/// `f(A) = Q f(Λ) Qᵀ` for `A` with spectrum in `[0, ∞)`.
pub fn apply_function(f: &FunctionSpec, a: &SymMatrix) -> Result<SymMatrix> {
    spectral_map(a, 0.0, f64::INFINITY, "functional calculus", |t| f.value(t))
}

/// `β(A)` for `A` with spectrum in `[m, M]`.
pub fn apply_beta(f: &FunctionSpec, iv: &Interval, a: &SymMatrix) -> Result<SymMatrix> {
    spectral_map(a, iv.lo(), iv.hi(), "β calculus", |t| beta_unchecked(f, iv, t))
}

/// Result of a Loewner comparison `A ⪯ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerComparison {
    pub holds: bool,
    /// Smallest eigenvalue of `B − A`.
    pub margin: f64,
}

/// `A ⪯ B` iff `λ_min(B − A) ≥ −tol`.
pub fn loewner_leq(a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<LoewnerComparison> {
    let margin = b.try_sub(a)?.min_eigenvalue()?;
    Ok(LoewnerComparison {
        holds: margin >= -tol,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b_worked() -> SymMatrix {
        SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap()
    }

    fn assert_close(a: &SymMatrix, b: &SymMatrix, tol: f64) {
        let d = a.max_abs_diff(b).unwrap();
        assert!(d <= tol, "max diff {d}:\n{:?}\n{:?}", a.rows(), b.rows());
    }

    #[test]
    fn symmetric_construction() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]).is_err());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
        assert!(SymMatrix::from_rows(&[vec![f64::NAN]]).is_err());
        let s = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-14, 1.0]]).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn determinant_and_trace() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((m.determinant() - 5.0).abs() < 1e-14);
        assert_eq!(m.trace(), 5.0);
        assert_eq!(Matrix::identity(4).determinant(), 1.0);
    }

    #[test]
    fn cube_of_worked_matrices() {
        let cube = FunctionSpec::power(3.0);
        let fb = apply_function(&cube, &b_worked()).unwrap();
        let expected = SymMatrix::from_rows(&[vec![14.0, -13.0], vec![-13.0, 14.0]]).unwrap();
        assert_close(&fb, &expected, 1e-12);
        let fc = apply_function(&cube, &SymMatrix::diag(&[3.0, 2.0])).unwrap();
        assert_close(&fc, &SymMatrix::diag(&[27.0, 8.0]), 1e-12);
    }

    #[test]
    fn identity_exponent_is_identity() {
        let a = SymMatrix::from_rows(&[vec![3.0, 0.5, 0.1], vec![0.5, 2.0, -0.3], vec![0.1, -0.3, 1.0]]).unwrap();
        assert_close(&apply_function(&FunctionSpec::power(1.0), &a).unwrap(), &a, 1e-13);
    }

    #[test]
    fn functional_calculus_rejects_negative_spectrum() {
        let a = SymMatrix::diag(&[1.0, -0.5]);
        assert!(matches!(
            apply_function(&FunctionSpec::power(2.0), &a),
            Err(Error::Domain(_))
        ));
        // within the clamp tolerance the eigenvalue is moved to 0
        let a = SymMatrix::diag(&[1.0, -1e-12]);
        let fa = apply_function(&FunctionSpec::power(1.5), &a).unwrap();
        assert_eq!(fa.get(1, 1), 0.0);
    }

    #[test]
    fn beta_of_worked_matrices() {
        let cube = FunctionSpec::power(3.0);
        let iv = Interval::new(0.0, 3.0).unwrap();
        let bb = apply_beta(&cube, &iv, &b_worked()).unwrap();
        let ones = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_close(&bb, &ones.scale(5.0 / 3.0), 1e-12);
        let bc = apply_beta(&cube, &iv, &SymMatrix::diag(&[3.0, 2.0])).unwrap();
        assert_close(&bc, &SymMatrix::diag(&[0.0, 10.0 / 3.0]), 1e-12);
        assert!(apply_beta(&cube, &iv, &SymMatrix::diag(&[3.5, 1.0])).is_err());
    }

    #[test]
    fn beta_at_midpoint() {
        let iv = Interval::new(1.0, 4.0).unwrap();
        for f in [FunctionSpec::power(3.0), FunctionSpec::neg_power(1.5)] {
            let mid = SymMatrix::scalar(3, 2.5);
            let got = apply_beta(&f, &iv, &mid).unwrap();
            assert_close(&got, &SymMatrix::scalar(3, f.value(1.5)), 1e-12);
        }
    }

    #[test]
    fn loewner_examples() {
        let z = SymMatrix::zeros(3);
        let i = SymMatrix::identity(3);
        let c = loewner_leq(&z, &i, 0.0).unwrap();
        assert!(c.holds && (c.margin - 1.0).abs() < 1e-15);
        let c = loewner_leq(&i, &z, 0.0).unwrap();
        assert!(!c.holds && (c.margin + 1.0).abs() < 1e-15);
        assert!(loewner_leq(&z, &SymMatrix::zeros(2), 0.0).is_err());
    }

    #[test]
    fn one_by_one_agrees_with_scalar() {
        let f = FunctionSpec::power(2.5);
        let iv = Interval::new(0.5, 3.0).unwrap();
        let a = SymMatrix::diag(&[1.7]);
        assert_eq!(apply_function(&f, &a).unwrap().get(0, 0), f.eval(1.7).unwrap());
        assert_eq!(
            apply_beta(&f, &iv, &a).unwrap().get(0, 0),
            crate::scalar_funcs::beta_eval(&f, &iv, 1.7).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let s = serde_json::to_string(&b_worked()).unwrap();
        assert_eq!(s, "[[2.0,-1.0],[-1.0,2.0]]");
        let back: SymMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b_worked());
        assert!(serde_json::from_str::<SymMatrix>("[[1.0,2.0],[3.0,1.0]]").is_err());
    }
}

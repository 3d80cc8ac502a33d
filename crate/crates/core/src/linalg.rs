//! Dense complex matrices.
//!
//! Everything in this crate works at small dimension (a qubit is d = 2, the
//! property suites go up to d = 8), so matrices are plain row-major `Vec`s
//! and every operation allocates its result.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

/// JSON wire form: `{"dim": n, "re": [...], "im": [...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRepr {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.re.len() != r.im.len() {
            return Err(Error::BadShape {
                dim: r.dim,
                expected: r.re.len(),
                found: r.im.len(),
            });
        }
        let data = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
        ComplexMatrix::new(r.dim, data)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            dim: m.dim,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        if data.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            let row = rows[i].as_ref();
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            row[j]
        })
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            let row = rows[i].as_ref();
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            C64::new(row[j], 0.0)
        })
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    /// The rank-one matrix |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    /// Matrix unit E_ij (a single 1 at row i, column j).
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.data[i * dim + j] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |i, j| self.data[j * d + i].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm distance between two matrices of equal dimension.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |i, j| (self.data[i * d + j] + self.data[j * d + i].conj()) * 0.5)
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self * &self.dagger()).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let d = self.dim;
        (0..d)
            .map(|i| {
                let row = &self.data[i * d..(i + 1) * d];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Column-stacking vectorization: `vec(M)[i + j*d] = M_ij`.
    pub fn vectorize(&self) -> Vec<C64> {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for j in 0..d {
            for i in 0..d {
                out[i + j * d] = self.data[i * d + j];
            }
        }
        out
    }

    /// Inverse of [`ComplexMatrix::vectorize`].
    pub fn unvectorize(v: &[C64]) -> Result<Self> {
        let d = (v.len() as f64).sqrt().round() as usize;
        if d == 0 || d * d != v.len() {
            return Err(Error::BadShape {
                dim: d,
                expected: d * d,
                found: v.len(),
            });
        }
        Ok(Self::from_fn(d, |i, j| v[i + j * d]))
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self * other)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self + other)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                for (o, b) in out[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { dim: d, data: out }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

/// `ab + ba`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) + &(b * a))
}

/// `Tr(ab)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    a.check_same_dim(b)?;
    let d = a.dim;
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += a.data[i * d + k] * b.data[k * d + i];
        }
    }
    Ok(acc)
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Pauli matrices and ladder operators in the `(g, e)` ordering used
/// throughout: `|g⟩ = (1, 0)`, `|e⟩ = (0, 1)`, `σz|g⟩ = -|g⟩`, `σ₊ = |e⟩⟨g|`.
///
/// These are the usual Pauli matrices written in the reversed basis order, so
/// `[σx, σy] = 2iσz` and `σ± = (σx ± iσy)/2` still hold.
pub mod pauli {
    use super::{ComplexMatrix, C64, I, ONE, ZERO};

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ZERO, I], [-I, ZERO]])
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[-ONE, ONE])
    }

    /// `σ₊ = |e⟩⟨g|`, raises the energy.
    pub fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ZERO, ZERO], [ONE, ZERO]])
    }

    /// `σ₋ = |g⟩⟨e|`.
    pub fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ZERO, ONE], [ZERO, ZERO]])
    }

    pub fn ground() -> [C64; 2] {
        [ONE, ZERO]
    }

    pub fn excited() -> [C64; 2] {
        [ZERO, ONE]
    }
}

//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use crate::error::Result;
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::state::HermitianOperator;

/// Sweeps stop once the off-diagonal Frobenius norm falls below this,
/// relative to `max(1, |A|_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.values.len();
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d)
                .map(|k| self.vectors.get(i, k) * self.vectors.get(j, k).conj() * self.values[k])
                .sum()
        })
    }

    /// Applies `f` to the spectrum: `Σ f(λ_k) v_k v_k†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        Eigensystem {
            values: self.values.iter().map(|&x| f(x)).collect(),
            vectors: self.vectors.clone(),
        }
        .reconstruct()
    }
}

/// Diagonalizes a validated Hermitian operator.
///
/// Eigenvalues come back ascending. Each eigenvector's phase is fixed so its
/// largest-magnitude component is real and positive (ties go to the lowest
/// index), which makes the output reproducible bit for bit.
pub fn hermitian_eigensystem(op: &HermitianOperator) -> Eigensystem {
    jacobi(op.matrix())
}

/// Same as [`hermitian_eigensystem`] for a matrix already known to be
/// Hermitian; validates first.
pub fn eigh(m: &ComplexMatrix) -> Result<Eigensystem> {
    Ok(hermitian_eigensystem(&HermitianOperator::new(m.clone())?))
}

pub(crate) fn jacobi(m: &ComplexMatrix) -> Eigensystem {
    let d = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOLERANCE * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    // stable sort keeps the original index order for exactly equal eigenvalues
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&k| a.get(k, k).re).collect();
    let mut vectors = ComplexMatrix::zeros(d);
    for (col, &k) in order.iter().enumerate() {
        let mut vec = v.column(k);
        fix_phase(&mut vec);
        for (row, z) in vec.into_iter().enumerate() {
            vectors.set(row, col, z);
        }
    }
    Eigensystem { values, vectors }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with the unitary `G` acting on the `(p, q)` plane:
/// a phase that makes the pivot real followed by a real Jacobi rotation.
/// Updates `a <- G† a G` and `v <- v G`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / mag;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G restricted to the (p, q) block
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let d = a.dim();
    for k in 0..d {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * gpp + akq * gqp);
        a.set(k, q, akp * gpq + akq * gqq);
    }
    for k in 0..d {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, gpp.conj() * apk + gqp.conj() * aqk);
        a.set(q, k, gpq.conj() * apk + gqq.conj() * aqk);
    }
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    a.set(p, p, C64::new(app - t * mag, 0.0));
    a.set(q, q, C64::new(aqq + t * mag, 0.0));

    for k in 0..d {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * gpp + vkq * gqp);
        v.set(k, q, vkp * gpq + vkq * gqq);
    }
}

fn fix_phase(vec: &mut [C64]) {
    let largest = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let Some(pivot) = vec.iter().position(|z| z.norm() >= largest * (1.0 - 1e-12)) else {
        return;
    };
    let z = vec[pivot];
    if z.norm() == 0.0 {
        return;
    }
    let rot = z.conj() / z.norm();
    for x in vec.iter_mut() {
        *x *= rot;
    }
    vec[pivot] = C64::new(vec[pivot].norm(), 0.0);
}

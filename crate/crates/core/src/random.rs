//! Random operators and states for property tests and sampling.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{inner, vector_norm, ComplexMatrix, C64};
use crate::state::{DensityMatrix, HermitianOperator, PureState};

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian_complex(rng))
}

/// `(G + G†) · scale / 2` for a complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> ComplexMatrix {
    gaussian_matrix(rng, dim).hermitian_part().scale_real(scale)
}

pub fn random_hermitian_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> HermitianOperator {
    HermitianOperator::new(random_hermitian(rng, dim, scale)).expect("hermitian by construction")
}

/// Haar-distributed unitary: Gram-Schmidt QR of a complex Gaussian matrix
/// with the diagonal of R made positive.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        // two passes keep the columns orthonormal to roundoff
        for _ in 0..2 {
            for q in &cols {
                let proj = inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let n = vector_norm(&v);
        for x in v.iter_mut() {
            *x /= n;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// `G G† / Tr(G G†)`: full-rank with probability one.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, dim);
    DensityMatrix::normalized(&g * &g.dagger()).expect("positive by construction")
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    PureState::normalize((0..dim).map(|_| gaussian_complex(rng)).collect()).expect("nonzero with probability one")
}

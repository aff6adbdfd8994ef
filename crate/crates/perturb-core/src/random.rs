//! Deterministic random operator ensembles.
//!
//! All experiment inputs are drawn from a ChaCha8 stream keyed by a 64-bit
//! seed, with Gaussian variates produced by Box–Muller.  Identical
//! `(kind, dim, seed, scale)` calls reproduce identical matrices on every
//! platform, which the harness relies on for byte-stable outputs and for
//! splitting work across threads without changing results.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::svd;
use crate::error::Result;
use crate::matrix::{ComplexMatrix, HermitianMatrix, UnitaryMatrix};

/// The kinds of operator the generator can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `(G + G*)/2` for a standard complex Gaussian `G`, scaled.
    Hermitian,
    /// Gram–Schmidt orthonormalization of a complex Gaussian matrix.
    Unitary,
    /// Gaussian matrix rescaled so its top singular value is one, then scaled
    /// by `min(scale, 1)` to stay a contraction.
    Contraction,
    /// Plain complex Gaussian matrix, scaled.
    General,
}

/// A Gaussian sampler over a seekable ChaCha8 stream.
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in (0, 1], from the top 53 bits of one 64-bit word.
    fn uniform_open(&mut self) -> f64 {
        let x = self.rng.next_u64() >> 11;
        (x as f64 + 1.0) * (1.0 / 9007199254740992.0)
    }

    /// Standard real normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform_open();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }

    /// Standard complex normal (unit second moment: `E|z|² = 1`).
    pub fn complex_normal(&mut self) -> Complex64 {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(self.normal() * inv_sqrt2, self.normal() * inv_sqrt2)
    }
}

fn gaussian_matrix(dim: usize, stream: &mut GaussianStream) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| stream.complex_normal())
}

fn gram_schmidt_unitary(g: &ComplexMatrix) -> ComplexMatrix {
    let n = g.dim();
    // Columns of g, orthonormalized in order (modified Gram–Schmidt).
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let d = proj * cols[k][i];
                cols[j][i] -= d;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            cols[j][i] /= norm;
        }
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// Draws one operator of the requested kind.  Deterministic in all arguments.
pub fn rand_operator(kind: OperatorKind, dim: usize, seed: u64, scale: f64) -> Result<ComplexMatrix> {
    let mut stream = GaussianStream::new(seed);
    let g = gaussian_matrix(dim, &mut stream);
    match kind {
        OperatorKind::Hermitian => Ok(g.add(&g.adjoint()).scale_re(0.5 * scale)),
        OperatorKind::Unitary => Ok(gram_schmidt_unitary(&g)),
        OperatorKind::Contraction => {
            let s0 = svd(&g)?.s(0);
            Ok(g.scale_re(scale.min(1.0) / s0))
        }
        OperatorKind::General => Ok(g.scale_re(scale)),
    }
}

/// Convenience wrapper returning a validated Hermitian matrix.
pub fn rand_hermitian(dim: usize, seed: u64, scale: f64) -> Result<HermitianMatrix> {
    HermitianMatrix::new(rand_operator(OperatorKind::Hermitian, dim, seed, scale)?)
}

/// Convenience wrapper returning a validated unitary matrix.
pub fn rand_unitary(dim: usize, seed: u64) -> Result<UnitaryMatrix> {
    UnitaryMatrix::new(rand_operator(OperatorKind::Unitary, dim, seed, 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_deterministic() {
        let a = rand_operator(OperatorKind::General, 6, 42, 1.0).unwrap();
        let b = rand_operator(OperatorKind::General, 6, 42, 1.0).unwrap();
        assert_eq!(a, b);
        let c = rand_operator(OperatorKind::General, 6, 43, 1.0).unwrap();
        assert!(a.sub(&c).frobenius_norm() > 1e-6);
    }

    #[test]
    fn hermitian_kind_is_hermitian() {
        let h = rand_operator(OperatorKind::Hermitian, 8, 7, 0.5).unwrap();
        assert!(h.hermitian_deviation() < 1e-14);
    }

    #[test]
    fn unitary_kind_is_unitary() {
        let u = rand_operator(OperatorKind::Unitary, 8, 11, 1.0).unwrap();
        assert!(u.unitary_deviation() < 1e-12);
    }

    #[test]
    fn contraction_kind_has_unit_top_singular_value() {
        let t = rand_operator(OperatorKind::Contraction, 8, 3, 1.0).unwrap();
        let s0 = svd(&t).unwrap().s(0);
        assert!(s0 <= 1.0 + 1e-12);
        assert!(s0 > 0.99);
    }
}

//! Dense square complex matrices in row-major storage.
//!
//! Everything in this crate works on modest dense dimensions (a few hundred,
//! up to ~1024 for the lacunary sections), so the representation is a flat
//! `Vec<Complex64>` with no blocking or sparsity.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;
/// Tolerance factor for accepting a matrix as unitary (`‖U*U − I‖_F ≤ tol·√dim`).
pub const UNITARY_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_dim(other).expect("matrix addition");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_dim(other).expect("matrix subtraction");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            data,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self * other`, cache-friendly i-k-j ordering.
    pub fn matmul(&self, other: &Self) -> Self {
        self.check_dim(other).expect("matrix product");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                let orow = &mut out[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] += aik * brow[j];
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        ComplexMatrix {
            dim: n,
            data: (0..n * n)
                .map(|idx| self.data[(idx % n) * n + idx / n].conj())
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_ij |M_ij − conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        dev
    }

    /// `‖U*U − I‖_F`.
    pub fn unitary_deviation(&self) -> f64 {
        let gram = self.adjoint().matmul(self);
        gram.sub(&Self::identity(self.dim)).frobenius_norm()
    }

    /// True when every entry has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.dim + other.dim;
        let mut out = Self::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                out.set(self.dim + i, self.dim + j, other.get(i, j));
            }
        }
        out
    }

    /// n-fold direct sum of copies of `self`.
    pub fn direct_sum_copies(&self, copies: usize) -> Self {
        assert!(copies >= 1, "need at least one copy");
        let n = self.dim * copies;
        let mut out = Self::zeros(n);
        for c in 0..copies {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    out.set(c * self.dim + i, c * self.dim + j, self.get(i, j));
                }
            }
        }
        out
    }
}

/// A matrix validated as Hermitian on construction.
#[derive(Debug, Clone)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let bound = HERMITIAN_REL_TOL * m.frobenius_norm().max(f64::MIN_POSITIVE);
        let dev = m.hermitian_deviation();
        if dev > bound {
            return Err(Error::NotHermitian {
                deviation: dev,
                bound,
            });
        }
        Ok(HermitianMatrix(m))
    }

    /// Replaces `m` by its Hermitian part `(m + m*)/2` and wraps it.
    pub fn symmetrize(m: &ComplexMatrix) -> Self {
        let h = m.add(&m.adjoint()).scale_re(0.5);
        HermitianMatrix(h)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// A matrix validated as unitary on construction.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let bound = UNITARY_REL_TOL * (m.dim() as f64).sqrt();
        let dev = m.unitary_deviation();
        if dev > bound {
            return Err(Error::NotUnitary {
                deviation: dev,
                bound,
            });
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

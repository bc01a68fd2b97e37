//! Dense complex Hermitian matrices and their real symmetric embedding.
//!
//! The SDP solver works on the real embedding of each Hermitian block: an
//! n-by-n complex Hermitian matrix maps to the 2n-by-2n real symmetric matrix
//! `[Re, -Im; Im, Re]`, whose eigenvalues are those of the original with
//! doubled multiplicity. `real_embed` and `complex_restore` convert between
//! the two representations; eigendecomposition and PSD checks operate on the
//! complex form directly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum HermitianError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("embedded matrix order {order} is odd")]
    OddEmbeddingOrder { order: usize },
    #[error("matrix deviates from the [re, -im; im, re] block structure by {deviation:.3e}")]
    BrokenEmbedding { deviation: f64 },
}

/// Dense Hermitian matrix. Construction symmetrizes, so `m == m^H` holds
/// exactly afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Build from an arbitrary square matrix by averaging with its conjugate
    /// transpose.
    pub fn from_matrix(m: &DMatrix<C64>) -> Result<Self, HermitianError> {
        if m.nrows() != m.ncols() {
            return Err(HermitianError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let sym = (m + m.adjoint()).scale(0.5);
        Ok(Self { data: sym })
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            data: DMatrix::zeros(order, order),
        }
    }

    pub fn identity(order: usize) -> Self {
        Self {
            data: DMatrix::identity(order, order),
        }
    }

    /// `t * I`.
    pub fn scaled_identity(order: usize, t: f64) -> Self {
        Self {
            data: DMatrix::identity(order, order) * C64::new(t, 0.0),
        }
    }

    /// Rank-one outer product `v v^H`.
    pub fn outer(v: &DVector<C64>) -> Self {
        let m = v * v.adjoint();
        // v v^H is Hermitian up to conjugation roundoff; symmetrize anyway.
        Self {
            data: (&m + m.adjoint()).scale(0.5),
        }
    }

    pub fn order(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            data: self.data.scale(t),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            data: &self.data + &other.data,
        }
    }

    /// Real trace of the matrix.
    pub fn trace(&self) -> f64 {
        self.data.diagonal().iter().map(|z| z.re).sum()
    }

    /// Hermitian inner product `Re Tr(A B)`; the imaginary part vanishes for
    /// Hermitian operands.
    pub fn trace_product(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.order(), other.order());
        let mut acc = 0.0;
        for j in 0..self.order() {
            for i in 0..self.order() {
                let a = self.data[(i, j)];
                let b = other.data[(j, i)];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// Eigendecomposition with eigenvalues sorted descending and orthonormal
    /// eigenvector columns.
    pub fn eig_decompose(&self) -> EigenDecomposition {
        let se = self.data.clone().symmetric_eigen();
        let n = self.order();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            se.eigenvalues[b]
                .partial_cmp(&se.eigenvalues[a])
                .expect("eigenvalues of a Hermitian matrix are finite")
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &se.eigenvectors.column(src));
        }
        EigenDecomposition {
            eigenvalues,
            eigenvectors,
        }
    }

    /// Smallest eigenvalue is at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        let eig = self.eig_decompose();
        match eig.eigenvalues.last() {
            Some(&min) => min >= -tol,
            None => true,
        }
    }

    /// Real symmetric embedding `[Re, -Im; Im, Re]` of order `2n`.
    pub fn real_embed(&self) -> DMatrix<f64> {
        let n = self.order();
        let mut r = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for i in 0..n {
                let z = self.data[(i, j)];
                r[(i, j)] = z.re;
                r[(n + i, n + j)] = z.re;
                r[(i, n + j)] = -z.im;
                r[(n + i, j)] = z.im;
            }
        }
        r
    }

    /// Inverse of [`real_embed`]. Rejects inputs whose blocks deviate from the
    /// embedding structure by more than `1e-10` relative to the largest entry.
    pub fn complex_restore(r: &DMatrix<f64>) -> Result<Self, HermitianError> {
        if r.nrows() != r.ncols() {
            return Err(HermitianError::NotSquare {
                rows: r.nrows(),
                cols: r.ncols(),
            });
        }
        if r.nrows() % 2 != 0 {
            return Err(HermitianError::OddEmbeddingOrder { order: r.nrows() });
        }
        let n = r.nrows() / 2;
        let scale = 1.0 + r.amax();
        let mut deviation = 0.0f64;
        let mut data = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let re_a = r[(i, j)];
                let re_d = r[(n + i, n + j)];
                let im_c = r[(n + i, j)];
                let im_b = r[(i, n + j)];
                deviation = deviation.max((re_a - re_d).abs()).max((im_b + im_c).abs());
                data[(i, j)] = C64::new(0.5 * (re_a + re_d), 0.5 * (im_c - im_b));
            }
        }
        if deviation > 1e-10 * scale {
            return Err(HermitianError::BrokenEmbedding {
                deviation: deviation / scale,
            });
        }
        Self::from_matrix(&data)
    }
}

/// Result of [`HermitianMatrix::eig_decompose`]: real eigenvalues descending,
/// eigenvectors as matching orthonormal columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl EigenDecomposition {
    /// `V diag(lambda) V^H`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let lambda = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
        );
        &self.eigenvectors * DMatrix::from_diagonal(&lambda) * self.eigenvectors.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(order: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let raw = DMatrix::from_fn(order, order, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        HermitianMatrix::from_matrix(&raw).unwrap()
    }

    #[test]
    fn identity_eigenvalues_are_all_one() {
        let eig = HermitianMatrix::identity(4).eig_decompose();
        for l in &eig.eigenvalues {
            assert!((l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_outer_product_decomposes() {
        let v = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let m = HermitianMatrix::outer(&v);
        let eig = m.eig_decompose();
        assert!((eig.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!(eig.eigenvalues[1].abs() < 1e-12);
        // Top eigenvector is proportional to [1, j]/sqrt(2); compare moduli of
        // the inner product with the normalized v.
        let top = eig.eigenvectors.column(0);
        let overlap = (v.adjoint() * top)[(0, 0)].norm() / v.norm();
        assert!((overlap - 1.0).abs() < 1e-12, "overlap {overlap}");
    }

    #[test]
    fn two_by_two_eigenvalues_match_characteristic_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = random_hermitian(2, &mut rng);
            let a = m.matrix()[(0, 0)].re;
            let d = m.matrix()[(1, 1)].re;
            let b = m.matrix()[(0, 1)];
            // Roots of lambda^2 - (a+d) lambda + (ad - |b|^2).
            let half_tr = 0.5 * (a + d);
            let disc = (half_tr * half_tr - (a * d - b.norm_sqr())).max(0.0).sqrt();
            let expected = [half_tr + disc, half_tr - disc];
            let eig = m.eig_decompose();
            for (got, want) in eig.eigenvalues.iter().zip(expected) {
                assert!((got - want).abs() <= 1e-10, "got {got}, want {want}");
            }
        }
    }

    #[test]
    fn reconstruction_error_is_tiny() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for order in [1, 2, 4, 8] {
            let m = random_hermitian(order, &mut rng);
            let rec = m.eig_decompose().reconstruct();
            let err = (rec - m.matrix()).norm();
            assert!(err <= 1e-10 * m.norm().max(1.0), "order {order}: err {err}");
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_hermitian(6, &mut rng);
        let v = m.eig_decompose().eigenvectors;
        let gram = v.adjoint() * &v;
        let err = (gram - DMatrix::<C64>::identity(6, 6)).norm();
        assert!(err < 1e-10, "gram deviation {err}");
    }

    #[test]
    fn psd_checks() {
        assert!(HermitianMatrix::identity(3).is_psd(1e-9));
        let m = HermitianMatrix::from_matrix(&DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1e-3, 0.0),
        ])))
        .unwrap();
        assert!(!m.is_psd(1e-9));
    }

    #[test]
    fn embed_restore_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let m = random_hermitian(4, &mut rng);
            let back = HermitianMatrix::complex_restore(&m.real_embed()).unwrap();
            let err = (back.matrix() - m.matrix()).norm();
            assert!(err < 1e-12, "roundtrip err {err}");
        }
    }

    #[test]
    fn embedding_doubles_eigenvalue_multiplicity() {
        let v = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let m = HermitianMatrix::outer(&v);
        let embedded = m.real_embed();
        let mut eig: Vec<f64> = embedded.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let expected = [2.0, 2.0, 0.0, 0.0];
        for (got, want) in eig.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }

        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let m = random_hermitian(3, &mut rng);
        let complex_eig = m.eig_decompose().eigenvalues;
        let mut embedded_eig: Vec<f64> = m
            .real_embed()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        embedded_eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (i, l) in complex_eig.iter().enumerate() {
            assert!((embedded_eig[2 * i] - l).abs() < 1e-10);
            assert!((embedded_eig[2 * i + 1] - l).abs() < 1e-10);
        }
    }

    #[test]
    fn restore_rejects_broken_structure() {
        let mut r = HermitianMatrix::identity(2).real_embed();
        r[(0, 0)] = 2.0; // breaks Re-block equality
        assert!(matches!(
            HermitianMatrix::complex_restore(&r),
            Err(HermitianError::BrokenEmbedding { .. })
        ));
    }
}

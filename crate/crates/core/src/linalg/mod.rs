//! Dense kernels: the complement basis `Q`, Sylvester and Lyapunov solvers,
//! eigendecompositions and pseudoinverses.

mod schur;
mod sylvester;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use schur::{eigvals_general, real_schur, RealSchur};
pub use sylvester::{lyapunov_reference, sylvester_solve};

/// Default absolute tolerance for norm-scaled construction residuals.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

/// Eigenvector components at or below this magnitude count as zero when
/// fixing signs (eigenvectors are unit length).
pub const ZERO_COMPONENT_TOL: f64 = 1e-9;

/// Orthonormal basis of the complement of the all-ones vector, stored as the
/// rows of an `(n-1) x n` matrix `Q` with `Q1 = 0`, `QQᵀ = I` and `QᵀQ = Pₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementBasis {
    q: DMatrix<f64>,
}

impl ComplementBasis {
    /// Accepts a caller-provided basis after checking the three identities.
    pub fn from_matrix(q: DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = q.ncols();
        if n < 2 || q.nrows() != n - 1 {
            return Err(Error::InvalidArgument(format!(
                "basis must be (n-1) x n with n >= 2, got {} x {}",
                q.nrows(),
                n
            )));
        }
        let basis = Self { q };
        let worst = basis.identity_residuals().into_iter().fold(0.0, f64::max);
        if worst > tol {
            return Err(Error::InvalidArgument(format!(
                "basis violates Q1 = 0, QQᵀ = I, QᵀQ = P (residual {worst:e})"
            )));
        }
        Ok(basis)
    }

    /// A randomly rotated basis (Gaussian matrix, centered, orthonormalized).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("basis needs n >= 2, got {n}")));
        }
        let g = DMatrix::<f64>::from_fn(n, n - 1, |_, _| rng.sample(StandardNormal));
        let centered = centering_projector(n) * g;
        let qr = centered.qr();
        Ok(Self {
            q: qr.q().transpose(),
        })
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Max-abs residuals of `Q1 = 0`, `QQᵀ = I` and `QᵀQ = Pₙ`.
    pub fn identity_residuals(&self) -> [f64; 3] {
        let n = self.dim();
        let ones = DVector::from_element(n, 1.0);
        [
            (&self.q * ones).amax(),
            (&self.q * self.q.transpose() - DMatrix::identity(n - 1, n - 1)).amax(),
            (self.q.transpose() * &self.q - centering_projector(n)).amax(),
        ]
    }

    /// `Q M Qᵀ` for an `n x n` matrix.
    pub fn reduce(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.q * m * self.q.transpose()
    }

    /// `Qᵀ M Q` for an `(n-1) x (n-1)` matrix.
    pub fn lift(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.q.transpose() * m * &self.q
    }
}

/// Reflector-based basis: the Householder reflector sending `1/√n` to the
/// last coordinate axis is symmetric and orthogonal with last row `1ᵀ/√n`,
/// so its first `n-1` rows span the complement of `1`.
pub fn complement_basis(n: usize) -> Result<ComplementBasis> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("basis needs n >= 2, got {n}")));
    }
    let s = 1.0 / (n as f64).sqrt();
    let mut v = DVector::from_element(n, s);
    v[n - 1] -= 1.0;
    let vv = v.norm_squared();
    let q = DMatrix::from_fn(n - 1, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - 2.0 * v[i] * v[j] / vv
    });
    Ok(ComplementBasis { q })
}

/// `Pₙ = I - (1/n) 11ᵀ`.
pub fn centering_projector(n: usize) -> DMatrix<f64> {
    let c = 1.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 - c } else { -c })
}

/// `k`-th standard basis vector of `R^n`.
pub fn basis_vector(n: usize, k: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[k] = 1.0;
    e
}

/// Ascending eigenvalues with orthonormal eigenvectors in the columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn recompose(&self) -> DMatrix<f64> {
        &self.eigenvectors
            * DMatrix::from_diagonal(&self.eigenvalues)
            * self.eigenvectors.transpose()
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn symmetrized(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(m)?;
    let res = crate::graph::symmetry_residual(m);
    if res > 1e-8 * m.amax().max(1.0) {
        return Err(Error::Asymmetric(res));
    }
    Ok((m + m.transpose()) * 0.5)
}

/// Symmetric eigendecomposition with ascending eigenvalues. Each eigenvector
/// is signed so that its first nonzero component is positive.
pub fn sym_eig(m: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let s = symmetrized(m)?;
    let n = s.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: DVector::zeros(0),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(s, f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::Convergence("symmetric eigensolver"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        if let Some(first) = col.iter().find(|x| x.abs() > ZERO_COMPONENT_TOL) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Moore-Penrose pseudoinverse of a symmetric matrix with the default rank
/// tolerance `n·ε·max|λ|`.
pub fn pseudoinverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    pseudoinverse_with_tol(m, None)
}

/// Symmetric pseudoinverse; eigenvalues with `|λ| <= rank_tol` are dropped.
pub fn pseudoinverse_with_tol(m: &DMatrix<f64>, rank_tol: Option<f64>) -> Result<DMatrix<f64>> {
    let eig = sym_eig(m)?;
    let n = m.nrows();
    let max = eig.eigenvalues.amax();
    let tol = rank_tol.unwrap_or(n as f64 * f64::EPSILON * max);
    let inv = eig
        .eigenvalues
        .map(|l| if l.abs() > tol { 1.0 / l } else { 0.0 });
    let u = &eig.eigenvectors;
    let p = u * DMatrix::from_diagonal(&inv) * u.transpose();
    Ok((&p + p.transpose()) * 0.5)
}

/// Pseudoinverse of a general square matrix, dropping singular values at or
/// below `n·ε·σ_max`.
///
/// The singular triplets come from the symmetric eigenproblem of
/// `[[0, M], [Mᵀ, 0]]`, whose eigenpairs are `±σ` with eigenvectors
/// `(u, ±v)/√2`. Each eigenvector `(a, b)` for `σ > 0` contributes
/// `2 b aᵀ / σ`, which is independent of how a repeated singular value's
/// eigenspace is split.
pub fn pseudoinverse_general(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let mut jw = DMatrix::zeros(2 * n, 2 * n);
    jw.view_mut((0, n), (n, n)).copy_from(m);
    jw.view_mut((n, 0), (n, n)).copy_from(&m.transpose());
    let eig = sym_eig(&jw)?;
    let sigma_max = eig.eigenvalues.amax();
    let tol = n as f64 * f64::EPSILON * sigma_max;
    let mut p = DMatrix::zeros(n, n);
    for (k, &sigma) in eig.eigenvalues.iter().enumerate() {
        if sigma > tol {
            let w = eig.eigenvectors.column(k);
            let a = w.rows(0, n);
            let b = w.rows(n, n);
            p.ger(2.0 / sigma, &b, &a, 1.0);
        }
    }
    Ok(p)
}

/// Inverse of a symmetric positive definite matrix through Cholesky.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let s = symmetrized(m)?;
    let chol = s
        .cholesky()
        .ok_or_else(|| Error::Singular("matrix is not positive definite".into()))?;
    let inv = chol.inverse();
    Ok((&inv + inv.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p3u() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0])
    }

    #[test]
    fn basis_for_two_nodes() {
        let q = complement_basis(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let row = q.matrix().row(0);
        assert_relative_eq!(row[0].abs(), s, epsilon = 1e-15);
        assert_relative_eq!(row[0], -row[1], epsilon = 1e-15);
    }

    #[test]
    fn basis_identities() {
        for n in [2, 3, 5, 17, 100] {
            let q = complement_basis(n).unwrap();
            for r in q.identity_residuals() {
                assert!(r < 1e-12, "n={n} residual {r}");
            }
        }
        let p5 = complement_basis(5).unwrap();
        let diff = p5.matrix().transpose() * p5.matrix() - centering_projector(5);
        assert!(diff.amax() < 1e-12);
        assert!(complement_basis(1).is_err());
    }

    #[test]
    fn basis_is_deterministic() {
        assert_eq!(complement_basis(7).unwrap(), complement_basis(7).unwrap());
    }

    #[test]
    fn random_basis_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = ComplementBasis::random(9, &mut rng).unwrap();
        assert!(ComplementBasis::from_matrix(q.matrix().clone(), 1e-12).is_ok());
        assert!(ComplementBasis::from_matrix(DMatrix::identity(2, 3), 1e-12).is_err());
    }

    #[test]
    fn sym_eig_examples() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = sym_eig(&d).unwrap();
        assert_eq!(e.eigenvalues.as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(e.eigenvectors.column(0).as_slice(), &[0.0, 1.0, 0.0]);

        let e = sym_eig(&p3u()).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([0.0, 1.0, 3.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
        assert!((e.recompose() - p3u()).amax() < 1e-12);

        let e = sym_eig(&centering_projector(5)).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([0.0, 1.0, 1.0, 1.0, 1.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
        let ut_u = e.eigenvectors.transpose() * &e.eigenvectors;
        assert!((ut_u - DMatrix::identity(5, 5)).amax() < 1e-12);
    }

    #[test]
    fn sym_eig_sign_convention() {
        let e = sym_eig(&p3u()).unwrap();
        for col in e.eigenvectors.column_iter() {
            let first = col.iter().find(|x| x.abs() > ZERO_COMPONENT_TOL).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn sym_eig_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_eig(&m), Err(Error::Asymmetric(_))));
    }

    #[test]
    fn pseudoinverse_examples() {
        let p2 = centering_projector(2);
        assert!((pseudoinverse(&p2).unwrap() - &p2).amax() < 1e-14);
        let i3 = DMatrix::<f64>::identity(3, 3);
        assert!((pseudoinverse(&i3).unwrap() - &i3).amax() < 1e-14);
        assert_eq!(pseudoinverse(&DMatrix::zeros(3, 3)).unwrap(), DMatrix::zeros(3, 3));

        let g = pseudoinverse(&p3u()).unwrap();
        let d = basis_vector(3, 0) - basis_vector(3, 2);
        assert_relative_eq!(d.dot(&(&g * &d)), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn pseudoinverse_general_matches_closed_form() {
        // PₙL for the directed 3-cycle has rank 2 with kernel 1 on both sides.
        let l = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, 0.0, 1.0, -1.0, -1.0, 0.0, 1.0]);
        let q = complement_basis(3).unwrap();
        let closed = q.lift(&q.reduce(&l).try_inverse().unwrap());
        let svd = pseudoinverse_general(&(centering_projector(3) * &l)).unwrap();
        assert!((closed - svd).amax() < 1e-12);
    }

    fn penrose_residual(m: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
        let a = (m * p * m - m).amax();
        let b = (p * m * p - p).amax();
        let mp = m * p;
        let pm = p * m;
        let c = (&mp - mp.transpose()).amax();
        let d = (&pm - pm.transpose()).amax();
        a.max(b).max(c).max(d)
    }

    #[test]
    fn pseudoinverse_general_handles_repeated_singular_values() {
        // circulants have paired singular values, which tripped the SVD route
        for n in 3..=16 {
            let l = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    1.0
                } else if j == (i + 1) % n {
                    -1.0
                } else {
                    0.0
                }
            });
            let p = pseudoinverse_general(&l).unwrap();
            assert!(penrose_residual(&l, &p) < 1e-12, "n = {n}");
            assert!((&l * &p - centering_projector(n)).amax() < 1e-12);
        }
    }

    #[test]
    fn pseudoinverse_general_on_random_low_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (n, r) in [(1, 1), (4, 2), (9, 8), (12, 5)] {
            let a = DMatrix::<f64>::from_fn(n, r, |_, _| rng.sample(StandardNormal));
            let b = DMatrix::<f64>::from_fn(r, n, |_, _| rng.sample(StandardNormal));
            let m = a * b;
            let p = pseudoinverse_general(&m).unwrap();
            assert!(penrose_residual(&m, &p) < 1e-9 * m.amax().max(1.0), "n = {n}");
        }
        let inv = pseudoinverse_general(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0])).unwrap();
        let exact = DMatrix::from_row_slice(2, 2, &[0.5, -1.0 / 6.0, 0.0, 1.0 / 3.0]);
        assert!((inv - exact).amax() < 1e-14);
        assert_eq!(pseudoinverse_general(&DMatrix::zeros(3, 3)).unwrap(), DMatrix::zeros(3, 3));
    }

    #[test]
    fn spd_inverse_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(spd_inverse(&m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let inv = spd_inverse(&m).unwrap();
        assert!((inv * m - DMatrix::identity(2, 2)).amax() < 1e-14);
    }
}

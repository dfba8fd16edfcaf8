use nalgebra::DMatrix;
use serde::Serialize;

use super::{symmetrize, SymmetrizationResult};
use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;
use crate::linalg::{centering_projector, pseudoinverse_general, sylvester_solve};

/// `L = H (I + 2K) L̂ᵤ` with the Cayley transform `S` of `K`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Oblique projection `H = L (PₙL)⁺`.
    pub h_matrix: DMatrix<f64>,
    /// Skew-symmetric `K = QᵀK̄Q`.
    pub k_matrix: DMatrix<f64>,
    /// Reduced `K̄` solving `L̄K̄ + K̄L̄ᵀ = ½(L̄ - L̄ᵀ)`.
    pub k_reduced: DMatrix<f64>,
    /// Orthogonal `S = (I - 2K)(I + 2K)⁻¹`.
    pub s_matrix: DMatrix<f64>,
    pub sym_laplacian: LaplacianMatrix,
}

/// Residuals of the decomposition identities, each scaled by the natural
/// norm of the quantity involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionResiduals {
    /// `‖H² - H‖ / ‖H‖`
    pub h_idempotent: f64,
    /// `‖HL - L‖ / ‖L‖`
    pub h_fixes_l: f64,
    /// `‖H1‖ / ‖H‖`
    pub h_kills_ones: f64,
    /// `|tr H - (n - 1)|`
    pub h_trace: f64,
    /// `‖K + Kᵀ‖ / max(‖K‖, 1)`
    pub k_skew: f64,
    /// `‖K1‖ / max(‖K‖, 1)`
    pub k_kills_ones: f64,
    /// `‖SᵀS - I‖`
    pub s_orthogonal: f64,
    /// `‖PₙL - (I + 2K)L̂ᵤ‖ / ‖L‖`
    pub projected: f64,
    /// `‖L - H(I + 2K)L̂ᵤ‖ / ‖L‖`
    pub reconstruction: f64,
}

impl DecompositionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.h_idempotent,
            self.h_fixes_l,
            self.h_kills_ones,
            self.h_trace,
            self.k_skew,
            self.k_kills_ones,
            self.s_orthogonal,
            self.projected,
            self.reconstruction,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl Decomposition {
    /// `H (I + 2K) L̂ᵤ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let n = self.h_matrix.nrows();
        &self.h_matrix * self.i_plus_2k(n) * self.sym_laplacian.matrix()
    }

    fn i_plus_2k(&self, n: usize) -> DMatrix<f64> {
        DMatrix::identity(n, n) + &self.k_matrix * 2.0
    }

    /// Frobenius residuals of every identity against the original `L`.
    pub fn residuals(&self, l: &LaplacianMatrix) -> DecompositionResiduals {
        let n = l.dim();
        let lm = l.matrix();
        let h = &self.h_matrix;
        let k = &self.k_matrix;
        let s = &self.s_matrix;
        let ones = nalgebra::DVector::from_element(n, 1.0);
        let l_norm = lm.norm().max(f64::MIN_POSITIVE);
        let h_norm = h.norm().max(f64::MIN_POSITIVE);
        let k_scale = k.norm().max(1.0);
        let ik = self.i_plus_2k(n);
        DecompositionResiduals {
            h_idempotent: (h * h - h).norm() / h_norm,
            h_fixes_l: (h * lm - lm).norm() / l_norm,
            h_kills_ones: (h * &ones).norm() / h_norm,
            h_trace: (h.trace() - (n as f64 - 1.0)).abs(),
            k_skew: (k + k.transpose()).norm() / k_scale,
            k_kills_ones: (k * &ones).norm() / k_scale,
            s_orthogonal: (s.transpose() * s - DMatrix::identity(n, n)).norm(),
            projected: (centering_projector(n) * lm - &ik * self.sym_laplacian.matrix()).norm() / l_norm,
            reconstruction: (lm - self.reconstruct()).norm() / l_norm,
        }
    }
}

/// Computes the full decomposition of a connected Laplacian.
pub fn decompose(l: &LaplacianMatrix) -> Result<Decomposition> {
    let sym = symmetrize(l)?;
    decompose_with(l, &sym)
}

/// Decomposition reusing an existing symmetrization of `l`.
pub fn decompose_with(l: &LaplacianMatrix, sym: &SymmetrizationResult) -> Result<Decomposition> {
    let n = l.dim();
    if sym.basis.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sym.basis.dim(),
        });
    }
    let lbar = &sym.reduced;
    let rhs = (lbar - lbar.transpose()) * 0.5;
    let kbar = sylvester_solve(lbar, &lbar.transpose(), &rhs)?;
    // the solution is skew; drop the rounding-level symmetric part
    let k_reduced = (&kbar - kbar.transpose()) * 0.5;
    let k = sym.basis.lift(&k_reduced);
    let k_matrix = (&k - k.transpose()) * 0.5;
    let h_matrix = l.matrix() * pseudoinverse_general(&(centering_projector(n) * l.matrix()))?;
    let s_matrix = cayley(&k_matrix)?;
    Ok(Decomposition {
        h_matrix,
        k_matrix,
        k_reduced,
        s_matrix,
        sym_laplacian: sym.sym_laplacian.clone(),
    })
}

/// Cayley transform `S = (I - 2K)(I + 2K)⁻¹` of a skew-symmetric `K`.
pub fn cayley(k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = k.nrows();
    if k.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: k.ncols(),
        });
    }
    let skew = (k + k.transpose()).amax();
    if skew > 1e-9 * k.amax().max(1.0) {
        return Err(Error::NotSkew(skew));
    }
    let i = DMatrix::<f64>::identity(n, n);
    // I + 2K has eigenvalues 1 + 2iθ, never singular for skew K
    let inv = (&i + k * 2.0)
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular("I + 2K".into()))?;
    Ok((&i - k * 2.0) * inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, random_connected_digraph, random_connected_undirected, star_graph};
    use crate::graph::{laplacian, DirectedGraph};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cayley_of_zero_is_identity() {
        let s = cayley(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(s, DMatrix::identity(3, 3));
    }

    #[test]
    fn cayley_two_by_two_closed_form() {
        // a = 2k: S = ((1 - a²) I - 2a J) / (1 + a²), J = [[0, 1], [-1, 0]]
        for k in [0.1, 0.5, -0.7, 3.0] {
            let km = DMatrix::from_row_slice(2, 2, &[0.0, k, -k, 0.0]);
            let s = cayley(&km).unwrap();
            let a = 2.0 * k;
            let d = 1.0 + a * a;
            let expected = DMatrix::from_row_slice(
                2,
                2,
                &[(1.0 - a * a) / d, -2.0 * a / d, 2.0 * a / d, (1.0 - a * a) / d],
            );
            assert_relative_eq!(s, expected, epsilon = 1e-14);
            // a rotation by the angle 2·atan(2k) in the counter-clockwise sense
            let theta = 2.0 * a.atan();
            assert_relative_eq!(s[(1, 0)], theta.sin(), epsilon = 1e-14);
            assert_relative_eq!(s[(0, 0)], theta.cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn cayley_rejects_non_skew() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(cayley(&m), Err(Error::NotSkew(_))));
    }

    #[test]
    fn undirected_graph_has_trivial_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = laplacian(&random_connected_undirected(8, 0.3, &mut rng).unwrap());
        let d = decompose(&l).unwrap();
        assert!(d.k_matrix.amax() < 1e-10);
        assert!((&d.s_matrix - DMatrix::identity(8, 8)).amax() < 1e-10);
        assert!((&d.h_matrix - centering_projector(8)).amax() < 1e-9);
    }

    #[test]
    fn directed_cycle_projection_is_centering() {
        for n in 3..=12 {
            let l = laplacian(&cycle_graph(n, true).unwrap());
            let d = decompose(&l).unwrap();
            assert!((&d.h_matrix - centering_projector(n)).amax() < 1e-9, "n = {n}: {}", d.h_matrix);
        }
    }

    #[test]
    fn in_star_projection_has_block_form() {
        // relabel so that the center is the last node
        let g = star_graph(4, true).unwrap();
        let g = g.permuted(&[4, 0, 1, 2, 3]).unwrap();
        let l = laplacian(&g);
        assert_eq!(l.globally_reachable_nodes(), vec![4]);
        let d = decompose(&l).unwrap();
        let mut expected = DMatrix::zeros(5, 5);
        for i in 0..4 {
            expected[(i, i)] = 1.0;
            expected[(i, 4)] = -1.0;
        }
        assert!((&d.h_matrix - expected).amax() < 1e-9);
    }

    #[test]
    fn identities_hold_on_random_digraphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [2, 3, 6, 15] {
            let g = random_connected_digraph(n, 0.3, &mut rng).unwrap();
            let l = laplacian(&g);
            let d = decompose(&l).unwrap();
            let r = d.residuals(&l);
            assert!(r.max() < 1e-8, "n = {n}: {r:?}");
        }
    }

    #[test]
    fn reduced_k_matches_closed_form() {
        // K̄ = L̄Σ - ½I follows from L̄Σ + ΣL̄ᵀ = I
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l = laplacian(&random_connected_digraph(9, 0.3, &mut rng).unwrap());
        let sym = symmetrize(&l).unwrap();
        let d = decompose_with(&l, &sym).unwrap();
        let closed = &sym.reduced * &sym.sigma - DMatrix::identity(8, 8) * 0.5;
        assert!((&d.k_reduced - closed).amax() < 1e-10);
        // and ½(I + S) = (I + 2K)⁻¹
        let i = DMatrix::<f64>::identity(9, 9);
        let lhs = (&i + &d.s_matrix) * 0.5;
        let rhs = (&i + &d.k_matrix * 2.0).try_inverse().unwrap();
        assert!((lhs - rhs).amax() < 1e-10);
    }

    #[test]
    fn projection_matches_reduced_inverse() {
        // (PₙL)⁺ = QᵀL̄⁻¹Q for connected graphs
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let l = laplacian(&random_connected_digraph(7, 0.3, &mut rng).unwrap());
        let sym = symmetrize(&l).unwrap();
        let d = decompose_with(&l, &sym).unwrap();
        let lbar_inv = sym.reduced.clone().try_inverse().unwrap();
        let h = l.matrix() * sym.basis.lift(&lbar_inv);
        assert!((&d.h_matrix - h).amax() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let l = laplacian(&DirectedGraph::new(2, [(0, 1, 1.0)]).unwrap());
        let sym = symmetrize(&laplacian(&cycle_graph(3, true).unwrap())).unwrap();
        assert!(matches!(
            decompose_with(&l, &sym),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}

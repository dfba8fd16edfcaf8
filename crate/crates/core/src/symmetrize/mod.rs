//! Resistance-preserving symmetrization.
//!
//! For a connected digraph Laplacian `L` and a complement basis `Q`, the
//! reduced Laplacian `L̄ = QLQᵀ` is stable, the Lyapunov equation
//! `L̄Σ + ΣL̄ᵀ = I` has a unique SPD solution, and `X = 2QᵀΣQ` holds the
//! effective resistances `r_ij = x_ii + x_jj - 2x_ij`. The undirected
//! Laplacian `L̂ᵤ = X⁺ = ½QᵀΣ⁻¹Q` has exactly the same resistances.

mod decompose;
mod embedding;
mod montecarlo;
mod verify;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;
use crate::linalg::{complement_basis, eigvals_general, spd_inverse, sylvester_solve, ComplementBasis};

pub use decompose::{cayley, decompose, decompose_with, Decomposition, DecompositionResiduals};
pub use embedding::{approx_resistance, spectral_embedding, ApproxResistance, SpectralEmbedding};
pub use montecarlo::{mc_covariance_oracle, MC_BURN_IN_FRACTION};
pub use verify::{verify_symmetrization, Spectra, SymmetrizationReport};

/// Tolerances shared by the pipeline and its self-checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Bound on norm-scaled construction residuals.
    pub residual: f64,
    /// Bound on cross-checks between independently computed quantities.
    pub check: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-9,
            check: 1e-8,
        }
    }
}

/// Output of [`symmetrize`].
#[derive(Debug, Clone)]
pub struct SymmetrizationResult {
    /// Reduced Laplacian `QLQᵀ`.
    pub reduced: DMatrix<f64>,
    /// Lyapunov solution `Σ`.
    pub sigma: DMatrix<f64>,
    /// `X = 2QᵀΣQ`.
    pub x_matrix: DMatrix<f64>,
    /// `L̂ᵤ = X⁺`.
    pub sym_laplacian: LaplacianMatrix,
    pub basis: ComplementBasis,
}

impl SymmetrizationResult {
    pub fn resistance_matrix(&self) -> ResistanceMatrix {
        ResistanceMatrix::from_gram(&self.x_matrix)
    }

    /// `‖L̄Σ + ΣL̄ᵀ - I‖_F`.
    pub fn lyapunov_residual(&self) -> f64 {
        lyapunov_residual(&self.reduced, &self.sigma)
    }
}

pub(crate) fn lyapunov_residual(lbar: &DMatrix<f64>, sigma: &DMatrix<f64>) -> f64 {
    let k = lbar.nrows();
    let r = lbar * sigma + sigma * lbar.transpose() - DMatrix::identity(k, k);
    r.norm()
}

/// Pairwise effective resistances. Symmetric with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl ResistanceMatrix {
    /// Resistances from the Gram-like matrix `X`.
    pub fn from_gram(x: &DMatrix<f64>) -> Self {
        let n = x.nrows();
        let entries = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                x[(i, i)] + x[(j, j)] - 2.0 * x[(i, j)]
            }
        });
        // exact symmetry regardless of rounding in X
        let entries = DMatrix::from_fn(n, n, |i, j| {
            if i <= j {
                entries[(i, j)]
            } else {
                entries[(j, i)]
            }
        });
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Smallest value of `√r_ik + √r_kj - √r_ij` over all triples. A
    /// negative value means the square roots fail to be a metric.
    pub fn min_triangle_slack(&self) -> f64 {
        let n = self.n;
        let s = self.entries.map(|r| r.max(0.0).sqrt());
        let mut worst = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    if k != i && k != j {
                        worst = worst.min(s[(i, k)] + s[(k, j)] - s[(i, j)]);
                    }
                }
            }
        }
        worst
    }

    /// Largest entrywise relative difference `|a - b| / max(|a|, |b|)`
    /// over off-diagonal pairs.
    pub fn max_relative_difference(&self, other: &ResistanceMatrix) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = self.entries[(i, j)];
                let b = other.entries[(i, j)];
                let scale = a.abs().max(b.abs());
                if scale > 0.0 {
                    worst = worst.max((a - b).abs() / scale);
                }
            }
        }
        worst
    }
}

/// `L̄ = QLQᵀ`.
pub fn reduced_laplacian(l: &LaplacianMatrix, q: &ComplementBasis) -> Result<DMatrix<f64>> {
    if l.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: l.dim(),
        });
    }
    Ok(q.reduce(l.matrix()))
}

/// Solves `L̄Σ + ΣL̄ᵀ = I`. Fails with [`Error::Disconnected`] when some
/// eigenvalue of `L̄` has nonpositive real part.
pub fn edge_gramian(lbar: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = lbar.nrows();
    if lbar.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: lbar.ncols(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("empty reduced Laplacian".into()));
    }
    let scale = lbar.amax();
    let min_re = eigvals_general(lbar)?
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    if !(min_re > 1e-12 * scale) {
        return Err(Error::Disconnected);
    }
    let sigma = sylvester_solve(lbar, &lbar.transpose(), &DMatrix::identity(k, k))
        .map_err(connectivity_error)?;
    Ok((&sigma + sigma.transpose()) * 0.5)
}

fn connectivity_error(e: Error) -> Error {
    match e {
        Error::SingularSylvester { .. } | Error::Singular(_) => Error::Disconnected,
        other => other,
    }
}

fn check_pipeline_input(l: &DMatrix<f64>) -> Result<()> {
    if l.nrows() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 nodes, got {}",
            l.nrows()
        )));
    }
    Ok(())
}

/// Effective resistances of a connected graph.
pub fn resistance_matrix(l: &LaplacianMatrix) -> Result<ResistanceMatrix> {
    check_pipeline_input(l.matrix())?;
    if !l.is_connected() {
        return Err(Error::Disconnected);
    }
    let q = complement_basis(l.dim())?;
    let sigma = edge_gramian(&q.reduce(l.matrix()))?;
    Ok(ResistanceMatrix::from_gram(&(q.lift(&sigma) * 2.0)))
}

/// Symmetrization with the reflector-based basis.
pub fn symmetrize(l: &LaplacianMatrix) -> Result<SymmetrizationResult> {
    let q = complement_basis(l.dim().max(2))?;
    symmetrize_with_basis(l, &q)
}

/// Symmetrization with a caller-chosen basis. The result does not depend on
/// the basis beyond rounding.
pub fn symmetrize_with_basis(l: &LaplacianMatrix, q: &ComplementBasis) -> Result<SymmetrizationResult> {
    check_pipeline_input(l.matrix())?;
    let reduced = reduced_laplacian(l, q)?;
    if !l.is_connected() {
        return Err(Error::Disconnected);
    }
    let sigma = edge_gramian(&reduced)?;
    let sigma_inv = spd_inverse(&sigma).map_err(connectivity_error)?;
    let x_matrix = q.lift(&sigma) * 2.0;
    let lu = q.lift(&sigma_inv) * 0.5;
    let lu = (&lu + lu.transpose()) * 0.5;
    Ok(SymmetrizationResult {
        reduced,
        sigma,
        x_matrix,
        sym_laplacian: LaplacianMatrix::from_matrix(lu)?,
        basis: q.clone(),
    })
}

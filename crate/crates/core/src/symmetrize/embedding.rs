use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;
use crate::linalg::{pseudoinverse, sym_eig};

/// Resistance embedding: row `i` of `points` is `yᵢ = Λ^{1/2} Uᵀ eᵢ` where
/// `L̂ᵤ⁺ = U Λ Uᵀ`, so that `‖yᵢ - yⱼ‖² = r_ij`.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    /// Ascending eigenvalues of `L̂ᵤ⁺`; the first one is zero.
    pub eigenvalues: DVector<f64>,
    /// `n x n`, one point per row, coordinates in eigenvalue order.
    pub points: DMatrix<f64>,
}

impl SpectralEmbedding {
    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        (self.points.row(i) - self.points.row(j)).norm_squared()
    }

    /// Matrix of squared distances between all points.
    pub fn distance_matrix(&self) -> DMatrix<f64> {
        squared_distances(&self.points)
    }
}

fn squared_distances(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (points.row(i) - points.row(j)).norm_squared();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// Embeds the nodes of a symmetrized Laplacian.
pub fn spectral_embedding(lu: &LaplacianMatrix) -> Result<SpectralEmbedding> {
    let pinv = pseudoinverse(lu.matrix())?;
    let eig = sym_eig(&pinv)?;
    // rounding can push the zero eigenvalue slightly negative
    let eigenvalues = eig.eigenvalues.map(|l| l.max(0.0));
    let n = lu.dim();
    let points = DMatrix::from_fn(n, n, |i, k| eigenvalues[k].sqrt() * eig.eigenvectors[(i, k)]);
    Ok(SpectralEmbedding { eigenvalues, points })
}

/// Truncated resistances and the error bounds that come with them.
#[derive(Debug, Clone)]
pub struct ApproxResistance {
    /// Squared distances using only coordinates `l..n` (1-based), i.e. the
    /// first `l - 1` coordinates are zeroed.
    pub approx: DMatrix<f64>,
    /// Sum of the `l - 1` smallest eigenvalues of `L̂ᵤ⁺`, counting the zero
    /// eigenvalue.
    pub bound: f64,
    /// Sum of the `l - 1` smallest nonzero eigenvalues.
    pub bound_skip_zero: f64,
}

/// Approximates resistances from the `n - l + 1` largest coordinates.
pub fn approx_resistance(embedding: &SpectralEmbedding, l: usize) -> Result<ApproxResistance> {
    let n = embedding.dim();
    if l < 1 || l > n {
        return Err(Error::InvalidArgument(format!("truncation level {l} outside 1..={n}")));
    }
    let drop = l - 1;
    let mut points = embedding.points.clone();
    points.columns_mut(0, drop).fill(0.0);
    let ev = &embedding.eigenvalues;
    let bound = ev.iter().take(drop).sum();
    let bound_skip_zero = ev.iter().skip(1).take(drop).sum();
    Ok(ApproxResistance {
        approx: squared_distances(&points),
        bound,
        bound_skip_zero,
    })
}

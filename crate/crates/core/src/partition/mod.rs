//! Spectral bisection of digraphs through the symmetrized Laplacian, ratio
//! cuts and the bounds tying undirected cuts of `L̂ᵤ` to directed cuts of `L`.

mod brute;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::{directed_cut, symmetry_residual, LaplacianMatrix, NodePartition};
use crate::linalg::sym_eig;
use crate::symmetrize::symmetrize;

pub use brute::{brute_force_min_urc, mean_cut, MeanCutMode, MeanCutReport, BRUTE_FORCE_MAX_NODES};

/// Fiedler entries with `|f_i| <= FIEDLER_ZERO_TOL · ‖f‖∞` count as zero.
pub const FIEDLER_ZERO_TOL: f64 = 1e-9;

/// Relative gap below which two eigenvalues are treated as equal when
/// reporting the multiplicity of `λ₂`.
pub const MULTIPLICITY_TOL: f64 = 1e-8;

/// Second eigenpair of a symmetric Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiedler {
    /// Eigenvector scaled to `‖f‖ = √n`, first nonzero entry positive.
    pub vector: DVector<f64>,
    pub value: f64,
    /// Number of eigenvalues equal to `λ₂`; above one the split is not unique.
    pub multiplicity: usize,
}

/// Fiedler vector of a connected symmetric Laplacian (negative edge weights
/// allowed as long as the matrix is PSD).
pub fn fiedler_vector(lu: &LaplacianMatrix) -> Result<Fiedler> {
    let n = lu.dim();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 nodes, got {n}")));
    }
    let eig = sym_eig(lu.matrix())?;
    let ev = &eig.eigenvalues;
    let top = ev[n - 1].abs().max(f64::MIN_POSITIVE);
    let lambda2 = ev[1];
    if !(lambda2 > MULTIPLICITY_TOL * top) {
        return Err(Error::Disconnected);
    }
    let multiplicity = ev
        .iter()
        .skip(1)
        .filter(|&&l| (l - lambda2).abs() <= MULTIPLICITY_TOL * top)
        .count();
    let vector = eig.eigenvectors.column(1) * (n as f64).sqrt();
    Ok(Fiedler {
        vector,
        value: lambda2,
        multiplicity,
    })
}

/// Splits by sign: strictly negative entries form `P̄`, the rest (zeros
/// included) form `P`.
pub fn sign_partition(f: &DVector<f64>) -> Result<NodePartition> {
    let cutoff = FIEDLER_ZERO_TOL * f.amax();
    NodePartition::from_mask(f.iter().map(|&x| x >= -cutoff).collect())
}

/// Ratio-cut vector: `√(|P̄|/|P|)` on `P`, `-√(|P|/|P̄|)` on `P̄`. It is
/// orthogonal to `1` with squared norm `n`.
pub fn partition_vector_f(p: &NodePartition) -> DVector<f64> {
    let a = p.size() as f64;
    let b = p.complement_size() as f64;
    let pos = (b / a).sqrt();
    let neg = -(a / b).sqrt();
    DVector::from_iterator(p.node_count(), p.mask().iter().map(|&m| if m { pos } else { neg }))
}

fn check_dims(l: &LaplacianMatrix, p: &NodePartition) -> Result<()> {
    if l.dim() != p.node_count() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: p.node_count(),
        });
    }
    Ok(())
}

/// Undirected ratio cut `cut(P,P̄)/|P| + cut(P,P̄)/|P̄|`.
pub fn urc(lu: &LaplacianMatrix, p: &NodePartition) -> Result<f64> {
    check_dims(lu, p)?;
    let res = symmetry_residual(lu.matrix());
    if res > 1e-9 * lu.matrix().amax().max(f64::MIN_POSITIVE) {
        return Err(Error::Asymmetric(res));
    }
    let cut = directed_cut(lu, p)?;
    Ok(cut / p.size() as f64 + cut / p.complement_size() as f64)
}

/// Directed ratio cut `cut(P,P̄)/|P| + cut(P̄,P)/|P̄|`.
pub fn drc(l: &LaplacianMatrix, p: &NodePartition) -> Result<f64> {
    check_dims(l, p)?;
    let forward = directed_cut(l, p)?;
    let backward = directed_cut(l, &p.complement())?;
    Ok(forward / p.size() as f64 + backward / p.complement_size() as f64)
}

/// Total crossing weight `cut(P,P̄) + cut(P̄,P)`.
pub fn total_cut(l: &LaplacianMatrix, p: &NodePartition) -> Result<f64> {
    check_dims(l, p)?;
    Ok(directed_cut(l, p)? + directed_cut(l, &p.complement())?)
}

/// `DRC(P) ∓ (1/√|P| + 1/√|P̄|)·(cut(P,P̄) + cut(P̄,P))`, which brackets
/// `fᵀL̂ᵤf / (2n)`.
pub fn ratio_cut_bounds(l: &LaplacianMatrix, p: &NodePartition) -> Result<(f64, f64)> {
    let d = drc(l, p)?;
    let width = (1.0 / (p.size() as f64).sqrt() + 1.0 / (p.complement_size() as f64).sqrt())
        * total_cut(l, p)?;
    Ok((d - width, d + width))
}

/// `(1 + 2√|P|)·(cut(P,P̄) + cut(P̄,P))/|P|` with `P` the smaller side, an
/// upper bound on the symmetrized graph's URC.
pub fn expansion_bound(l: &LaplacianMatrix, p: &NodePartition) -> Result<f64> {
    let small = p.size().min(p.complement_size()) as f64;
    Ok((1.0 + 2.0 * small.sqrt()) * total_cut(l, p)? / small)
}

/// `fᵀMf / (2n)` for the ratio-cut vector of `p`.
pub fn quadratic_ratio_cut(m: &LaplacianMatrix, p: &NodePartition) -> Result<f64> {
    check_dims(m, p)?;
    let f = partition_vector_f(p);
    Ok(f.dot(&(m.matrix() * &f)) / (2.0 * p.node_count() as f64))
}

/// Result of [`bisect`].
#[derive(Debug, Clone)]
pub struct Bisection {
    pub partition: NodePartition,
    /// Fiedler vector of `L̂ᵤ`, `‖f‖ = √n`.
    pub fiedler: DVector<f64>,
    pub fiedler_value: f64,
    /// Multiplicity of `λ₂(L̂ᵤ)`; above one the bisection is not unique.
    pub multiplicity: usize,
    /// Ratio-cut vector of the chosen partition.
    pub f_vector: DVector<f64>,
    /// URC of the symmetrized graph.
    pub urc_value: f64,
    /// DRC of the directed graph.
    pub drc_value: f64,
    /// `fᵀL̂ᵤf / (2n)`, bracketed by `bounds`.
    pub urc_quadratic: f64,
    pub bounds: (f64, f64),
    pub expansion_bound: f64,
}

impl Bisection {
    pub fn is_unique(&self) -> bool {
        self.multiplicity == 1
    }
}

/// Spectral bisection of a connected digraph using its symmetrization.
pub fn bisect(l: &LaplacianMatrix) -> Result<Bisection> {
    let sym = symmetrize(l)?;
    let lu = &sym.sym_laplacian;
    let fiedler = fiedler_vector(lu)?;
    let partition = sign_partition(&fiedler.vector)?;
    Ok(Bisection {
        f_vector: partition_vector_f(&partition),
        urc_value: urc(lu, &partition)?,
        drc_value: drc(l, &partition)?,
        urc_quadratic: quadratic_ratio_cut(lu, &partition)?,
        bounds: ratio_cut_bounds(l, &partition)?,
        expansion_bound: expansion_bound(l, &partition)?,
        fiedler: fiedler.vector,
        fiedler_value: fiedler.value,
        multiplicity: fiedler.multiplicity,
        partition,
    })
}

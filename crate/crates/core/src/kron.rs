//! Kron reduction of the symmetrized Laplacian and its re-mapping to a
//! directed Laplacian on the kept nodes.
//!
//! The undirected Schur complement preserves effective resistances among
//! the kept nodes. The directed re-mapping `Lᵏ⁻ʳ = Hᵏ⁻ʳ(I + 2Kᵏ⁻ʳ)L̂ᵤᵏ⁻ʳ`
//! with `Hᵏ⁻ʳ = H_VV Pₘ` and `Kᵏ⁻ʳ = K_VV Pₘ` is one of many possible
//! choices, so [`validate_reduction`] measures which of the full-graph
//! properties it keeps instead of assuming them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{symmetry_residual, LaplacianMatrix};
use crate::linalg::{centering_projector, sym_eig};
use crate::report::{Check, CheckReport};
use crate::symmetrize::{decompose, resistance_matrix, symmetrize, Tolerances};

/// Schur complement `L_VV - L_VV̄ L_V̄V̄⁻¹ L_V̄V` together with the condition
/// number of the eliminated block.
#[derive(Debug, Clone)]
pub struct SchurReduction {
    pub laplacian: LaplacianMatrix,
    pub condition: f64,
}

/// Output of [`directed_kron`].
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub kept: Vec<usize>,
    /// `L̂ᵤᵏ⁻ʳ`, the Schur complement of `L̂ᵤ`.
    pub reduced_sym: LaplacianMatrix,
    pub reduced_h: DMatrix<f64>,
    pub reduced_k: DMatrix<f64>,
    /// `Lᵏ⁻ʳ = Hᵏ⁻ʳ(I + 2Kᵏ⁻ʳ)L̂ᵤᵏ⁻ʳ`.
    pub reduced_directed: LaplacianMatrix,
    /// Condition number of the eliminated block of `L̂ᵤ`.
    pub condition: f64,
    pub validation: CheckReport,
}

fn check_kept(n: usize, kept: &[usize]) -> Result<Vec<usize>> {
    let m = kept.len();
    if m < 2 || m + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "kept set must have between 2 and {} nodes, got {m}",
            n.saturating_sub(1)
        )));
    }
    let mut seen = vec![false; n];
    for &k in kept {
        if k >= n {
            return Err(Error::InvalidArgument(format!("kept node {k} out of range 0..{n}")));
        }
        if seen[k] {
            return Err(Error::InvalidArgument(format!("kept node {k} listed twice")));
        }
        seen[k] = true;
    }
    Ok((0..n).filter(|&i| !seen[i]).collect())
}

fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Kron reduction of a connected symmetric Laplacian onto `kept`, in the
/// order given.
pub fn schur_reduce(lu: &LaplacianMatrix, kept: &[usize]) -> Result<SchurReduction> {
    let n = lu.dim();
    let dropped = check_kept(n, kept)?;
    let l = lu.matrix();
    let res = symmetry_residual(l);
    if res > 1e-9 * l.amax().max(f64::MIN_POSITIVE) {
        return Err(Error::Asymmetric(res));
    }
    let l_vv = submatrix(l, kept, kept);
    let l_vd = submatrix(l, kept, &dropped);
    let l_dd = submatrix(l, &dropped, &dropped);
    let ev = sym_eig(&l_dd)?.eigenvalues;
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if !(lo > 1e-12 * hi.abs()) {
        return Err(Error::Singular(format!(
            "eliminated block is not positive definite (eigenvalues {lo:e} .. {hi:e})"
        )));
    }
    let chol = l_dd
        .cholesky()
        .ok_or_else(|| Error::Singular("eliminated block is not positive definite".into()))?;
    let reduced = &l_vv - &l_vd * chol.solve(&l_vd.transpose());
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    Ok(SchurReduction {
        laplacian: LaplacianMatrix::from_matrix(reduced)?,
        condition: hi / lo,
    })
}

/// `(H_VV Pₘ, K_VV Pₘ)`.
pub fn reduce_decomposition(h: &DMatrix<f64>, k: &DMatrix<f64>, kept: &[usize]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = h.nrows();
    for m in [h, k] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.ncols(),
            });
        }
    }
    if kept.len() < 2 || kept.iter().any(|&i| i >= n) {
        return Err(Error::InvalidArgument(format!(
            "kept set must have at least 2 nodes in 0..{n}"
        )));
    }
    let p = centering_projector(kept.len());
    Ok((submatrix(h, kept, kept) * &p, submatrix(k, kept, kept) * &p))
}

/// Reduces a connected digraph onto `kept` and maps the result back to a
/// directed Laplacian.
pub fn directed_kron(l: &LaplacianMatrix, kept: &[usize]) -> Result<ReductionResult> {
    check_kept(l.dim(), kept)?;
    let d = decompose(l)?;
    let schur = schur_reduce(&d.sym_laplacian, kept)?;
    let (reduced_h, reduced_k) = reduce_decomposition(&d.h_matrix, &d.k_matrix, kept)?;
    let m = kept.len();
    let directed = &reduced_h * (DMatrix::identity(m, m) + &reduced_k * 2.0) * schur.laplacian.matrix();
    let mut result = ReductionResult {
        kept: kept.to_vec(),
        reduced_sym: schur.laplacian,
        reduced_h,
        reduced_k,
        reduced_directed: LaplacianMatrix::from_matrix_unchecked(directed),
        condition: schur.condition,
        validation: CheckReport::default(),
    };
    result.validation = validate_reduction(&result, l);
    Ok(result)
}

/// [`validate_reduction_with_tol`] at the default cross-check tolerance.
pub fn validate_reduction(result: &ReductionResult, l: &LaplacianMatrix) -> CheckReport {
    validate_reduction_with_tol(result, l, Tolerances::default().check)
}

/// Measures which properties the reduced directed Laplacian inherits.
///
/// `zero_row_sums`, `h_idempotent`, `h_fixes_reduced`, `k_skew` and
/// `directed_resistance` (does symmetrizing `Lᵏ⁻ʳ` give back `L̂ᵤᵏ⁻ʳ`) are
/// diagnostics of the re-mapping. `restricted_resistance` compares
/// `L̂ᵤᵏ⁻ʳ` with the original resistances on the kept nodes.
pub fn validate_reduction_with_tol(result: &ReductionResult, l: &LaplacianMatrix, tol: f64) -> CheckReport {
    let mut report = CheckReport::default();
    let ld = result.reduced_directed.matrix();
    let h = &result.reduced_h;
    let k = &result.reduced_k;
    let m = ld.nrows();
    let tiny = f64::MIN_POSITIVE;

    let ones = nalgebra::DVector::from_element(m, 1.0);
    report.push(Check::new(
        "zero_row_sums",
        (ld * &ones).amax() / ld.amax().max(tiny),
        tol,
    ));
    report.push(Check::new("h_idempotent", (h * h - h).amax() / h.amax().max(tiny), tol));
    report.push(Check::new("h_fixes_reduced", (h * ld - ld).amax() / ld.amax().max(tiny), tol));
    report.push(Check::new("k_skew", (k + k.transpose()).amax() / k.amax().max(1.0), tol));

    let sym = &result.reduced_sym;
    let directed = LaplacianMatrix::from_matrix(ld.clone())
        .and_then(|lk| symmetrize(&lk))
        .map(|s| (s.sym_laplacian.matrix() - sym.matrix()).amax() / sym.matrix().amax().max(tiny))
        .unwrap_or(f64::INFINITY);
    report.push(Check::new("directed_resistance", directed, tol));

    let restricted = match (resistance_matrix(l), resistance_matrix(sym)) {
        (Ok(full), Ok(reduced)) => {
            let mut worst: f64 = 0.0;
            for (a, &i) in result.kept.iter().enumerate() {
                for (b, &j) in result.kept.iter().enumerate().skip(a + 1) {
                    let r = full.get(i, j);
                    worst = worst.max((reduced.get(a, b) - r).abs() / r.abs().max(tiny));
                }
            }
            worst
        }
        _ => f64::INFINITY,
    };
    report.push(Check::new("restricted_resistance", restricted, tol));
    report
}

/// Keeps the nodes where the eigenvector of the largest eigenvalue of `lu`
/// is nonnegative (sign fixed by the eigensolver), a generalization of
/// keeping every other node. Falls back to the negative side when the
/// nonnegative side has fewer than two nodes.
pub fn select_kept_by_top_eigenvector(lu: &LaplacianMatrix) -> Result<Vec<usize>> {
    let n = lu.dim();
    let eig = sym_eig(lu.matrix())?;
    let v = eig.eigenvectors.column(n - 1);
    let cutoff = crate::partition::FIEDLER_ZERO_TOL * v.amax();
    let positive: Vec<usize> = (0..n).filter(|&i| v[i] >= -cutoff).collect();
    let kept = if positive.len() >= 2 {
        positive
    } else {
        (0..n).filter(|&i| v[i] < -cutoff).collect()
    };
    check_kept(n, &kept)?;
    Ok(kept)
}

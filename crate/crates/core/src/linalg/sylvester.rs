//! Bartels-Stewart Sylvester solver over real Schur forms, plus a
//! Kronecker-vectorized Lyapunov solver used as an independent reference.

use nalgebra::DMatrix;

use super::schur::real_schur;
use crate::error::{Error, Result};

/// Largest dimension accepted by [`lyapunov_reference`] (its system is k²).
pub const LYAPUNOV_REFERENCE_MAX_DIM: usize = 200;

/// Solves `A X + X B = C` for square `A`, `B` of size `k`.
///
/// Both `A` and `B` are reduced to real Schur form, the transformed equation
/// `Ta Y + Y Tb = Uᵀ C V` is solved by block back-substitution over the 1x1
/// and 2x2 diagonal blocks, and `X = U Y Vᵀ`. Fails when an eigenvalue of `A`
/// (numerically) coincides with an eigenvalue of `-B`.
pub fn sylvester_solve(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = a.nrows();
    for m in [a, b, c] {
        if m.nrows() != k || m.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: if m.nrows() != k { m.nrows() } else { m.ncols() },
            });
        }
    }
    if k == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }

    let sa = real_schur(a)?;
    let sb = real_schur(b)?;
    let (ta, tb) = (&sa.t, &sb.t);
    let f = sa.q.transpose() * c * &sb.q;

    let row_blocks = sa.blocks();
    let col_blocks = sb.blocks();
    let scale = ta.amax() + tb.amax();
    let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    let mut y = DMatrix::<f64>::zeros(k, k);
    for (jb, &(j0, q)) in col_blocks.iter().enumerate() {
        // Right-hand side for block column J, minus contributions of solved
        // columns to its left.
        let mut rhs = f.columns(j0, q).clone_owned();
        if j0 > 0 {
            rhs -= y.columns(0, j0) * tb.view((0, j0), (j0, q));
        }
        for (ib, &(i0, p)) in row_blocks.iter().enumerate().rev() {
            let mut g = rhs.rows(i0, p).clone_owned();
            let below = i0 + p;
            if below < k {
                g -= ta.view((i0, below), (p, k - below)) * y.view((below, j0), (k - below, q));
            }
            let block = solve_small(
                &ta.view((i0, i0), (p, p)).clone_owned(),
                &tb.view((j0, j0), (q, q)).clone_owned(),
                &g,
                tiny,
            )
            .map_err(|denominator| Error::SingularSylvester {
                denominator,
                row: ib,
                col: jb,
            })?;
            y.view_mut((i0, j0), (p, q)).copy_from(&block);
        }
    }
    Ok(&sa.q * y * sb.q.transpose())
}

/// Solves `A Y + Y B = G` for `A` p x p and `B` q x q with p, q <= 2 via the
/// Kronecker system `(I ⊗ A + Bᵀ ⊗ I) vec(Y) = vec(G)` and Gaussian
/// elimination with partial pivoting. Returns the offending pivot on
/// singularity.
fn solve_small(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    g: &DMatrix<f64>,
    tiny: f64,
) -> std::result::Result<DMatrix<f64>, f64> {
    let (p, q) = (a.nrows(), b.nrows());
    let dim = p * q;
    let mut m = [[0.0f64; 5]; 4];
    for jj in 0..q {
        for ii in 0..p {
            let row = ii + p * jj;
            for kk in 0..p {
                m[row][kk + p * jj] += a[(ii, kk)];
            }
            for ll in 0..q {
                m[row][ii + p * ll] += b[(ll, jj)];
            }
            m[row][4] = g[(ii, jj)];
        }
    }
    for col in 0..dim {
        let piv = (col..dim)
            .max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))
            .unwrap();
        if m[piv][col].abs() <= tiny {
            return Err(m[piv][col]);
        }
        m.swap(col, piv);
        for r in col + 1..dim {
            let factor = m[r][col] / m[col][col];
            for c in col..dim {
                m[r][c] -= factor * m[col][c];
            }
            m[r][4] -= factor * m[col][4];
        }
    }
    let mut x = [0.0f64; 4];
    for r in (0..dim).rev() {
        let s: f64 = (r + 1..dim).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][4] - s) / m[r][r];
    }
    Ok(DMatrix::from_column_slice(p, q, &x[..dim]))
}

/// Reference solver for `A X + X Aᵀ = C`: a direct LU solve of the
/// `k² x k²` system `(I ⊗ A + A ⊗ I) vec(X) = vec(C)`.
///
/// The result is symmetrized when `C` is symmetric.
pub fn lyapunov_reference(a: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = a.nrows();
    if a.ncols() != k || c.nrows() != k || c.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: if a.ncols() != k { a.ncols() } else { c.nrows().max(c.ncols()) },
        });
    }
    if k > LYAPUNOV_REFERENCE_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "reference Lyapunov solver limited to k <= {LYAPUNOV_REFERENCE_MAX_DIM}, got {k}"
        )));
    }
    let kk = k * k;
    let idx = |i: usize, j: usize| i + k * j;
    let mut m = DMatrix::<f64>::zeros(kk, kk);
    for j in 0..k {
        for i in 0..k {
            for p in 0..k {
                // (I ⊗ A): A[i,p] couples X[p,j] into row (i,j)
                m[(idx(i, j), idx(p, j))] += a[(i, p)];
                // (A ⊗ I): A[j,p] couples X[i,p] into row (i,j)
                m[(idx(i, j), idx(i, p))] += a[(j, p)];
            }
        }
    }
    let rhs = nalgebra::DVector::from_column_slice(c.as_slice());
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Lyapunov operator is singular".into()))?;
    let x = DMatrix::from_column_slice(k, k, sol.as_slice());
    if crate::graph::symmetry_residual(c) == 0.0 {
        Ok((&x + x.transpose()) * 0.5)
    } else {
        Ok(x)
    }
}

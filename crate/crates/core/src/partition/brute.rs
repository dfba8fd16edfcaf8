use std::cmp::Ordering;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{symmetry_residual, LaplacianMatrix, NodePartition};
use crate::symmetrize::symmetrize;

/// Largest graph accepted by the exhaustive routines.
pub const BRUTE_FORCE_MAX_NODES: usize = 20;

const CHUNK_BITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanCutMode {
    Brute,
    Closed,
}

/// Mean of `cut(P, P̄)` over all `2ⁿ - 2` ordered bipartitions, for `L` and
/// for its symmetrization. The two means coincide.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanCutReport {
    pub mode: MeanCutMode,
    /// Number of bipartitions, `2ⁿ - 2`.
    pub k: f64,
    pub mean_directed: f64,
    pub mean_symmetrized: f64,
    /// `2ⁿ⁻² / (2ⁿ - 2) · tr(L)`.
    pub closed_form: f64,
}

impl MeanCutReport {
    pub fn agree(&self, tol: f64) -> bool {
        (self.mean_directed - self.mean_symmetrized).abs() <= tol * self.mean_directed.abs().max(1.0)
    }
}

/// Each off-diagonal weight `w_ij` is cut by the `2ⁿ⁻²` subsets that hold
/// `i` but not `j`, hence the coefficient `2ⁿ⁻² / (2ⁿ - 2)` on the total
/// weight `tr(L)`.
fn mean_cut_coefficient(n: usize) -> f64 {
    // 2ⁿ⁻² / (2ⁿ - 2) = 1 / (4 - 2³⁻ⁿ)
    1.0 / (4.0 - 2f64.powi(3 - n as i32))
}

fn check_brute_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 nodes, got {n}")));
    }
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::InvalidArgument(format!(
            "exhaustive enumeration supports at most {BRUTE_FORCE_MAX_NODES} nodes, got {n}"
        )));
    }
    Ok(())
}

/// `Σ_{i,j ∈ P} m_ij`, which is `cut(P, P̄)` for a Laplacian.
fn cut_of_mask(m: &DMatrix<f64>, mask: u64) -> f64 {
    let n = m.nrows();
    let mut total = 0.0;
    for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
        for j in (0..n).filter(|&j| mask >> j & 1 == 1) {
            total += m[(i, j)];
        }
    }
    total
}

/// Runs `f` on fixed chunks of the masks `1..2ⁿ-1` in parallel and returns
/// the chunk results in mask order, so reductions over them are
/// deterministic.
fn map_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync,
{
    let end = (1u64 << n) - 1;
    let chunk = 1u64 << CHUNK_BITS;
    let chunks = end.div_ceil(chunk);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = (c * chunk).max(1);
            let hi = ((c + 1) * chunk).min(end);
            f(lo..hi)
        })
        .collect()
}

pub fn mean_cut(l: &LaplacianMatrix, mode: MeanCutMode) -> Result<MeanCutReport> {
    let n = l.dim();
    let coefficient = mean_cut_coefficient(n.max(2));
    let lu = symmetrize(l)?.sym_laplacian;
    let closed_form = coefficient * l.trace();
    let k = 2f64.powi(n as i32) - 2.0;
    let (mean_directed, mean_symmetrized) = match mode {
        MeanCutMode::Closed => (closed_form, coefficient * lu.trace()),
        MeanCutMode::Brute => {
            check_brute_size(n)?;
            let a = l.matrix();
            let b = lu.matrix();
            let sums = map_chunks(n, |masks| {
                masks.fold((0.0, 0.0), |(x, y), m| (x + cut_of_mask(a, m), y + cut_of_mask(b, m)))
            });
            let (x, y) = sums.iter().fold((0.0, 0.0), |(x, y), &(u, v)| (x + u, y + v));
            (x / k, y / k)
        }
    };
    Ok(MeanCutReport {
        mode,
        k,
        mean_directed,
        mean_symmetrized,
        closed_form,
    })
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    mask: u64,
    value: f64,
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Orders by value, treating values within `1e-12` relative as tied, then
/// by the member list.
fn compare(a: &Candidate, b: &Candidate, n: usize) -> Ordering {
    let scale = a.value.abs().max(b.value.abs()).max(f64::MIN_POSITIVE);
    if (a.value - b.value).abs() > 1e-12 * scale {
        return a.value.total_cmp(&b.value);
    }
    members(a.mask, n).cmp(&members(b.mask, n))
}

fn better(best: Option<Candidate>, c: Candidate, n: usize) -> Option<Candidate> {
    match best {
        Some(b) if compare(&b, &c, n) != Ordering::Greater => Some(b),
        _ => Some(c),
    }
}

/// Exhaustive minimum of the undirected ratio cut.
///
/// Each bipartition is represented by its larger side, or by the side that
/// holds node 0 when both sides have equal size. Among minimizers the
/// lexicographically smallest representative wins. With `equal_sized_only`
/// only splits with `||P| - |P̄|| <= 1` are considered.
pub fn brute_force_min_urc(lu: &LaplacianMatrix, equal_sized_only: bool) -> Result<(NodePartition, f64)> {
    let n = lu.dim();
    check_brute_size(n)?;
    let m = lu.matrix();
    let res = symmetry_residual(m);
    if res > 1e-9 * m.amax().max(f64::MIN_POSITIVE) {
        return Err(Error::Asymmetric(res));
    }
    let partials = map_chunks(n, |masks| {
        let mut best = None;
        for mask in masks {
            let size = mask.count_ones() as usize;
            let rest = n - size;
            let canonical = size > rest || (size == rest && mask & 1 == 1);
            if !canonical || (equal_sized_only && size - rest > 1) {
                continue;
            }
            let cut = cut_of_mask(m, mask);
            let value = cut / size as f64 + cut / rest as f64;
            best = better(best, Candidate { mask, value }, n);
        }
        best
    });
    let best = partials
        .into_iter()
        .flatten()
        .fold(None, |acc, c| better(acc, c, n))
        .ok_or_else(|| Error::InvalidArgument("no admissible bipartition".into()))?;
    Ok((NodePartition::from_bits(n, best.mask)?, best.value))
}

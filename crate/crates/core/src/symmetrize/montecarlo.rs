use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;
use crate::linalg::{complement_basis, eigvals_general};

/// Fraction of each chain's horizon discarded before averaging.
pub const MC_BURN_IN_FRACTION: f64 = 0.1;

/// Estimates `Σ` as the stationary covariance of `dz = -L̄z dt + dW`.
///
/// Runs `samples` independent Euler-Maruyama chains from `z = 0` over
/// `horizon` time units and averages `zzᵀ` over the tail of every chain.
/// Chain `c` draws from ChaCha8 seeded with `seed` on stream `c`, and the
/// per-chain sums are combined in chain order, so the estimate is
/// bit-identical for a fixed seed whatever the thread count.
pub fn mc_covariance_oracle(
    l: &LaplacianMatrix,
    horizon: f64,
    dt: f64,
    samples: usize,
    seed: u64,
) -> Result<DMatrix<f64>> {
    let n = l.dim();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 nodes, got {n}")));
    }
    if !(dt > 0.0) || !(horizon > dt) || samples == 0 {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0, horizon > dt and samples > 0 (dt = {dt}, horizon = {horizon}, samples = {samples})"
        )));
    }
    if !l.is_connected() {
        return Err(Error::Disconnected);
    }
    let q = complement_basis(n)?;
    let lbar = q.reduce(l.matrix());
    let max_re = eigvals_general(&lbar)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if dt * max_re >= 0.5 {
        return Err(Error::UnstableStep(dt * max_re));
    }

    let steps = (horizon / dt).round() as usize;
    let burn = (steps as f64 * MC_BURN_IN_FRACTION).round() as usize;
    let kept = steps - burn;
    let k = n - 1;
    // z ← (I - dt L̄) z + √dt ξ
    let step = DMatrix::<f64>::identity(k, k) - &lbar * dt;
    let sqrt_dt = dt.sqrt();

    let sums: Vec<DMatrix<f64>> = (0..samples)
        .into_par_iter()
        .map(|chain| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chain as u64);
            let mut z = DVector::<f64>::zeros(k);
            let mut next = DVector::<f64>::zeros(k);
            let mut acc = DMatrix::<f64>::zeros(k, k);
            for t in 0..steps {
                next.gemv(1.0, &step, &z, 0.0);
                for v in next.iter_mut() {
                    let xi: f64 = rng.sample(StandardNormal);
                    *v += sqrt_dt * xi;
                }
                std::mem::swap(&mut z, &mut next);
                if t >= burn {
                    acc.ger(1.0, &z, &z, 1.0);
                }
            }
            acc
        })
        .collect();

    let mut total = DMatrix::<f64>::zeros(k, k);
    for s in &sums {
        total += s;
    }
    total /= (samples * kept) as f64;
    Ok((&total + total.transpose()) * 0.5)
}

use serde::Serialize;

use super::{decompose_with, lyapunov_residual, resistance_matrix, SymmetrizationResult};
use crate::graph::LaplacianMatrix;
use crate::linalg::{eigvals_general, sym_eig};
use crate::report::{Check, CheckReport};

/// Raw spectra recorded next to the eigenvalue-bound check, since complex
/// eigenvalues of `L` admit no canonical ordering.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Spectra {
    /// Eigenvalues of `L` as `[re, im]`, sorted by real then imaginary part.
    pub laplacian: Vec<[f64; 2]>,
    /// Ascending eigenvalues of `L̂ᵤ`.
    pub sym_laplacian: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SymmetrizationReport {
    #[serde(flatten)]
    pub report: CheckReport,
    pub spectra: Spectra,
}

impl SymmetrizationReport {
    pub fn all_passed(&self) -> bool {
        self.report.all_passed()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.report.get(name)
    }
}

/// Re-checks a symmetrization of `l` against independent computations.
///
/// Every check passes only when its residual is strictly below `tol`.
/// Failures of the underlying computations become infinite residuals.
pub fn verify_symmetrization(l: &LaplacianMatrix, result: &SymmetrizationResult, tol: f64) -> SymmetrizationReport {
    let mut report = CheckReport::default();
    let mut spectra = Spectra::default();
    let lu = &result.sym_laplacian;
    let n = l.dim();

    let lyap = if result.basis.dim() == n && result.sigma.nrows() + 1 == n {
        lyapunov_residual(&result.basis.reduce(l.matrix()), &result.sigma)
    } else {
        f64::INFINITY
    };
    report.push(Check::new("lyapunov_residual", lyap, tol));

    let resist = match (resistance_matrix(l), resistance_matrix(lu)) {
        (Ok(a), Ok(b)) => a.max_relative_difference(&b),
        _ => f64::INFINITY,
    };
    report.push(Check::new("resistance_equality", resist, tol));

    let tr = l.trace();
    let trace = (tr - lu.trace()).abs() / tr.abs().max(f64::MIN_POSITIVE);
    report.push(Check::new("trace_equality", trace, tol));

    let sym_spectrum = sym_eig(lu.matrix()).ok().map(|e| e.eigenvalues);
    let psd = match &sym_spectrum {
        Some(ev) if ev.len() >= 2 => {
            let top = ev[ev.len() - 1].abs().max(f64::MIN_POSITIVE);
            let residual = ev[0].abs().max(-ev[1]).max(0.0) / top;
            let mut check = Check::new("psd", residual, tol);
            // exactly one zero eigenvalue
            check.passed &= ev[1] > tol * top;
            check
        }
        _ => Check::new("psd", f64::INFINITY, tol),
    };
    report.push(psd);

    let recon = decompose_with(l, result)
        .map(|d| d.residuals(l).reconstruction)
        .unwrap_or(f64::INFINITY);
    report.push(Check::new("decomposition_reconstruction", recon, tol));

    let mut bounds = f64::INFINITY;
    if let (Some(ev), Ok(mut mu)) = (&sym_spectrum, eigvals_general(l.matrix())) {
        mu.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        spectra.laplacian = mu.iter().map(|z| [z.re, z.im]).collect();
        spectra.sym_laplacian = ev.iter().copied().collect();
        if ev.len() >= 2 && mu.len() == ev.len() {
            // drop the eigenvalue closest to zero
            let zero = (0..mu.len())
                .min_by(|&a, &b| mu[a].norm().total_cmp(&mu[b].norm()))
                .unwrap_or(0);
            let lo = ev[1];
            let hi = ev[ev.len() - 1];
            let excess = mu
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != zero)
                .map(|(_, z)| (lo - z.re).max(z.re - hi))
                .fold(0.0, f64::max);
            bounds = excess / hi.abs().max(f64::MIN_POSITIVE);
        }
    }
    report.push(Check::new("eigenvalue_bounds", bounds, tol));

    SymmetrizationReport { report, spectra }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, laplacian, random_connected_digraph};
    use crate::symmetrize::symmetrize;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const NAMES: [&str; 6] = [
        "lyapunov_residual",
        "resistance_equality",
        "trace_equality",
        "psd",
        "decomposition_reconstruction",
        "eigenvalue_bounds",
    ];

    #[test]
    fn valid_output_passes_every_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [2, 3, 8, 20] {
            let l = laplacian(&random_connected_digraph(n, 0.3, &mut rng).unwrap());
            let res = symmetrize(&l).unwrap();
            let report = verify_symmetrization(&l, &res, 1e-8);
            assert!(report.all_passed(), "n = {n}: {report:?}");
            for name in NAMES {
                assert!(report.get(name).is_some(), "{name}");
            }
            assert_eq!(report.spectra.laplacian.len(), n);
            assert_eq!(report.spectra.sym_laplacian.len(), n);
        }
    }

    #[test]
    fn perturbed_laplacian_fails_resistance_check() {
        let l = laplacian(&cycle_graph(5, true).unwrap());
        let mut res = symmetrize(&l).unwrap();
        let mut m = res.sym_laplacian.matrix().clone();
        m[(0, 2)] += 1e-3;
        res.sym_laplacian = LaplacianMatrix::from_matrix_unchecked(m);
        let report = verify_symmetrization(&l, &res, 1e-8);
        assert!(!report.get("resistance_equality").unwrap().passed);
        assert!(report.get("lyapunov_residual").unwrap().passed);
        assert!(!report.all_passed());
    }

    #[test]
    fn zero_tolerance_fails_everything() {
        let l = laplacian(&cycle_graph(4, true).unwrap());
        let res = symmetrize(&l).unwrap();
        let report = verify_symmetrization(&l, &res, 0.0);
        for c in &report.report.checks {
            assert!(!c.passed, "{}", c.name);
        }
    }
}

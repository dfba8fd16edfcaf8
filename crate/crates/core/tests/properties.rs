//! Randomized invariants of the symmetrization pipeline.

use effres::graph::{
    directed_cut, laplacian, random_connected_digraph, random_connected_undirected, LaplacianMatrix,
    NodePartition,
};
use effres::kron::{directed_kron, schur_reduce};
use effres::linalg::{centering_projector, eigvals_general, sym_eig, ComplementBasis};
use effres::partition::{bisect, drc, mean_cut, partition_vector_f, quadratic_ratio_cut, ratio_cut_bounds, urc, MeanCutMode};
use effres::symmetrize::{decompose, resistance_matrix, symmetrize, symmetrize_with_basis};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn digraph(n: usize, p: f64, seed: u64) -> LaplacianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    laplacian(&random_connected_digraph(n, p, &mut rng).unwrap())
}

fn undirected(n: usize, p: f64, seed: u64) -> LaplacianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    laplacian(&random_connected_undirected(n, p, &mut rng).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn resistance_is_preserved(n in 2usize..=40, p in 0.05f64..0.5, seed in any::<u64>()) {
        let l = digraph(n, p, seed);
        let sym = symmetrize(&l).unwrap();
        let a = resistance_matrix(&l).unwrap();
        let b = resistance_matrix(&sym.sym_laplacian).unwrap();
        prop_assert!(a.max_relative_difference(&b) <= 1e-8);
    }

    #[test]
    fn basis_choice_is_irrelevant(n in 2usize..=25, p in 0.05f64..0.5, seed in any::<u64>()) {
        let l = digraph(n, p, seed);
        let a = symmetrize(&l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let q = ComplementBasis::random(n, &mut rng).unwrap();
        let b = symmetrize_with_basis(&l, &q).unwrap();
        let scale = a.sym_laplacian.matrix().amax();
        prop_assert!((a.sym_laplacian.matrix() - b.sym_laplacian.matrix()).amax() <= 1e-9 * scale.max(1.0));
        prop_assert!(a.resistance_matrix().max_relative_difference(&b.resistance_matrix()) <= 1e-9);
    }

    #[test]
    fn undirected_graphs_are_fixed_points(n in 2usize..=30, p in 0.05f64..0.6, seed in any::<u64>()) {
        let l = undirected(n, p, seed);
        let sym = symmetrize(&l).unwrap();
        prop_assert!((sym.sym_laplacian.matrix() - l.matrix()).amax() <= 1e-8);
    }

    #[test]
    fn square_root_resistance_is_a_metric(n in 3usize..=20, p in 0.05f64..0.5, seed in any::<u64>()) {
        let r = resistance_matrix(&digraph(n, p, seed)).unwrap();
        prop_assert!(r.min_triangle_slack() >= -1e-10);
        for i in 0..n {
            prop_assert_eq!(r.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(r.get(i, j), r.get(j, i));
                if i != j {
                    prop_assert!(r.get(i, j) > 0.0);
                }
            }
        }
    }

    #[test]
    fn decomposition_identities(n in 2usize..=30, p in 0.05f64..0.5, seed in any::<u64>()) {
        let l = digraph(n, p, seed);
        let d = decompose(&l).unwrap();
        let r = d.residuals(&l);
        prop_assert!(r.max() <= 1e-8, "{:?}", r);
        prop_assert!((&d.h_matrix * centering_projector(n) - &d.h_matrix).amax() <= 1e-9);
    }

    #[test]
    fn trace_and_spectrum(n in 2usize..=30, p in 0.05f64..0.5, seed in any::<u64>()) {
        let l = digraph(n, p, seed);
        let lu = symmetrize(&l).unwrap().sym_laplacian;
        prop_assert!((l.trace() - lu.trace()).abs() <= 1e-9 * l.trace());
        let ev = sym_eig(lu.matrix()).unwrap().eigenvalues;
        let mut mu = eigvals_general(l.matrix()).unwrap();
        mu.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        for z in &mu[1..] {
            prop_assert!(ev[1] <= z.re + 1e-9 * ev[n - 1], "{} < {}", z.re, ev[1]);
            prop_assert!(z.re <= ev[n - 1] + 1e-9 * ev[n - 1]);
        }
    }

    #[test]
    fn ratio_cut_identities_and_bracket(n in 2usize..=8, p in 0.1f64..0.6, seed in any::<u64>()) {
        let l = digraph(n, p, seed);
        let lu = symmetrize(&l).unwrap().sym_laplacian;
        let u = undirected(n, p, seed);
        for bits in 1..(1u64 << n) - 1 {
            let part = NodePartition::from_bits(n, bits).unwrap();
            let f = partition_vector_f(&part);
            let nf = n as f64;
            let d = drc(&l, &part).unwrap();
            prop_assert!((f.dot(&(l.matrix() * &f)) - nf * d).abs() <= 1e-10 * (nf * d).max(1.0));
            let c = urc(&u, &part).unwrap();
            prop_assert!((f.dot(&(u.matrix() * &f)) - nf * c).abs() <= 1e-10 * (nf * c).max(1.0));
            let (lo, hi) = ratio_cut_bounds(&l, &part).unwrap();
            let q = quadratic_ratio_cut(&lu, &part).unwrap();
            prop_assert!(lo - 1e-10 <= q && q <= hi + 1e-10);
        }
    }

    #[test]
    fn sampled_bracket_on_larger_graphs(n in 9usize..=40, p in 0.05f64..0.4, seed in any::<u64>()) {
        let l = digraph(n, p, seed);
        let lu = symmetrize(&l).unwrap().sym_laplacian;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let mut nodes: Vec<usize> = (0..n).collect();
        for size in [1, n / 3, n / 2, n - 1] {
            nodes.shuffle(&mut rng);
            let part = NodePartition::new(n, &nodes[..size]).unwrap();
            let (lo, hi) = ratio_cut_bounds(&l, &part).unwrap();
            let q = quadratic_ratio_cut(&lu, &part).unwrap();
            prop_assert!(lo - 1e-10 <= q && q <= hi + 1e-10);
        }
    }

    #[test]
    fn mean_cuts_agree(n in 2usize..=10, p in 0.1f64..0.6, seed in any::<u64>()) {
        let r = mean_cut(&digraph(n, p, seed), MeanCutMode::Brute).unwrap();
        prop_assert!((r.mean_directed - r.mean_symmetrized).abs() <= 1e-9 * r.mean_directed.max(1.0));
        prop_assert!((r.closed_form - r.mean_directed).abs() <= 1e-9 * r.mean_directed.max(1.0));
    }

    #[test]
    fn bisection_is_label_free(n in 3usize..=20, p in 0.1f64..0.5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected_digraph(n, p, &mut rng).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let a = bisect(&laplacian(&g)).unwrap();
        // a degenerate λ₂ makes the split basis dependent
        prop_assume!(a.is_unique());
        let fmin = a.fiedler.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(fmin > 1e-6);
        let b = bisect(&laplacian(&g.permuted(&perm).unwrap())).unwrap();
        let same = (0..n).all(|i| a.partition.contains(i) == b.partition.contains(perm[i]));
        let swapped = (0..n).all(|i| a.partition.contains(i) != b.partition.contains(perm[i]));
        prop_assert!(same || swapped);
    }

    #[test]
    fn kron_preserves_restricted_resistance(n in 3usize..=12, p in 0.1f64..0.6, seed in any::<u64>(), pick in any::<u64>()) {
        let l = undirected(n, p, seed);
        let r = resistance_matrix(&l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.shuffle(&mut rng);
        let m = 2 + (pick as usize) % (n - 2);
        let kept = &nodes[..m];
        let red = schur_reduce(&l, kept).unwrap();
        let rr = resistance_matrix(&red.laplacian).unwrap();
        for a in 0..m {
            for b in 0..m {
                let full = r.get(kept[a], kept[b]);
                prop_assert!((rr.get(a, b) - full).abs() <= 1e-9 * full.max(1.0));
            }
        }
    }

    #[test]
    fn kron_quotient_property(n in 4usize..=12, p in 0.1f64..0.6, seed in any::<u64>()) {
        let l = symmetrize(&digraph(n, p, seed)).unwrap().sym_laplacian;
        let s1: Vec<usize> = (0..n - 1).collect();
        let s2: Vec<usize> = (0..n - 2).collect();
        let once = schur_reduce(&l, &s1).unwrap();
        let positions: Vec<usize> = s2.iter().map(|v| s1.iter().position(|x| x == v).unwrap()).collect();
        let twice = schur_reduce(&once.laplacian, &positions).unwrap();
        let direct = schur_reduce(&l, &s2).unwrap();
        let scale = direct.laplacian.matrix().amax().max(1.0);
        prop_assert!((twice.laplacian.matrix() - direct.laplacian.matrix()).amax() <= 1e-9 * scale);
    }

    #[test]
    fn directed_kron_rows_sum_to_zero(n in 3usize..=12, p in 0.1f64..0.5, seed in any::<u64>()) {
        let l = digraph(n, p, seed);
        let kept: Vec<usize> = (0..n).step_by(2).collect();
        prop_assume!(kept.len() >= 2 && kept.len() < n);
        let res = directed_kron(&l, &kept).unwrap();
        let m = kept.len();
        let ones = nalgebra::DVector::from_element(m, 1.0);
        let scale = res.reduced_directed.matrix().amax().max(1.0);
        prop_assert!((res.reduced_directed.matrix() * ones).amax() <= 1e-9 * scale);
        prop_assert!(res.validation.get("restricted_resistance").unwrap().passed);
        // if the directed graph symmetrizes back, it carries the restricted resistances
        if res.validation.get("directed_resistance").unwrap().passed {
            let rd = resistance_matrix(&res.reduced_directed).unwrap();
            let r = resistance_matrix(&l).unwrap();
            for a in 0..m {
                for b in (a + 1)..m {
                    let full = r.get(kept[a], kept[b]);
                    prop_assert!((rd.get(a, b) - full).abs() <= 1e-8 * full);
                }
            }
        }
    }

    #[test]
    fn directed_cut_is_edge_sum(n in 2usize..=10, p in 0.1f64..0.6, seed in any::<u64>(), bits in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected_digraph(n, p, &mut rng).unwrap();
        let mask = bits % ((1u64 << n) - 2) + 1;
        let part = NodePartition::from_bits(n, mask).unwrap();
        let by_edges = g.cut_weight(&part);
        let by_matrix = directed_cut(&laplacian(&g), &part).unwrap();
        prop_assert!((by_edges - by_matrix).abs() <= 1e-12 * by_edges.max(1.0));
    }
}

#[test]
fn lifted_identity_matches_projector() {
    // QᵀQ = Pₙ for random bases, used implicitly by every lift
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 2..15 {
        let q = ComplementBasis::random(n, &mut rng).unwrap();
        let lifted = q.lift(&DMatrix::identity(n - 1, n - 1));
        assert!((lifted - centering_projector(n)).amax() < 1e-12);
    }
}

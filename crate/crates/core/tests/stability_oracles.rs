mod common;

use common::*;
use nalgebra::DMatrix;
use oim_core::enumeration::{index_to_config, ConfigIndex};
use oim_core::model::generate_random_graph;
use oim_core::stability::{
    base_spectrum, jacobian, jacobian_binarized, stability_sweep, symmetric_eigenvalues, ConfigSelection,
    JacobianMatrix, LandscapeSpectrum,
};
use oim_core::{OimParams, PhaseState};
use proptest::prelude::*;

fn reference_eigenvalues(j: &JacobianMatrix) -> Vec<f64> {
    let m = DMatrix::from_row_slice(j.n(), j.n(), j.as_slice());
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

fn graph_spins_params(max_n: usize) -> impl Strategy<Value = (oim_core::Graph, Vec<bool>, OimParams)> {
    weighted_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(any::<bool>(), n), 0.1f64..3.0, 0.0f64..2.0)
            .prop_map(|(g, b, k, ks)| (g, b, OimParams::new(k, ks, 0.0).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn jacobi_matches_reference_solver((g, bits, p) in graph_spins_params(12)) {
        let j = jacobian_binarized(&coupling(&g), &p, &spins_of(&bits)).unwrap();
        let got = symmetric_eigenvalues(&j).unwrap();
        let want = reference_eigenvalues(&j);
        let tol = 1e-9 * j.frobenius_norm().max(1.0);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn general_jacobian_matches_reference_solver(g in weighted_graph(8), th in proptest::collection::vec(0.0f64..6.3, 8)) {
        let p = OimParams::new(1.0, 0.7, 0.0).unwrap();
        let th = PhaseState(th[..g.n()].to_vec());
        let j = jacobian(&coupling(&g), &p, &th).unwrap();
        let got = symmetric_eigenvalues(&j).unwrap();
        let want = reference_eigenvalues(&j);
        let tol = 1e-9 * j.frobenius_norm().max(1.0);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= tol);
        }
        prop_assert!((j.trace() - got.iter().sum::<f64>()).abs() <= 1e-9 * g.n() as f64 * j.frobenius_norm().max(1.0));
    }

    #[test]
    fn spectrum_shifts_with_parameters((g, bits, p) in graph_spins_params(10)) {
        let w = coupling(&g);
        let s = spins_of(&bits);
        let base = base_spectrum(&w, &s).unwrap();
        let direct = symmetric_eigenvalues(&jacobian_binarized(&w, &p, &s).unwrap()).unwrap();
        for (a, b) in direct.iter().zip(base.shifted(p.k, p.ks)) {
            prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        prop_assert!(base.beta.iter().any(|b| b.abs() <= 1e-9), "{:?}", base.beta);
    }

    #[test]
    fn all_ones_is_an_eigenvector((g, bits, p) in graph_spins_params(12)) {
        let j = jacobian_binarized(&coupling(&g), &p, &spins_of(&bits)).unwrap();
        for i in 0..g.n() {
            prop_assert!((j.row(i).iter().sum::<f64>() + 2.0 * p.ks).abs() <= 1e-12);
        }
    }

    #[test]
    fn mirror_invariance((g, bits, _p) in graph_spins_params(10)) {
        let w = coupling(&g);
        let s = spins_of(&bits);
        prop_assert_eq!(base_spectrum(&w, &s).unwrap(), base_spectrum(&w, &s.negated()).unwrap());
    }

    #[test]
    fn jacobian_is_half_negative_hessian(g in weighted_graph(6), th in proptest::collection::vec(0.0f64..6.3, 6), ks in 0.0f64..2.0) {
        let p = OimParams::new(1.0, ks, 0.0).unwrap();
        let w = coupling(&g);
        let th = PhaseState(th[..g.n()].to_vec());
        let j = jacobian(&w, &p, &th).unwrap();
        let hess = fd_hessian(&w, &p, &th, 1e-4);
        for (a, h) in j.as_slice().iter().zip(&hess) {
            prop_assert!(rel_close(*a, -0.5 * h, 1e-5), "{a} vs {}", -0.5 * h);
        }
        for i in 0..g.n() {
            for k in 0..i {
                prop_assert!((j.get(i, k) - j.get(k, i)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn landscape_top_eigenvalue_matches_reference() {
    for seed in 0..4 {
        let g = generate_random_graph(9, 18, seed).unwrap();
        let w = coupling(&g);
        let land = LandscapeSpectrum::compute(&w).unwrap();
        for idx in 0..land.len() as u64 {
            let s = index_to_config(ConfigIndex(idx), 9).unwrap();
            let j = jacobian_binarized(&w, &OimParams::new(1.0, 0.0, 0.0).unwrap(), &s).unwrap();
            let want = reference_eigenvalues(&j)[0];
            assert!((land.beta1(ConfigIndex(idx)) - want).abs() <= 1e-9, "seed {seed} idx {idx}");
            assert_eq!(land.energy(ConfigIndex(idx)), naive_ising(&w, &s));
        }
    }
}

#[test]
fn stable_sets_are_nested() {
    let grid = [0.0, 0.2, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0];
    for seed in 0..5 {
        let g = generate_random_graph(11, 25 + seed as usize * 5, seed).unwrap();
        let land = LandscapeSpectrum::compute(&coupling(&g)).unwrap();
        let sets: Vec<Vec<u64>> =
            grid.iter().map(|&ks| land.stable_records(1.0, ks).iter().map(|r| r.config.0).collect()).collect();
        for pair in sets.windows(2) {
            assert!(pair[0].iter().all(|c| pair[1].contains(c)), "seed {seed}");
        }
        assert!(sets[0].is_empty(), "K_s = 0 leaves a zero eigenvalue");
        let top = land.max_critical_ks(1.0);
        assert_eq!(land.stable_count(1.0, top + 1e-6), land.len());
    }
}

#[test]
fn level_stats_are_consistent() {
    let g = generate_random_graph(10, 24, 4).unwrap();
    let land = LandscapeSpectrum::compute(&coupling(&g)).unwrap();
    for ks in [0.1, 0.6, 1.2] {
        let levels = land.level_stats(1.0, ks);
        assert_eq!(levels.iter().map(|l| l.count).sum::<u64>(), land.len() as u64);
        assert_eq!(levels.iter().map(|l| l.n_stable).sum::<u64>(), land.stable_count(1.0, ks) as u64);
        for l in &levels {
            assert!(l.lambda_min <= l.lambda_max && l.n_stable <= l.count);
        }
        assert!(levels.windows(2).all(|p| p[0].h < p[1].h));
    }
}

#[test]
fn sweep_result_is_independent_of_thread_count() {
    let g = generate_random_graph(15, 40, 9).unwrap();
    let w = coupling(&g);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| stability_sweep(&w, 1.0, &[0.3, 0.9], &ConfigSelection::All).unwrap())
    };
    assert_eq!(run(1), run(3));
}

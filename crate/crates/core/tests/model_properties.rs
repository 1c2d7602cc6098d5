mod common;

use std::f64::consts::{PI, TAU};

use common::*;
use oim_core::model::{ising_energy, local_field, lyapunov_energy, maxcut_from_energy, phase_velocity};
use oim_core::{OimParams, PhaseState};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = OimParams> {
    (0.1f64..3.0, 0.0f64..2.0).prop_map(|(k, ks)| OimParams::new(k, ks, 0.0).unwrap())
}

fn graph_and_spins(max_n: usize) -> impl Strategy<Value = (oim_core::Graph, Vec<bool>)> {
    weighted_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(any::<bool>(), n))
    })
}

fn graph_and_phases(max_n: usize) -> impl Strategy<Value = (oim_core::Graph, Vec<f64>)> {
    weighted_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(-10.0f64..10.0, n))
    })
}

proptest! {
    #[test]
    fn binarization_identity((g, bits) in graph_and_spins(9), p in params(), wraps in proptest::collection::vec(-3i32..=3, 9)) {
        let w = coupling(&g);
        let s = spins_of(&bits);
        let th = PhaseState((0..g.n()).map(|i| {
            let base = if bits[i] { PI } else { 0.0 };
            base + TAU * wraps[i] as f64
        }).collect());
        let e = lyapunov_energy(&w, &p, &th).unwrap();
        let want = 2.0 * p.k * naive_ising(&w, &s) - g.n() as f64 * p.ks;
        prop_assert!(rel_close(e, want, 1e-12), "{e} vs {want}");
    }

    #[test]
    fn velocity_is_half_negative_gradient((g, th) in graph_and_phases(6), p in params()) {
        let w = coupling(&g);
        let th = PhaseState(th);
        let f = phase_velocity(&w, &p, &th).unwrap();
        let grad = fd_gradient(&w, &p, &th, 1e-5);
        for i in 0..g.n() {
            prop_assert!(rel_close(f[i], -0.5 * grad[i], 1e-6), "i={i}: {} vs {}", f[i], -0.5 * grad[i]);
        }
    }

    #[test]
    fn cut_identity((g, bits) in unweighted_graph(10).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(any::<bool>(), n))
    })) {
        let s = spins_of(&bits);
        let cut = g.edges().iter().filter(|e| bits[e.u] != bits[e.v]).count();
        let h = ising_energy(&coupling(&g), &s).unwrap();
        prop_assert_eq!(h, g.edges().len() as f64 - 2.0 * cut as f64);
        prop_assert_eq!(maxcut_from_energy(&g, h), cut as f64);
    }

    #[test]
    fn spin_flip_identity((g, bits) in graph_and_spins(10), k in 0usize..10) {
        let w = coupling(&g);
        let k = k % g.n();
        let s = spins_of(&bits);
        let dh = ising_energy(&w, &s.flipped(k)).unwrap() - ising_energy(&w, &s).unwrap();
        let want = 2.0 * s.get(k) * local_field(&w, &s, k).unwrap();
        prop_assert!((dh - want).abs() <= 1e-12, "{dh} vs {want}");
    }

    #[test]
    fn global_flip_symmetry((g, bits) in graph_and_spins(10)) {
        let w = coupling(&g);
        let s = spins_of(&bits);
        prop_assert_eq!(ising_energy(&w, &s.negated()).unwrap(), ising_energy(&w, &s).unwrap());
        prop_assert_eq!(ising_energy(&w, &s).unwrap(), naive_ising(&w, &s));
    }

    #[test]
    fn velocity_periodicity((g, th) in graph_and_phases(8), p in params(), i in 0usize..8, m in -2i32..=2) {
        let w = coupling(&g);
        let th = PhaseState(th);
        let f = phase_velocity(&w, &p, &th).unwrap();
        let mut wrapped = th.clone();
        wrapped.0[i % g.n()] += TAU * m as f64;
        let shifted = PhaseState(th.0.iter().map(|x| x + PI).collect());
        for (a, b) in f.iter().zip(phase_velocity(&w, &p, &wrapped).unwrap()) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
        for (a, b) in f.iter().zip(phase_velocity(&w, &p, &shifted).unwrap()) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn binarized_states_have_zero_velocity((g, bits) in graph_and_spins(9), p in params()) {
        let w = coupling(&g);
        let f = phase_velocity(&w, &p, &spins_of(&bits).to_phases()).unwrap();
        let scale = 1.0 + p.k * g.edges().iter().map(|e| e.w.abs()).sum::<f64>() + p.ks;
        prop_assert!(f.iter().all(|x| x.abs() <= 1e-14 * scale), "{f:?}");
    }

    #[test]
    fn graph_text_round_trips(g in weighted_graph(8)) {
        prop_assert_eq!(oim_core::model::load_graph(&g.to_text()).unwrap(), g);
    }
}

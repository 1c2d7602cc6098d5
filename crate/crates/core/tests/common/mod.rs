#![allow(dead_code)]

use oim_core::model::{coupling_from_graph, lyapunov_energy, Edge};
use oim_core::{CouplingMatrix, Graph, OimParams, PhaseState, SpinConfig};
use proptest::prelude::*;

/// Graph on `n` nodes; `pairs[k]` decides the k-th unordered pair (in
/// `(0,1), (0,2), ..., (n-2,n-1)` order): 0 means absent, anything else is
/// the edge weight.
pub fn graph_from_pairs(n: usize, pairs: &[i8]) -> Graph {
    let mut edges = Vec::new();
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            let w = pairs[k % pairs.len().max(1)];
            k += 1;
            if w != 0 {
                edges.push(Edge { u, v, w: w as f64 });
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Small weighted graphs with integer weights in -3..=3.
pub fn weighted_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-3i8..=3, n * (n - 1) / 2).prop_map(move |p| graph_from_pairs(n, &p))
    })
}

/// Small unweighted graphs.
pub fn unweighted_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0i8..=1, n * (n - 1) / 2).prop_map(move |p| graph_from_pairs(n, &p))
    })
}

pub fn spins_of(bits: &[bool]) -> SpinConfig {
    SpinConfig::new(bits.iter().map(|&b| if b { -1 } else { 1 }).collect()).unwrap()
}

/// H by the textbook double loop over unordered pairs.
pub fn naive_ising(w: &CouplingMatrix, s: &SpinConfig) -> f64 {
    let n = w.n();
    let mut h = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            h -= w.get(i, j) * s.get(i) * s.get(j);
        }
    }
    h
}

/// Spin configuration whose bit `b` of `mask` is spin `b` (set bit = -1).
pub fn spins_from_mask(mask: u64, n: usize) -> SpinConfig {
    SpinConfig::new((0..n).map(|b| if mask >> b & 1 == 1 { -1 } else { 1 }).collect()).unwrap()
}

pub fn coupling(g: &Graph) -> CouplingMatrix {
    coupling_from_graph(g)
}

/// Central-difference gradient of `E`.
pub fn fd_gradient(w: &CouplingMatrix, p: &OimParams, th: &PhaseState, h: f64) -> Vec<f64> {
    (0..th.len())
        .map(|i| {
            let mut a = th.clone();
            let mut b = th.clone();
            a.0[i] += h;
            b.0[i] -= h;
            (lyapunov_energy(w, p, &a).unwrap() - lyapunov_energy(w, p, &b).unwrap()) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Hessian of `E` from energy values only.
pub fn fd_hessian(w: &CouplingMatrix, p: &OimParams, th: &PhaseState, h: f64) -> Vec<f64> {
    let n = th.len();
    let e = |d: &[(usize, f64)]| {
        let mut t = th.clone();
        for &(i, x) in d {
            t.0[i] += x;
        }
        lyapunov_energy(w, p, &t).unwrap()
    };
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            out[i * n + k] = if i == k {
                (e(&[(i, h)]) - 2.0 * e(&[]) + e(&[(i, -h)])) / (h * h)
            } else {
                (e(&[(i, h), (k, h)]) - e(&[(i, h), (k, -h)]) - e(&[(i, -h), (k, h)]) + e(&[(i, -h), (k, -h)]))
                    / (4.0 * h * h)
            };
        }
    }
    out
}

pub fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1.0)
}

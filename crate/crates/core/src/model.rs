//! Graphs, coupling matrices and the OIM energy/velocity fields.
//!
//! Conventions used throughout the crate:
//! - the Ising energy sums over unordered pairs, `H = -sum_{i<j} W_ij s_i s_j`;
//! - the oscillator energy `E` uses the ordered double sum, so every binarized
//!   phase state satisfies `E = 2 K H - n K_s`;
//! - phase differences are `theta_i - theta_j`, which makes the velocity field
//!   exactly `-(1/2) grad E`.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{OimError, Result};
use crate::rng::{index_below, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected weighted graph with 0-indexed nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(OimError::InvalidGraph("node count must be at least 1".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(OimError::InvalidGraph(format!(
                    "edge ({}, {}) references a node outside 0..{n}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(OimError::InvalidGraph(format!("self-loop on node {}", e.u)));
            }
            if !e.w.is_finite() {
                return Err(OimError::InvalidGraph(format!("edge ({}, {}) has non-finite weight", e.u, e.v)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(OimError::InvalidGraph(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
        }
        Ok(Graph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.edges.len() as f64 / (self.n * (self.n - 1) / 2) as f64
    }

    /// Serializes to the edge-list text format read by [`load_graph`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for e in &self.edges {
            if e.w == 1.0 {
                let _ = writeln!(out, "{} {}", e.u + 1, e.v + 1);
            } else {
                let _ = writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w);
            }
        }
        out
    }
}

/// Parses the `n m` / `u v [w]` edge-list format (1-indexed nodes, `#` comments).
pub fn load_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(OimError::Parse { line: 0, msg: "empty input".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(OimError::Parse { line: hline, msg: format!("expected header \"n m\", got {header:?}") });
    }
    let n: usize = parse_field(fields[0], hline, "node count")?;
    let m: usize = parse_field(fields[1], hline, "edge count")?;
    if n == 0 {
        return Err(OimError::Parse { line: hline, msg: "node count must be at least 1".into() });
    }

    let mut edges = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    for (line, l) in lines {
        if edges.len() == m {
            return Err(OimError::Parse { line, msg: format!("more than the declared {m} edges") });
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 2 && f.len() != 3 {
            return Err(OimError::Parse { line, msg: format!("expected \"u v [w]\", got {l:?}") });
        }
        let u: usize = parse_field(f[0], line, "node index")?;
        let v: usize = parse_field(f[1], line, "node index")?;
        let w: f64 = if f.len() == 3 { parse_field(f[2], line, "weight")? } else { 1.0 };
        for x in [u, v] {
            if x == 0 || x > n {
                return Err(OimError::Parse { line, msg: format!("node index {x} out of range 1..={n}") });
            }
        }
        if u == v {
            return Err(OimError::Parse { line, msg: format!("self-loop on node {u}") });
        }
        if !w.is_finite() {
            return Err(OimError::Parse { line, msg: "non-finite weight".into() });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(OimError::Parse { line, msg: format!("duplicate edge ({u}, {v})") });
        }
        edges.push(Edge { u: u - 1, v: v - 1, w });
    }
    if edges.len() != m {
        return Err(OimError::Parse {
            line: text.lines().count(),
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse().map_err(|_| OimError::Parse { line, msg: format!("invalid {what} {s:?}") })
}

/// Uniform random simple graph with exactly `m` unit-weight edges.
///
/// Pairs are drawn by rejection from the seeded stream until `m` distinct
/// unordered pairs have been collected; the result is sorted by `(u, v)`.
pub fn generate_random_graph(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(OimError::InvalidParam("node count must be at least 1".into()));
    }
    if n > u32::MAX as usize {
        return Err(OimError::InvalidParam("node count too large".into()));
    }
    let max_edges = n * (n - 1) / 2;
    if m > max_edges {
        return Err(OimError::InvalidParam(format!(
            "{m} edges requested but a simple graph on {n} nodes has at most {max_edges}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut seen = HashSet::with_capacity(m);
    let mut pairs = Vec::with_capacity(m);
    while pairs.len() < m {
        let a = index_below(&mut rng, n as u32) as usize;
        let b = index_below(&mut rng, n as u32) as usize;
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            pairs.push(key);
        }
    }
    pairs.sort_unstable();
    Graph::new(n, pairs.into_iter().map(|(u, v)| Edge { u, v, w: 1.0 }).collect())
}

/// Dense symmetric interaction matrix `[W]` with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    w: Vec<f64>,
    // Nonzero off-diagonal entries per row, for O(degree) incremental updates.
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl CouplingMatrix {
    /// Builds from a row-major `n x n` matrix; rejects asymmetry or a nonzero diagonal.
    pub fn from_dense(n: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != n * n {
            return Err(OimError::DimensionMismatch { expected: n * n, got: w.len() });
        }
        for i in 0..n {
            if w[i * n + i] != 0.0 {
                return Err(OimError::InvalidParam(format!("coupling diagonal entry {i} is nonzero")));
            }
            for j in 0..n {
                let x = w[i * n + j];
                if !x.is_finite() {
                    return Err(OimError::NonFinite(format!("coupling entry ({i}, {j})")));
                }
                if x != w[j * n + i] {
                    return Err(OimError::Asymmetric((x - w[j * n + i]).abs()));
                }
            }
        }
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| w[i * n + j] != 0.0).map(|j| (j, w[i * n + j])).collect())
            .collect();
        Ok(CouplingMatrix { n, w, neighbors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    /// True when every entry is an integer, so energies are exact in f64.
    pub fn has_integer_weights(&self) -> bool {
        self.w.iter().all(|x| x.fract() == 0.0)
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(OimError::DimensionMismatch { expected: self.n, got: len });
        }
        Ok(())
    }
}

/// Antiferromagnetic MaxCut mapping: `W_uv = W_vu = -weight(u, v)`.
pub fn coupling_from_graph(g: &Graph) -> CouplingMatrix {
    let n = g.n();
    let mut w = vec![0.0; n * n];
    for e in g.edges() {
        w[e.u * n + e.v] = -e.w;
        w[e.v * n + e.u] = -e.w;
    }
    CouplingMatrix::from_dense(n, w).expect("graph invariants give a valid coupling matrix")
}

/// Vector of ±1 spins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(s: Vec<i8>) -> Result<Self> {
        if let Some(i) = s.iter().position(|&x| x != 1 && x != -1) {
            return Err(OimError::InvalidParam(format!("spin {i} is {} (must be +1 or -1)", s[i])));
        }
        Ok(SpinConfig(s))
    }

    pub fn uniform(n: usize) -> Self {
        SpinConfig(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.0[i] as f64
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.flip(i);
        s
    }

    pub fn negated(&self) -> Self {
        SpinConfig(self.0.iter().map(|&x| -x).collect())
    }

    /// Phases `0` for `+1` and `pi` for `-1`.
    pub fn to_phases(&self) -> PhaseState {
        PhaseState(self.0.iter().map(|&x| if x > 0 { 0.0 } else { std::f64::consts::PI }).collect())
    }
}

/// Oscillator phases in radians (unwrapped).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState(pub Vec<f64>);

impl PhaseState {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(i) = theta.iter().position(|x| !x.is_finite()) {
            return Err(OimError::NonFinite(format!("phase {i}")));
        }
        Ok(PhaseState(theta))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Coupling strength `K`, injection strength `K_s` and noise amplitude `K_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OimParams {
    pub k: f64,
    pub ks: f64,
    pub kn: f64,
}

impl OimParams {
    pub fn new(k: f64, ks: f64, kn: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(OimError::InvalidParam(format!("K must be finite and > 0, got {k}")));
        }
        if !(ks.is_finite() && ks >= 0.0) {
            return Err(OimError::InvalidParam(format!("K_s must be finite and >= 0, got {ks}")));
        }
        if !(kn.is_finite() && kn >= 0.0) {
            return Err(OimError::InvalidParam(format!("K_n must be finite and >= 0, got {kn}")));
        }
        Ok(OimParams { k, ks, kn })
    }

    pub fn with_ks(self, ks: f64) -> Result<Self> {
        OimParams::new(self.k, ks, self.kn)
    }
}

/// `H = -sum_{i<j} W_ij s_i s_j`.
pub fn ising_energy(w: &CouplingMatrix, s: &SpinConfig) -> Result<f64> {
    w.check_dim(s.len())?;
    let mut h = 0.0;
    for i in 0..w.n() {
        let si = s.get(i);
        for &(j, wij) in w.neighbors(i) {
            if j > i {
                h -= wij * si * s.get(j);
            }
        }
    }
    Ok(h)
}

/// `MC = (sum W - H) / 2`.
pub fn maxcut_from_energy(g: &Graph, h: f64) -> f64 {
    (g.total_weight() - h) / 2.0
}

/// `sum_j W_ij s_j`.
pub fn local_field(w: &CouplingMatrix, s: &SpinConfig, i: usize) -> Result<f64> {
    w.check_dim(s.len())?;
    if i >= w.n() {
        return Err(OimError::IndexOutOfRange { index: i as u64, limit: w.n() as u64 });
    }
    Ok(w.neighbors(i).iter().map(|&(j, wij)| wij * s.get(j)).sum())
}

/// Per-oscillator `(sum_j W_ij cos theta_j, sum_j W_ij sin theta_j)`, the
/// shared ingredient of the energy, velocity and Jacobian formulas.
pub(crate) struct Trig {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub wcos: Vec<f64>,
    pub wsin: Vec<f64>,
}

impl Trig {
    pub fn new(n: usize) -> Self {
        Trig { cos: vec![0.0; n], sin: vec![0.0; n], wcos: vec![0.0; n], wsin: vec![0.0; n] }
    }

    pub fn update(&mut self, w: &CouplingMatrix, theta: &[f64]) {
        for (i, &t) in theta.iter().enumerate() {
            let (s, c) = t.sin_cos();
            self.sin[i] = s;
            self.cos[i] = c;
        }
        for i in 0..w.n() {
            let (mut wc, mut ws) = (0.0, 0.0);
            for &(j, wij) in w.neighbors(i) {
                wc += wij * self.cos[j];
                ws += wij * self.sin[j];
            }
            self.wcos[i] = wc;
            self.wsin[i] = ws;
        }
    }
}

/// `E = -K sum_{i != j} W_ij cos(theta_i - theta_j) - K_s sum_i cos(2 theta_i)`.
pub fn lyapunov_energy(w: &CouplingMatrix, p: &OimParams, th: &PhaseState) -> Result<f64> {
    w.check_dim(th.len())?;
    let mut trig = Trig::new(w.n());
    trig.update(w, th.as_slice());
    Ok(energy_from_trig(p, &trig))
}

pub(crate) fn energy_from_trig(p: &OimParams, t: &Trig) -> f64 {
    let mut coupling = 0.0;
    let mut injection = 0.0;
    for i in 0..t.cos.len() {
        // cos(a - b) = cos a cos b + sin a sin b
        coupling += t.cos[i] * t.wcos[i] + t.sin[i] * t.wsin[i];
        injection += t.cos[i] * t.cos[i] - t.sin[i] * t.sin[i];
    }
    -p.k * coupling - p.ks * injection
}

/// `f_i = -K sum_j W_ij sin(theta_i - theta_j) - K_s sin(2 theta_i)`.
pub fn phase_velocity(w: &CouplingMatrix, p: &OimParams, th: &PhaseState) -> Result<Vec<f64>> {
    w.check_dim(th.len())?;
    let mut trig = Trig::new(w.n());
    let mut out = vec![0.0; w.n()];
    velocity_into(w, p, th.as_slice(), &mut trig, &mut out);
    Ok(out)
}

/// Allocation-free velocity evaluation for the integrators.
pub(crate) fn velocity_into(w: &CouplingMatrix, p: &OimParams, theta: &[f64], trig: &mut Trig, out: &mut [f64]) {
    trig.update(w, theta);
    for i in 0..theta.len() {
        // sin(a - b) = sin a cos b - cos a sin b
        let coupling = trig.sin[i] * trig.wcos[i] - trig.cos[i] * trig.wsin[i];
        out[i] = -p.k * coupling - p.ks * 2.0 * trig.sin[i] * trig.cos[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn triangle() -> Graph {
        load_graph("3 3\n1 2 1\n1 3 1\n2 3 1").unwrap()
    }

    fn edge() -> Graph {
        load_graph("2 1\n1 2").unwrap()
    }

    fn spins(s: &[i8]) -> SpinConfig {
        SpinConfig::new(s.to_vec()).unwrap()
    }

    #[test]
    fn parses_triangle_and_default_weight() {
        let g = triangle();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().len(), 3);
        assert!(g.edges().iter().all(|e| e.w == 1.0));
        let e = edge();
        assert_eq!(e.edges(), &[Edge { u: 0, v: 1, w: 1.0 }]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = load_graph("2 1\n1 1 1").unwrap_err();
        assert!(matches!(err, OimError::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("self-loop"));
        let err = load_graph("# c\n3 2\n1 2\n2 1\n").unwrap_err();
        assert!(matches!(err, OimError::Parse { line: 4, .. }), "{err}");
        assert!(err.to_string().contains("duplicate"));
        assert!(load_graph("3 1\n1 4\n").unwrap_err().to_string().contains("out of range"));
        assert!(load_graph("3 1\n1 x\n").is_err());
        assert!(load_graph("3 2\n1 2\n").unwrap_err().to_string().contains("found 1"));
        assert!(load_graph("").is_err());
    }

    #[test]
    fn comments_and_weights() {
        let g = load_graph("# header\n3 2\n# edge list\n1 2 2.5\n3 1 -1\n").unwrap();
        assert_eq!(g.edges()[0].w, 2.5);
        assert_eq!(g.edges()[1], Edge { u: 2, v: 0, w: -1.0 });
        assert_eq!(load_graph(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn random_graph_sizes_and_determinism() {
        let a = generate_random_graph(20, 152, 7).unwrap();
        let b = generate_random_graph(20, 152, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edges().len(), 152);
        assert!(a.edges().iter().all(|e| e.u < e.v));
        let k4 = generate_random_graph(4, 6, 99).unwrap();
        assert_eq!(k4.edges().len(), 6);
        assert!(generate_random_graph(3, 4, 1).is_err());
        assert_eq!(generate_random_graph(5, 0, 1).unwrap().edges().len(), 0);
    }

    #[test]
    fn coupling_matrices() {
        let w = coupling_from_graph(&edge());
        assert_eq!(w.row(0), &[0.0, -1.0]);
        assert_eq!(w.row(1), &[-1.0, 0.0]);
        let t = coupling_from_graph(&triangle());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.get(i, j), if i == j { 0.0 } else { -1.0 });
            }
        }
        let empty = coupling_from_graph(&Graph::new(2, vec![]).unwrap());
        assert!(empty.row(0).iter().chain(empty.row(1)).all(|&x| x == 0.0));
        assert!(CouplingMatrix::from_dense(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(CouplingMatrix::from_dense(2, vec![1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn ising_energy_examples() {
        let e = coupling_from_graph(&edge());
        assert_eq!(ising_energy(&e, &spins(&[1, -1])).unwrap(), -1.0);
        let t = coupling_from_graph(&triangle());
        assert_eq!(ising_energy(&t, &spins(&[1, 1, 1])).unwrap(), 3.0);
        assert_eq!(ising_energy(&t, &spins(&[1, 1, -1])).unwrap(), -1.0);
        assert!(ising_energy(&t, &spins(&[1, 1])).is_err());
    }

    #[test]
    fn maxcut_examples() {
        let g = generate_random_graph(20, 152, 3).unwrap();
        assert_eq!(maxcut_from_energy(&g, -28.0), 90.0);
        assert_eq!(maxcut_from_energy(&triangle(), -1.0), 2.0);
        assert_eq!(maxcut_from_energy(&g, g.total_weight()), 0.0);
    }

    #[test]
    fn local_field_examples() {
        let t = coupling_from_graph(&triangle());
        assert_eq!(local_field(&t, &spins(&[1, 1, 1]), 2).unwrap(), -2.0);
        let e = coupling_from_graph(&edge());
        assert_eq!(local_field(&e, &spins(&[1, -1]), 0).unwrap(), 1.0);
        let empty = coupling_from_graph(&Graph::new(2, vec![]).unwrap());
        assert_eq!(local_field(&empty, &spins(&[1, -1]), 1).unwrap(), 0.0);
        assert!(matches!(local_field(&e, &spins(&[1, -1]), 2), Err(OimError::IndexOutOfRange { .. })));
    }

    #[test]
    fn lyapunov_energy_examples() {
        let w = coupling_from_graph(&edge());
        let p = OimParams::new(1.0, 1.0, 0.0).unwrap();
        let e = |t: &[f64]| lyapunov_energy(&w, &p, &PhaseState::new(t.to_vec()).unwrap()).unwrap();
        assert!((e(&[0.0, PI]) + 4.0).abs() < 1e-12);
        assert!(e(&[0.0, 0.0]).abs() < 1e-12);
        assert!(e(&[0.0, PI / 2.0]).abs() < 1e-12);
    }

    #[test]
    fn phase_velocity_examples() {
        let w = coupling_from_graph(&edge());
        let p = OimParams::new(1.0, 1.0, 0.0).unwrap();
        let f = phase_velocity(&w, &p, &PhaseState(vec![0.0, PI / 2.0])).unwrap();
        assert!((f[0] + 1.0).abs() < 1e-12 && (f[1] - 1.0).abs() < 1e-12, "{f:?}");
        let t = coupling_from_graph(&triangle());
        let f = phase_velocity(&t, &p, &PhaseState(vec![0.0, PI, 2.0 * PI])).unwrap();
        assert!(f.iter().all(|x| x.abs() < 1e-14), "{f:?}");
    }

    #[test]
    fn params_validation() {
        assert!(OimParams::new(0.0, 1.0, 0.0).is_err());
        assert!(OimParams::new(1.0, -0.1, 0.0).is_err());
        assert!(OimParams::new(1.0, 0.1, f64::NAN).is_err());
        assert!(OimParams::new(1.0, 0.0, 0.0).is_ok());
        assert!(SpinConfig::new(vec![1, 0]).is_err());
        assert!(PhaseState::new(vec![f64::INFINITY]).is_err());
    }
}

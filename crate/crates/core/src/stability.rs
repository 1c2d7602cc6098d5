//! Linear stability of OIM equilibria.
//!
//! The Jacobian of the phase dynamics is `-(1/2)` times the Hessian of `E`, so
//! it is symmetric and its eigenvalues (reported as Lyapunov exponents) are
//! real. At a binarized state with spins `s`,
//!
//! ```text
//! J = K * B(s) - 2 K_s * I,   B_ik = W_ik s_i s_k (i != k),   B_ii = -s_i sum_j W_ij s_j
//! ```
//!
//! so a single eigensolve of `B(s)` (the base spectrum `beta`) gives the
//! spectrum `K beta_i - 2 K_s` for every `(K, K_s)`. `B(s)` always has the
//! all-ones vector in its kernel.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::enumeration::{check_exhaustive, index_to_config, representative_count, ConfigIndex, EnergyKey};
use crate::error::{OimError, Result};
use crate::model::{ising_energy, CouplingMatrix, OimParams, PhaseState, SpinConfig, Trig};

/// `|lambda_L|` at or below this is marginal and classified unstable.
pub const MARGINAL_TOL: f64 = 1e-9;

pub fn is_stable(lambda_l: f64) -> bool {
    lambda_l < -MARGINAL_TOL
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix {
    n: usize,
    j: Vec<f64>,
}

impl JacobianMatrix {
    pub fn from_dense(n: usize, j: Vec<f64>) -> Result<Self> {
        if j.len() != n * n {
            return Err(OimError::DimensionMismatch { expected: n * n, got: j.len() });
        }
        Ok(JacobianMatrix { n, j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.j[i * self.n + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.j[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.j
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        eigen::frobenius(&self.j)
    }
}

fn check_dim(w: &CouplingMatrix, len: usize) -> Result<()> {
    if w.n() != len {
        return Err(OimError::DimensionMismatch { expected: w.n(), got: len });
    }
    Ok(())
}

/// Exact derivative of the phase velocity field at an arbitrary phase state.
pub fn jacobian(w: &CouplingMatrix, p: &OimParams, th: &PhaseState) -> Result<JacobianMatrix> {
    check_dim(w, th.len())?;
    let n = w.n();
    let mut trig = Trig::new(n);
    trig.update(w, th.as_slice());
    let mut j = vec![0.0; n * n];
    for i in 0..n {
        for &(k, wik) in w.neighbors(i) {
            // cos(theta_i - theta_k)
            j[i * n + k] = p.k * wik * (trig.cos[i] * trig.cos[k] + trig.sin[i] * trig.sin[k]);
        }
        let coupling = trig.cos[i] * trig.wcos[i] + trig.sin[i] * trig.wsin[i];
        let cos2 = trig.cos[i] * trig.cos[i] - trig.sin[i] * trig.sin[i];
        j[i * n + i] = -p.k * coupling - 2.0 * p.ks * cos2;
    }
    JacobianMatrix::from_dense(n, j)
}

fn binarized_into(w: &CouplingMatrix, k: f64, ks: f64, s: &SpinConfig, j: &mut [f64]) {
    let n = w.n();
    j.fill(0.0);
    for i in 0..n {
        let si = s.get(i);
        let mut field = 0.0;
        for &(c, wic) in w.neighbors(i) {
            let sc = s.get(c);
            field += wic * sc;
            j[i * n + c] = k * wic * si * sc;
        }
        j[i * n + i] = -k * si * field - 2.0 * ks;
    }
}

/// Jacobian at the phase state `theta_i = 0 / pi` encoding `s`, built from
/// `cos(theta_i - theta_k) = s_i s_k`.
pub fn jacobian_binarized(w: &CouplingMatrix, p: &OimParams, s: &SpinConfig) -> Result<JacobianMatrix> {
    check_dim(w, s.len())?;
    let mut j = vec![0.0; w.n() * w.n()];
    binarized_into(w, p.k, p.ks, s, &mut j);
    JacobianMatrix::from_dense(w.n(), j)
}

/// Eigenvalues of `j`, descending.
pub fn symmetric_eigenvalues(j: &JacobianMatrix) -> Result<Vec<f64>> {
    eigen::symmetric_eigenvalues(j.n, &j.j)
}

/// Eigenvalues of the binarized Jacobian at `K = 1, K_s = 0`, descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseSpectrum {
    pub beta: Vec<f64>,
}

impl BaseSpectrum {
    pub fn largest(&self) -> f64 {
        self.beta.first().copied().unwrap_or(0.0)
    }

    /// Full spectrum at `(k, ks)`.
    pub fn shifted(&self, k: f64, ks: f64) -> Vec<f64> {
        self.beta.iter().map(|b| k * b - 2.0 * ks).collect()
    }

    pub fn lambda_l(&self, k: f64, ks: f64) -> f64 {
        k * self.largest() - 2.0 * ks
    }

    /// Injection strength at which `lambda_L` crosses zero.
    pub fn critical_ks(&self, k: f64) -> f64 {
        // beta always contains 0, so negative values are roundoff.
        (k * self.largest() / 2.0).max(0.0)
    }
}

pub fn base_spectrum(w: &CouplingMatrix, s: &SpinConfig) -> Result<BaseSpectrum> {
    check_dim(w, s.len())?;
    let mut j = vec![0.0; w.n() * w.n()];
    binarized_into(w, 1.0, 0.0, s, &mut j);
    Ok(BaseSpectrum { beta: eigen::symmetric_eigenvalues(w.n(), &j)? })
}

/// Largest eigenvalue of `B(s)`; `scratch` holds `n * n` values.
fn top_base_eigenvalue(w: &CouplingMatrix, s: &SpinConfig, scratch: &mut [f64]) -> f64 {
    binarized_into(w, 1.0, 0.0, s, scratch);
    eigen::largest_eigenvalue_in_place(w.n(), scratch)
}

pub fn largest_lyapunov(w: &CouplingMatrix, p: &OimParams, s: &SpinConfig) -> Result<f64> {
    Ok(base_spectrum(w, s)?.lambda_l(p.k, p.ks))
}

pub fn critical_ks(w: &CouplingMatrix, s: &SpinConfig, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(OimError::InvalidParam(format!("K must be finite and > 0, got {k}")));
    }
    Ok(base_spectrum(w, s)?.critical_ks(k))
}

pub fn is_equilibrium(w: &CouplingMatrix, p: &OimParams, th: &PhaseState, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(OimError::InvalidParam(format!("tolerance must be > 0, got {tol}")));
    }
    let f = crate::model::phase_velocity(w, p, th)?;
    Ok(f.iter().all(|x| x.abs() <= tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub config: ConfigIndex,
    pub h: f64,
    pub lambda_l: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevelStats {
    pub h: f64,
    pub count: u64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_stable: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub config: ConfigIndex,
    pub h: f64,
    pub ks: f64,
    pub lambda_l: f64,
}

/// Ising energy and largest base eigenvalue of every symmetry representative.
///
/// This is the expensive part of every exhaustive stability query (one
/// eigensolve per representative); everything at particular `(K, K_s)` is
/// derived from it in O(1) per configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeSpectrum {
    n: usize,
    exact: bool,
    h: Vec<f64>,
    beta1: Vec<f64>,
}

const SPECTRUM_BLOCK: usize = 1 << 12;

impl LandscapeSpectrum {
    pub fn compute(w: &CouplingMatrix) -> Result<Self> {
        check_exhaustive(w.n())?;
        let n = w.n();
        let total = representative_count(n) as usize;
        let blocks = crate::par::map_collect(total.div_ceil(SPECTRUM_BLOCK), |b| -> Result<Vec<(f64, f64)>> {
            let mut j = vec![0.0; n * n];
            let start = b * SPECTRUM_BLOCK;
            let end = (start + SPECTRUM_BLOCK).min(total);
            (start..end)
                .map(|idx| {
                    let s = index_to_config(ConfigIndex(idx as u64), n)?;
                    Ok((ising_energy(w, &s)?, top_base_eigenvalue(w, &s, &mut j)))
                })
                .collect()
        });
        let mut h = Vec::with_capacity(total);
        let mut beta1 = Vec::with_capacity(total);
        for block in blocks {
            for (e, b) in block? {
                h.push(e);
                beta1.push(b);
            }
        }
        Ok(LandscapeSpectrum { n, exact: w.has_integer_weights(), h, beta1 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn energy(&self, idx: ConfigIndex) -> f64 {
        self.h[idx.0 as usize]
    }

    pub fn beta1(&self, idx: ConfigIndex) -> f64 {
        self.beta1[idx.0 as usize]
    }

    pub fn lambda_l(&self, idx: ConfigIndex, k: f64, ks: f64) -> f64 {
        k * self.beta1(idx) - 2.0 * ks
    }

    pub fn critical_ks(&self, idx: ConfigIndex, k: f64) -> f64 {
        (k * self.beta1(idx) / 2.0).max(0.0)
    }

    pub fn min_energy(&self) -> f64 {
        self.energy_key_min().value()
    }

    fn energy_key_min(&self) -> EnergyKey {
        self.h.iter().map(|&h| EnergyKey::new(h, self.exact)).min().expect("nonempty landscape")
    }

    /// Representatives at the minimum energy, ascending.
    pub fn ground_indices(&self) -> Vec<ConfigIndex> {
        let min = self.energy_key_min();
        (0..self.len())
            .filter(|&i| EnergyKey::new(self.h[i], self.exact) == min)
            .map(|i| ConfigIndex(i as u64))
            .collect()
    }

    pub fn record(&self, idx: ConfigIndex, k: f64, ks: f64) -> StabilityRecord {
        let lambda_l = self.lambda_l(idx, k, ks);
        StabilityRecord { config: idx, h: self.energy(idx), lambda_l, stable: is_stable(lambda_l) }
    }

    /// Per-energy min/max of `lambda_L` and stable counts, ascending in `H`.
    pub fn level_stats(&self, k: f64, ks: f64) -> Vec<EnergyLevelStats> {
        let mut levels: BTreeMap<EnergyKey, EnergyLevelStats> = BTreeMap::new();
        for i in 0..self.len() {
            let key = EnergyKey::new(self.h[i], self.exact);
            let lambda = k * self.beta1[i] - 2.0 * ks;
            let stable = is_stable(lambda) as u64;
            levels
                .entry(key)
                .and_modify(|l| {
                    l.count += 1;
                    l.lambda_min = l.lambda_min.min(lambda);
                    l.lambda_max = l.lambda_max.max(lambda);
                    l.n_stable += stable;
                })
                .or_insert(EnergyLevelStats {
                    h: key.value(),
                    count: 1,
                    lambda_min: lambda,
                    lambda_max: lambda,
                    n_stable: stable,
                });
        }
        levels.into_values().collect()
    }

    /// Stable representatives sorted by `H`, then index.
    pub fn stable_records(&self, k: f64, ks: f64) -> Vec<StabilityRecord> {
        let mut out: Vec<StabilityRecord> = (0..self.len() as u64)
            .map(|i| self.record(ConfigIndex(i), k, ks))
            .filter(|r| r.stable)
            .collect();
        out.sort_by(|a, b| a.h.total_cmp(&b.h).then(a.config.cmp(&b.config)));
        out
    }

    pub fn stable_count(&self, k: f64, ks: f64) -> usize {
        self.beta1.iter().filter(|&&b| is_stable(k * b - 2.0 * ks)).count()
    }

    /// Smallest `K_s` above which every representative is stable.
    pub fn max_critical_ks(&self, k: f64) -> f64 {
        self.beta1.iter().fold(0.0f64, |m, &b| m.max(k * b / 2.0))
    }

    /// Sweep rows for `configs` (ascending index) at every `ks`.
    pub fn rows<'a>(
        &'a self,
        configs: &'a [ConfigIndex],
        k: f64,
        ks_values: &'a [f64],
    ) -> impl Iterator<Item = SweepRow> + 'a {
        configs.iter().flat_map(move |&c| {
            ks_values.iter().map(move |&ks| SweepRow { config: c, h: self.energy(c), ks, lambda_l: self.lambda_l(c, k, ks) })
        })
    }
}

/// Which configurations a stability sweep covers.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigSelection {
    All,
    List(Vec<ConfigIndex>),
}

/// `lambda_L` for every selected configuration and every `K_s`, ordered by
/// `(config index, K_s position)`.
pub fn stability_sweep(
    w: &CouplingMatrix,
    k: f64,
    ks_values: &[f64],
    configs: &ConfigSelection,
) -> Result<Vec<SweepRow>> {
    OimParams::new(k, 0.0, 0.0)?;
    for &ks in ks_values {
        OimParams::new(k, ks, 0.0)?;
    }
    match configs {
        ConfigSelection::All => {
            let land = LandscapeSpectrum::compute(w)?;
            let all: Vec<ConfigIndex> = (0..land.len() as u64).map(ConfigIndex).collect();
            Ok(land.rows(&all, k, ks_values).collect())
        }
        ConfigSelection::List(list) => {
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            let mut rows = Vec::with_capacity(list.len() * ks_values.len());
            let mut j = vec![0.0; w.n() * w.n()];
            for c in list {
                let s = index_to_config(c, w.n())?;
                let h = ising_energy(w, &s)?;
                let beta1 = top_base_eigenvalue(w, &s, &mut j);
                rows.extend(ks_values.iter().map(|&ks| SweepRow { config: c, h, ks, lambda_l: k * beta1 - 2.0 * ks }));
            }
            Ok(rows)
        }
    }
}

pub fn energy_level_stats(w: &CouplingMatrix, k: f64, ks: f64) -> Result<Vec<EnergyLevelStats>> {
    OimParams::new(k, ks, 0.0)?;
    Ok(LandscapeSpectrum::compute(w)?.level_stats(k, ks))
}

//! Exhaustive sweeps over spin configurations.
//!
//! Configurations are enumerated modulo the global flip `s -> -s` by pinning
//! `s_0 = +1`, which leaves `2^(n-1)` representatives. A [`ConfigIndex`]
//! stores spins `s_1..s_{n-1}` in its bits (bit set means `-1`).
//!
//! The sweep walks the representatives in reflected Gray-code order so that
//! consecutive configurations differ by one spin and `H` can be updated from
//! the local field of the flipped spin in O(degree).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{OimError, Result, MAX_EXHAUSTIVE_NODES};
use crate::model::{ising_energy, CouplingMatrix, SpinConfig};

/// Resolution used to bin energies of non-integer-weighted graphs.
pub const ENERGY_RESOLUTION: f64 = 1e-9;

const BLOCK_BITS: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfigIndex(pub u64);

pub fn representative_count(n: usize) -> u64 {
    1u64 << n.saturating_sub(1)
}

pub fn index_to_config(idx: ConfigIndex, n: usize) -> Result<SpinConfig> {
    if n == 0 || n > 64 {
        return Err(OimError::InvalidParam(format!("cannot decode a configuration of {n} spins")));
    }
    let limit = representative_count(n);
    if idx.0 >= limit {
        return Err(OimError::IndexOutOfRange { index: idx.0, limit });
    }
    let mut s = vec![1i8; n];
    for (b, spin) in s.iter_mut().skip(1).enumerate() {
        if idx.0 >> b & 1 == 1 {
            *spin = -1;
        }
    }
    Ok(SpinConfig::new(s).expect("decoded spins are ±1"))
}

/// Index of the symmetry class of `s`; configurations with `s_0 = -1` map to
/// the index of their mirror image.
pub fn config_to_index(s: &SpinConfig) -> Result<ConfigIndex> {
    let n = s.len();
    if n == 0 || n > 64 {
        return Err(OimError::InvalidParam(format!("cannot encode a configuration of {n} spins")));
    }
    let flip = s.as_slice()[0] < 0;
    let mut idx = 0u64;
    for (b, &x) in s.as_slice().iter().skip(1).enumerate() {
        if (x < 0) != flip {
            idx |= 1 << b;
        }
    }
    Ok(ConfigIndex(idx))
}

pub(crate) fn check_exhaustive(n: usize) -> Result<()> {
    if n > MAX_EXHAUSTIVE_NODES {
        return Err(OimError::TooLarge { n });
    }
    Ok(())
}

/// Histogram key: the exact energy for integer weights, otherwise the energy
/// rounded to [`ENERGY_RESOLUTION`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyKey(f64);

impl EnergyKey {
    pub fn new(h: f64, exact: bool) -> Self {
        let v = if exact { h } else { (h / ENERGY_RESOLUTION).round() * ENERGY_RESOLUTION };
        // fold -0.0 into 0.0
        EnergyKey(v + 0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for EnergyKey {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0).is_eq()
    }
}

impl Eq for EnergyKey {}

impl PartialOrd for EnergyKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EnergyKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EnergyHistogram {
    pub bins: BTreeMap<EnergyKey, u64>,
    /// Counts include mirror images (each representative counted twice).
    pub full_count: bool,
}

impl EnergyHistogram {
    pub fn total(&self) -> u64 {
        self.bins.values().sum()
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.bins.keys().next().map(|k| k.value())
    }

    pub fn count_at(&self, h: f64) -> u64 {
        self.bins.iter().find(|(k, _)| k.value() == h).map_or(0, |(_, &c)| c)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.bins.iter().map(|(k, &c)| (k.value(), c))
    }
}

/// Gray-code walk over representatives `[start, end)` of the step counter.
struct GrayWalk<'a> {
    w: &'a CouplingMatrix,
    spins: Vec<f64>,
    field: Vec<f64>,
    h: f64,
    step: u64,
}

impl<'a> GrayWalk<'a> {
    fn start(w: &'a CouplingMatrix, step: u64) -> Self {
        let n = w.n();
        let code = step ^ (step >> 1);
        let s = index_to_config(ConfigIndex(code), n).expect("step within range");
        let spins: Vec<f64> = (0..n).map(|i| s.get(i)).collect();
        let field = (0..n)
            .map(|i| w.neighbors(i).iter().map(|&(j, wij)| wij * spins[j]).sum())
            .collect();
        let h = ising_energy(w, &s).expect("dimensions match");
        GrayWalk { w, spins, field, h, step }
    }

    fn index(&self) -> ConfigIndex {
        ConfigIndex(self.step ^ (self.step >> 1))
    }

    fn advance(&mut self) {
        self.step += 1;
        let k = self.step.trailing_zeros() as usize + 1;
        let sk = self.spins[k];
        self.h += 2.0 * sk * self.field[k];
        for &(j, wjk) in self.w.neighbors(k) {
            self.field[j] -= 2.0 * wjk * sk;
        }
        self.spins[k] = -sk;
    }
}

/// Visits every representative in Gray order, block by block. Blocks are
/// independent and seeded by a direct evaluation, so the result of `fold` per
/// block does not depend on how blocks are scheduled.
fn walk_blocks<T, F, M>(w: &CouplingMatrix, init: impl Fn() -> T + Sync + Send, visit: F, merge: M) -> T
where
    T: Send,
    F: Fn(&mut T, ConfigIndex, f64) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let total = representative_count(w.n());
    let block = 1u64 << BLOCK_BITS;
    let n_blocks = total.div_ceil(block);
    let run_block = |b: u64| {
        let start = b * block;
        let end = (start + block).min(total);
        let mut acc = init();
        let mut walk = GrayWalk::start(w, start);
        visit(&mut acc, walk.index(), walk.h);
        while walk.step + 1 < end {
            walk.advance();
            visit(&mut acc, walk.index(), walk.h);
        }
        acc
    };
    crate::par::map_reduce(n_blocks, run_block, &init, &merge)
}

pub fn enumerate_energies(w: &CouplingMatrix, full_count: bool) -> Result<EnergyHistogram> {
    check_exhaustive(w.n())?;
    let exact = w.has_integer_weights();
    let bins = walk_blocks(
        w,
        BTreeMap::new,
        |acc: &mut BTreeMap<EnergyKey, u64>, _, h| *acc.entry(EnergyKey::new(h, exact)).or_insert(0) += 1,
        |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            a
        },
    );
    let bins = if full_count { bins.into_iter().map(|(k, c)| (k, 2 * c)).collect() } else { bins };
    Ok(EnergyHistogram { bins, full_count })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub min_h: f64,
    /// Up to `cap` representatives (`s_0 = +1`), ascending by index.
    pub configs: Vec<SpinConfig>,
    pub indices: Vec<ConfigIndex>,
    /// Number of minimizing configurations including mirror images.
    pub total: u64,
}

impl GroundStates {
    pub fn representative_total(&self) -> u64 {
        self.total / 2
    }
}

pub fn ground_states(w: &CouplingMatrix, cap: usize) -> Result<GroundStates> {
    check_exhaustive(w.n())?;
    let exact = w.has_integer_weights();
    // Per block: (min key, count at min, smallest indices at min). Lists are
    // pruned to the `cap` smallest so truncation is independent of block order.
    let prune = |v: &mut Vec<ConfigIndex>| {
        if v.len() > cap.max(1).saturating_mul(2) {
            v.sort_unstable();
            v.truncate(cap);
        }
    };
    type Acc = (Option<EnergyKey>, u64, Vec<ConfigIndex>);
    let (min, count, mut indices) = walk_blocks(
        w,
        || (None, 0, Vec::new()),
        |acc: &mut Acc, idx, h| {
            let key = EnergyKey::new(h, exact);
            match acc.0 {
                Some(m) if key > m => {}
                Some(m) if key == m => {
                    acc.1 += 1;
                    acc.2.push(idx);
                    prune(&mut acc.2);
                }
                _ => *acc = (Some(key), 1, vec![idx]),
            }
        },
        |a: Acc, b: Acc| match (a.0, b.0) {
            (None, _) => b,
            (_, None) => a,
            (Some(x), Some(y)) if x < y => a,
            (Some(x), Some(y)) if y < x => b,
            _ => {
                let mut idx = a.2;
                idx.extend(b.2);
                prune(&mut idx);
                (a.0, a.1 + b.1, idx)
            }
        },
    );
    indices.sort_unstable();
    indices.truncate(cap);
    let configs = indices.iter().map(|&i| index_to_config(i, w.n())).collect::<Result<_>>()?;
    Ok(GroundStates {
        min_h: min.expect("at least one configuration").value(),
        configs,
        indices,
        total: 2 * count,
    })
}

/// Cross-checks the incremental Gray-code energies against direct
/// recomputation for every configuration.
pub fn verify_enumeration(w: &CouplingMatrix) -> Result<bool> {
    if w.n() > 16 {
        return Err(OimError::InvalidParam(format!("verification is limited to n <= 16, got {}", w.n())));
    }
    let exact = w.has_integer_weights();
    let n = w.n();
    let total = representative_count(n);
    let mut walk = GrayWalk::start(w, 0);
    let mut visited = vec![false; total as usize];
    loop {
        let idx = walk.index();
        let direct = ising_energy(w, &index_to_config(idx, n)?)?;
        let ok = if exact { direct == walk.h } else { (direct - walk.h).abs() <= ENERGY_RESOLUTION };
        if !ok || std::mem::replace(&mut visited[idx.0 as usize], true) {
            return Ok(false);
        }
        if walk.step + 1 == total {
            break;
        }
        walk.advance();
    }
    Ok(visited.into_iter().all(|v| v))
}

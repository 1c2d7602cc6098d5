//! Multi-trial campaigns and their persisted reports.
//!
//! Trial `i` of a campaign draws everything (initial phases first, then noise)
//! from its own stream seeded with [`trial_seed`]`(master_seed, i)`. Campaigns
//! over several `K_s` values reuse the same trial seeds, so trial `i` starts
//! from the same initial phases at every `K_s`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, readout, ReadoutResult, SimConfig};
use crate::enumeration::{ground_states, EnergyKey};
use crate::error::{OimError, Result, MAX_EXHAUSTIVE_NODES};
use crate::io::write_trials_csv;
use crate::model::{ising_energy, CouplingMatrix, Graph, OimParams, PhaseState};
use crate::rng::{rng_from_seed, trial_seed, uniform_phase, NORMAL_SAMPLER_ID, PRNG_ID, SEED_SCHEME_ID};
use crate::stability::{largest_lyapunov, LandscapeSpectrum, StabilityRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    pub converged: bool,
    pub readout: ReadoutResult,
    pub h: Option<f64>,
    pub final_lambda_l: Option<f64>,
    pub steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Initial phases of a trial: `n` uniform draws on `[0, 2pi)`.
pub fn initial_phases(n: usize, seed: u64) -> PhaseState {
    let mut rng = rng_from_seed(seed);
    PhaseState((0..n).map(|_| uniform_phase(&mut rng)).collect())
}

/// Runs one trial from the stream `seed`.
///
/// Noisy runs (`K_n > 0`) are followed by a noiseless settle of
/// `sim.settle_time`; the trial counts as converged when the settled state
/// reads out as the same spins as the final noisy state. Noiseless runs are
/// converged when the equilibrium criterion fired before `t_max`.
pub fn run_trial(w: &CouplingMatrix, p: &OimParams, sim: &SimConfig, trial: u64, seed: u64) -> TrialResult {
    let mut rng = rng_from_seed(seed);
    let th0 = PhaseState((0..w.n()).map(|_| uniform_phase(&mut rng)).collect());
    let noisy = p.kn > 0.0;
    let mut result =
        TrialResult { trial, seed, converged: false, readout: non_binarized(), h: None, final_lambda_l: None, steps: 0, error: None };

    let traj = match integrate(w, p, &th0, sim, noisy.then_some(&mut rng)) {
        Ok(t) => t,
        Err(e) => {
            result.steps = e.step;
            result.error = Some(e.to_string());
            return result;
        }
    };
    result.steps = traj.steps;
    let final_state = traj.final_state();
    let (state_readout, converged) = if noisy {
        let before = readout(final_state, sim.readout_tol).expect("validated tolerance");
        let quiet = OimParams { kn: 0.0, ..*p };
        let settle = SimConfig { t_max: sim.settle_time, ..*sim };
        if sim.settle_time >= sim.dt {
            match integrate(w, &quiet, final_state, &settle, None) {
                Ok(s) => {
                    result.steps += s.steps;
                    let after = readout(s.final_state(), sim.readout_tol).expect("validated tolerance");
                    let converged = after.is_binarized() && after == before;
                    (after, converged)
                }
                Err(e) => {
                    result.error = Some(e.to_string());
                    return result;
                }
            }
        } else {
            let converged = before.is_binarized();
            (before, converged)
        }
    } else {
        (readout(final_state, sim.readout_tol).expect("validated tolerance"), traj.converged)
    };
    result.converged = converged;
    if let Some(s) = state_readout.spins() {
        result.h = Some(ising_energy(w, s).expect("dimensions match"));
        result.final_lambda_l = largest_lyapunov(w, p, s).ok();
    }
    result.readout = state_readout;
    result
}

fn non_binarized() -> ReadoutResult {
    ReadoutResult::NonBinarized { worst_deviation: std::f64::consts::FRAC_PI_2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessReference {
    /// Exact minimum from exhaustive enumeration.
    Exact,
    /// Lowest `H` observed across the campaign.
    BestSeen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialCampaignResult {
    pub params: OimParams,
    pub sim: SimConfig,
    pub master_seed: u64,
    pub trials: Vec<TrialResult>,
    pub histogram: BTreeMap<EnergyKey, u64>,
    pub n_nonbinarized: u64,
    pub n_success: u64,
    pub success_rate: f64,
    pub reference: SuccessReference,
    /// Energy counted as success; absent when no reference exists.
    pub reference_h: Option<f64>,
}

fn check_campaign(p: &OimParams, sim: &SimConfig, n_trials: u64) -> Result<()> {
    OimParams::new(p.k, p.ks, p.kn)?;
    sim.validate()?;
    if n_trials == 0 {
        return Err(OimError::InvalidParam("at least one trial is required".into()));
    }
    Ok(())
}

fn exact_minimum(w: &CouplingMatrix) -> Result<Option<f64>> {
    if w.n() <= MAX_EXHAUSTIVE_NODES {
        Ok(Some(ground_states(w, 0)?.min_h))
    } else {
        Ok(None)
    }
}

fn run_with_reference(
    w: &CouplingMatrix,
    p: &OimParams,
    sim: &SimConfig,
    n_trials: u64,
    master_seed: u64,
    exact_min: Option<f64>,
) -> TrialCampaignResult {
    let trials = crate::par::map_collect(n_trials as usize, |i| {
        run_trial(w, p, sim, i as u64, trial_seed(master_seed, i as u64))
    });
    let exact = w.has_integer_weights();
    let mut histogram = BTreeMap::new();
    for h in trials.iter().filter_map(|t| t.h) {
        *histogram.entry(EnergyKey::new(h, exact)).or_insert(0) += 1;
    }
    let n_binarized: u64 = histogram.values().sum();
    let (reference, reference_h) = match exact_min {
        Some(h) => (SuccessReference::Exact, Some(h)),
        None => (SuccessReference::BestSeen, histogram.keys().next().map(|k: &EnergyKey| k.value())),
    };
    let n_success = reference_h
        .map(|h| histogram.get(&EnergyKey::new(h, exact)).copied().unwrap_or(0))
        .unwrap_or(0);
    TrialCampaignResult {
        params: *p,
        sim: *sim,
        master_seed,
        n_nonbinarized: n_trials - n_binarized,
        n_success,
        success_rate: n_success as f64 / n_trials as f64,
        trials,
        histogram,
        reference,
        reference_h,
    }
}

pub fn run_trials(
    w: &CouplingMatrix,
    p: &OimParams,
    sim: &SimConfig,
    n_trials: u64,
    master_seed: u64,
) -> Result<TrialCampaignResult> {
    check_campaign(p, sim, n_trials)?;
    Ok(run_with_reference(w, p, sim, n_trials, master_seed, exact_minimum(w)?))
}

/// One campaign per `K_s`, all sharing `master_seed` (paired trials).
pub fn ks_campaign(
    w: &CouplingMatrix,
    base: &OimParams,
    ks_values: &[f64],
    sim: &SimConfig,
    n_trials: u64,
    master_seed: u64,
) -> Result<Vec<TrialCampaignResult>> {
    if ks_values.is_empty() {
        return Err(OimError::InvalidParam("empty K_s list".into()));
    }
    let params = ks_values.iter().map(|&ks| base.with_ks(ks)).collect::<Result<Vec<_>>>()?;
    for p in &params {
        check_campaign(p, sim, n_trials)?;
    }
    let exact_min = exact_minimum(w)?;
    Ok(params.iter().map(|p| run_with_reference(w, p, sim, n_trials, master_seed, exact_min)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableSetReport {
    pub k: f64,
    pub ks: f64,
    /// Stable representatives sorted by `H` then index, at most `cap` of them.
    pub records: Vec<StabilityRecord>,
    pub total: u64,
    pub truncated: bool,
}

/// Every stable symmetry representative at `(k, ks)`.
pub fn stable_set_report(w: &CouplingMatrix, k: f64, ks: f64, cap: usize) -> Result<StableSetReport> {
    OimParams::new(k, ks, 0.0)?;
    Ok(stable_set_from(&LandscapeSpectrum::compute(w)?, k, ks, cap))
}

pub fn stable_set_from(land: &LandscapeSpectrum, k: f64, ks: f64, cap: usize) -> StableSetReport {
    let mut records = land.stable_records(k, ks);
    let total = records.len() as u64;
    let truncated = records.len() > cap;
    records.truncate(cap);
    StableSetReport { k, ks, records, total, truncated }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphProvenance {
    /// File path, or a `generated` description.
    pub source: String,
    /// SHA-256 of the canonical edge-list text.
    pub sha256: String,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_seed: Option<u64>,
}

impl GraphProvenance {
    pub fn new(g: &Graph, source: impl Into<String>, generator_seed: Option<u64>) -> Self {
        GraphProvenance {
            source: source.into(),
            sha256: graph_fingerprint(g),
            n: g.n(),
            m: g.edges().len(),
            generator_seed,
        }
    }
}

pub fn graph_fingerprint(g: &Graph) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(g.to_text().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool: String,
    pub tool_version: String,
    pub prng: String,
    pub normal_sampler: String,
    pub seed_scheme: String,
    pub graph: GraphProvenance,
    pub params: OimParams,
    pub sim: SimConfig,
    pub master_seed: u64,
    pub success_definition: String,
    /// Left empty by default so reruns are byte-identical.
    pub timestamp: Option<String>,
}

impl RunMetadata {
    pub fn new(result: &TrialCampaignResult, graph: GraphProvenance) -> Self {
        let success_definition = match result.reference {
            SuccessReference::Exact => "binarized trial at the exact minimum H (exhaustive enumeration)",
            SuccessReference::BestSeen => "binarized trial at the lowest H seen in the campaign",
        };
        RunMetadata {
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            prng: PRNG_ID.into(),
            normal_sampler: NORMAL_SAMPLER_ID.into(),
            seed_scheme: SEED_SCHEME_ID.into(),
            graph,
            params: result.params,
            sim: result.sim,
            master_seed: result.master_seed,
            success_definition: success_definition.into(),
            timestamp: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramEntry {
    #[serde(rename = "H")]
    pub h: f64,
    pub count: u64,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub metadata: RunMetadata,
    pub n_trials: u64,
    pub histogram: Vec<HistogramEntry>,
    pub n_nonbinarized: u64,
    pub n_success: u64,
    pub success_rate: f64,
    pub success_reference: SuccessReference,
    pub reference_h: Option<f64>,
}

impl CampaignReport {
    pub fn new(result: &TrialCampaignResult, metadata: RunMetadata) -> Self {
        CampaignReport {
            metadata,
            n_trials: result.trials.len() as u64,
            histogram: result.histogram.iter().map(|(k, &count)| HistogramEntry { h: k.value(), count }).collect(),
            n_nonbinarized: result.n_nonbinarized,
            n_success: result.n_success,
            success_rate: result.success_rate,
            success_reference: result.reference,
            reference_h: result.reference_h,
        }
    }
}

/// Writes `trials.csv` and `report.json` into `dir` (created if missing).
pub fn write_report(result: &TrialCampaignResult, metadata: RunMetadata, dir: &Path) -> Result<CampaignReport> {
    fs::create_dir_all(dir).map_err(|e| OimError::io(dir, e))?;
    let csv_path = dir.join("trials.csv");
    let file = fs::File::create(&csv_path).map_err(|e| OimError::io(&csv_path, e))?;
    let mut out = BufWriter::new(file);
    write_trials_csv(&mut out, &result.trials)
        .and_then(|_| out.flush())
        .map_err(|e| OimError::io(&csv_path, e))?;

    let report = CampaignReport::new(result, metadata);
    let json_path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| OimError::Json { path: json_path.display().to_string(), source: e })?;
    text.push('\n');
    fs::write(&json_path, text).map_err(|e| OimError::io(&json_path, e))?;
    Ok(report)
}

pub fn read_report(path: &Path) -> Result<CampaignReport> {
    let text = fs::read_to_string(path).map_err(|e| OimError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| OimError::Json { path: path.display().to_string(), source: e })
}

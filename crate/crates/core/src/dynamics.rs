//! Time integration of the OIM phase dynamics.
//!
//! Noiseless runs use classical RK4 and may stop early once the velocity has
//! stayed below `eq_tol` for `eq_window` consecutive steps. Noisy runs use
//! Euler–Maruyama with additive isotropic Wiener noise of amplitude `K_n` and
//! always run to `t_max`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{OimError, Result};
use crate::model::{energy_from_trig, velocity_into, CouplingMatrix, OimParams, PhaseState, SpinConfig, Trig};
use crate::rng::{standard_normal, OimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub eq_tol: f64,
    pub eq_window: u32,
    pub record_stride: u32,
    /// Angular tolerance used when reading phases out as spins.
    pub readout_tol: f64,
    /// Noiseless relaxation applied after a noisy run before the final readout.
    pub settle_time: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.01,
            t_max: 200.0,
            eq_tol: 1e-6,
            eq_window: 10,
            record_stride: 10,
            readout_tol: 0.1,
            settle_time: 10.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(OimError::InvalidParam(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt) {
            return bad(format!("t_max must be >= dt, got {}", self.t_max));
        }
        if !(self.eq_tol.is_finite() && self.eq_tol > 0.0) {
            return bad(format!("eq_tol must be > 0, got {}", self.eq_tol));
        }
        if self.eq_window < 1 || self.record_stride < 1 {
            return bad("eq_window and record_stride must be >= 1".into());
        }
        if !(self.readout_tol > 0.0 && self.readout_tol < PI / 4.0) {
            return bad(format!("readout tolerance must lie in (0, pi/4), got {}", self.readout_tol));
        }
        if !(self.settle_time.is_finite() && self.settle_time >= 0.0) {
            return bad(format!("settle_time must be >= 0, got {}", self.settle_time));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> u64 {
        (self.t_max / self.dt).round() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub energies: Vec<f64>,
    /// Integration steps taken.
    pub steps: u64,
    /// Whether the equilibrium criterion stopped a noiseless run before `t_max`.
    pub converged: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> &PhaseState {
        self.states.last().expect("trajectories record at least the initial state")
    }
}

#[derive(Debug, Clone)]
pub struct IntegrationFailure {
    pub step: u64,
    pub partial: Trajectory,
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "non-finite phase state at step {}", self.step)
    }
}

impl std::error::Error for IntegrationFailure {}

impl From<IntegrationFailure> for OimError {
    fn from(e: IntegrationFailure) -> Self {
        OimError::NonFinite(e.to_string())
    }
}

/// Scratch buffers for one trajectory.
struct Integrator<'a> {
    w: &'a CouplingMatrix,
    p: OimParams,
    trig: Trig,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl<'a> Integrator<'a> {
    fn new(w: &'a CouplingMatrix, p: &OimParams) -> Self {
        let n = w.n();
        Integrator {
            w,
            p: *p,
            trig: Trig::new(n),
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    /// Velocity at `theta` into `k1`; returns its max norm.
    fn eval_k1(&mut self, theta: &[f64]) -> f64 {
        velocity_into(self.w, &self.p, theta, &mut self.trig, &mut self.k1);
        self.k1.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// RK4 step using the velocity already stored in `k1`.
    fn rk4_from_k1(&mut self, theta: &mut [f64], dt: f64) {
        let n = theta.len();
        for i in 0..n {
            self.tmp[i] = theta[i] + 0.5 * dt * self.k1[i];
        }
        velocity_into(self.w, &self.p, &self.tmp, &mut self.trig, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = theta[i] + 0.5 * dt * self.k2[i];
        }
        velocity_into(self.w, &self.p, &self.tmp, &mut self.trig, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = theta[i] + dt * self.k3[i];
        }
        velocity_into(self.w, &self.p, &self.tmp, &mut self.trig, &mut self.k4);
        for i in 0..n {
            theta[i] += dt / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }

    /// Euler–Maruyama step using the drift stored in `k1`.
    fn em_from_k1(&mut self, theta: &mut [f64], dt: f64, rng: &mut OimRng) {
        let scale = self.p.kn * dt.sqrt();
        for i in 0..theta.len() {
            theta[i] += self.k1[i] * dt + scale * standard_normal(rng);
        }
    }

    fn energy(&mut self, theta: &[f64]) -> f64 {
        self.trig.update(self.w, theta);
        energy_from_trig(&self.p, &self.trig)
    }
}

fn check_dims(w: &CouplingMatrix, th: &PhaseState) -> Result<()> {
    if w.n() != th.len() {
        return Err(OimError::DimensionMismatch { expected: w.n(), got: th.len() });
    }
    Ok(())
}

fn finite_or(theta: &[f64], step: u64) -> Result<()> {
    if theta.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(OimError::NonFinite(format!("phase state after step {step}")))
    }
}

/// One classical RK4 step of the noiseless dynamics.
pub fn step_deterministic(w: &CouplingMatrix, p: &OimParams, th: &PhaseState, dt: f64) -> Result<PhaseState> {
    check_dims(w, th)?;
    if !(dt > 0.0) {
        return Err(OimError::InvalidParam(format!("dt must be > 0, got {dt}")));
    }
    let mut it = Integrator::new(w, p);
    let mut theta = th.0.clone();
    it.eval_k1(&theta);
    it.rk4_from_k1(&mut theta, dt);
    finite_or(&theta, 1)?;
    Ok(PhaseState(theta))
}

/// One Euler–Maruyama step: `theta + f dt + K_n sqrt(dt) xi`.
pub fn step_sde(w: &CouplingMatrix, p: &OimParams, th: &PhaseState, dt: f64, rng: &mut OimRng) -> Result<PhaseState> {
    check_dims(w, th)?;
    if !(dt > 0.0) {
        return Err(OimError::InvalidParam(format!("dt must be > 0, got {dt}")));
    }
    let mut it = Integrator::new(w, p);
    let mut theta = th.0.clone();
    it.eval_k1(&theta);
    it.em_from_k1(&mut theta, dt, rng);
    finite_or(&theta, 1)?;
    Ok(PhaseState(theta))
}

/// Integrates from `th0`. With `rng = None` the run is noiseless (RK4, early
/// stop at equilibrium); with an rng and `K_n > 0` it is Euler–Maruyama to
/// `t_max`. Samples are kept every `record_stride` steps plus the final state.
pub fn integrate(
    w: &CouplingMatrix,
    p: &OimParams,
    th0: &PhaseState,
    sim: &SimConfig,
    rng: Option<&mut OimRng>,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let fail = |step, partial| IntegrationFailure { step, partial };
    if check_dims(w, th0).is_err() || sim.validate().is_err() || finite_or(&th0.0, 0).is_err() {
        return Err(fail(0, Trajectory::default()));
    }
    let mut rng = rng.filter(|_| p.kn > 0.0);
    let noisy = rng.is_some();
    let mut it = Integrator::new(w, p);
    let mut theta = th0.0.clone();
    let mut traj = Trajectory::default();
    let n_steps = sim.n_steps();
    let stride = sim.record_stride as u64;

    let record = |traj: &mut Trajectory, it: &mut Integrator, theta: &[f64], step: u64| {
        traj.times.push(step as f64 * sim.dt);
        traj.energies.push(it.energy(theta));
        traj.states.push(PhaseState(theta.to_vec()));
    };
    record(&mut traj, &mut it, &theta, 0);

    let mut step = 0u64;
    let mut quiet = 0u32;
    loop {
        let speed = it.eval_k1(&theta);
        if !noisy {
            if speed <= sim.eq_tol {
                quiet += 1;
                // an exact equilibrium at the start is not integrated at all
                if step == 0 || quiet >= sim.eq_window {
                    traj.converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if step == n_steps {
            break;
        }
        match rng.as_deref_mut() {
            Some(r) => it.em_from_k1(&mut theta, sim.dt, r),
            None => it.rk4_from_k1(&mut theta, sim.dt),
        }
        step += 1;
        if !theta.iter().all(|x| x.is_finite()) {
            traj.steps = step;
            return Err(fail(step, traj));
        }
        if step.is_multiple_of(stride) {
            record(&mut traj, &mut it, &theta, step);
        }
    }
    traj.steps = step;
    if !step.is_multiple_of(stride) {
        record(&mut traj, &mut it, &theta, step);
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReadoutResult {
    Binarized { spins: SpinConfig },
    NonBinarized { worst_deviation: f64 },
}

impl ReadoutResult {
    pub fn spins(&self) -> Option<&SpinConfig> {
        match self {
            ReadoutResult::Binarized { spins } => Some(spins),
            ReadoutResult::NonBinarized { .. } => None,
        }
    }

    pub fn is_binarized(&self) -> bool {
        self.spins().is_some()
    }
}

/// Angular distance of `theta` from the nearest point of `{0, pi}` (mod 2pi),
/// and the spin of that point.
pub fn lattice_deviation(theta: f64) -> (f64, i8) {
    let x = theta.rem_euclid(TAU);
    let d0 = x.min(TAU - x);
    let dpi = (x - PI).abs();
    if d0 <= dpi {
        (d0, 1)
    } else {
        (dpi, -1)
    }
}

/// Maps phases to spins: `+1` near 0, `-1` near pi, within `tol`.
pub fn readout(th: &PhaseState, tol: f64) -> Result<ReadoutResult> {
    if !(tol > 0.0 && tol < PI / 4.0) {
        return Err(OimError::InvalidParam(format!("readout tolerance must lie in (0, pi/4), got {tol}")));
    }
    let mut worst: f64 = 0.0;
    let mut spins = Vec::with_capacity(th.len());
    for &t in th.as_slice() {
        let (d, s) = lattice_deviation(t);
        worst = worst.max(d);
        spins.push(s);
    }
    Ok(if worst <= tol {
        ReadoutResult::Binarized { spins: SpinConfig::new(spins).expect("±1 spins") }
    } else {
        ReadoutResult::NonBinarized { worst_deviation: worst }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTraceReport {
    /// Largest increase of `E` between consecutive samples (0 if none).
    pub max_increase: f64,
    pub pass: bool,
}

/// Checks that `E` never rises by more than `1e-8 max(1, |E|)` between samples.
pub fn energy_trace(traj: &Trajectory) -> EnergyTraceReport {
    let mut max_increase: f64 = 0.0;
    let mut pass = true;
    for pair in traj.energies.windows(2) {
        let inc = pair[1] - pair[0];
        max_increase = max_increase.max(inc);
        if inc > 1e-8 * pair[0].abs().max(1.0) {
            pass = false;
        }
    }
    EnergyTraceReport { max_increase, pass }
}

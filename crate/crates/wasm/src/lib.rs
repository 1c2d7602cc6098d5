//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; the page parses it and draws on a canvas.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use oim_core::dynamics::{integrate, readout, SimConfig};
use oim_core::model::{coupling_from_graph, generate_random_graph, ising_energy, load_graph};
use oim_core::rng::{rng_from_seed, trial_seed, uniform_phase};
use oim_core::stability::{largest_lyapunov, EnergyLevelStats, LandscapeSpectrum};
use oim_core::{CouplingMatrix, OimParams, PhaseState, Result};

/// Largest graph the page accepts; each node doubles the sweep time.
pub const MAX_DEMO_NODES: usize = 20;

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn js_err(e: oim_core::OimError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = randomGraph)]
pub fn random_graph(n: usize, m: usize, seed: u64) -> std::result::Result<String, JsError> {
    generate_random_graph(n, m, seed).map(|g| g.to_text()).map_err(js_err)
}

/// A parsed graph with its exhaustive stability landscape.
#[wasm_bindgen]
pub struct Landscape {
    w: CouplingMatrix,
    land: LandscapeSpectrum,
}

#[derive(Serialize)]
struct Curves {
    ks: Vec<f64>,
    /// lambda_L of each ground representative along `ks`.
    ground: Vec<Vec<f64>>,
    ground_h: f64,
    stable_counts: Vec<usize>,
    total: usize,
    critical: Vec<f64>,
}

impl Landscape {
    pub fn build(text: &str) -> Result<Self> {
        let g = load_graph(text)?;
        if g.n() > MAX_DEMO_NODES {
            return Err(oim_core::OimError::TooLarge { n: g.n() });
        }
        let w = coupling_from_graph(&g);
        let land = LandscapeSpectrum::compute(&w)?;
        Ok(Landscape { w, land })
    }

    pub fn curves(&self, k: f64, ks_max: f64, points: usize) -> Result<String> {
        OimParams::new(k, ks_max, 0.0)?;
        let points = points.clamp(2, 2000);
        let ks: Vec<f64> = (0..points).map(|i| ks_max * i as f64 / (points - 1) as f64).collect();
        let ground_ids = self.land.ground_indices();
        let ground = ground_ids.iter().map(|&c| ks.iter().map(|&s| self.land.lambda_l(c, k, s)).collect()).collect();
        Ok(to_json(&Curves {
            ground,
            ground_h: self.land.min_energy(),
            stable_counts: ks.iter().map(|&s| self.land.stable_count(k, s)).collect(),
            total: self.land.len(),
            critical: ground_ids.iter().map(|&c| self.land.critical_ks(c, k)).collect(),
            ks,
        }))
    }

    pub fn levels(&self, k: f64, ks: f64) -> Result<Vec<EnergyLevelStats>> {
        OimParams::new(k, ks, 0.0)?;
        Ok(self.land.level_stats(k, ks))
    }
}

#[wasm_bindgen]
impl Landscape {
    #[wasm_bindgen(constructor)]
    pub fn new(text: &str) -> std::result::Result<Landscape, JsError> {
        Landscape::build(text).map_err(js_err)
    }

    #[wasm_bindgen(getter)]
    pub fn nodes(&self) -> usize {
        self.w.n()
    }

    /// Ground-state lambda_L against K_s, plus stable-configuration counts.
    #[wasm_bindgen(js_name = lambdaCurves)]
    pub fn lambda_curves(&self, k: f64, ks_max: f64, points: usize) -> std::result::Result<String, JsError> {
        self.curves(k, ks_max, points).map_err(js_err)
    }

    /// Per-energy min/max of lambda_L at one K_s.
    #[wasm_bindgen(js_name = levelStats)]
    pub fn level_stats(&self, k: f64, ks: f64) -> std::result::Result<String, JsError> {
        self.levels(k, ks).map(|l| to_json(&l)).map_err(js_err)
    }
}

#[derive(Serialize)]
struct TraceOut {
    t: Vec<f64>,
    /// `theta[i]` is the phase history of oscillator `i`, wrapped to [-pi/2, 3pi/2).
    theta: Vec<Vec<f64>>,
    energy: Vec<f64>,
    binarized: bool,
    h: Option<f64>,
    lambda_l: Option<f64>,
}

/// One trajectory from the same random stream as trial 0 of a campaign.
pub fn trace_data(text: &str, k: f64, ks: f64, kn: f64, seed: u64, t_max: f64) -> Result<String> {
    let p = OimParams::new(k, ks, kn)?;
    let sim = SimConfig { t_max, record_stride: 20, ..SimConfig::default() };
    sim.validate()?;
    let g = load_graph(text)?;
    let w = coupling_from_graph(&g);
    let mut rng = rng_from_seed(trial_seed(seed, 0));
    let th0 = PhaseState((0..g.n()).map(|_| uniform_phase(&mut rng)).collect());
    let traj = integrate(&w, &p, &th0, &sim, Some(&mut rng))?;
    let wrap = |x: f64| (x + std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::TAU) - std::f64::consts::FRAC_PI_2;
    let theta = (0..g.n()).map(|i| traj.states.iter().map(|s| wrap(s.0[i])).collect()).collect();
    let result = readout(traj.final_state(), sim.readout_tol)?;
    let (h, lambda_l) = match result.spins() {
        Some(s) => (Some(ising_energy(&w, s)?), Some(largest_lyapunov(&w, &p, s)?)),
        None => (None, None),
    };
    Ok(to_json(&TraceOut { t: traj.times, theta, energy: traj.energies, binarized: result.is_binarized(), h, lambda_l }))
}

#[wasm_bindgen]
pub fn trace(text: &str, k: f64, ks: f64, kn: f64, seed: u64, t_max: f64) -> std::result::Result<String, JsError> {
    trace_data(text, k, ks, kn, seed, t_max).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "3 3\n1 2\n1 3\n2 3\n";

    #[test]
    fn triangle_curves() {
        let land = Landscape::build(TRIANGLE).unwrap();
        let v: serde_json::Value = serde_json::from_str(&land.curves(1.0, 1.0, 3).unwrap()).unwrap();
        assert_eq!(v["ks"], serde_json::json!([0.0, 0.5, 1.0]));
        assert_eq!(v["ground"].as_array().unwrap().len(), 3);
        for curve in v["ground"].as_array().unwrap() {
            let c: Vec<f64> = serde_json::from_value(curve.clone()).unwrap();
            assert!((c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12 && (c[2] + 1.0).abs() < 1e-12);
        }
        assert_eq!(v["stable_counts"], serde_json::json!([0, 0, 3]));
        assert_eq!(v["ground_h"], -1.0);
    }

    #[test]
    fn triangle_levels() {
        let land = Landscape::build(TRIANGLE).unwrap();
        let levels = land.levels(1.0, 0.8).unwrap();
        assert_eq!(levels.len(), 2);
        assert_eq!((levels[0].h, levels[0].n_stable), (-1.0, 3));
        assert!(land.levels(1.0, -0.1).is_err());
    }

    #[test]
    fn oversized_graphs_are_refused() {
        let text = generate_random_graph(21, 30, 0).unwrap().to_text();
        assert!(Landscape::build(&text).is_err());
    }

    #[test]
    fn trace_reaches_the_ground_state() {
        let v: serde_json::Value = serde_json::from_str(&trace_data(TRIANGLE, 1.0, 0.8, 0.005, 4, 100.0).unwrap()).unwrap();
        assert_eq!(v["binarized"], true);
        assert_eq!(v["h"], -1.0);
        let t = v["t"].as_array().unwrap().len();
        assert!(v["theta"].as_array().unwrap().iter().all(|row| row.as_array().unwrap().len() == t));
        assert!(trace_data(TRIANGLE, 1.0, 0.8, 0.005, 4, 0.0).is_err());
    }
}

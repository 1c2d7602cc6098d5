//! Numerical self-test used by `oim verify`.

use serde::Serialize;

use crate::dynamics::{energy_trace, integrate, SimConfig};
use crate::enumeration::{index_to_config, representative_count, verify_enumeration, ConfigIndex};
use crate::error::Result;
use crate::model::{coupling_from_graph, generate_random_graph, load_graph, lyapunov_energy, phase_velocity};
use crate::model::{CouplingMatrix, Graph, OimParams, PhaseState};
use crate::rng::{index_below, rng_from_seed, uniform_phase};
use crate::stability::{base_spectrum, jacobian, jacobian_binarized, symmetric_eigenvalues};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn outcome(name: &str, pass: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.into(), pass, detail }
}

/// Graphs checked when `verify` is run without a file.
pub fn builtin_graphs() -> Vec<(String, Graph)> {
    vec![
        ("single-edge".into(), load_graph("2 1\n1 2").expect("valid")),
        ("triangle".into(), load_graph("3 3\n1 2\n1 3\n2 3").expect("valid")),
        ("K4".into(), generate_random_graph(4, 6, 0).expect("valid")),
        ("G(10,22)".into(), generate_random_graph(10, 22, 1).expect("valid")),
    ]
}

fn random_phases(n: usize, rng: &mut crate::rng::OimRng) -> PhaseState {
    PhaseState((0..n).map(|_| uniform_phase(rng)).collect())
}

fn rel_err(got: f64, want: f64, scale: f64) -> f64 {
    (got - want).abs() / scale.max(1.0)
}

/// Runs every check on `g`; the returned list is in execution order.
pub fn run_checks(g: &Graph, seed: u64) -> Result<Vec<CheckOutcome>> {
    let w = coupling_from_graph(g);
    let n = w.n();
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();

    if n <= 16 {
        out.push(outcome("enumeration", verify_enumeration(&w)?, format!("{} configurations", representative_count(n))));
    } else {
        out.push(outcome("enumeration", true, format!("skipped (n = {n} > 16)")));
    }

    let p = OimParams::new(1.0, 0.7, 0.0)?;
    let step = 1e-5;
    let (mut worst_grad, mut worst_hess) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let th = random_phases(n, &mut rng);
        let (g_err, h_err) = derivative_errors(&w, &p, &th, step)?;
        worst_grad = worst_grad.max(g_err);
        worst_hess = worst_hess.max(h_err);
    }
    out.push(outcome("gradient", worst_grad <= 1e-6, format!("max rel. error {worst_grad:.3e}")));
    out.push(outcome("hessian", worst_hess <= 1e-5, format!("max rel. error {worst_hess:.3e}")));

    let total = representative_count(n);
    let sample: Vec<u64> = if n <= 12 {
        (0..total).collect()
    } else {
        (0..64).map(|_| index_below(&mut rng, total.min(u32::MAX as u64) as u32) as u64).collect()
    };
    let mut worst_shift = 0.0f64;
    let mut worst_row = 0.0f64;
    for idx in sample {
        let s = index_to_config(ConfigIndex(idx), n)?;
        let base = base_spectrum(&w, &s)?;
        for (k, ks) in [(1.0, 0.0), (0.5, 0.3), (2.0, 1.7)] {
            let p = OimParams::new(k, ks, 0.0)?;
            let j = jacobian_binarized(&w, &p, &s)?;
            let direct = symmetric_eigenvalues(&j)?;
            for (a, b) in direct.iter().zip(base.shifted(k, ks)) {
                worst_shift = worst_shift.max((a - b).abs());
            }
            for i in 0..n {
                worst_row = worst_row.max((j.row(i).iter().sum::<f64>() + 2.0 * ks).abs());
            }
        }
    }
    out.push(outcome("spectral-shift", worst_shift <= 1e-9, format!("max deviation {worst_shift:.3e}")));
    out.push(outcome("all-ones-eigenpair", worst_row <= 1e-12, format!("max row-sum error {worst_row:.3e}")));

    let sim = SimConfig { t_max: 20.0, ..SimConfig::default() };
    let th = random_phases(n, &mut rng);
    let traj = integrate(&w, &OimParams::new(1.0, 0.6, 0.0)?, &th, &sim, None)?;
    let report = energy_trace(&traj);
    out.push(outcome("dissipation", report.pass, format!("max energy increase {:.3e}", report.max_increase)));
    Ok(out)
}

/// Central-difference checks of `f = -(1/2) grad E` and `J = -(1/2) hess E`.
fn derivative_errors(w: &CouplingMatrix, p: &OimParams, th: &PhaseState, h: f64) -> Result<(f64, f64)> {
    let n = w.n();
    let e = |t: &PhaseState| lyapunov_energy(w, p, t);
    let f = phase_velocity(w, p, th)?;
    let j = jacobian(w, p, th)?;
    let mut grad_err = 0.0f64;
    for i in 0..n {
        let mut plus = th.clone();
        let mut minus = th.clone();
        plus.0[i] += h;
        minus.0[i] -= h;
        let fd = -0.5 * (e(&plus)? - e(&minus)?) / (2.0 * h);
        grad_err = grad_err.max(rel_err(fd, f[i], f[i].abs()));
    }
    // Hessian columns from differences of the analytic velocity (second-order accurate).
    let mut hess_err = 0.0f64;
    for k in 0..n {
        let mut plus = th.clone();
        let mut minus = th.clone();
        plus.0[k] += h;
        minus.0[k] -= h;
        let fp = phase_velocity(w, p, &plus)?;
        let fm = phase_velocity(w, p, &minus)?;
        for i in 0..n {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            hess_err = hess_err.max(rel_err(fd, j.get(i, k), j.get(i, k).abs()));
        }
    }
    Ok((grad_err, hess_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_suite_passes() {
        for (name, g) in builtin_graphs() {
            for c in run_checks(&g, 1).unwrap() {
                assert!(c.pass, "{name}: {c:?}");
            }
        }
    }
}

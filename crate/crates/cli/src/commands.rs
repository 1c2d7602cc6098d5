use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use oim_core::dynamics::{integrate, readout, SimConfig};
use oim_core::enumeration::{enumerate_energies, ground_states};
use oim_core::experiments::{ks_campaign, write_report, GraphProvenance, RunMetadata};
use oim_core::io::{fmt_num, write_critical_csv, write_histogram_csv, write_levels_csv, write_sweep_csv, write_trace_csv};
use oim_core::io::CriticalRow;
use oim_core::model::{coupling_from_graph, generate_random_graph, ising_energy, load_graph, maxcut_from_energy};
use oim_core::rng::{rng_from_seed, trial_seed, uniform_phase};
use oim_core::selfcheck::{builtin_graphs, run_checks};
use oim_core::stability::{largest_lyapunov, stability_sweep, ConfigSelection, LandscapeSpectrum};
use oim_core::{Graph, OimError, OimParams, PhaseState};

use crate::error::CliError;
use crate::DynArgs;

/// Upper bound on the number of K_s grid points accepted by `stability`.
const MAX_GRID: usize = 100_000;

type Result<T> = std::result::Result<T, CliError>;

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| OimError::io(path, e))?;
    Ok(load_graph(&text)?)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let io_err = |e| CliError::from(OimError::io(path, e));
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    f(&mut out).and_then(|_| out.flush()).map_err(io_err)
}

fn params(k: f64, ks: f64, kn: f64) -> Result<OimParams> {
    OimParams::new(k, ks, kn).map_err(|e| CliError::Usage(e.to_string()))
}

fn ks_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) {
        return Err(CliError::Usage("K_s grid bounds must be finite".into()));
    }
    if !(step > 0.0) || max < min || min < 0.0 {
        return Err(CliError::Usage(format!(
            "empty K_s grid: need 0 <= ks-min <= ks-max and ks-step > 0 (got {min}, {max}, {step})"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    if count > MAX_GRID {
        return Err(CliError::Usage(format!("K_s grid has {count} points, limit is {MAX_GRID}")));
    }
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

fn sim_config(a: &DynArgs) -> Result<SimConfig> {
    let mut sim = SimConfig::default();
    if let Some(dt) = a.dt {
        sim.dt = dt;
    }
    if let Some(t) = a.t_max {
        sim.t_max = t;
    }
    sim.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(sim)
}

pub fn gen(nodes: usize, edges: usize, seed: u64, out: &Path) -> Result<()> {
    let g = generate_random_graph(nodes, edges, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(out, |w| w.write_all(g.to_text().as_bytes()))?;
    println!("nodes {} edges {} total_weight {} density {}", g.n(), g.edges().len(), fmt_num(g.total_weight()), fmt_num(g.density()));
    Ok(())
}

pub fn enumerate(graph: &Path, out: &Path, full_count: bool) -> Result<()> {
    let g = read_graph(graph)?;
    let w = coupling_from_graph(&g);
    let hist = enumerate_energies(&w, full_count)?;
    let gs = ground_states(&w, 0)?;
    write_file(out, |f| write_histogram_csv(f, &hist))?;
    println!("min H {}", fmt_num(gs.min_h));
    println!("ground states {} (full count), {} (representatives)", gs.total, gs.representative_total());
    println!("max cut {}", fmt_num(maxcut_from_energy(&g, gs.min_h)));
    Ok(())
}

pub fn stability(graph: &Path, k: f64, grid: (f64, f64, f64), ground_only: bool, out: &Path) -> Result<()> {
    params(k, 0.0, 0.0)?;
    let ks_values = ks_grid(grid.0, grid.1, grid.2)?;
    let g = read_graph(graph)?;
    let w = coupling_from_graph(&g);
    let selection = if ground_only {
        ConfigSelection::List(ground_states(&w, usize::MAX)?.indices)
    } else {
        ConfigSelection::All
    };
    let rows = stability_sweep(&w, k, &ks_values, &selection)?;
    write_file(out, |f| write_sweep_csv(f, rows.iter().copied()))?;
    println!("{} rows ({} configurations x {} K_s values)", rows.len(), rows.len() / ks_values.len(), ks_values.len());
    Ok(())
}

pub fn levels(graph: &Path, k: f64, ks: f64, out: &Path) -> Result<()> {
    params(k, ks, 0.0)?;
    let g = read_graph(graph)?;
    let land = LandscapeSpectrum::compute(&coupling_from_graph(&g))?;
    let levels = land.level_stats(k, ks);
    write_file(out, |f| write_levels_csv(f, &levels))?;
    let ground = levels[0];
    println!(
        "ground level H {}: {} configurations, lambda_L in [{}, {}], {} stable",
        fmt_num(ground.h),
        ground.count,
        fmt_num(ground.lambda_min),
        fmt_num(ground.lambda_max),
        ground.n_stable
    );
    println!("stable configurations {} of {}", land.stable_count(k, ks), land.len());
    Ok(())
}

pub fn critical_ks(graph: &Path, k: f64, ground_only: bool, out: &Path) -> Result<()> {
    params(k, 0.0, 0.0)?;
    let g = read_graph(graph)?;
    let w = coupling_from_graph(&g);
    let (rows, ground) = if ground_only {
        let gs = ground_states(&w, usize::MAX)?;
        // lambda_L at K_s = 0 is K beta_1, twice the critical value
        let rows: Vec<CriticalRow> = stability_sweep(&w, k, &[0.0], &ConfigSelection::List(gs.indices))?
            .into_iter()
            .map(|r| CriticalRow { config: r.config, h: r.h, ks_critical: (r.lambda_l / 2.0).max(0.0) })
            .collect();
        (rows.clone(), rows)
    } else {
        let land = LandscapeSpectrum::compute(&w)?;
        let row = |c| CriticalRow { config: c, h: land.energy(c), ks_critical: land.critical_ks(c, k) };
        let rows = (0..land.len() as u64).map(|i| row(oim_core::enumeration::ConfigIndex(i))).collect();
        (rows, land.ground_indices().into_iter().map(row).collect())
    };
    write_file(out, |f| write_critical_csv(f, rows.iter().copied()))?;
    let min = ground.iter().map(|r| r.ks_critical).fold(f64::INFINITY, f64::min);
    let max = ground.iter().map(|r| r.ks_critical).fold(f64::NEG_INFINITY, f64::max);
    println!("ground states {}: critical K_s min {} max {}", ground.len(), fmt_num(min), fmt_num(max));
    Ok(())
}

pub fn trace(graph: &Path, a: &DynArgs, ks: f64, stride: u32, out: &Path) -> Result<()> {
    let p = params(a.k, ks, a.kn)?;
    let mut sim = sim_config(a)?;
    if stride == 0 {
        return Err(CliError::Usage("stride must be >= 1".into()));
    }
    sim.record_stride = stride;
    let g = read_graph(graph)?;
    let w = coupling_from_graph(&g);
    // same stream layout as trial 0 of `simulate`
    let mut rng = rng_from_seed(trial_seed(a.seed, 0));
    let th0 = PhaseState((0..g.n()).map(|_| uniform_phase(&mut rng)).collect());
    let traj = match integrate(&w, &p, &th0, &sim, Some(&mut rng)) {
        Ok(t) => t,
        Err(fail) => {
            write_file(out, |f| write_trace_csv(f, &fail.partial))?;
            return Err(OimError::from(fail).into());
        }
    };
    write_file(out, |f| write_trace_csv(f, &traj))?;
    let result = readout(traj.final_state(), sim.readout_tol)?;
    let mut footer = serde_json::json!({
        "readout": result,
        "steps": traj.steps,
        "converged": traj.converged,
    });
    if let Some(s) = result.spins() {
        footer["H"] = ising_energy(&w, s)?.into();
        footer["lambda_L"] = largest_lyapunov(&w, &p, s)?.into();
    }
    println!("{footer}");
    Ok(())
}

pub fn simulate(graph: &Path, a: &DynArgs, ks_values: &[f64], trials: u64, out: &Path) -> Result<()> {
    let base = params(a.k, 0.0, a.kn)?;
    for &ks in ks_values {
        params(a.k, ks, a.kn)?;
    }
    let dirs: Vec<String> = ks_values.iter().map(|&ks| format!("ks_{}", fmt_num(ks))).collect();
    if (1..dirs.len()).any(|i| dirs[..i].contains(&dirs[i])) {
        return Err(CliError::Usage("duplicate K_s values".into()));
    }
    if trials == 0 {
        return Err(CliError::Usage("at least one trial is required".into()));
    }
    let sim = sim_config(a)?;
    let g = read_graph(graph)?;
    let w = coupling_from_graph(&g);
    let runs = ks_campaign(&w, &base, ks_values, &sim, trials, a.seed)?;
    let provenance = GraphProvenance::new(&g, graph.display().to_string(), None);
    for (run, dir) in runs.iter().zip(&dirs) {
        let report = write_report(run, RunMetadata::new(run, provenance.clone()), &out.join(dir))?;
        let hist: Vec<String> = report.histogram.iter().map(|e| format!("{}:{}", fmt_num(e.h), e.count)).collect();
        println!(
            "K_s {}: success_rate {} ({}/{}), non-binarized {}, histogram [{}]",
            fmt_num(run.params.ks),
            fmt_num(report.success_rate),
            report.n_success,
            report.n_trials,
            report.n_nonbinarized,
            hist.join(" ")
        );
    }
    Ok(())
}

pub fn verify(graph: Option<&Path>, seed: u64) -> Result<()> {
    let graphs = match graph {
        Some(p) => vec![(p.display().to_string(), read_graph(p)?)],
        None => builtin_graphs(),
    };
    let mut first_failure = None;
    for (name, g) in &graphs {
        for c in run_checks(g, seed)? {
            println!("{} {name} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            if !c.pass && first_failure.is_none() {
                first_failure = Some(format!("{} on {name}", c.name));
            }
        }
    }
    first_failure.map_or(Ok(()), |f| Err(CliError::Verify(f)))
}

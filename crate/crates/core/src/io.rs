//! Plot-ready CSV emitters.
//!
//! Numbers are printed with at most 12 significant digits and trailing zeros
//! removed, so integer energies come out as plain integers (`-28`).

use std::io::{self, Write};

use crate::dynamics::Trajectory;
use crate::enumeration::{ConfigIndex, EnergyHistogram};
use crate::experiments::TrialResult;
use crate::stability::{EnergyLevelStats, SweepRow};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, shortest form.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let rounded: f64 = sci.parse().expect("valid float");
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{rounded:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_histogram_csv<W: Write>(mut out: W, hist: &EnergyHistogram) -> io::Result<()> {
    writeln!(out, "H,count")?;
    for (h, c) in hist.iter() {
        writeln!(out, "{},{c}", fmt_num(h))?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(mut out: W, rows: impl IntoIterator<Item = SweepRow>) -> io::Result<()> {
    writeln!(out, "config_index,H,ks,lambda_L")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.config.0, fmt_num(r.h), fmt_num(r.ks), fmt_num(r.lambda_l))?;
    }
    Ok(())
}

pub fn write_levels_csv<W: Write>(mut out: W, levels: &[EnergyLevelStats]) -> io::Result<()> {
    writeln!(out, "H,count,lambda_min,lambda_max,n_stable")?;
    for l in levels {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(l.h),
            l.count,
            fmt_num(l.lambda_min),
            fmt_num(l.lambda_max),
            l.n_stable
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRow {
    pub config: ConfigIndex,
    pub h: f64,
    pub ks_critical: f64,
}

pub fn write_critical_csv<W: Write>(mut out: W, rows: impl IntoIterator<Item = CriticalRow>) -> io::Result<()> {
    writeln!(out, "config_index,H,ks_critical")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.config.0, fmt_num(r.h), fmt_num(r.ks_critical))?;
    }
    Ok(())
}

pub fn write_trace_csv<W: Write>(mut out: W, traj: &Trajectory) -> io::Result<()> {
    let n = traj.states.first().map_or(0, |s| s.len());
    write!(out, "t")?;
    for i in 0..n {
        write!(out, ",theta_{i}")?;
    }
    writeln!(out, ",E")?;
    for ((t, s), e) in traj.times.iter().zip(&traj.states).zip(&traj.energies) {
        write!(out, "{}", fmt_num(*t))?;
        for th in s.as_slice() {
            write!(out, ",{}", fmt_num(*th))?;
        }
        writeln!(out, ",{}", fmt_num(*e))?;
    }
    Ok(())
}

pub fn write_trials_csv<W: Write>(mut out: W, trials: &[TrialResult]) -> io::Result<()> {
    writeln!(out, "trial,seed,converged,binarized,H,lambda_L,steps")?;
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    for t in trials {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            t.trial,
            t.seed,
            t.converged,
            t.readout.is_binarized(),
            opt(t.h),
            opt(t.final_lambda_l),
            t.steps
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(-28.0), "-28");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(1.0 - 2.0 * 0.8), "-0.6");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(2.220446049250313e-16), "2.22044604925e-16");
        assert_eq!(fmt_num(1.5e20), "1.5e20");
        assert_eq!(fmt_num(0.00012), "0.00012");
        assert_eq!(fmt_num(0.9999999999999998), "1");
    }
}

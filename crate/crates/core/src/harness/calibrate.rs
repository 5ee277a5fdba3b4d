//! Calibration of the truncation coefficient and of the plant's closed-loop
//! behaviour.
//!
//! The digital twin's box temperature uncertainty over an un-reset run grows
//! monotonically with `k_num`, so `k_num` is found by bisection against a
//! target standard deviation, either at the end of the run or at its peak over
//! the logged control cycles. The bracket is grown by doubling first.

use crate::error::{Error, Result};

use super::config::{Approach, ScenarioConfig};
use super::runner::{run_scenario, Event};

/// Which uncertainty of the un-reset run is matched to the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaStatistic {
    /// At `cfg.duration`.
    End,
    /// Largest over the logged control cycles and the final state.
    Peak,
}

impl std::str::FromStr for SigmaStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "end" => Ok(SigmaStatistic::End),
            "peak" => Ok(SigmaStatistic::Peak),
            other => Err(Error::InvalidConfig(format!("unknown statistic `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCalibration {
    pub k_num: f64,
    /// Box temperature standard deviation reached.
    pub sigma: f64,
    pub target: f64,
    pub statistic: SigmaStatistic,
    pub evaluations: usize,
}

/// Digital twin box temperature uncertainty of un-reset UADT runs with the
/// given `k_num`, maximised over the config's `runs`.
pub fn dt_sigma(cfg: &ScenarioConfig, k_num: f64, statistic: SigmaStatistic) -> Result<f64> {
    let mut c = cfg.clone();
    c.approach = Approach::Uadt;
    c.failure = None;
    c.solver.k_num = k_num;
    let mut worst = 0.0f64;
    for run_id in 0..c.runs as u64 {
        let out = run_scenario(&c, run_id)?;
        let end = out
            .final_dt
            .map(|s| s.t_box.std())
            .ok_or_else(|| Error::InvalidConfig("UADT run produced no digital twin state".into()))?;
        let sigma = match statistic {
            SigmaStatistic::End => end,
            SigmaStatistic::Peak => out.trace.iter().filter_map(|r| r.u_dt).fold(end, f64::max),
        };
        worst = worst.max(sigma);
    }
    Ok(worst)
}

/// Uncertainty at the end of an un-reset run.
pub fn end_sigma(cfg: &ScenarioConfig, k_num: f64) -> Result<f64> {
    dt_sigma(cfg, k_num, SigmaStatistic::End)
}

/// Bisect `k_num` until the chosen box uncertainty statistic is within
/// `rel_tol` of `target`.
pub fn calibrate_k_num(
    cfg: &ScenarioConfig,
    target: f64,
    statistic: SigmaStatistic,
    rel_tol: f64,
) -> Result<KCalibration> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidConfig(format!("calibration target must be positive, got {target}")));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidConfig(format!("relative tolerance must lie in (0, 1), got {rel_tol}")));
    }
    let mut evaluations = 0;
    let mut eval = |k: f64| {
        evaluations += 1;
        dt_sigma(cfg, k, statistic)
    };

    let floor = eval(0.0)?;
    if floor >= target {
        return Err(Error::InvalidConfig(format!(
            "target {target} is below the uncertainty reached without truncation error ({floor})"
        )));
    }
    // Converge from below so the target is never exceeded.
    let (mut lo, mut sigma_lo) = (0.0, floor);
    let mut hi = 1.0;
    let mut sigma_hi = eval(hi)?;
    while sigma_hi < target {
        (lo, sigma_lo) = (hi, sigma_hi);
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidConfig(format!("target {target} unreachable by k_num")));
        }
        sigma_hi = eval(hi)?;
    }
    for _ in 0..200 {
        if target - sigma_lo <= rel_tol * target {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let sigma = eval(mid)?;
        if sigma <= target {
            (lo, sigma_lo) = (mid, sigma);
        } else {
            hi = mid;
        }
    }
    let (k, sigma) = (lo, sigma_lo);
    Ok(KCalibration {
        k_num: k,
        sigma,
        target,
        statistic,
        evaluations,
    })
}

/// Closed-loop behaviour of the nominal ground truth plant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    pub i_heater: f64,
    /// Time of the first switch off, i.e. the end of the warm-up.
    pub warmup: f64,
    /// Mean time between consecutive switch-ons after warm-up (s).
    pub period: f64,
    /// Extremes of the box temperature after warm-up (°C).
    pub t_min: f64,
    pub t_max: f64,
    pub cycles: usize,
}

/// Measure warm-up, on/off period and band excursion of the GT approach with
/// nominal parameters.
pub fn oscillation(cfg: &ScenarioConfig) -> Result<Oscillation> {
    let mut c = cfg.clone();
    c.approach = Approach::Gt;
    c.failure = None;
    c.perturb_plant = false;
    let out = run_scenario(&c, 0)?;
    let warmup = out
        .trace
        .iter()
        .find(|r| r.event == Event::SwitchOff)
        .map(|r| r.time)
        .ok_or_else(|| Error::InvalidConfig("the box never reached the upper threshold".into()))?;
    let ons: Vec<f64> = out
        .trace
        .iter()
        .filter(|r| r.event == Event::SwitchOn && r.time > warmup)
        .map(|r| r.time)
        .collect();
    let period = if ons.len() >= 2 {
        (ons[ons.len() - 1] - ons[0]) / (ons.len() - 1) as f64
    } else {
        f64::NAN
    };
    let settled = out.trace.iter().filter(|r| r.time >= warmup);
    let (t_min, t_max) = settled.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.t_true), hi.max(r.t_true))
    });
    Ok(Oscillation {
        i_heater: c.plant.i_heater.mean(),
        warmup,
        period,
        t_min,
        t_max,
        cycles: ons.len().saturating_sub(1),
    })
}

/// [`oscillation`] for each heater current, keeping the current's relative
/// uncertainty.
pub fn scan_heater_current(cfg: &ScenarioConfig, currents: &[f64]) -> Result<Vec<Oscillation>> {
    let rel = cfg.plant.i_heater.std() / cfg.plant.i_heater.mean();
    currents
        .iter()
        .map(|&i| {
            let mut c = cfg.clone();
            c.plant.i_heater = crate::uncertain::UncertainReal::new(i, rel * i);
            oscillation(&c)
        })
        .collect()
}

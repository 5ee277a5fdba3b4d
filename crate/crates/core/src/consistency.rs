//! Consistency between uncertain values and between uncertain traces.
//!
//! Two values are compared through their `±k·σ` coverage intervals. The degree
//! of consistency is 1 when one interval contains the other, 0 when they are
//! disjoint, and the intersection-over-union ratio otherwise.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::uncertain::UncertainReal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyConfig {
    /// Coverage factor of the intervals.
    pub k: f64,
    /// Per-point degree required for trace consistency.
    pub c: f64,
    /// Degrees at or below this are inconsistent.
    pub r: f64,
    /// Consecutive inconsistent cycles needed to declare divergence.
    pub window: usize,
    /// Fraction of trace points that must reach `c`.
    pub coverage_ratio: f64,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        ConsistencyConfig {
            k: 2.0,
            c: 0.95,
            r: 0.05,
            window: 3,
            coverage_ratio: 1.0,
        }
    }
}

impl ConsistencyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("consistency.k must be positive, got {}", self.k));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return bad(format!("consistency.c must lie in (0, 1), got {}", self.c));
        }
        if !(self.r >= 0.0 && self.r < 1.0) {
            return bad(format!("consistency.r must lie in [0, 1), got {}", self.r));
        }
        if self.window == 0 {
            return bad("consistency.window must be at least 1".into());
        }
        if !(self.coverage_ratio > 0.0 && self.coverage_ratio <= 1.0) {
            return bad(format!(
                "consistency.coverage_ratio must lie in (0, 1], got {}",
                self.coverage_ratio
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport {
    pub time: f64,
    pub degree: f64,
    pub consistent: bool,
    pub diverged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceEvent {
    /// Time the debounce window completed.
    pub time: f64,
    /// First inconsistent time of the window.
    pub onset: f64,
}

/// Degree of consistency of two values with `±k·σ` intervals.
pub fn degree(v_p: UncertainReal, v_d: UncertainReal, k: f64) -> f64 {
    let (lo_p, hi_p) = v_p.interval(k);
    let (lo_d, hi_d) = v_d.interval(k);
    let p_in_d = lo_d <= lo_p && hi_p <= hi_d;
    let d_in_p = lo_p <= lo_d && hi_d <= hi_p;
    if p_in_d || d_in_p {
        return 1.0;
    }
    let overlap = hi_p.min(hi_d) - lo_p.max(lo_d);
    if overlap <= 0.0 {
        return 0.0;
    }
    let span = hi_p.max(hi_d) - lo_p.min(lo_d);
    (overlap / span).clamp(0.0, 1.0)
}

/// Strictly above the inconsistency threshold `cfg.r`.
pub fn consistent_values(v_p: UncertainReal, v_d: UncertainReal, cfg: &ConsistencyConfig) -> bool {
    degree(v_p, v_d, cfg.k) > cfg.r
}

/// A sample of an uncertain trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedValue {
    pub time: f64,
    pub value: UncertainReal,
}

const GRID_TOLERANCE: f64 = 1e-9;

/// Fraction of grid points whose degree reaches `cfg.c`, and whether that
/// fraction meets `cfg.coverage_ratio`.
pub fn trace_consistent(x: &[TimedValue], y: &[TimedValue], cfg: &ConsistencyConfig) -> Result<(bool, f64)> {
    if x.len() != y.len() {
        return Err(Error::MismatchedGrid(format!("{} vs {} samples", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("trace consistency"));
    }
    let mut hits = 0usize;
    for (a, b) in x.iter().zip(y) {
        if (a.time - b.time).abs() > GRID_TOLERANCE {
            return Err(Error::MismatchedGrid(format!("t = {} vs t = {}", a.time, b.time)));
        }
        if degree(a.value, b.value, cfg.k) >= cfg.c {
            hits += 1;
        }
    }
    let ratio = hits as f64 / x.len() as f64;
    Ok((ratio >= cfg.coverage_ratio, ratio))
}

/// Debounced divergence detection over a time-ordered stream of degrees.
///
/// Fires once, on the cycle that completes `window` consecutive degrees at or
/// below `r`.
#[derive(Debug, Clone)]
pub struct DivergenceDetector {
    cfg: ConsistencyConfig,
    recent: VecDeque<ConsistencyReport>,
    event: Option<DivergenceEvent>,
}

impl DivergenceDetector {
    pub fn new(cfg: ConsistencyConfig) -> Self {
        DivergenceDetector {
            recent: VecDeque::with_capacity(cfg.window),
            cfg,
            event: None,
        }
    }

    /// Compare the twins at `time` and feed the result to the detector.
    pub fn observe(&mut self, time: f64, v_p: UncertainReal, v_d: UncertainReal) -> ConsistencyReport {
        let d = degree(v_p, v_d, self.cfg.k);
        self.push(ConsistencyReport {
            time,
            degree: d,
            consistent: d > self.cfg.r,
            diverged: false,
        })
    }

    /// Feed a report; the returned copy has `diverged` set on the firing cycle.
    pub fn push(&mut self, mut report: ConsistencyReport) -> ConsistencyReport {
        if report.degree > self.cfg.r {
            self.recent.clear();
            return report;
        }
        if self.recent.len() == self.cfg.window {
            self.recent.pop_front();
        }
        self.recent.push_back(report);
        if self.event.is_none() && self.recent.len() == self.cfg.window {
            let onset = self.recent.front().map_or(report.time, |r| r.time);
            self.event = Some(DivergenceEvent {
                time: report.time,
                onset,
            });
            report.diverged = true;
        }
        report
    }

    pub fn event(&self) -> Option<DivergenceEvent> {
        self.event
    }
}

/// Run a detector over a complete report stream.
pub fn detect_divergence<I>(reports: I, cfg: &ConsistencyConfig) -> Option<DivergenceEvent>
where
    I: IntoIterator<Item = ConsistencyReport>,
{
    let mut detector = DivergenceDetector::new(*cfg);
    for report in reports {
        detector.push(report);
        if detector.event().is_some() {
            break;
        }
    }
    detector.event()
}

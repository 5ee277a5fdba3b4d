//! Inverse-variance fusion of the physical and digital twin box temperatures,
//! and the reliability-limit reset of the digital twin.

use crate::error::{Error, Result};
use crate::plant::{reset_state, PlantState};
use crate::uncertain::UncertainReal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    /// Largest acceptable DT box temperature uncertainty (°C).
    pub reliability_limit: f64,
    /// A reset fires once the DT uncertainty reaches `reset_margin · reliability_limit`.
    pub reset_margin: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            reliability_limit: 0.3,
            reset_margin: 0.9,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.reliability_limit > 0.0 && self.reliability_limit.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "fusion.reliability_limit must be positive, got {}",
                self.reliability_limit
            )));
        }
        if !(self.reset_margin > 0.0 && self.reset_margin <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fusion.reset_margin must lie in (0, 1], got {}",
                self.reset_margin
            )));
        }
        Ok(())
    }

    pub fn reset_threshold(&self) -> f64 {
        self.reset_margin * self.reliability_limit
    }
}

/// One mitigation cycle: the twins' estimates, their fusion, and whether the
/// DT was reset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionRecord {
    pub t_p: UncertainReal,
    pub t_d: UncertainReal,
    pub t_fused: UncertainReal,
    pub reset_triggered: bool,
    pub time: f64,
}

/// Inverse-variance weighted average of two independent estimates.
///
/// `mean = (σ_d²·m_p + σ_p²·m_d) / (σ_p² + σ_d²)`,
/// `σ² = σ_p²·σ_d² / (σ_p² + σ_d²)`. A crisp operand wins outright.
pub fn fuse(t_p: UncertainReal, t_d: UncertainReal) -> Result<UncertainReal> {
    match (t_p.is_crisp(), t_d.is_crisp()) {
        (true, true) if t_p.mean() == t_d.mean() => Ok(t_p),
        (true, true) => Err(Error::ContradictoryEvidence(t_p.mean(), t_d.mean())),
        (true, false) => Ok(t_p),
        (false, true) => Ok(t_d),
        (false, false) => {
            let (vp, vd) = (t_p.variance(), t_d.variance());
            let total = vp + vd;
            let mean = (vd * t_p.mean() + vp * t_d.mean()) / total;
            Ok(UncertainReal::new(mean, (vp * vd / total).sqrt()))
        }
    }
}

/// The DT is trusted while its uncertainty stays strictly below the limit.
pub fn is_reliable(t_d: UncertainReal, cfg: &FusionConfig) -> bool {
    t_d.std() < cfg.reliability_limit
}

/// Fuse the twins and reset the DT box temperature to the fused value when its
/// uncertainty has come too close to the reliability limit. The caller is
/// responsible for confirming that the two estimates are consistent.
pub fn mitigate_step(
    t_p: UncertainReal,
    t_d: UncertainReal,
    dt_state: &PlantState,
    cfg: &FusionConfig,
) -> Result<(UncertainReal, PlantState, FusionRecord)> {
    let fused = fuse(t_p, t_d)?;
    let reset_triggered = t_d.std() >= cfg.reset_threshold();
    let new_state = if reset_triggered {
        reset_state(dt_state, fused)?
    } else {
        *dt_state
    };
    let record = FusionRecord {
        t_p,
        t_d,
        t_fused: fused,
        reset_triggered,
        time: dt_state.time,
    };
    Ok((fused, new_state, record))
}

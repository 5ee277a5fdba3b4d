//! Bang-bang heater control, crisp and uncertainty-aware, with a safe-mode latch.

use crate::error::{Error, Result};
use crate::uncertain::{decide, lt_prob, UncertainReal};

/// Hysteresis band around the set-point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlBand {
    pub t_low: f64,
    pub t_high: f64,
    /// Confidence required by the uncertainty-aware controller.
    pub confidence: f64,
    pub rule: DecisionRule,
}

impl Default for ControlBand {
    fn default() -> Self {
        ControlBand {
            t_low: 36.0,
            t_high: 38.0,
            confidence: 0.95,
            rule: DecisionRule::Symmetric,
        }
    }
}

impl ControlBand {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_low < self.t_high) {
            return Err(Error::InvalidConfig(format!(
                "band.t_low ({}) must be below band.t_high ({})",
                self.t_low, self.t_high
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "band.confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

/// Which thresholds the uncertainty-aware controller tests probabilistically.
/// A threshold that is not tested probabilistically compares the mean crisply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionRule {
    Symmetric,
    OffOnly,
    OnOnly,
}

impl DecisionRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecisionRule::Symmetric => "symmetric",
            DecisionRule::OffOnly => "off_only",
            DecisionRule::OnOnly => "on_only",
        }
    }
}

impl std::str::FromStr for DecisionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(DecisionRule::Symmetric),
            "off_only" => Ok(DecisionRule::OffOnly),
            "on_only" => Ok(DecisionRule::OnOnly),
            other => Err(Error::InvalidConfig(format!("unknown decision rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    pub heater_on: bool,
    pub safe_mode: bool,
    pub last_decision_time: f64,
}

impl ControllerState {
    fn with_heater(self, heater_on: bool, time: f64) -> Self {
        if self.safe_mode {
            return ControllerState {
                last_decision_time: time,
                ..self
            };
        }
        ControllerState {
            heater_on,
            safe_mode: false,
            last_decision_time: time,
        }
    }
}

/// Crisp hysteresis control: off at or above `t_high`, on at or below `t_low`.
pub fn classical_decide(temp: f64, st: ControllerState, band: &ControlBand, time: f64) -> ControllerState {
    let heater_on = if temp >= band.t_high {
        false
    } else if temp <= band.t_low {
        true
    } else {
        st.heater_on
    };
    st.with_heater(heater_on, time)
}

/// Stochastic hysteresis control: switch only when the band is crossed with
/// at least `band.confidence` probability.
pub fn ua_decide(
    temp: UncertainReal,
    st: ControllerState,
    band: &ControlBand,
    time: f64,
) -> ControllerState {
    let high = UncertainReal::crisp(band.t_high);
    let low = UncertainReal::crisp(band.t_low);
    let (prob_off, prob_on) = match band.rule {
        DecisionRule::Symmetric => (true, true),
        DecisionRule::OffOnly => (true, false),
        DecisionRule::OnOnly => (false, true),
    };
    let above = if prob_off {
        decide(lt_prob(high, temp), band.confidence)
    } else {
        temp.mean() >= band.t_high
    };
    let below = if prob_on {
        decide(lt_prob(temp, low), band.confidence)
    } else {
        temp.mean() <= band.t_low
    };
    let heater_on = if above {
        false
    } else if below {
        true
    } else {
        st.heater_on
    };
    st.with_heater(heater_on, time)
}

/// Latch the controller into safe mode with the heater off. Absorbing.
pub fn enter_safe_mode(st: ControllerState) -> ControllerState {
    ControllerState {
        heater_on: false,
        safe_mode: true,
        ..st
    }
}

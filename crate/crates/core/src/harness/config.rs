use std::fmt;
use std::str::FromStr;

use crate::consistency::ConsistencyConfig;
use crate::control::ControlBand;
use crate::error::{Error, Result};
use crate::mitigation::FusionConfig;
use crate::plant::{PlantParams, SolverConfig};
use crate::sensing::SensorModel;

/// How the controller perceives the box temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Approach {
    /// Ground truth: classical control on the true temperature.
    Gt,
    /// Physical twin: classical control on averaged sensor readings.
    Pt,
    /// Uncertainty-aware physical twin: probabilistic control on the sensor average.
    Uapt,
    /// Uncertainty-aware digital twin: probabilistic control on the model output.
    Uadt,
    /// Mitigated digital twin system: fused twins with consistency gating.
    Mdts,
}

impl Approach {
    pub const ALL: [Approach; 5] = [
        Approach::Gt,
        Approach::Pt,
        Approach::Uapt,
        Approach::Uadt,
        Approach::Mdts,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Approach::Gt => "GT",
            Approach::Pt => "PT",
            Approach::Uapt => "UAPT",
            Approach::Uadt => "UADT",
            Approach::Mdts => "MDTS",
        }
    }

    /// Whether the approach integrates the digital twin.
    pub fn uses_dt(&self) -> bool {
        matches!(self, Approach::Uadt | Approach::Mdts)
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Approach::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown approach `{s}`")))
    }
}

/// When the digital twin learns the room temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoomSensorMode {
    /// From the first room reading only.
    InitOnly,
    /// From every room reading.
    EverySample,
}

impl RoomSensorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RoomSensorMode::InitOnly => "init_only",
            RoomSensorMode::EverySample => "every_sample",
        }
    }
}

impl FromStr for RoomSensorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "init_only" => Ok(RoomSensorMode::InitOnly),
            "every_sample" => Ok(RoomSensorMode::EverySample),
            other => Err(Error::InvalidConfig(format!("unknown room sensor mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSettings {
    /// Half-width of the uniform error band (°C).
    pub accuracy: f64,
    /// Number of box temperature sensors averaged by the physical twin.
    pub count: usize,
    pub room_mode: RoomSensorMode,
}

impl Default for SensorSettings {
    fn default() -> Self {
        SensorSettings {
            accuracy: 0.5,
            count: 2,
            room_mode: RoomSensorMode::InitOnly,
        }
    }
}

/// Insulation failure: `g_box` of the real plant is multiplied by `g_box_factor`
/// from `time` on. The digital twin is not told.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureSpec {
    pub time: f64,
    pub g_box_factor: f64,
}

impl Default for FailureSpec {
    fn default() -> Self {
        FailureSpec {
            time: 600.0,
            g_box_factor: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub approach: Approach,
    /// Run length (s).
    pub duration: f64,
    pub control_period: f64,
    pub sensor_period: f64,
    pub seed: u64,
    pub runs: usize,
    pub solver: SolverConfig,
    pub plant: PlantParams,
    /// Temperature of both plant nodes at t = 0 (°C).
    pub initial_temperature: f64,
    /// Draw the real plant's parameters from their uncertainty on every run.
    pub perturb_plant: bool,
    pub sensor: SensorSettings,
    pub band: ControlBand,
    pub fusion: FusionConfig,
    pub consistency: ConsistencyConfig,
    pub failure: Option<FailureSpec>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let plant = PlantParams::default();
        ScenarioConfig {
            approach: Approach::Mdts,
            duration: 2500.0,
            control_period: 3.0,
            sensor_period: 2.0,
            seed: 42,
            runs: 100,
            solver: SolverConfig::default(),
            initial_temperature: plant.t_room.mean(),
            plant,
            perturb_plant: true,
            sensor: SensorSettings::default(),
            band: ControlBand::default(),
            fusion: FusionConfig::default(),
            consistency: ConsistencyConfig::default(),
            failure: None,
        }
    }
}

/// Relative tolerance for a period to count as a whole number of solver steps.
const GRID_TOLERANCE: f64 = 1e-9;

fn steps_in(period: f64, h: f64) -> Option<usize> {
    let ratio = period / h;
    let n = ratio.round();
    (n >= 1.0 && (ratio - n).abs() <= GRID_TOLERANCE * n).then_some(n as usize)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        self.solver.validate()?;
        self.plant.validate()?;
        self.band.validate()?;
        self.fusion.validate()?;
        self.consistency.validate()?;
        self.sensor_model()?;

        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        for (name, p) in [("control_period", self.control_period), ("sensor_period", self.sensor_period)] {
            if !(p > 0.0 && p.is_finite()) {
                return bad(format!("{name} must be positive, got {p}"));
            }
            if steps_in(p, self.solver.h).is_none() {
                return bad(format!(
                    "{name} = {p} s is not a whole number of solver steps (h = {} s)",
                    self.solver.h
                ));
            }
        }
        if steps_in(self.duration, self.solver.h).is_none() {
            return bad(format!(
                "duration = {} s is not a whole number of solver steps (h = {} s)",
                self.duration, self.solver.h
            ));
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.sensor.count == 0 {
            return bad("sensor.count must be at least 1".into());
        }
        if !self.initial_temperature.is_finite() {
            return bad("plant.initial_temperature must be finite".into());
        }

        let mut worst = vec![self.plant];
        if let Some(f) = self.failure {
            if !(f.time >= 0.0 && f.time <= self.duration) {
                return bad(format!(
                    "failure.time = {} s lies outside the run [0, {}]",
                    f.time, self.duration
                ));
            }
            if !(f.g_box_factor > 1.0 && f.g_box_factor.is_finite()) {
                return bad(format!("failure.g_box_factor must exceed 1, got {}", f.g_box_factor));
            }
            worst.push(self.plant.with_g_box_factor(f.g_box_factor));
        }
        for p in worst {
            let bound = p.euler_stability_bound();
            if self.solver.h >= bound {
                return bad(format!(
                    "solver.h = {} s exceeds the Euler stability bound {bound:.6} s",
                    self.solver.h
                ));
            }
        }
        Ok(())
    }

    pub fn sensor_model(&self) -> Result<SensorModel> {
        SensorModel::new(self.sensor.accuracy, self.sensor_period)
    }

    /// Number of solver steps in a run. Assumes a validated config.
    pub fn total_steps(&self) -> usize {
        steps_in(self.duration, self.solver.h).unwrap_or(0)
    }

    pub fn control_every(&self) -> usize {
        steps_in(self.control_period, self.solver.h).unwrap_or(1)
    }

    pub fn sensor_every(&self) -> usize {
        steps_in(self.sensor_period, self.solver.h).unwrap_or(1)
    }

    /// Solver step at which the failure is injected, if any.
    pub fn failure_step(&self) -> Option<usize> {
        self.failure.map(|f| (f.time / self.solver.h).round() as usize)
    }
}

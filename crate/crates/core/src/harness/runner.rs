//! A single co-simulation run.
//!
//! The real plant (ground truth) is stepped with RK4 on a base grid of `h`
//! seconds. Sensors fire every `sensor_period`, the controller every
//! `control_period`; both are whole multiples of `h`. At each base step the
//! order is: inject failure, sample sensors, run the control cycle, then
//! advance the real plant and the digital twin under the current heater
//! command.

use rand_distr::{Distribution, Normal};

use crate::consistency::{DivergenceDetector, DivergenceEvent};
use crate::control::{classical_decide, enter_safe_mode, ua_decide, ControllerState};
use crate::error::{Error, Result};
use crate::mitigation::{mitigate_step, FusionRecord};
use crate::plant::{step_dt, step_gt, PlantParams, PlantState};
use crate::sensing::{average, sample, to_uncertain, SensorId};
use crate::uncertain::UncertainReal;

use super::config::{Approach, RoomSensorMode, ScenarioConfig};
use super::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    None,
    SwitchOn,
    SwitchOff,
    Reset,
    Diverged,
    SafeMode,
}

impl Event {
    pub fn as_str(&self) -> &'static str {
        match self {
            Event::None => "NONE",
            Event::SwitchOn => "SWITCH_ON",
            Event::SwitchOff => "SWITCH_OFF",
            Event::Reset => "RESET",
            Event::Diverged => "DIVERGED",
            Event::SafeMode => "SAFE_MODE",
        }
    }

    pub fn parse(s: &str) -> Option<Event> {
        [
            Event::None,
            Event::SwitchOn,
            Event::SwitchOff,
            Event::Reset,
            Event::Diverged,
            Event::SafeMode,
        ]
        .into_iter()
        .find(|e| e.as_str() == s)
    }

    /// A row carries one event; the more important one wins.
    fn priority(&self) -> u8 {
        match self {
            Event::None => 0,
            Event::SwitchOn | Event::SwitchOff => 1,
            Event::Reset => 2,
            Event::SafeMode => 3,
            Event::Diverged => 4,
        }
    }

    fn max(self, other: Event) -> Event {
        if other.priority() > self.priority() {
            other
        } else {
            self
        }
    }
}

/// One control cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub time: f64,
    pub t_true: f64,
    /// Temperature the controller acted on.
    pub perceived: UncertainReal,
    /// Uncertainty of the averaged sensor reading (U′).
    pub u_pt: Option<f64>,
    /// Digital twin box temperature uncertainty before mitigation (U).
    pub u_dt: Option<f64>,
    /// Uncertainty of the fused estimate (μ), when fusion took place.
    pub u_mitigated: Option<f64>,
    /// Heater command after the cycle.
    pub heater_on: bool,
    pub event: Event,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchError {
    pub run_id: u64,
    pub approach: Approach,
    pub switch_time: f64,
    pub perceived: f64,
    pub actual: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub run_id: u64,
    pub approach: Approach,
    pub trace: Vec<TraceRow>,
    pub switch_errors: Vec<SwitchError>,
    pub fusions: Vec<FusionRecord>,
    pub divergence: Option<DivergenceEvent>,
    /// Real plant parameters of this run, before any failure.
    pub gt_params: PlantParams,
    pub final_gt: PlantState,
    /// Final digital twin state, for approaches that integrate it.
    pub final_dt: Option<PlantState>,
}

/// Real plant parameters for a run: nominal, or drawn from the parameter
/// uncertainty when `perturb_plant` is set. The room temperature stays nominal.
pub fn draw_plant(cfg: &ScenarioConfig, run_id: u64) -> Result<PlantParams> {
    let nominal = cfg.plant.crisp();
    if !cfg.perturb_plant {
        return Ok(nominal);
    }
    let mut rng = substream(cfg.seed, run_id, "plant_params");
    let mut draw = |u: UncertainReal| -> Result<UncertainReal> {
        if u.is_crisp() {
            return Ok(UncertainReal::crisp(u.mean()));
        }
        let v = Normal::new(u.mean(), u.std())
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .sample(&mut rng);
        if v <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "drawn plant parameter {v} is not positive (from {u})"
            )));
        }
        Ok(UncertainReal::crisp(v))
    };
    let p = &cfg.plant;
    Ok(PlantParams {
        c_air: draw(p.c_air)?,
        g_box: draw(p.g_box)?,
        c_heater: draw(p.c_heater)?,
        g_heater: draw(p.g_heater)?,
        v_heater: draw(p.v_heater)?,
        i_heater: draw(p.i_heater)?,
        t_room: nominal.t_room,
    })
}

/// Execute one run of `cfg.approach`. Bit-identical for identical inputs.
pub fn run_scenario(cfg: &ScenarioConfig, run_id: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let approach = cfg.approach;
    let h = cfg.solver.h;
    let n_steps = cfg.total_steps();
    let control_every = cfg.control_every();
    let sensor_every = cfg.sensor_every();
    let fail_step = cfg.failure_step();
    let sensor_model = cfg.sensor_model()?;

    let base_params = draw_plant(cfg, run_id)?;
    let mut gt_params = base_params;
    let mut gt = PlantState::at_temperature(cfg.initial_temperature);

    let mut dt_params = cfg.plant;
    let mut dt = PlantState {
        t_box: UncertainReal::new(cfg.initial_temperature, cfg.solver.sigma_init),
        t_heater: UncertainReal::new(cfg.initial_temperature, cfg.solver.sigma_init),
        time: 0.0,
    };

    let box_ids: Vec<SensorId> = (0..cfg.sensor.count).map(|i| SensorId::Box(i as u8)).collect();
    let mut box_rngs: Vec<_> = box_ids
        .iter()
        .map(|id| substream(cfg.seed, run_id, &id.stream_name()))
        .collect();
    let mut room_rng = substream(cfg.seed, run_id, &SensorId::Room.stream_name());
    let mut box_readings = vec![UncertainReal::default(); box_ids.len()];

    let mut ctrl = ControllerState::default();
    let mut detector = DivergenceDetector::new(cfg.consistency);
    let mut pending_safe_mode = false;

    let mut trace = Vec::with_capacity(n_steps / control_every + 1);
    let mut switch_errors = Vec::new();
    let mut fusions = Vec::new();

    for k in 0..=n_steps {
        let time = k as f64 * h;

        if Some(k) == fail_step {
            if let Some(f) = cfg.failure {
                gt_params = base_params.with_g_box_factor(f.g_box_factor);
            }
        }

        if k % sensor_every == 0 {
            let truth = gt.t_box.mean();
            for ((slot, id), rng) in box_readings.iter_mut().zip(&box_ids).zip(box_rngs.iter_mut()) {
                let reading = sample(truth, time, *id, &sensor_model, rng);
                *slot = to_uncertain(&reading, &sensor_model);
            }
            let room = sample(gt_params.t_room.mean(), time, SensorId::Room, &sensor_model, &mut room_rng);
            if k == 0 || cfg.sensor.room_mode == RoomSensorMode::EverySample {
                dt_params.t_room = to_uncertain(&room, &sensor_model);
            }
        }

        if k % control_every == 0 {
            let t_true = gt.t_box.mean();
            let t_p = average(&box_readings)?;
            let mut event = Event::None;

            if pending_safe_mode && !ctrl.safe_mode {
                ctrl = enter_safe_mode(ctrl);
                event = event.max(Event::SafeMode);
            }

            let mut u_pt = None;
            let mut u_dt = None;
            let mut u_mitigated = None;
            let perceived = match approach {
                Approach::Gt => UncertainReal::crisp(t_true),
                Approach::Pt => {
                    u_pt = Some(t_p.std());
                    UncertainReal::crisp(t_p.mean())
                }
                Approach::Uapt => {
                    u_pt = Some(t_p.std());
                    t_p
                }
                Approach::Uadt => {
                    u_dt = Some(dt.t_box.std());
                    dt.t_box
                }
                Approach::Mdts => {
                    let t_d = dt.t_box;
                    u_pt = Some(t_p.std());
                    u_dt = Some(t_d.std());
                    let report = detector.observe(time, t_p, t_d);
                    if report.diverged {
                        pending_safe_mode = true;
                        event = event.max(Event::Diverged);
                    }
                    if report.consistent {
                        let (fused, next, mut record) = mitigate_step(t_p, t_d, &dt, &cfg.fusion)?;
                        record.time = time;
                        if record.reset_triggered {
                            event = event.max(Event::Reset);
                        }
                        dt = next;
                        u_mitigated = Some(fused.std());
                        fusions.push(record);
                        fused
                    } else {
                        t_p
                    }
                }
            };

            let before = ctrl;
            ctrl = match approach {
                Approach::Gt | Approach::Pt => classical_decide(perceived.mean(), ctrl, &cfg.band, time),
                _ => ua_decide(perceived, ctrl, &cfg.band, time),
            };
            if ctrl.heater_on != before.heater_on && !ctrl.safe_mode {
                event = event.max(if ctrl.heater_on { Event::SwitchOn } else { Event::SwitchOff });
                switch_errors.push(SwitchError {
                    run_id,
                    approach,
                    switch_time: time,
                    perceived: perceived.mean(),
                    actual: t_true,
                    error: perceived.mean() - t_true,
                });
            }

            trace.push(TraceRow {
                time,
                t_true,
                perceived,
                u_pt,
                u_dt,
                u_mitigated,
                heater_on: ctrl.heater_on,
                event,
            });
        }

        if k == n_steps {
            break;
        }
        let next_time = (k + 1) as f64 * h;
        gt = step_gt(&gt, ctrl.heater_on, &gt_params, h);
        gt.time = next_time;
        if approach.uses_dt() {
            dt = step_dt(&dt, ctrl.heater_on, &dt_params, &cfg.solver)?;
            dt.time = next_time;
        }
        if !gt.t_box.is_finite() || !gt.t_heater.is_finite() {
            return Err(Error::SimulationFault {
                time: next_time,
                detail: "non-finite ground truth state".into(),
            });
        }
    }

    Ok(RunOutput {
        run_id,
        approach,
        trace,
        switch_errors,
        fusions,
        divergence: detector.event(),
        gt_params: base_params,
        final_gt: gt,
        final_dt: approach.uses_dt().then_some(dt),
    })
}

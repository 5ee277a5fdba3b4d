//! Scenario files.
//!
//! A scenario is a flat list of `key = value` lines. Blank lines and text after
//! `#` are ignored. Uncertain plant parameters are written `mean +/- std`; a
//! bare number is crisp. Keys left out keep their defaults, unknown or repeated
//! keys are errors. Any `failure.*` key enables failure injection.
//!
//! ```text
//! approach = MDTS
//! duration = 2500
//! solver.h = 0.1
//! plant.g_box = 0.79154106 +/- 0.0237462318
//! failure.time = 600
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::uncertain::UncertainReal;

use super::config::{FailureSpec, ScenarioConfig};

fn parse_num<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}` as a number"))
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got `{value}`")),
    }
}

fn parse_uncertain(value: &str) -> std::result::Result<UncertainReal, String> {
    match value.split_once("+/-") {
        Some((m, s)) => {
            let mean: f64 = parse_num(m.trim())?;
            let std: f64 = parse_num(s.trim())?;
            UncertainReal::try_new(mean, std).map_err(|e| e.to_string())
        }
        None => Ok(UncertainReal::crisp(parse_num(value)?)),
    }
}

fn set(cfg: &mut ScenarioConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    let config_err = |e: Error| e.to_string();
    match key {
        "approach" => cfg.approach = value.parse().map_err(config_err)?,
        "duration" => cfg.duration = parse_num(value)?,
        "control_period" => cfg.control_period = parse_num(value)?,
        "sensor_period" => cfg.sensor_period = parse_num(value)?,
        "seed" => cfg.seed = parse_num(value)?,
        "runs" => cfg.runs = parse_num(value)?,

        "solver.h" => cfg.solver.h = parse_num(value)?,
        "solver.k_num" => cfg.solver.k_num = parse_num(value)?,
        "solver.sigma_init" => cfg.solver.sigma_init = parse_num(value)?,

        "plant.c_air" => cfg.plant.c_air = parse_uncertain(value)?,
        "plant.g_box" => cfg.plant.g_box = parse_uncertain(value)?,
        "plant.c_heater" => cfg.plant.c_heater = parse_uncertain(value)?,
        "plant.g_heater" => cfg.plant.g_heater = parse_uncertain(value)?,
        "plant.v_heater" => cfg.plant.v_heater = parse_uncertain(value)?,
        "plant.i_heater" => cfg.plant.i_heater = parse_uncertain(value)?,
        "plant.t_room" => cfg.plant.t_room = parse_uncertain(value)?,
        "plant.initial_temperature" => cfg.initial_temperature = parse_num(value)?,
        "plant.perturb" => cfg.perturb_plant = parse_bool(value)?,

        "sensor.accuracy" => cfg.sensor.accuracy = parse_num(value)?,
        "sensor.count" => cfg.sensor.count = parse_num(value)?,
        "sensor.room_mode" => cfg.sensor.room_mode = value.parse().map_err(config_err)?,

        "band.t_low" => cfg.band.t_low = parse_num(value)?,
        "band.t_high" => cfg.band.t_high = parse_num(value)?,
        "band.confidence" => cfg.band.confidence = parse_num(value)?,
        "band.rule" => cfg.band.rule = value.parse().map_err(config_err)?,

        "fusion.reliability_limit" => cfg.fusion.reliability_limit = parse_num(value)?,
        "fusion.reset_margin" => cfg.fusion.reset_margin = parse_num(value)?,

        "consistency.k" => cfg.consistency.k = parse_num(value)?,
        "consistency.c" => cfg.consistency.c = parse_num(value)?,
        "consistency.r" => cfg.consistency.r = parse_num(value)?,
        "consistency.window" => cfg.consistency.window = parse_num(value)?,
        "consistency.coverage_ratio" => cfg.consistency.coverage_ratio = parse_num(value)?,

        "failure.time" => cfg.failure.get_or_insert_with(FailureSpec::default).time = parse_num(value)?,
        "failure.g_box_factor" => {
            cfg.failure.get_or_insert_with(FailureSpec::default).g_box_factor = parse_num(value)?
        }
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

/// Parse scenario text. `origin` only labels error messages.
pub fn parse(text: &str, origin: &Path) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: idx + 1,
            msg,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        set(&mut cfg, key, value).map_err(err)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, path)
}

fn uncertain(u: UncertainReal) -> String {
    if u.is_crisp() {
        format!("{}", u.mean())
    } else {
        format!("{} +/- {}", u.mean(), u.std())
    }
}

/// Render a config in the scenario file format. Floats use the shortest
/// representation that parses back to the same value.
pub fn render(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("approach", cfg.approach.to_string());
    kv("duration", cfg.duration.to_string());
    kv("control_period", cfg.control_period.to_string());
    kv("sensor_period", cfg.sensor_period.to_string());
    kv("seed", cfg.seed.to_string());
    kv("runs", cfg.runs.to_string());
    kv("solver.h", cfg.solver.h.to_string());
    kv("solver.k_num", cfg.solver.k_num.to_string());
    kv("solver.sigma_init", cfg.solver.sigma_init.to_string());
    kv("plant.c_air", uncertain(cfg.plant.c_air));
    kv("plant.g_box", uncertain(cfg.plant.g_box));
    kv("plant.c_heater", uncertain(cfg.plant.c_heater));
    kv("plant.g_heater", uncertain(cfg.plant.g_heater));
    kv("plant.v_heater", uncertain(cfg.plant.v_heater));
    kv("plant.i_heater", uncertain(cfg.plant.i_heater));
    kv("plant.t_room", uncertain(cfg.plant.t_room));
    kv("plant.initial_temperature", cfg.initial_temperature.to_string());
    kv("plant.perturb", cfg.perturb_plant.to_string());
    kv("sensor.accuracy", cfg.sensor.accuracy.to_string());
    kv("sensor.count", cfg.sensor.count.to_string());
    kv("sensor.room_mode", cfg.sensor.room_mode.as_str().to_string());
    kv("band.t_low", cfg.band.t_low.to_string());
    kv("band.t_high", cfg.band.t_high.to_string());
    kv("band.confidence", cfg.band.confidence.to_string());
    kv("band.rule", cfg.band.rule.as_str().to_string());
    kv("fusion.reliability_limit", cfg.fusion.reliability_limit.to_string());
    kv("fusion.reset_margin", cfg.fusion.reset_margin.to_string());
    kv("consistency.k", cfg.consistency.k.to_string());
    kv("consistency.c", cfg.consistency.c.to_string());
    kv("consistency.r", cfg.consistency.r.to_string());
    kv("consistency.window", cfg.consistency.window.to_string());
    kv("consistency.coverage_ratio", cfg.consistency.coverage_ratio.to_string());
    if let Some(f) = cfg.failure {
        kv("failure.time", f.time.to_string());
        kv("failure.g_box_factor", f.g_box_factor.to_string());
    }
    s
}

pub fn save(cfg: &ScenarioConfig, path: impl AsRef<Path>) -> Result<()> {
    let path: PathBuf = path.as_ref().to_path_buf();
    std::fs::write(&path, render(cfg)).map_err(|e| Error::io(path, e))
}

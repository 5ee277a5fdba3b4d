//! Synthetic temperature sensors over the measurand.

use rand::Rng;

use crate::error::{Error, Result};
use crate::uncertain::UncertainReal;

/// Datasheet description of a temperature sensor.
///
/// The accuracy is the half-width of a uniform error band, so the standard
/// uncertainty is `accuracy / √3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    accuracy: f64,
    period: f64,
}

impl SensorModel {
    pub fn new(accuracy: f64, period: f64) -> Result<Self> {
        if !(accuracy >= 0.0 && accuracy.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sensor accuracy must be non-negative, got {accuracy}"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidConfig(format!("sensor period must be positive, got {period}")));
        }
        Ok(SensorModel { accuracy, period })
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn std(&self) -> f64 {
        self.accuracy / 3f64.sqrt()
    }
}

impl Default for SensorModel {
    /// ±0.5 °C read every 2 s.
    fn default() -> Self {
        SensorModel {
            accuracy: 0.5,
            period: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SensorId {
    Box(u8),
    Room,
}

impl SensorId {
    /// Name of the random substream feeding this sensor.
    pub fn stream_name(&self) -> String {
        match self {
            SensorId::Box(i) => format!("sensor/box/{i}"),
            SensorId::Room => "sensor/room".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorReading {
    pub raw: f64,
    pub timestamp: f64,
    pub sensor_id: SensorId,
}

/// Read `truth_temp` through a sensor with uniform error in `±accuracy`.
pub fn sample<R: Rng + ?Sized>(
    truth_temp: f64,
    timestamp: f64,
    sensor_id: SensorId,
    model: &SensorModel,
    rng: &mut R,
) -> SensorReading {
    let noise = if model.accuracy > 0.0 {
        rng.gen_range(-model.accuracy..=model.accuracy)
    } else {
        0.0
    };
    SensorReading {
        raw: truth_temp + noise,
        timestamp,
        sensor_id,
    }
}

pub fn to_uncertain(reading: &SensorReading, model: &SensorModel) -> UncertainReal {
    UncertainReal::new(reading.raw, model.std())
}

/// Mean of independent readings: `std = sqrt(Σσᵢ²) / n`.
pub fn average(readings: &[UncertainReal]) -> Result<UncertainReal> {
    if readings.is_empty() {
        return Err(Error::EmptyInput("sensor averaging"));
    }
    let n = readings.len() as f64;
    let sum = readings.iter().map(|r| r.mean()).sum::<f64>();
    let var = readings.iter().map(|r| r.variance()).sum::<f64>();
    Ok(UncertainReal::new(sum / n, var.sqrt() / n))
}

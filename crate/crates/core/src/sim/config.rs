use thiserror::Error;

use crate::collection::Algorithm;
use crate::potential::PotentialMode;
use crate::DeviceId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceSelector {
    Rightmost,
    Leftmost,
    Device(DeviceId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceEntry {
    pub time: f64,
    pub selector: SourceSelector,
}

/// How the variability knob maps onto motion and timing noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    /// Waypoint speed at variability 1, m/s.
    pub max_speed: f64,
    /// Per-round teleport probability at variability 1.
    pub teleport_rate: f64,
    /// Half-width of the rate and jitter multipliers at variability 1.
    pub jitter: f64,
}

impl Default for Dynamics {
    fn default() -> Self {
        Dynamics {
            // walking pace; at 5 m/s a device crosses half the radius per round
            max_speed: 1.0,
            teleport_rate: 0.01,
            jitter: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub device_count: usize,
    pub corridor_length: f64,
    pub corridor_width: f64,
    pub radius: f64,
    pub mean_period: f64,
    pub duration: f64,
    pub variability: f64,
    pub source_schedule: Vec<SourceEntry>,
    pub seed: u64,
    pub potential_mode: PotentialMode,
    pub staleness_bound: f64,
    pub dynamics: Dynamics,
    pub algorithms: Vec<Algorithm>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("`{field}` must be {requirement}, got {value}")]
    OutOfRange {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("source schedule must be non-empty, sorted by time and start at 0")]
    BadSchedule,
    #[error("source device {0} does not exist")]
    UnknownSource(DeviceId),
    #[error("at least one algorithm must be enabled")]
    NoAlgorithms,
}

impl ScenarioConfig {
    /// 250 devices in a 100 m × 10 m corridor, source moved at 200 s.
    pub fn desk() -> Self {
        ScenarioConfig {
            device_count: 250,
            corridor_length: 100.0,
            corridor_width: 10.0,
            radius: 10.0,
            mean_period: 1.0,
            duration: 400.0,
            variability: 0.0,
            source_schedule: Self::switch_schedule(200.0),
            seed: 1,
            potential_mode: PotentialMode::Oracle,
            staleness_bound: 2.5,
            dynamics: Dynamics::default(),
            algorithms: Algorithm::ALL.to_vec(),
        }
    }

    /// 1000 devices in a 200 m × 20 m corridor.
    pub fn paper() -> Self {
        ScenarioConfig {
            device_count: 1000,
            corridor_length: 200.0,
            corridor_width: 20.0,
            ..Self::desk()
        }
    }

    /// Source at the right end, moved to the left end at `at` seconds.
    pub fn switch_schedule(at: f64) -> Vec<SourceEntry> {
        vec![
            SourceEntry {
                time: 0.0,
                selector: SourceSelector::Rightmost,
            },
            SourceEntry {
                time: at,
                selector: SourceSelector::Leftmost,
            },
        ]
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        fn positive(field: &'static str, value: f64) -> Result<(), ScenarioError> {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(ScenarioError::OutOfRange {
                    field,
                    requirement: "positive and finite",
                    value,
                })
            }
        }
        if self.device_count == 0 {
            return Err(ScenarioError::OutOfRange {
                field: "device_count",
                requirement: "at least 1",
                value: 0.0,
            });
        }
        positive("corridor_length", self.corridor_length)?;
        positive("corridor_width", self.corridor_width)?;
        positive("radius", self.radius)?;
        positive("mean_period", self.mean_period)?;
        positive("duration", self.duration)?;
        positive("staleness_bound", self.staleness_bound)?;
        if !(0.0..=1.0).contains(&self.variability) {
            return Err(ScenarioError::OutOfRange {
                field: "variability",
                requirement: "within [0, 1]",
                value: self.variability,
            });
        }
        let d = &self.dynamics;
        if !(d.max_speed >= 0.0 && d.max_speed.is_finite()) {
            return Err(ScenarioError::OutOfRange {
                field: "max_speed",
                requirement: "non-negative",
                value: d.max_speed,
            });
        }
        if !(0.0..=1.0).contains(&d.teleport_rate) {
            return Err(ScenarioError::OutOfRange {
                field: "teleport_rate",
                requirement: "within [0, 1]",
                value: d.teleport_rate,
            });
        }
        if !(0.0..1.0).contains(&d.jitter) {
            return Err(ScenarioError::OutOfRange {
                field: "jitter",
                requirement: "within [0, 1)",
                value: d.jitter,
            });
        }
        let schedule = &self.source_schedule;
        if schedule.first().map(|e| e.time) != Some(0.0)
            || schedule.windows(2).any(|w| w[0].time > w[1].time)
        {
            return Err(ScenarioError::BadSchedule);
        }
        for e in schedule {
            if let SourceSelector::Device(id) = e.selector {
                if id.index() >= self.device_count {
                    return Err(ScenarioError::UnknownSource(id));
                }
            }
        }
        if self.algorithms.is_empty() {
            return Err(ScenarioError::NoAlgorithms);
        }
        Ok(())
    }
}

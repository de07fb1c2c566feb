use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuits::NoiseModel;
use crate::error::{invalid, Error, Result};
use crate::experiments::{MeasurementSetting, SettingKind};
use crate::observables::ObservableKind;

/// The six swept quantities: one per observable, with concurrence measured
/// by either the single-ancilla or the two-ancilla circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SweepObservable {
    VA,
    VB,
    PA,
    PB,
    C1,
    C2,
}

impl SweepObservable {
    pub const ALL: [SweepObservable; 6] = [
        SweepObservable::VA,
        SweepObservable::VB,
        SweepObservable::PA,
        SweepObservable::PB,
        SweepObservable::C1,
        SweepObservable::C2,
    ];

    pub fn setting(&self) -> MeasurementSetting {
        MeasurementSetting::new(match self {
            SweepObservable::VA | SweepObservable::VB => SettingKind::VisibilityPair,
            SweepObservable::PA | SweepObservable::PB => SettingKind::PredictabilityPair,
            SweepObservable::C1 => SettingKind::Concurrence1,
            SweepObservable::C2 => SettingKind::Concurrence2,
        })
    }

    pub fn kind(&self) -> ObservableKind {
        match self {
            SweepObservable::VA => ObservableKind::VisibilityA,
            SweepObservable::VB => ObservableKind::VisibilityB,
            SweepObservable::PA => ObservableKind::PredictabilityA,
            SweepObservable::PB => ObservableKind::PredictabilityB,
            SweepObservable::C1 | SweepObservable::C2 => ObservableKind::Concurrence,
        }
    }

    /// θ used when the config leaves it unset.
    pub fn default_theta(&self) -> f64 {
        match self {
            SweepObservable::VA => 0.0,
            SweepObservable::VB => 1.5 * PI,
            _ => PI,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepObservable::VA => "VA",
            SweepObservable::VB => "VB",
            SweepObservable::PA => "PA",
            SweepObservable::PB => "PB",
            SweepObservable::C1 => "C1",
            SweepObservable::C2 => "C2",
        }
    }
}

impl fmt::Display for SweepObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepObservable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| *c != '_').collect();
        Self::ALL
            .into_iter()
            .find(|o| o.as_str().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| Error::Parse(format!("unknown observable {s:?} (expected VA, VB, PA, PB, C1 or C2)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub observable: SweepObservable,
    /// Falls back to [`SweepObservable::default_theta`].
    pub theta: Option<f64>,
    pub lambda: f64,
    pub phi_start: f64,
    pub phi_count: usize,
    pub phi_step: f64,
    /// Shots for the ancilla readout and for each tomography setting.
    pub shots: u64,
    pub exact_mode: bool,
    pub noise: NoiseModel,
    pub master_seed: u64,
    /// Emit one extra row per non-empty ancilla branch.
    pub branches: bool,
    pub output_path: Option<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            observable: SweepObservable::C2,
            theta: None,
            lambda: 0.0,
            phi_start: 0.0,
            phi_count: 64,
            phi_step: PI / 32.0,
            shots: 5000,
            exact_mode: false,
            noise: NoiseModel::noiseless(),
            master_seed: 0,
            branches: false,
            output_path: None,
        }
    }
}

impl SweepConfig {
    pub fn new(observable: SweepObservable) -> Self {
        Self {
            observable,
            ..Self::default()
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or_else(|| self.observable.default_theta())
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.phi_count)
            .map(|i| self.phi_start + i as f64 * self.phi_step)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.phi_step.is_nan() || self.phi_step <= 0.0 {
            return Err(invalid("phi_step must be positive"));
        }
        if self.phi_count == 0 {
            return Err(invalid("phi_count must be at least 1"));
        }
        if !self.exact_mode && self.shots == 0 {
            return Err(invalid("shots must be at least 1 outside exact mode"));
        }
        self.noise.validate()
    }

    /// Shots column value: 0 marks exact-probability rows.
    pub fn recorded_shots(&self) -> u64 {
        if self.exact_mode {
            0
        } else {
            self.shots
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

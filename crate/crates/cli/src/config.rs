//! Scenario settings: built-in defaults, overridden by a `key = value`
//! scenario file, overridden by command-line flags.
//!
//! Scenario file format (UTF-8): one `key = value` per line, `#` starts a
//! comment, blank lines are ignored, `-` and `_` are interchangeable in keys.
//! Keys:
//!
//! | key               | meaning                                   | default |
//! |-------------------|-------------------------------------------|---------|
//! | `gamma1`          | coupling to waveguide 1                   | 1       |
//! | `gamma2`          | coupling to waveguide 2                   | 1       |
//! | `gamma_c`         | cavity loss to other modes                | 0       |
//! | `delta`           | detuning `omega_c - omega`                | 0       |
//! | `phi`             | port 2 phase (two inputs)                 | 0       |
//! | `theta`           | port 3 phase (three inputs)               | 0       |
//! | `theta_prime`     | port 4 phase (three inputs)               | 0       |
//! | `mean_n`          | `|alpha|^2` per input port                | 1       |
//! | `omega0_detuning` | packet center detuning `omega_c - omega0` | `delta` |
//! | `bandwidth`       | packet half-bandwidth `Omega`             | 0.3     |
//! | `points`          | frequency quadrature nodes                | 4001    |
//! | `case`            | sweep case: single, two, three, packet    | two     |
//! | `inputs`          | packet inputs: single, two, three         | two     |
//! | `method`          | packet method: freq, time                 | freq    |
//! | `var`, `start`, `stop`, `count`     | sweep axis          |         |
//! | `var2`, `start2`, `stop2`, `count2` | optional second axis |        |

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Inputs {
    Single,
    Two,
    Three,
}

impl Inputs {
    pub fn name(self) -> &'static str {
        match self {
            Inputs::Single => "single",
            Inputs::Two => "two",
            Inputs::Three => "three",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepCase {
    Single,
    Two,
    Three,
    Packet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Freq,
    Time,
}

/// Quantity varied along a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepVar {
    Phi,
    Theta,
    #[value(name = "theta_prime", alias = "theta-prime")]
    ThetaPrime,
    Delta,
    Gamma2,
    #[value(name = "gamma_c", alias = "gamma-c")]
    GammaC,
    #[value(name = "Omega", alias = "omega", alias = "bandwidth")]
    Omega,
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SweepVar::Phi => "phi",
            SweepVar::Theta => "theta",
            SweepVar::ThetaPrime => "theta_prime",
            SweepVar::Delta => "delta",
            SweepVar::Gamma2 => "gamma2",
            SweepVar::GammaC => "gamma_c",
            SweepVar::Omega => "Omega",
        };
        f.write_str(s)
    }
}

/// One sweep axis: `count` evenly spaced values from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

pub const MAX_SWEEP_COUNT: usize = 1_000_000;

impl Axis {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start >= self.stop {
            return Err(CliError::usage(format!(
                "sweep over {} needs finite start < stop, got {} .. {}",
                self.var, self.start, self.stop
            )));
        }
        if self.count < 2 || self.count > MAX_SWEEP_COUNT {
            return Err(CliError::usage(format!(
                "sweep count must be in 2..={MAX_SWEEP_COUNT}, got {}",
                self.count
            )));
        }
        Ok(())
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.stop
        } else {
            self.start + (self.stop - self.start) * k as f64 / (self.count - 1) as f64
        }
    }
}

/// Every setting a command can read, each optional until defaults apply.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma_c: Option<f64>,
    pub delta: Option<f64>,
    pub phi: Option<f64>,
    pub theta: Option<f64>,
    pub theta_prime: Option<f64>,
    pub mean_n: Option<f64>,
    pub omega0_detuning: Option<f64>,
    pub bandwidth: Option<f64>,
    pub points: Option<usize>,
    pub case: Option<SweepCase>,
    pub inputs: Option<Inputs>,
    pub method: Option<Method>,
    pub var: Option<SweepVar>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    pub var2: Option<SweepVar>,
    pub start2: Option<f64>,
    pub stop2: Option<f64>,
    pub count2: Option<usize>,
}

macro_rules! overlay {
    ($self:ident, $other:ident, $($field:ident),*) => {
        $( if $other.$field.is_some() { $self.$field = $other.$field; } )*
    };
}

impl Settings {
    /// Fields set in `other` replace ours.
    pub fn overlay(&mut self, other: &Settings) {
        overlay!(
            self,
            other,
            gamma1,
            gamma2,
            gamma_c,
            delta,
            phi,
            theta,
            theta_prime,
            mean_n,
            omega0_detuning,
            bandwidth,
            points,
            case,
            inputs,
            method,
            var,
            start,
            stop,
            count,
            var2,
            start2,
            stop2,
            count2
        );
    }

    pub fn scenario(&self) -> Scenario {
        let delta = self.delta.unwrap_or(0.0);
        Scenario {
            gamma1: self.gamma1.unwrap_or(1.0),
            gamma2: self.gamma2.unwrap_or(1.0),
            gamma_c: self.gamma_c.unwrap_or(0.0),
            delta,
            phi: self.phi.unwrap_or(0.0),
            theta: self.theta.unwrap_or(0.0),
            theta_prime: self.theta_prime.unwrap_or(0.0),
            mean_n: self.mean_n.unwrap_or(1.0),
            omega0_detuning: self.omega0_detuning,
            bandwidth: self.bandwidth.unwrap_or(0.3),
            points: self.points.unwrap_or(4001),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(value: &str) -> Result<Option<T>, String> {
            value.parse().map(Some).map_err(|_| format!("cannot parse '{value}'"))
        }
        fn choice<T: clap::ValueEnum>(value: &str) -> Result<Option<T>, String> {
            T::from_str(value, true).map(Some)
        }
        match key {
            "gamma1" => self.gamma1 = num(value)?,
            "gamma2" => self.gamma2 = num(value)?,
            "gamma_c" => self.gamma_c = num(value)?,
            "delta" => self.delta = num(value)?,
            "phi" => self.phi = num(value)?,
            "theta" => self.theta = num(value)?,
            "theta_prime" => self.theta_prime = num(value)?,
            "mean_n" => self.mean_n = num(value)?,
            "omega0_detuning" => self.omega0_detuning = num(value)?,
            "bandwidth" | "omega" => self.bandwidth = num(value)?,
            "points" => self.points = num(value)?,
            "case" => self.case = choice(value)?,
            "inputs" => self.inputs = choice(value)?,
            "method" => self.method = choice(value)?,
            "var" => self.var = choice(value)?,
            "start" => self.start = num(value)?,
            "stop" => self.stop = num(value)?,
            "count" => self.count = num(value)?,
            "var2" => self.var2 = choice(value)?,
            "start2" => self.start2 = num(value)?,
            "stop2" => self.stop2 = num(value)?,
            "count2" => self.count2 = num(value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }
}

/// Parse scenario-file text. `origin` names the source in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<Settings, CliError> {
    let mut settings = Settings::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::usage(format!(
                "{origin}:{lineno}: expected 'key = value', got '{line}'"
            )));
        };
        let key = key.trim().replace('-', "_");
        let key = if key == "Omega" { "omega".to_string() } else { key };
        settings
            .set(&key, value.trim())
            .map_err(|msg| CliError::usage(format!("{origin}:{lineno}: {msg}")))?;
    }
    Ok(settings)
}

pub fn load_config(path: &Path) -> Result<Settings, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read scenario file {}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

/// Fully resolved physical scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_c: f64,
    pub delta: f64,
    pub phi: f64,
    pub theta: f64,
    pub theta_prime: f64,
    pub mean_n: f64,
    pub omega0_detuning: Option<f64>,
    pub bandwidth: f64,
    pub points: usize,
}

impl Scenario {
    /// Packet center detuning; falls back to `delta`.
    pub fn center_detuning(&self) -> f64 {
        self.omega0_detuning.unwrap_or(self.delta)
    }

    pub fn apply(&mut self, var: SweepVar, value: f64) {
        match var {
            SweepVar::Phi => self.phi = value,
            SweepVar::Theta => self.theta = value,
            SweepVar::ThetaPrime => self.theta_prime = value,
            SweepVar::Delta => {
                self.delta = value;
                self.omega0_detuning = None;
            }
            SweepVar::Gamma2 => self.gamma2 = value,
            SweepVar::GammaC => self.gamma_c = value,
            SweepVar::Omega => self.bandwidth = value,
        }
    }
}

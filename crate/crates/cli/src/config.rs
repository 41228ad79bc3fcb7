//! Run configuration, read from a TOML file.
//!
//! ```toml
//! hbar = 1.0
//! mass = 1.0
//! length_scale = 1.0
//!
//! [grid]            # optional; each family has its own default grid
//! points = 4096
//! extent = 80.0
//!
//! [time]            # scaled time u = (t - t0)/m
//! start = -3.0
//! stop = 3.0
//! steps = 61
//!
//! [output]
//! format = "json"   # or "csv"
//! path = "report.json"
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub const MIN_GRID_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    pub extent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            start: -3.0,
            stop: 3.0,
            steps: 61,
        }
    }
}

impl TimeConfig {
    /// Evenly spaced samples from `start` to `stop` inclusive.
    pub fn samples(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / last)
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub length_scale: f64,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> f64 {
    1.0
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            length_scale: 1.0,
            grid: None,
            time: TimeConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed configuration: {0}")]
    Syntax(String),
    #[error("{0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [("hbar", self.hbar), ("mass", self.mass), ("length_scale", self.length_scale)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("{name} must be a positive number, got {v}")));
            }
        }
        if let Some(g) = self.grid {
            if g.points < MIN_GRID_POINTS || !g.points.is_power_of_two() {
                return Err(ConfigError::Invalid(format!(
                    "grid.points must be a power of two and at least {MIN_GRID_POINTS}, got {}",
                    g.points
                )));
            }
            if !(g.extent > 0.0 && g.extent.is_finite()) {
                return Err(ConfigError::Invalid(format!("grid.extent must be positive, got {}", g.extent)));
            }
        }
        let t = self.time;
        if t.steps < 2 {
            return Err(ConfigError::Invalid(format!("time.steps must be at least 2, got {}", t.steps)));
        }
        if !(t.start.is_finite() && t.stop.is_finite()) || t.start >= t.stop {
            return Err(ConfigError::Invalid(format!(
                "time needs finite start < stop, got start={} stop={}",
                t.start, t.stop
            )));
        }
        Ok(())
    }
}

/// Parses and validates a TOML configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
    }

    #[test]
    fn full_file() {
        let c = parse_config(
            "hbar = 2.0\nmass = 0.5\n[grid]\npoints = 1024\nextent = 40.0\n[time]\nstart = -1.0\nstop = 2.0\nsteps = 4\n[output]\nformat = \"csv\"\npath = \"x.csv\"\n",
        )
        .unwrap();
        assert_eq!(c.hbar, 2.0);
        assert_eq!(c.grid, Some(GridConfig { points: 1024, extent: 40.0 }));
        assert_eq!(c.time.samples(), vec![-1.0, 0.0, 1.0, 2.0]);
        assert_eq!(c.output.format, Some(Format::Csv));
    }

    #[test]
    fn invalid_values() {
        assert!(matches!(parse_config("mass = 0.0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("[grid]\npoints = 128\nextent = 1.0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("[grid]\npoints = 1000\nextent = 1.0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("[time]\nstart = 0.0\nstop = 1.0\nsteps = 1"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("planck = 1.0"), Err(ConfigError::Syntax(_))));
        assert!(matches!(parse_config("hbar = "), Err(ConfigError::Syntax(_))));
    }
}

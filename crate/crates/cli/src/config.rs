use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    Spectra,
    Split,
    PhaseScan,
    Fringes,
    Squeezing,
    Geometry,
    Interferometer,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::Spectra,
        ExperimentId::Split,
        ExperimentId::PhaseScan,
        ExperimentId::Fringes,
        ExperimentId::Squeezing,
        ExperimentId::Geometry,
        ExperimentId::Interferometer,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentId::Spectra => "spectra",
            ExperimentId::Split => "split",
            ExperimentId::PhaseScan => "phase-scan",
            ExperimentId::Fringes => "fringes",
            ExperimentId::Squeezing => "squeezing",
            ExperimentId::Geometry => "geometry",
            ExperimentId::Interferometer => "interferometer",
        }
    }

    fn uses_grid(&self) -> bool {
        matches!(
            self,
            ExperimentId::Spectra | ExperimentId::PhaseScan | ExperimentId::Fringes | ExperimentId::Geometry
        )
    }

    fn default_grid(&self) -> Option<GridSpec> {
        let g = match self {
            ExperimentId::Spectra => GridSpec::Linear {
                start: 0.0,
                stop: 10.0,
                count: 201,
            },
            ExperimentId::PhaseScan => GridSpec::Linear {
                start: 0.0,
                stop: 0.004,
                count: 21,
            },
            ExperimentId::Fringes => GridSpec::Linear {
                start: 0.0,
                stop: 2.0 * std::f64::consts::PI,
                count: 25,
            },
            ExperimentId::Geometry => GridSpec::Log {
                start: 0.1,
                stop: 10.0,
                count: 201,
            },
            _ => return None,
        };
        Some(g)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ExperimentId::ALL.iter().map(|e| e.name()).collect();
                CliError::Usage(format!("unknown experiment '{s}' (expected one of: {})", known.join(", ")))
            })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

/// `start:stop:count` (linear), `log:start:stop:count` or a comma list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridSpec {
    Linear { start: f64, stop: f64, count: usize },
    Log { start: f64, stop: f64, count: usize },
    List { values: Vec<f64> },
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            GridSpec::Linear { start, stop, count } => linspace(start, stop, count),
            GridSpec::Log { start, stop, count } => linspace(start.ln(), stop.ln(), count)
                .into_iter()
                .enumerate()
                .map(|(i, x)| match i {
                    0 => start,
                    _ if i + 1 == count => stop,
                    _ => x.exp(),
                })
                .collect(),
            GridSpec::List { ref values } => values.clone(),
        }
    }
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let step = (stop - start) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
        .collect()
}

fn parse_num(s: &str) -> Result<f64, CliError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("malformed number '{s}'")))?;
    if !x.is_finite() {
        return Err(CliError::Usage(format!("non-finite number '{s}'")));
    }
    Ok(x)
}

impl FromStr for GridSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let count = |p: &str| -> Result<usize, CliError> {
            let n: usize = p
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("malformed grid count '{p}'")))?;
            if n == 0 {
                return Err(CliError::Usage("grid count must be positive".into()));
            }
            Ok(n)
        };
        match parts.as_slice() {
            ["log", a, b, n] => {
                let (start, stop) = (parse_num(a)?, parse_num(b)?);
                if start <= 0.0 || stop <= 0.0 {
                    return Err(CliError::Usage("log grid bounds must be positive".into()));
                }
                Ok(GridSpec::Log {
                    start,
                    stop,
                    count: count(n)?,
                })
            }
            [a, b, n] => Ok(GridSpec::Linear {
                start: parse_num(a)?,
                stop: parse_num(b)?,
                count: count(n)?,
            }),
            [list] => {
                let values = list.split(',').map(parse_num).collect::<Result<Vec<_>, _>>()?;
                Ok(GridSpec::List { values })
            }
            _ => Err(CliError::Usage(format!("malformed grid spec '{s}'"))),
        }
    }
}

/// Optional settings from a JSON document or the command line; flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<String>,
    pub n_atoms: Option<usize>,
    pub c: Option<f64>,
    pub h_z: Option<f64>,
    pub h_x_init: Option<f64>,
    pub rate: Option<f64>,
    pub step: Option<f64>,
    pub grid: Option<String>,
    pub h_z_grid: Option<String>,
    pub levels: Option<usize>,
    pub sample_every: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
}

impl ConfigOverrides {
    pub fn from_json(doc: &str) -> Result<Self, CliError> {
        serde_json::from_str(doc).map_err(|e| CliError::Usage(format!("invalid config document: {e}")))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merged(self, other: ConfigOverrides) -> Self {
        Self {
            experiment: other.experiment.or(self.experiment),
            n_atoms: other.n_atoms.or(self.n_atoms),
            c: other.c.or(self.c),
            h_z: other.h_z.or(self.h_z),
            h_x_init: other.h_x_init.or(self.h_x_init),
            rate: other.rate.or(self.rate),
            step: other.step.or(self.step),
            grid: other.grid.or(self.grid),
            h_z_grid: other.h_z_grid.or(self.h_z_grid),
            levels: other.levels.or(self.levels),
            sample_every: other.sample_every.or(self.sample_every),
            output: other.output.or(self.output),
            format: other.format.or(self.format),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub n_atoms: usize,
    pub c: f64,
    pub h_z: f64,
    pub h_x_init: f64,
    pub rate: f64,
    /// Transverse-field increment per propagation step.
    pub step: f64,
    pub grid: Option<GridSpec>,
    /// Longitudinal fields of the end-to-end runs in `fringes`.
    pub h_z_grid: Option<GridSpec>,
    pub levels: usize,
    pub sample_every: usize,
    pub output: PathBuf,
    pub format: Format,
}

pub const DEFAULT_N_ATOMS: usize = 10;
pub const DEFAULT_C: f64 = -0.1;
pub const DEFAULT_RATE: f64 = 0.08;
pub const DEFAULT_H_X_INIT: f64 = 10.0;
pub const DEFAULT_LEVELS: usize = 10;
pub const DEFAULT_SAMPLE_EVERY: usize = 10;

fn default_h_z_grid() -> GridSpec {
    GridSpec::Linear {
        start: 0.0004,
        stop: 0.0032,
        count: 8,
    }
}

fn finite(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{name} must be finite")))
    }
}

/// Applies defaults and checks the combination of settings.
pub fn parse_config(doc: ConfigOverrides) -> Result<ExperimentConfig, CliError> {
    let experiment: ExperimentId = doc
        .experiment
        .as_deref()
        .ok_or_else(|| CliError::Usage("no experiment given".into()))?
        .parse()?;

    let grid = match doc.grid {
        Some(g) if !experiment.uses_grid() => {
            return Err(CliError::Usage(format!(
                "experiment {experiment} takes no grid (got '{g}')"
            )))
        }
        Some(g) => Some(g.parse()?),
        None => experiment.default_grid(),
    };
    let h_z_grid = match doc.h_z_grid {
        Some(g) if experiment != ExperimentId::Fringes => {
            return Err(CliError::Usage(format!(
                "only fringes takes an h_z grid (got '{g}')"
            )))
        }
        Some(g) => Some(g.parse()?),
        None if experiment == ExperimentId::Fringes => Some(default_h_z_grid()),
        None => None,
    };
    if experiment == ExperimentId::PhaseScan && doc.h_z.is_some() {
        return Err(CliError::Usage("phase-scan sweeps h_z over its grid; drop --h-z".into()));
    }

    let rate = finite("rate", doc.rate.unwrap_or(DEFAULT_RATE))?;
    if rate <= 0.0 {
        return Err(CliError::Usage(format!("rate must be positive, got {rate}")));
    }
    let step = finite("step", doc.step.unwrap_or(spinmz_core::dynamics::DEFAULT_DH_X))?;
    if step <= 0.0 {
        return Err(CliError::Usage(format!("step must be positive, got {step}")));
    }
    let levels = doc.levels.unwrap_or(DEFAULT_LEVELS);
    if levels == 0 {
        return Err(CliError::Usage("levels must be positive".into()));
    }
    let format = match doc.format {
        Some(f) => f.parse()?,
        None => Format::Csv,
    };
    Ok(ExperimentConfig {
        experiment,
        n_atoms: doc.n_atoms.unwrap_or(DEFAULT_N_ATOMS),
        c: finite("c", doc.c.unwrap_or(DEFAULT_C))?,
        h_z: finite("h_z", doc.h_z.unwrap_or(0.0))?,
        h_x_init: finite("h_x_init", doc.h_x_init.unwrap_or(DEFAULT_H_X_INIT))?,
        rate,
        step,
        grid,
        h_z_grid,
        levels,
        sample_every: doc.sample_every.unwrap_or(DEFAULT_SAMPLE_EVERY),
        output: doc
            .output
            .unwrap_or_else(|| PathBuf::from(format!("spinmz-out/{}", experiment.name()))),
        format,
    })
}

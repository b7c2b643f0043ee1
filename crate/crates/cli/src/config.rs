//! Run configuration: CLI flags merged over an optional line-oriented
//! `key = value` config file (flags win), then validated into a
//! `RunConfig`.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    GpQnd,
    GpDissipative,
    Sweep,
    BlochSpheroid,
    Verify,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gp-qnd" => Ok(Mode::GpQnd),
            "gp-dissipative" => Ok(Mode::GpDissipative),
            "sweep" => Ok(Mode::Sweep),
            "bloch-spheroid" => Ok(Mode::BlochSpheroid),
            "verify" => Ok(Mode::Verify),
            other => Err(format!(
                "unknown mode '{other}' (expected gp-qnd, gp-dissipative, sweep, \
                 bloch-spheroid, or verify)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::GpQnd => "gp-qnd",
            Mode::GpDissipative => "gp-dissipative",
            Mode::Sweep => "sweep",
            Mode::BlochSpheroid => "bloch-spheroid",
            Mode::Verify => "verify",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Qnd,
    Dissipative,
}

impl FromStr for Sector {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "qnd" => Ok(Sector::Qnd),
            "dissipative" => Ok(Sector::Dissipative),
            other => Err(format!(
                "unknown sector '{other}' (expected qnd or dissipative)"
            )),
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Qnd => "qnd",
            Sector::Dissipative => "dissipative",
        })
    }
}

/// A sweepable parameter axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Theta0,
    Phi0,
    Temp,
    Gamma0,
    SqueezeR,
    SqueezeA,
    SqueezePhi,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Theta0 => "theta0",
            Axis::Phi0 => "phi0",
            Axis::Temp => "temp",
            Axis::Gamma0 => "gamma0",
            Axis::SqueezeR => "squeeze-r",
            Axis::SqueezeA => "squeeze-a",
            Axis::SqueezePhi => "squeeze-phi",
        }
    }

    pub fn is_angle(&self) -> bool {
        matches!(self, Axis::Theta0 | Axis::Phi0 | Axis::SqueezePhi)
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "theta0" => Ok(Axis::Theta0),
            "phi0" => Ok(Axis::Phi0),
            "temp" => Ok(Axis::Temp),
            "gamma0" => Ok(Axis::Gamma0),
            "squeeze-r" | "squeeze_r" => Ok(Axis::SqueezeR),
            "squeeze-a" | "squeeze_a" => Ok(Axis::SqueezeA),
            "squeeze-phi" | "squeeze_phi" => Ok(Axis::SqueezePhi),
            other => Err(format!("unknown sweep axis '{other}'")),
        }
    }
}

/// `axis:lo:hi:n` — inclusive endpoints, n ≥ 2 grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64)
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(format!("sweep spec '{s}' is not axis:lo:hi:n"));
        }
        let axis: Axis = parts[0].parse()?;
        let lo: f64 = parts[1]
            .parse()
            .map_err(|_| format!("bad sweep lower bound '{}'", parts[1]))?;
        let hi: f64 = parts[2]
            .parse()
            .map_err(|_| format!("bad sweep upper bound '{}'", parts[2]))?;
        let n: usize = parts[3]
            .parse()
            .map_err(|_| format!("bad sweep point count '{}'", parts[3]))?;
        if !(hi > lo) {
            return Err(format!("sweep bounds not ordered: {lo} >= {hi}"));
        }
        if n < 2 {
            return Err(format!("sweep needs at least 2 points, got {n}"));
        }
        Ok(Sweep { axis, lo, hi, n })
    }
}

/// `axis:v1,v2,...` — one curve per listed value.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (axis, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("family spec '{s}' is not axis:v1,v2,..."))?;
        let axis: Axis = axis.parse()?;
        let values = rest
            .split(',')
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| format!("bad family value '{v}'"))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        if values.is_empty() {
            return Err(format!("family spec '{s}' lists no values"));
        }
        Ok(Family { axis, values })
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub sector: Option<Sector>,
    pub theta0: f64,
    pub phi0: f64,
    pub temp: f64,
    pub gamma0: f64,
    pub squeeze_r: f64,
    pub squeeze_a: f64,
    pub squeeze_phi: f64,
    pub omega: f64,
    pub omega_c: f64,
    pub time: f64,
    pub sweep: Option<Sweep>,
    pub family: Option<Family>,
    pub include_unitary: bool,
    pub samples: usize,
    pub seed: u64,
    pub degrees: bool,
    pub out: Option<PathBuf>,
}

/// Raw option set as collected from flags or one config file; `None`
/// means "not given here".
#[derive(Debug, Clone, Default)]
pub struct PartialConfig {
    pub mode: Option<Mode>,
    pub sector: Option<Sector>,
    pub theta0: Option<f64>,
    pub phi0: Option<f64>,
    pub temp: Option<f64>,
    pub gamma0: Option<f64>,
    pub squeeze_r: Option<f64>,
    pub squeeze_a: Option<f64>,
    pub squeeze_phi: Option<f64>,
    pub omega: Option<f64>,
    pub omega_c: Option<f64>,
    pub time: Option<f64>,
    pub sweep: Option<Sweep>,
    pub family: Option<Family>,
    pub include_unitary: Option<bool>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub degrees: Option<bool>,
    pub out: Option<PathBuf>,
}

impl PartialConfig {
    /// `self` wins over `base` field by field.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            mode: self.mode.or(base.mode),
            sector: self.sector.or(base.sector),
            theta0: self.theta0.or(base.theta0),
            phi0: self.phi0.or(base.phi0),
            temp: self.temp.or(base.temp),
            gamma0: self.gamma0.or(base.gamma0),
            squeeze_r: self.squeeze_r.or(base.squeeze_r),
            squeeze_a: self.squeeze_a.or(base.squeeze_a),
            squeeze_phi: self.squeeze_phi.or(base.squeeze_phi),
            omega: self.omega.or(base.omega),
            omega_c: self.omega_c.or(base.omega_c),
            time: self.time.or(base.time),
            sweep: self.sweep.or(base.sweep),
            family: self.family.or(base.family),
            include_unitary: self.include_unitary.or(base.include_unitary),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
            degrees: self.degrees.or(base.degrees),
            out: self.out.or(base.out),
        }
    }

    /// Fills defaults and validates cross-field constraints.
    pub fn resolve(self) -> Result<RunConfig, String> {
        let mode = self.mode.ok_or("no mode given (use --mode or a config file)")?;
        let sector = match (mode, self.sector) {
            (Mode::GpQnd, Some(s)) if s != Sector::Qnd => {
                return Err("mode gp-qnd conflicts with sector".into())
            }
            (Mode::GpQnd, _) => Some(Sector::Qnd),
            (Mode::GpDissipative, Some(s)) if s != Sector::Dissipative => {
                return Err("mode gp-dissipative conflicts with sector".into())
            }
            (Mode::GpDissipative, _) => Some(Sector::Dissipative),
            (Mode::Sweep, None) => {
                return Err("mode sweep needs an explicit sector (qnd or dissipative)".into())
            }
            (Mode::BlochSpheroid, None) => Some(Sector::Dissipative),
            (_, s) => s,
        };
        let samples = self.samples.unwrap_or(2048);
        if samples < 16 {
            return Err(format!("samples must be at least 16, got {samples}"));
        }
        let cfg = RunConfig {
            mode,
            sector,
            theta0: self.theta0.unwrap_or(std::f64::consts::FRAC_PI_2),
            phi0: self.phi0.unwrap_or(0.0),
            temp: self.temp.unwrap_or(0.0),
            gamma0: self.gamma0.unwrap_or(0.0025),
            squeeze_r: self.squeeze_r.unwrap_or(0.0),
            squeeze_a: self.squeeze_a.unwrap_or(0.0),
            squeeze_phi: self.squeeze_phi.unwrap_or(0.0),
            omega: self.omega.unwrap_or(1.0),
            omega_c: self.omega_c.unwrap_or(40.0),
            time: self.time.unwrap_or(0.15),
            sweep: self.sweep,
            family: self.family,
            include_unitary: self.include_unitary.unwrap_or(false),
            samples,
            seed: self.seed.unwrap_or(0),
            degrees: self.degrees.unwrap_or(false),
            out: self.out,
        };
        if cfg.omega <= 0.0 {
            return Err(format!("omega must be positive, got {}", cfg.omega));
        }
        if let (Some(sweep), Some(family)) = (&cfg.sweep, &cfg.family) {
            if sweep.axis == family.axis {
                return Err(format!(
                    "sweep and family cannot share the axis '{}'",
                    sweep.axis.name()
                ));
            }
        }
        Ok(cfg)
    }
}

/// Parses a line-oriented `key = value` file; `#` starts a comment,
/// blank lines ignored, keys use the flag names with `-` or `_`.
pub fn parse_config_file(path: &Path) -> Result<PartialConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map: HashMap<String, String> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: not key = value", path.display(), lineno + 1))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(format!(
                "{}:{}: duplicate key '{key}'",
                path.display(),
                lineno + 1
            ));
        }
    }

    let mut cfg = PartialConfig::default();
    let parse_f64 = |k: &str, v: &str| -> Result<f64, String> {
        v.parse().map_err(|_| format!("bad number for {k}: '{v}'"))
    };
    for (key, value) in &map {
        match key.as_str() {
            "mode" => cfg.mode = Some(value.parse()?),
            "sector" => cfg.sector = Some(value.parse()?),
            "theta0" => cfg.theta0 = Some(parse_f64(key, value)?),
            "phi0" => cfg.phi0 = Some(parse_f64(key, value)?),
            "temp" => cfg.temp = Some(parse_f64(key, value)?),
            "gamma0" => cfg.gamma0 = Some(parse_f64(key, value)?),
            "squeeze_r" => cfg.squeeze_r = Some(parse_f64(key, value)?),
            "squeeze_a" => cfg.squeeze_a = Some(parse_f64(key, value)?),
            "squeeze_phi" => cfg.squeeze_phi = Some(parse_f64(key, value)?),
            "omega" => cfg.omega = Some(parse_f64(key, value)?),
            "omega_c" => cfg.omega_c = Some(parse_f64(key, value)?),
            "time" => cfg.time = Some(parse_f64(key, value)?),
            "sweep" => cfg.sweep = Some(value.parse()?),
            "family" => cfg.family = Some(value.parse()?),
            "include_unitary" => {
                cfg.include_unitary = Some(value.parse::<bool>().map_err(|_| {
                    format!("bad boolean for include_unitary: '{value}'")
                })?)
            }
            "samples" => {
                cfg.samples = Some(
                    value
                        .parse()
                        .map_err(|_| format!("bad integer for samples: '{value}'"))?,
                )
            }
            "seed" => {
                cfg.seed = Some(
                    value
                        .parse()
                        .map_err(|_| format!("bad integer for seed: '{value}'"))?,
                )
            }
            "degrees" => {
                cfg.degrees = Some(
                    value
                        .parse::<bool>()
                        .map_err(|_| format!("bad boolean for degrees: '{value}'"))?,
                )
            }
            "out" => cfg.out = Some(PathBuf::from(value)),
            other => return Err(format!("unknown config key '{other}'")),
        }
    }
    Ok(cfg)
}

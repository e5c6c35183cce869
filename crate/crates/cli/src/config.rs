//! Run configuration for `qklyst rates`.
//!
//! The file is UTF-8 text: `[section]` headers, `key = value` lines, `#`
//! comments. Physical quantities must carry their unit after the number
//! (`gap_width = 1.0e-3 m`); counts and the sweep axis are bare.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use qklyst_core::design::RateAxis;
use qklyst_core::klystron::{Capacitance, KlystronParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError {
        message: message.into(),
    }
}

/// What a key holds and which unit its value must be written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Quantity(&'static str),
    Count,
    Axis,
}

/// Every recognised `section.key`.
const KEYS: &[(&str, Kind)] = &[
    ("device.omega", Kind::Quantity("rad/s")),
    ("device.frequency", Kind::Quantity("Hz")),
    ("device.gap_width", Kind::Quantity("m")),
    ("device.capacitance", Kind::Quantity("F")),
    ("device.plate_area", Kind::Quantity("m^2")),
    ("device.volume", Kind::Quantity("m^3")),
    ("device.box_length", Kind::Quantity("m")),
    ("device.drift_length", Kind::Quantity("m")),
    ("beam.velocity", Kind::Quantity("m/s")),
    ("beam.electrons", Kind::Count),
    ("cavity.photons", Kind::Count),
    ("sweep.axis", Kind::Axis),
    ("sweep.start", Kind::Quantity("axis")),
    ("sweep.stop", Kind::Quantity("axis")),
    ("sweep.steps", Kind::Count),
];

/// Unit expected for a sweep bound on the given axis; `None` for counts.
pub fn axis_unit(axis: RateAxis) -> Option<&'static str> {
    match axis {
        RateAxis::Omega => Some("rad/s"),
        RateAxis::GapWidth => Some("m"),
        RateAxis::Velocity => Some("m/s"),
        RateAxis::Photons | RateAxis::Electrons => None,
    }
}

/// Parsed values keyed by `section.key`, numbers already stripped of units.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    numbers: BTreeMap<String, f64>,
    axis: Option<RateAxis>,
    /// Raw `sweep.start` / `sweep.stop` text, resolved once the axis is known.
    bounds: BTreeMap<String, (usize, String)>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| err(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| err(format!("{}: {}", path.display(), e.message)))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = RunConfig::default();
        let mut section = String::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("line {line_no}: unterminated section header `{line}`")))?
                    .trim();
                if !KEYS.iter().any(|(k, _)| k.split('.').next() == Some(name)) {
                    return Err(err(format!("line {line_no}: unknown section `[{name}]`")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("line {line_no}: expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            if section.is_empty() {
                return Err(err(format!(
                    "line {line_no}: key `{key}` appears before any [section] header"
                )));
            }
            let full = format!("{section}.{key}");
            let kind = KEYS
                .iter()
                .find(|(k, _)| *k == full)
                .map(|(_, kind)| *kind)
                .ok_or_else(|| err(format!("line {line_no}: unknown key `{full}`")))?;
            if config.numbers.contains_key(&full)
                || config.bounds.contains_key(&full)
                || (full == "sweep.axis" && config.axis.is_some())
            {
                return Err(err(format!("line {line_no}: duplicate key `{full}`")));
            }
            match kind {
                Kind::Axis => {
                    config.axis = Some(RateAxis::from_name(value).map_err(|e| err(format!("line {line_no}: {e}")))?);
                }
                Kind::Count => {
                    let number = parse_number(value).map_err(|m| err(format!("line {line_no}: `{full}`: {m}")))?;
                    config.numbers.insert(full, number);
                }
                Kind::Quantity("axis") => {
                    config.bounds.insert(full, (line_no, value.to_string()));
                }
                Kind::Quantity(unit) => {
                    let number =
                        parse_quantity(value, unit).map_err(|m| err(format!("line {line_no}: `{full}`: {m}")))?;
                    config.numbers.insert(full, number);
                }
            }
        }
        // Sweep bounds carry the unit of the axis they sweep.
        let bounds = std::mem::take(&mut config.bounds);
        for (key, (line_no, value)) in bounds {
            let axis = config
                .axis
                .ok_or_else(|| err(format!("line {line_no}: `{key}` given without `sweep.axis`")))?;
            let number = match axis_unit(axis) {
                Some(unit) => parse_quantity(&value, unit),
                None => parse_number(&value),
            }
            .map_err(|m| err(format!("line {line_no}: `{key}`: {m}")))?;
            config.numbers.insert(key, number);
        }
        Ok(config)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.numbers.get(key).copied()
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.numbers.insert(key.to_string(), value);
    }

    pub fn remove(&mut self, key: &str) {
        self.numbers.remove(key);
    }

    pub fn axis(&self) -> Option<RateAxis> {
        self.axis
    }

    pub fn set_axis(&mut self, axis: RateAxis) {
        self.axis = Some(axis);
    }

    /// Device and beam parameters; every missing key is listed.
    pub fn params(&self) -> Result<KlystronParams, ConfigError> {
        let mut missing = Vec::new();
        let mut need = |key: &str| match self.get(key) {
            Some(v) => v,
            None => {
                missing.push(key.to_string());
                f64::NAN
            }
        };
        let omega = match (self.get("device.omega"), self.get("device.frequency")) {
            (Some(_), Some(_)) => return Err(err("give either device.omega or device.frequency, not both")),
            (Some(w), None) => w,
            (None, Some(f)) => 2.0 * std::f64::consts::PI * f,
            (None, None) => need("device.omega"),
        };
        let capacitance = match (self.get("device.capacitance"), self.get("device.plate_area")) {
            (Some(_), Some(_)) => return Err(err("give either device.capacitance or device.plate_area, not both")),
            (Some(c), None) => Capacitance::Farads(c),
            (None, Some(a)) => Capacitance::PlateArea(a),
            (None, None) => Capacitance::Farads(need("device.capacitance")),
        };
        let params = KlystronParams {
            omega,
            gap_width: need("device.gap_width"),
            capacitance,
            volume: need("device.volume"),
            box_length: need("device.box_length"),
            drift_length: need("device.drift_length"),
            velocity: need("beam.velocity"),
            electrons: need("beam.electrons"),
            photons: need("cavity.photons"),
        };
        if missing.is_empty() {
            Ok(params)
        } else {
            Err(err(format!("missing required parameter(s): {}", missing.join(", "))))
        }
    }
}

fn parse_number(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|_| format!("`{text}` is not a number"))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

/// `"<number> <unit>"` with exactly the expected unit.
pub fn parse_quantity(text: &str, unit: &str) -> Result<f64, String> {
    let mut parts = text.split_whitespace();
    let number = parts.next().ok_or_else(|| "empty value".to_string())?;
    let value = parse_number(number)?;
    match (parts.next(), parts.next()) {
        (Some(u), None) if u == unit => Ok(value),
        (Some(u), None) => Err(format!("unit `{u}` not accepted, expected `{unit}`")),
        (None, _) => Err(format!("missing unit suffix, expected `{number} {unit}`")),
        (Some(_), Some(_)) => Err(format!("unexpected text after the unit in `{text}`")),
    }
}

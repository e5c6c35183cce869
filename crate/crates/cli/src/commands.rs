use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use qklyst_core::design::{design_for, sweep_gain, sweep_rates, RateAxis};
use qklyst_core::klystron::{Capacitance, Klystron};
use qklyst_core::oracle::{
    box_size_sensitivity, log_schedule, photon_number_exponent, verify_expansion, verify_golden_rule,
    verify_matrix_elements, verify_ppt_equivalence, verify_rate_identity, verify_rate_identity_randomized,
    GoldenRuleSetup, RegulatorSchedule, VerificationReport,
};
use qklyst_core::quantum_state::{
    amplify_channel, bell_state, concurrence, werner_p, werner_state, BellKind, Spin, WernerConvention, WernerSpec,
};

use crate::config::{axis_unit, RunConfig};
use crate::{Format, RatesArgs, Suite, WernerArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Physical(String),
    #[error("{0}")]
    Range(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Physical(_) => 3,
            CliError::Range(_) => 4,
        }
    }
}

impl From<qklyst_core::Error> for CliError {
    fn from(e: qklyst_core::Error) -> Self {
        use qklyst_core::Error as E;
        match e {
            E::PhysicalValidity(_) => CliError::Physical(e.to_string()),
            E::OutOfRange { .. } => CliError::Range(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Usage(e.message)
    }
}

/// Writes `text` to `path`, or to standard output.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("cannot encode JSON: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("cannot encode CSV: {e}"));
    writer.write_record(header).map_err(io)?;
    for row in rows {
        writer.write_record(&row).map_err(io)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Io(format!("cannot encode CSV: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Shortest round-trip text for a CSV cell: positional for moderate
/// magnitudes, exponent form otherwise. Never locale-dependent.
pub fn csv_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

#[derive(Serialize)]
struct GainRow {
    gamma: f64,
    g: f64,
}

#[derive(Serialize)]
struct GainCurve {
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
    rows: Vec<GainRow>,
}

pub fn gain_curve(gamma_min: f64, gamma_max: f64, steps: usize, out: Format) -> Result<String, CliError> {
    let rows = sweep_gain(gamma_min, gamma_max, steps)?;
    match out {
        Format::Csv => to_csv(
            &["gamma", "g"],
            rows.iter().map(|(x, g)| vec![csv_float(*x), csv_float(*g)]),
        ),
        Format::Json => to_json(&GainCurve {
            gamma_min,
            gamma_max,
            steps,
            rows: rows.into_iter().map(|(gamma, g)| GainRow { gamma, g }).collect(),
        }),
    }
}

pub fn design(frequency: f64, gap_width: f64, gamma: Option<f64>) -> Result<String, CliError> {
    to_json(&design_for(frequency, gap_width, gamma)?)
}

#[derive(Serialize)]
struct RateRow {
    value: f64,
    stimulated_per_s: f64,
    spontaneous_per_s: f64,
    total_per_s: f64,
}

#[derive(Serialize)]
struct RateTable {
    axis: &'static str,
    axis_unit: &'static str,
    warnings: Vec<String>,
    rows: Vec<RateRow>,
}

/// Merges the config file (explicit path, else `env_config`) with flags.
fn rates_config(args: &RatesArgs, env_config: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let mut config = match args.config.clone().or(env_config) {
        Some(path) => RunConfig::from_file(&path)?,
        None => RunConfig::default(),
    };
    let flags = [
        ("device.omega", args.omega),
        ("device.frequency", args.frequency),
        ("device.gap_width", args.gap_width),
        ("device.capacitance", args.capacitance),
        ("device.plate_area", args.plate_area),
        ("device.volume", args.volume),
        ("device.box_length", args.box_length),
        ("device.drift_length", args.drift_length),
        ("beam.velocity", args.velocity),
        ("beam.electrons", args.electrons),
        ("cavity.photons", args.photons),
        ("sweep.start", args.sweep_start),
        ("sweep.stop", args.sweep_stop),
        ("sweep.steps", args.sweep_steps.map(|s| s as f64)),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, v);
        }
    }
    // A flag for one of two alternative keys overrides the other one from the file.
    if args.omega.is_some() {
        config.remove("device.frequency");
    }
    if args.frequency.is_some() {
        config.remove("device.omega");
    }
    if args.capacitance.is_some() {
        config.remove("device.plate_area");
    }
    if args.plate_area.is_some() {
        config.remove("device.capacitance");
    }
    if let Some(axis) = &args.sweep_axis {
        config.set_axis(RateAxis::from_name(axis)?);
    }
    Ok(config)
}

pub fn rates(args: &RatesArgs, env_config: Option<PathBuf>) -> Result<String, CliError> {
    let config = rates_config(args, env_config)?;
    let params = config.params()?;
    let device = Klystron::new(params)?;
    for w in device.warnings() {
        eprintln!("qklyst: warning: {w}");
    }
    let (axis, rows) = match config.axis() {
        None => {
            if config.get("sweep.start").is_some() || config.get("sweep.stop").is_some() {
                return Err(CliError::Usage("sweep bounds given without a sweep axis".into()));
            }
            (RateAxis::Omega, vec![(params.omega, device.rate_total())])
        }
        Some(axis) => {
            let start = config.get("sweep.start");
            let stop = config.get("sweep.stop");
            let (Some(start), Some(stop)) = (start, stop) else {
                return Err(CliError::Usage("a sweep needs both sweep.start and sweep.stop".into()));
            };
            let steps = config.get("sweep.steps").unwrap_or(11.0);
            if steps < 1.0 || steps.fract() != 0.0 {
                return Err(CliError::Usage(format!(
                    "sweep.steps must be a positive integer, got {steps}"
                )));
            }
            let mut rows = Vec::new();
            for row in sweep_rates(&params, axis, start, stop, steps as usize)? {
                let rates = row.rates.map_err(|e| {
                    CliError::from(e).with_context(&format!("sweep row {} = {}", axis.name(), row.value))
                })?;
                rows.push((row.value, rates));
            }
            (axis, rows)
        }
    };
    match args.out {
        Format::Csv => to_csv(
            &["axis", "stimulated", "spontaneous", "total"],
            rows.iter().map(|(v, r)| {
                vec![
                    csv_float(*v),
                    csv_float(r.stimulated),
                    csv_float(r.spontaneous),
                    csv_float(r.total),
                ]
            }),
        ),
        Format::Json => to_json(&RateTable {
            axis: axis.name(),
            axis_unit: axis_unit(axis).unwrap_or("1"),
            warnings: device.warnings().to_vec(),
            rows: rows
                .into_iter()
                .map(|(value, r)| RateRow {
                    value,
                    stimulated_per_s: r.stimulated,
                    spontaneous_per_s: r.spontaneous,
                    total_per_s: r.total,
                })
                .collect(),
        }),
    }
}

impl CliError {
    fn with_context(self, context: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{context}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{context}: {m}")),
            CliError::Physical(m) => CliError::Physical(format!("{context}: {m}")),
            CliError::Range(m) => CliError::Range(format!("{context}: {m}")),
        }
    }
}

#[derive(Serialize)]
struct AmplifyOutput {
    /// Row-major 4×4 matrix of `[re, im]` pairs over XX, XY, YX, YY.
    density_matrix: Vec<Vec<[f64; 2]>>,
    concurrence: f64,
}

pub fn amplify(bell: BellKind, n: u32, eta: f64) -> Result<String, CliError> {
    let rho = amplify_channel(&bell_state(bell), n, eta)?;
    let density_matrix = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let z = rho.entry(i, j);
                    // Normalise -0.0 so output does not depend on rounding direction.
                    [z.re + 0.0, z.im + 0.0]
                })
                .collect()
        })
        .collect();
    to_json(&AmplifyOutput {
        density_matrix,
        concurrence: concurrence(&rho),
    })
}

#[derive(Serialize)]
struct WernerOutput {
    p: f64,
    concurrence: f64,
    entangled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    convention: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

pub fn werner(args: &WernerArgs) -> Result<String, CliError> {
    let (p, convention) = match (args.si, args.sm, args.sf, args.p) {
        (Some(si), Some(sm), Some(sf), None) => {
            let convention = args.convention.unwrap_or_default();
            let spec = WernerSpec::new(Spin::from_f64(si)?, Spin::from_f64(sm)?, Spin::from_f64(sf)?)
                .with_convention(convention);
            (werner_p(&spec)?, Some(convention))
        }
        (None, None, None, Some(p)) => (p, None),
        _ => return Err(CliError::Usage("give either --si, --sm and --sf, or --p".into())),
    };
    let rho = werner_state(p, args.bell)?;
    let c = concurrence(&rho);
    let note = (convention == Some(WernerConvention::AsPrinted)).then(|| {
        "as-printed sign of the S_M(S_M+1) term: gives p = 0 for the S_I = 0, S_M = 1/2, S_F = 0 cascade, \
         which is maximally entangled (p = 1) under the example-consistent convention"
            .to_string()
    });
    to_json(&WernerOutput {
        p,
        concurrence: c,
        entangled: c > 0.0,
        convention: convention.map(|c| match c {
            WernerConvention::AsPrinted => "as-printed",
            WernerConvention::ExampleConsistent => "example-consistent",
        }),
        note,
    })
}

const QUADRATURE_SEED: u64 = 0x5eed_0001;
const IDENTITY_SEED: u64 = 0x5eed_0002;
const PPT_SEED: u64 = 0x5eed_0003;

fn identity_stress_report() -> Result<VerificationReport, CliError> {
    // Photon frequency 10⁶ × 1 GHz with a beam fast enough to keep α < 1.
    let omega = 2.0 * std::f64::consts::PI * 1e15;
    let velocity = 2e7;
    let params = qklyst_core::klystron::KlystronParams {
        omega,
        gap_width: 2.0 * 4.09 * velocity / omega,
        capacitance: Capacitance::PlateArea(1e-4),
        volume: 1e-6,
        box_length: 1e-2,
        drift_length: 5e-3,
        velocity,
        electrons: 1e6,
        photons: 10.0,
    };
    let mut report = verify_rate_identity(&params)?;
    report.name = "rate_identity_extreme_frequency".into();
    Ok(report)
}

/// Runs the selected suites; the flag is true iff every check passed.
pub fn verify(suite: Suite, force_tolerance: Option<f64>) -> Result<(String, bool), CliError> {
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let mut reports = Vec::new();
    if wants(Suite::Quadrature) {
        reports.push(verify_matrix_elements(20, QUADRATURE_SEED)?.0);
    }
    if wants(Suite::GoldenRule) {
        let setup = GoldenRuleSetup::default();
        let schedule = RegulatorSchedule::default();
        reports.push(verify_golden_rule(&setup, &schedule));
        reports.push(box_size_sensitivity(&setup, &schedule));
        reports.push(photon_number_exponent(&setup, &schedule, &[0, 1, 2, 3]));
    }
    if wants(Suite::Expansion) {
        reports.extend(verify_expansion(1e7, &log_schedule(5e-2, 5e-5, 10))?.reports);
    }
    if wants(Suite::Identity) {
        reports.push(verify_rate_identity_randomized(100, IDENTITY_SEED)?);
        reports.push(identity_stress_report()?);
    }
    if wants(Suite::Ppt) {
        reports.push(verify_ppt_equivalence(500, PPT_SEED)?);
    }
    if let Some(t) = force_tolerance {
        reports = reports.into_iter().map(|r| r.with_tolerance(t)).collect();
    }
    for r in &reports {
        eprintln!(
            "{} {}: relative error {:e} (tolerance {:e})",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.relative_error,
            r.tolerance
        );
    }
    let passed = reports.iter().all(|r| r.passed);
    Ok((to_json(&reports)?, passed))
}

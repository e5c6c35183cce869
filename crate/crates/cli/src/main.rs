//! `qklyst` command-line front end.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or I/O
//! error, 3 physically invalid operating point, 4 model result out of range.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qklyst",
    version,
    about = "Reflex-klystron amplification of polarization-entangled photon pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Quadrature,
    GoldenRule,
    Expansion,
    Identity,
    Ppt,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the gain factor g(γ) = (γ cot γ − 1) sin⁴γ.
    GainCurve {
        /// Lower end of the (open) γ window.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gamma_min: f64,
        /// Upper end of the γ window; defaults to 4π.
        #[arg(long, default_value_t = 4.0 * std::f64::consts::PI)]
        gamma_max: f64,
        /// Number of samples (at least 2).
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
        /// Write to this file instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve beam speed, acceleration voltage and α for a photon frequency and gap width.
    Design {
        /// Photon frequency f in Hz (ω = 2πf).
        #[arg(long)]
        frequency: f64,
        /// Gap width d in m.
        #[arg(long)]
        gap_width: f64,
        /// Transit angle to design for; defaults to the gain peak on (0, 2π].
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Photon-pair output rates for a device, optionally swept over one parameter.
    Rates(Box<RatesArgs>),
    /// Reduced photon state after one amplification step.
    Amplify {
        #[arg(long, value_parser = parse_bell)]
        bell: qklyst_core::quantum_state::BellKind,
        /// Photons already stored per rail (at least 1).
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Overlap between electron final states of distinguishable branches, in [0, 1].
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Werner state of an Auger cascade or of a given mixing parameter p.
    Werner(WernerArgs),
    /// Run the independent verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Replace every check's tolerance (testing the exit-code path).
        #[arg(long, hide = true, allow_negative_numbers = true)]
        force_tolerance: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Config file; defaults to $QKLYST_CONFIG when set.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Photon angular frequency ω, rad/s.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Photon frequency f, Hz (alternative to --omega).
    #[arg(long, conflicts_with = "omega")]
    pub frequency: Option<f64>,
    /// Gap width d, m.
    #[arg(long)]
    pub gap_width: Option<f64>,
    /// Gap capacitance C, F.
    #[arg(long)]
    pub capacitance: Option<f64>,
    /// Plate area A, m² (C = ε₀A/d; alternative to --capacitance).
    #[arg(long, conflicts_with = "capacitance")]
    pub plate_area: Option<f64>,
    /// Quantization volume V, m³.
    #[arg(long)]
    pub volume: Option<f64>,
    /// Quantization box length L, m.
    #[arg(long)]
    pub box_length: Option<f64>,
    /// Drift length l, m.
    #[arg(long)]
    pub drift_length: Option<f64>,
    /// Electron speed v, m/s.
    #[arg(long)]
    pub velocity: Option<f64>,
    /// Electrons per beam N.
    #[arg(long)]
    pub electrons: Option<f64>,
    /// Stored photons per mode n.
    #[arg(long)]
    pub photons: Option<f64>,
    /// Swept parameter: omega, d, v, n or N.
    #[arg(long)]
    pub sweep_axis: Option<String>,
    /// First swept value, SI units of the axis.
    #[arg(long)]
    pub sweep_start: Option<f64>,
    /// Last swept value, SI units of the axis.
    #[arg(long)]
    pub sweep_stop: Option<f64>,
    /// Number of sweep rows.
    #[arg(long)]
    pub sweep_steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub out: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WernerArgs {
    /// Spin of the initial atom S_I.
    #[arg(long, requires_all = ["sm", "sf"], conflicts_with = "p")]
    pub si: Option<f64>,
    /// Spin of the intermediate ion S_M.
    #[arg(long, requires_all = ["si", "sf"])]
    pub sm: Option<f64>,
    /// Spin of the final ion S_F.
    #[arg(long, requires_all = ["si", "sm"])]
    pub sf: Option<f64>,
    #[arg(long, value_parser = parse_convention, requires = "si")]
    pub convention: Option<qklyst_core::quantum_state::WernerConvention>,
    /// Mixing parameter p in [0, 1].
    #[arg(long, required_unless_present = "si")]
    pub p: Option<f64>,
    /// Bell state of the entangled component.
    #[arg(long, value_parser = parse_bell, default_value = "PsiMinus")]
    pub bell: qklyst_core::quantum_state::BellKind,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_bell(s: &str) -> Result<qklyst_core::quantum_state::BellKind, String> {
    s.parse().map_err(|e: qklyst_core::Error| e.to_string())
}

fn parse_convention(s: &str) -> Result<qklyst_core::quantum_state::WernerConvention, String> {
    s.parse().map_err(|e: qklyst_core::Error| e.to_string())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (text, output, success) = match cli.command {
        Command::GainCurve {
            gamma_min,
            gamma_max,
            steps,
            out,
            output,
        } => (commands::gain_curve(gamma_min, gamma_max, steps, out)?, output, true),
        Command::Design {
            frequency,
            gap_width,
            gamma,
            output,
        } => (commands::design(frequency, gap_width, gamma)?, output, true),
        Command::Rates(args) => {
            let env = std::env::var_os("QKLYST_CONFIG").map(PathBuf::from);
            let text = commands::rates(&args, env)?;
            (text, args.output, true)
        }
        Command::Amplify { bell, n, eta, output } => (commands::amplify(bell, n, eta)?, output, true),
        Command::Werner(args) => {
            let text = commands::werner(&args)?;
            (text, args.output, true)
        }
        Command::Verify {
            suite,
            output,
            force_tolerance,
        } => {
            let (text, passed) = commands::verify(suite, force_tolerance)?;
            (text, output, passed)
        }
    };
    commands::emit(output.as_deref(), &text)?;
    Ok(success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qklyst: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `fcsim`: functional-compression toolbox for the water-tank control loop.
//!
//! Subcommands: `demo` (worked two-source example with self-check),
//! `analyze` (compile a pipeline and report rates/table sizes), `simulate`
//! (closed-loop tank runs), `sweep` (bit-width grid with timing and
//! compression).
//!
//! Exit codes: 0 ok, 1 usage error, 2 compile/runtime failure, 3 demo
//! self-check mismatch.

mod analyze;
mod config;
mod demo;
mod simulate;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use config::{parse_bits_span, parse_gains, parse_range, ControllerArg, OutputFormat, RunConfig};
use fc_core::{PidGains, Topology};

/// Errors a command can surface, with their process exit codes.
#[derive(Debug)]
pub enum CmdError {
    /// Configuration or pipeline compilation failed (exit 2).
    Compile(String),
    /// I/O failure while writing outputs (exit 2).
    Io(std::io::Error),
    /// The demo self-check found a value off its expected one (exit 3).
    Mismatch(String),
}

impl CmdError {
    fn compile(e: fc_core::Error) -> Self {
        CmdError::Compile(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e)
    }
}

#[derive(Parser)]
#[command(name = "fcsim", version, about = "functional compression for in-network control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; unset flags fall back to the config
/// file (when given) and then to built-in defaults.
#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Topology to compile (analyze).
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,

    /// Valve quantizer bit width (defaults to --bits).
    #[arg(long)]
    output_bits: Option<u32>,

    /// Simulation steps T.
    #[arg(long)]
    steps: Option<usize>,

    /// Euler step, seconds.
    #[arg(long)]
    dt: Option<f64>,

    /// Desired level, meters.
    #[arg(long)]
    setpoint: Option<f64>,

    /// PID gains as kp,ki,kd.
    #[arg(long, value_parser = parse_gains)]
    gains: Option<PidGains>,

    /// Proportional-error quantizer range as lo:hi.
    #[arg(long, value_parser = parse_range)]
    range_e: Option<(f64, f64)>,

    /// Integral-error quantizer range as lo:hi.
    #[arg(long, value_parser = parse_range)]
    range_ei: Option<(f64, f64)>,

    /// Derivative-error quantizer range as lo:hi.
    #[arg(long, value_parser = parse_range)]
    range_ed: Option<(f64, f64)>,

    /// Seed for randomized measurement streams.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Trajectory export format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Also dump decoder tables in the binary format.
    #[arg(long, action = ArgAction::SetTrue)]
    dump_lut: bool,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Simple,
    Cascaded,
}

impl From<ModeArg> for Topology {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Simple => Topology::Simple,
            ModeArg::Cascaded => Topology::Cascaded,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Worked two-source example with self-checked expected values.
    Demo {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compile a pipeline and report rates, entropies, and table sizes.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Source bit width b.
        #[arg(long)]
        bits: Option<u32>,
    },
    /// Run the closed-loop water tank under the selected controller(s).
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Source bit width b.
        #[arg(long)]
        bits: Option<u32>,
        /// Controller to drive the loop with.
        #[arg(long, value_enum)]
        controller: Option<ControllerArg>,
    },
    /// Grid over bit widths and topologies with timing and compression.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Bit-width span, e.g. 4-8 or a single value.
        #[arg(long = "bits", value_parser = parse_bits_span)]
        bits_span: Option<(u32, u32)>,
    },
}

fn resolve(common: &CommonArgs, bits: Option<u32>) -> Result<RunConfig, CmdError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path).map_err(CmdError::Compile)?,
        None => RunConfig::default(),
    };
    if let Some(m) = common.mode {
        cfg.mode = m.into();
    }
    if let Some(b) = bits {
        cfg.bits = b;
    }
    if let Some(b) = common.output_bits {
        cfg.output_bits = Some(b);
    }
    if let Some(g) = common.gains {
        cfg.gains = g;
    }
    if let Some(r) = common.range_e {
        cfg.range_e = r;
    }
    if let Some(r) = common.range_ei {
        cfg.range_ei = r;
    }
    if let Some(r) = common.range_ed {
        cfg.range_ed = r;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    if common.dump_lut {
        cfg.dump_lut = true;
    }
    cfg.apply_tank_flags(common.steps, common.dt, common.setpoint);
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Demo { common } => demo::run(&resolve(&common, None)?),
        Command::Analyze { common, bits } => analyze::run(&resolve(&common, bits)?),
        Command::Simulate {
            common,
            bits,
            controller,
        } => {
            let mut cfg = resolve(&common, bits)?;
            if let Some(c) = controller {
                cfg.controller = c;
            }
            simulate::run(&cfg)
        }
        Command::Sweep { common, bits_span } => {
            let cfg = resolve(&common, None)?;
            sweep::run(&cfg, bits_span.unwrap_or((4, 8)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Compile(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(2)
        }
        Err(CmdError::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
    }
}

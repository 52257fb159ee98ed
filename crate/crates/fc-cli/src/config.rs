//! Effective run configuration: defaults, optional JSON config file, flags
//! on top. Every command writes the resolved configuration (including the
//! calibrated quantizer ranges actually in effect) as `manifest.json` next
//! to its outputs, so a run can be reproduced from the manifest alone.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fc_core::plant::{ControllerKind, TankParams, DEFAULT_ED_RANGE, DEFAULT_EI_RANGE, DEFAULT_E_RANGE};
use fc_core::{PidGains, PipelineConfig, Quantizer, Topology};

/// Trajectory export format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Controller selection for `simulate`, including the side-by-side mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum ControllerArg {
    Direct,
    DirectQuantized,
    SimpleFc,
    CascadedFc,
    Both,
}

impl ControllerArg {
    /// The concrete controllers this selection runs.
    pub fn kinds(&self) -> Vec<ControllerKind> {
        match self {
            ControllerArg::Direct => vec![ControllerKind::Direct],
            ControllerArg::DirectQuantized => vec![ControllerKind::DirectQuantized],
            ControllerArg::SimpleFc => vec![ControllerKind::SimpleFc],
            ControllerArg::CascadedFc => vec![ControllerKind::CascadedFc],
            ControllerArg::Both => vec![ControllerKind::SimpleFc, ControllerKind::CascadedFc],
        }
    }
}

/// Everything a run depends on. Serializable as-is into the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub mode: Topology,
    pub bits: u32,
    /// Valve quantizer bits; defaults to `bits`.
    pub output_bits: Option<u32>,
    /// Intermediate-node bits (cascade); defaults to `bits`.
    pub intermediate_bits: Option<u32>,
    pub gains: PidGains,
    pub range_e: (f64, f64),
    pub range_ei: (f64, f64),
    pub range_ed: (f64, f64),
    pub tank: TankParams,
    pub controller: ControllerArg,
    pub seed: u64,
    pub format: OutputFormat,
    pub dump_lut: bool,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Topology::Simple,
            bits: 7,
            output_bits: None,
            intermediate_bits: None,
            gains: PidGains::default(),
            range_e: DEFAULT_E_RANGE,
            range_ei: DEFAULT_EI_RANGE,
            range_ed: DEFAULT_ED_RANGE,
            tank: TankParams::default(),
            controller: ControllerArg::SimpleFc,
            seed: 42,
            format: OutputFormat::Csv,
            dump_lut: false,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Load a JSON config file as the starting point.
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let raw = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&raw).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    pub fn effective_output_bits(&self) -> u32 {
        self.output_bits.unwrap_or(self.bits)
    }

    /// Assemble the pipeline configuration for a topology.
    pub fn pipeline_config(&self, topology: Topology) -> fc_core::Result<PipelineConfig> {
        Ok(PipelineConfig {
            topology,
            gains: self.gains,
            source_quantizers: [
                Quantizer::new(self.range_e.0, self.range_e.1, self.bits)?,
                Quantizer::new(self.range_ei.0, self.range_ei.1, self.bits)?,
                Quantizer::new(self.range_ed.0, self.range_ed.1, self.bits)?,
            ],
            output_quantizer: Quantizer::new(0.0, 100.0, self.effective_output_bits())?,
            intermediate_bits: self.intermediate_bits,
        })
    }

    /// Sync the tank's gain-independent fields that have dedicated flags.
    pub fn apply_tank_flags(&mut self, steps: Option<usize>, dt: Option<f64>, setpoint: Option<f64>) {
        if let Some(s) = steps {
            self.tank.steps = s;
        }
        if let Some(dt) = dt {
            self.tank.dt = dt;
        }
        if let Some(s) = setpoint {
            self.tank.setpoint = s;
        }
    }
}

/// Manifest written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub args: Option<serde_json::Value>,
    pub config: &'a RunConfig,
}

/// Create the output directory and write `manifest.json` into it.
pub fn write_manifest(command: &str, config: &RunConfig) -> std::io::Result<()> {
    write_manifest_with(command, config, None)
}

/// Manifest variant for commands with arguments outside [`RunConfig`]
/// (currently the sweep's bit span).
pub fn write_manifest_with(
    command: &str,
    config: &RunConfig,
    args: Option<serde_json::Value>,
) -> std::io::Result<()> {
    fs::create_dir_all(&config.out)?;
    let manifest = Manifest {
        tool: "fcsim",
        version: env!("CARGO_PKG_VERSION"),
        command,
        args,
        config,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(config.out.join("manifest.json"), json)
}

/// Parse `kp,ki,kd`.
pub fn parse_gains(s: &str) -> Result<PidGains, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected kp,ki,kd — got `{s}`"));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|e| format!("bad gains `{s}`: {e}"))?;
    Ok(PidGains::new(nums[0], nums[1], nums[2]))
}

/// Parse `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("expected lo:hi — got `{s}`"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e| format!("bad lo: {e}"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| format!("bad hi: {e}"))?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

/// Parse a bit-width span: `4-8`, `7`, or `4..8`.
pub fn parse_bits_span(s: &str) -> Result<(u32, u32), String> {
    let norm = s.replace("..", "-");
    if let Some((a, b)) = norm.split_once('-') {
        let lo: u32 = a.trim().parse().map_err(|e| format!("bad bits `{s}`: {e}"))?;
        let hi: u32 = b.trim().parse().map_err(|e| format!("bad bits `{s}`: {e}"))?;
        if lo > hi {
            return Err(format!("empty bits span `{s}`"));
        }
        Ok((lo, hi))
    } else {
        let v: u32 = norm.trim().parse().map_err(|e| format!("bad bits `{s}`: {e}"))?;
        Ok((v, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_parsers() {
        let g = parse_gains("-40,-0.05,-2").unwrap();
        assert_eq!((g.kp, g.ki, g.kd), (-40.0, -0.05, -2.0));
        assert!(parse_gains("1,2").is_err());
        assert_eq!(parse_range("-11.3:1.3").unwrap(), (-11.3, 1.3));
        assert!(parse_range("3:3").is_err());
        assert_eq!(parse_bits_span("4-8").unwrap(), (4, 8));
        assert_eq!(parse_bits_span("7").unwrap(), (7, 7));
        assert!(parse_bits_span("8-4").is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.bits, cfg.bits);
        assert_eq!(back.range_e, cfg.range_e);
    }

    #[test]
    fn partial_config_files_fall_back_to_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"bits": 5}"#).unwrap();
        assert_eq!(cfg.bits, 5);
        assert_eq!(cfg.tank.steps, 80);
        assert_eq!(cfg.range_ed, DEFAULT_ED_RANGE);
    }
}

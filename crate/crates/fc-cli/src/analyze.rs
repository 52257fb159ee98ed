//! `fcsim analyze`: compile the selected pipeline and emit its report, with
//! optional decoder-table dumps. No simulation.

use std::fs;
use std::fs::File;
use std::io::BufWriter;

use fc_core::pipeline::compile;
use fc_core::Topology;

use crate::config::{write_manifest, RunConfig};
use crate::CmdError;

pub fn run(config: &RunConfig) -> Result<(), CmdError> {
    let pipeline_config = config
        .pipeline_config(config.mode)
        .map_err(CmdError::compile)?;
    let pipeline = compile(&pipeline_config).map_err(CmdError::compile)?;
    let report = pipeline.report();

    println!(
        "{} pipeline at {} source bits (compiled in {:.1} ms)",
        report.topology.as_str(),
        config.bits,
        pipeline.offline_time().as_secs_f64() * 1e3
    );
    println!("  source  raw  colors  codeword  entropy      compression");
    for s in &report.sources {
        println!(
            "  {:<6}  {:>3}  {:>6}  {:>8}  {:>10.6}  {:>10.4}%",
            s.name, s.bits, s.num_colors, s.codeword_len, s.entropy_bits, s.compression_pct
        );
    }
    println!(
        "  luts: {:?} entries (total {})",
        report.stage_lut_entries, report.total_lut_entries
    );
    println!(
        "  wire: {} of {} raw bits per sample (aggregate compression {:.2}%)",
        report.bits_per_sample, report.raw_bits_per_sample, report.aggregate_compression_pct
    );
    if let Some(m) = &report.intermediate {
        println!(
            "  intermediate: {} symbols over [{:.4}, {:.4}] at {} bits (step {:.4})",
            m.symbols, m.lo, m.hi, m.bits, m.step
        );
    }

    write_manifest("analyze", config)?;
    fs::write(
        config.out.join("pipeline_report.json"),
        serde_json::to_string_pretty(&report).map_err(|e| CmdError::compile(e.into()))?,
    )?;

    if config.dump_lut {
        let names: &[&str] = match config.mode {
            Topology::Simple => &["lut_destination.bin"],
            Topology::Cascaded => &["lut_stage1.bin", "lut_stage2.bin"],
        };
        for (stage, name) in pipeline.stages().iter().zip(names) {
            let path = config.out.join(name);
            let mut w = BufWriter::new(File::create(&path)?);
            stage
                .lut
                .write_binary(&mut w, stage.output.bits())
                .map_err(CmdError::compile)?;
            println!("wrote {}", path.display());
        }
    }
    println!(
        "wrote {}",
        config.out.join("pipeline_report.json").display()
    );
    Ok(())
}

//! `fcsim sweep`: the bit-width grid over both topologies with offline and
//! online timing, compression figures, table sizes, and SVG figures.

use std::fs;

use fc_core::bench::{sweep, SweepOptions, SweepReport};
use fc_core::svg::{render, Panel, Series};
use fc_core::Topology;

use crate::config::{write_manifest_with, RunConfig};
use crate::CmdError;

fn series_over_bits(
    report: &SweepReport,
    mode: Topology,
    value: impl Fn(&fc_core::bench::SweepCell) -> f64,
) -> Series {
    Series::new(
        mode.as_str(),
        report
            .cells
            .iter()
            .filter(|c| c.mode == mode)
            .map(|c| (c.bits as f64, value(c)))
            .collect::<Vec<_>>(),
    )
}

pub fn run(config: &RunConfig, span: (u32, u32)) -> Result<(), CmdError> {
    let options = SweepOptions {
        seed: config.seed,
        ..SweepOptions::default()
    };
    let modes = [Topology::Simple, Topology::Cascaded];
    println!(
        "sweeping bits {}..={} over {{simple, cascaded}} (seed {})",
        span.0, span.1, options.seed
    );
    let report = sweep(span.0..=span.1, &modes, &options);

    println!("bits  mode       offline_ms   online_ns  comp_e   comp_ei  comp_ed  aggregate  lut_entries");
    for c in &report.cells {
        println!(
            "{:>4}  {:<9}  {:>10.3}  {:>9.1}  {:>6.2}  {:>7.2}  {:>7.2}  {:>8.2}  {:>11}{}",
            c.bits,
            c.mode.as_str(),
            c.offline_ms,
            c.online_ns,
            c.comp_e,
            c.comp_ei,
            c.comp_ed,
            c.comp_aggregate,
            c.lut_entries,
            if c.flagged_negative { "  [negative compression]" } else { "" }
        );
    }
    for f in &report.failures {
        eprintln!(
            "cell failed: bits={} mode={}: {}",
            f.bits,
            f.mode.as_str(),
            f.error
        );
    }

    write_manifest_with(
        "sweep",
        config,
        Some(serde_json::json!({ "bits_span": [span.0, span.1] })),
    )?;
    fs::write(config.out.join("sweep.csv"), report.to_csv())?;
    fs::write(
        config.out.join("sweep.json"),
        report.to_json().map_err(CmdError::compile)?,
    )?;

    let times = [
        Panel {
            title: "offline time (table + coloring build)".into(),
            x_label: "source bits".into(),
            y_label: "ms".into(),
            series: modes
                .iter()
                .map(|&m| series_over_bits(&report, m, |c| c.offline_ms))
                .collect(),
            log_y: true,
        },
        Panel {
            title: "online time per sample".into(),
            x_label: "source bits".into(),
            y_label: "ns".into(),
            series: modes
                .iter()
                .map(|&m| series_over_bits(&report, m, |c| c.online_ns))
                .collect(),
            log_y: true,
        },
    ];
    fs::write(config.out.join("sweep_times.svg"), render(&times))?;

    let compression = [
        Panel {
            title: "aggregate compression (wire bits vs raw bits)".into(),
            x_label: "source bits".into(),
            y_label: "%".into(),
            series: modes
                .iter()
                .map(|&m| series_over_bits(&report, m, |c| c.comp_aggregate))
                .collect(),
            log_y: false,
        },
        Panel {
            title: "per-source compression, simple mode".into(),
            x_label: "source bits".into(),
            y_label: "%".into(),
            series: vec![
                series_over_bits(&report, Topology::Simple, |c| c.comp_e)
                    .rename("e"),
                series_over_bits(&report, Topology::Simple, |c| c.comp_ei)
                    .rename("ei"),
                series_over_bits(&report, Topology::Simple, |c| c.comp_ed)
                    .rename("ed"),
            ],
            log_y: false,
        },
    ];
    fs::write(
        config.out.join("sweep_compression.svg"),
        render(&compression),
    )?;
    println!("wrote {}", config.out.join("sweep.csv").display());
    println!("wrote {}", config.out.join("sweep.json").display());
    println!("wrote {}", config.out.join("sweep_times.svg").display());
    println!(
        "wrote {}",
        config.out.join("sweep_compression.svg").display()
    );

    if report.cells.is_empty() {
        return Err(CmdError::compile(fc_core::Error::MalformedDump(
            "every sweep cell failed".into(),
        )));
    }
    Ok(())
}

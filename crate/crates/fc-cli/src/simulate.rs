//! `fcsim simulate`: closed-loop runs of the water tank under the selected
//! controller(s), with CSV/JSON trajectories and an SVG figure of level,
//! valve, and (for `both`) the simple-vs-cascaded output difference.

use std::fmt::Write as _;
use std::fs;

use fc_core::plant::{run_controller, ControllerKind, Trajectory};
use fc_core::svg::{render, Panel, Series};
use fc_core::Topology;

use crate::config::{write_manifest, OutputFormat, RunConfig};
use crate::CmdError;

fn topology_for(kind: ControllerKind, fallback: Topology) -> Topology {
    match kind {
        ControllerKind::SimpleFc => Topology::Simple,
        ControllerKind::CascadedFc => Topology::Cascaded,
        _ => fallback,
    }
}

pub fn run(config: &RunConfig) -> Result<(), CmdError> {
    let kinds = config.controller.kinds();
    write_manifest("simulate", config)?;

    let mut runs: Vec<(ControllerKind, Trajectory)> = Vec::new();
    for kind in kinds {
        let pipeline_config = config
            .pipeline_config(topology_for(kind, config.mode))
            .map_err(CmdError::compile)?;
        let traj = run_controller(&config.tank, kind, &pipeline_config).map_err(CmdError::compile)?;
        println!(
            "{}: final level {:.4} m, tail deviation {:.4} m, {} bits on the wire",
            kind.as_str(),
            traj.final_level(),
            traj.tail_deviation(config.tank.setpoint, 0.25),
            traj.total_bits()
        );
        let path = match config.format {
            OutputFormat::Csv => {
                let p = config.out.join(format!("trajectory_{}.csv", kind.as_str()));
                fs::write(&p, traj.to_csv())?;
                p
            }
            OutputFormat::Json => {
                let p = config.out.join(format!("trajectory_{}.json", kind.as_str()));
                fs::write(
                    &p,
                    serde_json::to_string_pretty(&traj).map_err(|e| CmdError::compile(e.into()))?,
                )?;
                p
            }
        };
        println!("wrote {}", path.display());
        runs.push((kind, traj));
    }

    // Side-by-side CSV with the valve difference column when both FC modes ran.
    let pair = (
        runs.iter().find(|(k, _)| *k == ControllerKind::SimpleFc),
        runs.iter().find(|(k, _)| *k == ControllerKind::CascadedFc),
    );
    if let (Some((_, simple)), Some((_, cascaded))) = pair {
        let mut csv = String::from("t,h_simple,valve_simple,h_cascaded,valve_cascaded,valve_diff\n");
        for (a, b) in simple.records.iter().zip(&cascaded.records) {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                a.t,
                a.h,
                a.valve,
                b.h,
                b.valve,
                a.valve - b.valve
            );
        }
        let p = config.out.join("trajectory_both.csv");
        fs::write(&p, csv)?;
        println!("wrote {}", p.display());
    }

    // Figure: level and valve traces, plus the difference when applicable.
    let mut panels = vec![
        Panel {
            title: format!("water level (setpoint {} m)", config.tank.setpoint),
            x_label: "t [s]".into(),
            y_label: "h [m]".into(),
            series: runs
                .iter()
                .map(|(k, t)| {
                    Series::new(
                        k.as_str(),
                        t.records.iter().map(|r| (r.t, r.h)).collect(),
                    )
                })
                .collect(),
            log_y: false,
        },
        Panel {
            title: "valve command".into(),
            x_label: "t [s]".into(),
            y_label: "valve [%]".into(),
            series: runs
                .iter()
                .map(|(k, t)| {
                    Series::new(
                        k.as_str(),
                        t.records.iter().map(|r| (r.t, r.valve)).collect(),
                    )
                })
                .collect(),
            log_y: false,
        },
    ];
    if let (Some((_, simple)), Some((_, cascaded))) = pair {
        panels.push(Panel {
            title: "simple - cascaded valve difference".into(),
            x_label: "t [s]".into(),
            y_label: "diff [%]".into(),
            series: vec![Series::new(
                "valve_diff",
                simple
                    .records
                    .iter()
                    .zip(&cascaded.records)
                    .map(|(a, b)| (a.t, a.valve - b.valve))
                    .collect(),
            )],
            log_y: false,
        });
    }
    let svg_path = config.out.join("simulate.svg");
    fs::write(&svg_path, render(&panels))?;
    println!("wrote {}", svg_path.display());
    Ok(())
}

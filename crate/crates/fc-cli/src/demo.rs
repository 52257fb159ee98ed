//! `fcsim demo`: the two-source mod-sum worked example with self-checked
//! expected values. Exits nonzero if anything the example pins down — edge
//! sets, colorings, entropies, compression rates, or the decoder table —
//! comes out different.

use std::fs;

use serde::Serialize;

use fc_core::codec::{DecoderLut, Encoder};
use fc_core::graph::{to_dot, GraphReport};
use fc_core::graph::{greedy_color, CharacteristicGraph};
use fc_core::{Alphabet, OutcomeTable, TargetFunction};

use crate::config::{write_manifest, RunConfig};
use crate::CmdError;

#[derive(Serialize)]
struct DemoReport {
    x: GraphReport,
    y: GraphReport,
    lut: Vec<((usize, usize), u16)>,
    bits_per_sample: u32,
}

pub fn run(config: &RunConfig) -> Result<(), CmdError> {
    let alphabets = vec![
        Alphabet::uniform(vec![0.0, 1.0, 2.0, 3.0]).map_err(CmdError::compile)?,
        Alphabet::uniform(vec![0.0, 1.0]).map_err(CmdError::compile)?,
    ];
    let table =
        OutcomeTable::build(&TargetFunction::mod_sum(), &alphabets).map_err(CmdError::compile)?;

    let gx = CharacteristicGraph::build(&table, 0).map_err(CmdError::compile)?;
    let gy = CharacteristicGraph::build(&table, 1).map_err(CmdError::compile)?;
    let cx = greedy_color(&gx);
    let cy = greedy_color(&gy);
    let rx = GraphReport::new(&gx, &cx, &alphabets[0], 2).map_err(CmdError::compile)?;
    let ry = GraphReport::new(&gy, &cy, &alphabets[1], 1).map_err(CmdError::compile)?;

    let ex = Encoder::new(&cx);
    let ey = Encoder::new(&cy);
    let lut = DecoderLut::build(&table, &[cx.clone(), cy.clone()]).map_err(CmdError::compile)?;
    let mut lut_rows = Vec::new();
    for a in 0..cx.num_colors() {
        for b in 0..cy.num_colors() {
            lut_rows.push(((a, b), lut.decode(&[a, b]).map_err(CmdError::compile)?));
        }
    }

    println!("two-source demo: f(x, y) = (x + y) mod 2");
    println!(
        "  x over {{0,1,2,3}} (2 raw bits): edges {:?}",
        rx.edges
    );
    println!(
        "  source x: H = {} bit, colors = {}, codeword = {} bit, compression = {}%",
        rx.entropy_bits,
        rx.num_colors,
        ex.codeword_len(),
        rx.compression_pct
    );
    println!("  y over {{0,1}} (1 raw bit): edges {:?}", ry.edges);
    println!(
        "  source y: H = {} bit, colors = {}, codeword = {} bit, compression = {}%",
        ry.entropy_bits,
        ry.num_colors,
        ey.codeword_len(),
        ry.compression_pct
    );
    println!("  decoder lookup (color_x, color_y) -> output:");
    for ((a, b), out) in &lut_rows {
        println!("    ({a}, {b}) -> {out}");
    }

    // Expected values for the worked example, asserted exactly.
    let mut mismatches = Vec::new();
    let mut check = |what: &str, ok: bool| {
        if !ok {
            mismatches.push(what.to_string());
        }
    };
    check("G_x edge set", rx.edges == vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
    check("G_y edge set", ry.edges == vec![(0, 1)]);
    check("H(x) = 1 bit", rx.entropy_bits == 1.0);
    check("H(y) = 1 bit", ry.entropy_bits == 1.0);
    check("compression(x) = 50%", rx.compression_pct == 50.0);
    check("compression(y) = 0%", ry.compression_pct == 0.0);
    check("x coloring", rx.colors == vec![0, 1, 0, 1]);
    check("1-bit codewords", ex.codeword_len() == 1 && ey.codeword_len() == 1);
    check(
        "decoder table",
        lut_rows
            .iter()
            .map(|&(_, out)| out)
            .collect::<Vec<_>>()
            == vec![0, 1, 1, 0],
    );

    write_manifest("demo", config)?;
    fs::write(
        config.out.join("g_x.dot"),
        to_dot("g_x", &gx, &cx),
    )?;
    fs::write(
        config.out.join("g_y.dot"),
        to_dot("g_y", &gy, &cy),
    )?;
    let report = DemoReport {
        x: rx,
        y: ry,
        lut: lut_rows,
        bits_per_sample: ex.codeword_len() + ey.codeword_len(),
    };
    fs::write(
        config.out.join("demo_report.json"),
        serde_json::to_string_pretty(&report).map_err(|e| CmdError::compile(e.into()))?,
    )?;
    println!("wrote {}", config.out.join("demo_report.json").display());

    if mismatches.is_empty() {
        println!("demo check: all expected values reproduced");
        Ok(())
    } else {
        Err(CmdError::Mismatch(format!(
            "demo check failed: {}",
            mismatches.join(", ")
        )))
    }
}

//! Cross-module integration: the worked two-source example through the whole
//! coding chain, pipeline-vs-reference equivalence, and the wire-frame path.

use fc_core::codec::{pack_frame, unpack_frame, DecoderLut, Encoder};
use fc_core::graph::{chromatic_entropy, compression_rate, greedy_color, CharacteristicGraph};
use fc_core::pipeline::{
    compile_cascaded, compile_simple, quantized_pid_reference, two_stage_pid_reference,
    PipelineConfig, Topology,
};
use fc_core::{Alphabet, OutcomeTable, TargetFunction};

/// The mod-sum example end to end: graphs, colorings, entropies, decoder
/// table, and the frame-packed wire path all reproduce the expected numbers.
#[test]
fn mod_sum_through_the_whole_chain() {
    let alphabets = vec![
        Alphabet::uniform(vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
        Alphabet::uniform(vec![0.0, 1.0]).unwrap(),
    ];
    let table = OutcomeTable::build(&TargetFunction::mod_sum(), &alphabets).unwrap();
    assert_eq!(table.outputs(), &[0, 1, 1, 0, 0, 1, 1, 0]);

    let gx = CharacteristicGraph::build(&table, 0).unwrap();
    let gy = CharacteristicGraph::build(&table, 1).unwrap();
    assert_eq!(gx.num_edges(), 4);
    assert_eq!(gy.num_edges(), 1);

    let cx = greedy_color(&gx);
    let cy = greedy_color(&gy);
    assert_eq!(cx.num_colors(), 2);
    assert_eq!(cy.num_colors(), 2);

    let hx = chromatic_entropy(&cx, &alphabets[0]).unwrap();
    let hy = chromatic_entropy(&cy, &alphabets[1]).unwrap();
    assert_eq!(hx, 1.0);
    assert_eq!(hy, 1.0);
    assert_eq!(compression_rate(hx, 2), 50.0);
    assert_eq!(compression_rate(hy, 1), 0.0);

    let ex = Encoder::new(&cx);
    let ey = Encoder::new(&cy);
    let lut = DecoderLut::build(&table, &[cx, cy]).unwrap();
    assert_eq!(lut.len(), 4);

    // Whole domain over the wire: encode, pack, unpack, decode.
    for x in 0..4usize {
        for y in 0..2usize {
            let frame = pack_frame(&[ex.encode(x).unwrap(), ey.encode(y).unwrap()]);
            assert_eq!(frame.payload.len(), 1);
            let words = unpack_frame(&frame).unwrap();
            let colors: Vec<usize> = words.iter().map(|w| w.value as usize).collect();
            assert_eq!(lut.decode(&colors).unwrap(), table.lookup(&[x, y]));
        }
    }
}

#[test]
fn simple_pipeline_equals_reference_on_every_tuple_at_5_bits() {
    let cfg = PipelineConfig::default_for_bits(Topology::Simple, 5).unwrap();
    let p = compile_simple(&cfg).unwrap();
    let mids: Vec<Vec<f64>> = cfg.source_quantizers.iter().map(|q| q.midpoints()).collect();
    for &e in &mids[0] {
        for &ei in &mids[1] {
            for &ed in &mids[2] {
                let got = p.run_sample(e, ei, ed);
                let want = quantized_pid_reference(&cfg, e, ei, ed);
                assert_eq!(got.level, want.level);
                assert_eq!(got.valve, want.valve);
            }
        }
    }
}

#[test]
fn cascaded_pipeline_equals_two_stage_reference_on_every_tuple_at_5_bits() {
    let cfg = PipelineConfig::default_for_bits(Topology::Cascaded, 5).unwrap();
    let p = compile_cascaded(&cfg).unwrap();
    let m_q = *p.intermediate_quantizer().unwrap();
    let mids: Vec<Vec<f64>> = cfg.source_quantizers.iter().map(|q| q.midpoints()).collect();
    for &e in &mids[0] {
        for &ei in &mids[1] {
            for &ed in &mids[2] {
                let got = p.run_sample(e, ei, ed);
                let want = two_stage_pid_reference(&cfg, &m_q, e, ei, ed);
                assert_eq!(got.level, want.level);
                assert_eq!(got.valve, want.valve);
            }
        }
    }
}

/// The per-sample fast path must agree with the explicit encode → frame →
/// decode route, codeword lengths included.
#[test]
fn run_sample_agrees_with_the_framed_wire_path() {
    let cfg = PipelineConfig::default_for_bits(Topology::Simple, 5).unwrap();
    let p = compile_simple(&cfg).unwrap();
    let stage = &p.stages()[0];
    let q = &cfg.source_quantizers;

    for (e, ei, ed) in [
        (-10.0, -5.0, 2.0),
        (0.0, 0.0, 0.0),
        (1.2, 0.2, 5.0),
        (-900.0, 900.0, 0.0), // saturating inputs still travel fine
    ] {
        let symbols = [q[0].quantize(e), q[1].quantize(ei), q[2].quantize(ed)];
        let codewords: Vec<_> = symbols
            .iter()
            .zip(&stage.sources)
            .map(|(&s, src)| src.encoder.encode(s).unwrap())
            .collect();
        let frame = pack_frame(&codewords);
        let received = unpack_frame(&frame).unwrap();
        let colors: Vec<usize> = received.iter().map(|w| w.value as usize).collect();
        let level = stage.lut.decode(&colors).unwrap();

        let fast = p.run_sample(e, ei, ed);
        assert_eq!(level, fast.level);
        let frame_bits: u32 = frame.layout.iter().sum();
        assert_eq!(frame_bits, fast.bits_on_wire);
    }
}

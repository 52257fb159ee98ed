//! Compiled compression pipelines for the two network topologies.
//!
//! Simple topology: each of the three error sources builds its own
//! characteristic graph against the full PID outcome table, colors it, and
//! sends its color straight to the destination, which resolves one
//! three-coordinate lookup table.
//!
//! Cascaded topology: the proportional and integral sources feed an
//! intermediate node that computes the unclamped first stage `kp*e + ki*ei`.
//! The distinct quantized stage outputs become the symbols of a new source
//! `m` (with the exactly induced, generally non-uniform distribution), which
//! then pairs with the derivative source in a second two-source stage
//! producing the valve level. Both stages compile the same way, so the
//! destination output is bit-exact with respect to a two-stage quantized
//! reference computation.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::codec::{DecoderLut, Encoder};
use crate::error::Result;
use crate::graph::{chromatic_entropy, compression_rate, greedy_color, CharacteristicGraph, Coloring};
use crate::plant;
use crate::quantize::{Alphabet, Quantizer};
use crate::target::{OutcomeTable, OutputSet, PidGains, TargetFunction};

/// Network layout a pipeline is compiled for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Simple,
    Cascaded,
}

impl Topology {
    pub fn as_str(&self) -> &'static str {
        match self {
            Topology::Simple => "simple",
            Topology::Cascaded => "cascaded",
        }
    }
}

/// Everything needed to compile a pipeline: gains, the three source
/// quantizers (e, ei, ed), the valve output quantizer, and for the cascade
/// the bit width of the intermediate node's quantizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub topology: Topology,
    pub gains: PidGains,
    pub source_quantizers: [Quantizer; 3],
    pub output_quantizer: Quantizer,
    /// Intermediate-node bit width; defaults to the wider of the two
    /// stage-one sources.
    pub intermediate_bits: Option<u32>,
}

impl PipelineConfig {
    /// Config with the frozen calibrated source ranges, the `[0, 100]` valve
    /// range, and the same bit width everywhere.
    pub fn default_for_bits(topology: Topology, bits: u32) -> Result<Self> {
        let (e, ei, ed) = (
            plant::DEFAULT_E_RANGE,
            plant::DEFAULT_EI_RANGE,
            plant::DEFAULT_ED_RANGE,
        );
        Ok(Self {
            topology,
            gains: PidGains::default(),
            source_quantizers: [
                Quantizer::new(e.0, e.1, bits)?,
                Quantizer::new(ei.0, ei.1, bits)?,
                Quantizer::new(ed.0, ed.1, bits)?,
            ],
            output_quantizer: Quantizer::new(0.0, 100.0, bits)?,
            intermediate_bits: None,
        })
    }

    fn effective_intermediate_bits(&self) -> u32 {
        self.intermediate_bits.unwrap_or_else(|| {
            self.source_quantizers[0]
                .bits()
                .max(self.source_quantizers[1].bits())
        })
    }
}

/// One coded source inside a compiled stage: its alphabet, coloring,
/// encoder, and rate metrics.
#[derive(Debug, Clone)]
pub struct SourceCoder {
    pub name: String,
    pub alphabet: Alphabet,
    pub coloring: Coloring,
    pub encoder: Encoder,
    /// Raw bits a plain transmission of this source would need.
    pub raw_bits: u32,
    pub entropy_bits: f64,
    pub compression_pct: f64,
}

fn code_source(
    table: &OutcomeTable,
    source: usize,
    name: &str,
    raw_bits: u32,
) -> Result<SourceCoder> {
    let alphabet = table.input_alphabets()[source].clone();
    let graph = CharacteristicGraph::build(table, source)?;
    let coloring = greedy_color(&graph);
    let entropy_bits = chromatic_entropy(&coloring, &alphabet)?;
    let encoder = Encoder::new(&coloring);
    Ok(SourceCoder {
        name: name.to_string(),
        alphabet,
        coloring,
        encoder,
        raw_bits,
        entropy_bits,
        compression_pct: compression_rate(entropy_bits, raw_bits),
    })
}

/// One compiled hop: coded inputs plus the decoder table resolving their
/// colors to an output level.
#[derive(Debug, Clone)]
pub struct CompiledStage {
    pub sources: Vec<SourceCoder>,
    pub lut: DecoderLut,
    pub output: OutputSet,
    /// Level-indexed output values, precomputed for the per-sample path.
    output_values: Vec<f64>,
}

impl CompiledStage {
    fn new(sources: Vec<SourceCoder>, lut: DecoderLut, output: OutputSet) -> Result<Self> {
        let output_values = (0..output.levels())
            .map(|k| output.value_of(k))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            sources,
            lut,
            output,
            output_values,
        })
    }
}

/// Output of one pipeline evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Reconstructed valve command, percent.
    pub valve: f64,
    /// Valve level index at the destination.
    pub level: u16,
    /// Sum of the codeword lengths on every link traversed.
    pub bits_on_wire: u32,
}

/// A fully compiled pipeline ready for per-sample evaluation.
#[derive(Debug, Clone)]
pub struct CompiledPipeline {
    config: PipelineConfig,
    stages: Vec<CompiledStage>,
    /// Cascade only: quantizer the intermediate node applies to `kp*e + ki*ei`.
    intermediate_quantizer: Option<Quantizer>,
    /// Cascade only: distinct stage-one levels, index = symbol of `m`.
    intermediate_levels: Option<Vec<u16>>,
    /// Total codeword bits per sample, cached off the hot path.
    wire_bits: u32,
    offline: Duration,
}

fn wire_bits_of(stages: &[CompiledStage]) -> u32 {
    stages
        .iter()
        .flat_map(|st| st.sources.iter())
        .map(|s| s.encoder.codeword_len())
        .sum()
}

/// Compile a pipeline for the configured topology.
pub fn compile(config: &PipelineConfig) -> Result<CompiledPipeline> {
    match config.topology {
        Topology::Simple => compile_simple(config),
        Topology::Cascaded => compile_cascaded(config),
    }
}

/// Compile the simple topology: three coded sources, one destination table.
pub fn compile_simple(config: &PipelineConfig) -> Result<CompiledPipeline> {
    let start = Instant::now();
    let f = TargetFunction::pid(config.gains, config.output_quantizer);
    let alphabets: Vec<Alphabet> = config
        .source_quantizers
        .iter()
        .map(Alphabet::from_quantizer)
        .collect();
    let table = OutcomeTable::build(&f, &alphabets)?;
    let names = ["e", "ei", "ed"];
    let sources = (0..3)
        .map(|s| code_source(&table, s, names[s], config.source_quantizers[s].bits()))
        .collect::<Result<Vec<_>>>()?;
    let colorings: Vec<Coloring> = sources.iter().map(|s| s.coloring.clone()).collect();
    let lut = DecoderLut::build(&table, &colorings)?;
    let stage = CompiledStage::new(sources, lut, OutputSet::Quantized(config.output_quantizer))?;
    let stages = vec![stage];
    Ok(CompiledPipeline {
        wire_bits: wire_bits_of(&stages),
        config: *config,
        stages,
        intermediate_quantizer: None,
        intermediate_levels: None,
        offline: start.elapsed(),
    })
}

/// Exact range of the unclamped first stage over the two source alphabets.
fn intermediate_range(gains: PidGains, a_e: &Alphabet, a_ei: &Alphabet) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &e in a_e.symbols() {
        for &ei in a_ei.symbols() {
            let v = gains.kp * e + gains.ki * ei;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    // Degenerate stage output (e.g. zero gains): widen so a valid quantizer
    // still exists.
    if hi - lo <= 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    (lo, hi)
}

/// Compile the cascaded topology: stage one codes (e, ei) into the
/// intermediate symbol, stage two codes (m, ed) into the valve level.
pub fn compile_cascaded(config: &PipelineConfig) -> Result<CompiledPipeline> {
    let start = Instant::now();
    let gains = config.gains;
    let a_e = Alphabet::from_quantizer(&config.source_quantizers[0]);
    let a_ei = Alphabet::from_quantizer(&config.source_quantizers[1]);
    let a_ed = Alphabet::from_quantizer(&config.source_quantizers[2]);

    let (lo, hi) = intermediate_range(gains, &a_e, &a_ei);
    let m_q = Quantizer::new(lo, hi, config.effective_intermediate_bits())?;
    let f_i = TargetFunction::pid_intermediate(gains, m_q);
    let table1 = OutcomeTable::build(&f_i, &[a_e.clone(), a_ei.clone()])?;

    // The occurring stage-one levels become the symbols of the new source m;
    // relabel the table so its outputs are compact m indices.
    let mut remap = vec![u16::MAX; m_q.levels()];
    let mut m_levels: Vec<u16> = Vec::new();
    for &lv in table1.outputs() {
        if remap[lv as usize] == u16::MAX {
            remap[lv as usize] = 0; // mark; ids assigned after sorting
            m_levels.push(lv);
        }
    }
    m_levels.sort_unstable();
    for (i, &lv) in m_levels.iter().enumerate() {
        remap[lv as usize] = i as u16;
    }
    let m_symbols: Vec<f64> = m_levels
        .iter()
        .map(|&lv| m_q.dequantize(lv as usize))
        .collect::<Result<_>>()?;

    // Induced distribution of m: push the (uniform) product measure of
    // (e, ei) through stage one.
    let mut m_probs = vec![0.0f64; m_levels.len()];
    {
        let pe = a_e.probabilities();
        let pei = a_ei.probabilities();
        let n_ei = a_ei.len();
        for (idx, &lv) in table1.outputs().iter().enumerate() {
            let (u, v) = (idx / n_ei, idx % n_ei);
            m_probs[remap[lv as usize] as usize] += pe[u] * pei[v];
        }
        // Absorb float-summation residue into the heaviest symbol so the
        // alphabet invariant (sum = 1) holds exactly.
        let sum: f64 = m_probs.iter().sum();
        let top = m_probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        m_probs[top] += 1.0 - sum;
    }
    let a_m = Alphabet::new(m_symbols.clone(), m_probs)?;

    let table1 = table1.relabel(
        |lv| remap[lv as usize],
        OutputSet::Discrete(m_symbols.clone()),
    );
    let s_e = code_source(&table1, 0, "e", config.source_quantizers[0].bits())?;
    let s_ei = code_source(&table1, 1, "ei", config.source_quantizers[1].bits())?;
    let lut1 = DecoderLut::build(&table1, &[s_e.coloring.clone(), s_ei.coloring.clone()])?;
    let stage1 = CompiledStage::new(
        vec![s_e, s_ei],
        lut1,
        OutputSet::Discrete(m_symbols.clone()),
    )?;

    let f_fin = TargetFunction::pid_final(gains, config.output_quantizer);
    let table2 = OutcomeTable::build(&f_fin, &[a_m.clone(), a_ed])?;
    let s_m = code_source(&table2, 0, "m", a_m.raw_bits())?;
    let s_ed = code_source(&table2, 1, "ed", config.source_quantizers[2].bits())?;
    let lut2 = DecoderLut::build(&table2, &[s_m.coloring.clone(), s_ed.coloring.clone()])?;
    let stage2 = CompiledStage::new(
        vec![s_m, s_ed],
        lut2,
        OutputSet::Quantized(config.output_quantizer),
    )?;

    let stages = vec![stage1, stage2];
    Ok(CompiledPipeline {
        wire_bits: wire_bits_of(&stages),
        config: *config,
        stages,
        intermediate_quantizer: Some(m_q),
        intermediate_levels: Some(m_levels),
        offline: start.elapsed(),
    })
}

impl CompiledPipeline {
    pub fn topology(&self) -> Topology {
        self.config.topology
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn stages(&self) -> &[CompiledStage] {
        &self.stages
    }

    /// Compile wall-clock time.
    pub fn offline_time(&self) -> Duration {
        self.offline
    }

    /// Cascade only: the intermediate node's quantizer.
    pub fn intermediate_quantizer(&self) -> Option<&Quantizer> {
        self.intermediate_quantizer.as_ref()
    }

    /// Cascade only: distinct stage-one levels backing the symbols of m.
    pub fn intermediate_levels(&self) -> Option<&[u16]> {
        self.intermediate_levels.as_deref()
    }

    /// Sum of codeword lengths over all links for one sample.
    #[inline]
    pub fn bits_per_sample(&self) -> u32 {
        self.wire_bits
    }

    /// Raw bits per sample without compression (the three source widths).
    pub fn raw_bits_per_sample(&self) -> u32 {
        self.config.source_quantizers.iter().map(|q| q.bits()).sum()
    }

    /// Total decoder entries across stages.
    pub fn total_lut_entries(&self) -> usize {
        self.stages.iter().map(|st| st.lut.len()).sum()
    }

    /// Worst-case valve difference between the simple path and this cascade
    /// for the same inputs: one intermediate rounding propagated through the
    /// unit-coefficient final map plus one output rounding on each side.
    pub fn cascade_deviation_bound(&self) -> Option<f64> {
        self.intermediate_quantizer
            .map(|m_q| m_q.step() + self.config.output_quantizer.step())
    }

    /// Quantize, encode, route, decode, and reconstruct one sample.
    pub fn run_sample(&self, e: f64, ei: f64, ed: f64) -> Sample {
        let q = &self.config.source_quantizers;
        match self.config.topology {
            Topology::Simple => {
                let stage = &self.stages[0];
                let colors = [
                    stage.sources[0].encoder.color_unchecked(q[0].quantize(e)),
                    stage.sources[1].encoder.color_unchecked(q[1].quantize(ei)),
                    stage.sources[2].encoder.color_unchecked(q[2].quantize(ed)),
                ];
                let level = stage.lut.decode_unchecked(&colors);
                Sample {
                    valve: stage.output_values[level as usize],
                    level,
                    bits_on_wire: self.wire_bits,
                }
            }
            Topology::Cascaded => {
                let (stage1, stage2) = (&self.stages[0], &self.stages[1]);
                let colors1 = [
                    stage1.sources[0].encoder.color_unchecked(q[0].quantize(e)),
                    stage1.sources[1].encoder.color_unchecked(q[1].quantize(ei)),
                ];
                let m_symbol = stage1.lut.decode_unchecked(&colors1);
                let colors2 = [
                    stage2.sources[0].encoder.color_unchecked(m_symbol as usize),
                    stage2.sources[1].encoder.color_unchecked(q[2].quantize(ed)),
                ];
                let level = stage2.lut.decode_unchecked(&colors2);
                Sample {
                    valve: stage2.output_values[level as usize],
                    level,
                    bits_on_wire: self.wire_bits,
                }
            }
        }
    }

    /// Summary report for export.
    pub fn report(&self) -> PipelineReport {
        let bits = self.bits_per_sample();
        let raw = self.raw_bits_per_sample();
        PipelineReport {
            topology: self.config.topology,
            sources: self
                .stages
                .iter()
                .flat_map(|st| st.sources.iter())
                .map(|s| SourceReport {
                    name: s.name.clone(),
                    bits: s.raw_bits,
                    num_symbols: s.alphabet.len(),
                    num_colors: s.encoder.num_colors(),
                    codeword_len: s.encoder.codeword_len(),
                    entropy_bits: s.entropy_bits,
                    compression_pct: s.compression_pct,
                })
                .collect(),
            stage_lut_entries: self.stages.iter().map(|st| st.lut.len()).collect(),
            total_lut_entries: self.total_lut_entries(),
            bits_per_sample: bits,
            raw_bits_per_sample: raw,
            aggregate_compression_pct: 100.0 * (1.0 - bits as f64 / raw as f64),
            intermediate: self.intermediate_quantizer.map(|m_q| IntermediateReport {
                lo: m_q.lo(),
                hi: m_q.hi(),
                bits: m_q.bits(),
                step: m_q.step(),
                symbols: self
                    .intermediate_levels
                    .as_ref()
                    .map(|l| l.len())
                    .unwrap_or(0),
                deviation_bound: m_q.step() + self.config.output_quantizer.step(),
            }),
        }
    }
}

/// Per-source rate summary inside a [`PipelineReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceReport {
    pub name: String,
    pub bits: u32,
    pub num_symbols: usize,
    pub num_colors: usize,
    pub codeword_len: u32,
    pub entropy_bits: f64,
    pub compression_pct: f64,
}

/// Cascade intermediate-node summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntermediateReport {
    pub lo: f64,
    pub hi: f64,
    pub bits: u32,
    pub step: f64,
    pub symbols: usize,
    /// Worst-case valve gap versus the simple topology (one intermediate
    /// rounding plus one output rounding).
    pub deviation_bound: f64,
}

/// Machine-readable pipeline summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub topology: Topology,
    pub sources: Vec<SourceReport>,
    pub stage_lut_entries: Vec<usize>,
    pub total_lut_entries: usize,
    pub bits_per_sample: u32,
    pub raw_bits_per_sample: u32,
    pub aggregate_compression_pct: f64,
    pub intermediate: Option<IntermediateReport>,
}

/// Reference computation for the simple path: quantize the inputs, evaluate
/// the PID law on the bin midpoints, quantize the valve. Pipelines must
/// reproduce this bit-exactly.
pub fn quantized_pid_reference(config: &PipelineConfig, e: f64, ei: f64, ed: f64) -> Sample {
    let q = &config.source_quantizers;
    let valve = crate::target::eval_pid(
        config.gains,
        q[0].midpoint_of(e),
        q[1].midpoint_of(ei),
        q[2].midpoint_of(ed),
    );
    let level = config.output_quantizer.quantize(valve) as u16;
    Sample {
        valve: config.output_quantizer.midpoint_of(valve),
        level,
        bits_on_wire: 0,
    }
}

/// Reference computation for the cascaded path: quantize the inputs, run the
/// first stage on midpoints, round it through the intermediate quantizer,
/// then run the clamped final stage and quantize the valve.
pub fn two_stage_pid_reference(
    config: &PipelineConfig,
    intermediate: &Quantizer,
    e: f64,
    ei: f64,
    ed: f64,
) -> Sample {
    let q = &config.source_quantizers;
    let cascade = crate::target::decompose_pid(config.gains);
    let m = intermediate.midpoint_of(cascade.intermediate(q[0].midpoint_of(e), q[1].midpoint_of(ei)));
    let valve = cascade.final_stage(m, q[2].midpoint_of(ed));
    let level = config.output_quantizer.quantize(valve) as u16;
    Sample {
        valve: config.output_quantizer.midpoint_of(valve),
        level,
        bits_on_wire: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(topology: Topology, bits: u32) -> PipelineConfig {
        PipelineConfig::default_for_bits(topology, bits).unwrap()
    }

    #[test]
    fn simple_pipeline_matches_reference_exhaustively() {
        let cfg = small_config(Topology::Simple, 4);
        let p = compile(&cfg).unwrap();
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
    fn cascaded_pipeline_matches_two_stage_reference_exhaustively() {
        let cfg = small_config(Topology::Cascaded, 4);
        let p = compile(&cfg).unwrap();
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

    #[test]
    fn cascade_stays_within_deviation_bound() {
        let bits = 5;
        let simple = compile(&small_config(Topology::Simple, bits)).unwrap();
        let casc = compile(&small_config(Topology::Cascaded, bits)).unwrap();
        let bound = casc.cascade_deviation_bound().unwrap();
        let cfg = simple.config();
        let mids: Vec<Vec<f64>> = cfg.source_quantizers.iter().map(|q| q.midpoints()).collect();
        let mut max_dev: f64 = 0.0;
        for &e in &mids[0] {
            for &ei in &mids[1] {
                for &ed in &mids[2] {
                    let a = simple.run_sample(e, ei, ed).valve;
                    let b = casc.run_sample(e, ei, ed).valve;
                    max_dev = max_dev.max((a - b).abs());
                }
            }
        }
        assert!(
            max_dev <= bound,
            "max deviation {max_dev} exceeds bound {bound}"
        );
    }

    #[test]
    fn intermediate_alphabet_is_a_counting_measure() {
        let cfg = small_config(Topology::Cascaded, 4);
        let p = compile(&cfg).unwrap();
        let stage2 = &p.stages()[1];
        let a_m = &stage2.sources[0].alphabet;
        // At most one symbol per stage-one color tuple.
        let stage1 = &p.stages()[0];
        assert!(a_m.len() <= stage1.lut.len());
        // Probabilities are multiples of 1/(|A_e| * |A_ei|) and sum to 1.
        let denom = 16.0 * 16.0;
        for &prob in a_m.probabilities() {
            let scaled = prob * denom;
            assert!(
                (scaled - scaled.round()).abs() < 1e-6,
                "{prob} is not a multiple of 1/{denom}"
            );
        }
        let sum: f64 = a_m.probabilities().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn cascaded_tables_are_smaller_than_simple() {
        for bits in [5, 6] {
            let simple = compile(&small_config(Topology::Simple, bits)).unwrap();
            let casc = compile(&small_config(Topology::Cascaded, bits)).unwrap();
            assert!(
                casc.total_lut_entries() < simple.total_lut_entries(),
                "bits={bits}: cascaded {} !< simple {}",
                casc.total_lut_entries(),
                simple.total_lut_entries()
            );
        }
    }

    #[test]
    fn wire_bits_never_exceed_raw_bits_per_link() {
        for topology in [Topology::Simple, Topology::Cascaded] {
            let cfg = small_config(topology, 5);
            let p = compile(&cfg).unwrap();
            for s in p.stages().iter().flat_map(|st| st.sources.iter()) {
                assert!(s.encoder.codeword_len() <= s.raw_bits);
            }
        }
    }

    #[test]
    fn zero_gain_pipeline_always_emits_level_zero() {
        let mut cfg = small_config(Topology::Cascaded, 4);
        cfg.gains = PidGains::new(0.0, 0.0, 0.0);
        let p = compile(&cfg).unwrap();
        let s = p.run_sample(-3.0, 0.2, 1.0);
        assert_eq!(s.level, 0);
        let mut cfg = small_config(Topology::Simple, 4);
        cfg.gains = PidGains::new(0.0, 0.0, 0.0);
        let p = compile(&cfg).unwrap();
        assert_eq!(p.run_sample(5.0, -1.0, 0.0).level, 0);
    }

    #[test]
    fn report_fields_are_consistent() {
        let p = compile(&small_config(Topology::Cascaded, 4)).unwrap();
        let r = p.report();
        assert_eq!(r.sources.len(), 4); // e, ei, m, ed
        assert_eq!(r.stage_lut_entries.len(), 2);
        assert_eq!(
            r.total_lut_entries,
            r.stage_lut_entries.iter().sum::<usize>()
        );
        assert_eq!(r.raw_bits_per_sample, 12);
        let recomputed = 100.0 * (1.0 - r.bits_per_sample as f64 / 12.0);
        assert!((r.aggregate_compression_pct - recomputed).abs() < 1e-12);
    }
}

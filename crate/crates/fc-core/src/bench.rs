//! Offline/online cost measurement and the bit-width sweep.
//!
//! Offline time is the wall-clock cost of compiling a pipeline (tables,
//! graphs, colorings, decoder LUTs); online time is the per-sample cost of
//! running the compiled pipeline. Both are reported as medians over repeated
//! measurements so a desk-scale machine produces stable orderings. The
//! online input stream is seeded, so every mode at a given bit width sees
//! the identical sample sequence.
//!
//! Timing never feeds back into any functional output: reports are
//! deterministic for a fixed seed except for the time fields themselves.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pipeline::{compile, CompiledPipeline, PipelineConfig, Topology};

/// Median/min/max of a repeated measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingStats {
    pub median: Duration,
    pub min: Duration,
    pub max: Duration,
}

impl TimingStats {
    fn from_samples(mut samples: Vec<Duration>) -> Self {
        samples.sort_unstable();
        let median = samples[samples.len() / 2];
        Self {
            median,
            min: samples[0],
            max: *samples.last().expect("non-empty samples"),
        }
    }
}

/// Offline (compile-time) measurement plus the last compiled pipeline, so
/// callers can reuse it for online measurement without paying again.
pub struct OfflineMeasurement {
    pub stats: TimingStats,
    pub pipeline: CompiledPipeline,
}

/// Compile `config` `repetitions` times and report the median wall-clock
/// duration.
pub fn measure_offline(config: &PipelineConfig, repetitions: usize) -> Result<OfflineMeasurement> {
    let reps = repetitions.max(1);
    let mut samples = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let start = Instant::now();
        let p = compile(config)?;
        samples.push(start.elapsed());
        last = Some(p);
    }
    Ok(OfflineMeasurement {
        stats: TimingStats::from_samples(samples),
        pipeline: last.expect("at least one repetition"),
    })
}

/// Seeded uniform in-range input stream shared across modes.
pub fn online_input_stream(config: &PipelineConfig, n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = &config.source_quantizers;
    (0..n)
        .map(|_| {
            [
                rng.random_range(q[0].lo()..q[0].hi()),
                rng.random_range(q[1].lo()..q[1].hi()),
                rng.random_range(q[2].lo()..q[2].hi()),
            ]
        })
        .collect()
}

/// Per-sample latency distribution in nanoseconds. Kept as floats: a single
/// call sits near the clock resolution, so per-sample figures come from
/// timed batches and carry sub-nanosecond detail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnlineStats {
    pub median_ns: f64,
    pub min_ns: f64,
    pub max_ns: f64,
}

/// Median per-sample latency of [`CompiledPipeline::run_sample`] over the
/// given input stream.
///
/// One untimed warmup pass populates caches and the branch predictor, then
/// each timed pass is split into 100-sample batches (a single call sits at
/// the clock resolution); the reported median is the median over all batch
/// figures of all passes.
pub fn measure_online(pipeline: &CompiledPipeline, inputs: &[[f64; 3]]) -> OnlineStats {
    const BATCH: usize = 100;
    const PASSES: usize = 3;
    assert!(!inputs.is_empty(), "online measurement needs inputs");
    let mut acc = 0u64;
    for s in inputs {
        acc = acc.wrapping_add(pipeline.run_sample(s[0], s[1], s[2]).level as u64);
    }
    let mut per_sample = Vec::with_capacity(PASSES * (inputs.len() / BATCH + 1));
    for _ in 0..PASSES {
        for chunk in inputs.chunks(BATCH) {
            let start = Instant::now();
            for s in chunk {
                let out = pipeline.run_sample(s[0], s[1], s[2]);
                acc = acc.wrapping_add(out.level as u64);
            }
            let elapsed = start.elapsed();
            per_sample.push(elapsed.as_secs_f64() * 1e9 / chunk.len() as f64);
        }
    }
    black_box(acc);
    per_sample.sort_unstable_by(f64::total_cmp);
    OnlineStats {
        median_ns: per_sample[per_sample.len() / 2],
        min_ns: per_sample[0],
        max_ns: *per_sample.last().expect("non-empty"),
    }
}

/// Tunable knobs for a sweep run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub offline_repetitions: usize,
    pub online_samples: usize,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            offline_repetitions: 5,
            online_samples: 100_000,
            seed: 42,
        }
    }
}

/// One (bits, mode) cell of the sweep grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub bits: u32,
    pub mode: Topology,
    pub offline_ms: f64,
    pub offline_ms_min: f64,
    pub offline_ms_max: f64,
    pub online_ns: f64,
    pub online_ns_min: f64,
    pub online_ns_max: f64,
    pub comp_e: f64,
    pub comp_ei: f64,
    pub comp_ed: f64,
    /// Intermediate-node compression, cascaded mode only.
    pub comp_m: Option<f64>,
    /// `100 * (1 - bits_on_wire / raw_bits)` with raw = 3b per sample.
    pub comp_aggregate: f64,
    pub lut_entries: usize,
    pub bits_per_sample: u32,
    /// True when any compression figure is negative (entropy above the raw
    /// width); reported, never clamped.
    pub flagged_negative: bool,
}

/// A failed sweep cell, kept so the rest of the grid still reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepFailure {
    pub bits: u32,
    pub mode: Topology,
    pub error: String,
}

/// Full sweep grid with its options.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub options: SweepOptions,
    pub cells: Vec<SweepCell>,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    /// Pinned CSV schema:
    /// `bits,mode,offline_ms,online_ns,comp_e,comp_ei,comp_ed,comp_aggregate,lut_entries,bits_per_sample`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "bits,mode,offline_ms,online_ns,comp_e,comp_ei,comp_ed,comp_aggregate,lut_entries,bits_per_sample\n",
        );
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                c.bits,
                c.mode.as_str(),
                c.offline_ms,
                c.online_ns,
                c.comp_e,
                c.comp_ei,
                c.comp_ed,
                c.comp_aggregate,
                c.lut_entries,
                c.bits_per_sample
            );
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn cell(&self, bits: u32, mode: Topology) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.bits == bits && c.mode == mode)
    }
}

fn comp_of(pipeline: &CompiledPipeline, name: &str) -> f64 {
    pipeline
        .stages()
        .iter()
        .flat_map(|st| st.sources.iter())
        .find(|s| s.name == name)
        .map(|s| s.compression_pct)
        .unwrap_or(f64::NAN)
}

/// Measure one grid cell.
pub fn measure_cell(
    bits: u32,
    mode: Topology,
    options: &SweepOptions,
) -> Result<SweepCell> {
    let config = PipelineConfig::default_for_bits(mode, bits)?;
    let offline = measure_offline(&config, options.offline_repetitions)?;
    let inputs = online_input_stream(&config, options.online_samples, options.seed);
    let online = measure_online(&offline.pipeline, &inputs);
    let p = &offline.pipeline;
    let report = p.report();
    let comp_m = match mode {
        Topology::Cascaded => Some(comp_of(p, "m")),
        Topology::Simple => None,
    };
    let comps = [
        comp_of(p, "e"),
        comp_of(p, "ei"),
        comp_of(p, "ed"),
        comp_m.unwrap_or(0.0),
        report.aggregate_compression_pct,
    ];
    Ok(SweepCell {
        bits,
        mode,
        offline_ms: offline.stats.median.as_secs_f64() * 1e3,
        offline_ms_min: offline.stats.min.as_secs_f64() * 1e3,
        offline_ms_max: offline.stats.max.as_secs_f64() * 1e3,
        online_ns: online.median_ns,
        online_ns_min: online.min_ns,
        online_ns_max: online.max_ns,
        comp_e: comps[0],
        comp_ei: comps[1],
        comp_ed: comps[2],
        comp_m,
        comp_aggregate: report.aggregate_compression_pct,
        lut_entries: p.total_lut_entries(),
        bits_per_sample: p.bits_per_sample(),
        flagged_negative: comps.iter().any(|&c| c < 0.0),
    })
}

/// Run the full grid. Cells execute sequentially so timing measurements
/// never contend with each other; a failing cell is recorded and the sweep
/// continues.
pub fn sweep(
    bits_range: impl IntoIterator<Item = u32>,
    modes: &[Topology],
    options: &SweepOptions,
) -> SweepReport {
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for bits in bits_range {
        for &mode in modes {
            match measure_cell(bits, mode, options) {
                Ok(cell) => cells.push(cell),
                Err(e) => failures.push(SweepFailure {
                    bits,
                    mode,
                    error: e.to_string(),
                }),
            }
        }
    }
    SweepReport {
        options: *options,
        cells,
        failures,
    }
}

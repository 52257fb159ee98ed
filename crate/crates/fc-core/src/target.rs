//! Target functions and exhaustive outcome tables.
//!
//! The destination never reconstructs the sources; it only needs the value of
//! a target function of them. This module defines the functions used across
//! the workspace — the two-source mod-sum toy, the PID control law, and the
//! PID's two-stage cascade decomposition — and materializes the exhaustive
//! [`OutcomeTable`] (every joint quantized input tuple mapped to its output
//! level) that graph construction and decoder compilation consume.

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantize::{bits_for, Alphabet, Quantizer};

type SharedEval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Default cap on outcome-table entries (2^24, i.e. three 8-bit sources).
pub const DEFAULT_TABLE_CAP: u64 = 1 << 24;

/// PID tuning constants for `f(e, ei, ed) = kp*e + ki*ei + kd*ed`.
///
/// The error convention is `e = h - s` (level minus setpoint), so gains that
/// open the valve when the tank is low are negative. The defaults are tuned
/// for the bundled water-tank model: a dominant proportional term, a small
/// integral trim, and light derivative damping settle the level within the
/// 80-step run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self {
            kp: -40.0,
            ki: -0.05,
            kd: -2.0,
        }
    }
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self { kp, ki, kd }
    }
}

/// PID control law: valve percentage, clamped to `[0, 100]`.
pub fn eval_pid(g: PidGains, e: f64, ei: f64, ed: f64) -> f64 {
    (g.kp * e + g.ki * ei + g.kd * ed).clamp(0.0, 100.0)
}

/// Two-source toy function `(x + y) mod 2` with `x` in `{0,1,2,3}` and `y`
/// in `{0,1}`.
pub fn eval_mod_sum(x: i64, y: i64) -> Result<i64> {
    if !(0..=3).contains(&x) {
        return Err(Error::DomainViolation(format!(
            "x={x} outside {{0,1,2,3}}"
        )));
    }
    if !(0..=1).contains(&y) {
        return Err(Error::DomainViolation(format!("y={y} outside {{0,1}}")));
    }
    Ok((x + y) % 2)
}

/// The PID law split across two network hops: an intermediate node combines
/// the proportional and integral terms, the destination adds the derivative
/// term and clamps.
///
/// Only the final stage clamps; clamping the intermediate value would break
/// the exact composition `final(intermediate(e, ei), ed) = eval_pid(e, ei, ed)`.
#[derive(Debug, Clone, Copy)]
pub struct PidCascade {
    gains: PidGains,
}

impl PidCascade {
    pub fn gains(&self) -> PidGains {
        self.gains
    }

    /// First hop: `kp*e + ki*ei`, unclamped.
    pub fn intermediate(&self, e: f64, ei: f64) -> f64 {
        self.gains.kp * e + self.gains.ki * ei
    }

    /// Second hop: `m + kd*ed`, clamped to the valve range.
    pub fn final_stage(&self, m: f64, ed: f64) -> f64 {
        (m + self.gains.kd * ed).clamp(0.0, 100.0)
    }
}

/// Split the PID law into its cascade stages.
pub fn decompose_pid(gains: PidGains) -> PidCascade {
    PidCascade { gains }
}

/// How a function's real-valued output is discretized into level indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OutputSet {
    /// Continuous output passed through a uniform quantizer.
    Quantized(Quantizer),
    /// Exact-valued output drawn from a fixed list; level = list index.
    Discrete(Vec<f64>),
}

impl OutputSet {
    pub fn levels(&self) -> usize {
        match self {
            OutputSet::Quantized(q) => q.levels(),
            OutputSet::Discrete(vals) => vals.len(),
        }
    }

    /// Minimal bits that address every level.
    pub fn bits(&self) -> u32 {
        match self {
            OutputSet::Quantized(q) => q.bits(),
            OutputSet::Discrete(vals) => bits_for(vals.len()),
        }
    }

    /// Level index for an output value. Quantized outputs saturate; discrete
    /// outputs pick the nearest listed value (exact for functions whose
    /// codomain is the list itself).
    pub fn level_of(&self, v: f64) -> usize {
        match self {
            OutputSet::Quantized(q) => q.quantize(v),
            OutputSet::Discrete(vals) => {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (i, &x) in vals.iter().enumerate() {
                    let d = (x - v).abs();
                    if d < best_d {
                        best = i;
                        best_d = d;
                    }
                }
                best
            }
        }
    }

    /// Representative value for a level index.
    pub fn value_of(&self, level: usize) -> Result<f64> {
        match self {
            OutputSet::Quantized(q) => q.dequantize(level),
            OutputSet::Discrete(vals) => {
                vals.get(level).copied().ok_or(Error::IndexOutOfRange {
                    index: level,
                    len: vals.len(),
                })
            }
        }
    }
}

/// A deterministic total function of a fixed number of real inputs, together
/// with the discretization of its output.
#[derive(Clone)]
pub struct TargetFunction {
    arity: usize,
    output: OutputSet,
    eval: SharedEval,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("arity", &self.arity)
            .field("output", &self.output)
            .finish_non_exhaustive()
    }
}

impl TargetFunction {
    pub fn new<F>(arity: usize, output: OutputSet, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            arity,
            output,
            eval: Arc::new(eval),
        }
    }

    /// Three-input PID law with a quantized valve output.
    pub fn pid(gains: PidGains, output: Quantizer) -> Self {
        Self::new(3, OutputSet::Quantized(output), move |v| {
            eval_pid(gains, v[0], v[1], v[2])
        })
    }

    /// The two-source parity toy with exact outputs `{0, 1}`.
    pub fn mod_sum() -> Self {
        Self::new(2, OutputSet::Discrete(vec![0.0, 1.0]), |v| {
            let x = v[0].round() as i64;
            let y = v[1].round() as i64;
            ((x + y).rem_euclid(2)) as f64
        })
    }

    /// First cascade hop of the PID law.
    pub fn pid_intermediate(gains: PidGains, output: Quantizer) -> Self {
        let c = decompose_pid(gains);
        Self::new(2, OutputSet::Quantized(output), move |v| {
            c.intermediate(v[0], v[1])
        })
    }

    /// Second cascade hop of the PID law.
    pub fn pid_final(gains: PidGains, output: Quantizer) -> Self {
        let c = decompose_pid(gains);
        Self::new(2, OutputSet::Quantized(output), move |v| {
            c.final_stage(v[0], v[1])
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn output(&self) -> &OutputSet {
        &self.output
    }

    /// Evaluate the raw (real-valued) function.
    pub fn eval(&self, inputs: &[f64]) -> f64 {
        debug_assert_eq!(inputs.len(), self.arity);
        (self.eval)(inputs)
    }

    /// Evaluate and discretize.
    pub fn eval_level(&self, inputs: &[f64]) -> usize {
        self.output.level_of(self.eval(inputs))
    }
}

/// Exhaustive map from joint quantized input tuples to output level indices.
///
/// Layout is row-major with source 0 as the outermost index, which also fixes
/// the serialization order of the dumps.
#[derive(Debug, Clone)]
pub struct OutcomeTable {
    input_alphabets: Vec<Alphabet>,
    output: OutputSet,
    outputs: Vec<u16>,
}

impl OutcomeTable {
    /// Tabulate `f` over the full product of the given alphabets.
    pub fn build(f: &TargetFunction, alphabets: &[Alphabet]) -> Result<Self> {
        Self::build_with_cap(f, alphabets, DEFAULT_TABLE_CAP)
    }

    /// Like [`OutcomeTable::build`] with an explicit entry cap.
    pub fn build_with_cap(
        f: &TargetFunction,
        alphabets: &[Alphabet],
        cap: u64,
    ) -> Result<Self> {
        if f.arity() != alphabets.len() {
            return Err(Error::ArityMismatch {
                expected: f.arity(),
                got: alphabets.len(),
            });
        }
        let total: u128 = alphabets.iter().map(|a| a.len() as u128).product();
        if total > cap as u128 {
            return Err(Error::TableTooLarge {
                entries: total,
                cap,
            });
        }
        let levels = f.output().levels();
        if levels > u16::MAX as usize + 1 {
            return Err(Error::TableTooLarge {
                entries: levels as u128,
                cap: u16::MAX as u64 + 1,
            });
        }
        let total = total as usize;
        let sizes: Vec<usize> = alphabets.iter().map(|a| a.len()).collect();
        let mut outputs = Vec::with_capacity(total);
        let mut digits = vec![0usize; sizes.len()];
        let mut values = vec![0.0f64; sizes.len()];
        for _ in 0..total {
            for (k, &d) in digits.iter().enumerate() {
                values[k] = alphabets[k].symbols()[d];
            }
            let level = f.eval_level(&values);
            debug_assert!(level < levels);
            outputs.push(level as u16);
            // Row-major increment: last source is the innermost digit.
            for k in (0..sizes.len()).rev() {
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        Ok(Self {
            input_alphabets: alphabets.to_vec(),
            output: f.output().clone(),
            outputs,
        })
    }

    /// Build directly from a precomputed level array (row-major).
    pub fn from_levels(
        input_alphabets: Vec<Alphabet>,
        output: OutputSet,
        outputs: Vec<u16>,
    ) -> Result<Self> {
        let total: usize = input_alphabets.iter().map(|a| a.len()).product();
        if outputs.len() != total {
            return Err(Error::MalformedDump(format!(
                "level array has {} entries, alphabets imply {total}",
                outputs.len()
            )));
        }
        let levels = output.levels();
        if let Some(&bad) = outputs.iter().find(|&&v| v as usize >= levels) {
            return Err(Error::IndexOutOfRange {
                index: bad as usize,
                len: levels,
            });
        }
        Ok(Self {
            input_alphabets,
            output,
            outputs,
        })
    }

    pub fn arity(&self) -> usize {
        self.input_alphabets.len()
    }

    pub fn input_alphabets(&self) -> &[Alphabet] {
        &self.input_alphabets
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.input_alphabets.iter().map(|a| a.len()).collect()
    }

    pub fn output(&self) -> &OutputSet {
        &self.output
    }

    pub fn outputs(&self) -> &[u16] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// Flat row-major index of a joint symbol tuple.
    pub fn index_of(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity());
        let mut idx = 0usize;
        for (k, &d) in tuple.iter().enumerate() {
            debug_assert!(d < self.input_alphabets[k].len());
            idx = idx * self.input_alphabets[k].len() + d;
        }
        idx
    }

    /// Output level for a joint symbol tuple.
    pub fn lookup(&self, tuple: &[usize]) -> u16 {
        self.outputs[self.index_of(tuple)]
    }

    /// Rewrite every entry through `map` (used to relabel intermediate
    /// levels as compact symbol indices). `new_output` describes the
    /// relabeled codomain.
    pub fn relabel(&self, map: impl Fn(u16) -> u16, new_output: OutputSet) -> Self {
        Self {
            input_alphabets: self.input_alphabets.clone(),
            output: new_output,
            outputs: self.outputs.iter().map(|&v| map(v)).collect(),
        }
    }

    fn bytes_per_entry(&self) -> usize {
        if self.output.levels() <= 256 {
            1
        } else {
            2
        }
    }

    /// Binary dump: magic `FCOT`, version, arity, output bits, entry width,
    /// per-source sizes (u32 LE), then one little-endian unsigned level per
    /// entry in row-major order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"FCOT")?;
        w.write_all(&[1u8, self.arity() as u8])?;
        w.write_all(&[self.output.bits() as u8, self.bytes_per_entry() as u8])?;
        for a in &self.input_alphabets {
            w.write_all(&(a.len() as u32).to_le_bytes())?;
        }
        match self.bytes_per_entry() {
            1 => {
                for &v in &self.outputs {
                    w.write_all(&[v as u8])?;
                }
            }
            _ => {
                for &v in &self.outputs {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    /// Parse a binary dump produced by [`OutcomeTable::write_binary`].
    pub fn read_binary<R: Read>(mut r: R) -> Result<TableDump> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head)?;
        if &head[0..4] != b"FCOT" {
            return Err(Error::MalformedDump("bad magic".into()));
        }
        if head[4] != 1 {
            return Err(Error::MalformedDump(format!("unknown version {}", head[4])));
        }
        let arity = head[5] as usize;
        let output_bits = head[6] as u32;
        let bytes_per_entry = head[7] as usize;
        if !(1..=2).contains(&bytes_per_entry) {
            return Err(Error::MalformedDump(format!(
                "bad entry width {bytes_per_entry}"
            )));
        }
        let mut sizes = Vec::with_capacity(arity);
        for _ in 0..arity {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            sizes.push(u32::from_le_bytes(b) as usize);
        }
        let total: usize = sizes.iter().product();
        let mut raw = Vec::new();
        r.read_to_end(&mut raw)?;
        if raw.len() != total * bytes_per_entry {
            return Err(Error::FrameLength {
                expected: total * bytes_per_entry,
                got: raw.len(),
            });
        }
        let entries = match bytes_per_entry {
            1 => raw.iter().map(|&b| b as u16).collect(),
            _ => raw
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]))
                .collect(),
        };
        Ok(TableDump {
            sizes,
            output_bits,
            entries,
        })
    }

    /// JSON dump for small tables.
    pub fn to_json(&self) -> Result<String> {
        let dump = JsonTable {
            arity: self.arity(),
            sizes: self.sizes(),
            output_bits: self.output.bits(),
            outputs: self.outputs.clone(),
        };
        Ok(serde_json::to_string_pretty(&dump)?)
    }
}

/// Contents of a binary outcome-table dump.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDump {
    pub sizes: Vec<usize>,
    pub output_bits: u32,
    pub entries: Vec<u16>,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    arity: usize,
    sizes: Vec<usize>,
    output_bits: u32,
    outputs: Vec<u16>,
}

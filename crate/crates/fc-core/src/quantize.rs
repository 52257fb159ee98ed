//! Uniform scalar quantization onto b-bit level alphabets.
//!
//! Every analog signal in the system (the three error signals and the valve
//! command) passes through a [`Quantizer`]: `2^bits` equal-width bins over
//! `[lo, hi)` with midpoint reconstruction, so the round-trip error is
//! bounded by `step / 2`. Out-of-range samples saturate to the first or last
//! level instead of erroring; closed-loop transients may briefly leave the
//! calibrated range and the controller must keep running.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Uniform midpoint quantizer over `[lo, hi)`.
///
/// Serializes as `{lo, hi, bits}`; the cached bin width is rebuilt on load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer {
    lo: f64,
    hi: f64,
    bits: u32,
    step: f64,
}

#[derive(Serialize, Deserialize)]
struct QuantizerRepr {
    lo: f64,
    hi: f64,
    bits: u32,
}

impl Serialize for Quantizer {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        QuantizerRepr {
            lo: self.lo,
            hi: self.hi,
            bits: self.bits,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quantizer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = QuantizerRepr::deserialize(deserializer)?;
        Quantizer::new(repr.lo, repr.hi, repr.bits).map_err(serde::de::Error::custom)
    }
}

impl Quantizer {
    /// Build a quantizer with `2^bits` equal-width bins over `[lo, hi)`.
    ///
    /// Fails with [`Error::InvalidRange`] if `lo >= hi` and
    /// [`Error::BitsOutOfRange`] unless `1 <= bits <= 16`.
    pub fn new(lo: f64, hi: f64, bits: u32) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        if !(1..=16).contains(&bits) {
            return Err(Error::BitsOutOfRange { bits });
        }
        let step = (hi - lo) / (1usize << bits) as f64;
        Ok(Self { lo, hi, bits, step })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Number of levels, `2^bits`.
    pub fn levels(&self) -> usize {
        1usize << self.bits
    }

    /// Bin width `(hi - lo) / 2^bits`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Map a sample to its level index. Saturating: values below `lo` map to
    /// level 0, values at or above `hi` map to the last level.
    #[inline]
    pub fn quantize(&self, v: f64) -> usize {
        let last = self.levels() - 1;
        if v.is_nan() || v < self.lo {
            return 0;
        }
        if v >= self.hi {
            return last;
        }
        (((v - self.lo) / self.step) as usize).min(last)
    }

    /// Midpoint of the bin at `level`.
    pub fn dequantize(&self, level: usize) -> Result<f64> {
        if level >= self.levels() {
            return Err(Error::IndexOutOfRange {
                index: level,
                len: self.levels(),
            });
        }
        Ok(self.lo + (level as f64 + 0.5) * self.step)
    }

    /// Quantize-then-dequantize: the midpoint of the bin `v` falls in.
    pub fn midpoint_of(&self, v: f64) -> f64 {
        self.lo + (self.quantize(v) as f64 + 0.5) * self.step
    }

    /// All bin midpoints in level order.
    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.levels())
            .map(|k| self.lo + (k as f64 + 0.5) * self.step)
            .collect()
    }
}

/// Discrete source alphabet: representative real values plus a probability
/// for each symbol. Sources default to the uniform distribution; the
/// intermediate node of a cascade carries an induced (counting) distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<f64>,
    probabilities: Vec<f64>,
}

impl Alphabet {
    const PROB_SUM_TOL: f64 = 1e-12;

    /// Alphabet with explicit probabilities. They must be non-negative and
    /// sum to 1 within `1e-12`.
    pub fn new(symbols: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if symbols.len() != probabilities.len() {
            return Err(Error::InvalidProbabilities {
                reason: format!(
                    "{} symbols but {} probabilities",
                    symbols.len(),
                    probabilities.len()
                ),
            });
        }
        if symbols.is_empty() {
            return Err(Error::InvalidProbabilities {
                reason: "empty alphabet".into(),
            });
        }
        if probabilities.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidProbabilities {
                reason: "negative or NaN probability".into(),
            });
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > Self::PROB_SUM_TOL {
            return Err(Error::InvalidProbabilities {
                reason: format!("probabilities sum to {sum}, expected 1"),
            });
        }
        Ok(Self {
            symbols,
            probabilities,
        })
    }

    /// Uniformly distributed alphabet over the given symbol values.
    pub fn uniform(symbols: Vec<f64>) -> Result<Self> {
        let n = symbols.len();
        if n == 0 {
            return Err(Error::InvalidProbabilities {
                reason: "empty alphabet".into(),
            });
        }
        let p = 1.0 / n as f64;
        // Exact-sum correction: make the last entry absorb rounding so the
        // vector sums to 1 bit-exactly.
        let mut probabilities = vec![p; n];
        let partial: f64 = probabilities[..n - 1].iter().sum();
        probabilities[n - 1] = 1.0 - partial;
        Self::new(symbols, probabilities)
    }

    /// Uniform alphabet over the midpoints of a quantizer.
    pub fn from_quantizer(q: &Quantizer) -> Self {
        Self::uniform(q.midpoints()).expect("quantizer has at least 2 levels")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn symbol(&self, index: usize) -> Result<f64> {
        self.symbols
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.symbols.len(),
            })
    }

    /// Smallest number of raw bits that can address every symbol,
    /// `ceil(log2(len))`, with a floor of 1 bit.
    pub fn raw_bits(&self) -> u32 {
        bits_for(self.symbols.len()).max(1)
    }
}

/// `ceil(log2(n))`: bits needed to address `n` distinct values; 0 for `n <= 1`.
pub fn bits_for(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sixteen_levels_over_symmetric_range() {
        let q = Quantizer::new(-8.0, 8.0, 4).unwrap();
        assert_eq!(q.levels(), 16);
        assert_eq!(q.step(), 1.0);
        let mids = q.midpoints();
        assert_eq!(mids[0], -7.5);
        assert_eq!(mids[15], 7.5);
    }

    #[test]
    fn one_bit_unit_range() {
        let q = Quantizer::new(0.0, 1.0, 1).unwrap();
        assert_eq!(q.levels(), 2);
        assert_eq!(q.midpoints(), vec![0.25, 0.75]);
        assert_eq!(q.dequantize(0).unwrap(), 0.25);
    }

    #[test]
    fn seven_bit_percent_range() {
        let q = Quantizer::new(0.0, 100.0, 7).unwrap();
        assert_eq!(q.levels(), 128);
        assert_eq!(q.step(), 0.78125);
        // Cross-check: step * levels recovers the full width.
        assert_eq!(q.step() * q.levels() as f64, 100.0);
        assert_eq!(q.quantize(50.0), 64);
    }

    #[test]
    fn quantize_saturates_instead_of_erroring() {
        let q = Quantizer::new(-8.0, 8.0, 4).unwrap();
        assert_eq!(q.quantize(0.2), 8);
        assert_eq!(q.quantize(-100.0), 0);
        assert_eq!(q.quantize(100.0), 15);
        assert_eq!(q.quantize(8.0), 15); // hi itself saturates
        assert_eq!(q.quantize(f64::NAN), 0);
    }

    #[test]
    fn dequantize_is_bin_midpoint() {
        let q = Quantizer::new(-8.0, 8.0, 4).unwrap();
        assert_eq!(q.dequantize(8).unwrap(), 0.5);
        assert!(q.dequantize(16).is_err());
    }

    #[test]
    fn invalid_construction_is_rejected() {
        assert!(matches!(
            Quantizer::new(1.0, 1.0, 4),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            Quantizer::new(2.0, 1.0, 4),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            Quantizer::new(0.0, 1.0, 0),
            Err(Error::BitsOutOfRange { .. })
        ));
        assert!(matches!(
            Quantizer::new(0.0, 1.0, 17),
            Err(Error::BitsOutOfRange { .. })
        ));
    }

    #[test]
    fn levels_round_trip_to_themselves() {
        for bits in 1..=10 {
            let q = Quantizer::new(-3.7, 12.9, bits).unwrap();
            for k in 0..q.levels() {
                assert_eq!(q.quantize(q.dequantize(k).unwrap()), k);
            }
        }
    }

    #[test]
    fn json_round_trip_keeps_fields() {
        let q = Quantizer::new(-11.3, 1.3, 7).unwrap();
        let json = serde_json::to_string(&q).unwrap();
        assert!(json.contains("\"lo\""));
        assert!(json.contains("\"bits\":7"));
        let back: Quantizer = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn uniform_alphabet_sums_to_one() {
        for n in [2usize, 3, 7, 128] {
            let a = Alphabet::uniform((0..n).map(|i| i as f64).collect()).unwrap();
            let sum: f64 = a.probabilities().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn bad_probability_vectors_are_rejected() {
        assert!(Alphabet::new(vec![0.0, 1.0], vec![0.7, 0.7]).is_err());
        assert!(Alphabet::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        assert!(Alphabet::new(vec![0.0], vec![0.5, 0.5]).is_err());
        assert!(Alphabet::new(vec![], vec![]).is_err());
    }

    #[test]
    fn bits_for_matches_ceil_log2() {
        assert_eq!(bits_for(0), 0);
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(5), 3);
        assert_eq!(bits_for(128), 7);
        assert_eq!(bits_for(129), 8);
    }

    proptest! {
        #[test]
        fn round_trip_error_within_half_step(
            v in -12.0f64..12.0,
            bits in 1u32..=12,
        ) {
            let q = Quantizer::new(-12.0, 12.0, bits).unwrap();
            let back = q.midpoint_of(v);
            prop_assert!((back - v).abs() <= q.step() / 2.0 + 1e-12);
        }

        #[test]
        fn quantize_is_monotone(
            a in -20.0f64..20.0,
            b in -20.0f64..20.0,
            bits in 1u32..=10,
        ) {
            let q = Quantizer::new(-12.0, 12.0, bits).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(q.quantize(lo) <= q.quantize(hi));
        }
    }
}

//! Encoders, decoder lookup tables, and the bit-exact wire frame.
//!
//! An encoder maps a source symbol to its color id, sent as a fixed-length
//! codeword of `ceil(log2(num_colors))` bits (zero bits when a single color
//! suffices — a constant contribution needs no transmission). The decoder
//! side is a dense lookup table from the received color tuple straight to the
//! function's output level; construction verifies that every symbol tuple
//! behind a color tuple agrees on the output, which is exactly the soundness
//! the characteristic graphs guarantee.
//!
//! Frame layout: codewords packed MSB-first in source order with no padding
//! between them, and the final byte zero-padded.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Coloring;
use crate::quantize::bits_for;
use crate::target::OutcomeTable;

/// Fixed-length bit string, value held LSB-aligned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Codeword {
    pub value: u32,
    pub len: u32,
}

impl Codeword {
    /// Bits MSB-first, for display and tests.
    pub fn bit_string(&self) -> String {
        (0..self.len)
            .rev()
            .map(|i| if self.value >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Symbol-to-codeword map for one source.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Encoder {
    color_of: Vec<usize>,
    num_colors: usize,
    codeword_len: u32,
}

impl Encoder {
    /// Wrap a coloring; the codeword length is `ceil(log2(num_colors))`.
    pub fn new(coloring: &Coloring) -> Self {
        Self {
            color_of: coloring.color_of().to_vec(),
            num_colors: coloring.num_colors(),
            codeword_len: bits_for(coloring.num_colors()),
        }
    }

    pub fn num_symbols(&self) -> usize {
        self.color_of.len()
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn codeword_len(&self) -> u32 {
        self.codeword_len
    }

    /// Unchecked hot-path color lookup used by the compiled pipelines.
    #[inline]
    pub(crate) fn color_unchecked(&self, symbol: usize) -> usize {
        self.color_of[symbol]
    }

    /// Color id of a symbol (the codeword value).
    pub fn color(&self, symbol: usize) -> Result<usize> {
        self.color_of
            .get(symbol)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: symbol,
                len: self.color_of.len(),
            })
    }

    /// Codeword for a symbol: its color id in `codeword_len` bits.
    pub fn encode(&self, symbol: usize) -> Result<Codeword> {
        Ok(Codeword {
            value: self.color(symbol)? as u32,
            len: self.codeword_len,
        })
    }
}

/// Dense decoder table over the mixed-radix product of per-source colors.
#[derive(Debug, Clone)]
pub struct DecoderLut {
    color_counts: Vec<usize>,
    table: Vec<u16>,
}

impl DecoderLut {
    /// Compile the decoder table for an outcome table and one coloring per
    /// source. Every joint symbol tuple is visited; two tuples landing on
    /// the same color tuple must agree on the output level or the build
    /// fails with [`Error::InconsistentColoring`].
    pub fn build(table: &OutcomeTable, colorings: &[Coloring]) -> Result<Self> {
        let sizes = table.sizes();
        if colorings.len() != sizes.len() {
            return Err(Error::ArityMismatch {
                expected: sizes.len(),
                got: colorings.len(),
            });
        }
        for (s, c) in colorings.iter().enumerate() {
            if c.color_of().len() != sizes[s] {
                return Err(Error::ArityMismatch {
                    expected: sizes[s],
                    got: c.color_of().len(),
                });
            }
        }
        let color_counts: Vec<usize> = colorings.iter().map(|c| c.num_colors()).collect();
        let lut_len: usize = color_counts.iter().product();
        let mut entries: Vec<Option<u16>> = vec![None; lut_len];

        let arity = sizes.len();
        let mut digits = vec![0usize; arity];
        for &level in table.outputs() {
            let mut idx = 0usize;
            for k in 0..arity {
                idx = idx * color_counts[k] + colorings[k].color(digits[k]);
            }
            match entries[idx] {
                None => entries[idx] = Some(level),
                Some(prev) if prev == level => {}
                Some(prev) => {
                    let mut colors = Vec::with_capacity(arity);
                    for k in 0..arity {
                        colors.push(colorings[k].color(digits[k]));
                    }
                    return Err(Error::InconsistentColoring {
                        colors,
                        a: prev,
                        b: level,
                    });
                }
            }
            for k in (0..arity).rev() {
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }

        // Every color id is used by at least one symbol and sources are
        // independent, so the full color product is reachable.
        let table: Vec<u16> = entries
            .into_iter()
            .map(|e| e.ok_or_else(|| Error::MalformedDump("unreachable color tuple".into())))
            .collect::<Result<_>>()?;
        Ok(Self {
            color_counts,
            table,
        })
    }

    pub fn arity(&self) -> usize {
        self.color_counts.len()
    }

    pub fn color_counts(&self) -> &[usize] {
        &self.color_counts
    }

    /// Total number of stored entries.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Output level for a received color tuple.
    pub fn decode(&self, colors: &[usize]) -> Result<u16> {
        if colors.len() != self.color_counts.len() {
            return Err(Error::ArityMismatch {
                expected: self.color_counts.len(),
                got: colors.len(),
            });
        }
        let mut idx = 0usize;
        for (k, (&c, &count)) in colors.iter().zip(&self.color_counts).enumerate() {
            if c >= count {
                return Err(Error::UnknownColorTuple {
                    coord: k,
                    color: c,
                    count,
                });
            }
            idx = idx * count + c;
        }
        Ok(self.table[idx])
    }

    /// Unchecked hot-path lookup used by the compiled pipelines.
    #[inline]
    pub(crate) fn decode_unchecked(&self, colors: &[usize]) -> u16 {
        let mut idx = 0usize;
        for (&c, &count) in colors.iter().zip(&self.color_counts) {
            idx = idx * count + c;
        }
        self.table[idx]
    }

    /// Binary dump: magic `FCLT`, version, arity, output bits, entry width,
    /// per-source color counts (u32 LE), then one little-endian level per
    /// entry in mixed-radix row-major order.
    pub fn write_binary<W: Write>(&self, mut w: W, output_bits: u32) -> Result<()> {
        let wide = self.table.iter().any(|&v| v > u8::MAX as u16);
        let bpe: u8 = if wide { 2 } else { 1 };
        w.write_all(b"FCLT")?;
        w.write_all(&[1u8, self.arity() as u8, output_bits as u8, bpe])?;
        for &c in &self.color_counts {
            w.write_all(&(c as u32).to_le_bytes())?;
        }
        if wide {
            for &v in &self.table {
                w.write_all(&v.to_le_bytes())?;
            }
        } else {
            for &v in &self.table {
                w.write_all(&[v as u8])?;
            }
        }
        Ok(())
    }

    /// Parse a binary dump produced by [`DecoderLut::write_binary`].
    pub fn read_binary<R: Read>(mut r: R) -> Result<(Self, u32)> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head)?;
        if &head[0..4] != b"FCLT" {
            return Err(Error::MalformedDump("bad magic".into()));
        }
        if head[4] != 1 {
            return Err(Error::MalformedDump(format!("unknown version {}", head[4])));
        }
        let arity = head[5] as usize;
        let output_bits = head[6] as u32;
        let bpe = head[7] as usize;
        if !(1..=2).contains(&bpe) {
            return Err(Error::MalformedDump(format!("bad entry width {bpe}")));
        }
        let mut color_counts = Vec::with_capacity(arity);
        for _ in 0..arity {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            color_counts.push(u32::from_le_bytes(b) as usize);
        }
        let total: usize = color_counts.iter().product();
        let mut raw = Vec::new();
        r.read_to_end(&mut raw)?;
        if raw.len() != total * bpe {
            return Err(Error::FrameLength {
                expected: total * bpe,
                got: raw.len(),
            });
        }
        let table = match bpe {
            1 => raw.iter().map(|&b| b as u16).collect(),
            _ => raw
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]))
                .collect(),
        };
        Ok((
            Self {
                color_counts,
                table,
            },
            output_bits,
        ))
    }

    /// JSON dump for small tables.
    pub fn to_json(&self, output_bits: u32) -> Result<String> {
        #[derive(Serialize)]
        struct JsonLut<'a> {
            arity: usize,
            color_counts: &'a [usize],
            output_bits: u32,
            table: &'a [u16],
        }
        Ok(serde_json::to_string_pretty(&JsonLut {
            arity: self.arity(),
            color_counts: &self.color_counts,
            output_bits,
            table: &self.table,
        })?)
    }
}

/// Packed per-sample payload: all codewords MSB-first in source order,
/// zero-padded to a byte boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub payload: Vec<u8>,
    pub layout: Vec<u32>,
}

/// Pack codewords into a frame.
pub fn pack_frame(codewords: &[Codeword]) -> Frame {
    let total_bits: u32 = codewords.iter().map(|c| c.len).sum();
    let mut payload = vec![0u8; (total_bits as usize).div_ceil(8)];
    let mut pos = 0usize;
    for cw in codewords {
        for i in (0..cw.len).rev() {
            if cw.value >> i & 1 == 1 {
                payload[pos / 8] |= 0x80 >> (pos % 8);
            }
            pos += 1;
        }
    }
    Frame {
        payload,
        layout: codewords.iter().map(|c| c.len).collect(),
    }
}

/// Unpack a frame back into codewords. The layout must be known to both
/// ends; a payload whose byte length does not match it is rejected.
pub fn unpack_frame(frame: &Frame) -> Result<Vec<Codeword>> {
    let total_bits: u32 = frame.layout.iter().sum();
    let expected = (total_bits as usize).div_ceil(8);
    if frame.payload.len() != expected {
        return Err(Error::FrameLength {
            expected,
            got: frame.payload.len(),
        });
    }
    let mut out = Vec::with_capacity(frame.layout.len());
    let mut pos = 0usize;
    for &len in &frame.layout {
        let mut value = 0u32;
        for _ in 0..len {
            let bit = frame.payload[pos / 8] >> (7 - pos % 8) & 1;
            value = value << 1 | bit as u32;
            pos += 1;
        }
        out.push(Codeword { value, len });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{greedy_color, CharacteristicGraph};
    use crate::quantize::Alphabet;
    use crate::target::TargetFunction;
    use proptest::prelude::*;

    fn mod_sum_parts() -> (OutcomeTable, Vec<Coloring>) {
        let alphabets = vec![
            Alphabet::uniform(vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
            Alphabet::uniform(vec![0.0, 1.0]).unwrap(),
        ];
        let t = OutcomeTable::build(&TargetFunction::mod_sum(), &alphabets).unwrap();
        let colorings = (0..2)
            .map(|s| greedy_color(&CharacteristicGraph::build(&t, s).unwrap()))
            .collect();
        (t, colorings)
    }

    #[test]
    fn codeword_lengths_from_color_counts() {
        let two = Coloring::from_colors(vec![0, 1, 0, 1]).unwrap();
        assert_eq!(Encoder::new(&two).codeword_len(), 1);

        let one = Coloring::from_colors(vec![0, 0]).unwrap();
        assert_eq!(Encoder::new(&one).codeword_len(), 0);

        let five = Coloring::from_colors(vec![0, 1, 2, 3, 4]).unwrap();
        assert_eq!(Encoder::new(&five).codeword_len(), 3);
    }

    #[test]
    fn mod_sum_lut_matches_expected_tuples() {
        let (t, colorings) = mod_sum_parts();
        let lut = DecoderLut::build(&t, &colorings).unwrap();
        assert_eq!(lut.decode(&[0, 0]).unwrap(), 0);
        assert_eq!(lut.decode(&[0, 1]).unwrap(), 1);
        assert_eq!(lut.decode(&[1, 0]).unwrap(), 1);
        assert_eq!(lut.decode(&[1, 1]).unwrap(), 0);
        assert_eq!(lut.len(), 4);
    }

    #[test]
    fn mod_sum_encode_decode_path() {
        let (t, colorings) = mod_sum_parts();
        let lut = DecoderLut::build(&t, &colorings).unwrap();
        let ex = Encoder::new(&colorings[0]);
        let ey = Encoder::new(&colorings[1]);
        let cx = ex.encode(2).unwrap();
        let cy = ey.encode(1).unwrap();
        assert_eq!(cx.bit_string(), "0");
        assert_eq!(cy.bit_string(), "1");
        assert_eq!(
            lut.decode(&[cx.value as usize, cy.value as usize]).unwrap(),
            1
        );
    }

    #[test]
    fn decode_whole_table_end_to_end() {
        let (t, colorings) = mod_sum_parts();
        let lut = DecoderLut::build(&t, &colorings).unwrap();
        for x in 0..4 {
            for y in 0..2 {
                let colors = [colorings[0].color(x), colorings[1].color(y)];
                assert_eq!(lut.decode(&colors).unwrap(), t.lookup(&[x, y]));
            }
        }
    }

    #[test]
    fn inconsistent_coloring_is_caught() {
        let (t, _) = mod_sum_parts();
        // Improper coloring: one color for everything cannot be decoded.
        let bad = vec![
            Coloring::from_colors(vec![0, 0, 0, 0]).unwrap(),
            Coloring::from_colors(vec![0, 0]).unwrap(),
        ];
        assert!(matches!(
            DecoderLut::build(&t, &bad),
            Err(Error::InconsistentColoring { .. })
        ));
    }

    #[test]
    fn unknown_color_tuple_is_rejected() {
        let (t, colorings) = mod_sum_parts();
        let lut = DecoderLut::build(&t, &colorings).unwrap();
        assert!(matches!(
            lut.decode(&[2, 0]),
            Err(Error::UnknownColorTuple { .. })
        ));
        assert!(lut.decode(&[0]).is_err());
    }

    #[test]
    fn zero_length_codewords_contribute_no_bits() {
        let one = Coloring::from_colors(vec![0, 0]).unwrap();
        let e = Encoder::new(&one);
        let cw = e.encode(1).unwrap();
        assert_eq!(cw.len, 0);
        let frame = pack_frame(&[cw]);
        assert!(frame.payload.is_empty());
        assert_eq!(unpack_frame(&frame).unwrap(), vec![cw]);
    }

    #[test]
    fn documented_packing_example() {
        let cws = [
            Codeword { value: 1, len: 1 },
            Codeword { value: 0, len: 1 },
            Codeword { value: 0b10, len: 2 },
        ];
        let frame = pack_frame(&cws);
        assert_eq!(frame.payload, vec![0xA0]);
        assert_eq!(unpack_frame(&frame).unwrap(), cws.to_vec());
    }

    #[test]
    fn empty_layout_packs_to_nothing() {
        let frame = pack_frame(&[]);
        assert!(frame.payload.is_empty());
        assert_eq!(unpack_frame(&frame).unwrap(), vec![]);
    }

    #[test]
    fn truncated_frame_is_rejected() {
        let cws = [
            Codeword { value: 5, len: 5 },
            Codeword { value: 9, len: 5 },
        ];
        let mut frame = pack_frame(&cws);
        frame.payload.pop();
        assert!(matches!(
            unpack_frame(&frame),
            Err(Error::FrameLength { .. })
        ));
    }

    #[test]
    fn lut_binary_dump_round_trips() {
        let (t, colorings) = mod_sum_parts();
        let lut = DecoderLut::build(&t, &colorings).unwrap();
        let mut buf = Vec::new();
        lut.write_binary(&mut buf, 1).unwrap();
        let (back, bits) = DecoderLut::read_binary(buf.as_slice()).unwrap();
        assert_eq!(bits, 1);
        assert_eq!(back.color_counts(), lut.color_counts());
        assert_eq!(back.decode(&[1, 1]).unwrap(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn frames_round_trip(cws in proptest::collection::vec((0u32..65536, 0u32..=16), 0..6)) {
            // Mask values to their length so the round trip is well-defined.
            let codewords: Vec<Codeword> = cws
                .into_iter()
                .map(|(v, len)| Codeword {
                    value: if len == 0 { 0 } else { v & ((1u32 << len) - 1) },
                    len,
                })
                .collect();
            let frame = pack_frame(&codewords);
            prop_assert_eq!(unpack_frame(&frame).unwrap(), codewords);
        }
    }
}

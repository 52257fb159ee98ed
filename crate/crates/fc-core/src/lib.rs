//! Functional compression for in-network computation of a control law.
//!
//! Instead of shipping raw sensor words to the controller, each source sends
//! only as much as the destination needs to evaluate its target function.
//! The coding is table-driven: quantize each source, tabulate the function
//! over the joint alphabet, build per-source characteristic graphs (two
//! symbols conflict when some assignment of the other sources separates the
//! outputs), color them greedily, and transmit colors. The destination maps
//! the received color tuple through a dense lookup table straight to the
//! function output — no source reconstruction anywhere.
//!
//! # Pieces
//!
//! - [`quantize`]: uniform midpoint quantizers and source alphabets.
//! - [`target`]: the PID control law, its cascade split, the mod-sum toy
//!   function, and exhaustive outcome tables.
//! - [`graph`]: characteristic graphs, greedy coloring, chromatic entropy,
//!   compression rate.
//! - [`codec`]: encoders, decoder lookup tables, bit-exact wire frames.
//! - [`pipeline`]: compiled simple (three sources → destination) and
//!   cascaded (two sources → relay → destination) topologies.
//! - [`plant`]: the leaking-water-tank loop that the compiled pipelines
//!   drive closed-loop.
//! - [`bench`]: offline/online cost measurement and the bit-width sweep.
//! - [`svg`]: dependency-free chart rendering for the reports.

pub mod bench;
pub mod codec;
pub mod error;
pub mod graph;
pub mod pipeline;
pub mod plant;
pub mod quantize;
pub mod svg;
pub mod target;

pub use error::{Error, Result};
pub use pipeline::{compile, compile_cascaded, compile_simple, CompiledPipeline, PipelineConfig, Topology};
pub use quantize::{Alphabet, Quantizer};
pub use target::{eval_mod_sum, eval_pid, OutcomeTable, PidGains, TargetFunction};

//! Memory-efficient mutual-information-maximizing quantized min-sum (MIM-QMS)
//! decoding for rate-compatible LDPC codes.
//!
//! The crate covers the whole pipeline:
//!
//! - [`codes`]: Tanner graphs, alist / quasi-cyclic ingestion, (joint) degree distributions.
//! - [`quantizer`]: conditional pmfs and the dynamic-programming MI-maximizing quantizer.
//! - [`channel`]: BPSK-AWGN model, design SNR conversion, channel quantizer design.
//! - [`mimde`]: density evolution over joint degree distributions, emitting a [`LutSchedule`].
//! - [`lutopt`]: discrepancy-driven merging of per-iteration LUTs.
//! - [`decoders`]: the LUT-driven quantized min-sum decoder plus NMS and BP baselines.
//! - [`harness`]: Monte-Carlo FER/BER/I_avg experiments, CSV output and the memory model.
//!
//! See the `examples/` directory of this crate for one runnable program per capability.

pub mod channel;
pub mod codes;
pub mod decoders;
pub mod error;
pub mod harness;
pub mod lutopt;
pub mod mimde;
pub mod quantizer;
pub mod schedule_file;

pub use error::{Error, Result};
pub use mimde::{LutIterSet, LutSchedule, ReconstructionFn};
pub use quantizer::ConditionalPmf;

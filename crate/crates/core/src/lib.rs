//! Garbled circuits for two-party computation.
//!
//! The crate is organised bottom-up:
//!
//! - [`circuit`]: gate-level boolean circuits, the `SCD1` text format and a
//!   cleartext evaluator
//! - [`label`], [`gf2k`], [`dkc`]: wire labels, field arithmetic and the
//!   dual-key ciphers
//! - [`schemes`]: six garbling schemes from point-and-permute to half gates
//! - [`ot`], [`channel`], [`runtime`]: oblivious transfer and the two-party
//!   protocol over framed channels
//! - [`pfe`]: private function evaluation through oblivious switching networks

pub mod channel;
pub mod circuit;
pub mod dkc;
pub mod gf2k;
pub mod label;
pub mod ot;
pub mod pfe;
pub mod runtime;
pub mod schemes;

pub use circuit::{Circuit, TruthTable};
pub use label::Label;
pub use schemes::{de, en, ev, gb, GarbleParams, SchemeId, SchemeKind};

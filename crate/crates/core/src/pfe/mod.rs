//! Private function evaluation: the function holder keeps the circuit
//! topology secret by routing the garbler's wire labels through an
//! obliviously evaluated switching network.
//!
//! - [`mapping`]: outgoing/incoming wire mapping of a circuit and the count
//!   of possible mappings
//! - [`network`]: switching networks, Waksman permutation networks and the
//!   three-stage extended-permutation network
//! - [`osn`]: two-party oblivious evaluation of a switching network
//! - [`protocol`]: the PFE variant of Yao's protocol over NAND-only circuits
//! - [`nand`]: NAND normalization

pub mod mapping;
pub mod nand;
pub mod network;
pub mod osn;
pub mod protocol;

use thiserror::Error;

use crate::channel::ChannelError;
use crate::circuit::CircuitError;
use crate::ot::OtError;

pub use mapping::{circuit_mapping, count_mappings, rebuild_circuit, CircuitMapping};
pub use nand::nand_normalize;
pub use network::{
    ep_network_build, ep_program, waksman_build, waksman_program, EpNetwork, ExtendedPermutation, Selection, Switch, SwitchKind,
    SwitchingNetwork,
};
pub use osn::{osn_holder, osn_owner, OsnShape, OsnStats};
pub use protocol::{pfe_garbler, pfe_holder, pfe_run, GateGrouping, PfePublic, PfeReport, PfeSession};

#[derive(Debug, Error)]
pub enum PfeError {
    #[error("network size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("not a permutation")]
    NotPermutation,
    #[error("invalid extended permutation: {0}")]
    InvalidEp(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("gate {gate} is not a NAND gate")]
    NotNand { gate: usize },
    #[error("expected {expected} input bits, got {got}")]
    Input { expected: usize, got: usize },
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("output label {0} does not decode")]
    Authenticity(usize),
    #[error("peer aborted the session")]
    Aborted,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Ot(#[from] OtError),
}

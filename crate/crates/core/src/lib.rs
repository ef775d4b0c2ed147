//! Delegated and unknown-query oblivious transfer over a prime-order
//! subgroup, with Paillier-based multi-receiver filtering, a
//! constant-response compiler for conventional OT, and the Supersonic
//! pad-based OT.

pub mod base_ot;
pub mod bench;
pub mod compiler;
pub mod dq;
pub mod duq;
pub mod encoding;
pub mod error;
pub mod group;
pub mod harness;
pub mod paillier;
pub mod prime;
pub mod primitives;
pub mod supersonic;
pub mod verify;

pub use error::{OtError, Result};

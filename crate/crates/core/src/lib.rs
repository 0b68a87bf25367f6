//! Exact-repair regenerating codes built from combinatorial block designs.
//!
//! A message is protected by two nested MDS layers: a long systematic code
//! `G = [I; S]` across all parity groups, and a short `(r, r-t+1)` code inside
//! each group. Group `j` lives on the disks of block `B_j` of a design
//! `S_λ(t, r, n)`, so a failed disk is rebuilt by copying stored symbols from
//! the other disks of each block it belongs to.

pub mod analysis;
pub mod codec;
pub mod combin;
pub mod construction;
pub mod designs;
pub mod error;
pub mod ffield;
pub mod storesim;

pub use error::{Error, Result};

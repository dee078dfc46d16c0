//! Modular obstruction calculus for regular induced subgraphs.
//!
//! A set of vertices is *q-modular* when its induced degrees agree modulo
//! `q`. This crate computes the parity partition into 2-modular halves,
//! the trace data of a core inside a modular witness, the quotient
//! obstruction to lifting `q` to `2q`, and either an equal-trace deletion
//! that performs the lift or a parity cut proving no such deletion exists.
//! Brute-force oracles and a random-reservoir simulator serve as ground truth.

pub mod absorb;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod oracle;
pub mod parity;
pub mod registry;
pub mod reservoir;
pub mod synth;
pub mod traces;
pub mod witness;

pub use absorb::{AbsorptionProblem, Certificate, CertificateDocument};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use graph::{Graph, VertexSet};
pub use parity::{parity_partition, ParityPartition};
pub use traces::TraceTable;
pub use witness::ModularWitness;

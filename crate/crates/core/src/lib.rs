//! Exact Kolmogorov complexity on a small loop-free prefix machine, the
//! restricted computer family built from it by requirement lists, and an
//! exhaustive check of the exact chain identity that family satisfies.
//!
//! Pipeline: [`kengine::build_index`] runs every program on every data
//! string, [`kengine::build_k_table`] reduces the runs to shortest programs,
//! [`chaitin`] turns them into the computers W_s and the dispatcher W, and
//! [`theorem::verify_theorem`] compares K_W against K_U triple by triple.
//! [`lab`] ties the steps together and persists them as TSV artifacts.

pub mod artifacts;
pub mod bits;
pub mod chaitin;
pub mod kengine;
pub mod kraft;
pub mod lab;
pub mod theorem;
pub mod vm;

pub use bits::{index_of, pair, string_of, tuple_encode, unpair, BitString, SimpleSet, StringIndex};
pub use lab::{Lab, LabConfig, LabError};
pub use vm::{MachineSpec, Opcode, ProgramBits, RunOutcome, Undefined};

//! Bipartition rank analysis for dense tensors and tensor-network models.
//!
//! The crate covers Schmidt decompositions of matricizations, sequential
//! decompositions into TT, Tucker and hierarchical Tucker formats, min-cut
//! rank bounds on model bond graphs, separability scaling and the bond
//! dimensions a model needs to represent a target.

pub mod capacity;
pub mod cli;
pub mod decompose;
pub mod error;
pub mod formats;
pub mod rank_analysis;
pub mod schmidt;
pub mod synth_io;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{DenseTensor, Matrix, ModeBipartition};

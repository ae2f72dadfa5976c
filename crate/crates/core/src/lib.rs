//! Exact verification of `S_{n+1}`-equivariant Ext computations.

pub mod chase;
pub mod cli;
pub mod dimformulas;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod repspace;
pub mod symgroup;
pub mod yoneda;

pub use error::{Error, Result};

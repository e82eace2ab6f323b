#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod config;
pub mod cwt;
pub mod error;
pub mod gkcs;
pub mod io;
pub mod pipeline;
pub mod quadrature;
pub mod revival;
pub mod scarf;
pub mod specfun;
pub mod verify;
pub mod xjacobi;

pub use error::{Error, Result};

pub mod cli;
pub mod ensembles;
pub mod eof;
pub mod error;
pub mod io;
pub mod optimize;
pub mod probes;
pub mod qmat;
pub mod qstate;
pub mod statezoo;

pub use error::{Error, Result};

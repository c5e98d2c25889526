//! Local arithmetic for dihedral long-root A-packets of split G2 over p-adic fields.

pub mod arith;
pub mod charlib;
pub mod cli;
pub mod cubic;
pub mod epsilon;
pub mod error;
pub mod g2;
pub mod hermitian;
pub mod packets;
pub mod padic;
pub mod theta_u;

pub use error::{Error, Result};

//! Exact computations on finite simplicial sets presented in Eilenberg–Zilber form.
//!
//! The crate is organised bottom-up:
//!
//! * [`delta`]: monotone maps between finite ordinals.
//! * [`sset`]: truncated simplicial and semi-simplicial sets, maps, nerves, limits and colimits.
//! * [`lifting`]: lifting problems, fibration certificates, retracts and corner products.
//! * [`degen`]: degeneracy quotients and degeneracy-detecting maps.
//! * [`pstructure`]: P-structures and their compilation into horn-attachment sequences.
//! * [`ex`]: subdivision, the `Ex` construction, the `j`/`r` operator calculus and the unit's P-structure.

pub mod degen;
pub mod delta;
pub mod error;
pub mod ex;
pub mod lifting;
pub mod pstructure;
pub mod sset;

pub use error::{Error, Result};

//! Exact localization engine for equivariant χ_y-genera of moduli of framed
//! sheaves on P2 and on its blow-up.

pub mod blowup_factor;
pub mod cache;
pub mod characters;
pub mod coefficients;
pub mod error;
pub mod genera;
pub mod partitions;
pub mod qseries;
pub mod rank1;
pub mod verify;

pub use error::{Error, Result};

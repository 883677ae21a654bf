//! Feasibility analysis of linear interference alignment in MIMO
//! interference broadcast channels.

pub mod classify;
pub mod conditions;
pub mod config;
pub mod error;
pub mod jacobian;
pub mod numeric;

pub use error::{Error, Result};

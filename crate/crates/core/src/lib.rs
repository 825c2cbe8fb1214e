//! Exact simulation and verification of quantum channels built on GHZ-class
//! resources: teleportation, dense coding, telecloning and Holevo capacity.

pub mod bases;
pub mod capacity;
pub mod error;
pub mod gates;
pub mod json;
pub mod locc;
pub mod protocols;
pub mod qla;
pub mod verify;

pub use error::{Error, Result};

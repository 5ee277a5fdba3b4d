//! Uncertainty-aware digital twin co-simulation of a thermal incubator.
//!
//! The crate models a heated box as a physical twin observed through noisy
//! sensors and a digital twin integrated with an uncertainty-propagating Euler
//! solver. The two are fused when consistent and compared to detect divergence.
//! [`harness`] wires everything into reproducible Monte-Carlo experiments.

pub mod consistency;
pub mod control;
pub mod error;
pub mod harness;
pub mod mitigation;
pub mod plant;
pub mod sensing;
pub mod uncertain;

pub use error::{Error, Result};
pub use uncertain::{UncertainBool, UncertainReal};

//! Gaussian mixture densities and their modes.
//!
//! The crate evaluates mixture densities with derivatives, builds mixtures
//! with prescribed numbers of modes, locates all critical points by
//! multistart ascent and computes exact mode-count bounds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrangement;
pub mod bounds;
pub mod constructions;
pub mod error;
pub mod lowdisc;
pub mod mixture;
pub mod modes;
pub mod par;
pub mod ridgeline;

pub use constructions::{Provenance, Scenario, SearchBox};
pub use error::{Error, Result};
pub use mixture::{EvalResult, GaussianComponent, Mixture};
pub use modes::{AscentOptions, CriticalKind, CriticalPoint, ModeReport};
pub use par::Execution;

//! Vehicle routing with production: vehicles carrying 3D printers that
//! produce orders en route (MoP), and central production at the depot with
//! optional early start (CP).
//!
//! [`model`] holds the data types and the reference evaluators; everything
//! else is checked against them.

pub mod alns;
pub mod costs;
pub mod delay_profile;
pub mod instances;
pub mod io;
pub mod model;
pub mod oracle;
pub mod search;

pub use model::{CpSolution, Customer, Instance, MopSolution, Timeline, Variant, Weights, EPS};

//! Numerics for the sharp Stein-Tomas and Strichartz inequalities.
//!
//! The main entry points are the extension operator on the sphere ([`extension`]),
//! Strichartz quotients of Schrodinger flows ([`strichartz`]), the two-profile
//! constant ([`twoprofile`]), concentration maps ([`concmaps`]), trial-function
//! expansions ([`trial`]), refined norms ([`refinednorm`]) and the ascent ([`search`]).

pub mod error;
pub mod numerics;
pub mod geometry;
pub mod extension;
pub mod strichartz;
pub mod twoprofile;
pub mod concmaps;
pub mod trial;
pub mod search;
pub mod refinednorm;
pub mod cli;

pub use error::{Result, SrlError};
pub use numerics::C64;

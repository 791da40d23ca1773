//! Exact symbolic algebra for exponential fields.
//!
//! The crate covers exact arithmetic ([`arith`]), polynomial ideals
//! ([`poly`]), exponential polynomials and Khovanskii systems
//! ([`exppoly`]), subvarieties of `(Ga × Gm)^n` ([`geometry`]), finitely
//! presented partial exponential fields ([`presentation`]), first-order
//! sentence emission ([`axiomgen`]) and the session language driving all of
//! it ([`session`]).

pub mod arith;
pub mod axiomgen;
mod bounds;
pub mod error;
pub mod exppoly;
pub mod geometry;
pub mod poly;
pub mod presentation;
pub mod session;

pub use bounds::Bounds;
pub use error::{Error, Result};

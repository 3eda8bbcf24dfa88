//! Exact flat-geometry geodesic and billiard simulation: itinerary
//! realization in a three-disc scattering domain, moving-ball catchers on
//! recurrent domains, adversarial evaders, and control-condition checks.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod catcher;
pub mod error;
pub mod evader;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod symbolic;
pub mod tgcc;

pub use error::{Error, Result};

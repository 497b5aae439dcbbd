//! Graphcodes of two-parameter persistent homology.
//!
//! A graphcode is a layered graph: layer `l` holds the barcode of the
//! horizontal slice `y <= cut_l` of a bifiltration, and edges express each
//! basis cycle of a slice as a sum of basis cycles of the next slice. All
//! layers and edges come out of one out-of-order Z₂ column reduction.
//!
//! The usual path is [`complex::build_graded_matrix`] (or
//! [`formats::parse_presentation`]), then [`complex::cap`], then
//! [`gcode::compute_graphcode`] and [`gcode::threshold_filter`].

pub mod complex;
pub mod datasets;
pub mod error;
pub mod formats;
pub mod gcode;
pub mod oracle;
pub mod pipeline;
pub mod z2core;

pub use error::{Error, Result};

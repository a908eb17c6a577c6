//! White-box validation of quantitative product-line models.
//!
//! The library covers the full pipeline: parsing the textual modeling DSL,
//! probabilistic simulation with constraint-aware transition enabling,
//! statistical estimation of query properties with confidence-interval
//! stopping, CSV event-log emission, heuristics-miner process discovery on
//! those logs, and a diff between the specified and the mined procedural
//! graphs.

pub mod eval;
pub mod eventlog;
pub mod expr;
pub mod graphdiff;
pub mod miner;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod rat;
pub mod sim;
pub mod smc;
pub mod span;

pub use model::{Configuration, Model};
pub use parser::{parse_model, parse_query, pretty_print, ParseError};

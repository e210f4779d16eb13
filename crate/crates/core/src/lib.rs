//! Automated signal categorisation for the Dendritic Cell Algorithm.
//!
//! Multivariate time series are resampled to 1 Hz, Min-Max normalised and
//! ranked by how much of the data's variance each attribute carries. The
//! top attribute drives the antigen multiplier; the rest are mapped onto the
//! PAMP, Danger and Safe categories in order of weight magnitude. A
//! deterministic DCA turns the resulting streams into per-second `K_alpha`
//! scores, which are classified per labelled segment and summarised as ROC
//! curves.
//!
//! ```
//! use pcadca::dca::transform_signals;
//! use pcadca::sigmap::{Signals, WeightTable};
//!
//! let (csm, k) = transform_signals(&WeightTable::default(), Signals::new(0.0, 0.0, 1.0));
//! assert_eq!((csm, k), (2.0, -3.0));
//! ```

pub mod config;
pub mod dca;
pub mod error;
pub mod eval;
pub mod fmt;
pub mod ingest;
pub mod pca;
pub mod pipeline;
pub mod prep;
pub mod report;
pub mod sigmap;

pub use error::{Error, Result};

//! Radial weights on the unit disc, weight-induced fractional derivatives,
//! smooth Cesàro block decompositions and weighted Hardy/Bergman norms,
//! together with an experiment harness that measures the equivalence
//! constants relating them.

pub mod cesaro;
pub mod classify;
pub mod cli;
pub mod error;
pub mod norms;
pub mod quad;
pub mod special;
pub mod report;
pub mod series;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use series::TaylorSeries;
pub use weights::{scaled_weight, Family, RadialWeight};

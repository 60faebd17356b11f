// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod estimators;
pub mod generators;
pub mod io;
mod linalg;
pub mod network;
pub mod pipeline;
pub mod resistance;
pub mod rng;
pub mod structures;
pub mod walks;

pub use error::{Error, Result};
pub use estimators::{ExponentReport, ScaleSeries, SeriesKind, Statistic, Window};
pub use generators::{Family, GeneratorSpec};
pub use network::{Annulus, BallSearch, Edge, EdgeWeight, Network, Truncation, UNREACHED};
pub use resistance::SolveOptions;

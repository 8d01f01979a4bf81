//! Exact computation with decreasing rearrangements, interval partitions and
//! averaging operators on the probability interval (0,1].
//!
//! Every scalar is an arbitrary-precision rational; no verdict depends on
//! floating point.

pub mod averaging;
pub mod dyadic;
pub mod error;
pub mod extremal;
pub mod ideals;
pub mod lp;
pub mod partition;
pub mod random;
pub mod rearrange;
pub mod rational;
pub mod regularity;
pub mod step;

pub use dyadic::{DyadicFamily, DyadicRule, DyadicSpec, Monotone};
pub use error::{Error, Result};
pub use partition::{IntervalPartition, Partition, StochasticVector};
pub use rational::Q;
pub use step::StepFunction;

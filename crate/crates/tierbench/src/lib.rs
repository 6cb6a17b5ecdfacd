//! Cost models and result analysis for neural-network accelerator benchmarks.
//!
//! The crate covers four tiers of evaluation:
//!
//! * [`topology`] derives operation, weight and activation counts of a network
//!   from its layer shapes, for inference and training.
//! * [`catalog`] and [`roofline`] turn those counts into attainable-throughput
//!   predictions for concrete platforms.
//! * [`measurements`] ingests measured results, recomputes efficiency and checks
//!   that published figures agree with each other.
//! * [`pareto`] and [`report`] compare configurations across accuracy and
//!   performance objectives.
//!
//! [`bundled`] ships reference fixtures for ResNet50, GoogLeNet v1, an embedded
//! GPU and an FPGA DPU.

pub mod bundled;
pub mod catalog;
mod csvio;
pub mod error;
pub mod finding;
pub mod measurements;
pub mod pareto;
pub mod report;
pub mod roofline;
pub mod topology;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/cost-model.md")]
    mod cost_model {}
    #[doc = include_str!("../../../book/src/roofline.md")]
    mod roofline {}
    #[doc = include_str!("../../../book/src/measurements.md")]
    mod measurements {}
    #[doc = include_str!("../../../book/src/pareto.md")]
    mod pareto {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

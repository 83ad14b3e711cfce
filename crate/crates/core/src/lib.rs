//! Capability viewpoint toolkit.
//!
//! * [`model`]: viewpoints, skill graphs, requirements and their validation
//! * [`adl`]: the textual model format
//! * [`monitor`]: runtime performance aggregation and degradation decisions
//! * [`traceability`]: coverage and impact across correspondences
//! * [`scenario`]: stopping envelopes and hazard checks at a crossing
//! * [`formats`]: CSV inputs and outputs
//! * [`cli`]: the `capcheck` command line

pub mod adl;
pub mod cli;
pub mod formats;
pub mod model;
pub mod monitor;
pub mod scenario;
pub mod traceability;

//! Data model, policy evaluation and exact oracles for correlated knapsack
//! orienteering (CorrKO).
//!
//! A CorrKO instance is a finite metric with a root, a travel budget `B`, a
//! processing budget `W`, and a joint (size, reward) distribution at every
//! vertex. A policy walks from the root, processing the job at every vertex
//! it visits; a job's reward counts only if it completes by time `W`.

pub mod adversarial;
pub mod dist;
pub mod error;
pub mod format;
pub mod instance;
pub mod metric;
pub mod oracle;
pub mod policy;
pub mod rational;
pub mod stats;

pub use dist::{Atom, JointDistribution};
pub use error::{CoreError, Result};
pub use instance::{split_rewards, CorrKOInstance};
pub use oracle::{adaptivity_gap, opt_adaptive, opt_nonadaptive, opt_nonadaptive_restricted, GapReport, GapValue, OracleCaps};
pub use metric::{validate_metric, FiniteMetric, MetricReport, MetricViolation};
pub use policy::{
    AdaptivePolicyTree, CancellationPolicy, NonAdaptivePolicy, PolicyNode, Threshold,
    ThresholdDist,
};
pub use rational::Rational;
pub use stats::{start_reward, truncated_mean, TruncatedStats};

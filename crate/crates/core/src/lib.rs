//! Bootstrapped upper confidence bounds for stochastic bandits.
//!
//! The crate is organised around the pieces of a bandit simulation:
//!
//! - [`distributions`]: reward laws with closed-form means, and the K-armed
//!   environment presets used by the experiments.
//! - [`bootstrap`]: multiplier-bootstrap quantiles (Monte Carlo and exact
//!   enumeration), preliminary bounds `phi`, and the second-order corrected
//!   threshold.
//! - [`concentration`]: Hoeffding, empirical Bernstein and sub-Weibull
//!   deviation bounds, plus an empirical calibration of the sub-Weibull
//!   constant.
//! - [`policies`]: bootstrapped UCB and its naive variant, UCB1, and two
//!   Thompson samplers.
//! - [`mab`]: the episode loop, pseudo-regret traces, seed aggregation and
//!   gap sweeps.
//! - [`linear`]: ridge estimation, OFUL, linear Thompson sampling and the
//!   bootstrapped linear UCB.
//! - [`experiments`]: JSON configs, presets, CSV/SVG output and the command
//!   line front end used by the `bootucb` binary.
//!
//! Every random quantity is drawn from a caller-owned, explicitly seeded
//! [`rng::Stream`], so any run can be replayed bit for bit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bootstrap;
pub mod concentration;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod history;
pub mod linear;
pub mod mab;
pub mod policies;
pub mod rng;

pub use error::{Error, Result};
pub use history::ArmHistory;

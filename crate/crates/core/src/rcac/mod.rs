//! Retrospective cost adaptive control.
//!
//! Each channel computes a scalar control `u = phi' theta` from a regressor
//! built out of its own performance variable. The gains are the exact
//! minimiser of a cumulative retrospective cost, updated recursively with a
//! weighted RLS step (no forgetting). The sign of `sigma` encodes the control
//! direction: with the performance variable defined as `setpoint -
//! measurement`, a plant whose output rises with `u` needs `sigma < 0`.

mod bank;
mod channel;
pub mod oracle;
mod regressor;

pub use bank::{ChannelId, Performance, RcacBank, RcacChannel, RegressorKind};
pub use channel::{FreezeReason, RcacHyper, RcacState};
pub use oracle::{batch_oracle, retrospective_cost, RetroSample};
pub use regressor::{build_regressor_p, build_regressor_pi};

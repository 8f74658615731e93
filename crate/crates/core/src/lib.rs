//! Ultimatum Game simulation for computationally transcendent agents with
//! fairness thresholds.
//!
//! Layers, bottom up: [`payoff`] (perceived-payoff lens), [`identity`]
//! (sense of self and fairness thresholds), [`utility`], the [`game`]
//! engine, the [`sweep`] harness that tabulates curves and matrices, and
//! [`config`]/[`cli`] for the command-line surface.

pub mod cli;
pub mod config;
pub mod error;
pub mod game;
pub mod identity;
pub mod output;
pub mod payoff;
pub mod sweep;
pub mod utility;

pub use error::{Error, Result};
pub use game::{GameConfig, Outcome, PlayerSpec, TieBreak};
pub use identity::{Aspect, AspectId, FairnessMode, SenseOfSelf};
pub use payoff::{LensFamily, PayoffLens};
pub use utility::{PayoffVector, Split};

//! Q-learning population dynamics for a two-technology coordination game,
//! its quantal response equilibria, the saddle-node bifurcation in the
//! control level `T`, and the catastrophe/hysteresis schedule that moves a
//! locked-in population to the efficient equilibrium.

pub mod bounds;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod inequalities;
pub mod mechanism;
pub mod qre;
pub mod roots;
pub mod sweep;

pub use error::{Error, Result};
pub use game::{GameParams, NashProfile};
pub use qre::{critical_temperature, find_qre, CriticalPoint, QrePoint, QreSet, Stability};

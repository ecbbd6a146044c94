//! Stopping-region collision avoidance with contingency invocation,
//! constraint tightening, and a deterministic simulator that reproduces the
//! colliding reciprocal dance of a vehicle driven at full throttle toward a
//! stationary cyclist.
//!
//! Module map:
//!
//! - [`geom`]: polyline paths and capsule sweeps.
//! - [`dynamics`]: constant-acceleration model and lagged plant.
//! - [`safety`]: stopping paths, stopping regions, disjointness.
//! - [`control`]: bounds, contingency override, dance detection.
//! - [`sim`]: scenarios and the tick loop.
//! - [`report`]: speed profiles, summaries, comparisons.

pub mod control;
pub mod dynamics;
pub mod error;
pub mod geom;
pub mod report;
pub mod safety;
pub mod sim;

pub use control::{Command, ConstraintSet, DanceReport, Strategy, StrategyKind};
pub use dynamics::{AgentState, ModelParams, PlantParams};
pub use error::{ConfigError, DomainError, Error, GeomError, Result};
pub use geom::{Capsule, CapsuleChain, PolylinePath, Vec2};
pub use safety::{DisjointnessReport, SafetyParams, StoppingPath, StoppingRegion};
pub use sim::{run_trial, ScenarioConfig, TrialLog};

//! Event-driven simulation of asynchronous device rounds in a mobile corridor.

mod config;
mod event;
mod world;

pub use config::{Dynamics, ScenarioConfig, ScenarioError, SourceEntry, SourceSelector};
pub use event::{EventQueue, RoundEvent};
pub use world::{current_source, DeviceState, FlowEdge, RoundReport, World};

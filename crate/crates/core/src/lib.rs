//! Potential-field data collection on mobile device networks.
//!
//! Devices summarize their values into a source device by pushing partial
//! aggregates down a potential field (distance to the source). Three routing
//! strategies are provided and compared under increasing mobility and timing
//! noise:
//!
//! - [`collection::step_single_path`]: whole aggregate to one parent;
//! - [`collection::step_multi_path`]: even split over all lower neighbors;
//! - [`collection::step_weighted`]: split weighted by link stability.
//!
//! [`sim::World`] runs asynchronous device rounds in a corridor deployment and
//! [`harness`] sweeps it over variability and seeds, writing CSV.

pub mod algebra;
pub mod collection;
pub mod geometry;
pub mod harness;
pub mod potential;
pub mod sim;

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DeviceId(pub u32);

impl DeviceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

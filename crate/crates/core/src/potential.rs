//! Potential fields: approximate distance to the current source.
//!
//! The oracle is exact single-source shortest paths over the disk graph. The
//! Bellman-Ford rule is the classic adaptive gradient each device runs locally
//! from its neighbors' last known potentials.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::geometry::{Point, SpatialGrid};
use crate::DeviceId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PotentialMode {
    #[default]
    Oracle,
    BellmanFord,
}

impl fmt::Display for PotentialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialMode::Oracle => "oracle",
            PotentialMode::BellmanFord => "bellman-ford",
        })
    }
}

impl FromStr for PotentialMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(PotentialMode::Oracle),
            "bellman-ford" | "bf" => Ok(PotentialMode::BellmanFord),
            other => Err(format!("unknown potential mode `{other}` (oracle | bellman-ford)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialAssignment {
    pub source: DeviceId,
    /// Meters; `f64::INFINITY` for devices disconnected from the source.
    pub potentials: Vec<f64>,
}

impl PotentialAssignment {
    pub fn get(&self, id: DeviceId) -> f64 {
        self.potentials[id.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    /// Path length so far plus the remaining straight-line lower bound.
    key: f64,
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest paths over the disk graph indexed by `grid`, writing into `out`.
///
/// With a `target` this is A* towards it (straight-line distance never
/// overestimates a path length) and stops once the target is settled; other
/// entries may then be upper bounds.
pub(crate) fn shortest_paths_into(
    positions: &[Point],
    grid: &SpatialGrid,
    source: usize,
    target: Option<usize>,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.resize(positions.len(), f64::INFINITY);
    let goal = target.map(|t| positions[t]);
    let bound = |node: usize| goal.map_or(0.0, |g| positions[node].distance(g));
    let mut heap = BinaryHeap::with_capacity(positions.len());
    out[source] = 0.0;
    heap.push(Frontier {
        key: bound(source),
        dist: 0.0,
        node: source,
    });
    while let Some(Frontier { dist, node, .. }) = heap.pop() {
        if dist > out[node] {
            continue;
        }
        if Some(node) == target {
            return;
        }
        grid.for_each_within(positions, positions[node], node, |next, len| {
            let candidate = dist + len;
            if candidate < out[next] {
                out[next] = candidate;
                heap.push(Frontier {
                    key: candidate + bound(next),
                    dist: candidate,
                    node: next,
                });
            }
        });
    }
}

/// Exact graph distance from `source` over links no longer than `radius`.
pub fn oracle_potential(positions: &[Point], radius: f64, source: DeviceId) -> PotentialAssignment {
    assert!(radius > 0.0, "radius must be positive");
    assert!(source.index() < positions.len(), "source {source} out of range");
    let grid = SpatialGrid::new(positions, radius);
    let mut potentials = Vec::new();
    shortest_paths_into(positions, &grid, source.index(), None, &mut potentials);
    PotentialAssignment { source, potentials }
}

/// One adaptive Bellman-Ford round: `0` at the source, otherwise the best
/// neighbor potential plus link length.
pub fn bellman_ford_step<I>(is_source: bool, neighbors: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    if is_source {
        return 0.0;
    }
    neighbors
        .into_iter()
        .map(|(potential, link)| potential + link)
        .fold(f64::INFINITY, f64::min)
}

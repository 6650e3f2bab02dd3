//! Lock-step rounds on a static network: every device fires once per round,
//! reading only the previous round's exports.

use crate::algebra::{AggregationKind, AggregationValue};
use crate::geometry::{disk_graph, Point};
use crate::potential::oracle_potential;
use crate::DeviceId;

use super::{Algorithm, ExportPayload, NeighborView, RoundContext};

#[derive(Debug, Clone)]
pub struct SyncNetwork {
    pub radius: f64,
    pub source: DeviceId,
    pub potentials: Vec<f64>,
    pub values: Vec<AggregationValue>,
    pub kind: AggregationKind,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl SyncNetwork {
    /// Static disk-graph network with exact oracle potentials.
    pub fn new(
        positions: &[Point],
        radius: f64,
        source: DeviceId,
        values: Vec<AggregationValue>,
        kind: AggregationKind,
    ) -> Self {
        assert_eq!(positions.len(), values.len());
        let potentials = oracle_potential(positions, radius, source).potentials;
        Self::with_potentials(positions, radius, source, potentials, values, kind)
    }

    pub fn with_potentials(
        positions: &[Point],
        radius: f64,
        source: DeviceId,
        potentials: Vec<f64>,
        values: Vec<AggregationValue>,
        kind: AggregationKind,
    ) -> Self {
        SyncNetwork {
            radius,
            source,
            potentials,
            values,
            kind,
            adjacency: disk_graph(positions, radius),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn adjacency(&self) -> &[Vec<(usize, f64)>] {
        &self.adjacency
    }

    pub fn initial_exports(&self) -> Vec<ExportPayload> {
        vec![ExportPayload::initial(self.kind); self.len()]
    }

    /// One synchronous round of `algorithm`.
    pub fn round(&self, algorithm: Algorithm, prev: &[ExportPayload]) -> Vec<ExportPayload> {
        (0..self.len())
            .map(|i| {
                let views: Vec<NeighborView<'_>> = self.adjacency[i]
                    .iter()
                    .map(|&(j, d)| NeighborView {
                        id: DeviceId(j as u32),
                        potential: self.potentials[j],
                        link_distance: d,
                        payload: &prev[j],
                        age: 0.0,
                    })
                    .collect();
                let ctx = RoundContext {
                    own_id: DeviceId(i as u32),
                    own_value: self.values[i],
                    own_potential: self.potentials[i],
                    is_source: i == self.source.index(),
                    radius: self.radius,
                    neighbors: &views,
                    kind: self.kind,
                };
                algorithm.step(&ctx)
            })
            .collect()
    }

    /// Iterates until exports stop changing, up to `max_rounds`. Returns the
    /// final exports and the number of rounds after which they first equalled
    /// the fixed point, or `None` if no fixed point was reached.
    pub fn fixed_point(
        &self,
        algorithm: Algorithm,
        max_rounds: usize,
    ) -> (Vec<ExportPayload>, Option<usize>) {
        let mut exports = self.initial_exports();
        for r in 0..=max_rounds {
            let next = self.round(algorithm, &exports);
            if next == exports {
                return (exports, Some(r));
            }
            exports = next;
        }
        (exports, None)
    }
}

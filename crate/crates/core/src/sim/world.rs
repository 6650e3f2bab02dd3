//! The simulated deployment and its round-by-round evolution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AggregationKind, AggregationValue};
use crate::collection::{inflows, Algorithm, ExportPayload, Inflow, NeighborView, RoundContext};
use crate::geometry::{Point, SpatialGrid};
use crate::potential::{bellman_ford_step, shortest_paths_into, PotentialMode};
use crate::DeviceId;

use super::config::{ScenarioConfig, ScenarioError, SourceEntry, SourceSelector};
use super::event::EventQueue;

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceState {
    pub id: DeviceId,
    pub position: Point,
    pub waypoint: Point,
    /// m/s
    pub speed: f64,
    pub rate_multiplier: f64,
    pub next_fire: f64,
    /// Time the position was last advanced.
    pub last_moved: f64,
    pub potential: f64,
    pub local_value: AggregationValue,
    /// One payload per enabled algorithm, in `World::algorithms` order.
    pub exports: Vec<ExportPayload>,
    /// `None` until the device's first round.
    pub exported_at: Option<f64>,
}

/// One inflow edge taken during a round, with both endpoint potentials as the
/// receiver saw them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowEdge {
    pub algorithm: Algorithm,
    pub from: DeviceId,
    pub to: DeviceId,
    pub from_potential: f64,
    pub to_potential: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub time: f64,
    pub device: DeviceId,
    pub potential: f64,
    /// Filled only when tracing is enabled.
    pub flows: Vec<FlowEdge>,
    /// Exports produced this round, with non-empty shares totals per algorithm.
    pub share_totals: Vec<(Algorithm, f64)>,
}

#[derive(Debug, Clone)]
pub struct World {
    config: ScenarioConfig,
    kind: AggregationKind,
    rng: ChaCha8Rng,
    devices: Vec<DeviceState>,
    queue: EventQueue,
    now: f64,
    leftmost: DeviceId,
    rightmost: DeviceId,
    /// Full oracle field, valid for `field_source` while nothing has moved.
    field: Vec<f64>,
    field_source: Option<DeviceId>,
    grid: Option<SpatialGrid>,
    positions: Vec<Point>,
    scratch: Vec<f64>,
    tracing: bool,
}

fn uniform_around_one(rng: &mut ChaCha8Rng, half_width: f64) -> f64 {
    if half_width == 0.0 {
        1.0
    } else {
        rng.gen_range(1.0 - half_width..=1.0 + half_width)
    }
}

fn extremal(positions: &[Point], rightmost: bool) -> DeviceId {
    let mut best = 0;
    for (i, p) in positions.iter().enumerate() {
        let better = if rightmost {
            p.x > positions[best].x
        } else {
            p.x < positions[best].x
        };
        if better {
            best = i;
        }
    }
    DeviceId(best as u32)
}

/// Device selected by the latest schedule entry at or before `time`.
pub fn current_source(
    schedule: &[SourceEntry],
    time: f64,
    leftmost: DeviceId,
    rightmost: DeviceId,
) -> DeviceId {
    let entry = schedule
        .iter()
        .take_while(|e| e.time <= time)
        .last()
        .or_else(|| schedule.first())
        .expect("source schedule is non-empty");
    match entry.selector {
        SourceSelector::Rightmost => rightmost,
        SourceSelector::Leftmost => leftmost,
        SourceSelector::Device(id) => id,
    }
}

impl World {
    /// Seeds a new deployment: uniform positions in the corridor, per-device
    /// rate multipliers, random initial phases and identity exports.
    pub fn build(config: &ScenarioConfig) -> Result<World, ScenarioError> {
        config.validate()?;
        let kind = AggregationKind::Sum;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let v = config.variability;
        let half_width = config.dynamics.jitter * v;
        let speed = config.dynamics.max_speed * v;
        let (len, wid) = (config.corridor_length, config.corridor_width);
        let random_point = |rng: &mut ChaCha8Rng| {
            Point::new(rng.gen_range(0.0..=len), rng.gen_range(0.0..=wid))
        };

        let mut devices = Vec::with_capacity(config.device_count);
        let mut queue = EventQueue::new();
        for i in 0..config.device_count {
            let id = DeviceId(i as u32);
            let position = random_point(&mut rng);
            let waypoint = random_point(&mut rng);
            let rate_multiplier = uniform_around_one(&mut rng, half_width);
            let phase = rng.gen_range(0.0..config.mean_period);
            queue.schedule(phase, id);
            devices.push(DeviceState {
                id,
                position,
                waypoint,
                speed,
                rate_multiplier,
                next_fire: phase,
                last_moved: 0.0,
                potential: f64::INFINITY,
                local_value: 1.0,
                exports: vec![ExportPayload::initial(kind); config.algorithms.len()],
                exported_at: None,
            });
        }
        let positions: Vec<Point> = devices.iter().map(|d| d.position).collect();
        Ok(World {
            leftmost: extremal(&positions, false),
            rightmost: extremal(&positions, true),
            config: config.clone(),
            kind,
            rng,
            devices,
            queue,
            now: 0.0,
            field: Vec::new(),
            field_source: None,
            grid: None,
            positions,
            scratch: Vec::new(),
            tracing: false,
        })
    }

    pub fn set_tracing(&mut self, on: bool) {
        self.tracing = on;
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn devices(&self) -> &[DeviceState] {
        &self.devices
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn algorithms(&self) -> &[Algorithm] {
        &self.config.algorithms
    }

    pub fn source_at(&self, time: f64) -> DeviceId {
        current_source(&self.config.source_schedule, time, self.leftmost, self.rightmost)
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// Time of the next pending round.
    pub fn next_event_time(&self) -> Option<f64> {
        self.queue.peek().map(|e| e.time)
    }

    /// Runs every round due at or before `until`, then sets the clock to it.
    pub fn advance_to(&mut self, until: f64) {
        while let Some(e) = self.queue.pop_due(until) {
            self.fire_round(e.device, e.time);
        }
        self.now = self.now.max(until);
    }

    /// Like [`advance_to`](Self::advance_to) but hands each round report to `sink`.
    pub fn advance_to_with<F: FnMut(&World, RoundReport)>(&mut self, until: f64, mut sink: F) {
        while let Some(e) = self.queue.pop_due(until) {
            let report = self.fire_round(e.device, e.time);
            sink(self, report);
        }
        self.now = self.now.max(until);
    }

    /// Latest aggregate exported by the current source for `algorithm`;
    /// identity before the source's first round.
    pub fn sample_at_source(&self, algorithm: Algorithm) -> AggregationValue {
        let source = self.source_at(self.now);
        match self.algorithm_slot(algorithm) {
            Some(slot) => self.devices[source.index()].exports[slot].aggregate,
            None => self.kind_identity(),
        }
    }

    fn kind_identity(&self) -> AggregationValue {
        ExportPayload::initial(self.kind).aggregate
    }

    fn algorithm_slot(&self, algorithm: Algorithm) -> Option<usize> {
        self.config.algorithms.iter().position(|&a| a == algorithm)
    }

    fn move_device(&mut self, idx: usize, time: f64) {
        let v = self.config.variability;
        let (len, wid) = (self.config.corridor_length, self.config.corridor_width);
        let teleport_p = self.config.dynamics.teleport_rate * v;
        let dev = &mut self.devices[idx];
        let elapsed = time - dev.last_moved;
        dev.last_moved = time;
        if teleport_p > 0.0 && self.rng.gen_bool(teleport_p) {
            dev.position = Point::new(self.rng.gen_range(0.0..=len), self.rng.gen_range(0.0..=wid));
        } else if dev.speed > 0.0 && elapsed > 0.0 {
            let step = dev.speed * elapsed;
            let to_go = dev.position.distance(dev.waypoint);
            if step >= to_go {
                dev.position = dev.waypoint;
                dev.waypoint =
                    Point::new(self.rng.gen_range(0.0..=len), self.rng.gen_range(0.0..=wid));
            } else {
                let f = step / to_go;
                dev.position = Point::new(
                    dev.position.x + (dev.waypoint.x - dev.position.x) * f,
                    dev.position.y + (dev.waypoint.y - dev.position.y) * f,
                );
            }
        } else {
            return;
        }
        self.positions[idx] = self.devices[idx].position;
        self.grid = None;
        self.field_source = None;
    }

    /// Exact distance from `source` to device `idx` over current positions.
    fn oracle_potential_of(&mut self, idx: usize, source: DeviceId) -> f64 {
        let grid = self.grid.as_ref().expect("grid built before potentials");
        if self.field_source == Some(source) {
            return self.field[idx];
        }
        if self.config.variability == 0.0 {
            // static deployment: one full field serves every later round
            shortest_paths_into(&self.positions, grid, source.index(), None, &mut self.field);
            self.field_source = Some(source);
            return self.field[idx];
        }
        shortest_paths_into(&self.positions, grid, source.index(), Some(idx), &mut self.scratch);
        self.scratch[idx]
    }

    /// Fresh neighbors of `idx`: within radius and exported recently enough.
    fn neighbor_links(&self, idx: usize, time: f64) -> Vec<(usize, f64)> {
        let grid = self.grid.as_ref().expect("grid built before neighbor lookup");
        let bound = self.config.staleness_bound;
        let mut links = Vec::new();
        grid.for_each_within(&self.positions, self.positions[idx], idx, |j, d| {
            if let Some(at) = self.devices[j].exported_at {
                if time - at < bound {
                    links.push((j, d));
                }
            }
        });
        links.sort_unstable_by_key(|&(j, _)| j);
        links
    }

    /// Executes one round of `device` at `time`: move, look around, update the
    /// potential, run every enabled algorithm and schedule the next round.
    pub fn fire_round(&mut self, device: DeviceId, time: f64) -> RoundReport {
        let idx = device.index();
        self.move_device(idx, time);
        if self.grid.is_none() {
            self.grid = Some(SpatialGrid::new(&self.positions, self.config.radius));
        }
        let source = self.source_at(time);
        let is_source = device == source;
        let links = self.neighbor_links(idx, time);
        self.devices[idx].potential = match self.config.potential_mode {
            PotentialMode::Oracle => self.oracle_potential_of(idx, source),
            PotentialMode::BellmanFord => bellman_ford_step(
                is_source,
                links.iter().map(|&(j, d)| (self.devices[j].potential, d)),
            ),
        };

        let own = &self.devices[idx];
        let own_potential = own.potential;
        let mut new_exports = Vec::with_capacity(self.config.algorithms.len());
        let mut flows = Vec::new();
        let mut share_totals = Vec::new();
        for (slot, &algorithm) in self.config.algorithms.iter().enumerate() {
            let views: Vec<NeighborView<'_>> = links
                .iter()
                .map(|&(j, d)| {
                    let n = &self.devices[j];
                    NeighborView {
                        id: n.id,
                        potential: n.potential,
                        link_distance: d,
                        payload: &n.exports[slot],
                        age: time - n.exported_at.unwrap_or(time),
                    }
                })
                .collect();
            let ctx = RoundContext {
                own_id: device,
                own_value: own.local_value,
                own_potential,
                is_source,
                radius: self.config.radius,
                neighbors: &views,
                kind: self.kind,
            };
            let export = algorithm.step(&ctx);
            if self.tracing {
                flows.extend(inflows(algorithm, &ctx).into_iter().map(|Inflow { from, from_potential, .. }| {
                    FlowEdge {
                        algorithm,
                        from,
                        to: device,
                        from_potential,
                        to_potential: own_potential,
                    }
                }));
                if !export.shares.is_empty() {
                    share_totals.push((algorithm, export.shares.total()));
                }
            }
            new_exports.push(export);
        }

        let half_width = self.config.dynamics.jitter * self.config.variability;
        let jitter = uniform_around_one(&mut self.rng, half_width);
        let dev = &mut self.devices[idx];
        dev.exports = new_exports;
        dev.exported_at = Some(time);
        let next = time + self.config.mean_period * dev.rate_multiplier * jitter;
        dev.next_fire = next;
        self.queue.schedule(next, device);
        self.now = self.now.max(time);

        RoundReport {
            time,
            device,
            potential: own_potential,
            flows,
            share_totals,
        }
    }
}

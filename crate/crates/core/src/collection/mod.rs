//! The three collection strategies as pure per-round device functions.
//!
//! A round reads the device's own state plus a view of every linked neighbor
//! and returns a fresh [`ExportPayload`]. Partial aggregates are rebuilt from
//! scratch each round: own value combined with whatever higher-potential
//! neighbors currently route towards this device.
//!
//! - single-path forwards everything to one parent, the lowest-potential
//!   neighbor;
//! - multi-path splits evenly across all lower-potential neighbors;
//! - weighted multi-path splits proportionally to `(R - D) * |ΔP|`, so links
//!   near the range edge or with a small potential gap get less.

pub mod sync;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AggregationKind, AggregationValue, Divisible};
use crate::DeviceId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "sp")]
    SinglePath,
    #[serde(rename = "mp")]
    MultiPath,
    #[serde(rename = "wmp")]
    Weighted,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::SinglePath,
        Algorithm::MultiPath,
        Algorithm::Weighted,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Algorithm::SinglePath => "sp",
            Algorithm::MultiPath => "mp",
            Algorithm::Weighted => "wmp",
        }
    }

    pub fn step(self, ctx: &RoundContext<'_>) -> ExportPayload {
        match self {
            Algorithm::SinglePath => step_single_path(ctx),
            Algorithm::MultiPath => step_multi_path(ctx),
            Algorithm::Weighted => step_weighted(ctx),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sp" => Ok(Algorithm::SinglePath),
            "mp" => Ok(Algorithm::MultiPath),
            "wmp" => Ok(Algorithm::Weighted),
            other => Err(format!("unknown algorithm `{other}` (sp | mp | wmp)")),
        }
    }
}

/// Normalized outgoing weights, sorted by receiver id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Shares(Vec<(DeviceId, f64)>);

impl Shares {
    pub fn get(&self, id: DeviceId) -> Option<f64> {
        self.0
            .binary_search_by_key(&id, |&(k, _)| k)
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().map(|&(_, s)| s).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (DeviceId, f64)> + '_ {
        self.0.iter().copied()
    }
}

/// What a device publishes at the end of a round.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportPayload {
    pub aggregate: AggregationValue,
    /// Single-path parent.
    pub parent: Option<DeviceId>,
    /// Weighted multi-path shares.
    pub shares: Shares,
    /// Multi-path divisor: size of the lower-potential neighbor set.
    pub lower_count: u32,
}

impl ExportPayload {
    /// The payload every device starts from.
    pub fn initial(kind: AggregationKind) -> Self {
        ExportPayload {
            aggregate: kind.identity(),
            parent: None,
            shares: Shares::default(),
            lower_count: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NeighborView<'a> {
    pub id: DeviceId,
    pub potential: f64,
    pub link_distance: f64,
    pub payload: &'a ExportPayload,
    pub age: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RoundContext<'a> {
    pub own_id: DeviceId,
    pub own_value: AggregationValue,
    pub own_potential: f64,
    pub is_source: bool,
    pub radius: f64,
    pub neighbors: &'a [NeighborView<'a>],
    pub kind: AggregationKind,
}

/// A contribution taken from a higher-potential neighbor during a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inflow {
    pub from: DeviceId,
    pub from_potential: f64,
    pub amount: AggregationValue,
}

/// Splits neighbors into strictly lower and strictly higher potential.
///
/// Equal potentials land in neither set. A device with infinite potential is
/// unreachable and has no lower set; infinite neighbors always count as higher.
pub fn partition_neighbors<'n, 'a>(
    own_potential: f64,
    neighbors: &'n [NeighborView<'a>],
) -> (Vec<&'n NeighborView<'a>>, Vec<&'n NeighborView<'a>>) {
    let mut lower = Vec::new();
    let mut higher = Vec::new();
    for n in neighbors {
        if n.potential < own_potential && own_potential.is_finite() {
            lower.push(n);
        } else if n.potential > own_potential {
            higher.push(n);
        }
    }
    (lower, higher)
}

/// Lowest-potential member of `d_minus`, ties to the smaller id.
pub fn select_parent(d_minus: &[&NeighborView<'_>]) -> Option<DeviceId> {
    d_minus
        .iter()
        .min_by(|a, b| a.potential.total_cmp(&b.potential).then(a.id.cmp(&b.id)))
        .map(|n| n.id)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("link distance {distance} exceeds radius {radius}")]
    OutOfRange { distance: f64, radius: f64 },
    #[error("link distance must be non-negative, got {0}")]
    NegativeDistance(f64),
}

/// `(R - D) * |P - P'|`: small near the range edge and for shallow potential gaps.
pub fn link_weight(
    radius: f64,
    link_distance: f64,
    p_self: f64,
    p_other: f64,
) -> Result<f64, WeightError> {
    if link_distance < 0.0 {
        return Err(WeightError::NegativeDistance(link_distance));
    }
    if link_distance > radius {
        return Err(WeightError::OutOfRange {
            distance: link_distance,
            radius,
        });
    }
    Ok((radius - link_distance) * (p_self - p_other).abs())
}

/// Sender-side normalized weights over `d_minus`. Empty when there is nowhere
/// to send or every weight is zero.
pub fn normalized_shares(radius: f64, d_minus: &[&NeighborView<'_>], own_potential: f64) -> Shares {
    let weights: Vec<(DeviceId, f64)> = d_minus
        .iter()
        .map(|n| {
            // views are built within range; clamp guards rounding at the edge
            let w = link_weight(radius, n.link_distance.min(radius), own_potential, n.potential)
                .unwrap_or(0.0);
            (n.id, w)
        })
        .collect();
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    if total <= 0.0 || !total.is_finite() {
        return Shares::default();
    }
    let mut shares: Vec<(DeviceId, f64)> = weights
        .into_iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|(id, w)| (id, w / total))
        .collect();
    shares.sort_unstable_by_key(|&(id, _)| id);
    Shares(shares)
}

fn lower_set<'n, 'a>(ctx: &'n RoundContext<'a>) -> Vec<&'n NeighborView<'a>> {
    if ctx.is_source {
        return Vec::new();
    }
    partition_neighbors(ctx.own_potential, ctx.neighbors).0
}

/// Contributions this device takes from its higher-potential neighbors under
/// `algorithm`. Only neighbors strictly above the device are ever considered.
pub fn inflows(algorithm: Algorithm, ctx: &RoundContext<'_>) -> Vec<Inflow> {
    let (_, d_plus) = partition_neighbors(ctx.own_potential, ctx.neighbors);
    let kind = ctx.kind;
    d_plus
        .into_iter()
        .filter_map(|n| {
            let p = n.payload;
            let amount = match algorithm {
                Algorithm::SinglePath => (p.parent == Some(ctx.own_id)).then_some(p.aggregate),
                Algorithm::MultiPath => (p.lower_count >= 1)
                    .then(|| kind.split_even_unchecked(p.aggregate, p.lower_count)),
                Algorithm::Weighted => p
                    .shares
                    .get(ctx.own_id)
                    .map(|share| kind.scale_unchecked(p.aggregate, share)),
            }?;
            Some(Inflow {
                from: n.id,
                from_potential: n.potential,
                amount,
            })
        })
        .collect()
}

fn gather(algorithm: Algorithm, ctx: &RoundContext<'_>) -> AggregationValue {
    let inflow = ctx.kind.fold(inflows(algorithm, ctx).into_iter().map(|i| i.amount));
    ctx.kind.combine_unchecked(ctx.own_value, inflow)
}

pub fn step_single_path(ctx: &RoundContext<'_>) -> ExportPayload {
    let d_minus = lower_set(ctx);
    ExportPayload {
        aggregate: gather(Algorithm::SinglePath, ctx),
        parent: select_parent(&d_minus),
        shares: Shares::default(),
        lower_count: d_minus.len() as u32,
    }
}

pub fn step_multi_path(ctx: &RoundContext<'_>) -> ExportPayload {
    let d_minus = lower_set(ctx);
    ExportPayload {
        aggregate: gather(Algorithm::MultiPath, ctx),
        parent: None,
        shares: Shares::default(),
        lower_count: d_minus.len() as u32,
    }
}

pub fn step_weighted(ctx: &RoundContext<'_>) -> ExportPayload {
    let d_minus = lower_set(ctx);
    ExportPayload {
        aggregate: gather(Algorithm::Weighted, ctx),
        parent: None,
        shares: normalized_shares(ctx.radius, &d_minus, ctx.own_potential),
        lower_count: d_minus.len() as u32,
    }
}

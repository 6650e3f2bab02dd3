//! Pending device rounds, ordered by time then device id.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::DeviceId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundEvent {
    pub time: f64,
    pub device: DeviceId,
}

impl Eq for RoundEvent {}

impl Ord for RoundEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (time, device)
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.device.cmp(&self.device))
    }
}

impl PartialOrd for RoundEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Default)]
pub struct EventQueue {
    heap: BinaryHeap<RoundEvent>,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: f64, device: DeviceId) {
        debug_assert!(time.is_finite());
        self.heap.push(RoundEvent { time, device });
    }

    pub fn peek(&self) -> Option<&RoundEvent> {
        self.heap.peek()
    }

    pub fn pop(&mut self) -> Option<RoundEvent> {
        self.heap.pop()
    }

    /// Pops the head if it is due at or before `until`.
    pub fn pop_due(&mut self, until: f64) -> Option<RoundEvent> {
        match self.heap.peek() {
            Some(e) if e.time <= until => self.heap.pop(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

//! Per-vertex state machine of the distributed decomposition.
//!
//! A vertex starts with its degree as estimate, broadcasts it, and records the
//! estimates its neighbours report. Once every neighbour has reported, each
//! further report triggers a recomputation with [`update_core`]; whenever the
//! estimate drops, the new value is broadcast. Estimates never increase.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::graph::VertexId;

/// The only unit exchanged between vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub sender: VertexId,
    pub core_number: u32,
}

/// Largest `k <= current` such that at least `k` of `stored` are `>= k`.
///
/// Same result as decrementing `current` while fewer than `current` stored
/// values reach it.
pub fn update_core<I>(stored: I, current: u32) -> u32
where
    I: IntoIterator<Item = u32>,
{
    let cap = current as usize;
    let mut counts = vec![0usize; cap + 1];
    for v in stored {
        counts[(v as usize).min(cap)] += 1;
    }
    let mut at_least = 0usize;
    for k in (1..=cap).rev() {
        at_least += counts[k];
        if at_least >= k {
            return k as u32;
        }
    }
    0
}

/// What a worker must do after handling a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    None,
    /// Send the new estimate to every neighbour.
    Broadcast(u32),
}

/// Outcome of one [`VertexState::handle`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub action: Action,
    /// The estimate was recomputed (all neighbours had reported and the
    /// message carried new information).
    pub recomputed: bool,
}

impl Transition {
    const IDLE: Transition = Transition { action: Action::None, recomputed: false };
}

/// One worker's local view.
///
/// Stored neighbour estimates are kept in a slot per neighbour, aligned with
/// the sorted neighbour list that is passed to [`VertexState::handle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexState {
    pub id: VertexId,
    pub degree: usize,
    pub estimate: u32,
    stored: Vec<Option<u32>>,
    reported: usize,
    /// Stored values `>= estimate`.
    support: usize,
    pub active: bool,
    /// Number of times the estimate dropped.
    pub decreases: u32,
}

impl VertexState {
    pub fn new(id: VertexId, degree: usize) -> Self {
        VertexState {
            id,
            degree,
            estimate: degree as u32,
            stored: vec![None; degree],
            reported: 0,
            support: 0,
            active: true,
            decreases: 0,
        }
    }

    /// Every neighbour has reported at least once.
    pub fn seen_all(&self) -> bool {
        self.reported >= self.degree
    }

    /// Last estimate received from each neighbour, in neighbour order.
    pub fn stored(&self) -> &[Option<u32>] {
        &self.stored
    }

    pub fn stored_values(&self) -> impl Iterator<Item = u32> + '_ {
        self.stored.iter().flatten().copied()
    }

    pub fn stored_from(&self, neighbours: &[VertexId], v: VertexId) -> Option<u32> {
        neighbours.binary_search(&v).ok().and_then(|i| self.stored[i])
    }

    /// Marks the end of a work burst. Vertices still waiting for their first
    /// full set of reports stay active.
    pub fn settle(&mut self) {
        self.active = !self.seen_all();
    }

    /// Applies one incoming message in place.
    ///
    /// `neighbours` must be this vertex's sorted adjacency. Reports that do
    /// not lower the stored value for the sender carry no information (peer
    /// estimates only decrease) and are ignored, which also makes reordered
    /// deliveries harmless.
    pub fn handle(&mut self, neighbours: &[VertexId], msg: Message) -> Result<Transition> {
        let slot = neighbours.binary_search(&msg.sender).map_err(|_| {
            CoreError::contract(format!("vertex {} got a message from non-neighbour {}", self.id, msg.sender))
        })?;
        let value = msg.core_number;
        match self.stored[slot] {
            None => {
                self.stored[slot] = Some(value);
                self.reported += 1;
                if value >= self.estimate {
                    self.support += 1;
                }
            }
            Some(old) if value < old => {
                self.stored[slot] = Some(value);
                if old >= self.estimate && value < self.estimate {
                    self.support -= 1;
                }
            }
            Some(_) => return Ok(Transition::IDLE),
        }

        self.active = true;
        if !self.seen_all() {
            return Ok(Transition::IDLE);
        }

        let new_core = if self.support >= self.estimate as usize {
            self.estimate
        } else {
            update_core(self.stored_values(), self.estimate)
        };
        let action = if new_core < self.estimate {
            self.estimate = new_core;
            self.decreases += 1;
            self.support = self.stored_values().filter(|&v| v >= new_core).count();
            Action::Broadcast(new_core)
        } else {
            Action::None
        };
        self.active = false;
        Ok(Transition { action, recomputed: true })
    }
}

/// Initial state: estimate equals degree, nothing stored, active.
pub fn init_state(id: VertexId, degree: usize) -> VertexState {
    VertexState::new(id, degree)
}

/// Pure form of [`VertexState::handle`].
pub fn handle_message(state: &VertexState, neighbours: &[VertexId], msg: Message) -> Result<(VertexState, Transition)> {
    let mut next = state.clone();
    let t = next.handle(neighbours, msg)?;
    Ok((next, t))
}

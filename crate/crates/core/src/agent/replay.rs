//! Experience replay over successor-feature transitions.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::mlp::Candidate;

/// One step of experience. `candidates` are the featurized successors of
/// every valid action in the source state, `chosen` indexes the one taken,
/// and `next_candidates` are the successors available from the state it
/// led to. Consecutive transitions share the same `Arc`.
#[derive(Debug, Clone)]
pub struct Transition {
    pub candidates: Arc<Vec<Candidate>>,
    pub chosen: usize,
    pub reward: f64,
    pub terminal: bool,
    pub next_candidates: Option<Arc<Vec<Candidate>>>,
}

impl Transition {
    pub fn chosen_features(&self) -> &Candidate {
        &self.candidates[self.chosen]
    }
}

pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            capacity,
            items: Vec::with_capacity(capacity.min(4096)),
            next: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: Transition) {
        debug_assert!(t.terminal || t.next_candidates.as_ref().is_some_and(|c| !c.is_empty()));
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    /// Uniform sample with replacement; `None` until `batch` items exist.
    pub fn sample(&self, batch: usize, rng: &mut ChaCha8Rng) -> Option<Vec<&Transition>> {
        if self.items.len() < batch || batch == 0 {
            return None;
        }
        Some(
            (0..batch)
                .map(|_| &self.items[rng.gen_range(0..self.items.len())])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::SparseVector;
    use rand::SeedableRng;

    fn transition(reward: f64) -> Transition {
        let c = Candidate {
            body: Arc::new(SparseVector::from_dense(&[1.0])),
            steps_fraction: 0.0,
        };
        Transition {
            candidates: Arc::new(vec![c]),
            chosen: 0,
            reward,
            terminal: true,
            next_candidates: None,
        }
    }

    #[test]
    fn ring_overwrites_oldest() {
        let mut buf = ReplayBuffer::new(3);
        for r in 0..5 {
            buf.push(transition(r as f64));
        }
        assert_eq!(buf.len(), 3);
        let mut rewards: Vec<f64> = buf.items.iter().map(|t| t.reward).collect();
        rewards.sort_by(f64::total_cmp);
        assert_eq!(rewards, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn sampling_needs_a_full_batch() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut buf = ReplayBuffer::new(10);
        buf.push(transition(1.0));
        assert!(buf.sample(2, &mut rng).is_none());
        buf.push(transition(2.0));
        assert_eq!(buf.sample(2, &mut rng).unwrap().len(), 2);
    }
}

use super::queue::{Bitmask, SpikeQueue};

/// Delay line and spike history.
///
/// Spike queues are kept for the last `delay` steps: the queue written at
/// step `t` is delivered at step `t + delay - 1`, which produces state
/// `t + delay`. Bitmasks are kept for the last `history ≥ delay` steps and
/// answer "did neuron i fire at step u" for plasticity.
pub struct SpikeRing {
    queues: Vec<SpikeQueue>,
    masks: Vec<Bitmask>,
}

impl SpikeRing {
    pub fn new(neurons: usize, delay: usize, history: usize) -> Self {
        assert!(delay >= 1 && history >= delay);
        SpikeRing {
            queues: (0..delay).map(|_| SpikeQueue::new(neurons)).collect(),
            masks: (0..history).map(|_| Bitmask::new(neurons)).collect(),
        }
    }

    pub fn delay(&self) -> usize {
        self.queues.len()
    }

    pub fn history(&self) -> usize {
        self.masks.len()
    }

    pub fn clear(&self) {
        self.queues.iter().for_each(SpikeQueue::clear);
        self.masks.iter().for_each(Bitmask::clear);
    }

    /// Recycles the slots that step `t` writes. They held step
    /// `t - delay` (already delivered) and `t - history`.
    pub fn begin(&self, t: u64) {
        self.queue(t).clear();
        self.mask(t).clear();
    }

    #[inline]
    pub fn push(&self, t: u64, id: u32) {
        self.queue(t).push(id);
        self.mask(t).set(id);
    }

    #[inline]
    pub fn queue(&self, t: u64) -> &SpikeQueue {
        &self.queues[(t % self.queues.len() as u64) as usize]
    }

    pub fn queue_mut(&mut self, t: u64) -> &mut SpikeQueue {
        let n = self.queues.len() as u64;
        &mut self.queues[(t % n) as usize]
    }

    #[inline]
    pub fn mask(&self, t: u64) -> &Bitmask {
        &self.masks[(t % self.masks.len() as u64) as usize]
    }

    /// Spikes due for delivery at step `t`: those emitted at
    /// `t - delay + 1`.
    #[inline]
    pub fn due(&self, t: u64) -> &SpikeQueue {
        self.queue(t + 1)
    }

    /// Whether `id` fired at step `u`, queried during step `now`. Steps
    /// before the start of the simulation never fired.
    #[inline]
    pub fn fired(&self, id: u32, u: i64, now: u64) -> bool {
        if u < 0 {
            return false;
        }
        debug_assert!(
            u as u64 <= now && now - (u as u64) < self.masks.len() as u64,
            "spike history for step {u} already recycled at step {now}"
        );
        self.mask(u as u64).get(id)
    }

    pub fn queue_bytes(&self) -> usize {
        self.queues.iter().map(SpikeQueue::bytes).sum()
    }

    pub fn mask_bytes(&self) -> usize {
        self.masks.iter().map(Bitmask::bytes).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn due_frame_is_delay_minus_one_behind() {
        let ring = SpikeRing::new(8, 3, 5);
        for t in 0..10u64 {
            ring.begin(t);
            ring.push(t, (t % 8) as u32);
            let due: Vec<u32> = ring.due(t).iter().collect();
            if t >= 2 {
                assert_eq!(due, vec![((t - 2) % 8) as u32]);
            } else {
                assert!(due.is_empty());
            }
            for back in 0..5u64.min(t + 1) {
                let u = t - back;
                assert!(ring.fired((u % 8) as u32, u as i64, t));
            }
            assert!(!ring.fired(0, -1, t));
        }
    }

    #[test]
    fn unit_delay_delivers_same_step() {
        let ring = SpikeRing::new(4, 1, 1);
        ring.begin(0);
        ring.push(0, 3);
        assert_eq!(ring.due(0).iter().collect::<Vec<_>>(), vec![3]);
    }
}

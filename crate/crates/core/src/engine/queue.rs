use std::sync::atomic::{AtomicU32, AtomicU64, AtomicUsize, Ordering::Relaxed};

/// Fixed-capacity array of neuron ids with a shared insertion index.
///
/// Producers reserve a slot with a fetch-and-increment on the index and then
/// write their id into it. Capacity is |N|: a neuron appears at most once
/// per step, so a full queue cannot overflow.
pub struct SpikeQueue {
    ids: Vec<AtomicU32>,
    len: AtomicUsize,
}

impl SpikeQueue {
    pub fn new(capacity: usize) -> Self {
        SpikeQueue {
            ids: (0..capacity).map(|_| AtomicU32::new(0)).collect(),
            len: AtomicUsize::new(0),
        }
    }

    #[inline]
    pub fn push(&self, id: u32) {
        let slot = self.len.fetch_add(1, Relaxed);
        assert!(slot < self.ids.len(), "spike queue overflow");
        self.ids[slot].store(id, Relaxed);
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len.load(Relaxed)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn capacity(&self) -> usize {
        self.ids.len()
    }

    pub fn clear(&self) {
        self.len.store(0, Relaxed);
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.ids[i].load(Relaxed)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = u32> + '_ {
        self.ids[..self.len()].iter().map(|a| a.load(Relaxed))
    }

    pub fn copy_into(&self, out: &mut Vec<u32>) {
        out.clear();
        out.extend(self.iter());
    }

    /// Sorts the entries by id. Slot order after concurrent insertion is
    /// arbitrary; sorting makes the frame independent of scheduling.
    pub fn sort(&mut self) {
        let len = *self.len.get_mut();
        let mut ids: Vec<u32> = self.ids[..len].iter_mut().map(|a| *a.get_mut()).collect();
        ids.sort_unstable();
        for (slot, id) in self.ids[..len].iter_mut().zip(ids) {
            *slot.get_mut() = id;
        }
    }

    pub fn bytes(&self) -> usize {
        self.ids.len() * std::mem::size_of::<u32>()
    }
}

/// One bit per neuron.
pub struct Bitmask {
    words: Vec<AtomicU64>,
}

impl Bitmask {
    pub fn new(bits: usize) -> Self {
        Bitmask {
            words: (0..bits.div_ceil(64)).map(|_| AtomicU64::new(0)).collect(),
        }
    }

    #[inline]
    pub fn set(&self, bit: u32) {
        self.words[bit as usize / 64].fetch_or(1 << (bit % 64), Relaxed);
    }

    #[inline]
    pub fn get(&self, bit: u32) -> bool {
        self.words[bit as usize / 64].load(Relaxed) & (1 << (bit % 64)) != 0
    }

    pub fn clear(&self) {
        for w in &self.words {
            w.store(0, Relaxed);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.load(Relaxed).count_ones() as usize).sum()
    }

    pub fn bytes(&self) -> usize {
        self.words.len() * std::mem::size_of::<u64>()
    }
}

use std::collections::VecDeque;

use crate::types::LabeledInstance;

/// Most recent labeled instances, oldest first. Positions are 1-based: `w_1` is the
/// oldest retained instance and `w_ω` the newest.
#[derive(Debug, Clone)]
pub struct LabeledWindow {
    buffer: VecDeque<LabeledInstance>,
    capacity: usize,
}

impl LabeledWindow {
    pub fn new(capacity: usize) -> Self {
        Self {
            buffer: VecDeque::new(),
            capacity: capacity.max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Changes the cap, evicting the oldest instances if the window is now too large.
    pub fn set_capacity(&mut self, capacity: usize) {
        self.capacity = capacity.max(1);
        while self.buffer.len() > self.capacity {
            self.buffer.pop_front();
        }
    }

    pub fn push(&mut self, inst: LabeledInstance) {
        self.buffer.push_back(inst);
        while self.buffer.len() > self.capacity {
            self.buffer.pop_front();
        }
    }

    /// Instance at 1-based position `i`.
    pub fn get(&self, i: usize) -> Option<&LabeledInstance> {
        i.checked_sub(1).and_then(|k| self.buffer.get(k))
    }

    pub fn newest(&self) -> Option<&LabeledInstance> {
        self.buffer.back()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LabeledInstance> + '_ {
        self.buffer.iter()
    }
}

pub fn window_push(window: &mut LabeledWindow, inst: LabeledInstance) {
    window.push(inst);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(t: u64) -> LabeledInstance {
        LabeledInstance::new(vec![t as f64], t, 0)
    }

    fn ids(w: &LabeledWindow) -> Vec<u64> {
        w.iter().map(|i| i.instance.arrival_index).collect()
    }

    #[test]
    fn fifo_eviction() {
        let mut w = LabeledWindow::new(3);
        for t in 0..4 {
            window_push(&mut w, inst(t));
        }
        assert_eq!(ids(&w), vec![1, 2, 3]);
    }

    #[test]
    fn shrinking_cap_keeps_newest() {
        let mut w = LabeledWindow::new(5);
        for t in 0..5 {
            w.push(inst(t));
        }
        w.set_capacity(2);
        assert_eq!(ids(&w), vec![3, 4]);
    }

    #[test]
    fn first_push() {
        let mut w = LabeledWindow::new(10);
        w.push(inst(7));
        assert_eq!(w.len(), 1);
        assert_eq!(w.get(1), w.newest());
        assert_eq!(w.get(1).unwrap().instance.arrival_index, 7);
        assert!(w.get(0).is_none());
    }
}

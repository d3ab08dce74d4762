//! Live state of an online run: which servers remain available, the
//! imaginary server set and its implicit sorted-order matching, the current
//! estimate, and the requests and assignments seen so far.

use serde::{Deserialize, Serialize};

use crate::matching::sorted_pairing_cost;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub request: f64,
    pub server: usize,
}

/// State shared by the estimate-carrying algorithms. Servers are identified
/// by index into the sorted server array; `available` and `imaginary` are
/// kept sorted, and while both exist they have equal length with the k-th
/// imaginary server matched to the k-th available server.
#[derive(Debug, Clone)]
pub struct AlgoState {
    servers: Vec<f64>,
    available: Vec<usize>,
    imaginary: Option<Vec<usize>>,
    estimate: f64,
    estimate_set: bool,
    requests: Vec<f64>,
    assignments: Vec<Assignment>,
    opt_to_date: f64,
    phase: usize,
}

impl AlgoState {
    /// Fresh state over sorted server positions; every server available.
    pub fn new(servers: Vec<f64>) -> Self {
        debug_assert!(servers.windows(2).all(|w| w[0] <= w[1]));
        let available = (0..servers.len()).collect();
        AlgoState {
            servers,
            available,
            imaginary: None,
            estimate: 1.0,
            estimate_set: false,
            requests: Vec::new(),
            assignments: Vec::new(),
            opt_to_date: 0.0,
            phase: 0,
        }
    }

    pub fn servers(&self) -> &[f64] {
        &self.servers
    }

    pub fn n(&self) -> usize {
        self.servers.len()
    }

    pub fn position(&self, server: usize) -> f64 {
        self.servers[server]
    }

    pub fn available(&self) -> &[usize] {
        &self.available
    }

    pub fn imaginary(&self) -> Option<&[usize]> {
        self.imaginary.as_deref()
    }

    pub fn initialized(&self) -> bool {
        self.imaginary.is_some()
    }

    /// Current estimate. Holds the default value 1 until first set.
    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    pub fn estimate_set(&self) -> bool {
        self.estimate_set
    }

    pub fn opt_to_date(&self) -> f64 {
        self.opt_to_date
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn requests(&self) -> &[f64] {
        &self.requests
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn imaginary_positions(&self) -> Vec<f64> {
        self.imaginary
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .map(|&i| self.servers[i])
            .collect()
    }

    pub fn available_positions(&self) -> Vec<f64> {
        self.available.iter().map(|&i| self.servers[i]).collect()
    }

    /// Leftmost available server exactly at `x`.
    pub fn available_at(&self, x: f64) -> Option<usize> {
        let k = self.available.partition_point(|&i| self.servers[i] < x);
        self.available
            .get(k)
            .copied()
            .filter(|&i| self.servers[i] == x)
    }

    /// Rightmost available server strictly left of `x`.
    pub fn first_available_left(&self, x: f64) -> Option<usize> {
        let k = self.available.partition_point(|&i| self.servers[i] < x);
        k.checked_sub(1).map(|k| self.available[k])
    }

    /// Leftmost available server strictly right of `x`.
    pub fn first_available_right(&self, x: f64) -> Option<usize> {
        let k = self.available.partition_point(|&i| self.servers[i] <= x);
        self.available.get(k).copied()
    }

    /// Nearest available server, ties broken towards the left.
    pub fn nearest_available(&self, x: f64) -> Option<usize> {
        if let Some(i) = self.available_at(x) {
            return Some(i);
        }
        let left = self.first_available_left(x);
        let right = self.first_available_right(x);
        match (left, right) {
            (Some(l), Some(r)) => {
                if x - self.servers[l] <= self.servers[r] - x {
                    Some(l)
                } else {
                    Some(r)
                }
            }
            (l, r) => l.or(r),
        }
    }

    /// Slot in the imaginary vector of the leftmost imaginary server at `x`.
    pub fn imaginary_at(&self, x: f64) -> Option<(usize, usize)> {
        let im = self.imaginary.as_deref()?;
        let k = im.partition_point(|&i| self.servers[i] < x);
        im.get(k)
            .copied()
            .filter(|&i| self.servers[i] == x)
            .map(|i| (k, i))
    }

    /// `(slot, server)` of the rightmost imaginary server strictly left of `x`.
    pub fn first_imaginary_left(&self, x: f64) -> Option<(usize, usize)> {
        let im = self.imaginary.as_deref()?;
        let k = im.partition_point(|&i| self.servers[i] < x);
        k.checked_sub(1).map(|k| (k, im[k]))
    }

    /// `(slot, server)` of the leftmost imaginary server strictly right of `x`.
    pub fn first_imaginary_right(&self, x: f64) -> Option<(usize, usize)> {
        let im = self.imaginary.as_deref()?;
        let k = im.partition_point(|&i| self.servers[i] <= x);
        im.get(k).copied().map(|i| (k, i))
    }

    /// The available server matched to the imaginary server in `slot`.
    pub fn matching_partner(&self, slot: usize) -> usize {
        debug_assert_eq!(
            self.imaginary.as_ref().map(Vec::len),
            Some(self.available.len())
        );
        self.available[slot]
    }

    /// Optimal matching cost between the available and imaginary sets.
    pub fn matching_cost(&self) -> f64 {
        match &self.imaginary {
            Some(im) => {
                let a: Vec<f64> = self.available.iter().map(|&i| self.servers[i]).collect();
                let b: Vec<f64> = im.iter().map(|&i| self.servers[i]).collect();
                sorted_pairing_cost(&a, &b)
            }
            None => 0.0,
        }
    }

    pub fn push_request(&mut self, x: f64) {
        self.requests.push(x);
    }

    pub fn set_opt_to_date(&mut self, opt: f64) {
        self.opt_to_date = opt;
    }

    pub fn set_estimate(&mut self, z: f64) {
        self.estimate = z;
        self.estimate_set = true;
    }

    pub fn set_imaginary(&mut self, imaginary: Vec<usize>) {
        debug_assert!(imaginary.windows(2).all(|w| w[0] <= w[1]));
        self.imaginary = Some(imaginary);
    }

    pub fn bump_phase(&mut self) {
        self.phase += 1;
    }

    /// Removes the imaginary server in `slot` and returns its index.
    pub fn remove_imaginary_slot(&mut self, slot: usize) -> usize {
        self.imaginary
            .as_mut()
            .expect("imaginary set not initialized")
            .remove(slot)
    }

    /// Assigns `request` to `server`, removing it from the available set.
    /// Returns the movement cost.
    pub fn assign(&mut self, server: usize, request: f64) -> f64 {
        let k = self
            .available
            .iter()
            .position(|&i| i == server)
            .expect("assigning an unavailable server");
        self.available.remove(k);
        self.assignments.push(Assignment { request, server });
        (self.servers[server] - request).abs()
    }

    pub fn total_cost(&self) -> f64 {
        self.assignments
            .iter()
            .map(|a| (self.servers[a.server] - a.request).abs())
            .sum()
    }

    /// Smallest power of ten strictly above `v` (so `v` lands in `[z/10, z)`).
    pub fn next_estimate(v: f64) -> f64 {
        debug_assert!(v > 0.0 && v.is_finite());
        let mut z = 1.0;
        if v >= 1.0 {
            while z <= v {
                z *= 10.0;
            }
        } else {
            while z / 10.0 > v {
                z /= 10.0;
            }
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> AlgoState {
        AlgoState::new(vec![0.0, 4.0, 11.0, 31.0])
    }

    #[test]
    fn lookups() {
        let s = state();
        assert_eq!(s.available_at(4.0), Some(1));
        assert_eq!(s.available_at(5.0), None);
        assert_eq!(s.first_available_left(4.0), Some(0));
        assert_eq!(s.first_available_right(4.0), Some(2));
        assert_eq!(s.first_available_left(0.0), None);
        assert_eq!(s.first_available_right(31.0), None);
        assert_eq!(s.nearest_available(4.0), Some(1));
        assert_eq!(s.nearest_available(7.0), Some(1)); // 3 left vs 4 right
        assert_eq!(s.nearest_available(7.5), Some(1)); // tie goes left
        assert_eq!(s.nearest_available(8.0), Some(2));
    }

    #[test]
    fn assignment_removes_server() {
        let mut s = state();
        let cost = s.assign(1, 4.0);
        assert_eq!(cost, 0.0);
        assert_eq!(s.available(), &[0, 2, 3]);
        assert_eq!(s.available_at(4.0), None);
        assert_eq!(s.total_cost(), 0.0);
    }

    #[test]
    fn estimate_steps() {
        assert_eq!(AlgoState::next_estimate(4.0), 10.0);
        assert_eq!(AlgoState::next_estimate(11.0), 100.0);
        assert_eq!(AlgoState::next_estimate(10.0), 100.0);
        assert_eq!(AlgoState::next_estimate(0.3), 1.0);
        assert_eq!(AlgoState::next_estimate(0.03), 0.1);
        assert_eq!(AlgoState::next_estimate(1.0), 10.0);
    }

    #[test]
    fn imaginary_lookups() {
        let mut s = state();
        s.set_imaginary(vec![0, 2, 3]);
        assert_eq!(s.imaginary_at(11.0), Some((1, 2)));
        assert_eq!(s.first_imaginary_left(11.0), Some((0, 0)));
        assert_eq!(s.first_imaginary_right(11.0), Some((2, 3)));
        assert_eq!(s.first_imaginary_left(0.0), None);
        assert_eq!(s.remove_imaginary_slot(1), 2);
        assert_eq!(s.imaginary(), Some(&[0, 3][..]));
    }
}

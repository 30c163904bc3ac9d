//! Highest-label push–relabel on a dense network with gap relabeling and
//! periodic global relabeling.
//!
//! Only the first phase (maximum preflow) is run. The set of nodes that can
//! still reach the sink in its residual graph is the smallest sink side over
//! all minimum cuts. Solving the network with source and sink exchanged
//! therefore yields the smallest source side of the original network.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::network::FlowNetwork;
use crate::domain::Mask;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowStats {
    pub pushes: u64,
    pub relabels: u64,
    pub global_relabels: u64,
    pub gaps: u64,
}

#[derive(Clone, Debug)]
pub struct FlowSolution {
    /// Smallest source side among all minimum cuts.
    pub mask: Mask,
    /// Maximum flow in quantum units.
    pub value: i64,
    pub stats: FlowStats,
}

struct Preflow<'a> {
    n: usize,
    /// Label bound: a node with this label cannot reach the sink.
    top: usize,
    r: Vec<i64>,
    to_t: Vec<i64>,
    excess: Vec<i64>,
    d: Vec<usize>,
    cur: Vec<usize>,
    count: Vec<usize>,
    buckets: Vec<Vec<usize>>,
    active: Vec<bool>,
    highest: usize,
    sink_excess: i64,
    stats: FlowStats,
    _net: &'a FlowNetwork,
}

impl<'a> Preflow<'a> {
    fn new(net: &'a FlowNetwork, from_s: &[i64], to_t: &[i64]) -> Self {
        let n = net.n;
        let top = n + 1;
        let mut p = Preflow {
            n,
            top,
            r: net.pair.clone(),
            to_t: to_t.to_vec(),
            excess: from_s.to_vec(),
            d: vec![0; n],
            cur: vec![0; n],
            count: vec![0; top + 1],
            buckets: vec![Vec::new(); top],
            active: vec![false; n],
            highest: 0,
            sink_excess: 0,
            stats: FlowStats::default(),
            _net: net,
        };
        p.global_relabel();
        p
    }

    /// Exact distances to the sink in the residual graph.
    fn global_relabel(&mut self) {
        let n = self.n;
        self.stats.global_relabels += 1;
        self.d.iter_mut().for_each(|x| *x = self.top);
        let mut queue = VecDeque::new();
        for u in 0..n {
            if self.to_t[u] > 0 {
                self.d[u] = 1;
                queue.push_back(u);
            }
        }
        while let Some(v) = queue.pop_front() {
            let dv = self.d[v];
            for u in 0..n {
                if self.d[u] == self.top && self.r[u * n + v] > 0 {
                    self.d[u] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
        self.count.iter_mut().for_each(|c| *c = 0);
        self.buckets.iter_mut().for_each(Vec::clear);
        self.active.iter_mut().for_each(|a| *a = false);
        self.highest = 0;
        for u in 0..n {
            self.count[self.d[u]] += 1;
            self.cur[u] = 0;
            if self.excess[u] > 0 && self.d[u] < self.top {
                self.activate(u);
            }
        }
    }

    fn activate(&mut self, u: usize) {
        if !self.active[u] {
            self.active[u] = true;
            self.buckets[self.d[u]].push(u);
            self.highest = self.highest.max(self.d[u]);
        }
    }

    fn run(&mut self) {
        let n = self.n;
        let mut since_global = 0usize;
        loop {
            while self.highest > 0 && self.buckets[self.highest].is_empty() {
                self.highest -= 1;
            }
            let Some(u) = self.buckets[self.highest].pop() else { break };
            self.active[u] = false;
            if self.d[u] >= self.top {
                continue;
            }
            let relabeled = self.discharge(u);
            since_global += relabeled;
            if since_global > n {
                since_global = 0;
                self.global_relabel();
            }
        }
        debug_assert!((0..n).all(|u| self.excess[u] == 0 || self.d[u] >= self.top));
    }

    /// Pushes the excess of `u` away, relabeling as needed. Returns the number
    /// of relabels.
    fn discharge(&mut self, u: usize) -> usize {
        let n = self.n;
        let mut relabels = 0;
        while self.excess[u] > 0 {
            // Arc 0 is u → t, arc k ≥ 1 is u → k − 1.
            let du = self.d[u];
            let mut k = self.cur[u];
            while k <= n && self.excess[u] > 0 {
                if k == 0 {
                    if du == 1 && self.to_t[u] > 0 {
                        let delta = self.excess[u].min(self.to_t[u]);
                        self.to_t[u] -= delta;
                        self.excess[u] -= delta;
                        self.sink_excess += delta;
                        self.stats.pushes += 1;
                    }
                } else {
                    let v = k - 1;
                    let ruv = self.r[u * n + v];
                    if ruv > 0 && self.d[v] + 1 == du {
                        let delta = self.excess[u].min(ruv);
                        self.r[u * n + v] -= delta;
                        self.r[v * n + u] += delta;
                        self.excess[u] -= delta;
                        self.excess[v] += delta;
                        self.stats.pushes += 1;
                        self.activate(v);
                    }
                }
                if self.excess[u] > 0 {
                    k += 1;
                }
            }
            self.cur[u] = k.min(n);
            if self.excess[u] == 0 {
                break;
            }
            relabels += 1;
            if !self.relabel(u) {
                break;
            }
        }
        relabels
    }

    /// Returns false when `u` can no longer reach the sink.
    fn relabel(&mut self, u: usize) -> bool {
        let n = self.n;
        self.stats.relabels += 1;
        let old = self.d[u];
        let mut best = self.top;
        if self.to_t[u] > 0 {
            best = 1;
        }
        let row = &self.r[u * n..(u + 1) * n];
        for (v, &c) in row.iter().enumerate() {
            if c > 0 && self.d[v] + 1 < best {
                best = self.d[v] + 1;
            }
        }
        self.count[old] -= 1;
        if self.count[old] == 0 && old < self.top {
            // Gap: nothing at `old` means nothing above it reaches the sink.
            self.stats.gaps += 1;
            for v in 0..n {
                if self.d[v] > old && self.d[v] < self.top {
                    self.count[self.d[v]] -= 1;
                    self.d[v] = self.top;
                    self.count[self.top] += 1;
                }
            }
            self.d[u] = self.top;
            self.count[self.top] += 1;
            return false;
        }
        self.d[u] = best.min(self.top);
        self.count[self.d[u]] += 1;
        self.cur[u] = 0;
        self.d[u] < self.top
    }

    /// Nodes that can reach the sink in the residual graph.
    fn sink_side(&self) -> Vec<bool> {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for u in 0..n {
            if self.to_t[u] > 0 {
                seen[u] = true;
                queue.push_back(u);
            }
        }
        while let Some(v) = queue.pop_front() {
            for u in 0..n {
                if !seen[u] && self.r[u * n + v] > 0 {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }
}

/// Minimum cut with the smallest source side.
pub fn max_flow(net: &FlowNetwork) -> FlowSolution {
    // Exchange terminals; the sink side of the exchanged network is the
    // source side of the original.
    let mut p = Preflow::new(net, &net.sink, &net.source);
    p.run();
    let side = p.sink_side();
    FlowSolution { mask: Mask::from_bools(side), value: p.sink_excess, stats: p.stats }
}

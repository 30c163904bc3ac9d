use serde::{Deserialize, Serialize};

use crate::domain::Mask;
use crate::error::{Error, Result};
use crate::interaction::InteractionModel;

/// Default dynamic range of the integer capacities.
pub const QUANTUM_BITS: u32 = 48;

/// s–t network whose cuts are the masks of a pixel problem.
///
/// Node `i < n` is free cell `i`; the source side of a cut is the set `E`.
/// Capacities are integers in units of `quantum`. The terminal arcs are
/// reduced by `min(a_i, b_i)`, which is collected in `constant`.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    pub n: usize,
    /// `s → i`, paid when `i ∉ E`.
    pub source: Vec<i64>,
    /// `i → t`, paid when `i ∈ E`.
    pub sink: Vec<i64>,
    /// Row-major `n × n` symmetric pair capacities, zero diagonal.
    pub pair: Vec<i64>,
    pub quantum: f64,
    pub constant: f64,
    pub tail_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcCounts {
    pub nodes: usize,
    pub terminal: usize,
    pub pair: usize,
}

pub fn build_network(model: &InteractionModel, quantum_bits: u32) -> Result<FlowNetwork> {
    if !(8..=56).contains(&quantum_bits) {
        return Err(Error::InvalidParameter(format!("quantum bits {quantum_bits} outside 8..=56")));
    }
    let n = model.len();
    for (name, v) in [("a", &model.a), ("b", &model.b)] {
        if let Some((i, &x)) = v.iter().enumerate().find(|(_, x)| !(**x >= 0.0 && x.is_finite())) {
            return Err(Error::NegativeCapacity { arc: format!("{name}[{i}]"), value: x });
        }
    }
    let mut pair_total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let w = model.w(i, j);
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::NegativeCapacity { arc: format!("({i}, {j})"), value: w });
            }
            pair_total += w;
        }
    }
    let mut constant = 0.0;
    let mut src = vec![0.0; n];
    let mut snk = vec![0.0; n];
    for i in 0..n {
        let c = model.a[i].min(model.b[i]);
        constant += c;
        src[i] = model.b[i] - c;
        snk[i] = model.a[i] - c;
    }
    let total = pair_total + src.iter().sum::<f64>() + snk.iter().sum::<f64>();
    let quantum = if total > 0.0 { total / (1u64 << quantum_bits) as f64 } else { 1.0 };
    let q = |x: f64| (x / quantum).round() as i64;
    let mut pair = vec![0i64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let c = q(model.w(i, j));
            pair[i * n + j] = c;
            pair[j * n + i] = c;
        }
    }
    Ok(FlowNetwork {
        n,
        source: src.into_iter().map(q).collect(),
        sink: snk.into_iter().map(q).collect(),
        pair,
        quantum,
        constant,
        tail_bound: model.tail_bound,
    })
}

impl FlowNetwork {
    /// Structural arc counts: every free pair and both terminal arcs of every
    /// free cell, whether or not the capacity rounds to zero.
    pub fn arc_counts(&self) -> ArcCounts {
        ArcCounts { nodes: self.n + 2, terminal: 2 * self.n, pair: self.n * self.n.saturating_sub(1) / 2 }
    }

    #[inline]
    pub fn cap(&self, i: usize, j: usize) -> i64 {
        self.pair[i * self.n + j]
    }

    /// Capacity of the cut whose source side is `mask`, in quantum units.
    pub fn cut_value(&self, mask: &Mask) -> i64 {
        let mut v = 0;
        for i in 0..self.n {
            if mask.get(i) {
                v += self.sink[i];
                for j in 0..self.n {
                    if !mask.get(j) {
                        v += self.cap(i, j);
                    }
                }
            } else {
                v += self.source[i];
            }
        }
        v
    }

    /// Energy corresponding to a cut value.
    pub fn energy_of(&self, cut: i64) -> f64 {
        cut as f64 * self.quantum + self.constant
    }

    /// Bound on `|energy − energy_of(cut)|` from rounding.
    pub fn rounding_bound(&self) -> f64 {
        let n = self.n.max(1) as f64;
        n * n * self.quantum
    }
}

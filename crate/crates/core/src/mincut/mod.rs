//! Exact minimization of the discrete fractional perimeter by minimum cut.

pub mod maxflow;
pub mod network;
pub mod scenario;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use maxflow::{max_flow, FlowSolution, FlowStats};
pub use network::{build_network, ArcCounts, FlowNetwork, QUANTUM_BITS};

use crate::domain::{FractionalOrder, Mask, PixelProblem};
use crate::error::{Error, Result};
use crate::interaction::{frac_perimeter, Energy, InteractionModel, ModelOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizeOptions {
    pub model: ModelOptions,
    pub quantum_bits: u32,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { model: ModelOptions::default(), quantum_bits: QUANTUM_BITS }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverStats {
    #[serde(flatten)]
    pub flow: FlowStats,
    pub arcs: ArcCounts,
    /// Not part of the reproducible output.
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimizerResult {
    pub mask: Mask,
    pub energy: Energy,
    /// Maximum flow converted to energy units.
    pub maxflow: f64,
    pub maxflow_units: i64,
    pub quantum: f64,
    /// Mask-independent part of the energy removed from the network.
    pub constant: f64,
    /// Smallest source side among all minimum cuts.
    pub canonical: bool,
    pub stats: SolverStats,
}

impl MinimizerResult {
    /// Equality of everything except timing.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.mask == other.mask
            && self.energy == other.energy
            && self.maxflow_units == other.maxflow_units
            && self.quantum == other.quantum
            && self.constant == other.constant
            && self.stats.flow == other.stats.flow
    }
}

/// Minimum cut of `net`, evaluated against `model`.
pub fn solve(net: &FlowNetwork, model: &InteractionModel) -> Result<MinimizerResult> {
    let start = Instant::now();
    let sol = max_flow(net);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let energy = frac_perimeter(model, &sol.mask)?;
    let maxflow = sol.value as f64 * net.quantum;
    let predicted = net.energy_of(sol.value);
    if (energy.total - predicted).abs() > net.rounding_bound() + 1e-12 * energy.total.abs() {
        return Err(Error::Consistency(format!(
            "energy {} differs from max flow plus constant {} by more than the rounding bound {}",
            energy.total,
            predicted,
            net.rounding_bound()
        )));
    }
    Ok(MinimizerResult {
        mask: sol.mask,
        energy,
        maxflow,
        maxflow_units: sol.value,
        quantum: net.quantum,
        constant: net.constant,
        canonical: true,
        stats: SolverStats { flow: sol.stats, arcs: net.arc_counts(), wall_ms },
    })
}

/// Assembles the interaction model, builds the network and solves it.
pub fn minimize(problem: &PixelProblem, s: FractionalOrder, opts: &MinimizeOptions) -> Result<MinimizerResult> {
    let model = InteractionModel::assemble(problem, s, &opts.model)?;
    minimize_model(&model, opts)
}

pub fn minimize_model(model: &InteractionModel, opts: &MinimizeOptions) -> Result<MinimizerResult> {
    let net = build_network(model, opts.quantum_bits)?;
    solve(&net, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_problem, ExteriorDatum, GridSpec, OmegaDesc};
    use crate::par::Exec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    fn block(datum: ExteriorDatum, k: usize, h: f64) -> PixelProblem {
        let grid = GridSpec::centered([0.0, 0.0], h, k).unwrap();
        let half = 0.5 * k as f64 * h;
        make_problem(grid, OmegaDesc::Rect { min: [-half, -half], max: [half, half] }, datum, 3.0 * half + h).unwrap()
    }

    #[test]
    fn single_cell_network() {
        let p = block(ExteriorDatum::lower_halfplane(), 1, 0.5);
        let m = InteractionModel::assemble(&p, s(0.25), &ModelOptions::default()).unwrap();
        let net = build_network(&m, QUANTUM_BITS).unwrap();
        assert_eq!(net.arc_counts(), ArcCounts { nodes: 3, terminal: 2, pair: 0 });
    }

    #[test]
    fn two_cells_cut_values_enumerate_energies() {
        let grid = GridSpec::new([0.0, 0.0], 0.5, 2, 1).unwrap();
        let p = make_problem(
            grid,
            OmegaDesc::Rect { min: [0.0, 0.0], max: [1.0, 0.5] },
            ExteriorDatum::Halfplane { angle: 0.3, offset: 0.4 },
            2.0,
        )
        .unwrap();
        let m = InteractionModel::assemble(&p, s(0.25), &ModelOptions::default()).unwrap();
        let net = build_network(&m, QUANTUM_BITS).unwrap();
        assert_eq!(net.arc_counts().pair, 1);
        for code in 0..4 {
            let mask = Mask::from_code(2, code);
            let e = frac_perimeter(&m, &mask).unwrap().total;
            assert!((net.energy_of(net.cut_value(&mask)) - e).abs() <= net.rounding_bound());
        }
    }

    #[test]
    fn dense_disk_arc_count() {
        let grid = GridSpec::centered([0.0, 0.0], 1.0 / 12.0, 24).unwrap();
        let p = make_problem(grid, OmegaDesc::Disk { center: [0.0, 0.0], radius: 1.0 }, ExteriorDatum::lower_halfplane(), 1.2)
            .unwrap();
        let m = InteractionModel::assemble(&p, s(0.25), &ModelOptions::default()).unwrap();
        let net = build_network(&m, QUANTUM_BITS).unwrap();
        let n = p.num_free();
        assert_eq!(net.arc_counts(), ArcCounts { nodes: n + 2, terminal: 2 * n, pair: n * (n - 1) / 2 });
    }

    #[test]
    fn empty_exterior_gives_empty_mask() {
        let p = block(ExteriorDatum::Empty, 4, 0.25);
        let r = minimize(&p, s(0.25), &MinimizeOptions::default()).unwrap();
        assert_eq!(r.mask.count(), 0);
        assert_eq!(r.energy.total, 0.0);
    }

    #[test]
    fn halfplane_through_middle_selects_lower_row() {
        let p = block(ExteriorDatum::lower_halfplane(), 2, 0.5);
        let r = minimize(&p, s(0.25), &MinimizeOptions::default()).unwrap();
        let lower: Vec<bool> = p.free.iter().map(|&(_, iy)| p.grid.center(0, iy)[1] < 0.0).collect();
        assert_eq!(r.mask.bits(), &lower[..]);
        // Enumeration of all 16 masks.
        let m = InteractionModel::assemble(&p, s(0.25), &ModelOptions::default()).unwrap();
        let best = (0..16u64)
            .map(|c| frac_perimeter(&m, &Mask::from_code(4, c)).unwrap().total)
            .fold(f64::INFINITY, f64::min);
        assert!((r.energy.total - best).abs() < 1e-12 * best);
    }

    #[test]
    fn random_datum_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let grid = GridSpec::new([0.0, 0.0], 0.25, 12, 12).unwrap();
        let bits: Vec<u8> = (0..grid.len()).map(|_| rng.gen_bool(0.5) as u8).collect();
        let datum = ExteriorDatum::ExplicitMask { grid: grid.clone(), bits };
        let p = make_problem(grid, OmegaDesc::Rect { min: [1.0, 1.0], max: [2.0, 2.0] }, datum, 1.5).unwrap();
        assert_eq!(p.num_free(), 16);
        let m = InteractionModel::assemble(&p, s(0.25), &ModelOptions::default()).unwrap();
        let net = build_network(&m, QUANTUM_BITS).unwrap();
        let r = minimize_model(&m, &MinimizeOptions::default()).unwrap();
        let best = (0..1u64 << 16).map(|c| net.cut_value(&Mask::from_code(16, c))).min().unwrap();
        assert_eq!(r.maxflow_units, best);
        assert_eq!(net.cut_value(&r.mask), best);
    }

    #[test]
    fn deterministic_across_execution_modes() {
        let grid = GridSpec::centered([0.0, 0.0], 0.125, 16).unwrap();
        let p = make_problem(grid, OmegaDesc::Disk { center: [0.0, 0.0], radius: 1.0 }, ExteriorDatum::Sector, 1.3).unwrap();
        let mut o = MinimizeOptions::default();
        o.model.exec = Exec::Sequential;
        let a = minimize(&p, s(0.2), &o).unwrap();
        o.model.exec = Exec::Parallel;
        let b = minimize(&p, s(0.2), &o).unwrap();
        assert!(a.same_outcome(&b));
    }
}

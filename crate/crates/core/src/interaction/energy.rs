use serde::{Deserialize, Serialize};

use super::model::{InteractionModel, ModelOptions};
use super::table::WeightTable;
use super::weight::self_complement_unit;
use crate::domain::{FractionalOrder, Image, Mask, PixelProblem};
use crate::error::Result;
use crate::par::{map_range, Exec};

/// The three interaction terms of `Per_s(E, Ω)` on a pixel problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    /// `I(E ∩ Ω, E^c ∩ Ω)`
    pub t1: f64,
    /// `I(E ∩ Ω, E^c \ Ω)`
    pub t2: f64,
    /// `I(E \ Ω, E^c ∩ Ω)`
    pub t3: f64,
    pub total: f64,
    pub tail_bound: f64,
}

pub fn frac_perimeter(model: &InteractionModel, mask: &Mask) -> Result<Energy> {
    model_check(model, mask)?;
    let n = model.len();
    let rows = map_range(Exec::default(), n, |i| {
        if !mask.get(i) {
            return 0.0;
        }
        let mut acc = 0.0;
        for j in 0..n {
            if !mask.get(j) {
                acc += model.w(i, j);
            }
        }
        acc
    });
    let t1: f64 = rows.iter().sum();
    let (mut t2, mut t3) = (0.0, 0.0);
    for i in 0..n {
        if mask.get(i) {
            t2 += model.a[i];
        } else {
            t3 += model.b[i];
        }
    }
    Ok(Energy { t1, t2, t3, total: t1 + t2 + t3, tail_bound: model.tail_bound })
}

fn model_check(model: &InteractionModel, mask: &Mask) -> Result<()> {
    if mask.len() != model.len() {
        return Err(crate::Error::MaskLength { expected: model.len(), got: mask.len() });
    }
    Ok(())
}

/// Assembles the model and evaluates the perimeter of `mask`.
pub fn evaluate(problem: &PixelProblem, mask: &Mask, s: FractionalOrder, opts: &ModelOptions) -> Result<Energy> {
    problem.check_mask(mask)?;
    let model = InteractionModel::assemble(problem, s, opts)?;
    frac_perimeter(&model, mask)
}

/// Weights and the self-complement interaction for whole-plane perimeters of
/// cell sets on a lattice of side `h`.
#[derive(Clone, Debug)]
pub struct PlaneKernel {
    pub table: WeightTable,
    /// `I(Q, Q^c)` for one cell `Q`.
    pub self_complement: f64,
}

impl PlaneKernel {
    pub fn new(s: FractionalOrder, h: f64, max_offset: usize, tol: f64, exec: Exec) -> Result<Self> {
        let table = WeightTable::build(s, h, max_offset, tol, exec)?;
        let self_complement = self_complement_unit(s, tol)? * h.powf(s.scaling_exponent());
        Ok(PlaneKernel { table, self_complement })
    }

    /// Kernel sized for sets inside `image`'s grid.
    pub fn for_image(image: &Image, s: FractionalOrder, tol: f64, exec: Exec) -> Result<Self> {
        let g = &image.grid;
        Self::new(s, g.h, g.nx.max(g.ny), tol, exec)
    }
}

fn occupied(image: &Image) -> Vec<(i64, i64)> {
    (0..image.grid.len()).filter(|&k| image.bits[k]).map(|k| image.grid.coords(k)).collect()
}

/// `Σ_{i ≠ j ∈ E} w_ij`, accumulated per cell in a fixed order.
fn inner_pairs(cells: &[(i64, i64)], table: &WeightTable, exec: Exec) -> f64 {
    map_range(exec, cells.len(), |i| {
        let (x, y) = cells[i];
        cells.iter().map(|&(u, v)| table.get(u - x, v - y)).sum::<f64>()
    })
    .iter()
    .sum()
}

/// `Per_s(E, R²) = I(E, E^c)` for the occupied cells of `image`.
pub fn whole_plane_perimeter(image: &Image, kernel: &PlaneKernel, exec: Exec) -> f64 {
    let cells = occupied(image);
    cells.len() as f64 * kernel.self_complement - inner_pairs(&cells, &kernel.table, exec)
}

/// Relative gap between `2·I(E, E^c)` and the seminorm
/// `∬ |χ_E(x) − χ_E(y)|² |x − y|^{−2−2s}`, the latter accumulated over all
/// ordered grid-cell pairs plus each cell's interaction with the outside of
/// the grid.
pub fn sobolev_identity_gap(image: &Image, kernel: &PlaneKernel, exec: Exec) -> f64 {
    let lhs = 2.0 * whole_plane_perimeter(image, kernel, exec);
    let g = &image.grid;
    let t = &kernel.table;
    let per_cell = map_range(exec, g.len(), |k| {
        let (x, y) = g.coords(k);
        let ck = image.bits[k];
        let mut jump = 0.0;
        let mut inside = 0.0;
        for l in 0..g.len() {
            let (u, v) = g.coords(l);
            let w = t.get(u - x, v - y);
            inside += w;
            if image.bits[l] != ck {
                jump += w;
            }
        }
        // Pairs with the outside of the grid, which is empty.
        let outside = if ck { kernel.self_complement - inside } else { 0.0 };
        jump + 2.0 * outside
    });
    let rhs: f64 = per_cell.iter().sum();
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_problem, ExteriorDatum, GridSpec, OmegaDesc};
    use crate::interaction::weight::{cell_pair_weight, Rect};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    /// Naive double loop over all universe cell pairs, plus tails.
    fn brute_force(p: &PixelProblem, m: &InteractionModel, mask: &Mask) -> f64 {
        let (ux, uy) = p.universe_dims();
        let mut cells = Vec::new();
        for jy in 0..uy as i64 {
            for jx in 0..ux as i64 {
                let (x, y) = (p.universe[0] + jx, p.universe[1] + jy);
                let (free, occ) = match p.free_index(x, y) {
                    Some(k) => (true, mask.get(k)),
                    None => (false, p.fixed(x, y).unwrap()),
                };
                cells.push((x, y, free, occ));
            }
        }
        let mut total = 0.0;
        for &(x, y, fa, oa) in &cells {
            for &(u, v, fb, ob) in &cells {
                if oa && !ob && (fa || fb) {
                    total += m.table.get(u - x, v - y);
                }
            }
        }
        for k in 0..mask.len() {
            total += if mask.get(k) { m.a_tail[k] } else { m.b_tail[k] };
        }
        total
    }

    #[test]
    fn matches_brute_force_on_disk_in_box() {
        let grid = GridSpec::centered([0.0, 0.0], 1.0 / 16.0, 32).unwrap();
        let p = make_problem(grid, OmegaDesc::Disk { center: [0.0, 0.0], radius: 1.0 }, ExteriorDatum::RingCap { delta: 0.2 }, 1.3)
            .unwrap();
        let m = InteractionModel::assemble(&p, s(0.3), &ModelOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..3 {
            let mask = Mask::from_bools((0..p.num_free()).map(|_| rng.gen_bool(0.4)).collect());
            let e = frac_perimeter(&m, &mask).unwrap();
            let bf = brute_force(&p, &m, &mask);
            assert!((e.total - bf).abs() <= 1e-12 * bf, "{} vs {bf}", e.total);
            assert_eq!(e.total, e.t1 + e.t2 + e.t3);
        }
    }

    #[test]
    fn empty_configuration_has_zero_energy() {
        let grid = GridSpec::centered([0.0, 0.0], 0.125, 16).unwrap();
        let p = make_problem(grid, OmegaDesc::Disk { center: [0.0, 0.0], radius: 1.0 }, ExteriorDatum::Empty, 1.5).unwrap();
        let e = evaluate(&p, &Mask::empty(p.num_free()), s(0.25), &ModelOptions::default()).unwrap();
        assert_eq!(e.total, 0.0);
        assert!(evaluate(&p, &Mask::empty(3), s(0.25), &ModelOptions::default()).is_err());
    }

    #[test]
    fn complement_symmetry() {
        let grid = GridSpec::centered([0.0, 0.0], 0.125, 16).unwrap();
        let omega = OmegaDesc::Disk { center: [0.0, 0.0], radius: 1.0 };
        let d = ExteriorDatum::Sector;
        let p = make_problem(grid.clone(), omega.clone(), d.clone(), 1.5).unwrap();
        let pc = make_problem(grid, omega, d.complement(), 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mask = Mask::from_bools((0..p.num_free()).map(|_| rng.gen_bool(0.5)).collect());
        let opts = ModelOptions::default();
        let e = evaluate(&p, &mask, s(0.2), &opts).unwrap();
        let ec = evaluate(&pc, &mask.complement(), s(0.2), &opts).unwrap();
        assert!((e.total - ec.total).abs() < 1e-10 * e.total, "{} {}", e.total, ec.total);
        assert!((e.t1 - ec.t1).abs() < 1e-12 * e.t1);
    }

    #[test]
    fn scaling_law() {
        let sv = s(0.25);
        let per = |h: f64| {
            let grid = GridSpec::new([0.0, 0.0], h, 12, 12).unwrap();
            let img = Image::from_fn(grid.clone(), |p| (p[0] - 6.0 * h).hypot(p[1] - 6.0 * h) < 4.0 * h);
            let k = PlaneKernel::for_image(&img, sv, 1e-10, Exec::default()).unwrap();
            whole_plane_perimeter(&img, &k, Exec::default())
        };
        let (p1, p2) = (per(0.1), per(0.2));
        assert!((p2 - 2f64.powf(1.5) * p1).abs() < 1e-9 * p2);
    }

    #[test]
    fn whole_plane_perimeter_of_two_cells() {
        // Oracle: 2·P1 − 2·w for adjacent unit cells, straight from the
        // cell-pair quadrature.
        let sv = s(0.25);
        let grid = GridSpec::new([0.0, 0.0], 1.0, 3, 3).unwrap();
        let img = Image::from_fn(grid, |p| p[1] < 1.0 && p[0] < 2.0);
        let k = PlaneKernel::for_image(&img, sv, 1e-11, Exec::default()).unwrap();
        let w = cell_pair_weight(&Rect::square(0.0, 0.0, 1.0), &Rect::square(1.0, 0.0, 1.0), sv, 1e-11).unwrap();
        let p1 = self_complement_unit(sv, 1e-11).unwrap();
        let got = whole_plane_perimeter(&img, &k, Exec::default());
        assert!((got - (2.0 * p1 - 2.0 * w)).abs() < 1e-12 * got);
    }

    #[test]
    fn sobolev_identity() {
        let sv = s(0.3);
        let grid = GridSpec::new([0.0, 0.0], 0.25, 16, 16).unwrap();
        let k = PlaneKernel::new(sv, 0.25, 16, 1e-9, Exec::default()).unwrap();
        let single = Image::from_fn(grid.clone(), |p| p[0] < 0.25 && p[1] < 0.25);
        assert!(sobolev_identity_gap(&single, &k, Exec::default()) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let random = Image { grid: grid.clone(), bits: (0..grid.len()).map(|_| rng.gen_bool(0.5)).collect() };
        assert!(sobolev_identity_gap(&random, &k, Exec::default()) <= 1e-10);
        let g8 = GridSpec::new([0.0, 0.0], 0.25, 8, 8).unwrap();
        let checker = Image { grid: g8.clone(), bits: (0..64).map(|i| (i % 8 + i / 8) % 2 == 0).collect() };
        assert!(sobolev_identity_gap(&checker, &k, Exec::default()) <= 1e-10);
    }
}

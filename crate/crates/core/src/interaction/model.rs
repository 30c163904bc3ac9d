use serde::{Deserialize, Serialize};

use super::table::WeightTable;
use super::tail::{cell_tail, far_bound, TailPolicy};
use super::weight::Rect;
use crate::domain::{FractionalOrder, PixelProblem};
use crate::error::{Error, Result};
use crate::par::{map_range, Exec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    /// Relative tolerance for pairs closer than the far-field switch.
    pub tol_near: f64,
    pub tol_far: f64,
    pub tol_tail: f64,
    /// Free–free pairs whose centers are farther apart are dropped and their
    /// mass is added to the tail bound.
    pub r_cut: Option<f64>,
    pub tail: TailPolicy,
    pub exec: Exec,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions { tol_near: 1e-8, tol_far: 1e-6, tol_tail: 1e-8, r_cut: None, tail: TailPolicy::Exact, exec: Exec::default() }
    }
}

impl ModelOptions {
    fn validate(&self) -> Result<()> {
        for t in [self.tol_near, self.tol_far, self.tol_tail] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidTolerance(t));
            }
        }
        if let Some(r) = self.r_cut {
            if !(r > 0.0) {
                return Err(Error::InvalidParameter(format!("r_cut = {r} must be positive")));
            }
        }
        Ok(())
    }
}

/// Pair weights between free cells and unary couplings to the fixed data.
#[derive(Clone, Debug)]
pub struct InteractionModel {
    pub s: FractionalOrder,
    pub table: WeightTable,
    /// Lattice coordinates of the free cells (copied from the problem).
    pub free: Vec<(i64, i64)>,
    /// Interaction of each free cell with the fixed complement `E^c \ Ω`.
    pub a: Vec<f64>,
    /// Interaction of each free cell with the fixed set `E \ Ω`.
    pub b: Vec<f64>,
    /// Parts of `a` and `b` from beyond the universe box.
    pub a_tail: Vec<f64>,
    pub b_tail: Vec<f64>,
    pub r_cut: Option<f64>,
    r_cut_cells2: Option<i64>,
    /// Bound on the interaction mass left out of `w`, `a` and `b`.
    pub tail_bound: f64,
}

impl InteractionModel {
    pub fn assemble(problem: &PixelProblem, s: FractionalOrder, opts: &ModelOptions) -> Result<Self> {
        opts.validate()?;
        let (ux, uy) = problem.universe_dims();
        let h = problem.grid.h;
        let mut tol_near = opts.tol_near;
        if s.get() > 0.4 {
            tol_near = tol_near.min(1e-9);
        }
        let table = WeightTable::build_split(s, h, ux.max(uy) - 1, tol_near, opts.tol_far, opts.exec)?;
        let (a_near, b_near) = exterior_unary_terms(problem, &table, opts.exec);
        let n = problem.num_free();
        let (a_tail, b_tail, mut tail_bound) = match opts.tail {
            TailPolicy::Exact => {
                let (at, bt) = exterior_tails(problem, s, opts.tol_tail, opts.exec);
                (at, bt, 0.0)
            }
            TailPolicy::Bound => {
                let bx = problem.universe_box();
                let rho = problem
                    .free
                    .iter()
                    .map(|&(ix, iy)| {
                        let c = problem.grid.corner(ix, iy);
                        (c[0] - bx[0]).min(bx[2] - c[0] - h).min(c[1] - bx[1]).min(bx[3] - c[1] - h)
                    })
                    .fold(f64::INFINITY, f64::min);
                (vec![0.0; n], vec![0.0; n], far_bound(n as f64 * h * h, rho, s.get()))
            }
        };
        let a = a_near.iter().zip(&a_tail).map(|(x, y)| x + y).collect();
        let b = b_near.iter().zip(&b_tail).map(|(x, y)| x + y).collect();
        let r_cut_cells2 = opts.r_cut.map(|r| {
            let k = r / h;
            (k * k).floor() as i64
        });
        let mut model = InteractionModel {
            s,
            table,
            free: problem.free.clone(),
            a,
            b,
            a_tail,
            b_tail,
            r_cut: opts.r_cut,
            r_cut_cells2,
            tail_bound: 0.0,
        };
        if model.r_cut.is_some() {
            tail_bound += model.dropped_pair_mass(opts.exec);
        }
        model.tail_bound = tail_bound;
        Ok(model)
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    fn offset(&self, i: usize, j: usize) -> (i64, i64) {
        (self.free[j].0 - self.free[i].0, self.free[j].1 - self.free[i].1)
    }

    /// Weight between free cells `i` and `j`, zero beyond `r_cut`.
    #[inline]
    pub fn w(&self, i: usize, j: usize) -> f64 {
        let (dx, dy) = self.offset(i, j);
        match self.r_cut_cells2 {
            Some(k2) if dx * dx + dy * dy > k2 => 0.0,
            _ => self.table.get(dx, dy),
        }
    }

    fn dropped_pair_mass(&self, exec: Exec) -> f64 {
        let Some(k2) = self.r_cut_cells2 else { return 0.0 };
        let rows = map_range(exec, self.len(), |i| {
            let mut acc = 0.0;
            for j in i + 1..self.len() {
                let (dx, dy) = self.offset(i, j);
                if dx * dx + dy * dy > k2 {
                    acc += self.table.get(dx, dy);
                }
            }
            acc
        });
        rows.iter().sum()
    }

    /// Free-cell pairs `(i, j, w_ij)` with `i < j` and `w_ij > 0`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |i| {
            (i + 1..self.len()).filter_map(move |j| {
                let w = self.w(i, j);
                (w > 0.0).then_some((i, j, w))
            })
        })
    }
}

/// Interactions of each free cell with the fixed cells of the universe that
/// are outside (`a`) and inside (`b`) the datum.
///
/// Each universe row is split into maximal runs of fixed cells of one
/// occupancy; a run's contribution is a difference of prefix sums of the
/// weight row at the corresponding vertical offset.
pub fn exterior_unary_terms(problem: &PixelProblem, table: &WeightTable, exec: Exec) -> (Vec<f64>, Vec<f64>) {
    let (ux, uy) = problem.universe_dims();
    let dmax = table.max_offset() as i64;
    assert!(dmax as usize + 1 >= ux.max(uy), "weight table too small for the universe");
    // prefix[dy][k] = Σ_{dx = −dmax}^{k − dmax − 1} W(dx, dy).
    let width = 2 * dmax as usize + 1;
    let prefix: Vec<Vec<f64>> = (0..uy as i64)
        .map(|dy| {
            let row = table.row(dy);
            let mut p = Vec::with_capacity(width + 1);
            p.push(0.0);
            let mut acc = 0.0;
            for dx in -dmax..=dmax {
                acc += row[dx.unsigned_abs() as usize];
                p.push(acc);
            }
            p
        })
        .collect();
    let runs: Vec<[Vec<(i64, i64)>; 2]> = (0..uy as i64)
        .map(|j| {
            let iy = problem.universe[1] + j;
            [problem.fixed_runs(iy, false), problem.fixed_runs(iy, true)]
        })
        .collect();
    let terms = map_range(exec, problem.num_free(), |k| {
        let (ix, iy) = problem.free[k];
        let mut out = [0.0, 0.0];
        for (j, row_runs) in runs.iter().enumerate() {
            let dy = (problem.universe[1] + j as i64 - iy).unsigned_abs() as usize;
            let p = &prefix[dy];
            for (occ, list) in row_runs.iter().enumerate() {
                let mut acc = 0.0;
                for &(x0, x1) in list {
                    let lo = (x0 - ix + dmax) as usize;
                    let hi = (x1 - ix + dmax) as usize + 1;
                    acc += p[hi] - p[lo];
                }
                out[occ] += acc;
            }
        }
        (out[0], out[1])
    });
    terms.into_iter().unzip()
}

/// Interactions of each free cell with the datum (`b`) and its complement
/// (`a`) beyond the universe box.
pub fn exterior_tails(problem: &PixelProblem, s: FractionalOrder, tol: f64, exec: Exec) -> (Vec<f64>, Vec<f64>) {
    let region = problem.exterior.far_region();
    let bx = problem.universe_box();
    let h = problem.grid.h;
    let t = map_range(exec, problem.num_free(), |k| {
        let (ix, iy) = problem.free[k];
        let c = problem.grid.corner(ix, iy);
        let (inside, outside) = cell_tail(&Rect::square(c[0], c[1], h), bx, &region, s.get(), tol);
        (outside, inside)
    });
    t.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_problem, ExteriorDatum, GridSpec, OmegaDesc};

    fn disk_problem(datum: ExteriorDatum, n: usize, r_ext: f64) -> PixelProblem {
        let grid = GridSpec::centered([0.0, 0.0], 2.0 / n as f64, n).unwrap();
        make_problem(grid, OmegaDesc::Disk { center: [0.0, 0.0], radius: 1.0 }, datum, r_ext).unwrap()
    }

    fn s(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    #[test]
    fn unary_terms_match_direct_sums() {
        let p = disk_problem(ExteriorDatum::RingCap { delta: 0.3 }, 16, 1.6);
        let m = InteractionModel::assemble(&p, s(0.25), &ModelOptions::default()).unwrap();
        let (ux, uy) = p.universe_dims();
        for (k, &(ix, iy)) in p.free.iter().enumerate() {
            let (mut a, mut b) = (0.0, 0.0);
            for jy in 0..uy as i64 {
                for jx in 0..ux as i64 {
                    let (x, y) = (p.universe[0] + jx, p.universe[1] + jy);
                    match p.fixed(x, y) {
                        Some(true) => b += m.table.get(x - ix, y - iy),
                        Some(false) => a += m.table.get(x - ix, y - iy),
                        None => {}
                    }
                }
            }
            let (an, bn) = (m.a[k] - m.a_tail[k], m.b[k] - m.b_tail[k]);
            assert!((an - a).abs() <= 1e-12 * a, "{an} vs {a}");
            assert!((bn - b).abs() <= 1e-12 * a.max(b), "{bn} vs {b}");
        }
    }

    #[test]
    fn empty_exterior_has_no_b() {
        let p = disk_problem(ExteriorDatum::Empty, 16, 1.5);
        let m = InteractionModel::assemble(&p, s(0.25), &ModelOptions::default()).unwrap();
        assert!(m.b.iter().all(|&v| v == 0.0));
        assert!(m.a.iter().all(|&v| v > 0.0));
        assert_eq!(m.tail_bound, 0.0);
    }

    #[test]
    fn halfplane_center_cell_is_balanced() {
        // A cell straddling the edge of {y < 0} sees both sides equally.
        let grid = GridSpec::new([-1.0, -1.0], 0.125, 16, 16).unwrap();
        let p = make_problem(grid, OmegaDesc::Disk { center: [0.0, 0.0], radius: 1.0 }, ExteriorDatum::lower_halfplane(), 8.0)
            .unwrap();
        let m = InteractionModel::assemble(&p, s(0.25), &ModelOptions::default()).unwrap();
        let bound = ModelOptions { tail: TailPolicy::Bound, ..Default::default() };
        let mb = InteractionModel::assemble(&p, s(0.25), &bound).unwrap();
        assert!(mb.tail_bound > 0.0);
        // Cells (−1, −1) and (0, −1) lie below the edge, (−1, 0) and (0, 0)
        // above; mirror images across y = 0 swap a and b.
        let i = p.free_index(0, 7).unwrap();
        let j = p.free_index(0, 8).unwrap();
        assert!((m.a[i] - m.b[j]).abs() < 1e-9 * m.a[i]);
        assert!((m.b[i] - m.a[j]).abs() < 1e-9 * m.a[i]);
        assert!((mb.a[i] - mb.b[j]).abs() < 1e-9 * mb.a[i]);
        // Truncated terms differ from exact ones by less than the bound.
        let gap: f64 = m.a.iter().zip(&mb.a).chain(m.b.iter().zip(&mb.b)).map(|(x, y)| x - y).sum();
        assert!(gap >= 0.0 && gap <= mb.tail_bound, "{gap} {}", mb.tail_bound);
    }

    #[test]
    fn ring_cap_top_cells_see_mostly_complement() {
        // Direct summation at twice the truncation radius as oracle.
        let p1 = disk_problem(ExteriorDatum::RingCap { delta: 0.1 }, 32, 1.2);
        let p2 = disk_problem(ExteriorDatum::RingCap { delta: 0.1 }, 32, 2.4);
        let opts = ModelOptions::default();
        let m1 = InteractionModel::assemble(&p1, s(0.25), &opts).unwrap();
        let m2 = InteractionModel::assemble(&p2, s(0.25), &opts).unwrap();
        let top = p1.free.iter().enumerate().max_by_key(|(_, c)| (c.1, -c.0.abs())).unwrap().0;
        assert!(m1.a[top] > 0.0 && m1.b[top] > 0.0);
        assert!(m1.b[top] < 0.05 * m1.a[top]);
        for k in 0..p1.num_free() {
            assert!((m1.a[k] - m2.a[k]).abs() < 1e-6 * m1.a[k], "{} {}", m1.a[k], m2.a[k]);
            assert!((m1.b[k] - m2.b[k]).abs() < 1e-6 * m1.a[k]);
        }
    }

    #[test]
    fn r_cut_moves_mass_to_the_bound() {
        let p = disk_problem(ExteriorDatum::Empty, 16, 1.5);
        let dense = InteractionModel::assemble(&p, s(0.3), &ModelOptions::default()).unwrap();
        let cut = InteractionModel::assemble(&p, s(0.3), &ModelOptions { r_cut: Some(0.5), ..Default::default() }).unwrap();
        let total = |m: &InteractionModel| m.pairs().map(|(_, _, w)| w).sum::<f64>();
        let dropped = total(&dense) - total(&cut);
        assert!(dropped > 0.0);
        assert!((cut.tail_bound - dropped).abs() < 1e-10 * dropped);
    }
}

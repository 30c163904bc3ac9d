//! Interaction of a cell with the part of a region lying outside an
//! axis-aligned box that contains it.
//!
//! From a point `x` in the box, the mass of a region along the ray of angle θ
//! beyond the box is `Σ (lo^{−2s} − hi^{−2s}) / (2s)` over the region's
//! intervals on the ray, clipped to start at the box exit distance. The angle
//! integral is adaptive with breakpoints wherever that expression can kink.
//! The cell average uses a tensor Gauss–Legendre rule whose order grows as
//! the cell approaches the box boundary.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::weight::Rect;
use crate::geometry::{clip_from, complement, Intervals, Point, Region};
use crate::quadrature::{Adaptive, GaussLegendre};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailPolicy {
    /// Integrate the datum beyond the universe.
    #[default]
    Exact,
    /// Drop it and report a bound on the dropped mass.
    Bound,
}

/// Interactions `(in, out)` of the point `x` with `region \ bbox` and
/// `region^c \ bbox`.
pub fn point_tail(x: Point, bbox: [f64; 4], region: &Region, s: f64, tol: f64) -> (f64, f64) {
    let breaks = angle_breaks(x, bbox, region);
    let exit = |d: Point| {
        let tx = if d[0] > 0.0 { (bbox[2] - x[0]) / d[0] } else if d[0] < 0.0 { (bbox[0] - x[0]) / d[0] } else { f64::INFINITY };
        let ty = if d[1] > 0.0 { (bbox[3] - x[1]) / d[1] } else if d[1] < 0.0 { (bbox[1] - x[1]) / d[1] } else { f64::INFINITY };
        tx.min(ty)
    };
    let mass = |iv: &Intervals| -> f64 {
        iv.iter()
            .map(|&(lo, hi)| {
                let top = if hi.is_finite() { hi.powf(-2.0 * s) } else { 0.0 };
                (lo.powf(-2.0 * s) - top) / (2.0 * s)
            })
            .sum()
    };
    // Scale of the answer, for an absolute tolerance.
    let near = (x[0] - bbox[0]).min(bbox[2] - x[0]).min(x[1] - bbox[1]).min(bbox[3] - x[1]);
    let far = (bbox[2] - bbox[0]).hypot(bbox[3] - bbox[1]);
    let scale = PI * far.powf(-2.0 * s) / s;
    debug_assert!(near > 0.0, "point outside the box");
    let q = Adaptive { abs_tol: tol * scale, rel_tol: tol, max_pieces: 2000 };
    let ray = |th: f64, inside: bool| {
        let d = [th.cos(), th.sin()];
        let r0 = exit(d);
        let iv = region.ray_intervals(x, d);
        let iv = if inside { iv } else { complement(&iv) };
        mass(&clip_from(&iv, r0))
    };
    let a = q.integrate_with_breaks(|th| ray(th, true), &breaks).value;
    let b = q.integrate_with_breaks(|th| ray(th, false), &breaks).value;
    (a, b)
}

fn angle_breaks(x: Point, bbox: [f64; 4], region: &Region) -> Vec<f64> {
    let mut th = vec![0.0, TAU];
    let wrap = |t: f64| t.rem_euclid(TAU);
    let mut toward = |p: Point| {
        let (dx, dy) = (p[0] - x[0], p[1] - x[1]);
        if dx != 0.0 || dy != 0.0 {
            th.push(wrap(dy.atan2(dx)));
        }
    };
    for p in [[bbox[0], bbox[1]], [bbox[2], bbox[1]], [bbox[2], bbox[3]], [bbox[0], bbox[3]]] {
        toward(p);
    }
    for p in region.critical_points() {
        toward(p);
    }
    for a in region.line_directions() {
        th.push(wrap(a));
    }
    for (c, r) in region.circles() {
        let (dx, dy) = (c[0] - x[0], c[1] - x[1]);
        let dist = dx.hypot(dy);
        if dist > r {
            let base = dy.atan2(dx);
            let half = (r / dist).asin();
            th.push(wrap(base + half));
            th.push(wrap(base - half));
        }
    }
    th.sort_by(f64::total_cmp);
    th.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    th
}

/// Gauss–Legendre order for averaging over a cell of side `h` at distance
/// `d` from the box boundary.
fn cell_order(h: f64, d: f64, tol: f64) -> usize {
    let ratio = 0.5 * h / d;
    if ratio >= 1.0 {
        return 16;
    }
    let m = (tol.ln() / (2.0 * ratio.ln())).ceil();
    (m as usize).clamp(2, 16)
}

/// Interactions `(in, out)` of `cell` with `region \ bbox` and
/// `region^c \ bbox`.
pub fn cell_tail(cell: &Rect, bbox: [f64; 4], region: &Region, s: f64, tol: f64) -> (f64, f64) {
    let h = (cell.x[1] - cell.x[0]).max(cell.y[1] - cell.y[0]);
    let d = (cell.x[0] - bbox[0]).min(bbox[2] - cell.x[1]).min(cell.y[0] - bbox[1]).min(bbox[3] - cell.y[1]);
    let m = cell_order(h, d.max(1e-300), tol);
    let rule = GaussLegendre::get(m);
    let (mut a, mut b) = (0.0, 0.0);
    for (px, wx) in rule.mapped(cell.x[0], cell.x[1]) {
        for (py, wy) in rule.mapped(cell.y[0], cell.y[1]) {
            let (ta, tb) = point_tail([px, py], bbox, region, s, tol);
            a += wx * wy * ta;
            b += wx * wy * tb;
        }
    }
    (a, b)
}

/// Upper bound on the interaction of a set of total area `area` with
/// everything farther than `rho` from it.
pub fn far_bound(area: f64, rho: f64, s: f64) -> f64 {
    area * PI * rho.powf(-2.0 * s) / s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ExteriorDatum, FractionalOrder};
    use crate::interaction::table::WeightTable;
    use crate::par::Exec;

    #[test]
    fn full_region_tail_splits_symmetrically() {
        let bbox = [-2.0, -2.0, 2.0, 2.0];
        let s = 0.25;
        let half = ExteriorDatum::lower_halfplane().region().unwrap();
        let (a, b) = point_tail([0.0, 0.0], bbox, &half, s, 1e-10);
        assert!((a - b).abs() < 1e-10 * a, "{a} {b}");
        let (full, none) = point_tail([0.3, -0.7], bbox, &Region::full(), s, 1e-10);
        assert_eq!(none, 0.0);
        // Between the disks of radius 2 and 2√2 around a centered point.
        let (c, _) = point_tail([0.0, 0.0], bbox, &Region::full(), s, 1e-10);
        assert!(c < PI * 2f64.powf(-2.0 * s) / s && c > PI * 8f64.sqrt().powf(-2.0 * s) / s);
        assert!(full > 0.0);
    }

    #[test]
    fn nested_boxes_match_cell_sums() {
        // tail(B₁) − tail(B₂) equals the weight sum over the datum cells of
        // B₂ \ B₁, which is an independent quadrature.
        let s = FractionalOrder::new(0.3).unwrap();
        let h = 0.25;
        let table = WeightTable::build(s, h, 40, 1e-10, Exec::default()).unwrap();
        let datum = ExteriorDatum::Halfplane { angle: std::f64::consts::FRAC_PI_2, offset: -0.5 };
        let region = datum.region().unwrap();
        let cell = Rect::square(0.0, 0.0, h);
        let (k1, k2) = (8i64, 20i64);
        let b1 = [-k1 as f64 * h, -k1 as f64 * h, (k1 + 1) as f64 * h, (k1 + 1) as f64 * h];
        let b2 = [-k2 as f64 * h, -k2 as f64 * h, (k2 + 1) as f64 * h, (k2 + 1) as f64 * h];
        let (a1, o1) = cell_tail(&cell, b1, &region, s.get(), 1e-10);
        let (a2, o2) = cell_tail(&cell, b2, &region, s.get(), 1e-10);
        let (mut sa, mut so) = (0.0, 0.0);
        for iy in -k2..=k2 {
            for ix in -k2..=k2 {
                if (-k1..=k1).contains(&ix) && (-k1..=k1).contains(&iy) {
                    continue;
                }
                let c = [(ix as f64 + 0.5) * h, (iy as f64 + 0.5) * h];
                let w = table.get(ix, iy);
                if datum.membership(c) {
                    sa += w;
                } else {
                    so += w;
                }
            }
        }
        assert!(((a1 - a2) - sa).abs() < 1e-7 * sa, "{} vs {sa}", a1 - a2);
        assert!(((o1 - o2) - so).abs() < 1e-7 * so, "{} vs {so}", o1 - o2);
    }

    #[test]
    fn curved_data_match_cell_sums() {
        let s = FractionalOrder::new(0.2).unwrap();
        let h = 0.25;
        let table = WeightTable::build(s, h, 30, 1e-10, Exec::default()).unwrap();
        let datum = ExteriorDatum::Disk { center: [3.1, 0.4], radius: 1.7 };
        let region = datum.region().unwrap();
        let cell = Rect::square(0.0, 0.0, h);
        let (k1, k2) = (6i64, 30i64);
        let b1 = [-k1 as f64 * h, -k1 as f64 * h, (k1 + 1) as f64 * h, (k1 + 1) as f64 * h];
        let b2 = [-k2 as f64 * h, -k2 as f64 * h, (k2 + 1) as f64 * h, (k2 + 1) as f64 * h];
        let (a1, _) = cell_tail(&cell, b1, &region, s.get(), 1e-10);
        let (a2, _) = cell_tail(&cell, b2, &region, s.get(), 1e-10);
        assert!(a2 < 1e-12);
        // Cells cut by the circle make the lattice sum approximate; the
        // mismatch is bounded by the boundary cells' total weight.
        let (mut sa, mut cut) = (0.0, 0.0);
        for iy in -k2..=k2 {
            for ix in -k2..=k2 {
                if (-k1..=k1).contains(&ix) && (-k1..=k1).contains(&iy) {
                    continue;
                }
                let c = [(ix as f64 + 0.5) * h, (iy as f64 + 0.5) * h];
                let dist = (c[0] - 3.1).hypot(c[1] - 0.4) - 1.7;
                let w = table.get(ix, iy);
                if dist < 0.0 {
                    sa += w;
                }
                if dist.abs() < h {
                    cut += w;
                }
            }
        }
        assert!((a1 - sa).abs() < 0.2 * cut, "{a1} vs {sa} (cut {cut})");
    }

    #[test]
    fn bound_dominates_exact_tail() {
        let s = 0.1;
        let bbox = [-3.0, -3.0, 3.0, 3.0];
        let cell = Rect::square(-0.5, -0.5, 1.0);
        let (a, b) = cell_tail(&cell, bbox, &ExteriorDatum::Sector.region().unwrap(), s, 1e-8);
        assert!(a + b <= far_bound(1.0, 2.5, s));
        assert!(a > 0.0 && b > 0.0);
    }
}

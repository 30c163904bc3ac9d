//! Limits of the fractional perimeter of bounded sets as `s ↗ 1/2` and
//! `s ↘ 0`.
//!
//! Near `s = 1/2`, `(1 − 2s)·Per_s(E, R²)` tends to `2·Per(E)`. Near `s = 0`,
//! `(2s/2π)·Per_s(E, Ω)` tends to `|E ∩ Ω|` for bounded `E`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::boundary::{per_s_boundary_integral, PolyBoundary};
use crate::diagnostics::{classical_perimeter, Window};
use crate::domain::{geometric_constants, make_problem, ExteriorDatum, FractionalOrder, Image, OmegaDesc};
use crate::error::{Error, Result};
use crate::interaction::{evaluate, whole_plane_perimeter, ModelOptions, PlaneKernel};
use crate::par::Exec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundedSet {
    Polygon { polygon: PolyBoundary },
    /// Occupied cells of an image; empty outside its grid.
    Mask { image: Image },
}

impl BoundedSet {
    /// Classical perimeter.
    pub fn perimeter(&self) -> Result<f64> {
        match self {
            BoundedSet::Polygon { polygon } => Ok(polygon.perimeter()),
            BoundedSet::Mask { image } => {
                let b = image.grid.bounds();
                classical_perimeter(image, &Window::Rect { min: [b[0], b[1]], max: [b[2], b[3]] })
            }
        }
    }

    /// `Per_s(E, R²)`, by the boundary integral for polygons and by cell
    /// interactions for masks.
    pub fn whole_plane(&self, s: FractionalOrder, tol: f64, exec: Exec) -> Result<f64> {
        match self {
            BoundedSet::Polygon { polygon } => per_s_boundary_integral(polygon, s, tol, exec),
            BoundedSet::Mask { image } => {
                let kernel = PlaneKernel::for_image(image, s, tol, exec)?;
                Ok(whole_plane_perimeter(image, &kernel, exec))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    Half,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSweep {
    pub limit: Limit,
    pub s: Vec<f64>,
    pub per_s: Vec<f64>,
    /// `(1 − 2s)·Per_s` or `(2s/2π)·Per_s`.
    pub scaled: Vec<f64>,
    /// Linear extrapolation through the last two points.
    pub extrapolated: f64,
    /// `|extrapolated − scaled.last()|`.
    pub uncertainty: f64,
    /// `2·Per(E)` or `|E ∩ Ω|`.
    pub reference: f64,
    pub relative_error: f64,
    /// Whether `scaled` approaches the reference monotonically.
    pub monotone: bool,
}

/// Value at `x = 0` of the line through `(x1, f1)` and `(x2, f2)`.
pub fn richardson(x1: f64, f1: f64, x2: f64, f2: f64) -> f64 {
    f2 - x2 * (f1 - f2) / (x1 - x2)
}

fn check_grid(s_list: &[f64], ascending: bool) -> Result<Vec<FractionalOrder>> {
    if s_list.len() < 2 {
        return Err(Error::InvalidParameter("a sweep needs at least two values of s".into()));
    }
    let ordered = s_list.windows(2).all(|w| if ascending { w[1] > w[0] } else { w[1] < w[0] });
    if !ordered {
        let dir = if ascending { "ascending" } else { "descending" };
        return Err(Error::InvalidParameter(format!("s values must be strictly {dir}: {s_list:?}")));
    }
    s_list.iter().map(|&s| FractionalOrder::new(s)).collect()
}

fn finish(limit: Limit, s: Vec<f64>, per_s: Vec<f64>, scaled: Vec<f64>, x: impl Fn(f64) -> f64, reference: f64) -> LimitSweep {
    let n = s.len();
    let extrapolated = richardson(x(s[n - 2]), scaled[n - 2], x(s[n - 1]), scaled[n - 1]);
    let gaps: Vec<f64> = scaled.iter().map(|v| (v - reference).abs()).collect();
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    let relative_error = if reference != 0.0 { (extrapolated - reference).abs() / reference.abs() } else { extrapolated.abs() };
    let uncertainty = (extrapolated - scaled[n - 1]).abs();
    LimitSweep {
        limit,
        s,
        per_s,
        scaled,
        extrapolated,
        uncertainty,
        reference,
        relative_error,
        monotone,
    }
}

/// `(1 − 2s)·Per_s(E, R²)` along ascending `s_list`, extrapolated to
/// `s = 1/2`. Tolerances tighten to `1e−9` above `s = 0.4`.
pub fn sweep_s_to_half(set: &BoundedSet, s_list: &[f64], tol: f64, exec: Exec) -> Result<LimitSweep> {
    let orders = check_grid(s_list, true)?;
    let kappa = geometric_constants(1)?.kappa;
    let reference = kappa * set.perimeter()?;
    let mut per_s = Vec::with_capacity(orders.len());
    for &s in &orders {
        let t = if s.get() > 0.4 { tol.min(1e-9) } else { tol };
        per_s.push(set.whole_plane(s, t, exec)?);
    }
    let scaled = s_list.iter().zip(&per_s).map(|(s, p)| (1.0 - 2.0 * s) * p).collect();
    Ok(finish(Limit::Half, s_list.to_vec(), per_s, scaled, |s| 0.5 - s, reference))
}

/// `(2s/2π)·Per_s(E, Ω)` along descending `s_list`, extrapolated to
/// `s = 0`. `E` is the occupied cells of `image`, free where their centers
/// lie in `omega` and fixed elsewhere; the interactions beyond the grid are
/// integrated exactly.
pub fn sweep_s_to_zero(image: &Image, omega: &OmegaDesc, s_list: &[f64], opts: &ModelOptions) -> Result<LimitSweep> {
    let orders = check_grid(s_list, false)?;
    let g = &image.grid;
    let exterior = ExteriorDatum::ExplicitMask { grid: g.clone(), bits: image.bits.iter().map(|&b| b as u8).collect() };
    // A universe covering the whole image; it also covers Ω.
    let b = g.bounds();
    let center = match omega {
        OmegaDesc::Disk { center, .. } => *center,
        OmegaDesc::Rect { min, max } => [0.5 * (min[0] + max[0]), 0.5 * (min[1] + max[1])],
        OmegaDesc::Cells { .. } => [0.5 * (b[0] + b[2]), 0.5 * (b[1] + b[3])],
    };
    let far = [[b[0], b[1]], [b[2], b[1]], [b[0], b[3]], [b[2], b[3]]]
        .iter()
        .map(|c| (c[0] - center[0]).hypot(c[1] - center[1]))
        .fold(0.0, f64::max);
    let problem = make_problem(g.clone(), omega.clone(), exterior, far + g.h)?;
    let mask = problem.datum_mask();
    let area_in = mask.count() as f64 * g.h * g.h;
    let mut per_s = Vec::with_capacity(orders.len());
    for &s in &orders {
        per_s.push(evaluate(&problem, &mask, s, opts)?.total);
    }
    let scaled = s_list.iter().zip(&per_s).map(|(s, p)| 2.0 * s / TAU * p).collect();
    Ok(finish(Limit::Zero, s_list.to_vec(), per_s, scaled, |s| s, area_in))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::GridSpec;

    #[test]
    fn richardson_is_exact_on_lines() {
        let f = |x: f64| 3.0 - 2.0 * x;
        assert!((richardson(0.2, f(0.2), 0.05, f(0.05)) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn grid_checks() {
        let sq = BoundedSet::Polygon { polygon: PolyBoundary::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap() };
        assert!(sweep_s_to_half(&sq, &[0.4, 0.3], 1e-8, Exec::Sequential).is_err());
        assert!(sweep_s_to_half(&sq, &[0.4], 1e-8, Exec::Sequential).is_err());
        assert!(sweep_s_to_half(&sq, &[0.3, 0.5], 1e-8, Exec::Sequential).is_err());
    }

    #[test]
    fn square_limit_at_one_half() {
        let sq = BoundedSet::Polygon { polygon: PolyBoundary::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap() };
        let r = sweep_s_to_half(&sq, &[0.3, 0.4, 0.45, 0.475], 1e-9, Exec::default()).unwrap();
        assert_eq!(r.reference, 8.0);
        assert!(r.relative_error < 0.03, "{r:?}");
        assert!(r.monotone);
    }

    #[test]
    fn empty_set_sweeps_to_zero() {
        let grid = GridSpec::centered([0.0, 0.0], 0.25, 16).unwrap();
        let img = Image::from_fn(grid, |_| false);
        let omega = OmegaDesc::Disk { center: [0.0, 0.0], radius: 2.0 };
        let r = sweep_s_to_zero(&img, &omega, &[0.1, 0.05], &ModelOptions::default()).unwrap();
        assert!(r.scaled.iter().all(|&v| v == 0.0));
        assert_eq!(r.reference, 0.0);
    }
}

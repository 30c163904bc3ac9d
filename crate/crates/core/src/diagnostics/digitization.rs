//! Pixel digitization of the unit square turned by 45°.
//!
//! The classical perimeter of the staircase does not converge to 4, while
//! the fractional perimeter of the digitization converges at rate
//! `ε^{1−2s}`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};

use super::perimeter::{classical_perimeter, Window};
use crate::boundary::{per_s_boundary_integral, PolyBoundary};
use crate::domain::{FractionalOrder, GridSpec, Image};
use crate::error::{Error, Result};
use crate::interaction::{whole_plane_perimeter, PlaneKernel};
use crate::mincut::scenario::slope;
use crate::par::Exec;

/// Coarsest cell side that resolves the square.
pub const MAX_EPS: f64 = 0.125;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitizationRow {
    pub eps: f64,
    pub cells: usize,
    pub classical: f64,
    pub per_s_digitized: f64,
    pub per_s_exact: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitizationTable {
    pub s: f64,
    /// Perimeter of the square itself.
    pub exact_perimeter: f64,
    /// `4√2`, the length of any fine staircase around it.
    pub staircase_perimeter: f64,
    pub rows: Vec<DigitizationRow>,
    /// Least-squares slope of `log error` against `log ε`.
    pub slope: f64,
}

/// The square `{|x − a| + |y − a| < a}`, `a = 1/√2`, with its left and
/// bottom vertices on grid lines of the `ε`-lattice through the origin.
pub fn rotated_square() -> PolyBoundary {
    let a = FRAC_1_SQRT_2;
    PolyBoundary::new(vec![[0.0, a], [a, 0.0], [2.0 * a, a], [a, 2.0 * a]]).expect("valid square")
}

/// Cells of side `eps` that meet the interior of [`rotated_square`].
pub fn digitized_rotated_square(eps: f64) -> Result<Image> {
    if !(eps > 0.0 && eps <= MAX_EPS) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must lie in (0, {MAX_EPS}]")));
    }
    let a = FRAC_1_SQRT_2;
    let n = (2.0 * a / eps).ceil() as usize + 2;
    let grid = GridSpec::new([-eps, -eps], eps, n, n)?;
    let dist = |lo: f64, hi: f64| if a < lo { lo - a } else if a > hi { a - hi } else { 0.0 };
    let bits = (0..grid.len())
        .map(|k| {
            let (ix, iy) = grid.coords(k);
            let c = grid.corner(ix, iy);
            dist(c[0], c[0] + eps) + dist(c[1], c[1] + eps) < a
        })
        .collect();
    Ok(Image { grid, bits })
}

pub fn digitization_experiment(s: FractionalOrder, eps_list: &[f64], tol: f64, exec: Exec) -> Result<DigitizationTable> {
    if eps_list.len() < 2 {
        return Err(Error::InvalidParameter("need at least two values of ε".into()));
    }
    let per_s_exact = per_s_boundary_integral(&rotated_square(), s, tol, exec)?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let img = digitized_rotated_square(eps)?;
        let b = img.grid.bounds();
        let classical = classical_perimeter(&img, &Window::Rect { min: [b[0], b[1]], max: [b[2], b[3]] })?;
        let kernel = PlaneKernel::for_image(&img, s, tol, exec)?;
        let per_s_digitized = whole_plane_perimeter(&img, &kernel, exec);
        rows.push(DigitizationRow {
            eps,
            cells: img.count(),
            classical,
            per_s_digitized,
            per_s_exact,
            error: (per_s_digitized - per_s_exact).abs(),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error.ln()).collect();
    Ok(DigitizationTable { s: s.get(), exact_perimeter: 4.0, staircase_perimeter: 4.0 * SQRT_2, rows, slope: slope(&xs, &ys) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_has_length_four_root_two() {
        for k in 3..8 {
            let eps = 0.5f64.powi(k);
            let img = digitized_rotated_square(eps).unwrap();
            let b = img.grid.bounds();
            let per = classical_perimeter(&img, &Window::Rect { min: [b[0], b[1]], max: [b[2], b[3]] }).unwrap();
            // The digitization is row and column convex: the staircase
            // length is twice the sum of its extents.
            let side = (2.0 * FRAC_1_SQRT_2 / eps).ceil() * eps;
            assert!((per - 4.0 * side).abs() < 1e-12, "ε={eps}");
            assert!((per / (4.0 * SQRT_2) - 1.0).abs() < 0.02 || k == 3, "ε={eps}: {per}");
        }
        assert!(digitized_rotated_square(0.2).is_err());
    }

    #[test]
    fn digitization_covers_the_square() {
        let eps = 1.0 / 32.0;
        let img = digitized_rotated_square(eps).unwrap();
        // Every cell meeting the square is in, so the digitized area exceeds 1
        // by at most one boundary layer.
        assert!(img.area() > 1.0 && img.area() < 1.0 + 4.0 * SQRT_2 * eps);
        let centered = Image::from_fn(img.grid.clone(), |p| rotated_square().contains(p));
        assert!(centered.bits.iter().zip(&img.bits).all(|(c, d)| !c || *d));
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// A lattice of closed squares of side `h`; the nominal window is
/// `[origin, origin + (nx h, ny h)]`. Cells outside the window are addressed
/// by the same integer lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(origin: Point, h: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec { origin, h, nx, ny };
        g.validate()?;
        Ok(g)
    }

    /// Square window of `n × n` cells centred at `center`.
    pub fn centered(center: Point, h: f64, n: usize) -> Result<Self> {
        let half = n as f64 * h / 2.0;
        GridSpec::new([center[0] - half, center[1] - half], h, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidGrid(format!("cell side {} must be positive", self.h)));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if !(self.origin[0].is_finite() && self.origin[1].is_finite()) {
            return Err(Error::InvalidGrid("non-finite origin".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, ix: i64, iy: i64) -> Point {
        [
            self.origin[0] + (ix as f64 + 0.5) * self.h,
            self.origin[1] + (iy as f64 + 0.5) * self.h,
        ]
    }

    /// Lower-left corner of a cell.
    pub fn corner(&self, ix: i64, iy: i64) -> Point {
        [self.origin[0] + ix as f64 * self.h, self.origin[1] + iy as f64 * self.h]
    }

    /// Lattice cell containing `p` (half-open cells).
    pub fn cell_of(&self, p: Point) -> (i64, i64) {
        (
            ((p[0] - self.origin[0]) / self.h).floor() as i64,
            ((p[1] - self.origin[1]) / self.h).floor() as i64,
        )
    }

    pub fn in_window(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < self.nx && (iy as usize) < self.ny
    }

    /// Row-major index within the window.
    pub fn index(&self, ix: i64, iy: i64) -> Option<usize> {
        self.in_window(ix, iy).then(|| iy as usize * self.nx + ix as usize)
    }

    pub fn coords(&self, idx: usize) -> (i64, i64) {
        ((idx % self.nx) as i64, (idx / self.nx) as i64)
    }

    /// `[xmin, ymin, xmax, ymax]` of the window.
    pub fn bounds(&self) -> [f64; 4] {
        [
            self.origin[0],
            self.origin[1],
            self.origin[0] + self.nx as f64 * self.h,
            self.origin[1] + self.ny as f64 * self.h,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new([0.0, 0.0], 0.0, 4, 4).is_err());
        assert!(GridSpec::new([0.0, 0.0], 1.0, 0, 4).is_err());
        assert!(GridSpec::new([f64::NAN, 0.0], 1.0, 4, 4).is_err());
    }

    proptest! {
        #[test]
        fn index_center_bijection(nx in 1usize..40, ny in 1usize..40, h in 0.01f64..3.0, ox in -5.0f64..5.0, oy in -5.0f64..5.0) {
            let g = GridSpec::new([ox, oy], h, nx, ny).unwrap();
            for idx in 0..g.len() {
                let (ix, iy) = g.coords(idx);
                let c = g.center(ix, iy);
                prop_assert_eq!(g.cell_of(c), (ix, iy));
                prop_assert_eq!(g.index(ix, iy), Some(idx));
            }
        }
    }
}

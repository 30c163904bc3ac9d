use serde::{Deserialize, Serialize};

use crate::domain::Image;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Closed measurement window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Window {
    Disk { center: Point, radius: f64 },
    Rect { min: Point, max: Point },
}

impl Window {
    pub fn unit_ball() -> Self {
        Window::Disk { center: [0.0, 0.0], radius: 1.0 }
    }

    pub fn ball(radius: f64) -> Self {
        Window::Disk { center: [0.0, 0.0], radius }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Window::Disk { center, radius } => (p[0] - center[0]).hypot(p[1] - center[1]) <= radius,
            Window::Rect { min, max } => p[0] >= min[0] && p[0] <= max[0] && p[1] >= min[1] && p[1] <= max[1],
        }
    }

    /// `[xmin, ymin, xmax, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        match *self {
            Window::Disk { center, radius } => [center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius],
            Window::Rect { min, max } => [min[0], min[1], max[0], max[1]],
        }
    }

    pub fn diameter(&self) -> f64 {
        let b = self.bbox();
        match self {
            Window::Disk { radius, .. } => 2.0 * radius,
            Window::Rect { .. } => (b[2] - b[0]).hypot(b[3] - b[1]),
        }
    }

    fn validate(&self) -> Result<()> {
        let b = self.bbox();
        if !(b.iter().all(|v| v.is_finite()) && b[2] > b[0] && b[3] > b[1]) {
            return Err(Error::InvalidParameter(format!("degenerate window {self:?}")));
        }
        Ok(())
    }

    /// Checks the window against the grid and returns the inclusive lattice
    /// range `[ix0, iy0, ix1, iy1]` of cells that can matter, padded by `pad`.
    pub(crate) fn lattice_range(&self, img: &Image, pad: i64) -> Result<[i64; 4]> {
        self.validate()?;
        let g = &img.grid;
        let b = self.bbox();
        let gb = g.bounds();
        let slack = 1e-9 * g.h;
        if b[0] < gb[0] - slack || b[1] < gb[1] - slack || b[2] > gb[2] + slack || b[3] > gb[3] + slack {
            return Err(Error::InvalidParameter(format!("window {b:?} is not inside the grid {gb:?}")));
        }
        let (x0, y0) = g.cell_of([b[0], b[1]]);
        let (x1, y1) = g.cell_of([b[2], b[3]]);
        Ok([x0 - pad - 1, y0 - pad - 1, x1 + pad + 1, y1 + pad + 1])
    }
}

/// Length of the cell edges that separate occupied from empty cells, over
/// edges whose midpoint lies in `window`. Cells outside the grid are empty.
pub fn classical_perimeter(img: &Image, window: &Window) -> Result<f64> {
    let r = window.lattice_range(img, 0)?;
    let g = &img.grid;
    let mut edges = 0usize;
    for iy in r[1]..=r[3] {
        for ix in r[0]..=r[2] {
            let here = img.get(ix, iy);
            let c = g.corner(ix, iy);
            if here != img.get(ix + 1, iy) && window.contains([c[0] + g.h, c[1] + 0.5 * g.h]) {
                edges += 1;
            }
            if here != img.get(ix, iy + 1) && window.contains([c[0] + 0.5 * g.h, c[1] + g.h]) {
                edges += 1;
            }
        }
    }
    Ok(edges as f64 * g.h)
}

use serde::{Deserialize, Serialize};

use super::datum::ExteriorDatum;
use super::grid::GridSpec;
use super::image::Image;
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, Point};

/// The free region Ω. A cell is free iff its center lies in Ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum OmegaDesc {
    Disk { center: Point, radius: f64 },
    Rect { min: Point, max: Point },
    /// Explicit window indices `[ix, iy]`.
    Cells { cells: Vec<[i64; 2]> },
}

impl OmegaDesc {
    fn bbox(&self, grid: &GridSpec) -> [f64; 4] {
        match self {
            OmegaDesc::Disk { center, radius } => {
                [center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius]
            }
            OmegaDesc::Rect { min, max } => [min[0], min[1], max[0], max[1]],
            OmegaDesc::Cells { cells } => {
                let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
                for c in cells {
                    let lo = grid.corner(c[0], c[1]);
                    b[0] = b[0].min(lo[0]);
                    b[1] = b[1].min(lo[1]);
                    b[2] = b[2].max(lo[0] + grid.h);
                    b[3] = b[3].max(lo[1] + grid.h);
                }
                b
            }
        }
    }

    fn center(&self, grid: &GridSpec) -> Point {
        match self {
            OmegaDesc::Disk { center, .. } => *center,
            _ => {
                let b = self.bbox(grid);
                [0.5 * (b[0] + b[2]), 0.5 * (b[1] + b[3])]
            }
        }
    }

    fn circumradius(&self, grid: &GridSpec) -> f64 {
        match self {
            OmegaDesc::Disk { radius, .. } => *radius,
            _ => {
                let b = self.bbox(grid);
                0.5 * (b[2] - b[0]).hypot(b[3] - b[1])
            }
        }
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidProblem(m.into()));
        match self {
            OmegaDesc::Disk { radius, center } => {
                if !(*radius > 0.0 && radius.is_finite() && center.iter().all(|v| v.is_finite())) {
                    return bad("omega disk radius must be positive");
                }
            }
            OmegaDesc::Rect { min, max } => {
                if !(max[0] > min[0] && max[1] > min[1]) {
                    return bad("omega rectangle is empty");
                }
            }
            OmegaDesc::Cells { cells } => {
                if cells.is_empty() {
                    return bad("omega cell list is empty");
                }
                if cells.iter().any(|c| !grid.in_window(c[0], c[1])) {
                    return bad("omega cell outside the grid");
                }
            }
        }
        Ok(())
    }
}

/// Serializable description of a problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub grid: GridSpec,
    pub omega: OmegaDesc,
    pub exterior: ExteriorDatum,
    pub r_ext: f64,
}

const FIXED_OUT: u8 = 0;
const FIXED_IN: u8 = 1;
const FREE: u8 = 2;

/// Grid geometry, free cells and fixed exterior occupancy.
///
/// The universe is the square of half-side `r_ext` about Ω's center, snapped
/// to whole cells; it contains the disk of radius `r_ext`. Cells in the
/// universe are free or fixed; everything beyond is handled by the far-field
/// terms of the interaction model.
#[derive(Clone, Debug)]
pub struct PixelProblem {
    pub grid: GridSpec,
    pub omega: OmegaDesc,
    pub exterior: ExteriorDatum,
    pub r_ext: f64,
    /// Lattice coordinates of the free cells, row-major.
    pub free: Vec<(i64, i64)>,
    /// Inclusive lattice range `[ix0, iy0, ix1, iy1]` of the universe.
    pub universe: [i64; 4],
    state: Vec<u8>,
}

pub fn make_problem(grid: GridSpec, omega: OmegaDesc, exterior: ExteriorDatum, r_ext: f64) -> Result<PixelProblem> {
    grid.validate()?;
    exterior.validate()?;
    omega.validate(&grid)?;
    let h = grid.h;
    let gb = grid.bounds();
    let ob = omega.bbox(&grid);
    let slack = 1e-9 * h;
    if ob[0] < gb[0] - slack || ob[1] < gb[1] - slack || ob[2] > gb[2] + slack || ob[3] > gb[3] + slack {
        return Err(Error::InvalidProblem("omega is not contained in the grid".into()));
    }
    let c = omega.center(&grid);
    let rho = omega.circumradius(&grid);
    if !(r_ext.is_finite() && r_ext >= rho + h * (1.0 - 1e-9)) {
        return Err(Error::InvalidProblem(format!(
            "R_ext = {r_ext} is below the extent of omega plus one cell ({})",
            rho + h
        )));
    }
    let lo = |ci: f64, oi: f64| ((ci - r_ext - oi) / h - 0.5).ceil() as i64;
    let hi = |ci: f64, oi: f64| ((ci + r_ext - oi) / h - 0.5).floor() as i64;
    let universe = [lo(c[0], grid.origin[0]), lo(c[1], grid.origin[1]), hi(c[0], grid.origin[0]), hi(c[1], grid.origin[1])];
    let ux = (universe[2] - universe[0] + 1) as usize;
    let uy = (universe[3] - universe[1] + 1) as usize;

    if let Some(e) = exterior.bounded_extent() {
        let bx0 = grid.corner(universe[0], universe[1]);
        let bx1 = grid.corner(universe[2] + 1, universe[3] + 1);
        if e[0] < bx0[0] - slack || e[1] < bx0[1] - slack || e[2] > bx1[0] + slack || e[3] > bx1[1] + slack {
            return Err(Error::InvalidProblem("explicit exterior mask extends beyond R_ext".into()));
        }
    }

    let explicit: Option<std::collections::BTreeSet<(i64, i64)>> = match &omega {
        OmegaDesc::Cells { cells } => Some(cells.iter().map(|c| (c[0], c[1])).collect()),
        _ => None,
    };
    let is_free = |ix: i64, iy: i64| -> bool {
        if !grid.in_window(ix, iy) {
            return false;
        }
        let p = grid.center(ix, iy);
        match &omega {
            OmegaDesc::Disk { center, radius } => norm(sub(p, *center)) < *radius,
            OmegaDesc::Rect { min, max } => p[0] > min[0] && p[0] < max[0] && p[1] > min[1] && p[1] < max[1],
            OmegaDesc::Cells { .. } => explicit.as_ref().is_some_and(|s| s.contains(&(ix, iy))),
        }
    };

    let mut state = vec![FIXED_OUT; ux * uy];
    let mut free = Vec::new();
    for jy in 0..uy {
        let iy = universe[1] + jy as i64;
        for jx in 0..ux {
            let ix = universe[0] + jx as i64;
            state[jy * ux + jx] = if is_free(ix, iy) {
                free.push((ix, iy));
                FREE
            } else if exterior.membership(grid.center(ix, iy)) {
                FIXED_IN
            } else {
                FIXED_OUT
            };
        }
    }
    if free.is_empty() {
        return Err(Error::InvalidProblem("omega contains no cell centers".into()));
    }
    Ok(PixelProblem { grid, omega, exterior, r_ext, free, universe, state })
}

impl PixelProblem {
    pub fn from_spec(spec: ProblemSpec) -> Result<Self> {
        make_problem(spec.grid, spec.omega, spec.exterior, spec.r_ext)
    }

    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec {
            grid: self.grid.clone(),
            omega: self.omega.clone(),
            exterior: self.exterior.clone(),
            r_ext: self.r_ext,
        }
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    pub fn universe_dims(&self) -> (usize, usize) {
        (
            (self.universe[2] - self.universe[0] + 1) as usize,
            (self.universe[3] - self.universe[1] + 1) as usize,
        )
    }

    /// Universe rectangle `[xmin, ymin, xmax, ymax]`.
    pub fn universe_box(&self) -> [f64; 4] {
        let a = self.grid.corner(self.universe[0], self.universe[1]);
        let b = self.grid.corner(self.universe[2] + 1, self.universe[3] + 1);
        [a[0], a[1], b[0], b[1]]
    }

    fn state_at(&self, ix: i64, iy: i64) -> Option<u8> {
        let (ux, _) = self.universe_dims();
        if ix < self.universe[0] || ix > self.universe[2] || iy < self.universe[1] || iy > self.universe[3] {
            return None;
        }
        Some(self.state[(iy - self.universe[1]) as usize * ux + (ix - self.universe[0]) as usize])
    }

    pub fn is_free(&self, ix: i64, iy: i64) -> bool {
        self.state_at(ix, iy) == Some(FREE)
    }

    /// Occupancy of a fixed universe cell; `None` for free cells and cells
    /// beyond the universe.
    pub fn fixed(&self, ix: i64, iy: i64) -> Option<bool> {
        match self.state_at(ix, iy)? {
            FREE => None,
            v => Some(v == FIXED_IN),
        }
    }

    /// Maximal runs `(ix_start, ix_end_inclusive)` of fixed cells with the
    /// given occupancy in universe row `iy`.
    pub fn fixed_runs(&self, iy: i64, occupied: bool) -> Vec<(i64, i64)> {
        let want = if occupied { FIXED_IN } else { FIXED_OUT };
        let (ux, _) = self.universe_dims();
        let row = &self.state[(iy - self.universe[1]) as usize * ux..][..ux];
        let mut runs = Vec::new();
        let mut start = None;
        for (j, &v) in row.iter().enumerate() {
            match (v == want, start) {
                (true, None) => start = Some(j),
                (false, Some(s0)) => {
                    runs.push((self.universe[0] + s0 as i64, self.universe[0] + j as i64 - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s0) = start {
            runs.push((self.universe[0] + s0 as i64, self.universe[0] + ux as i64 - 1));
        }
        runs
    }

    /// Index of a free cell.
    pub fn free_index(&self, ix: i64, iy: i64) -> Option<usize> {
        self.free.binary_search_by(|&(x, y)| (y, x).cmp(&(iy, ix))).ok()
    }

    pub fn check_mask(&self, mask: &Mask) -> Result<()> {
        if mask.len() != self.num_free() {
            return Err(Error::MaskLength { expected: self.num_free(), got: mask.len() });
        }
        Ok(())
    }

    /// Full occupancy on the grid window: free cells from the mask, all others
    /// from the datum.
    pub fn image(&self, mask: &Mask) -> Result<Image> {
        self.check_mask(mask)?;
        let g = &self.grid;
        let mut bits = vec![false; g.len()];
        for (idx, b) in bits.iter_mut().enumerate() {
            let (ix, iy) = g.coords(idx);
            *b = match self.free_index(ix, iy) {
                Some(k) => mask.get(k),
                None => self.exterior.membership(g.center(ix, iy)),
            };
        }
        Ok(Image { grid: g.clone(), bits })
    }

    /// Mask of free cells whose centers lie in the datum.
    pub fn datum_mask(&self) -> Mask {
        Mask::from_bools(self.free.iter().map(|&(ix, iy)| self.exterior.membership(self.grid.center(ix, iy))).collect())
    }
}

/// Occupancy of the free cells, in the order of [`PixelProblem::free`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mask(Vec<bool>);

impl Mask {
    pub fn empty(n: usize) -> Self {
        Mask(vec![false; n])
    }

    pub fn full(n: usize) -> Self {
        Mask(vec![true; n])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Mask(bits)
    }

    /// Bit `i` of `code` gives cell `i`.
    pub fn from_code(n: usize, code: u64) -> Self {
        Mask((0..n).map(|i| code >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        Mask(self.0.iter().map(|b| !b).collect())
    }
}

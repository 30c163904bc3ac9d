//! Boundary-stickiness experiments.
//!
//! `grid` is the number of cells across Ω's width, which is 2 for every
//! scenario, so `h = 2 / grid`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use super::{minimize_model, MinimizeOptions, MinimizerResult};
use crate::domain::{make_problem, ExteriorDatum, FractionalOrder, GridSpec, Image, Mask, OmegaDesc, PixelProblem};
use crate::error::{Error, Result};
use crate::interaction::{frac_perimeter, Energy, InteractionModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    RingCap { delta: f64 },
    Sector,
    #[serde(rename = "oscillating_jm")]
    OscillatingJM { m: f64 },
    PerturbedHalfplane { delta: f64 },
}

/// Half-height of the truncated strip beyond the oscillation height.
pub const STRIP_MARGIN: f64 = 4.0;
/// Half-height of the strip for the perturbed halfplane.
pub const PERTURBED_HALF_HEIGHT: f64 = 4.0;

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::RingCap { .. } => "ring_cap",
            Scenario::Sector => "sector",
            Scenario::OscillatingJM { .. } => "oscillating_jm",
            Scenario::PerturbedHalfplane { .. } => "perturbed_halfplane",
        }
    }

    /// Builds the pixel problem, refusing resolutions that cannot see the
    /// feature the scenario measures.
    pub fn problem(&self, grid: usize, s: FractionalOrder) -> Result<PixelProblem> {
        if grid < 4 {
            return Err(Error::Resolution(format!("{grid} cells across the free region; need at least 4")));
        }
        let h = 2.0 / grid as f64;
        let disk = OmegaDesc::Disk { center: [0.0, 0.0], radius: 1.0 };
        match *self {
            Scenario::RingCap { delta } => {
                let datum = ExteriorDatum::RingCap { delta };
                datum.validate()?;
                let r_ext = (1.0 + delta).clamp(1.0 + 2.0 * h, 3.0) + h;
                let p = make_problem(GridSpec::centered([0.0, 0.0], h, grid)?, disk, datum, r_ext)?;
                // Digitized cap area against the exact one, over the part
                // inside the universe.
                let (ux, uy) = p.universe_dims();
                let mut cells = 0usize;
                for jy in 0..uy as i64 {
                    for jx in 0..ux as i64 {
                        let (ix, iy) = (p.universe[0] + jx, p.universe[1] + jy);
                        let c = p.grid.center(ix, iy);
                        if p.fixed(ix, iy) == Some(true) && c[0].hypot(c[1]) < 1.0 + delta {
                            cells += 1;
                        }
                    }
                }
                let reach = (1.0 + delta).min(p.universe_box()[2]);
                let exact = 0.5 * PI * (reach * reach - 1.0);
                let digitized = cells as f64 * h * h;
                if (digitized - exact).abs() > 0.5 * exact {
                    return Err(Error::Resolution(format!(
                        "cell side {h} cannot resolve the cap of width {delta} (area {digitized:.4} vs {exact:.4})"
                    )));
                }
                Ok(p)
            }
            Scenario::Sector => {
                if grid < 8 {
                    return Err(Error::Resolution("sector needs at least 8 cells across".into()));
                }
                make_problem(GridSpec::centered([0.0, 0.0], h, grid)?, disk, ExteriorDatum::Sector, 2.0)
            }
            Scenario::OscillatingJM { m } => {
                ExteriorDatum::OscillatingJM { m }.validate()?;
                let scale = m.powf(band_exponent(s));
                if h > scale / 8.0 {
                    return Err(Error::Resolution(format!(
                        "cell side {h} cannot resolve the band scale M^((1+2s)/(2+2s)) = {scale:.3}"
                    )));
                }
                let y = (m + STRIP_MARGIN).ceil();
                strip_problem(grid, y, oscillation_datum(m, y))
            }
            Scenario::PerturbedHalfplane { delta } => {
                if h > delta {
                    return Err(Error::Resolution(format!("cell side {h} exceeds the pad height {delta}")));
                }
                let datum = ExteriorDatum::PerturbedHalfplane { delta, scale: 1.0 };
                datum.validate()?;
                strip_problem(grid, PERTURBED_HALF_HEIGHT, datum)
            }
        }
    }
}

/// `(1 + 2s) / (2 + 2s)`.
pub fn band_exponent(s: FractionalOrder) -> f64 {
    let s = s.get();
    (1.0 + 2.0 * s) / (2.0 + 2.0 * s)
}

/// `J_M` plus the strip below the truncation, where both sides of the datum
/// are full.
pub fn oscillation_datum(m: f64, y: f64) -> ExteriorDatum {
    let cap = ExteriorDatum::Intersection {
        parts: vec![
            ExteriorDatum::Halfplane { angle: 0.0, offset: 1.0 },
            ExteriorDatum::Halfplane { angle: PI, offset: 1.0 },
            ExteriorDatum::Halfplane { angle: FRAC_PI_2, offset: -y },
        ],
    };
    ExteriorDatum::Union { parts: vec![ExteriorDatum::OscillatingJM { m }, cap] }
}

fn strip_problem(grid: usize, y: f64, datum: ExteriorDatum) -> Result<PixelProblem> {
    let h = 2.0 / grid as f64;
    let ny = (2.0 * y / h).round() as usize;
    let g = GridSpec::new([-1.0, -y], h, grid, ny)?;
    let omega = OmegaDesc::Rect { min: [-1.0, -y], max: [1.0, y] };
    make_problem(g, omega, datum, 1f64.hypot(y) + h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measurement {
    RingCap {
        occupied_free_cells: usize,
        /// Energy of the empty mask.
        empty_energy: f64,
        /// Energy of the lower half of the disk.
        half_disk_energy: f64,
    },
    Sector {
        /// `|E ∩ B_1|`; zero when the set sticks to the datum.
        occupied_area: f64,
        /// `|(E Δ Q) ∩ B_1|` with `Q` the open first quadrant.
        quadrant_symdiff_area: f64,
    },
    OscillatingJM {
        /// Lowest height above which every row up to `M` is outside `E`.
        y_plus: f64,
        /// Highest depth below which every row down to `−M` is inside `E`.
        y_minus: f64,
        bands_detected: bool,
        /// Extent of the complement run down the right wall from `M`.
        wall_plus: f64,
        /// Extent of the set run up the left wall from `−M`.
        wall_minus: f64,
    },
    PerturbedHalfplane {
        /// Height of the full rows of `E` starting at `y = 0`.
        fill_height: f64,
        left_wall_height: f64,
        right_wall_height: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StickinessReport {
    pub scenario: Scenario,
    pub s: f64,
    pub grid: usize,
    pub h: f64,
    pub free_cells: usize,
    pub energy: Energy,
    pub measurement: Measurement,
    #[serde(skip)]
    pub result: Option<MinimizerResult>,
    #[serde(skip)]
    pub image: Option<Image>,
}

pub fn experiment_stickiness(
    scenario: &Scenario,
    grid: usize,
    s: FractionalOrder,
    opts: &MinimizeOptions,
) -> Result<StickinessReport> {
    let p = scenario.problem(grid, s)?;
    let model = InteractionModel::assemble(&p, s, &opts.model)?;
    let result = minimize_model(&model, opts)?;
    let image = p.image(&result.mask)?;
    let h = p.grid.h;
    let measurement = match *scenario {
        Scenario::RingCap { .. } => {
            let n = p.num_free();
            let half = Mask::from_bools(p.free.iter().map(|&(ix, iy)| p.grid.center(ix, iy)[1] < 0.0).collect());
            Measurement::RingCap {
                occupied_free_cells: result.mask.count(),
                empty_energy: frac_perimeter(&model, &Mask::empty(n))?.total,
                half_disk_energy: frac_perimeter(&model, &half)?.total,
            }
        }
        Scenario::Sector => {
            let mut sym = 0usize;
            for (k, &(ix, iy)) in p.free.iter().enumerate() {
                let c = p.grid.center(ix, iy);
                if result.mask.get(k) != (c[0] > 0.0 && c[1] > 0.0) {
                    sym += 1;
                }
            }
            Measurement::Sector { occupied_area: result.mask.count() as f64 * h * h, quadrant_symdiff_area: sym as f64 * h * h }
        }
        Scenario::OscillatingJM { m } => {
            let rows = RowView::new(&image);
            let (y_plus, y_minus) = (rows.band_from_top(m, false), rows.band_from_bottom(-m, true));
            Measurement::OscillatingJM {
                y_plus,
                y_minus,
                bands_detected: y_plus < m && y_minus > -m,
                wall_plus: m - rows.wall_run_down(image.grid.nx - 1, m, false),
                wall_minus: rows.wall_run_up(0, -m, true),
            }
        }
        Scenario::PerturbedHalfplane { .. } => {
            let rows = RowView::new(&image);
            Measurement::PerturbedHalfplane {
                fill_height: rows.fill_up(0.0),
                left_wall_height: rows.wall_run_up(0, 0.0, true),
                right_wall_height: rows.wall_run_up(image.grid.nx - 1, 0.0, true),
            }
        }
    };
    Ok(StickinessReport {
        scenario: scenario.clone(),
        s: s.get(),
        grid,
        h,
        free_cells: p.num_free(),
        energy: result.energy,
        measurement,
        result: Some(result),
        image: Some(image),
    })
}

/// Row queries on a strip image whose window is exactly Ω.
struct RowView<'a> {
    img: &'a Image,
}

impl<'a> RowView<'a> {
    fn new(img: &'a Image) -> Self {
        RowView { img }
    }

    fn row_center(&self, iy: usize) -> f64 {
        self.img.grid.center(0, iy as i64)[1]
    }

    fn row_is(&self, iy: usize, value: bool) -> bool {
        (0..self.img.grid.nx).all(|ix| self.img.get(ix as i64, iy as i64) == value)
    }

    /// Bottom edge of the longest run of rows equal to `value`, going down
    /// from the last row below `top`. Returns `top` when there is none.
    fn band_from_top(&self, top: f64, value: bool) -> f64 {
        let h = self.img.grid.h;
        let mut edge = top;
        for iy in (0..self.img.grid.ny).rev() {
            let c = self.row_center(iy);
            if c >= top {
                continue;
            }
            if !self.row_is(iy, value) {
                break;
            }
            edge = c - 0.5 * h;
        }
        edge
    }

    fn band_from_bottom(&self, bottom: f64, value: bool) -> f64 {
        let h = self.img.grid.h;
        let mut edge = bottom;
        for iy in 0..self.img.grid.ny {
            let c = self.row_center(iy);
            if c <= bottom {
                continue;
            }
            if !self.row_is(iy, value) {
                break;
            }
            edge = c + 0.5 * h;
        }
        edge
    }

    /// Top edge of the run of full rows of the set starting at `y0`.
    fn fill_up(&self, y0: f64) -> f64 {
        let rel = self.band_from_bottom(y0, true);
        rel - y0
    }

    /// Lowest y reached by the run of `value` cells in column `ix` going
    /// down from `top`.
    fn wall_run_down(&self, ix: usize, top: f64, value: bool) -> f64 {
        let h = self.img.grid.h;
        let mut edge = top;
        for iy in (0..self.img.grid.ny).rev() {
            let c = self.row_center(iy);
            if c >= top {
                continue;
            }
            if self.img.get(ix as i64, iy as i64) != value {
                break;
            }
            edge = c - 0.5 * h;
        }
        edge
    }

    /// Length of the run of `value` cells in column `ix` going up from `y0`.
    fn wall_run_up(&self, ix: usize, y0: f64, value: bool) -> f64 {
        let h = self.img.grid.h;
        let mut edge = y0;
        for iy in 0..self.img.grid.ny {
            let c = self.row_center(iy);
            if c <= y0 {
                continue;
            }
            if self.img.get(ix as i64, iy as i64) != value {
                break;
            }
            edge = c + 0.5 * h;
        }
        edge - y0
    }
}

/// Band onsets across oscillation heights with a log–log fit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OscillationSweep {
    pub s: f64,
    pub grid: usize,
    pub m: Vec<f64>,
    /// Mean of `y_plus` and `−y_minus` per height.
    pub onset: Vec<f64>,
    pub bands_detected: Vec<bool>,
    pub exponent: f64,
    pub expected_exponent: f64,
    #[serde(skip)]
    pub reports: Vec<StickinessReport>,
}

pub fn oscillation_sweep(ms: &[f64], grid: usize, s: FractionalOrder, opts: &MinimizeOptions) -> Result<OscillationSweep> {
    if ms.len() < 2 {
        return Err(Error::InvalidParameter("the fit needs at least two heights".into()));
    }
    let mut onset = Vec::new();
    let mut detected = Vec::new();
    let mut reports = Vec::new();
    for &m in ms {
        let r = experiment_stickiness(&Scenario::OscillatingJM { m }, grid, s, opts)?;
        let Measurement::OscillatingJM { y_plus, y_minus, bands_detected, .. } = r.measurement else {
            unreachable!()
        };
        onset.push(0.5 * (y_plus - y_minus));
        detected.push(bands_detected);
        reports.push(r);
    }
    let xs: Vec<f64> = ms.iter().map(|m| m.ln()).collect();
    let ys: Vec<f64> = onset.iter().map(|y| y.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(OscillationSweep {
        s: s.get(),
        grid,
        m: ms.to_vec(),
        onset,
        bands_detected: detected,
        exponent: slope(&xs, &ys),
        expected_exponent: band_exponent(s),
        reports,
    })
}

/// Least-squares slope.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    #[test]
    fn refuses_coarse_resolutions() {
        assert!(matches!(Scenario::RingCap { delta: 0.001 }.problem(16, s(0.25)), Err(Error::Resolution(_))));
        assert!(matches!(Scenario::OscillatingJM { m: 8.0 }.problem(4, s(0.25)), Err(Error::Resolution(_))));
        assert!(matches!(Scenario::PerturbedHalfplane { delta: 0.1 }.problem(8, s(0.25)), Err(Error::Resolution(_))));
        assert!(Scenario::Sector.problem(2, s(0.25)).is_err());
    }

    #[test]
    fn strip_cap_follows_the_datum() {
        let p = Scenario::OscillatingJM { m: 4.0 }.problem(8, s(0.25)).unwrap();
        let y = 4.0 + STRIP_MARGIN;
        assert_eq!(p.num_free(), 8 * (2.0 * y / 0.25) as usize);
        let below = p.grid.cell_of([0.1, -y - 0.1]);
        let above = p.grid.cell_of([0.1, y + 0.1]);
        assert_eq!(p.fixed(below.0, below.1), Some(true));
        assert_eq!(p.fixed(above.0, above.1), Some(false));
    }

    #[test]
    fn row_queries() {
        let g = GridSpec::new([-1.0, -2.0], 0.5, 4, 8).unwrap();
        // Set below y = 0.5 except a notch in the right column at [0, 0.5).
        let img = Image::from_fn(g, |p| p[1] < 0.5 && !(p[0] > 0.5 && p[1] > 0.0));
        let r = RowView::new(&img);
        assert_eq!(r.fill_up(-2.0), 2.0);
        assert_eq!(r.wall_run_up(0, 0.0, true), 0.5);
        assert_eq!(r.wall_run_up(3, 0.0, true), 0.0);
        assert_eq!(r.band_from_top(2.0, false), 0.5);
        assert_eq!(r.band_from_bottom(-2.0, true), 0.0);
        assert_eq!(r.wall_run_down(3, 2.0, false), 0.0);
    }

    #[test]
    fn fit_recovers_power() {
        let xs: Vec<f64> = [8.0f64, 16.0, 32.0].iter().map(|m| m.ln()).collect();
        let ys: Vec<f64> = [8.0f64, 16.0, 32.0].iter().map(|m| (2.0 * m.powf(0.6)).ln()).collect();
        assert!((slope(&xs, &ys) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn small_ring_cap_sticks() {
        let r = experiment_stickiness(&Scenario::RingCap { delta: 0.05 }, 24, s(0.25), &MinimizeOptions::default()).unwrap();
        let Measurement::RingCap { occupied_free_cells, empty_energy, half_disk_energy } = r.measurement else { panic!() };
        assert_eq!(occupied_free_cells, 0);
        assert!((empty_energy - r.energy.total).abs() <= 1e-12 * empty_energy);
        assert!(half_disk_energy > empty_energy);
    }
}

use serde::{Deserialize, Serialize};

use super::crossing::{balanced_direction, crossing_profile, line_cells, Direction};
use super::perimeter::Window;
use crate::domain::Image;
use crate::error::Result;

/// A halfplane `{x · (cos angle, sin angle) < offset}` close to the set in
/// the window, with the crossing data that certify it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessCertificate {
    pub angle: f64,
    pub offset: f64,
    /// Area of the cells with centers in the window on which the set and
    /// the halfplane disagree.
    pub symdiff_area: f64,
    /// `max{Φ₊(e₁), Φ₋(e₁), Φ₋(e₂)}` in the balanced frame.
    pub mu: f64,
    /// `e₁`, with `Φ₊(e₁) = Φ₋(e₁)` as nearly as the sweep allows.
    pub e1: Direction,
    /// `e₂ ⟂ e₁`, oriented so that `Φ₋(e₂) ≤ Φ₊(e₂)`.
    pub e2: Direction,
    pub phi_plus_e1: f64,
    pub phi_minus_e1: f64,
    pub phi_minus_e2: f64,
}

/// Lines along `e₁` that lie entirely in the set or entirely outside are
/// separated by a line parallel to `e₁`; the threshold minimizes the
/// length of lines on the wrong side.
pub fn flatness_certificate(img: &Image, window: &Window) -> Result<FlatnessCertificate> {
    let e1 = balanced_direction(img, window)?.direction;
    let along = crossing_profile(img, e1, window)?;
    let mut e2 = e1.perp();
    let mut across = crossing_profile(img, e2, window)?;
    if across.phi_minus > across.phi_plus {
        e2 = e2.reversed();
        across = crossing_profile(img, e2, window)?;
    }
    let mu = along.phi_plus.max(along.phi_minus).max(across.phi_minus);

    // Offsets are measured along e1.perp(); flip them to measure along e2.
    let sign = if e2 == e1.perp() { 1.0 } else { -1.0 };
    let mut full = Vec::new();
    for (offset, cells) in line_cells(img, e1, window)? {
        let inside = cells.iter().filter(|&&c| c).count();
        if inside == cells.len() {
            full.push((sign * offset, true, cells.len()));
        } else if inside == 0 {
            full.push((sign * offset, false, cells.len()));
        }
    }
    full.sort_by(|a, b| a.0.total_cmp(&b.0));

    let spacing = along.spacing;
    let mut cuts = Vec::with_capacity(full.len() + 1);
    match (full.first(), full.last()) {
        (Some(a), Some(b)) => {
            cuts.push(a.0 - spacing);
            cuts.extend(full.windows(2).map(|w| 0.5 * (w[0].0 + w[1].0)));
            cuts.push(b.0 + spacing);
        }
        _ => cuts.push(0.0),
    }
    // `above = true`: the set is expected on the side x·e₂ > t, where the
    // vertical lines mostly enter it.
    let cost = |t: f64, above: bool| -> usize {
        full.iter().filter(|&&(o, in_e, _)| if in_e == above { o < t } else { o > t }).map(|l| l.2).sum()
    };
    let mut best = (usize::MAX, 0.0, true);
    for above in [true, false] {
        for &t in &cuts {
            let c = cost(t, above);
            if c < best.0 {
                best = (c, t, above);
            }
        }
    }
    let (_, t, above) = best;
    let u = e2.unit();
    let (normal, offset) = if above { ([-u[0], -u[1]], -t) } else { (u, t) };

    let g = &img.grid;
    let r = window.lattice_range(img, 0)?;
    let mut wrong = 0usize;
    for iy in r[1]..=r[3] {
        for ix in r[0]..=r[2] {
            let c = g.center(ix, iy);
            if window.contains(c) && img.get(ix, iy) != (c[0] * normal[0] + c[1] * normal[1] < offset) {
                wrong += 1;
            }
        }
    }
    Ok(FlatnessCertificate {
        angle: normal[1].atan2(normal[0]),
        offset,
        symdiff_area: wrong as f64 * g.h * g.h,
        mu,
        e1,
        e2,
        phi_plus_e1: along.phi_plus,
        phi_minus_e1: along.phi_minus,
        phi_minus_e2: across.phi_minus,
    })
}

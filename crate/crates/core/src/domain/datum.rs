use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::geometry::{Constraint, Point, Region};

/// The set `E` prescribed outside the free region.
///
/// `Halfplane { angle, offset }` is `{x : x·(cos angle, sin angle) < offset}`,
/// so the angle is the direction of the outward normal; `{y < 0}` is
/// `angle = π/2, offset = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExteriorDatum {
    Halfplane {
        angle: f64,
        offset: f64,
    },
    /// `{x > 0, y > 0} \ B_1`.
    Sector,
    /// `(B_{1+δ} \ B_1) ∩ {y < 0}`.
    RingCap {
        delta: f64,
    },
    /// `(−∞,−1] × (−∞,−M) ∪ [1,∞) × (−∞,M)`.
    #[serde(rename = "oscillating_jm")]
    OscillatingJM {
        m: f64,
    },
    /// `{y < 0} ∪ [−3,−2]×[0,δ] ∪ [2,3]×[0,δ]`, dilated by `scale`.
    PerturbedHalfplane {
        delta: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Disk {
        center: Point,
        radius: f64,
    },
    Empty,
    Full,
    /// Occupancy of the cells of `grid` (row-major, nonzero = in); empty
    /// outside the grid window.
    ExplicitMask {
        grid: GridSpec,
        bits: Vec<u8>,
    },
    Complement {
        of: Box<ExteriorDatum>,
    },
    Union {
        parts: Vec<ExteriorDatum>,
    },
    Intersection {
        parts: Vec<ExteriorDatum>,
    },
}

fn one() -> f64 {
    1.0
}

impl ExteriorDatum {
    pub fn lower_halfplane() -> Self {
        ExteriorDatum::Halfplane { angle: std::f64::consts::FRAC_PI_2, offset: 0.0 }
    }

    pub fn complement(self) -> Self {
        match self {
            ExteriorDatum::Complement { of } => *of,
            other => ExteriorDatum::Complement { of: Box::new(other) },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProblem(m));
        match self {
            ExteriorDatum::Halfplane { angle, offset } if !(angle.is_finite() && offset.is_finite()) => {
                bad("halfplane parameters must be finite".into())
            }
            ExteriorDatum::RingCap { delta } if !(*delta > 0.0 && delta.is_finite()) => {
                bad(format!("ring cap width {delta} must be positive"))
            }
            ExteriorDatum::OscillatingJM { m } if !(*m > 1.0 && m.is_finite()) => {
                bad(format!("oscillation height M = {m} must exceed 1"))
            }
            ExteriorDatum::PerturbedHalfplane { delta, scale }
                if !(*delta > 0.0 && delta.is_finite() && *scale > 0.0 && scale.is_finite()) =>
            {
                bad("perturbation height and scale must be positive".into())
            }
            ExteriorDatum::Disk { center, radius }
                if !(*radius > 0.0 && radius.is_finite() && center[0].is_finite() && center[1].is_finite()) =>
            {
                bad("disk radius must be positive".into())
            }
            ExteriorDatum::ExplicitMask { grid, bits } => {
                grid.validate()?;
                if bits.len() != grid.len() {
                    return bad(format!("mask has {} bits for {} cells", bits.len(), grid.len()));
                }
                Ok(())
            }
            ExteriorDatum::Complement { of } => of.validate(),
            ExteriorDatum::Union { parts } | ExteriorDatum::Intersection { parts } => {
                for p in parts {
                    p.validate()?;
                    if p.far_region().complement {
                        return Err(Error::Unsupported("combined data need uncomplemented parts".into()));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Exact description as a region, when the datum has one.
    pub fn region(&self) -> Option<Region> {
        use Constraint as C;
        let r = match *self {
            ExteriorDatum::Halfplane { angle, offset } => {
                Region::from_pieces(vec![vec![C::half([angle.cos(), angle.sin()], offset)]])
            }
            ExteriorDatum::Sector => Region::from_pieces(vec![vec![
                C::half([-1.0, 0.0], 0.0),
                C::half([0.0, -1.0], 0.0),
                C::OutDisk { center: [0.0, 0.0], r: 1.0 },
            ]]),
            ExteriorDatum::RingCap { delta } => Region::from_pieces(vec![vec![
                C::InDisk { center: [0.0, 0.0], r: 1.0 + delta },
                C::OutDisk { center: [0.0, 0.0], r: 1.0 },
                C::half([0.0, 1.0], 0.0),
            ]]),
            ExteriorDatum::OscillatingJM { m } => Region::from_pieces(vec![
                vec![C::half_closed([1.0, 0.0], -1.0), C::half([0.0, 1.0], -m)],
                vec![C::half_closed([-1.0, 0.0], -1.0), C::half([0.0, 1.0], m)],
            ]),
            ExteriorDatum::PerturbedHalfplane { delta, scale } => {
                let pad = |x0: f64, x1: f64| {
                    vec![
                        C::half_closed([-1.0, 0.0], -x0 * scale),
                        C::half_closed([1.0, 0.0], x1 * scale),
                        C::half_closed([0.0, -1.0], 0.0),
                        C::half_closed([0.0, 1.0], delta * scale),
                    ]
                };
                Region::from_pieces(vec![vec![C::half([0.0, 1.0], 0.0)], pad(-3.0, -2.0), pad(2.0, 3.0)])
            }
            ExteriorDatum::Disk { center, radius } => {
                Region::from_pieces(vec![vec![C::InDisk { center, r: radius }]])
            }
            ExteriorDatum::Empty => Region::empty(),
            ExteriorDatum::Full => Region::full(),
            ExteriorDatum::ExplicitMask { .. } => return None,
            ExteriorDatum::Complement { ref of } => of.region()?.complemented(),
            ExteriorDatum::Union { ref parts } => {
                let regions = parts.iter().map(ExteriorDatum::region).collect::<Option<Vec<_>>>()?;
                union_of(regions)?
            }
            ExteriorDatum::Intersection { ref parts } => {
                let regions = parts.iter().map(ExteriorDatum::region).collect::<Option<Vec<_>>>()?;
                intersection_of(regions)?
            }
        };
        Some(r)
    }

    /// Region that agrees with the datum outside [`Self::bounded_extent`].
    pub fn far_region(&self) -> Region {
        match self {
            ExteriorDatum::ExplicitMask { .. } => Region::empty(),
            ExteriorDatum::Complement { of } => of.far_region().complemented(),
            ExteriorDatum::Union { parts } => {
                union_of(parts.iter().map(ExteriorDatum::far_region).collect()).expect("validated parts")
            }
            ExteriorDatum::Intersection { parts } => {
                intersection_of(parts.iter().map(ExteriorDatum::far_region).collect()).expect("validated parts")
            }
            other => other.region().expect("non-mask datum has a region"),
        }
    }

    /// Bounding box `[xmin, ymin, xmax, ymax]` of the part of the datum not
    /// captured by [`Self::far_region`].
    pub fn bounded_extent(&self) -> Option<[f64; 4]> {
        match self {
            ExteriorDatum::ExplicitMask { grid, .. } => Some(grid.bounds()),
            ExteriorDatum::Complement { of } => of.bounded_extent(),
            ExteriorDatum::Union { parts } | ExteriorDatum::Intersection { parts } => {
                let mut out: Option<[f64; 4]> = None;
                for e in parts.iter().filter_map(ExteriorDatum::bounded_extent) {
                    out = Some(match out {
                        None => e,
                        Some(b) => [b[0].min(e[0]), b[1].min(e[1]), b[2].max(e[2]), b[3].max(e[3])],
                    });
                }
                out
            }
            _ => None,
        }
    }

    pub fn membership(&self, x: Point) -> bool {
        match self {
            ExteriorDatum::ExplicitMask { grid, bits } => {
                let (ix, iy) = grid.cell_of(x);
                grid.index(ix, iy).is_some_and(|i| bits[i] != 0)
            }
            ExteriorDatum::Complement { of } => !of.membership(x),
            ExteriorDatum::Union { parts } => parts.iter().any(|p| p.membership(x)),
            ExteriorDatum::Intersection { parts } => parts.iter().all(|p| p.membership(x)),
            other => other.region().expect("non-mask datum has a region").contains(x),
        }
    }
}

fn union_of(regions: Vec<Region>) -> Option<Region> {
    if regions.iter().any(|r| r.complement) {
        return None;
    }
    Some(Region::from_pieces(regions.into_iter().flat_map(|r| r.pieces).collect()))
}

fn intersection_of(regions: Vec<Region>) -> Option<Region> {
    if regions.iter().any(|r| r.complement) {
        return None;
    }
    let mut pieces: Vec<Vec<Constraint>> = vec![vec![]];
    for r in regions {
        pieces = pieces
            .iter()
            .flat_map(|a| r.pieces.iter().map(move |b| a.iter().chain(b).cloned().collect()))
            .collect();
    }
    Some(Region::from_pieces(pieces))
}

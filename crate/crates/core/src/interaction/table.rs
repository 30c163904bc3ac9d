use std::io::Write;

use super::weight::{unit_offset_weight, FAR_SEPARATION};
use crate::domain::FractionalOrder;
use crate::error::Result;
use crate::par::{map_slice, Exec};

/// Cell-pair weights for a lattice of side `h`, indexed by integer offset.
///
/// Squares are invariant under reflections and the diagonal swap, so only
/// offsets with `0 ≤ dx ≤ dy` are integrated.
#[derive(Clone, Debug)]
pub struct WeightTable {
    s: FractionalOrder,
    h: f64,
    max: usize,
    /// `w[dy * (max + 1) + dx]` for `0 ≤ dx, dy ≤ max`.
    w: Vec<f64>,
}

impl WeightTable {
    /// Weights for all offsets with `|dx|, |dy| ≤ max`.
    pub fn build(s: FractionalOrder, h: f64, max: usize, tol: f64, exec: Exec) -> Result<Self> {
        Self::build_split(s, h, max, tol, tol, exec)
    }

    /// As [`Self::build`], with tolerance `tol_far` for offsets at or beyond
    /// [`FAR_SEPARATION`] cells.
    pub fn build_split(s: FractionalOrder, h: f64, max: usize, tol_near: f64, tol_far: f64, exec: Exec) -> Result<Self> {
        let mut keys = Vec::new();
        for dy in 0..=max as i64 {
            for dx in 0..=dy {
                if (dx, dy) != (0, 0) {
                    keys.push((dx, dy));
                }
            }
        }
        let vals = map_slice(exec, &keys, |&(dx, dy)| {
            let tol = if dy as f64 >= FAR_SEPARATION { tol_far } else { tol_near };
            unit_offset_weight(dx, dy, s, tol)
        });
        let scale = h.powf(s.scaling_exponent());
        let side = max + 1;
        let mut w = vec![0.0; side * side];
        for (&(dx, dy), v) in keys.iter().zip(vals) {
            let v = v? * scale;
            let (dx, dy) = (dx as usize, dy as usize);
            w[dy * side + dx] = v;
            w[dx * side + dy] = v;
        }
        Ok(WeightTable { s, h, max, w })
    }

    pub fn order(&self) -> FractionalOrder {
        self.s
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn max_offset(&self) -> usize {
        self.max
    }

    /// Weight of the offset `(dx, dy)`; zero for `(0, 0)`.
    #[inline]
    pub fn get(&self, dx: i64, dy: i64) -> f64 {
        let (x, y) = (dx.unsigned_abs() as usize, dy.unsigned_abs() as usize);
        debug_assert!(x <= self.max && y <= self.max, "offset ({dx}, {dy}) beyond table");
        self.w[y * (self.max + 1) + x]
    }

    /// Row `|dy|` for `dx = 0..=max`.
    pub fn row(&self, dy: i64) -> &[f64] {
        let y = dy.unsigned_abs() as usize;
        &self.w[y * (self.max + 1)..(y + 1) * (self.max + 1)]
    }

    /// `dx, dy, weight` rows for `0 ≤ dx ≤ dy`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "dx,dy,weight")?;
        for dy in 0..=self.max as i64 {
            for dx in 0..=dy {
                writeln!(out, "{dx},{dy},{:.17e}", self.get(dx, dy))?;
            }
        }
        Ok(())
    }
}

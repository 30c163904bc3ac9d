use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Occupancy of every cell of a grid window, row-major from the bottom row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Image {
    pub grid: GridSpec,
    pub bits: Vec<bool>,
}

impl Image {
    pub fn from_fn<F: Fn([f64; 2]) -> bool>(grid: GridSpec, f: F) -> Self {
        let bits = (0..grid.len())
            .map(|i| {
                let (ix, iy) = grid.coords(i);
                f(grid.center(ix, iy))
            })
            .collect();
        Image { grid, bits }
    }

    /// Occupancy at lattice coordinates; false outside the window.
    pub fn get(&self, ix: i64, iy: i64) -> bool {
        self.grid.index(ix, iy).is_some_and(|i| self.bits[i])
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.h * self.grid.h
    }

    /// Plain PGM (P2), top row first, 1 = black (in the set).
    pub fn to_pgm(&self, comments: &[String]) -> String {
        let g = &self.grid;
        let mut out = String::from("P2\n");
        for c in comments {
            for line in c.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(&format!("{} {}\n1\n", g.nx, g.ny));
        for iy in (0..g.ny).rev() {
            let row: Vec<&str> = (0..g.nx).map(|ix| if self.bits[iy * g.nx + ix] { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses a P2 image onto `grid`-shaped storage with the given origin and
    /// cell side. Values above half the maximum count as in.
    pub fn from_pgm(text: &str, origin: [f64; 2], h: f64) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split_whitespace());
        let parse_err = |m: &str| Error::Parse(format!("PGM: {m}"));
        if tokens.next() != Some("P2") {
            return Err(parse_err("missing P2 magic"));
        }
        let mut num = || -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| parse_err("truncated"))?
                .parse::<usize>()
                .map_err(|e| parse_err(&e.to_string()))
        };
        let nx = num()?;
        let ny = num()?;
        let maxval = num()?;
        if maxval == 0 {
            return Err(parse_err("zero maxval"));
        }
        let grid = GridSpec::new(origin, h, nx, ny)?;
        let mut bits = vec![false; nx * ny];
        for row in (0..ny).rev() {
            for ix in 0..nx {
                bits[row * nx + ix] = 2 * num()? > maxval;
            }
        }
        Ok(Image { grid, bits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let grid = GridSpec::new([0.0, 0.0], 0.5, 5, 3).unwrap();
        let img = Image::from_fn(grid, |p| p[0] + 2.0 * p[1] < 2.2);
        let text = img.to_pgm(&["config: {\"a\": 1}".into()]);
        assert!(text.starts_with("P2\n# config"));
        let back = Image::from_pgm(&text, [0.0, 0.0], 0.5).unwrap();
        assert_eq!(back, img);
        assert!(Image::from_pgm("P5 1 1 1 0", [0.0, 0.0], 1.0).is_err());
    }
}

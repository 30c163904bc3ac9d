//! Line-crossing functionals of grid sets.
//!
//! Lines in a rational direction `(p, q)` are the lattice orbits
//! `c + k(p, q)` of cell centers. Along a line, `I₊` counts entries into the
//! set (`0 → 1`, the boundary normal opposes the direction of travel) and
//! `I₋` counts exits. A transition between consecutive cells is counted when
//! the midpoint of their centers lies in the window.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::perimeter::Window;
use crate::domain::Image;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::par::{map_slice, Exec};

/// Largest lattice step accepted in a direction.
pub const MAX_STEP: i64 = 64;

/// Sweep resolution of [`balanced_direction`] before bisection.
const SWEEP_STEP: i64 = 8;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// A lattice direction `(p, q)` with coprime components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Direction {
    p: i64,
    q: i64,
}

impl TryFrom<[i64; 2]> for Direction {
    type Error = Error;
    fn try_from(v: [i64; 2]) -> Result<Self> {
        Direction::new(v[0], v[1])
    }
}

impl From<Direction> for [i64; 2] {
    fn from(d: Direction) -> Self {
        [d.p, d.q]
    }
}

impl Direction {
    pub const E1: Direction = Direction { p: 1, q: 0 };
    pub const E2: Direction = Direction { p: 0, q: 1 };

    /// Reduces `(p, q)` by its gcd.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        let g = gcd(p, q);
        if g == 0 {
            return Err(Error::InvalidParameter("zero direction".into()));
        }
        let (p, q) = (p / g, q / g);
        if p.abs().max(q.abs()) > MAX_STEP {
            return Err(Error::Unsupported(format!("direction ({p}, {q}) needs a lattice step above {MAX_STEP}")));
        }
        Ok(Direction { p, q })
    }

    /// The lattice direction parallel to `v`, if it has small components.
    pub fn from_vector(v: Point) -> Result<Self> {
        let n = v[0].hypot(v[1]);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(format!("direction {v:?}")));
        }
        for m in 1..=MAX_STEP {
            for p in -m..=m {
                for q in -m..=m {
                    if p.abs().max(q.abs()) != m || gcd(p, q) != 1 {
                        continue;
                    }
                    let d = Direction { p, q };
                    let u = d.unit();
                    if (u[0] * v[1] - u[1] * v[0]).abs() <= 1e-12 * n && u[0] * v[0] + u[1] * v[1] > 0.0 {
                        return Ok(d);
                    }
                }
            }
        }
        Err(Error::Unsupported(format!("{v:?} is not a lattice direction with step at most {MAX_STEP}")))
    }

    pub fn step(self) -> [i64; 2] {
        [self.p, self.q]
    }

    pub fn unit(self) -> Point {
        let n = (self.p as f64).hypot(self.q as f64);
        [self.p as f64 / n, self.q as f64 / n]
    }

    pub fn angle(self) -> f64 {
        (self.q as f64).atan2(self.p as f64)
    }

    /// Rotation by a quarter turn counterclockwise.
    pub fn perp(self) -> Self {
        Direction { p: -self.q, q: self.p }
    }

    pub fn reversed(self) -> Self {
        Direction { p: -self.p, q: -self.q }
    }

    fn max_step(self) -> i64 {
        self.p.abs().max(self.q.abs())
    }

    /// Orbit label, constant along a line.
    fn line_id(self, ix: i64, iy: i64) -> i64 {
        self.q * ix - self.p * iy
    }

    /// Signed distance of the line `id` along `perp().unit()`.
    fn offset(self, img: &Image, id: i64) -> f64 {
        let g = &img.grid;
        let (p, q) = (self.p as f64, self.q as f64);
        let n = p.hypot(q);
        (-q * g.origin[0] + p * g.origin[1] + 0.5 * g.h * (p - q) - g.h * id as f64) / n
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineCrossings {
    pub offset: f64,
    pub plus: u32,
    pub minus: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingProfile {
    pub direction: Direction,
    pub unit: Point,
    /// Distance between neighbouring lines.
    pub spacing: f64,
    /// Every line with a transition site in the window, by offset.
    pub lines: Vec<LineCrossings>,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

impl CrossingProfile {
    /// `Ψ = Φ₊ − Φ₋`.
    pub fn psi(&self) -> f64 {
        self.phi_plus - self.phi_minus
    }
}

/// Transition sites by line: the first cell of every consecutive pair whose
/// center midpoint lies in the window, ordered along the direction. The
/// sites of a line are contiguous because the window is convex.
fn sites(img: &Image, dir: Direction, window: &Window) -> Result<BTreeMap<i64, Vec<(i64, i64, i64)>>> {
    let r = window.lattice_range(img, dir.max_step())?;
    let g = &img.grid;
    let [p, q] = dir.step();
    let mut lines: BTreeMap<i64, Vec<(i64, i64, i64)>> = BTreeMap::new();
    for iy in r[1]..=r[3] {
        for ix in r[0]..=r[2] {
            let a = g.center(ix, iy);
            let b = g.center(ix + p, iy + q);
            if window.contains([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]) {
                lines.entry(dir.line_id(ix, iy)).or_default().push((p * ix + q * iy, ix, iy));
            }
        }
    }
    for v in lines.values_mut() {
        v.sort_unstable();
    }
    Ok(lines)
}

fn by_offset<T>(img: &Image, dir: Direction, lines: BTreeMap<i64, T>) -> Vec<(f64, T)> {
    let mut out: Vec<(f64, T)> = lines.into_iter().map(|(id, v)| (dir.offset(img, id), v)).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

pub fn crossing_profile(img: &Image, dir: Direction, window: &Window) -> Result<CrossingProfile> {
    let [p, q] = dir.step();
    let lines: Vec<LineCrossings> = by_offset(img, dir, sites(img, dir, window)?)
        .into_iter()
        .map(|(offset, cells)| {
            let (mut plus, mut minus) = (0, 0);
            for (_, ix, iy) in cells {
                match (img.get(ix, iy), img.get(ix + p, iy + q)) {
                    (false, true) => plus += 1,
                    (true, false) => minus += 1,
                    _ => {}
                }
            }
            LineCrossings { offset, plus, minus }
        })
        .collect();
    let spacing = img.grid.h / (p as f64).hypot(q as f64);
    let total = |f: fn(&LineCrossings) -> u32| spacing * lines.iter().map(|l| f(l) as f64).sum::<f64>();
    let phi_plus = total(|l| l.plus);
    let phi_minus = total(|l| l.minus);
    Ok(CrossingProfile { direction: dir, unit: dir.unit(), spacing, lines, phi_plus, phi_minus })
}

/// For each line of [`crossing_profile`], in the same order: its offset and
/// the occupancy of the cells spanned by its transition sites, ordered along
/// `dir`.
pub fn line_cells(img: &Image, dir: Direction, window: &Window) -> Result<Vec<(f64, Vec<bool>)>> {
    let [p, q] = dir.step();
    Ok(by_offset(img, dir, sites(img, dir, window)?)
        .into_iter()
        .map(|(offset, cells)| {
            let &(_, lx, ly) = cells.last().expect("lines have sites");
            let mut occ: Vec<bool> = cells.iter().map(|&(_, ix, iy)| img.get(ix, iy)).collect();
            occ.push(img.get(lx + p, ly + q));
            (offset, occ)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancedDirection {
    pub direction: Direction,
    pub unit: Point,
    pub psi: f64,
    /// Number of directions evaluated.
    pub evaluated: usize,
}

/// A direction minimizing `|Φ₊ − Φ₋|`: a sweep over lattice directions of
/// step at most 8 on the half circle, then bisection by mediants across the
/// first sign change of `Ψ`, using `Ψ(−v) = −Ψ(v)` to close the circle.
///
/// Directions whose lattice step is longer than an eighth of the window
/// diameter are skipped (axes and diagonals are always kept): their lines
/// hold too few cells to resolve the set.
pub fn balanced_direction(img: &Image, window: &Window) -> Result<BalancedDirection> {
    let limit = (window.diameter() / (8.0 * img.grid.h)).max(std::f64::consts::SQRT_2);
    let admissible = |d: Direction| (d.p as f64).hypot(d.q as f64) <= limit * (1.0 + 1e-12);
    let mut sweep = Vec::new();
    for p in -SWEEP_STEP..=SWEEP_STEP {
        for q in 0..=SWEEP_STEP {
            if gcd(p, q) == 1 && (q > 0 || p > 0) && admissible(Direction { p, q }) {
                sweep.push(Direction { p, q });
            }
        }
    }
    sweep.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
    let psi = |d: Direction| crossing_profile(img, d, window).map(|c| c.psi());
    let values = map_slice(Exec::default(), &sweep, |&d| psi(d)).into_iter().collect::<Result<Vec<f64>>>()?;

    let mut best = (sweep[0], values[0]);
    let mut evaluated = sweep.len();
    let consider = |d: Direction, v: f64, best: &mut (Direction, f64)| {
        if v.abs() < best.1.abs() {
            *best = (d, v);
        }
    };
    for (&d, &v) in sweep.iter().zip(&values) {
        consider(d, v, &mut best);
    }
    if best.1 != 0.0 {
        let n = sweep.len();
        let bracket = (0..n).find_map(|i| {
            let (a, va) = (sweep[i], values[i]);
            let (b, vb) = if i + 1 < n { (sweep[i + 1], values[i + 1]) } else { (sweep[0].reversed(), -values[0]) };
            (va * vb < 0.0).then_some((a, va, b))
        });
        if let Some((mut a, va, mut b)) = bracket {
            loop {
                let Ok(m) = Direction::new(a.p + b.p, a.q + b.q) else { break };
                if !admissible(m) {
                    break;
                }
                let vm = psi(m)?;
                evaluated += 1;
                consider(m, vm, &mut best);
                if vm == 0.0 {
                    break;
                }
                if vm * va > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
        }
    }
    Ok(BalancedDirection { direction: best.0, unit: best.0.unit(), psi: best.1, evaluated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::GridSpec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::centered([0.0, 0.0], 1.0 / 16.0, 40).unwrap()
    }

    #[test]
    fn lower_halfplane_counts() {
        let img = Image::from_fn(grid(), |p| p[1] < 0.0);
        let w = Window::unit_ball();
        let up = crossing_profile(&img, Direction::E2, &w).unwrap();
        // Going up, every vertical line leaves the set once.
        assert!(up.lines.iter().all(|l| l.plus == 0 && l.minus == 1));
        assert_eq!(up.phi_plus, 0.0);
        let across = crossing_profile(&img, Direction::E1, &w).unwrap();
        assert_eq!((across.phi_plus, across.phi_minus), (0.0, 0.0));
    }

    #[test]
    fn checkerboard_is_balanced() {
        let img = Image::from_fn(grid(), |p| ((p[0] * 4.0).floor() as i64 + (p[1] * 4.0).floor() as i64).rem_euclid(2) == 0);
        let c = crossing_profile(&img, Direction::E1, &Window::unit_ball()).unwrap();
        assert!(c.phi_plus > 0.0);
        assert_eq!(c.phi_plus, c.phi_minus);
    }

    #[test]
    fn direction_validation() {
        assert_eq!(Direction::new(4, 2).unwrap().step(), [2, 1]);
        assert!(matches!(Direction::new(65, 1), Err(Error::Unsupported(_))));
        assert_eq!(Direction::from_vector([0.0, -3.0]).unwrap().step(), [0, -1]);
        assert_eq!(Direction::from_vector([1.0, 2.0]).unwrap().step(), [1, 2]);
        assert!(matches!(Direction::from_vector([1.0, std::f64::consts::SQRT_2]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn tilted_halfplane_balances_along_its_boundary() {
        // Boundary direction (2, 1).
        let img = Image::from_fn(grid(), |p| p[1] - 0.5 * p[0] < 0.03);
        let b = balanced_direction(&img, &Window::unit_ball()).unwrap();
        assert_eq!(b.psi, 0.0);
        let c = crossing_profile(&img, Direction::new(2, 1).unwrap(), &Window::unit_ball()).unwrap();
        assert_eq!(c.phi_plus + c.phi_minus, 0.0);
    }

    #[test]
    fn symmetric_sets_have_zero_psi_everywhere() {
        let img = Image::from_fn(grid(), |p| p[0].abs() + 2.0 * p[1].abs() < 0.7);
        for d in [[1, 0], [0, 1], [1, 1], [3, -2], [1, 5]] {
            let d = Direction::new(d[0], d[1]).unwrap();
            assert_eq!(crossing_profile(&img, d, &Window::unit_ball()).unwrap().psi(), 0.0);
        }
        let b = balanced_direction(&img, &Window::unit_ball()).unwrap();
        assert_eq!((b.direction, b.psi), (Direction::E1, 0.0));
    }

    #[test]
    fn random_blob_beats_the_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let centers: Vec<(Point, f64)> =
            (0..5).map(|_| ([rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)], rng.gen_range(0.1..0.4))).collect();
        let img = Image::from_fn(grid(), |p| centers.iter().any(|(c, r)| (p[0] - c[0]).hypot(p[1] - c[1]) < *r));
        let w = Window::unit_ball();
        let b = balanced_direction(&img, &w).unwrap();
        // Oracle: every admissible lattice direction of step at most 8 on
        // the circle.
        let limit = w.diameter() / (8.0 * img.grid.h);
        let mut oracle = f64::INFINITY;
        for p in -8i64..=8 {
            for q in -8i64..=8 {
                if let Ok(d) = Direction::new(p, q).map_err(drop).and_then(|d| if (p as f64).hypot(q as f64) <= limit { Ok(d) } else { Err(()) }) {
                    oracle = oracle.min(crossing_profile(&img, d, &w).unwrap().psi().abs());
                }
            }
        }
        assert!(b.psi.abs() <= oracle, "{} > {oracle}", b.psi);
    }

    fn random_image(seed: u64, density: f64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GridSpec::centered([0.0, 0.0], 0.125, 20).unwrap();
        let bits = (0..g.len()).map(|_| rng.gen_bool(density)).collect();
        Image { grid: g, bits }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn counts_are_antisymmetric_and_telescope(seed in any::<u64>(), density in 0.1f64..0.9, p in -4i64..=4, q in -4i64..=4) {
            prop_assume!(p != 0 || q != 0);
            let img = random_image(seed, density);
            let w = Window::unit_ball();
            let d = Direction::new(p, q).unwrap();
            let fwd = crossing_profile(&img, d, &w).unwrap();
            let back = crossing_profile(&img, d.reversed(), &w).unwrap();
            prop_assert_eq!(fwd.phi_plus, back.phi_minus);
            prop_assert_eq!(fwd.phi_minus, back.phi_plus);
            // Per line, entries minus exits is the change of occupancy
            // across the window.
            for (line, cells) in fwd.lines.iter().zip(line_cells(&img, d, &w).unwrap()) {
                prop_assert_eq!(line.offset, cells.0);
                let change = *cells.1.last().unwrap() as i64 - cells.1[0] as i64;
                prop_assert_eq!(line.plus as i64 - line.minus as i64, change);
            }
        }

        #[test]
        fn no_entries_means_nonincreasing(seed in any::<u64>(), p in -3i64..=3, q in -3i64..=3) {
            prop_assume!(p != 0 || q != 0);
            // Sparse sets have many lines without entries.
            let img = random_image(seed, 0.05);
            let w = Window::unit_ball();
            let d = Direction::new(p, q).unwrap();
            let prof = crossing_profile(&img, d, &w).unwrap();
            for (line, cells) in prof.lines.iter().zip(line_cells(&img, d, &w).unwrap()) {
                if line.plus == 0 {
                    prop_assert!(cells.1.windows(2).all(|c| c[0] >= c[1]));
                }
            }
        }

        #[test]
        fn classical_perimeter_is_axis_crossings(seed in any::<u64>(), density in 0.1f64..0.9) {
            let img = random_image(seed, density);
            let w = Window::unit_ball();
            let per = super::super::classical_perimeter(&img, &w).unwrap();
            let mut sum = 0.0;
            for d in [Direction::E1, Direction::E2] {
                let c = crossing_profile(&img, d, &w).unwrap();
                sum += c.phi_plus + c.phi_minus;
            }
            prop_assert!((per - sum).abs() < 1e-12);
        }
    }
}

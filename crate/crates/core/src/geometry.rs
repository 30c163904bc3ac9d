//! Planar regions given as unions of intersections of simple constraints,
//! with exact membership along rays.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

/// Sorted, disjoint parameter intervals `(lo, hi)` on `[0, ∞)`.
pub type Intervals = Vec<(f64, f64)>;

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

pub fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Intervals {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

pub fn union(a: &[(f64, f64)], b: &[(f64, f64)]) -> Intervals {
    let mut all: Vec<(f64, f64)> = a.iter().chain(b).copied().collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Intervals = Vec::new();
    for (lo, hi) in all {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

pub fn complement(a: &[(f64, f64)]) -> Intervals {
    let mut out = Vec::new();
    let mut cur = 0.0;
    for &(lo, hi) in a {
        if lo > cur {
            out.push((cur, lo));
        }
        cur = cur.max(hi);
    }
    if cur < f64::INFINITY {
        out.push((cur, f64::INFINITY));
    }
    out
}

/// `a ∩ [r0, ∞)`.
pub fn clip_from(a: &[(f64, f64)], r0: f64) -> Intervals {
    a.iter()
        .filter(|iv| iv.1 > r0)
        .map(|&(lo, hi)| (lo.max(r0), hi))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraint {
    /// `n·x < c`, or `n·x ≤ c` when closed.
    Half { n: Point, c: f64, closed: bool },
    /// `|x − center| < r`.
    InDisk { center: Point, r: f64 },
    /// `|x − center| ≥ r`.
    OutDisk { center: Point, r: f64 },
}

impl Constraint {
    pub fn half(n: Point, c: f64) -> Self {
        Constraint::Half { n, c, closed: false }
    }

    pub fn half_closed(n: Point, c: f64) -> Self {
        Constraint::Half { n, c, closed: true }
    }

    pub fn contains(&self, x: Point) -> bool {
        match *self {
            Constraint::Half { n, c, closed } => {
                let v = dot(n, x);
                if closed {
                    v <= c
                } else {
                    v < c
                }
            }
            Constraint::InDisk { center, r } => norm(sub(x, center)) < r,
            Constraint::OutDisk { center, r } => norm(sub(x, center)) >= r,
        }
    }

    fn disk(&self) -> Option<(Point, f64)> {
        match *self {
            Constraint::InDisk { center, r } | Constraint::OutDisk { center, r } => Some((center, r)),
            Constraint::Half { .. } => None,
        }
    }

    /// Parameters `t ≥ 0` with `o + t d` satisfying the constraint (`d` unit).
    pub fn ray(&self, o: Point, d: Point) -> Intervals {
        match *self {
            Constraint::Half { n, c, .. } => {
                let nd = dot(n, d);
                let gap = c - dot(n, o);
                if nd == 0.0 {
                    if gap > 0.0 {
                        vec![(0.0, f64::INFINITY)]
                    } else {
                        vec![]
                    }
                } else {
                    let t = gap / nd;
                    if nd > 0.0 {
                        if t > 0.0 {
                            vec![(0.0, t)]
                        } else {
                            vec![]
                        }
                    } else {
                        vec![(t.max(0.0), f64::INFINITY)]
                    }
                }
            }
            Constraint::InDisk { center, r } => disk_chord(o, d, center, r).into_iter().collect(),
            Constraint::OutDisk { center, r } => match disk_chord(o, d, center, r) {
                Some(ch) => complement(&[ch]),
                None => vec![(0.0, f64::INFINITY)],
            },
        }
    }
}

/// Intersections of the line `n·x = c` with a circle.
fn line_circle(n: Point, c: f64, center: Point, r: f64) -> Vec<Point> {
    let nn = norm(n);
    let u = [n[0] / nn, n[1] / nn];
    let dist = c / nn - dot(u, center);
    if dist.abs() > r {
        return vec![];
    }
    let foot = [center[0] + dist * u[0], center[1] + dist * u[1]];
    let half = (r * r - dist * dist).max(0.0).sqrt();
    let t = [-u[1], u[0]];
    vec![[foot[0] + half * t[0], foot[1] + half * t[1]], [foot[0] - half * t[0], foot[1] - half * t[1]]]
}

fn disk_chord(o: Point, d: Point, center: Point, r: f64) -> Option<(f64, f64)> {
    let w = sub(o, center);
    let b = dot(w, d);
    let c = dot(w, w) - r * r;
    let disc = b * b - c;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Stable roots of t² + 2bt + c = 0.
    let q = -b - b.signum() * sq;
    let (mut t0, mut t1) = if q == 0.0 { (-sq, sq) } else { (q, c / q) };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    if t1 <= 0.0 {
        return None;
    }
    Some((t0.max(0.0), t1))
}

/// Union of pieces, each an intersection of constraints, optionally
/// complemented.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub pieces: Vec<Vec<Constraint>>,
    pub complement: bool,
}

impl Region {
    pub fn empty() -> Self {
        Region::default()
    }

    pub fn full() -> Self {
        Region { pieces: vec![], complement: true }
    }

    pub fn from_pieces(pieces: Vec<Vec<Constraint>>) -> Self {
        Region { pieces, complement: false }
    }

    pub fn complemented(mut self) -> Self {
        self.complement = !self.complement;
        self
    }

    pub fn contains(&self, x: Point) -> bool {
        let inside = self.pieces.iter().any(|p| p.iter().all(|c| c.contains(x)));
        inside != self.complement
    }

    /// Exact set of `t ≥ 0` with `o + t d` in the region.
    pub fn ray_intervals(&self, o: Point, d: Point) -> Intervals {
        let mut acc: Intervals = Vec::new();
        for piece in &self.pieces {
            let mut cur = vec![(0.0, f64::INFINITY)];
            for c in piece {
                cur = intersect(&cur, &c.ray(o, d));
                if cur.is_empty() {
                    break;
                }
            }
            acc = union(&acc, &cur);
        }
        if self.complement {
            complement(&acc)
        } else {
            acc
        }
    }

    /// Points where ray membership can change non-smoothly as the ray
    /// direction varies: pairwise line intersections, line–circle
    /// intersections and disk centers.
    pub fn critical_points(&self) -> Vec<Point> {
        let mut pts = Vec::new();
        for piece in &self.pieces {
            for (i, a) in piece.iter().enumerate() {
                for b in &piece[i + 1..] {
                    match (a, b) {
                        (&Constraint::Half { n: n1, c: c1, .. }, &Constraint::Half { n: n2, c: c2, .. }) => {
                            let det = n1[0] * n2[1] - n1[1] * n2[0];
                            if det.abs() > 1e-14 {
                                pts.push([(c1 * n2[1] - c2 * n1[1]) / det, (n1[0] * c2 - n2[0] * c1) / det]);
                            }
                        }
                        (&Constraint::Half { n, c, .. }, d) | (d, &Constraint::Half { n, c, .. }) => {
                            if let Some((center, r)) = d.disk() {
                                pts.extend(line_circle(n, c, center, r));
                            }
                        }
                        _ => {}
                    }
                }
                if let Some((center, _)) = a.disk() {
                    pts.push(center);
                }
            }
        }
        pts
    }

    /// Boundary circles `(center, radius)`.
    pub fn circles(&self) -> Vec<(Point, f64)> {
        self.pieces.iter().flatten().filter_map(Constraint::disk).collect()
    }

    /// Directions (angles) along which some boundary line runs.
    pub fn line_directions(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            for c in piece {
                if let Constraint::Half { n, .. } = *c {
                    let a = n[1].atan2(n[0]) + std::f64::consts::FRAC_PI_2;
                    out.push(a);
                    out.push(a + std::f64::consts::PI);
                }
            }
        }
        out
    }
}

//! Closed polygons and the boundary double integral for their fractional
//! perimeter.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::FractionalOrder;
use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sub, Point};
use crate::par::{map_range, Exec};
use crate::quadrature::{Adaptive, GaussLegendre};

/// Simple closed polygon, stored counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct PolyBoundary {
    vertices: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
    /// Unit tangent.
    pub tangent: Point,
    /// Outward unit normal: the tangent turned clockwise.
    pub normal: Point,
    pub len: f64,
}

impl Segment {
    fn new(start: Point, end: Point) -> Self {
        let d = sub(end, start);
        let len = norm(d);
        let tangent = [d[0] / len, d[1] / len];
        Segment { start, end, tangent, normal: [tangent[1], -tangent[0]], len }
    }

    pub fn at(&self, t: f64) -> Point {
        [self.start[0] + t * self.tangent[0], self.start[1] + t * self.tangent[1]]
    }

    pub fn midpoint(&self) -> Point {
        self.at(0.5 * self.len)
    }
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn segments_intersect(a0: Point, a1: Point, b0: Point, b1: Point) -> bool {
    let o = |p: Point, q: Point, r: Point| cross(sub(q, p), sub(r, p));
    let on = |p: Point, q: Point, r: Point| {
        r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
    };
    let (d1, d2) = (o(b0, b1, a0), o(b0, b1, a1));
    let (d3, d4) = (o(a0, a1, b0), o(a0, a1, b1));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on(b0, b1, a0))
        || (d2 == 0.0 && on(b0, b1, a1))
        || (d3 == 0.0 && on(a0, a1, b0))
        || (d4 == 0.0 && on(a0, a1, b1))
}

impl PolyBoundary {
    /// Accepts either orientation; a repeated closing vertex is dropped.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::InvalidBoundary(format!("polygon needs at least 3 vertices, got {}", vertices.len())));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBoundary("non-finite vertex".into()));
        }
        let mut p = PolyBoundary { vertices };
        let n = p.vertices.len();
        for i in 0..n {
            if p.vertices[i] == p.vertices[(i + 1) % n] {
                return Err(Error::InvalidBoundary(format!("repeated vertex {i}")));
            }
        }
        p.check_simple()?;
        if p.signed_area() < 0.0 {
            p.vertices.reverse();
        }
        Ok(p)
    }

    /// Regular `n`-gon whose edge midpoints lie on the circle of radius `r`,
    /// with one midpoint at angle 0.
    pub fn circumscribed(n: usize, center: Point, r: f64) -> Result<Self> {
        if n < 3 || !(r > 0.0) {
            return Err(Error::InvalidBoundary(format!("regular polygon with n = {n}, r = {r}")));
        }
        let rv = r / (PI / n as f64).cos();
        let verts = (0..n)
            .map(|k| {
                let a = (2.0 * k as f64 - 1.0) * PI / n as f64;
                [center[0] + rv * a.cos(), center[1] + rv * a.sin()]
            })
            .collect();
        PolyBoundary::new(verts)
    }

    pub fn rectangle(min: Point, max: Point) -> Result<Self> {
        PolyBoundary::new(vec![min, [max[0], min[1]], max, [min[0], max[1]]])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment(&self, i: usize) -> Segment {
        let n = self.vertices.len();
        Segment::new(self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn segments(&self) -> Vec<Segment> {
        (0..self.len()).map(|i| self.segment(i)).collect()
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n).map(|i| cross(self.vertices[i], self.vertices[(i + 1) % n])).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| self.segment(i).len).sum()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(norm(sub(*a, *b)));
            }
        }
        d
    }

    pub fn bbox(&self) -> [f64; 4] {
        self.vertices.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, v| {
            [b[0].min(v[0]), b[1].min(v[1]), b[2].max(v[0]), b[3].max(v[1])]
        })
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.vertices.len();
        let v = &self.vertices;
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Only the shared vertex may be common: reject folding back.
                    let (a, b) = if j == i + 1 { (i, j) } else { (j, i) };
                    let ta = sub(v[(a + 1) % n], v[a]);
                    let tb = sub(v[(b + 1) % n], v[b]);
                    if cross(ta, tb) == 0.0 && dot(ta, tb) < 0.0 {
                        return Err(Error::InvalidBoundary(format!("segments {a} and {b} overlap")));
                    }
                    continue;
                }
                if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                    return Err(Error::InvalidBoundary(format!("segments {i} and {j} intersect")));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: Point) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a[1] > x[1]) != (b[1] > x[1]) {
                let xc = a[0] + (x[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if x[0] < xc {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        PolyBoundary { vertices: self.vertices.iter().map(|v| [lambda * v[0], lambda * v[1]]).collect() }
    }

    pub fn translated(&self, z: Point) -> Self {
        PolyBoundary { vertices: self.vertices.iter().map(|v| [v[0] + z[0], v[1] + z[1]]).collect() }
    }

    /// Rotation about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (sn, cs) = angle.sin_cos();
        PolyBoundary { vertices: self.vertices.iter().map(|v| [cs * v[0] - sn * v[1], sn * v[0] + cs * v[1]]).collect() }
    }

    /// Rows `x,y`; blank lines, `#` comments and a non-numeric header are
    /// skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        PolyBoundary::new(read_xy(text)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for v in &self.vertices {
            out.push_str(&format!("{},{}\n", v[0], v[1]));
        }
        out
    }
}

impl TryFrom<Vec<Point>> for PolyBoundary {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<Self> {
        PolyBoundary::new(v)
    }
}

impl From<PolyBoundary> for Vec<Point> {
    fn from(p: PolyBoundary) -> Self {
        p.vertices
    }
}

pub(crate) fn read_xy(text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected 2 fields, got {}", no + 1, fields.len())));
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => out.push([x, y]),
            _ if out.is_empty() && no == 0 => continue,
            _ => return Err(Error::Parse(format!("line {}: not a number pair: {line}", no + 1))),
        }
    }
    Ok(out)
}

/// A piece `[a0, a1]` of a segment, in its arclength parameter.
#[derive(Clone, Copy)]
struct Piece<'a> {
    seg: &'a Segment,
    a0: f64,
    a1: f64,
}

impl Piece<'_> {
    fn len(&self) -> f64 {
        self.a1 - self.a0
    }

    fn split(self) -> (Self, Self) {
        let m = 0.5 * (self.a0 + self.a1);
        (Piece { a1: m, ..self }, Piece { a0: m, ..self })
    }

    fn ends(&self) -> (Point, Point) {
        (self.seg.at(self.a0), self.seg.at(self.a1))
    }
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = sub(b, a);
    let t = (dot(sub(p, a), d) / dot(d, d)).clamp(0.0, 1.0);
    norm(sub(p, [a[0] + t * d[0], a[1] + t * d[1]]))
}

fn piece_distance(x: &Piece, y: &Piece) -> f64 {
    let (a0, a1) = x.ends();
    let (b0, b1) = y.ends();
    if segments_intersect(a0, a1, b0, b1) {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Pair integrals `∫∫ |x − y|^{−2s}` over segment pairs.
struct PairRule {
    s: f64,
    order: usize,
    q: Adaptive,
}

impl PairRule {
    fn new(s: f64, tol: f64) -> Self {
        let order = ((-tol.log10() / 1.2).ceil() as usize + 2).clamp(4, 24);
        PairRule { s, order, q: Adaptive::new(0.0, tol * 1e-2) }
    }

    fn same(&self, len: f64) -> f64 {
        let s = self.s;
        2.0 * len.powf(2.0 - 2.0 * s) / ((1.0 - 2.0 * s) * (2.0 - 2.0 * s))
    }

    fn tensor(&self, x: &Piece, y: &Piece) -> f64 {
        let g = GaussLegendre::get(self.order);
        let mut acc = 0.0;
        for (a, wa) in g.mapped(x.a0, x.a1) {
            let p = x.seg.at(a);
            let mut inner = 0.0;
            for (b, wb) in g.mapped(y.a0, y.a1) {
                let d = sub(p, y.seg.at(b));
                inner += wb * dot(d, d).powf(-self.s);
            }
            acc += wa * inner;
        }
        acc
    }

    /// Disjoint pieces: split the longer one until the pair is well
    /// separated relative to its size.
    fn apart(&self, x: Piece, y: Piece, depth: usize) -> f64 {
        let d = piece_distance(&x, &y);
        let size = x.len().max(y.len());
        if d >= size || depth >= 60 {
            return self.tensor(&x, &y);
        }
        if x.len() >= y.len() {
            let (x1, x2) = x.split();
            self.apart(x1, y, depth + 1) + self.apart(x2, y, depth + 1)
        } else {
            let (y1, y2) = y.split();
            self.apart(x, y1, depth + 1) + self.apart(x, y2, depth + 1)
        }
    }

    /// `a` ends where `b` starts.
    fn adjacent(&self, a: &Segment, b: &Segment) -> f64 {
        let s = self.s;
        // Both directions pointing away from the shared vertex.
        let cos = -dot(a.tangent, b.tangent);
        let l = a.len.min(b.len);
        let j = self.q.integrate(|t| (1.0 + t * t - 2.0 * t * cos).max(0.0).powf(-s), 0.0, 1.0).value;
        let square = 2.0 * l.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s) * j;
        let rest = if a.len > l {
            self.apart(Piece { seg: a, a0: 0.0, a1: a.len - l }, Piece { seg: b, a0: 0.0, a1: b.len }, 0)
        } else if b.len > l {
            self.apart(Piece { seg: a, a0: 0.0, a1: a.len }, Piece { seg: b, a0: l, a1: b.len }, 0)
        } else {
            0.0
        };
        square + rest
    }
}

/// `Per_s` of a bounded polygon through its boundary double integral
/// `(1/(4s²)) ∬ ν(x)·ν(y) |x − y|^{−2s}`.
pub fn per_s_boundary_integral(poly: &PolyBoundary, s: FractionalOrder, tol: f64, exec: Exec) -> Result<f64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let segs = poly.segments();
    let rule = PairRule::new(s.get(), tol);
    let total = pair_sum(&segs, &rule, exec, |_| true);
    Ok(total / (4.0 * s.get() * s.get()))
}

/// `Σ_{i,j} ν_i·ν_j I_ij` over ordered pairs whose first index satisfies
/// `rows`, with row results accumulated in index order.
fn pair_sum<F: Fn(usize) -> bool + Sync>(segs: &[Segment], rule: &PairRule, exec: Exec, rows: F) -> f64 {
    let n = segs.len();
    let row = |i: usize| -> f64 {
        if !rows(i) {
            return 0.0;
        }
        let mut acc = 0.0;
        for j in 0..n {
            acc += pair_term(segs, rule, i, j);
        }
        acc
    };
    map_range(exec, n, row).into_iter().sum()
}

fn pair_term(segs: &[Segment], rule: &PairRule, i: usize, j: usize) -> f64 {
    let n = segs.len();
    let (a, b) = (&segs[i], &segs[j]);
    let nn = dot(a.normal, b.normal);
    let integral = if i == j {
        rule.same(a.len)
    } else if (i + 1) % n == j {
        rule.adjacent(a, b)
    } else if (j + 1) % n == i {
        rule.adjacent(b, a)
    } else {
        rule.apart(Piece { seg: a, a0: 0.0, a1: a.len }, Piece { seg: b, a0: 0.0, a1: b.len }, 0)
    };
    nn * integral
}

/// Change of the boundary double integral between two polygons that share
/// all segments outside `moving` (indices into both), divided by `4s²`.
pub(crate) fn per_s_difference(
    plus: &PolyBoundary,
    minus: &PolyBoundary,
    moving: &[bool],
    s: FractionalOrder,
    tol: f64,
    exec: Exec,
) -> f64 {
    let rule = PairRule::new(s.get(), tol);
    let part = |poly: &PolyBoundary| {
        let segs = poly.segments();
        // Ordered pairs with at least one moving member: rows of moving
        // segments count fully, other rows only their moving columns.
        let n = segs.len();
        let rows = map_range(exec, n, |i| {
            let mut acc = 0.0;
            for j in 0..n {
                if moving[i] || moving[j] {
                    acc += pair_term(&segs, &rule, i, j);
                }
            }
            acc
        });
        rows.into_iter().sum::<f64>()
    };
    (part(plus) - part(minus)) / (4.0 * s.get() * s.get())
}

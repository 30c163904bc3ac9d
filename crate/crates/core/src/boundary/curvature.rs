//! Nonlocal mean curvature
//! `H(p) = PV ∫ (χ_{E^c} − χ_E)(x) |x − p|^{−2−2s} dx` at boundary points.
//!
//! The principal value is removed by subtracting the tangent halfplane `T`
//! at `p`, whose own integral vanishes by symmetry. What remains is twice
//! the kernel mass of `T \ E` minus twice that of `E \ T`.
//!
//! For polygons and circles this is integrated in polar coordinates about
//! `p`: along each ray the sets are unions of intervals and the radial
//! integral is exact. For graphs it is integrated in vertical columns,
//! where the inner integral reduces to the slope kernel `G` evaluated at the
//! tangent slope and the secant slope; the constant extensions beyond the
//! window contribute closed-form tails.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::graph::GraphBoundary;
use super::kernel::SlopeKernel;
use super::polygon::{PolyBoundary, Segment};
use crate::domain::FractionalOrder;
use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sub, Point};
use crate::quadrature::{singular_at_zero, Adaptive};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryRep {
    Polygon { polygon: PolyBoundary },
    Graph { graph: GraphBoundary },
    Circle { center: Point, radius: f64 },
}

impl BoundaryRep {
    pub fn polygon(p: PolyBoundary) -> Self {
        BoundaryRep::Polygon { polygon: p }
    }

    pub fn graph(g: GraphBoundary) -> Self {
        BoundaryRep::Graph { graph: g }
    }

    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidBoundary(format!("circle of radius {radius} at {center:?}")));
        }
        Ok(BoundaryRep::Circle { center, radius })
    }

    pub fn contains(&self, x: Point) -> bool {
        match self {
            BoundaryRep::Polygon { polygon } => polygon.contains(x),
            BoundaryRep::Graph { graph } => graph.contains(x),
            BoundaryRep::Circle { center, radius } => norm(sub(x, *center)) < *radius,
        }
    }

    /// Outward unit normal at a smooth boundary point.
    pub fn normal_at(&self, p: Point) -> Result<Point> {
        Ok(match self.locate(p)? {
            Located::Segment(seg) => seg.normal,
            Located::Graph(x) => match self {
                BoundaryRep::Graph { graph } => graph.normal(x),
                _ => unreachable!(),
            },
            Located::Circle(nu) => nu,
        })
    }

    fn locate(&self, p: Point) -> Result<Located> {
        match self {
            BoundaryRep::Polygon { polygon } => {
                let scale = polygon.diameter();
                let eps = 1e-9 * scale;
                for (i, v) in polygon.vertices().iter().enumerate() {
                    if norm(sub(p, *v)) <= eps {
                        return Err(Error::InvalidBoundary(format!(
                            "{p:?} is vertex {i}; curvature is undefined at corners"
                        )));
                    }
                }
                for seg in polygon.segments() {
                    let t = dot(sub(p, seg.start), seg.tangent);
                    let off = dot(sub(p, seg.start), seg.normal);
                    if t > 0.0 && t < seg.len && off.abs() <= eps {
                        return Ok(Located::Segment(seg));
                    }
                }
                Err(Error::NotOnBoundary(format!("{p:?} is not on the polygon")))
            }
            BoundaryRep::Graph { graph } => {
                let l = graph.half_width();
                if !(p[0] > -l && p[0] < l) {
                    return Err(Error::NotOnBoundary(format!("x = {} is outside the open window (−{l}, {l})", p[0])));
                }
                let u = graph.eval(p[0]);
                if (p[1] - u).abs() > 1e-9 * (1.0 + u.abs()) {
                    return Err(Error::NotOnBoundary(format!("{p:?} is off the graph (u = {u})")));
                }
                Ok(Located::Graph(p[0]))
            }
            BoundaryRep::Circle { center, radius } => {
                let d = sub(p, *center);
                let r = norm(d);
                if (r - radius).abs() > 1e-9 * radius {
                    return Err(Error::NotOnBoundary(format!("{p:?} is at distance {r} from the center, radius {radius}")));
                }
                Ok(Located::Circle([d[0] / r, d[1] / r]))
            }
        }
    }
}

enum Located {
    Segment(Segment),
    Graph(f64),
    Circle(Point),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NmcOptions {
    /// Relative tolerance of the angular or column quadrature.
    pub tol: f64,
}

impl Default for NmcOptions {
    fn default() -> Self {
        NmcOptions { tol: 1e-10 }
    }
}

/// Radial kernel mass `∫_{r1}^{r2} r^{−1−2σ} dr`, `σ = 0` giving the
/// logarithm.
fn radial(r1: f64, r2: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        (r2 / r1).ln()
    } else {
        let top = if r2.is_finite() { r2.powf(-2.0 * sigma) } else { 0.0 };
        (r1.powf(-2.0 * sigma) - top) / (2.0 * sigma)
    }
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Halfplane-subtracted kernel mass along the ray `p + t d`, `t < cap`.
/// Rays into the tangent halfplane count `+2` on `E^c`; the others count
/// `−2` on `E`.
fn polygon_ray(segs: &[Segment], own: usize, p: Point, nu: Point, d: Point, sigma: f64, cap: f64) -> f64 {
    let into = dot(d, nu) < 0.0;
    let mut ts: Vec<f64> = Vec::new();
    for (j, seg) in segs.iter().enumerate() {
        if j == own {
            continue;
        }
        let s0 = cross(d, sub(seg.start, p));
        let s1 = cross(d, sub(seg.end, p));
        if (s0 > 0.0) != (s1 > 0.0) {
            let e = sub(seg.end, seg.start);
            let t = cross(sub(seg.start, p), e) / cross(d, e);
            if t > 0.0 {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    let mut inside = into;
    let mut prev = 0.0;
    let mut acc = 0.0;
    let counted = |inside: bool| inside != into;
    for &t in ts.iter().chain(std::iter::once(&f64::INFINITY)) {
        if counted(inside) && prev < cap {
            acc += radial(prev, t.min(cap), sigma);
        }
        inside = !inside;
        prev = t;
    }
    if into {
        2.0 * acc
    } else {
        -2.0 * acc
    }
}

/// `∫_θ` of the halfplane-subtracted ray mass about `p`.
fn polar_excess(rep: &BoundaryRep, p: Point, sigma: f64, cap: f64, tol: f64) -> Result<f64> {
    let q = Adaptive { abs_tol: 1e-3 * tol, rel_tol: tol, max_pieces: 20000 };
    match (rep, rep.locate(p)?) {
        (BoundaryRep::Polygon { polygon }, Located::Segment(own)) => {
            let segs = polygon.segments();
            let own_idx = segs.iter().position(|s| *s == own).expect("own segment");
            let nu = own.normal;
            let t0 = own.tangent[1].atan2(own.tangent[0]);
            let mut breaks = vec![t0, t0 + PI, t0 + TAU];
            for v in polygon.vertices() {
                let w = sub(*v, p);
                let a = w[1].atan2(w[0]);
                breaks.push(t0 + (a - t0).rem_euclid(TAU));
            }
            breaks.sort_by(f64::total_cmp);
            breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
            let f = |th: f64| polygon_ray(&segs, own_idx, p, nu, [th.cos(), th.sin()], sigma, cap);
            Ok(q.integrate_with_breaks(f, &breaks).value)
        }
        (BoundaryRep::Circle { radius, .. }, Located::Circle(_)) => {
            // The ray at angle t from the tangent, turning into the disk,
            // leaves it at r = 2R sin t, beyond which everything is E^c;
            // outward rays never meet E.
            let g = |t: f64| {
                let rc = 2.0 * radius * t.sin();
                if rc >= cap {
                    0.0
                } else {
                    2.0 * radial(rc, cap, sigma)
                }
            };
            let alpha = (2.0 * sigma).max(0.5);
            // Symmetric about the normal.
            Ok(2.0 * singular_at_zero(&q, g, 0.5 * PI, alpha).value)
        }
        _ => unreachable!("locate matches the representation"),
    }
}

/// Column form for graphs: `H = 2 ∫ sgn(a)|a|^{−1−2s} (G(u′(x0)) − G(m)) dx`
/// with `a = x − x0` and `m` the secant slope from `x0` to `x`.
pub(crate) fn graph_nmc(g: &GraphBoundary, x0: f64, s: f64, tol: f64) -> f64 {
    let k = SlopeKernel::new(s);
    let l = g.half_width();
    let d0 = g.derivative(x0);
    let u0 = g.eval(x0);
    let f = |a: f64| -> f64 {
        let x = (x0 + a).clamp(-l, l);
        let a = x - x0;
        if a == 0.0 {
            return 0.0;
        }
        let e = g.slope_excess(x0, x);
        -2.0 * a.signum() * a.abs().powf(-1.0 - 2.0 * s) * k.delta(d0, d0 + e)
    };
    let q = Adaptive { abs_tol: 1e-3 * tol, rel_tol: tol, max_pieces: 20000 };
    let right = singular_at_zero(&q, f, l - x0, 2.0 * s).value;
    let left = singular_at_zero(&q, |t| f(-t), l + x0, 2.0 * s).value;
    let g0 = k.g(d0);
    let tail = |c: f64, dist: f64| {
        if c == 0.0 {
            0.0
        } else {
            c.signum() * c.abs().powf(-2.0 * s) * k.moment(c.abs() / dist)
        }
    };
    let (ar, al) = (l - x0, l + x0);
    let (cr, cl) = (g.eval(l) - u0, g.eval(-l) - u0);
    let far_right = 2.0 * (g0 * ar.powf(-2.0 * s) / (2.0 * s) - tail(cr, ar));
    let far_left = -2.0 * (g0 * al.powf(-2.0 * s) / (2.0 * s) + tail(cl, al));
    right + left + far_right + far_left
}

/// Nonlocal mean curvature of the set bounded by `rep` at the boundary
/// point `p`.
pub fn nmc(rep: &BoundaryRep, p: Point, s: FractionalOrder, opts: &NmcOptions) -> Result<f64> {
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(Error::InvalidTolerance(opts.tol));
    }
    match rep {
        BoundaryRep::Graph { graph } => {
            rep.locate(p)?;
            Ok(graph_nmc(graph, p[0], s.get(), opts.tol))
        }
        _ => polar_excess(rep, p, s.get(), f64::INFINITY, opts.tol),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallSCoefficients {
    pub c0: f64,
    pub c1: f64,
}

impl SmallSCoefficients {
    /// First-order prediction of `2s·H`.
    pub fn predict(&self, s: f64) -> f64 {
        self.c0 + s * self.c1
    }
}

/// Coefficients of `2s·H(p) = c0 + s·c1 + o(s)` for a bounded set inside
/// `B_R(p)`.
pub fn nmc_small_s_coefficients(rep: &BoundaryRep, p: Point, r: f64, opts: &NmcOptions) -> Result<SmallSCoefficients> {
    let fits = match rep {
        BoundaryRep::Polygon { polygon } => polygon.vertices().iter().all(|v| norm(sub(*v, p)) <= r),
        BoundaryRep::Circle { center, radius } => norm(sub(*center, p)) + radius <= r * (1.0 + 1e-12),
        BoundaryRep::Graph { .. } => {
            return Err(Error::Unsupported("small-s coefficients need a bounded set".into()));
        }
    };
    if !fits {
        return Err(Error::InvalidParameter(format!("the set is not contained in the ball of radius {r} about {p:?}")));
    }
    let inner = polar_excess(rep, p, 0.0, r, opts.tol)?;
    Ok(SmallSCoefficients { c0: TAU, c1: 2.0 * (inner - TAU * r.ln()) })
}

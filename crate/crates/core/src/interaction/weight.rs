//! Interaction `I(A, B) = ∬_{A×B} |x − y|^{−2−2s} dx dy` of axis-aligned
//! rectangles.
//!
//! Writing `z = y − x`, the double integral becomes
//! `∫ T₁(z₁) T₂(z₂) |z|^{−2−2s} dz`, where `T_k` is the overlap length of the
//! side intervals shifted by `z_k` (a piecewise-linear tent). Near pairs are
//! integrated in polar coordinates: along each ray `T₁T₂` is a quadratic in
//! `r` between kinks, so the radial integral is closed form and only the angle
//! is treated numerically, with breakpoints at every kink-corner direction.
//! Far pairs use tensor Gauss–Legendre on the tent pieces.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::domain::FractionalOrder;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x: [x0, x1], y: [y0, y1] }
    }

    pub fn square(x0: f64, y0: f64, side: f64) -> Self {
        Rect::new(x0, y0, x0 + side, y0 + side)
    }

    fn key(&self) -> [f64; 4] {
        [self.x[0], self.y[0], self.x[1], self.y[1]]
    }

    fn valid(&self) -> bool {
        self.key().iter().all(|v| v.is_finite()) && self.x[1] > self.x[0] && self.y[1] > self.y[0]
    }
}

/// Overlap length `|A ∩ (B − z)|` of intervals `A = [a0, a1]`, `B = [b0, b1]`.
#[derive(Clone, Copy, Debug)]
struct Tent {
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

impl Tent {
    fn kinks(&self) -> [f64; 4] {
        [self.b0 - self.a1, self.b0 - self.a0, self.b1 - self.a1, self.b1 - self.a0]
    }

    fn eval(&self, z: f64) -> f64 {
        (self.a1.min(self.b1 - z) - self.a0.max(self.b0 - z)).max(0.0)
    }

    /// `(p, q)` with `T(z) = p + q z` on the linear piece containing `z`.
    fn piece(&self, z: f64) -> (f64, f64) {
        let (hp, hq) = if z < self.b1 - self.a1 { (self.a1, 0.0) } else { (self.b1, -1.0) };
        let (lp, lq) = if z > self.b0 - self.a0 { (self.a0, 0.0) } else { (self.b0, -1.0) };
        (hp - lp, hq - lq)
    }
}

/// `∫_{ra}^{rb} r^{k−1−2s} dr` for `k ∈ {0, 1, 2}`, `rb` possibly infinite
/// when `k = 0`.
fn radial_power(ra: f64, rb: f64, k: i32, s: f64) -> f64 {
    match k {
        0 => {
            let hi = if rb.is_finite() { rb.powf(-2.0 * s) } else { 0.0 };
            (ra.powf(-2.0 * s) - hi) / (2.0 * s)
        }
        1 => (rb.powf(1.0 - 2.0 * s) - ra.powf(1.0 - 2.0 * s)) / (1.0 - 2.0 * s),
        _ => (rb.powf(2.0 - 2.0 * s) - ra.powf(2.0 - 2.0 * s)) / (2.0 - 2.0 * s),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    /// `∫ T₁T₂ r^{−1−2s} dr`
    Pair,
    /// `∫ (1 − T₁T₂) r^{−1−2s} dr`, for a cell against its own complement.
    Complement,
}

/// Radial integral along direction `(c, sn)`. Returns `None` when the
/// integrand does not vanish at `r = 0` (overlapping interiors).
fn radial(t1: &Tent, t2: &Tent, c: f64, sn: f64, s: f64, mode: Mode) -> Option<f64> {
    let mut rs: Vec<f64> = Vec::with_capacity(9);
    rs.push(0.0);
    for (t, d) in [(t1, c), (t2, sn)] {
        if d != 0.0 {
            for k in t.kinks() {
                let r = k / d;
                if r > 0.0 {
                    rs.push(r);
                }
            }
        }
    }
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let mut acc = 0.0;
    for w in rs.windows(2) {
        let (ra, rb) = (w[0], w[1]);
        let rm = 0.5 * (ra + rb);
        let (z1, z2) = (rm * c, rm * sn);
        let (mut al, mut be, mut ga) = (0.0, 0.0, 0.0);
        if t1.eval(z1) > 0.0 && t2.eval(z2) > 0.0 {
            let (p1, q1) = t1.piece(z1);
            let (p2, q2) = t2.piece(z2);
            al = p1 * p2;
            be = p1 * q2 * sn + p2 * q1 * c;
            ga = q1 * q2 * c * sn;
        }
        if mode == Mode::Complement {
            al = 1.0 - al;
            be = -be;
            ga = -ga;
        }
        if ra == 0.0 {
            if al.abs() > 1e-12 {
                return None;
            }
        } else if al != 0.0 {
            acc += al * radial_power(ra, rb, 0, s);
        }
        if be != 0.0 {
            acc += be * radial_power(ra, rb, 1, s);
        }
        if ga != 0.0 {
            acc += ga * radial_power(ra, rb, 2, s);
        }
    }
    if mode == Mode::Complement {
        let last = *rs.last().expect("nonempty");
        if last == 0.0 {
            return None;
        }
        acc += radial_power(last, f64::INFINITY, 0, s);
    }
    Some(acc)
}

fn angle_breaks(t1: &Tent, t2: &Tent) -> Vec<f64> {
    let mut th = vec![0.0, FRAC_PI_2, PI, 1.5 * PI, 2.0 * PI];
    let k1: Vec<f64> = t1.kinks().into_iter().chain([0.0]).collect();
    let k2: Vec<f64> = t2.kinks().into_iter().chain([0.0]).collect();
    for &a in &k1 {
        for &b in &k2 {
            if a != 0.0 || b != 0.0 {
                let t = b.atan2(a);
                th.push(if t < 0.0 { t + 2.0 * PI } else { t });
            }
        }
    }
    th.sort_by(f64::total_cmp);
    th.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    th
}

fn polar(t1: &Tent, t2: &Tent, s: f64, mode: Mode, n: usize) -> Option<f64> {
    let rule = GaussLegendre::get(n);
    let mut total = 0.0;
    for w in angle_breaks(t1, t2).windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if mode == Mode::Pair && radial(t1, t2, mid.cos(), mid.sin(), s, mode)? == 0.0 {
            continue;
        }
        let mut part = 0.0;
        for (th, wt) in rule.mapped(w[0], w[1]) {
            part += wt * radial(t1, t2, th.cos(), th.sin(), s, mode)?;
        }
        total += part;
    }
    Some(total)
}

/// Polar evaluation with doubling until two orders agree to `tol`.
fn polar_converged(t1: &Tent, t2: &Tent, s: f64, mode: Mode, tol: f64) -> Option<f64> {
    let mut n = if tol >= 1e-6 { 12 } else if tol >= 1e-9 { 20 } else { 28 };
    if s > 0.4 {
        n *= 2;
    }
    let mut prev = polar(t1, t2, s, mode, n)?;
    loop {
        let next_n = (n * 3 / 2).min(128);
        let cur = polar(t1, t2, s, mode, next_n)?;
        if (cur - prev).abs() <= tol * cur.abs() || next_n == n {
            return Some(cur);
        }
        prev = cur;
        n = next_n;
    }
}

fn tensor(t1: &Tent, t2: &Tent, s: f64, n: usize) -> f64 {
    let rule = GaussLegendre::get(n);
    let pieces = |t: &Tent| {
        let mut k = t.kinks().to_vec();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    };
    let (k1, k2) = (pieces(t1), pieces(t2));
    let e = -1.0 - s;
    let mut total = 0.0;
    for w1 in k1.windows(2) {
        for w2 in k2.windows(2) {
            let mut part = 0.0;
            for (z1, a) in rule.mapped(w1[0], w1[1]) {
                let f1 = t1.eval(z1);
                if f1 == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for (z2, b) in rule.mapped(w2[0], w2[1]) {
                    inner += b * t2.eval(z2) * (z1 * z1 + z2 * z2).powf(e);
                }
                part += a * f1 * inner;
            }
            total += part;
        }
    }
    total
}

fn tensor_converged(t1: &Tent, t2: &Tent, s: f64, tol: f64, sep: f64) -> f64 {
    let mut n = if sep >= 16.0 {
        4
    } else if sep >= 8.0 {
        5
    } else {
        6
    };
    let mut prev = tensor(t1, t2, s, n);
    loop {
        let cur = tensor(t1, t2, s, n + 2);
        if (cur - prev).abs() <= tol * cur.abs() || n + 2 >= 64 {
            return cur;
        }
        prev = cur;
        n += 2;
    }
}

/// Separation, in units of the larger side, at which the tensor rule is used.
pub const FAR_SEPARATION: f64 = 4.0;

/// `∬_{A×B} |x − y|^{−2−2s} dx dy` with relative error about `tol`.
pub fn cell_pair_weight(a: &Rect, b: &Rect, s: FractionalOrder, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if !a.valid() || !b.valid() {
        return Err(Error::InvalidParameter("degenerate rectangle".into()));
    }
    let ox = a.x[1].min(b.x[1]) - a.x[0].max(b.x[0]);
    let oy = a.y[1].min(b.y[1]) - a.y[0].max(b.y[0]);
    if ox > 0.0 && oy > 0.0 {
        return Err(Error::OverlappingCells(format!("{a:?} and {b:?}")));
    }
    // Canonical order makes the result exactly symmetric.
    let (a, b) = if a.key() <= b.key() { (a, b) } else { (b, a) };
    // Normalize so that A has unit width and its corner at the origin.
    let l = a.x[1] - a.x[0];
    let (x0, y0) = (a.x[0], a.y[0]);
    let n = |v: f64, o: f64| (v - o) / l;
    let t1 = Tent { a0: 0.0, a1: 1.0, b0: n(b.x[0], x0), b1: n(b.x[1], x0) };
    let t2 = Tent { a0: 0.0, a1: n(a.y[1], y0), b0: n(b.y[0], y0), b1: n(b.y[1], y0) };
    let sv = s.get();
    let side = 1.0f64.max(t2.a1).max(t2.b1 - t2.b0).max(t1.b1 - t1.b0);
    let dx = 0.5 * (t1.b0 + t1.b1) - 0.5;
    let dy = 0.5 * (t2.b0 + t2.b1) - 0.5 * t2.a1;
    let sep = dx.abs().max(dy.abs()) / side;
    let unit = if sep >= FAR_SEPARATION {
        tensor_converged(&t1, &t2, sv, tol, sep)
    } else {
        polar_converged(&t1, &t2, sv, Mode::Pair, tol).ok_or_else(|| Error::OverlappingCells(format!("{a:?} and {b:?}")))?
    };
    Ok(unit * l.powf(2.0 - 2.0 * sv))
}

/// `I(Q, R² \ Q)` for the unit square `Q`.
pub fn self_complement_unit(s: FractionalOrder, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let t = Tent { a0: 0.0, a1: 1.0, b0: 0.0, b1: 1.0 };
    polar_converged(&t, &t, s.get(), Mode::Complement, tol)
        .ok_or_else(|| Error::InvalidParameter("self-complement integral diverged".into()))
}

/// Unit-cell weight for the integer offset `(dx, dy)`.
pub fn unit_offset_weight(dx: i64, dy: i64, s: FractionalOrder, tol: f64) -> Result<f64> {
    let a = Rect::square(0.0, 0.0, 1.0);
    let b = Rect::square(dx as f64, dy as f64, 1.0);
    cell_pair_weight(&a, &b, s, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{singular_at_zero, Adaptive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    /// Cartesian oracle. The inner `z₂` integral of each linear tent piece
    /// `p + q z₂` is done semi-analytically: the `q` part in closed form and
    /// the `p` part after `z₂ = z₁ tan φ`, where it becomes `∫ cos^{2s} φ dφ`.
    fn cartesian_oracle(dx: f64, dy: f64, sv: f64) -> f64 {
        let q = Adaptive { abs_tol: 1e-15, rel_tol: 1e-12, max_pieces: 4000 };
        // Distance to the nearer endpoint, without cancellation near z = d ± 1.
        let tent = |z: f64, d: f64| (z - (d - 1.0)).min((d + 1.0) - z).max(0.0);
        let inner = |z1: f64| {
            let z1 = z1.abs();
            let mut acc = 0.0;
            for (c, d) in [(dy - 1.0, dy), (dy, dy + 1.0)] {
                // On [c, d] the tent is p + q z₂.
                let (qq, p) = if d == dy { (1.0, 1.0 - dy) } else { (-1.0, 1.0 + dy) };
                // cos^{2s} has an infinite derivative at ±π/2, so adapt.
                let phi = q.integrate(|f: f64| f.cos().powf(2.0 * sv), (c / z1).atan(), (d / z1).atan()).value;
                acc += p * z1.powf(-1.0 - 2.0 * sv) * phi;
                acc += qq * ((z1 * z1 + c * c).powf(-sv) - (z1 * z1 + d * d).powf(-sv)) / (2.0 * sv);
            }
            acc
        };
        let f = |z1: f64| inner(z1) * tent(z1, dx);
        let mut br = vec![dx - 1.0, dx, dx + 1.0, 0.0];
        br.sort_by(f64::total_cmp);
        br.dedup();
        let mut total = 0.0;
        for w in br.windows(2) {
            if w[1] <= dx - 1.0 || w[0] >= dx + 1.0 {
                continue;
            }
            total += if w[0] == 0.0 {
                singular_at_zero(&q, f, w[1], 2.0 * sv).value
            } else if w[1] == 0.0 {
                singular_at_zero(&q, |t| f(-t), -w[0], 2.0 * sv).value
            } else {
                q.integrate(f, w[0], w[1]).value
            };
        }
        total
    }

    #[test]
    fn edge_and_corner_adjacent_match_oracle() {
        for sv in [0.1, 0.25, 0.4] {
            for (dx, dy) in [(1i64, 0i64), (0, 1), (1, 1), (2, 1), (3, 0), (3, 3)] {
                let w = unit_offset_weight(dx, dy, s(sv), 1e-10).unwrap();
                let o = cartesian_oracle(dx as f64, dy as f64, sv);
                assert!(w > 0.0 && w.is_finite());
                assert!((w - o).abs() <= 1e-6 * o, "s={sv} ({dx},{dy}) w={w} oracle={o}");
            }
        }
    }

    #[test]
    fn distant_cells_match_monte_carlo() {
        let sv = 0.25;
        let w = unit_offset_weight(100, 0, s(sv), 1e-8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let y = [100.0 + rng.gen::<f64>(), rng.gen::<f64>()];
            let r2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
            acc += r2.powf(-1.0 - sv);
        }
        let mc = acc / n as f64;
        assert!((w - mc).abs() < 1e-4 * mc, "w={w} mc={mc}");
        assert!((w - 1e-5).abs() < 1e-7);
    }

    #[test]
    fn far_and_near_routes_agree_at_the_switch() {
        for sv in [0.1, 0.25, 0.45] {
            let a = Tent { a0: 0.0, a1: 1.0, b0: 4.0, b1: 5.0 };
            let b = Tent { a0: 0.0, a1: 1.0, b0: 2.0, b1: 3.0 };
            let p = polar_converged(&a, &b, sv, Mode::Pair, 1e-12).unwrap();
            let t = tensor_converged(&a, &b, sv, 1e-12, 4.0);
            assert!((p - t).abs() < 1e-11 * p, "s={sv} polar={p} tensor={t}");
        }
    }

    #[test]
    fn errors() {
        let a = Rect::square(0.0, 0.0, 1.0);
        let b = Rect::square(0.5, 0.5, 1.0);
        assert!(matches!(cell_pair_weight(&a, &b, s(0.25), 1e-8), Err(Error::OverlappingCells(_))));
        let c = Rect::square(2.0, 0.0, 1.0);
        assert!(matches!(cell_pair_weight(&a, &c, s(0.25), 0.0), Err(Error::InvalidTolerance(_))));
        assert!(matches!(cell_pair_weight(&a, &a, s(0.25), 1e-8), Err(Error::OverlappingCells(_))));
    }

    #[test]
    fn scaling_law() {
        let sv = 0.25;
        for (dx, dy) in [(1.0, 0.0), (1.0, 1.0), (2.0, 3.0), (7.0, 1.0)] {
            let a = Rect::square(0.0, 0.0, 1.0);
            let b = Rect::square(dx, dy, 1.0);
            let w1 = cell_pair_weight(&a, &b, s(sv), 1e-10).unwrap();
            let a2 = Rect::square(0.0, 0.0, 2.0);
            let b2 = Rect::square(2.0 * dx, 2.0 * dy, 2.0);
            let w2 = cell_pair_weight(&a2, &b2, s(sv), 1e-10).unwrap();
            assert!((w2 - 2f64.powf(1.5) * w1).abs() < 1e-10 * w2);
        }
    }

    #[test]
    fn symmetric_exactly() {
        let a = Rect::square(0.3, -0.2, 0.7);
        let b = Rect::square(1.0, 0.9, 0.7);
        let sv = s(0.3);
        assert_eq!(cell_pair_weight(&a, &b, sv, 1e-9).unwrap(), cell_pair_weight(&b, &a, sv, 1e-9).unwrap());
    }

    #[test]
    fn monotone_in_s_beyond_unit_distance() {
        for (dx, dy) in [(2i64, 0i64), (2, 2), (5, 1)] {
            let mut prev = f64::INFINITY;
            for k in 1..10 {
                let w = unit_offset_weight(dx, dy, s(0.05 * k as f64), 1e-10).unwrap();
                assert!(w < prev);
                prev = w;
            }
        }
    }

    #[test]
    fn self_complement_matches_sum_plus_far_field() {
        // I(Q, Q^c) = Σ_{offsets in a big box} w + (mass outside the box),
        // the latter by a crude but independent radial bound check.
        let sv = 0.3;
        let p1 = self_complement_unit(s(sv), 1e-11).unwrap();
        let k = 24i64;
        let mut near = 0.0;
        for dx in -k..=k {
            for dy in -k..=k {
                if (dx, dy) != (0, 0) {
                    near += unit_offset_weight(dx, dy, s(sv), 1e-9).unwrap();
                }
            }
        }
        // Mass beyond the box lies between the disk integrals at radii k+1 and
        // (k+1)√2, i.e. between π ((k+1)√2)^{−2s}/s and π (k+1)^{−2s}/s.
        let lo = PI * (((k + 1) as f64) * 2f64.sqrt()).powf(-2.0 * sv) / sv;
        let hi = PI * ((k as f64) + 0.5).powf(-2.0 * sv) / sv;
        assert!(p1 - near > 0.9 * lo && p1 - near < 1.1 * hi, "p1={p1} near={near} lo={lo} hi={hi}");
    }
}

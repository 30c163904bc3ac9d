//! One-dimensional reductions of the kernel used by the curvature and
//! perimeter routines.
//!
//! `G(t) = ∫_0^t (1+τ²)^{−1−s} dτ` is the angular mass of the kernel on a
//! vertical segment seen from the origin, in slope coordinates.

use crate::quadrature::{Adaptive, GaussLegendre};

/// Below this slope `G` is integrated directly; above it, the tail series in
/// `1/t` converges geometrically.
const DIRECT: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct SlopeKernel {
    s: f64,
    coef: Vec<f64>,
    g_inf: f64,
}

impl SlopeKernel {
    pub fn new(s: f64) -> Self {
        // Binomial coefficients of (1+x)^{−1−s}.
        let mut coef = Vec::with_capacity(48);
        let mut c = 1.0;
        for k in 0..48 {
            coef.push(c);
            c *= -(k as f64 + 1.0 + s) / (k as f64 + 1.0);
        }
        let mut g = SlopeKernel { s, coef, g_inf: 0.0 };
        g.g_inf = g.direct(DIRECT) + g.tail(1.0 / DIRECT);
        g
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    fn density(&self, t: f64) -> f64 {
        (1.0 + t * t).powf(-1.0 - self.s)
    }

    fn direct(&self, t: f64) -> f64 {
        GaussLegendre::get(32).integrate(0.0, t, |x| self.density(x))
    }

    /// `∫_0^c σ^{2s}(1+σ²)^{−1−s} dσ` for `0 ≤ c ≤ 1/2`.
    fn tail(&self, c: f64) -> f64 {
        let s = self.s;
        let c2 = c * c;
        let mut pow = c.powf(2.0 * s + 1.0);
        let mut acc = 0.0;
        for (k, a) in self.coef.iter().enumerate() {
            acc += a * pow / (2.0 * s + 2.0 * k as f64 + 1.0);
            pow *= c2;
        }
        acc
    }

    /// `G(∞)`.
    pub fn total(&self) -> f64 {
        self.g_inf
    }

    pub fn g(&self, t: f64) -> f64 {
        let a = t.abs();
        let v = if a <= DIRECT { self.direct(a) } else { self.g_inf - self.tail(1.0 / a) };
        v.copysign(t)
    }

    /// `G(t2) − G(t1)`, accurate relative to `|t2 − t1|` when the slopes are
    /// close.
    pub fn delta(&self, t1: f64, t2: f64) -> f64 {
        if (t2 - t1).abs() <= 0.25 {
            GaussLegendre::get(10).integrate(t1, t2, |x| self.density(x))
        } else {
            self.g(t2) - self.g(t1)
        }
    }

    /// `∫_0^c t^{2s−1} G(t) dt` for `c ≥ 0`.
    pub fn moment(&self, c: f64) -> f64 {
        let s = self.s;
        let head = |c: f64| {
            let c2 = c * c;
            let mut pow = c.powf(2.0 * s + 1.0);
            let mut acc = 0.0;
            for (k, a) in self.coef.iter().enumerate() {
                let j = 2.0 * k as f64 + 1.0;
                acc += a / j * pow / (2.0 * s + j);
                pow *= c2;
            }
            acc
        };
        if c <= 0.5 {
            return head(c);
        }
        let q = Adaptive::new(1e-15, 1e-13);
        let rest = q.integrate(|w| (2.0 * s * w).exp() * self.g(w.exp()), 0.5f64.ln(), c.ln());
        head(0.5) + rest.value
    }
}

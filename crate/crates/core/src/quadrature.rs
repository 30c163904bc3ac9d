//! One-dimensional quadrature: Gauss–Legendre rules and a globally adaptive
//! Gauss–Kronrod integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

const MAX_CACHED: usize = 128;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule with `n` points.
    pub fn get(n: usize) -> &'static GaussLegendre {
        static RULES: [OnceLock<GaussLegendre>; MAX_CACHED + 1] =
            [const { OnceLock::new() }; MAX_CACHED + 1];
        assert!((1..=MAX_CACHED).contains(&n), "Gauss-Legendre order {n} not cached");
        RULES[n].get_or_init(|| Self::compute(n))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + r * x, r * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut acc = 0.0;
        for (x, w) in self.mapped(a, b) {
            acc += w * f(x);
        }
        acc
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and the difference from the embedded 7-point
/// Gauss rule.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = r * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_pieces: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive { abs_tol: 1e-13, rel_tol: 1e-11, max_pieces: 4000 }
    }
}

impl Adaptive {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Adaptive { abs_tol, rel_tol, ..Default::default() }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Estimate {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, starting from the given
    /// subdivision. `points` must be nondecreasing.
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(&self, mut f: F, points: &[f64]) -> Estimate {
        let mut heap = BinaryHeap::new();
        let (mut value, mut error) = (0.0, 0.0);
        for w in points.windows(2) {
            if w[1] > w[0] {
                let (v, e) = gk15(&mut f, w[0], w[1]);
                value += v;
                error += e;
                heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
            }
        }
        let converged = loop {
            if error <= self.abs_tol.max(self.rel_tol * value.abs()) {
                break true;
            }
            if heap.len() >= self.max_pieces {
                break false;
            }
            let worst = heap.pop().expect("nonempty while error > tol");
            let m = 0.5 * (worst.a + worst.b);
            if m <= worst.a || m >= worst.b {
                error -= worst.error;
                heap.push(Piece { error: 0.0, ..worst });
                continue;
            }
            let (v1, e1) = gk15(&mut f, worst.a, m);
            let (v2, e2) = gk15(&mut f, m, worst.b);
            value += v1 + v2 - worst.value;
            error += e1 + e2 - worst.error;
            heap.push(Piece { a: worst.a, b: m, value: v1, error: e1 });
            heap.push(Piece { a: m, b: worst.b, value: v2, error: e2 });
        };
        // Re-sum in position order so the result does not depend on the
        // refinement history of the running totals.
        let mut pieces = heap.into_vec();
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
        let (value, error) = pieces.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        Estimate { value, error, converged }
    }
}

/// `∫_0^len f(t) dt` where `f` has an integrable singularity at `t = 0`
/// behaving like `t^(−alpha)`, alpha < 1. Uses `t = len·u^k` with
/// `k = 1/(1 − alpha)`. Passing the distance to the singular point avoids
/// cancellation when the caller maps it back to an absolute coordinate.
pub fn singular_at_zero<F: FnMut(f64) -> f64>(q: &Adaptive, mut f: F, len: f64, alpha: f64) -> Estimate {
    let k = 1.0 / (1.0 - alpha.clamp(0.0, 0.95));
    q.integrate(
        |u: f64| {
            let t = len * u.powf(k);
            if t <= 0.0 {
                return 0.0;
            }
            f(t) * len * k * u.powf(k - 1.0)
        },
        0.0,
        1.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 40] {
            let rule = GaussLegendre::get(n);
            let deg = 2 * n - 1;
            let v = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n} v={v}");
        }
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in 1..=MAX_CACHED {
            let s: f64 = GaussLegendre::get(n).weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_kinks_and_singularities() {
        let q = Adaptive::new(1e-13, 1e-12);
        let e = q.integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0);
        assert!((e.value - (0.045 + 0.245)).abs() < 1e-11);
        let e = singular_at_zero(&q, |t| t.powf(-0.4), 1.0, 0.4);
        assert!((e.value - 1.0 / 0.6).abs() < 1e-10, "{e:?}");
        let e = singular_at_zero(&q, |t| t.powf(-0.7) * (1.0 + t), 1.0, 0.7);
        assert!((e.value - 1.0 / 0.3 - 1.0 / 1.3).abs() < 1e-9, "{e:?}");
    }

    #[test]
    fn breakpoints_are_respected() {
        let q = Adaptive::default();
        let e = q.integrate_with_breaks(|x: f64| if x < 0.5 { 1.0 } else { 3.0 }, &[0.0, 0.5, 1.0]);
        assert!((e.value - 2.0).abs() < 1e-14);
    }
}

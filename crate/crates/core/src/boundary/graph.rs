//! Boundaries given as graphs `y = u(x)` of uniformly sampled functions.
//!
//! The samples are interpolated by a natural cubic spline on `[−L, L]` and
//! extended by the end values outside. The set is the subgraph `y < u(x)`.

use serde::{Deserialize, Serialize};

use super::polygon::read_xy;
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphSamples", into = "GraphSamples")]
pub struct GraphBoundary {
    half_width: f64,
    dx: f64,
    u: Vec<f64>,
    /// Per interval: `u(x_k + ξ) = c[k][0] + c[k][1]ξ + c[k][2]ξ² + c[k][3]ξ³`.
    coef: Vec<[f64; 4]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSamples {
    pub half_width: f64,
    pub samples: Vec<f64>,
}

impl TryFrom<GraphSamples> for GraphBoundary {
    type Error = Error;
    fn try_from(g: GraphSamples) -> Result<Self> {
        GraphBoundary::new(g.half_width, g.samples)
    }
}

impl From<GraphBoundary> for GraphSamples {
    fn from(g: GraphBoundary) -> Self {
        GraphSamples { half_width: g.half_width, samples: g.u }
    }
}

impl GraphBoundary {
    /// Samples at `x_k = −L + k·2L/(n−1)`.
    pub fn new(half_width: f64, samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidBoundary(format!("window half-width {half_width}")));
        }
        if n < 4 {
            return Err(Error::InvalidBoundary(format!("graph needs at least 4 samples, got {n}")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBoundary("non-finite sample".into()));
        }
        let dx = 2.0 * half_width / (n - 1) as f64;
        let m = natural_second_derivatives(&samples, dx);
        let coef = (0..n - 1)
            .map(|k| {
                let (u0, u1, m0, m1) = (samples[k], samples[k + 1], m[k], m[k + 1]);
                [u0, (u1 - u0) / dx - dx * (2.0 * m0 + m1) / 6.0, 0.5 * m0, (m1 - m0) / (6.0 * dx)]
            })
            .collect();
        Ok(GraphBoundary { half_width, dx, u: samples, coef })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(half_width: f64, n: usize, f: F) -> Result<Self> {
        let dx = 2.0 * half_width / (n.max(2) - 1) as f64;
        GraphBoundary::new(half_width, (0..n).map(|k| f(-half_width + k as f64 * dx)).collect())
    }

    /// Rows `x,u` on a uniform grid symmetric about 0.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = read_xy(text)?;
        if rows.len() < 4 {
            return Err(Error::Parse(format!("graph needs at least 4 rows, got {}", rows.len())));
        }
        let l = -rows[0][0];
        let g = GraphBoundary::new(l, rows.iter().map(|r| r[1]).collect())?;
        for (k, r) in rows.iter().enumerate() {
            if (r[0] - g.node(k)).abs() > 1e-9 * l {
                return Err(Error::Parse(format!("row {}: abscissa {} is not on the uniform grid over [−{l}, {l}]", k + 1, r[0])));
            }
        }
        Ok(g)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u\n");
        for (k, u) in self.u.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.node(k), u));
        }
        out
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn samples(&self) -> &[f64] {
        &self.u
    }

    pub fn node(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.dx
    }

    /// Interval index and local coordinate of `x` inside the window.
    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !(x >= -self.half_width && x <= self.half_width) {
            return None;
        }
        let k = (((x + self.half_width) / self.dx).floor() as usize).min(self.coef.len() - 1);
        Some((k, x - self.node(k)))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some((k, t)) => {
                let c = &self.coef[k];
                c[0] + t * (c[1] + t * (c[2] + t * c[3]))
            }
            None if x < 0.0 => self.u[0],
            None => self.u[self.u.len() - 1],
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some((k, t)) => {
                let c = &self.coef[k];
                c[1] + t * (2.0 * c[2] + 3.0 * t * c[3])
            }
            None => 0.0,
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some((k, t)) => {
                let c = &self.coef[k];
                2.0 * c[2] + 6.0 * t * c[3]
            }
            None => 0.0,
        }
    }

    pub fn point(&self, x: f64) -> Point {
        [x, self.eval(x)]
    }

    /// Outward unit normal `(−u′, 1)/√(1+u′²)`.
    pub fn normal(&self, x: f64) -> Point {
        let d = self.derivative(x);
        let r = d.hypot(1.0);
        [-d / r, 1.0 / r]
    }

    pub fn contains(&self, p: Point) -> bool {
        p[1] < self.eval(p[0])
    }

    pub fn translated(&self, z: Point) -> Result<Self> {
        if z[0] != 0.0 {
            return Err(Error::Unsupported("graph windows are centered; only vertical translations".into()));
        }
        GraphBoundary::new(self.half_width, self.u.iter().map(|u| u + z[1]).collect())
    }

    /// `(u(x) − u(x0))/(x − x0) − u′(x0)` without cancellation when `x` is
    /// close to `x0`. Both points must lie in the window.
    pub fn slope_excess(&self, x0: f64, x: f64) -> f64 {
        let a = x - x0;
        let (k0, t0) = self.locate(x0).expect("x0 in window");
        let (k, _) = self.locate(x).expect("x in window");
        if a.abs() >= self.dx || k.abs_diff(k0) > 1 {
            return (self.eval(x) - self.eval(x0)) / a - self.derivative(x0);
        }
        // Taylor remainder of the cubic piece `c` from local coordinate `p`
        // to `p + h`, over `h`.
        let rem = |c: &[f64; 4], p: f64, h: f64| h * (c[2] + 3.0 * c[3] * p + c[3] * h);
        let c0 = &self.coef[k0];
        if k == k0 {
            return rem(c0, t0, a);
        }
        // Split at the knot `xk` between them:
        // E = R_k(x; xk) + R_k0(xk; x0) + (u′(xk) − u′(x0))(x − xk).
        let (xk, pk) = if k > k0 { (self.node(k), 0.0) } else { (self.node(k0), self.dx) };
        let (h0, h1) = (xk - x0, x - xk);
        let slope_change = h0 * (2.0 * c0[2] + 3.0 * c0[3] * (2.0 * t0 + h0));
        let e = h1 * rem(&self.coef[k], pk, h1) + h0 * rem(c0, t0, h0) + slope_change * h1;
        e / a
    }

    /// Largest `|u′|` over the window nodes.
    pub fn max_slope(&self) -> f64 {
        (0..self.u.len()).map(|k| self.derivative(self.node(k)).abs()).fold(0.0, f64::max)
    }
}

fn natural_second_derivatives(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    let mut m = vec![0.0; n];
    // Tridiagonal system (1, 4, 1)·m = 6Δ²u/dx² on the interior nodes.
    let k = n - 2;
    let mut diag = vec![4.0; k];
    let mut rhs: Vec<f64> = (1..n - 1).map(|i| 6.0 * (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (dx * dx)).collect();
    for i in 1..k {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    for i in (0..k).rev() {
        let next = if i + 1 < k { m[i + 2] } else { 0.0 };
        m[i + 1] = (rhs[i] - next) / diag[i];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> GraphBoundary {
        GraphBoundary::from_fn(4.0, 401, |x| 0.2 * (-x * x).exp()).unwrap()
    }

    #[test]
    fn spline_reproduces_smooth_function() {
        let g = bump();
        for i in 0..97 {
            let x = -3.9 + i as f64 * 0.0813;
            let f = 0.2 * (-x * x).exp();
            assert!((g.eval(x) - f).abs() < 1e-8, "x={x}");
            assert!((g.derivative(x) + 2.0 * x * f).abs() < 1e-5, "x={x}");
        }
        assert_eq!(g.eval(10.0), g.samples()[400]);
        assert_eq!(g.derivative(-10.0), 0.0);
    }

    #[test]
    fn cubic_data_is_reproduced_between_knots() {
        // A natural spline through a line is the line.
        let g = GraphBoundary::from_fn(1.0, 11, |x| 0.5 * x - 0.25).unwrap();
        assert!((g.eval(0.333) - (0.5 * 0.333 - 0.25)).abs() < 1e-14);
        assert!((g.derivative(-0.71) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn slope_excess_agrees_with_direct_difference() {
        let g = bump();
        let x0s = [0.3, 0.31, 0.3149, -1.0, 0.0];
        for &x0 in &x0s {
            for h in [1e-3, 4e-3, 9e-3, -2e-3, -7e-3, 0.05, -0.2] {
                let x = x0 + h;
                let direct = (g.eval(x) - g.eval(x0)) / h - g.derivative(x0);
                let fine = g.slope_excess(x0, x);
                assert!((direct - fine).abs() < 1e-9, "x0={x0} h={h}: {direct} vs {fine}");
            }
            // Small offsets: excess ≈ u″/2 · h.
            let h = 1e-9;
            let e = g.slope_excess(x0, x0 + h) / h;
            assert!((e - 0.5 * g.second_derivative(x0)).abs() < 1e-4, "x0={x0}");
        }
    }

    #[test]
    fn csv_round_trip_and_grid_check() {
        let g = GraphBoundary::from_fn(2.0, 9, |x| x.sin()).unwrap();
        let back = GraphBoundary::from_csv(&g.to_csv()).unwrap();
        assert_eq!(g.samples(), back.samples());
        assert!(GraphBoundary::from_csv("x,u\n-1,0\n-0.5,0\n0.1,0\n1,0\n").is_err());
    }

    #[test]
    fn normals_point_up_and_out() {
        let g = bump();
        let nu = g.normal(0.5);
        assert!(nu[1] > 0.0 && nu[0] > 0.0);
        assert!((nu[0].hypot(nu[1]) - 1.0).abs() < 1e-15);
    }
}

//! First and second variations of the fractional perimeter for graph
//! boundaries, each checked against a finite difference.

use serde::{Deserialize, Serialize};

use super::curvature::graph_nmc;
use super::graph::GraphBoundary;
use super::polygon::{per_s_difference, PolyBoundary};
use crate::domain::FractionalOrder;
use crate::error::{Error, Result};
use crate::geometry::{Constraint, Point, Region};
use crate::interaction::tail::point_tail;
use crate::par::{map_slice, Exec};
use crate::quadrature::{Adaptive, GaussLegendre};

/// Compactly supported deformation fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorField {
    Zero,
    /// `amplitude · exp(1 − 1/(1 − ρ²))` for `ρ = |x − center|/radius < 1`.
    Bump { center: Point, radius: f64, amplitude: Point },
}

impl VectorField {
    pub fn eval(&self, x: Point) -> Point {
        match *self {
            VectorField::Zero => [0.0, 0.0],
            VectorField::Bump { center, radius, amplitude } => {
                let rho2 = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)) / (radius * radius);
                if rho2 >= 1.0 {
                    return [0.0, 0.0];
                }
                let phi = (1.0 - 1.0 / (1.0 - rho2)).exp();
                [amplitude[0] * phi, amplitude[1] * phi]
            }
        }
    }

    /// Closed x-range outside which the field vanishes.
    fn x_support(&self) -> Option<(f64, f64)> {
        match *self {
            VectorField::Zero => None,
            VectorField::Bump { center, radius, .. } => Some((center[0] - radius, center[0] + radius)),
        }
    }
}

/// Scalar fields on a graph, as functions of the abscissa.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    Constant { value: f64 },
    /// `amplitude · exp(−(x/width)²)`.
    Gaussian { amplitude: f64, width: f64 },
    /// `x²` on `|x| ≤ half_width`, zero outside.
    WindowedQuadratic { half_width: f64 },
}

impl ScalarField {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ScalarField::Constant { value } => value,
            ScalarField::Gaussian { amplitude, width } => amplitude * (-(x / width).powi(2)).exp(),
            ScalarField::WindowedQuadratic { half_width } => {
                if x.abs() <= half_width {
                    x * x
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationOptions {
    /// Relative tolerance for curvature and Jacobi quadratures.
    pub tol: f64,
    /// Segment length of the polygonized graph.
    pub spacing: f64,
    /// Gauss–Legendre panels over the support of the field.
    pub panels: usize,
    pub exec: Exec,
}

impl Default for VariationOptions {
    fn default() -> Self {
        VariationOptions { tol: 1e-11, spacing: 0.02, panels: 6, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstVariation {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// Centered differences at `t, t/2, t/4`.
    pub steps: Vec<(f64, f64)>,
    /// `log₂` of the ratio of successive changes across `steps`.
    pub observed_order: f64,
}

/// Compares the derivative of `Per_s` along the flow of `v` with the
/// curvature integral `∫ v·ν H dH¹` on the subgraph of `g`.
///
/// The perimeter of a graph set is infinite, so the derivative is taken on
/// the polygon `B` bounded by the graph on the window, the window's
/// vertical sides and a bottom edge. The set `T = E \ B` stays fixed; its
/// interaction with the moving boundary is added back as
/// `−2 ∫ v·ν Ψ_T`, with `Ψ_T(x) = ∫_T |x − y|^{−2−2s} dy` from exact ray
/// integrals.
pub fn first_variation_check(
    g: &GraphBoundary,
    v: &VectorField,
    s: FractionalOrder,
    t_step: f64,
    opts: &VariationOptions,
) -> Result<FirstVariation> {
    if !(t_step > 0.0 && t_step.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_step = {t_step}")));
    }
    let l = g.half_width();
    let Some((x_lo, x_hi)) = v.x_support() else {
        return Ok(FirstVariation { lhs: 0.0, rhs: 0.0, gap: 0.0, steps: vec![], observed_order: f64::NAN });
    };
    if !(x_lo > -l && x_hi < l) {
        return Err(Error::InvalidField(format!("support [{x_lo}, {x_hi}] is not inside the window (−{l}, {l})")));
    }
    if let VectorField::Bump { radius, .. } = v {
        if !(*radius > 0.0) {
            return Err(Error::InvalidField(format!("radius {radius}")));
        }
    }
    let (umin, umax) = g.samples().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
    let y_field_lo = match *v {
        VectorField::Bump { center, radius, .. } => center[1] - radius,
        VectorField::Zero => umin,
    };
    let y_bottom = umin.min(y_field_lo) - l;
    let y_top = umax + l;

    // Polygon nodes along the graph, right to left.
    let n = ((2.0 * l / opts.spacing).ceil() as usize).max(4);
    let xs: Vec<f64> = (0..=n).map(|k| l - 2.0 * l * k as f64 / n as f64).collect();
    let graph_pts: Vec<Point> = xs.iter().map(|&x| g.point(x)).collect();
    let polygon = |t: f64| -> Result<PolyBoundary> {
        let mut verts = vec![[-l, y_bottom], [l, y_bottom]];
        verts.extend(graph_pts.iter().map(|&p| {
            let d = v.eval(p);
            [p[0] + t * d[0], p[1] + t * d[1]]
        }));
        PolyBoundary::new(verts)
    };
    // Segment i runs from vertex i to i + 1; graph vertex k is vertex k + 2.
    let nv = n + 3;
    let displaced: Vec<bool> = (0..nv)
        .map(|i| i >= 2 && {
            let d = v.eval(graph_pts[i - 2]);
            d[0] != 0.0 || d[1] != 0.0
        })
        .collect();
    let moving: Vec<bool> = (0..nv).map(|i| displaced[i] || displaced[(i + 1) % nv]).collect();
    let tol_pairs = opts.tol.max(1e-13);
    let mut steps = Vec::new();
    for k in 0..3 {
        let t = t_step / f64::powi(2.0, k);
        let plus = polygon(t)?;
        let minus = polygon(-t)?;
        if plus.vertices()[0] != [-l, y_bottom] || minus.vertices()[0] != [-l, y_bottom] {
            return Err(Error::InvalidField("deformation reversed the polygon orientation".into()));
        }
        let d = per_s_difference(&plus, &minus, &moving, s, tol_pairs, opts.exec) / (2.0 * t);
        steps.push((t, d));
    }

    // Both boundary integrals use ν dH¹ = (−u′, 1) dx over the support.
    let truncated = Region::from_pieces(vec![
        vec![Constraint::half([-1.0, 0.0], -l), Constraint::half([0.0, 1.0], g.eval(l))],
        vec![Constraint::half([1.0, 0.0], -l), Constraint::half([0.0, 1.0], g.eval(-l))],
        vec![Constraint::half([0.0, 1.0], y_bottom)],
    ]);
    let bbox = [-l, y_bottom, l, y_top];
    let rule = GaussLegendre::get(16);
    let width = (x_hi - x_lo) / opts.panels.max(1) as f64;
    let nodes: Vec<(f64, f64)> = (0..opts.panels.max(1))
        .flat_map(|p| rule.mapped(x_lo + p as f64 * width, x_lo + (p + 1) as f64 * width).collect::<Vec<_>>())
        .collect();
    let terms = map_slice(opts.exec, &nodes, |&(x, w)| {
        let p = g.point(x);
        let vv = v.eval(p);
        let flux = -vv[0] * g.derivative(x) + vv[1];
        if flux == 0.0 {
            return (0.0, 0.0);
        }
        let h = graph_nmc(g, x, s.get(), opts.tol);
        let psi = point_tail(p, bbox, &truncated, s.get(), opts.tol).0;
        (w * flux * h, w * flux * psi)
    });
    let rhs: f64 = terms.iter().map(|t| t.0).sum();
    let correction: f64 = -2.0 * terms.iter().map(|t| t.1).sum::<f64>();

    let steps: Vec<(f64, f64)> = steps.into_iter().map(|(t, d)| (t, d + correction)).collect();
    let lhs = steps[0].1;
    let d1 = (steps[0].1 - steps[1].1).abs();
    let d2 = (steps[1].1 - steps[2].1).abs();
    let observed_order = (d1 / d2).log2();
    Ok(FirstVariation { lhs, rhs, gap: (lhs - rhs).abs(), steps, observed_order })
}

/// `∫_Σ [η(y) − η(x̄) ν(x̄)·ν(y)] |x̄ − y|^{−2−2s} dH¹(y)` on the graph,
/// with `η` a function of the abscissa. The integrand is odd to leading
/// order about `x̄`, so the neighborhood of `x̄` is integrated in symmetric
/// pairs.
pub fn jacobi_apply<F: Fn(f64) -> f64>(g: &GraphBoundary, eta: F, xbar: Point, s: FractionalOrder, tol: f64) -> Result<f64> {
    let l = g.half_width();
    let xb = xbar[0];
    if !(xb > -l && xb < l) || (xbar[1] - g.eval(xb)).abs() > 1e-9 * (1.0 + xbar[1].abs()) {
        return Err(Error::NotOnBoundary(format!("{xbar:?} is not an interior point of the graph")));
    }
    let s = s.get();
    let ub = g.eval(xb);
    let nb = g.normal(xb);
    let eb = eta(xb);
    // Integrand at offset `t`; the offset enters the distance directly so
    // that `xb + t` rounding to `xb` cannot zero it.
    let f = |t: f64| -> f64 {
        let x = xb + t;
        let d = g.derivative(x);
        let w = d.hypot(1.0);
        let num = eta(x) * w - eb * (nb[0] * -d + nb[1]);
        let r2 = t * t + (g.eval(x) - ub).powi(2);
        num * r2.powf(-1.0 - s)
    };
    let q = Adaptive { abs_tol: 1e-3 * tol, rel_tol: tol, max_pieces: 20000 };
    let delta = (l - xb).min(l + xb);
    // Below `t_min` the paired sum is dominated by rounding in the odd part
    // of the numerator; it behaves like `c·t^{−2s}` there.
    let pair = |t: f64| f(t) + f(-t);
    let t_min = 1e-4 * delta.min(1.0);
    let head = pair(t_min) * t_min / (1.0 - 2.0 * s);
    let mut breaks = vec![t_min];
    while breaks[breaks.len() - 1] * 10.0 < delta {
        let b = breaks[breaks.len() - 1] * 10.0;
        breaks.push(b);
    }
    breaks.push(delta);
    let paired = head + q.integrate_with_breaks(pair, &breaks).value;
    let rest = if l - xb > delta { q.integrate(f, delta, l - xb).value } else { q.integrate(f, -l - xb, -delta).value };
    // Beyond the window the graph is flat at its end values.
    let tail = |side: f64| {
        let c = g.eval(side * l) - ub;
        q.integrate(
            |tau: f64| {
                if tau <= 0.0 {
                    return 0.0;
                }
                let x = side * (l + (1.0 - tau) / tau);
                let r2 = (x - xb).powi(2) + c * c;
                (eta(x) - eb * nb[1]) * r2.powf(-1.0 - s) / (tau * tau)
            },
            0.0,
            1.0,
        )
        .value
    };
    Ok(paired + rest + tail(1.0) + tail(-1.0))
}

/// Normal graph perturbation `Σ*_ε = {x + εη(x)ν(x) − εη(x̄)ν(x̄)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalPerturbation {
    pub eta: ScalarField,
    pub epsilon: f64,
    /// Abscissa of the base point `x̄`.
    pub xbar: f64,
}

impl NormalPerturbation {
    /// The deformed graph, sampled on the nodes of `g`. Each node `y′` is
    /// pulled back through the monotone map
    /// `x′ ↦ x′ − εκ₁ − εη u′/√(1+u′²)` and the height
    /// `u(x′) − εκ₂ + εη/√(1+u′²)` is read off there.
    pub fn deformed(&self, g: &GraphBoundary, epsilon: f64) -> Result<GraphBoundary> {
        let eta = |x: f64| self.eta.eval(x);
        let l = g.half_width();
        let nb = g.normal(self.xbar);
        let kappa = [eta(self.xbar) * nb[0], eta(self.xbar) * nb[1]];
        // Graph condition: |ε d(ην)/dx| < 1/2 on the nodes.
        let field = |x: f64| {
            let n = g.normal(x);
            [eta(x) * n[0], eta(x) * n[1]]
        };
        let h = 1e-5 * g.spacing();
        let mut worst: f64 = 0.0;
        for k in 0..g.samples().len() {
            let x = g.node(k);
            let (a, b) = (field(x + h), field(x - h));
            worst = worst.max(((a[0] - b[0]) / (2.0 * h)).hypot((a[1] - b[1]) / (2.0 * h)));
        }
        if epsilon.abs() * worst >= 0.5 {
            return Err(Error::InvalidParameter(format!(
                "ε = {epsilon} too large: the deformed boundary may fail to be a graph (|ε d(ην)/dx| up to {})",
                epsilon.abs() * worst
            )));
        }
        let shift = |x: f64| {
            let d = g.derivative(x);
            epsilon * kappa[0] + epsilon * eta(x) * d / d.hypot(1.0)
        };
        let heights = (0..g.samples().len())
            .map(|k| {
                let y = g.node(k);
                // Fixed point of x = y + shift(x); a contraction by the
                // graph condition.
                let mut x = y;
                for _ in 0..200 {
                    let next = y + shift(x);
                    let done = (next - x).abs() <= 1e-16 * (1.0 + l);
                    x = next;
                    if done {
                        break;
                    }
                }
                let d = g.derivative(x);
                g.eval(x) - epsilon * kappa[1] + epsilon * eta(x) / d.hypot(1.0)
            })
            .collect();
        GraphBoundary::new(l, heights)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondVariation {
    /// `(H_E(x̄) − H_{E*_ε}(x̄))/(2ε)`.
    pub difference: f64,
    pub difference_half: f64,
    /// `2·difference_half − difference`.
    pub extrapolated: f64,
    pub jacobi: f64,
    pub relative_error: f64,
}

/// Finite-difference second variation of the curvature at `x̄` against the
/// Jacobi operator.
pub fn second_variation_check(
    g: &GraphBoundary,
    pert: &NormalPerturbation,
    s: FractionalOrder,
    tol: f64,
) -> Result<SecondVariation> {
    let xb = pert.xbar;
    let base = graph_nmc(g, xb, s.get(), tol);
    let diff = |eps: f64| -> Result<f64> {
        let moved = pert.deformed(g, eps)?;
        Ok((base - graph_nmc(&moved, xb, s.get(), tol)) / (2.0 * eps))
    };
    let d1 = diff(pert.epsilon)?;
    let d2 = diff(0.5 * pert.epsilon)?;
    let extrapolated = 2.0 * d2 - d1;
    let jacobi = jacobi_apply(g, |x| pert.eta.eval(x), g.point(xb), s, tol)?;
    Ok(SecondVariation {
        difference: d1,
        difference_half: d2,
        extrapolated,
        jacobi,
        relative_error: (extrapolated - jacobi).abs() / jacobi.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    fn bump_graph() -> GraphBoundary {
        GraphBoundary::from_fn(4.0, 401, |x| 0.2 * (-x * x).exp()).unwrap()
    }

    #[test]
    fn zero_field_gives_zero() {
        let r = first_variation_check(&bump_graph(), &VectorField::Zero, s(0.25), 0.01, &VariationOptions::default()).unwrap();
        assert_eq!((r.lhs, r.rhs, r.gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn field_must_stay_inside_the_window() {
        let v = VectorField::Bump { center: [3.5, 0.0], radius: 1.0, amplitude: [0.0, 1.0] };
        let r = first_variation_check(&bump_graph(), &v, s(0.25), 0.01, &VariationOptions::default());
        assert!(matches!(r, Err(Error::InvalidField(_))));
    }

    #[test]
    fn flat_graph_is_critical() {
        let g = GraphBoundary::from_fn(3.0, 301, |_| 0.0).unwrap();
        let v = VectorField::Bump { center: [0.2, 0.0], radius: 1.0, amplitude: [0.3, 1.0] };
        let r = first_variation_check(&g, &v, s(0.25), 0.02, &VariationOptions::default()).unwrap();
        assert_eq!(r.rhs, 0.0);
        assert!(r.lhs.abs() < 2e-3, "{r:?}");
        // Second order: the difference quotient shrinks with the step.
        assert!(r.steps[2].1.abs() < r.steps[0].1.abs());
    }

    #[test]
    fn jacobi_vanishes_for_constant_eta_on_a_line() {
        let g = GraphBoundary::from_fn(3.0, 61, |_| 0.5).unwrap();
        let j = jacobi_apply(&g, |_| 2.0, [0.3, 0.5], s(0.25), 1e-10).unwrap();
        assert_eq!(j, 0.0);
    }

    #[test]
    fn jacobi_windowed_quadratic_matches_closed_form() {
        let g = GraphBoundary::from_fn(2.0, 41, |_| 0.0).unwrap();
        for v in [0.1, 0.25, 0.4] {
            let eta = ScalarField::WindowedQuadratic { half_width: 2.0 };
            let j = jacobi_apply(&g, |x| eta.eval(x), [0.0, 0.0], s(v), 1e-11).unwrap();
            // ∫_{−2}^{2} x²|x|^{−2−2s} dx.
            let want = 2.0 * 2f64.powf(1.0 - 2.0 * v) / (1.0 - 2.0 * v);
            assert!(j > 0.0 && (j - want).abs() < 1e-8 * want, "s={v}: {j} vs {want}");
        }
    }

    #[test]
    fn deformation_keeps_the_base_point() {
        let g = bump_graph();
        let p = NormalPerturbation { eta: ScalarField::Gaussian { amplitude: 1.0, width: 1.0 }, epsilon: 1e-2, xbar: 0.5 };
        let moved = p.deformed(&g, p.epsilon).unwrap();
        assert!((moved.eval(0.5) - g.eval(0.5)).abs() < 1e-9);
        let too_big = NormalPerturbation { epsilon: 1.0, ..p };
        assert!(too_big.deformed(&g, 1.0).is_err());
    }
}

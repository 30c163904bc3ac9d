use serde_json::{json, Value};

use fracmin::asymptotics::{sweep_s_to_half, sweep_s_to_zero, BoundedSet, LimitSweep};
use fracmin::boundary::{
    first_variation_check, nmc, nmc_small_s_coefficients, per_s_boundary_integral, second_variation_check, BoundaryRep,
    GraphBoundary, NmcOptions, NormalPerturbation, PolyBoundary, ScalarField, VariationOptions, VectorField,
};
use fracmin::diagnostics::{classical_perimeter, digitization_experiment, flatness_certificate, rotated_square, Window};
use fracmin::domain::ProblemSpec;
use fracmin::interaction::{whole_plane_perimeter, PlaneKernel};
use fracmin::mincut::minimize;
use fracmin::mincut::scenario::{experiment_stickiness, oscillation_sweep, Scenario};
use fracmin::verify::{acceptance, ball_minimizer, core_suite, criterion, Check};
use fracmin::{Error, ExteriorDatum, FractionalOrder, GridSpec, Image, OmegaDesc, PixelProblem, Result};

use crate::config::RunConfig;
use crate::output::Outputs;

fn order(c: &RunConfig) -> Result<FractionalOrder> {
    FractionalOrder::new(c.s)
}

fn unknown(kind: &str, name: &str, known: &[&str]) -> Error {
    Error::InvalidParameter(format!("unknown {kind} {name:?}; expected one of {}", known.join(", ")))
}

const POLYGONS: [&str; 4] = ["square", "disk", "rotated_square", "polygon"];

fn polygon(c: &RunConfig) -> Result<PolyBoundary> {
    match c.shape.as_str() {
        "square" => PolyBoundary::rectangle([0.0, 0.0], [1.0, 1.0]),
        "disk" => PolyBoundary::circumscribed(256, [0.0, 0.0], 1.0),
        "rotated_square" => Ok(rotated_square()),
        "polygon" => PolyBoundary::from_csv(&c.read_input()?),
        other => Err(unknown("polygon shape", other, &POLYGONS)),
    }
}

fn mask_input(c: &RunConfig) -> Result<Image> {
    let h = c.h.ok_or_else(|| Error::InvalidParameter("a mask input needs the cell side --h".into()))?;
    Image::from_pgm(&c.read_input()?, c.origin, h)
}

/// Cell-center digitization of a polygon with one empty cell of margin.
fn digitize(poly: &PolyBoundary, h: f64) -> Result<Image> {
    let b = poly.bbox();
    let origin = [(b[0] / h).floor() * h - h, (b[1] / h).floor() * h - h];
    let nx = ((b[2] - origin[0]) / h).ceil() as usize + 1;
    let ny = ((b[3] - origin[1]) / h).ceil() as usize + 1;
    Ok(Image::from_fn(GridSpec::new(origin, h, nx, ny)?, |p| poly.contains(p)))
}

fn whole_grid(img: &Image) -> Window {
    let b = img.grid.bounds();
    Window::Rect { min: [b[0], b[1]], max: [b[2], b[3]] }
}

pub fn perimeter(c: &RunConfig) -> Result<Value> {
    let s = order(c)?;
    let mut out = Outputs::new(c)?;
    let h = c.h.unwrap_or(1.0 / 16.0);
    let result = if c.shape == "mask" {
        let img = mask_input(c)?;
        let k = PlaneKernel::for_image(&img, s, c.tol, c.exec)?;
        json!({
            "per_s_grid": whole_plane_perimeter(&img, &k, c.exec),
            "classical_perimeter": classical_perimeter(&img, &whole_grid(&img))?,
            "area": img.area(),
        })
    } else {
        let poly = polygon(c)?;
        let boundary = per_s_boundary_integral(&poly, s, c.tol, c.exec)?;
        let img = digitize(&poly, h)?;
        out.pgm("", &img)?;
        let k = PlaneKernel::for_image(&img, s, c.tol, c.exec)?;
        let grid = whole_plane_perimeter(&img, &k, c.exec);
        json!({
            "per_s_boundary": boundary,
            "per_s_grid": grid,
            "relative_gap": (boundary - grid).abs() / boundary.abs(),
            "h": h,
            "perimeter": poly.perimeter(),
            "area": poly.area(),
        })
    };
    out.finish(&result)
}

pub fn curvature(c: &RunConfig) -> Result<Value> {
    let s = order(c)?;
    let (rep, default_point) = match c.shape.as_str() {
        "disk" => (BoundaryRep::circle([0.0, 0.0], 1.0)?, Some([1.0, 0.0])),
        "square" => (BoundaryRep::polygon(polygon(c)?), Some([1.0, 0.5])),
        "rotated_square" | "polygon" => (BoundaryRep::polygon(polygon(c)?), None),
        "graph" => (BoundaryRep::graph(GraphBoundary::from_csv(&c.read_input()?)?), None),
        other => return Err(unknown("curvature shape", other, &["disk", "square", "rotated_square", "polygon", "graph"])),
    };
    let p = c.point.or(default_point).ok_or_else(|| Error::InvalidParameter("this shape needs --point x,y".into()))?;
    let opts = NmcOptions { tol: c.tol };
    let h = nmc(&rep, p, s, &opts)?;
    let mut result = json!({ "point": p, "normal": rep.normal_at(p)?, "curvature": h });
    if let Some(r) = c.small_s_radius {
        let k = nmc_small_s_coefficients(&rep, p, r, &opts)?;
        result["small_s"] = json!({ "c0": k.c0, "c1": k.c1, "two_s_curvature": 2.0 * c.s * h, "prediction": k.predict(c.s) });
    }
    Outputs::new(c)?.finish(&result)
}

fn report_image(out: &mut Outputs, problem: &PixelProblem, mask: &fracmin::Mask) -> Result<()> {
    out.pgm("", &problem.image(mask)?)
}

pub fn minimize_cmd(c: &RunConfig) -> Result<Value> {
    let mut spec: ProblemSpec = serde_json::from_str(&c.read_input()?)?;
    if let Some(r) = c.r_ext {
        spec.r_ext = r;
    }
    let p = PixelProblem::from_spec(spec)?;
    let r = minimize(&p, order(c)?, &c.minimize())?;
    let mut out = Outputs::new(c)?;
    report_image(&mut out, &p, &r.mask)?;
    out.finish(&json!({
        "free_cells": p.num_free(),
        "occupied_free_cells": r.mask.count(),
        "energy": r.energy,
        "maxflow": r.maxflow,
        "maxflow_units": r.maxflow_units,
        "quantum": r.quantum,
        "flow": r.stats.flow,
        "arcs": r.stats.arcs,
    }))
}

const EXPERIMENTS: [&str; 10] =
    ["ring", "sector", "perturbed", "oscillation", "digitization", "flatness", "growth", "first_variation", "second_variation", "list"];

pub fn experiment(c: &RunConfig) -> Result<Value> {
    let s = order(c)?;
    let mut out = Outputs::new(c)?;
    let stickiness = |scenario: Scenario, grid: usize, out: &mut Outputs| -> Result<Value> {
        let r = experiment_stickiness(&scenario, c.grid.unwrap_or(grid), s, &c.minimize())?;
        if let Some(img) = &r.image {
            out.pgm("", img)?;
        }
        Ok(serde_json::to_value(&r)?)
    };
    let result = match c.name.as_str() {
        "ring" => stickiness(Scenario::RingCap { delta: c.delta.unwrap_or(0.01) }, 64, &mut out)?,
        "sector" => stickiness(Scenario::Sector, 32, &mut out)?,
        "perturbed" => stickiness(Scenario::PerturbedHalfplane { delta: c.delta.unwrap_or(0.5) }, 16, &mut out)?,
        "oscillation" => {
            let sw = oscillation_sweep(&c.m, c.grid.unwrap_or(8), s, &c.minimize())?;
            let rows: Vec<Vec<f64>> = (0..sw.m.len())
                .map(|i| vec![sw.m[i], sw.onset[i], sw.bands_detected[i] as u8 as f64])
                .collect();
            out.csv("", &["m", "onset", "bands_detected"], &rows)?;
            for r in &sw.reports {
                if let (Some(img), Scenario::OscillatingJM { m }) = (&r.image, &r.scenario) {
                    out.pgm(&format!("_m{m}"), img)?;
                }
            }
            json!({ "sweep": sw, "reports": sw.reports })
        }
        "digitization" => {
            let t = digitization_experiment(s, &c.eps, c.tol, c.exec)?;
            let rows: Vec<Vec<f64>> =
                t.rows.iter().map(|r| vec![r.eps, r.classical, r.per_s_digitized, r.per_s_exact, r.error]).collect();
            out.csv("", &["eps", "classical", "per_s_digitized", "per_s_exact", "error"], &rows)?;
            serde_json::to_value(&t)?
        }
        "flatness" => {
            let h = c.h.unwrap_or(0.5);
            let mut rows = Vec::new();
            let mut certs = Vec::new();
            for &r in &c.radius {
                let (_, _, img) = ball_minimizer(r, h, ExteriorDatum::lower_halfplane(), s)?;
                let cert = flatness_certificate(&img, &Window::unit_ball())?;
                rows.push(vec![r, cert.symdiff_area, cert.mu]);
                certs.push(json!({ "radius": r, "certificate": cert }));
            }
            out.csv("", &["radius", "symdiff_area", "mu"], &rows)?;
            json!({ "h": h, "runs": certs })
        }
        "growth" => {
            let h = c.h.unwrap_or(0.5);
            let delta = c.delta.unwrap_or(0.5);
            let mut rows = Vec::new();
            for &r in &c.radius {
                let mut row = vec![r];
                for datum in [ExteriorDatum::lower_halfplane(), ExteriorDatum::PerturbedHalfplane { delta, scale: 0.5 * r }] {
                    let (_, _, img) = ball_minimizer(r, h, datum, s)?;
                    row.push(classical_perimeter(&img, &Window::ball(0.5 * r))? / r);
                }
                rows.push(row);
            }
            out.csv("", &["radius", "halfplane", "perturbed"], &rows)?;
            json!({ "h": h, "perimeter_over_radius": rows })
        }
        "first_variation" => {
            let g = graph_or_bump(c)?;
            let v = VectorField::Bump { center: [0.3, 0.1], radius: 1.0, amplitude: [0.2, 1.0] };
            let opts = VariationOptions { exec: c.exec, ..VariationOptions::default() };
            serde_json::to_value(first_variation_check(&g, &v, s, c.t_step, &opts)?)?
        }
        "second_variation" => {
            let g = graph_or_bump(c)?;
            let p = NormalPerturbation { eta: ScalarField::Gaussian { amplitude: 1.0, width: 1.0 }, epsilon: c.epsilon, xbar: c.xbar };
            serde_json::to_value(second_variation_check(&g, &p, s, c.tol.min(1e-11))?)?
        }
        "list" => json!(EXPERIMENTS[..EXPERIMENTS.len() - 1]),
        other => return Err(unknown("experiment", other, &EXPERIMENTS)),
    };
    out.finish(&result)
}

fn graph_or_bump(c: &RunConfig) -> Result<GraphBoundary> {
    match c.input {
        Some(_) => GraphBoundary::from_csv(&c.read_input()?),
        None => GraphBoundary::from_fn(4.0, 401, |x| 0.2 * (-x * x).exp()),
    }
}

fn sweep_rows(r: &LimitSweep) -> Vec<Vec<f64>> {
    (0..r.s.len()).map(|i| vec![r.s[i], r.per_s[i], r.scaled[i]]).collect()
}

pub fn sweep(c: &RunConfig) -> Result<Value> {
    let mut out = Outputs::new(c)?;
    let r = match c.name.as_str() {
        "half" => {
            let set = if c.shape == "mask" {
                BoundedSet::Mask { image: mask_input(c)? }
            } else {
                BoundedSet::Polygon { polygon: polygon(c)? }
            };
            let s_list = c.s_list.clone().unwrap_or_else(|| vec![0.3, 0.4, 0.45, 0.475]);
            sweep_s_to_half(&set, &s_list, c.tol, c.exec)?
        }
        "zero" => {
            let img = match c.shape.as_str() {
                "mask" => mask_input(c)?,
                shape => {
                    let h = c.h.unwrap_or(0.125);
                    let n = (2.0 * c.omega_radius / h).ceil() as usize;
                    let grid = GridSpec::centered([0.0, 0.0], h, n)?;
                    match shape {
                        "square" => Image::from_fn(grid, |p| p[0].abs() < 0.5 && p[1].abs() < 0.5),
                        "two_squares" => Image::from_fn(grid, |p| (p[0].abs() - 1.0).abs() < 0.5 && p[1].abs() < 0.5),
                        "disk" => Image::from_fn(grid, |p| p[0].hypot(p[1]) < 1.0),
                        other => return Err(unknown("shape", other, &["square", "two_squares", "disk", "mask"])),
                    }
                }
            };
            let omega = OmegaDesc::Disk { center: [0.0, 0.0], radius: c.omega_radius };
            let s_list = c.s_list.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.02]);
            sweep_s_to_zero(&img, &omega, &s_list, &c.model())?
        }
        other => return Err(unknown("sweep", other, &["half", "zero"])),
    };
    out.csv("", &["s", "per_s", "scaled"], &sweep_rows(&r))?;
    out.finish(&r)
}

/// Runs the selected checks, printing one line each.
pub fn verify(c: &RunConfig) -> Result<(Value, bool)> {
    let checks: Vec<Check> = match (c.criterion, c.suite.as_str()) {
        (Some(n), _) => vec![criterion(n, c.seed)?],
        (None, "core") => core_suite(c.seed),
        (None, "acceptance") => acceptance(c.seed),
        (None, "all") => core_suite(c.seed).into_iter().chain(acceptance(c.seed)).collect(),
        (None, other) => return Err(unknown("suite", other, &["core", "acceptance", "all"])),
    };
    for ch in &checks {
        println!("{}", ch.line());
    }
    let passed = checks.iter().all(|ch| ch.passed);
    let v = Outputs::new(c)?.finish(&json!({ "passed": passed, "checks": checks }))?;
    Ok((v, passed))
}

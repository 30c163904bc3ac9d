use fracmin::asymptotics::{sweep_s_to_half, sweep_s_to_zero, BoundedSet};
use fracmin::boundary::PolyBoundary;
use fracmin::interaction::ModelOptions;
use fracmin::{Exec, GridSpec, Image, OmegaDesc};

const TO_HALF: [f64; 4] = [0.3, 0.4, 0.45, 0.475];
const TO_ZERO: [f64; 3] = [0.1, 0.05, 0.02];

fn unit_square() -> PolyBoundary {
    PolyBoundary::rectangle([-0.5, -0.5], [0.5, 0.5]).unwrap()
}

#[test]
fn disk_limit_at_one_half() {
    let disk = BoundedSet::Polygon { polygon: PolyBoundary::circumscribed(64, [0.0, 0.0], 1.0).unwrap() };
    let r = sweep_s_to_half(&disk, &TO_HALF, 1e-9, Exec::default()).unwrap();
    let target = 2.0 * std::f64::consts::TAU;
    assert!((r.extrapolated - target).abs() < 0.03 * target, "{r:?}");
}

#[test]
fn limit_at_one_half_scales_linearly() {
    let lam = 2.0;
    let a = sweep_s_to_half(&BoundedSet::Polygon { polygon: unit_square() }, &TO_HALF, 1e-9, Exec::default()).unwrap();
    let b = sweep_s_to_half(&BoundedSet::Polygon { polygon: unit_square().scaled(lam) }, &TO_HALF, 1e-9, Exec::default()).unwrap();
    for (i, s) in TO_HALF.iter().enumerate() {
        let want = lam.powf(2.0 - 2.0 * s) * a.per_s[i];
        assert!((b.per_s[i] - want).abs() < 1e-7 * want, "s={s}");
    }
    assert!((b.extrapolated / a.extrapolated - lam).abs() < 0.03 * lam);
}

#[test]
fn mask_and_polygon_agree_along_the_sweep() {
    let grid = GridSpec::centered([0.0, 0.0], 1.0 / 16.0, 24).unwrap();
    let mask = BoundedSet::Mask { image: Image::from_fn(grid, |p| p[0].abs() < 0.5 && p[1].abs() < 0.5) };
    let poly = BoundedSet::Polygon { polygon: unit_square() };
    let m = sweep_s_to_half(&mask, &TO_HALF, 1e-9, Exec::default()).unwrap();
    let p = sweep_s_to_half(&poly, &TO_HALF, 1e-9, Exec::default()).unwrap();
    assert_eq!(m.reference, p.reference);
    for (a, b) in m.scaled.iter().zip(&p.scaled) {
        assert!((a - b).abs() < 0.02 * b, "{a} vs {b}");
    }
}

fn ball_grid() -> GridSpec {
    GridSpec::centered([0.0, 0.0], 0.125, 32).unwrap()
}

fn b2() -> OmegaDesc {
    OmegaDesc::Disk { center: [0.0, 0.0], radius: 2.0 }
}

#[test]
fn square_limit_at_zero() {
    let img = Image::from_fn(ball_grid(), |p| p[0].abs() < 0.5 && p[1].abs() < 0.5);
    let r = sweep_s_to_zero(&img, &b2(), &TO_ZERO, &ModelOptions::default()).unwrap();
    assert_eq!(r.reference, 1.0);
    assert!(r.relative_error < 0.05, "{r:?}");
    // E lies inside Ω, so Per_s(E, Ω) is the whole-plane perimeter.
    let whole = BoundedSet::Polygon { polygon: unit_square() };
    for (s, p) in TO_ZERO.iter().zip(&r.per_s) {
        let want = whole.whole_plane(fracmin::FractionalOrder::new(*s).unwrap(), 1e-10, Exec::default()).unwrap();
        assert!((p - want).abs() < 1e-5 * want, "s={s}: {p} vs {want}");
    }
}

#[test]
fn two_squares_limit_at_zero() {
    let img = Image::from_fn(ball_grid(), |p| (p[0].abs() - 1.0).abs() < 0.5 && p[1].abs() < 0.5);
    let r = sweep_s_to_zero(&img, &b2(), &TO_ZERO, &ModelOptions::default()).unwrap();
    assert_eq!(r.reference, 2.0);
    assert!(r.relative_error < 0.05, "{r:?}");
}

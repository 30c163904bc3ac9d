use fracmin::boundary::{
    first_variation_check, second_variation_check, GraphBoundary, NormalPerturbation, ScalarField, VariationOptions, VectorField,
};
use fracmin::domain::FractionalOrder;

fn bump_graph() -> GraphBoundary {
    GraphBoundary::from_fn(4.0, 401, |x| 0.2 * (-x * x).exp()).unwrap()
}

#[test]
fn first_variation_on_the_bump() {
    let s = FractionalOrder::new(0.25).unwrap();
    let v = VectorField::Bump { center: [0.3, 0.1], radius: 1.0, amplitude: [0.2, 1.0] };
    let r = first_variation_check(&bump_graph(), &v, s, 0.02, &VariationOptions::default()).unwrap();
    assert!(r.gap <= 5e-3 * (r.lhs.abs() + r.rhs.abs() + 1.0), "{r:?}");
    assert!(r.observed_order >= 1.0, "{r:?}");
    // The refined difference quotients approach the curvature integral.
    let gaps: Vec<f64> = r.steps.iter().map(|&(_, d)| (d - r.rhs).abs()).collect();
    assert!(gaps[2] < gaps[0], "{gaps:?}");
}

#[test]
fn second_variation_on_the_bump() {
    let s = FractionalOrder::new(0.25).unwrap();
    let p = NormalPerturbation { eta: ScalarField::Gaussian { amplitude: 1.0, width: 1.0 }, epsilon: 1e-3, xbar: 0.0 };
    let r = second_variation_check(&bump_graph(), &p, s, 1e-11).unwrap();
    assert!(r.relative_error < 0.05, "{r:?}");
    // Off-center base point.
    let p = NormalPerturbation { xbar: 0.7, ..p };
    let r = second_variation_check(&bump_graph(), &p, s, 1e-11).unwrap();
    assert!(r.relative_error < 0.05, "{r:?}");
}

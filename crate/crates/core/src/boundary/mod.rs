//! Continuum boundaries: polygons and graphs, their fractional perimeter,
//! nonlocal mean curvature and its first and second variations.

pub mod curvature;
pub mod graph;
pub mod kernel;
pub mod polygon;
pub mod variation;

pub use curvature::{nmc, nmc_small_s_coefficients, BoundaryRep, NmcOptions, SmallSCoefficients};
pub use graph::{GraphBoundary, GraphSamples};
pub use polygon::{per_s_boundary_integral, PolyBoundary, Segment};
pub use variation::{
    first_variation_check, jacobi_apply, second_variation_check, FirstVariation, NormalPerturbation, ScalarField,
    SecondVariation, VariationOptions, VectorField,
};

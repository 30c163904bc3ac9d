//! Sets, grids, exterior data and the fractional order.

mod datum;
mod grid;
mod image;
mod order;
mod problem;

pub use datum::ExteriorDatum;
pub use grid::GridSpec;
pub use image::Image;
pub use order::{geometric_constants, FractionalOrder, GeometricConstants, DIM};
pub use problem::{make_problem, Mask, OmegaDesc, PixelProblem, ProblemSpec};

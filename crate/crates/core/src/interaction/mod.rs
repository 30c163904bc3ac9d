//! Cell-pair interactions and assembly of the three-term fractional
//! perimeter on a pixel problem.

pub mod energy;
pub mod model;
pub mod table;
pub mod tail;
pub mod weight;

pub use energy::{evaluate, frac_perimeter, sobolev_identity_gap, whole_plane_perimeter, Energy, PlaneKernel};
pub use model::{exterior_unary_terms, InteractionModel, ModelOptions};
pub use table::WeightTable;
pub use tail::TailPolicy;
pub use weight::{cell_pair_weight, self_complement_unit, unit_offset_weight, Rect};

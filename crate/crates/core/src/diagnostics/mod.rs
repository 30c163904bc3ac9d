//! Measurements on grid sets: classical perimeter, line-crossing counts,
//! flatness certificates and the digitization experiment.

pub mod crossing;
pub mod digitization;
pub mod flatness;
pub mod perimeter;

pub use crossing::{balanced_direction, crossing_profile, line_cells, BalancedDirection, CrossingProfile, Direction, LineCrossings};
pub use digitization::{digitization_experiment, digitized_rotated_square, rotated_square, DigitizationRow, DigitizationTable};
pub use flatness::{flatness_certificate, FlatnessCertificate};
pub use perimeter::{classical_perimeter, Window};

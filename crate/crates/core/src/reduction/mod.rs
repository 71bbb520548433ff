//! Reduction algorithms: PORK, FLPORK, O-FLPORK, frequency-limited balanced
//! truncation and modal truncation, with the supporting interpolation data
//! and electromechanical mode selection.

mod data;
mod flbt;
mod flpork;
mod interp;
mod modal;
mod pork;
mod report;

pub use data::{augmented_input_data, augmented_output_data, real_input_data, real_output_data, SylvesterData};
pub use flbt::flbt;
pub use flpork::{flpork, oflpork};
pub use interp::{mirror_interpolation, mirror_interpolation_for, InterpolationSet};
pub use modal::{modal_truncation, select_modes};
pub use pork::pork;
pub use report::{pole_set_distance, Method, ReductionReport};

pub(crate) use flpork::{augmented_direction, augmented_residuals};
pub(crate) use pork::input_residuals;

#[cfg(test)]
mod tests;

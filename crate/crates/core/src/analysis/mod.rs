//! Error norms, active-set cell classification, and convergence orders.

mod classify;
mod eoc;
mod norms;

pub use classify::{check_assumption_74, classify_cells, CellClass, CellClassification, DEFAULT_CLASSIFY_TOL};
pub use eoc::{estimate_eoc, least_squares_order, ConvergenceRecord};
pub use norms::{
    l1_error_fe, l1_error_fe_with, l2_difference, l2_error_control, l2_error_control_with, l2_norm,
    DEFAULT_SUBDIVISION, SINGULAR_EXTRA_LEVELS,
};

//! Linear analysis and accuracy measurement.

pub mod convergence;
pub mod defect;
pub mod linear;
pub mod stability;

pub use convergence::{
    coarsen_average, coarsen_inject, convergence_order, l2_distance, linf_distance, order_from_errors,
    ConvergenceReport, ConvergenceWarning, OrderEstimate, Reference,
};
pub use defect::defect_theta;
pub use linear::{
    compatible_equilibria, implied_alpha, jacobian_equilibria, linearized_equilibria, reconcile_equilibria,
    EquilibriaReconciliation, LinearEquilibria, ReferenceState,
};
pub use stability::{
    amplification_matrix, amplification_scan, eigenvalues, relaxation_matrix, spectral_radius, StabilityReport,
    Verdict, STABILITY_TOLERANCE,
};

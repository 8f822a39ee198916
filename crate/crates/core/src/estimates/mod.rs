//! Numerical certificates for the integral estimate, the interpolation bound,
//! the unique-continuation inequalities and the Hölder stability rate.
//!
//! The inequalities only assert that constants exist. Each check therefore
//! fits its constant on a calibration family and evaluates the inequality on
//! instances that were not used for the fit.

mod check;
mod family;
mod holder;
mod unique;

pub use check::{EstimateCheck, Verdict};
pub use family::{
    integral_estimate_check, interpolation_check, interpolation_family_check, interpolation_slope,
    lemma_sides, solve_family, FamilySample, IntegralEstimateReport, InterpolationReport,
    PerturbationFamily, INTEGRAL_HOLDOUT_FACTOR,
};
pub use holder::{
    fit_holder_rate, holder_stability_experiment, HolderExperiment, HolderOptions, StabilityReport,
};
pub use unique::{
    ball_energy, calibrate_doubling, calibrate_three_sphere, doubling_check, lps_check, lps_grid,
    rigid_average, strain_lower_bound_check, three_sphere_check, three_sphere_delta, DoublingMode,
    DoublingReport, LpsReport, StrainLowerBound, ThreeSphereOutcome, MIN_EXPONENT, MIN_R_SQUARED,
};

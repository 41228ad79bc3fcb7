//! Grid wavefunctions and the two independent ways of measuring their
//! symmetrized moments: averaging operator orderings, and quadrature of the
//! Wigner function.

mod evolve;
pub mod families;
mod grid;
pub mod io;
mod measure;
pub mod power_exp;
mod wigner;

pub use evolve::{free_propagate, BOUNDARY_LIMIT};
pub use families::{
    abs_exp, gaussian, gaussian_moments, make_skew_gaussian, sqrt_exp, Family, SkewGaussianMoments, FAMILY_NAMES,
};
pub use grid::{GridSpec, GridWavefunction};
pub use measure::{
    central_position_moments, centroid, ordered_moments, shape_metrics, symmetrized_moment, symmetrized_moments,
    OrderedMoments, ShapeMetrics, CONVERGENCE_LIMIT, MAX_MEASURED_ORDER, RESOLUTION_LIMIT,
};
pub use power_exp::{
    closed_form_moments, make_power_exponential, make_truncated_power_exponential, quadrature_moments,
    sigma2_closed, PowerExpMoments, PowerExpParams, TruncatedPowerExp,
};
pub use wigner::{wigner_moment, wigner_moments, wigner_transform, WignerGrid};

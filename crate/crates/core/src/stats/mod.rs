//! Estimators turning raw ensemble counts into the observables of interest:
//! collision distributions in reduced coordinates, central moments, the
//! diffusion exponent z, kurtosis, and heavy-tail fits.

mod distribution;
mod fit;
mod gof;

pub use distribution::{estimate_distribution, Binning, DistributionEstimate, Histogram, ReducedHistogram};
pub use fit::{fit_diffusion_exponent, fit_levy_tail, kurtosis_ratio, linear_fit, DiffusionFit, LevyTailFit, LineFit};
pub use gof::{
    chi_squared_gof, compare_to_oracle, kolmogorov_q, ks_critical_value, ks_p_value, ks_statistic_continuous,
    ks_statistic_counts, ks_statistic_discrete, OracleComparison,
};

use serde::{Deserialize, Serialize};

/// Which boundary the collision counts refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollisionKind {
    Wall,
    Disk,
}

impl std::fmt::Display for CollisionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CollisionKind::Wall => write!(f, "wall"),
            CollisionKind::Disk => write!(f, "disk"),
        }
    }
}

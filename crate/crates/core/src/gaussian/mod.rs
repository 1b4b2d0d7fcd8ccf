//! Quadratic Gaussian multiple descriptions.

pub mod channels;
pub mod cms3;
pub mod covariance;
pub mod ozarow;
pub mod regime;

pub use channels::{achieved_distortions, test_channels, AchievedDistortions, LinearModel, TestChannelSpec3, TwoChannelSpec};
pub use cms3::{
    aux_assignment, aux_bounds, corner_points, d23_max, d23_star, three_region, AuxAssignment3, AuxBounds3,
    CornerLabel, ThreeDescDistortions, ThreeRegion,
};
pub use covariance::{conditional_variance, estimator_coefficients, gaussian_entropy, gaussian_mi, noise_variance};
pub use ozarow::{
    achieved_d12, corner_point_p0, d12_max, excess_rate_bits, independent_sum_rate, no_excess_region,
    ozarow_params, rate_bits, rho12_star, two_region, IndependentGap, NoExcessRegion, OzarowParams,
    TwoDescDistortions,
};
pub use regime::{classify_regime, regime_map, RegimeCell, RegimeLabel, RegimeReport};

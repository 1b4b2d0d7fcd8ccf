//! Test-channel constructions as linear maps of a Gaussian base vector.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::covariance::{conditional_variance, linear_image, noise_variance};
use super::ozarow::{rho12_star, TwoDescDistortions};
use crate::error::{domain, Error, Result};

/// A decoder: which derived variables it sees when a subset of descriptions arrives.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decoder {
    pub label: String,
    pub observed: Vec<usize>,
}

/// Derived variables `loadings · base` over a base vector with covariance `base_cov`.
///
/// Derived variable 0 is always the source.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub names: Vec<&'static str>,
    pub base_cov: DMatrix<f64>,
    pub loadings: DMatrix<f64>,
    pub decoders: Vec<Decoder>,
}

impl LinearModel {
    pub fn covariance(&self) -> DMatrix<f64> {
        linear_image(&self.loadings, &self.base_cov)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    /// Analytic MMSE of each decoder, in decoder order.
    pub fn distortions(&self) -> Result<Vec<f64>> {
        let cov = self.covariance();
        self.decoders
            .iter()
            .map(|d| conditional_variance(&cov, 0, &d.observed))
            .collect()
    }
}

/// Variable order of the three-description joint covariance.
pub mod three {
    pub const X: usize = 0;
    pub const W1: usize = 1;
    pub const W2: usize = 2;
    pub const W3: usize = 3;
    pub const U1: usize = 4;
    pub const U2: usize = 5;
    pub const U3: usize = 6;
    pub const V13: usize = 7;
    pub const NAMES: [&str; 8] = ["X", "W1", "W2", "W3", "U1", "U2", "U3", "V13"];
}

/// Three-description test channels: `U1 = X + W1`, `U2 = X + W2`,
/// `V13 = U3 = X + W1 + W3`, with `W3` independent of `(W1, W2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestChannelSpec3 {
    pub sigma1_t_sq: f64,
    pub sigma2_t_sq: f64,
    pub sigma3_t_sq: f64,
    /// Correlation of `W1` and `W2`.
    pub rho12: f64,
    /// Correlation of the `(U2, V13)` noises, `W2` and `W1 + W3`.
    pub rho: f64,
}

impl TestChannelSpec3 {
    pub fn new(sigma1_t_sq: f64, sigma2_t_sq: f64, sigma3_t_sq: f64, rho12: f64) -> Result<Self> {
        if !(sigma1_t_sq > 0.0 && sigma2_t_sq > 0.0 && sigma1_t_sq.is_finite() && sigma2_t_sq.is_finite()) {
            return domain("noise variances must be positive and finite");
        }
        if !(sigma3_t_sq >= 0.0 && sigma3_t_sq.is_finite()) {
            return Err(Error::RoleOrder {
                d1: sigma1_t_sq / (1.0 + sigma1_t_sq),
                d3: (sigma1_t_sq + sigma3_t_sq) / (1.0 + sigma1_t_sq + sigma3_t_sq),
            });
        }
        if !(rho12.abs() < 1.0) {
            return domain(format!("noise correlation {rho12} outside (-1, 1)"));
        }
        let rho = rho12 * (sigma1_t_sq / (sigma1_t_sq + sigma3_t_sq)).sqrt();
        Ok(Self {
            sigma1_t_sq,
            sigma2_t_sq,
            sigma3_t_sq,
            rho12,
            rho,
        })
    }

    pub fn base_covariance(&self) -> DMatrix<f64> {
        let c12 = self.rho12 * (self.sigma1_t_sq * self.sigma2_t_sq).sqrt();
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, self.sigma1_t_sq, c12, 0.0,
            0.0, c12, self.sigma2_t_sq, 0.0,
            0.0, 0.0, 0.0, self.sigma3_t_sq,
        ]);
        m
    }

    pub fn loadings() -> DMatrix<f64> {
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(8, 4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            1.0, 1.0, 0.0, 0.0,
            1.0, 0.0, 1.0, 0.0,
            1.0, 1.0, 0.0, 1.0,
            1.0, 1.0, 0.0, 1.0,
        ]);
        m
    }

    /// Joint covariance of `(X, W1, W2, W3, U1, U2, U3, V13)`.
    pub fn covariance(&self) -> DMatrix<f64> {
        linear_image(&Self::loadings(), &self.base_covariance())
    }

    pub fn model(&self) -> LinearModel {
        use three::*;
        let dec = |label: &str, observed: &[usize]| Decoder {
            label: label.into(),
            observed: observed.to_vec(),
        };
        LinearModel {
            names: NAMES.to_vec(),
            base_cov: self.base_covariance(),
            loadings: Self::loadings(),
            decoders: vec![
                dec("D1", &[U1, V13]),
                dec("D2", &[U2]),
                dec("D3", &[U3, V13]),
                dec("D12", &[U1, U2, V13]),
                dec("D23", &[U2, U3, V13]),
            ],
        }
    }
}

/// Build the three-description test channels for side distortions `d1 <= d3`
/// and joint target `d12`.
pub fn test_channels(d1: f64, d2: f64, d3: f64, d12: f64) -> Result<TestChannelSpec3> {
    for (name, d) in [("D1", d1), ("D2", d2), ("D3", d3)] {
        if !(d > 0.0 && d < 1.0) {
            return domain(format!("{name} = {d} outside (0, 1); test channels need finite noise"));
        }
    }
    if d3 < d1 {
        return Err(Error::RoleOrder { d1, d3 });
    }
    let rho12 = rho12_star(d1, d2, d12)?;
    let s1 = noise_variance(d1);
    TestChannelSpec3::new(s1, noise_variance(d2), (noise_variance(d3) - s1).max(0.0), rho12)
}

/// MMSE distortions of the five constrained decoders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AchievedDistortions {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d12: f64,
    pub d23: f64,
}

pub fn achieved_distortions(spec: &TestChannelSpec3) -> Result<AchievedDistortions> {
    let v = spec.model().distortions()?;
    Ok(AchievedDistortions {
        d1: v[0],
        d2: v[1],
        d3: v[2],
        d12: v[3],
        d23: v[4],
    })
}

/// Variable order of the two-description joint covariance.
pub mod two {
    pub const X: usize = 0;
    pub const W1: usize = 1;
    pub const W2: usize = 2;
    pub const U1: usize = 3;
    pub const U2: usize = 4;
    pub const NAMES: [&str; 5] = ["X", "W1", "W2", "U1", "U2"];
}

/// Two-description correlated test channels `U_i = X + W_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoChannelSpec {
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub rho12: f64,
}

impl TwoChannelSpec {
    pub fn new(d1: f64, d2: f64, rho12: f64) -> Result<Self> {
        for (name, d) in [("D1", d1), ("D2", d2)] {
            if !(d > 0.0 && d < 1.0) {
                return domain(format!("{name} = {d} outside (0, 1)"));
            }
        }
        if !(rho12.abs() < 1.0) {
            return domain(format!("noise correlation {rho12} outside (-1, 1)"));
        }
        Ok(Self {
            sigma1_sq: noise_variance(d1),
            sigma2_sq: noise_variance(d2),
            rho12,
        })
    }

    /// Channels tuned to `ρ₁₂*` for the distortion triple.
    pub fn optimal(d: TwoDescDistortions) -> Result<Self> {
        Self::new(d.d1, d.d2, rho12_star(d.d1, d.d2, d.d12)?)
    }

    pub fn base_covariance(&self) -> DMatrix<f64> {
        let c12 = self.rho12 * (self.sigma1_sq * self.sigma2_sq).sqrt();
        DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, self.sigma1_sq, c12, 0.0, c12, self.sigma2_sq])
    }

    pub fn loadings() -> DMatrix<f64> {
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(5, 3, &[
            1.0, 0.0, 0.0,
            0.0, 1.0, 0.0,
            0.0, 0.0, 1.0,
            1.0, 1.0, 0.0,
            1.0, 0.0, 1.0,
        ]);
        m
    }

    pub fn model(&self) -> LinearModel {
        use two::*;
        let dec = |label: &str, observed: &[usize]| Decoder {
            label: label.into(),
            observed: observed.to_vec(),
        };
        LinearModel {
            names: NAMES.to_vec(),
            base_cov: self.base_covariance(),
            loadings: Self::loadings(),
            decoders: vec![dec("D1", &[U1]), dec("D2", &[U2]), dec("D12", &[U1, U2])],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::cms3::d23_star;
    use crate::gaussian::covariance::gaussian_mi;

    #[test]
    fn equal_outer_distortions_collapse_the_shared_layer() {
        let spec = test_channels(0.3, 0.4, 0.3, 0.2).unwrap();
        assert_eq!(spec.sigma3_t_sq, 0.0);
        let cov = spec.covariance();
        let v = conditional_variance(&cov, three::V13, &[three::U1]).unwrap();
        assert!(v < 1e-15);
    }

    #[test]
    fn shared_layer_noise_variance() {
        let spec = test_channels(0.1, 0.15, 0.2, 0.05).unwrap();
        assert!((spec.sigma3_t_sq - (0.25 - 1.0 / 9.0)).abs() < 1e-15);
        assert!((spec.sigma3_t_sq - 0.138_888_888_888_888_9).abs() < 1e-15);
    }

    #[test]
    fn derived_correlation_matches_scaled_pair_correlation() {
        let (d1, d3) = (0.1, 0.2);
        let spec = test_channels(d1, 0.15, d3, 0.05).unwrap();
        let (s1, s3) = (noise_variance(d1), noise_variance(d3));
        assert!((spec.rho - spec.rho12 * (s1 / s3).sqrt()).abs() < 1e-12);
        // and it is the actual correlation of W2 with W1 + W3
        let cov = spec.covariance();
        let (u2, v13) = (three::U2, three::V13);
        let c = cov[(u2, v13)] - 1.0;
        let empirical = c / ((cov[(u2, u2)] - 1.0) * (cov[(v13, v13)] - 1.0)).sqrt();
        assert!((empirical - spec.rho).abs() < 1e-12);
    }

    #[test]
    fn construction_reproduces_targets() {
        let (d1, d2, d3, d12) = (0.1, 0.15, 0.2, 0.05);
        let got = achieved_distortions(&test_channels(d1, d2, d3, d12).unwrap()).unwrap();
        assert!((got.d1 - d1).abs() < 1e-12);
        assert!((got.d2 - d2).abs() < 1e-12);
        assert!((got.d3 - d3).abs() < 1e-12);
        assert!((got.d12 - d12).abs() < 1e-9);
        assert!((got.d23 - d23_star(d1, d2, d3, d12).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn layer_noise_information_equals_pair_noise_information() {
        use three::*;
        let spec = test_channels(0.1, 0.15, 0.2, 0.05).unwrap();
        let cov = spec.covariance();
        let lhs = gaussian_mi(&cov, &[U2], &[U1, V13], &[X]).unwrap();
        let rhs = gaussian_mi(&cov, &[W2], &[W1], &[]).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn role_order_and_domain_errors() {
        assert!(matches!(test_channels(0.3, 0.2, 0.1, 0.1), Err(Error::RoleOrder { .. })));
        assert!(matches!(test_channels(0.3, 0.2, 1.0, 0.1), Err(Error::Domain(_))));
        assert!(TwoChannelSpec::new(0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn two_channel_model_distortions() {
        let spec = TwoChannelSpec::optimal(TwoDescDistortions::new(0.5, 0.5, 0.3).unwrap()).unwrap();
        let d = spec.model().distortions().unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15);
        assert!((d[1] - 0.5).abs() < 1e-15);
        assert!((d[2] - 0.3).abs() < 1e-12);
    }
}

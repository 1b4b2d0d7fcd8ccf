//! Rate regions as intersections of lower-bound halfspaces.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Slack used by [`RateRegion::membership`].
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// `coefficients · R >= bound_bits`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub label: String,
    pub coefficients: Vec<f64>,
    pub bound_bits: f64,
}

impl Halfspace {
    pub fn new(label: impl Into<String>, coefficients: Vec<f64>, bound_bits: f64) -> Self {
        Self {
            label: label.into(),
            coefficients,
            bound_bits,
        }
    }

    pub fn lhs(&self, rates: &[f64]) -> f64 {
        self.coefficients.iter().zip(rates).map(|(a, r)| a * r).sum()
    }

    /// Signed distance of the left side above the bound.
    pub fn slack(&self, rates: &[f64]) -> f64 {
        self.lhs(rates) - self.bound_bits
    }
}

/// A labeled vertex of a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerPoint {
    pub label: String,
    pub rates: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub dimension: usize,
    pub halfspaces: Vec<Halfspace>,
    #[serde(default)]
    pub corner_points: Vec<CornerPoint>,
}

/// Verdict of a membership query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Halfspaces met with equality (within tolerance).
    pub binding: Vec<String>,
    pub violated: Vec<String>,
}

impl RateRegion {
    pub fn new(dimension: usize, halfspaces: Vec<Halfspace>) -> Self {
        Self {
            dimension,
            halfspaces,
            corner_points: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let region: RateRegion = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.halfspaces.iter().find(|h| h.coefficients.len() != self.dimension) {
            return domain(format!(
                "halfspace {} has {} coefficients, region dimension is {}",
                h.label,
                h.coefficients.len(),
                self.dimension
            ));
        }
        Ok(())
    }

    pub fn membership(&self, rates: &[f64]) -> Result<Membership> {
        self.membership_with(rates, MEMBERSHIP_TOLERANCE)
    }

    pub fn membership_with(&self, rates: &[f64], tol: f64) -> Result<Membership> {
        if rates.len() != self.dimension {
            return domain(format!("point has {} rates, region has dimension {}", rates.len(), self.dimension));
        }
        let mut binding = Vec::new();
        let mut violated = Vec::new();
        for h in &self.halfspaces {
            let s = h.slack(rates);
            if s < -tol {
                violated.push(h.label.clone());
            } else if s <= tol {
                binding.push(h.label.clone());
            }
        }
        Ok(Membership {
            member: violated.is_empty(),
            binding,
            violated,
        })
    }

    pub fn contains(&self, rates: &[f64]) -> bool {
        self.membership(rates).is_ok_and(|m| m.member)
    }
}

//! Three descriptions with constraints on `D1, D2, D3, D12, D23` only.
//!
//! Descriptions 1 and 3 share a common codeword `V13`; description 2 is
//! correlated with description 1 through its quantization noise. The
//! completeness locus is `D23 = D23*(D1, D2, D3, D12)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::covariance::noise_variance;
use super::ozarow::{check_unit, excess_rate_bits, rate_bits, rho12_star};
use crate::error::{domain, Error, Result};
use crate::region::{CornerPoint, Halfspace, RateRegion};

/// Slack below which an auxiliary rate is treated as exactly zero.
const ZERO_RATE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeDescDistortions {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d12: f64,
    pub d23: f64,
}

impl ThreeDescDistortions {
    pub fn new(d1: f64, d2: f64, d3: f64, d12: f64, d23: f64) -> Result<Self> {
        for (name, d) in [("D1", d1), ("D2", d2), ("D3", d3), ("D12", d12), ("D23", d23)] {
            check_unit(name, d)?;
        }
        if d12 > d1.min(d2) {
            return domain(format!("D12 = {d12} exceeds min(D1, D2) = {}", d1.min(d2)));
        }
        if d23 > d2.min(d3) {
            return domain(format!("D23 = {d23} exceeds min(D2, D3) = {}", d2.min(d3)));
        }
        Ok(Self { d1, d2, d3, d12, d23 })
    }

    /// Relabel descriptions 1 and 3.
    pub fn swapped(&self) -> Self {
        Self {
            d1: self.d3,
            d2: self.d2,
            d3: self.d1,
            d12: self.d23,
            d23: self.d12,
        }
    }

    fn require_role_order(&self) -> Result<()> {
        if self.d3 < self.d1 {
            return Err(Error::RoleOrder { d1: self.d1, d3: self.d3 });
        }
        Ok(())
    }
}

/// The joint distortion of descriptions 2 and 3 that the shared-codeword
/// construction delivers at no extra cost.
pub fn d23_star(d1: f64, d2: f64, d3: f64, d12: f64) -> Result<f64> {
    for (name, d) in [("D1", d1), ("D2", d2), ("D3", d3), ("D12", d12)] {
        check_unit(name, d)?;
    }
    if d3 < d1 {
        return Err(Error::RoleOrder { d1, d3 });
    }
    let rho12 = rho12_star(d1, d2, d12)?;
    if d3 >= 1.0 {
        return Ok(d2);
    }
    if d2 >= 1.0 {
        return Ok(d3);
    }
    let (s1, s2, s3) = (noise_variance(d1), noise_variance(d2), noise_variance(d3));
    let rho = rho12 * (s1 / s3).sqrt();
    let num = s2 * s3 * (1.0 - rho * rho);
    Ok(num / (num + s2 + s3 - 2.0 * rho * (s2 * s3).sqrt()))
}

/// Zero-correlation value of [`d23_star`]: `D2 D3 / (D2 + D3 - D2 D3)`.
pub fn d23_max(d2: f64, d3: f64) -> f64 {
    d2 * d3 / (d2 + d3 - d2 * d3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CornerLabel {
    P123,
    P132,
    P213,
    P231,
    P312,
    P321,
}

impl CornerLabel {
    pub const ALL: [CornerLabel; 6] = [
        CornerLabel::P123,
        CornerLabel::P132,
        CornerLabel::P213,
        CornerLabel::P231,
        CornerLabel::P312,
        CornerLabel::P321,
    ];

    /// Order in which the rates are minimized, as zero-based description indices.
    pub fn order(self) -> [usize; 3] {
        match self {
            Self::P123 => [0, 1, 2],
            Self::P132 => [0, 2, 1],
            Self::P213 => [1, 0, 2],
            Self::P231 => [1, 2, 0],
            Self::P312 => [2, 0, 1],
            Self::P321 => [2, 1, 0],
        }
    }
}

impl fmt::Display for CornerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for CornerLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown corner label {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeRegion {
    pub distortions: ThreeDescDistortions,
    pub delta12_bits: f64,
    pub delta23_bits: f64,
    pub region: RateRegion,
}

impl ThreeRegion {
    pub fn corner(&self, label: CornerLabel) -> [f64; 3] {
        let [b1, b2, b3] = self.side_rates();
        let (p12, p23) = (self.delta12_bits, self.delta23_bits);
        match label {
            CornerLabel::P213 | CornerLabel::P231 => [b1 + p12, b2, b3 + p23],
            CornerLabel::P132 | CornerLabel::P312 => [b1, b2 + p12.max(p23), b3],
            CornerLabel::P123 => [b1, b2 + p12, b3 + (p23 - p12).max(0.0)],
            CornerLabel::P321 => [b1 + (p12 - p23).max(0.0), b2 + p23, b3],
        }
    }

    pub fn side_rates(&self) -> [f64; 3] {
        let d = &self.distortions;
        [rate_bits(d.d1), rate_bits(d.d2), rate_bits(d.d3)]
    }

    /// Smallest `R1 + R2 + R3` in the region.
    pub fn min_sum_rate_bits(&self) -> f64 {
        self.side_rates().iter().sum::<f64>() + self.delta12_bits.max(self.delta23_bits)
    }
}

/// The region `R_i >= ½ log 1/D_i`, `R1 + R2 >= ½ log 1/(D1 D2) + δ12`,
/// `R2 + R3 >= ½ log 1/(D2 D3) + δ23`, with its six corner points.
pub fn three_region(d: ThreeDescDistortions) -> Result<ThreeRegion> {
    let delta12_bits = excess_rate_bits(d.d1, d.d2, d.d12)?;
    let delta23_bits = excess_rate_bits(d.d2, d.d3, d.d23)?;
    let (b1, b2, b3) = (rate_bits(d.d1), rate_bits(d.d2), rate_bits(d.d3));
    let region = RateRegion::new(
        3,
        vec![
            Halfspace::new("R1", vec![1.0, 0.0, 0.0], b1),
            Halfspace::new("R2", vec![0.0, 1.0, 0.0], b2),
            Halfspace::new("R3", vec![0.0, 0.0, 1.0], b3),
            Halfspace::new("R1+R2", vec![1.0, 1.0, 0.0], b1 + b2 + delta12_bits),
            Halfspace::new("R2+R3", vec![0.0, 1.0, 1.0], b2 + b3 + delta23_bits),
        ],
    );
    let mut out = ThreeRegion {
        distortions: d,
        delta12_bits,
        delta23_bits,
        region,
    };
    out.region.corner_points = corner_points(&out);
    Ok(out)
}

pub fn corner_points(region: &ThreeRegion) -> Vec<CornerPoint> {
    CornerLabel::ALL
        .into_iter()
        .map(|label| CornerPoint {
            label: label.to_string(),
            rates: region.corner(label).to_vec(),
        })
        .collect()
}

/// Rates of the codebooks behind a three-description point: the shared
/// codeword in descriptions 1 and 3, and the base layers of 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuxAssignment3 {
    pub r13_shared: f64,
    pub r1_base: f64,
    pub r2_base: f64,
}

impl AuxAssignment3 {
    /// `(R1, R2, R3) = (shared + base1, base2, shared)`.
    pub fn description_rates(&self) -> [f64; 3] {
        [self.r13_shared + self.r1_base, self.r2_base, self.r13_shared]
    }

    fn as_vector(&self) -> [f64; 3] {
        [self.r13_shared, self.r1_base, self.r2_base]
    }
}

/// Lower bounds on the auxiliary rates, over `(shared, base1, base2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuxBounds3 {
    pub shared: f64,
    pub base2: f64,
    pub shared_base1: f64,
    pub shared_base2: f64,
    pub total: f64,
}

impl AuxBounds3 {
    pub fn halfspaces(&self) -> Vec<Halfspace> {
        vec![
            Halfspace::new("shared", vec![1.0, 0.0, 0.0], self.shared),
            Halfspace::new("base2", vec![0.0, 0.0, 1.0], self.base2),
            Halfspace::new("shared+base1", vec![1.0, 1.0, 0.0], self.shared_base1),
            Halfspace::new("shared+base2", vec![1.0, 0.0, 1.0], self.shared_base2),
            Halfspace::new("shared+base1+base2", vec![1.0, 1.0, 1.0], self.total),
        ]
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.shared, self.base2, self.shared_base1, self.shared_base2, self.total]
    }

    /// Labels of the bounds `a` violates by more than `tol`.
    pub fn violations(&self, a: &AuxAssignment3, tol: f64) -> Vec<String> {
        let v = a.as_vector();
        let mut out: Vec<String> = self
            .halfspaces()
            .into_iter()
            .filter(|h| h.slack(&v) < -tol)
            .map(|h| h.label)
            .collect();
        if v.iter().any(|&r| r < -tol) {
            out.push("nonnegative".into());
        }
        out
    }
}

/// Closed-form auxiliary-rate bounds of the shared-codeword construction for `D1 <= D3`.
pub fn aux_bounds(d: ThreeDescDistortions) -> Result<AuxBounds3> {
    d.require_role_order()?;
    let star = d23_star(d.d1, d.d2, d.d3, d.d12)?;
    let delta23 = excess_rate_bits(d.d2, d.d3, star)?;
    let delta12 = excess_rate_bits(d.d1, d.d2, d.d12)?;
    let (b1, b2, b3) = (rate_bits(d.d1), rate_bits(d.d2), rate_bits(d.d3));
    Ok(AuxBounds3 {
        shared: b3,
        base2: b2,
        shared_base1: b1,
        shared_base2: b2 + b3 + delta23,
        total: b1 + b2 + delta12,
    })
}

/// Split a corner of the region into shared and base codebook rates.
///
/// The shared codeword carries all of description 3, so descriptions 1 and 2
/// take the rest as base layers.
pub fn aux_assignment(label: CornerLabel, d: ThreeDescDistortions) -> Result<AuxAssignment3> {
    d.require_role_order()?;
    let region = three_region(d)?;
    let [r1, r2, r3] = region.corner(label);
    let mut r1_base = r1 - r3;
    if r1_base < 0.0 {
        if r1_base < -ZERO_RATE_SLACK {
            return Err(Error::Infeasible(format!(
                "corner {label} needs a negative base rate {r1_base} for description 1"
            )));
        }
        r1_base = 0.0;
    }
    Ok(AuxAssignment3 {
        r13_shared: r3,
        r1_base,
        r2_base: r2,
    })
}

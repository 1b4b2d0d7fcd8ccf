//! Two-description quadratic Gaussian coding with correlated quantization noise.
//!
//! The source is unit variance. Description `i` is the test channel
//! `U_i = X + W_i` with `Var(W_i) = D_i / (1 - D_i)`; the two noises are
//! negatively correlated to push the joint MMSE below what independent
//! noises give.

use nalgebra::DMatrix;
use serde::Serialize;

use super::covariance::{conditional_variance, noise_variance};
use crate::error::{domain, Error, Result};
use crate::region::{Halfspace, RateRegion};

/// Side and joint distortions for a pair of descriptions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoDescDistortions {
    pub d1: f64,
    pub d2: f64,
    pub d12: f64,
}

impl TwoDescDistortions {
    pub fn new(d1: f64, d2: f64, d12: f64) -> Result<Self> {
        for (name, d) in [("D1", d1), ("D2", d2), ("D12", d12)] {
            check_unit(name, d)?;
        }
        Ok(Self { d1, d2, d12 })
    }
}

pub(crate) fn check_unit(name: &str, d: f64) -> Result<()> {
    if !(d > 0.0 && d <= 1.0) {
        return domain(format!("{name} = {d} outside (0, 1]"));
    }
    Ok(())
}

/// `½ log₂(1/D)`, the rate of a unit-variance Gaussian at MSE `D`.
pub fn rate_bits(d: f64) -> f64 {
    0.5 * (1.0 / d).log2()
}

/// Largest joint distortion that needs no correlation: `D1 D2 / (D1 + D2 - D1 D2)`.
pub fn d12_max(d1: f64, d2: f64) -> f64 {
    d1 * d2 / (d1 + d2 - d1 * d2)
}

/// The correlated-quantization parameters for one distortion triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OzarowParams {
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub pi: f64,
    pub gamma: f64,
    pub d12_max: f64,
    pub rho12_star: f64,
    pub delta_bits: f64,
}

/// Optimal noise correlation `ρ₁₂*` for `(D1, D2, D12)`.
///
/// Zero when `D12 >= D12max`. Errors when the joint target is unreachable.
pub fn rho12_star(d1: f64, d2: f64, d12: f64) -> Result<f64> {
    Ok(closed_form(d1, d2, d12)?.0)
}

/// Returns `(rho, gamma, pi)`.
fn closed_form(d1: f64, d2: f64, d12: f64) -> Result<(f64, f64, f64)> {
    TwoDescDistortions::new(d1, d2, d12)?;
    let pi = (1.0 - d1) * (1.0 - d2);
    let gamma = (1.0 - d12) * ((d1 - d12) * (d2 - d12) + d12 * d1 * d2 - d12 * d12);
    if d12 >= d12_max(d1, d2) {
        return Ok((0.0, gamma, pi));
    }
    if d1 >= 1.0 || d2 >= 1.0 {
        return Err(Error::Infeasible(format!(
            "D12 = {d12} below the single remaining description's distortion"
        )));
    }
    if gamma < 0.0 {
        return Err(Error::Infeasible(format!("gamma = {gamma} < 0 for D12 = {d12}")));
    }
    let base = pi * d12 * d12;
    let rho = -((base + gamma).sqrt() - base.sqrt()) / ((1.0 - d12) * (d1 * d2).sqrt());
    if !(rho.abs() < 1.0) {
        return Err(Error::Infeasible(format!("|rho12*| = {} >= 1 for D12 = {d12}", rho.abs())));
    }
    Ok((rho, gamma, pi))
}

/// Excess sum rate `δ(D1, D2, D12) = ½ log₂ 1/(1 - ρ₁₂*²)` in bits.
///
/// Unlike [`ozarow_params`] this accepts `D_i = 1` (an empty description),
/// where no correlation is needed.
pub fn excess_rate_bits(d1: f64, d2: f64, d12: f64) -> Result<f64> {
    let rho = rho12_star(d1, d2, d12)?;
    Ok(0.5 * (1.0 / (1.0 - rho * rho)).log2())
}

pub fn ozarow_params(d: TwoDescDistortions) -> Result<OzarowParams> {
    if d.d1 >= 1.0 || d.d2 >= 1.0 {
        return domain("ozarow parameters need D1, D2 < 1 (finite noise variance)");
    }
    let (rho, gamma, pi) = closed_form(d.d1, d.d2, d.d12)?;
    Ok(OzarowParams {
        sigma1_sq: noise_variance(d.d1),
        sigma2_sq: noise_variance(d.d2),
        pi,
        gamma,
        d12_max: d12_max(d.d1, d.d2),
        rho12_star: rho,
        delta_bits: 0.5 * (1.0 / (1.0 - rho * rho)).log2(),
    })
}

/// Covariance of `(X, U1, U2)` for side distortions `D1, D2` and noise correlation `rho`.
pub fn two_channel_covariance(d1: f64, d2: f64, rho: f64) -> Result<DMatrix<f64>> {
    for (name, d) in [("D1", d1), ("D2", d2)] {
        if !(d > 0.0 && d < 1.0) {
            return domain(format!("{name} = {d} outside (0, 1)"));
        }
    }
    if !(rho.abs() < 1.0) {
        return domain(format!("correlation {rho} outside (-1, 1)"));
    }
    let (s1, s2) = (noise_variance(d1), noise_variance(d2));
    let c12 = 1.0 + rho * (s1 * s2).sqrt();
    Ok(DMatrix::from_row_slice(
        3,
        3,
        &[1.0, 1.0, 1.0, 1.0, 1.0 + s1, c12, 1.0, c12, 1.0 + s2],
    ))
}

/// `Var(X | X + W1, X + W2)`; the joint MMSE reached with correlation `rho`.
pub fn achieved_d12(d1: f64, d2: f64, rho: f64) -> Result<f64> {
    let cov = two_channel_covariance(d1, d2, rho)?;
    conditional_variance(&cov, 0, &[1, 2])
}

/// Whether the no-excess-rate regime `D12 <= D1 + D2 - 1` applies, with its region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoExcessRegion {
    pub applies: bool,
    pub region: Option<RateRegion>,
}

pub fn no_excess_region(d: TwoDescDistortions) -> NoExcessRegion {
    let applies = d.d12 <= d.d1 + d.d2 - 1.0;
    let region = applies.then(|| {
        RateRegion::new(
            2,
            vec![
                Halfspace::new("R1", vec![1.0, 0.0], rate_bits(d.d1)),
                Halfspace::new("R2", vec![0.0, 1.0], rate_bits(d.d2)),
                Halfspace::new("R1+R2", vec![1.0, 1.0], rate_bits(d.d12)),
            ],
        )
    });
    NoExcessRegion { applies, region }
}

/// The two-description region: side rates and the correlated-noise sum bound,
/// or the no-excess region when `D12 <= D1 + D2 - 1`.
pub fn two_region(d: TwoDescDistortions) -> Result<RateRegion> {
    if let Some(region) = no_excess_region(d).region {
        return Ok(region);
    }
    let delta = excess_rate_bits(d.d1, d.d2, d.d12)?;
    Ok(RateRegion::new(
        2,
        vec![
            Halfspace::new("R1", vec![1.0, 0.0], rate_bits(d.d1)),
            Halfspace::new("R2", vec![0.0, 1.0], rate_bits(d.d2)),
            Halfspace::new("R1+R2", vec![1.0, 1.0], rate_bits(d.d1) + rate_bits(d.d2) + delta),
        ],
    ))
}

/// `P0 = (½ log 1/D1, ½ log D1/D12)`: description 1 at its rate-distortion
/// optimum, description 2 refining it to `D12`.
pub fn corner_point_p0(d1: f64, d12: f64) -> Result<[f64; 2]> {
    check_unit("D1", d1)?;
    check_unit("D12", d12)?;
    if d12 > d1 {
        return domain(format!("P0 needs D12 <= D1, got D12 = {d12} > D1 = {d1}"));
    }
    Ok([rate_bits(d1), 0.5 * (d1 / d12).log2()])
}

/// Sum rate of the best independent-noise scheme against the correlated bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IndependentGap {
    /// `D12 >= D12max`: independent noises already meet every target.
    Degenerate { ozarow_bound_bits: f64 },
    Gap {
        independent_bits: f64,
        ozarow_bound_bits: f64,
        gap_bits: f64,
        /// Side distortions the independent scheme settles on.
        side_d1: f64,
        side_d2: f64,
    },
}

impl IndependentGap {
    pub fn gap_bits(&self) -> f64 {
        match self {
            Self::Degenerate { .. } => 0.0,
            Self::Gap { gap_bits, .. } => *gap_bits,
        }
    }
}

const OBJECTIVE_TOLERANCE: f64 = 1e-10;

/// Minimum sum rate `½ log₂ 1/(d1 d2)` over independent noises (`ρ = 0`) with
/// `d1 <= D1`, `d2 <= D2` and joint MMSE at most `D12`.
pub fn independent_sum_rate(d: TwoDescDistortions) -> Result<IndependentGap> {
    let ozarow_bound_bits = rate_bits(d.d1) + rate_bits(d.d2) + excess_rate_bits(d.d1, d.d2, d.d12)?;
    if d.d12 >= d12_max(d.d1, d.d2) {
        return Ok(IndependentGap::Degenerate { ozarow_bound_bits });
    }
    // With independent noises 1/D12 = 1/d1 + 1/d2 - 1. Tighten d2 just enough
    // for each candidate d1; below d1_lo the cap d2 <= D2 stops binding and
    // the objective only grows.
    let c = 1.0 + 1.0 / d.d12;
    let d1_lo = 1.0 / (c - 1.0 / d.d2);
    let d1_hi = d.d1;
    let side2 = |d1: f64| (1.0 / (c - 1.0 / d1)).min(d.d2);
    let objective = |d1: f64| 0.5 * (1.0 / (d1 * side2(d1))).log2();
    let best_d1 = minimize_scalar(objective, d1_lo, d1_hi, OBJECTIVE_TOLERANCE);
    let independent_bits = objective(best_d1);
    Ok(IndependentGap::Gap {
        independent_bits,
        ozarow_bound_bits,
        gap_bits: independent_bits - ozarow_bound_bits,
        side_d1: best_d1,
        side_d2: side2(best_d1),
    })
}

/// Deterministic scan-then-golden-section minimizer on `[lo, hi]`.
///
/// The objective here can be concave along the constraint curve, so the
/// endpoints are always candidates and the bracket comes from a coarse scan.
fn minimize_scalar(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    if !(hi > lo) {
        return lo;
    }
    const SCAN: usize = 256;
    let step = (hi - lo) / SCAN as f64;
    let grid = |i: usize| if i == SCAN { hi } else { lo + step * i as f64 };
    let best_i = (0..=SCAN)
        .min_by(|&a, &b| f(grid(a)).total_cmp(&f(grid(b))))
        .unwrap_or(0);
    let (mut a, mut b) = (grid(best_i.saturating_sub(1)), grid((best_i + 1).min(SCAN)));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a) > 1e-15 * (1.0 + a.abs()) && (f1 - f2).abs() > tol * 1e-3 || (b - a) > 1e-9 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
        if (b - a) <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    [lo, hi, x1, x2, grid(best_i)]
        .into_iter()
        .min_by(|&p, &q| f(p).total_cmp(&f(q)))
        .unwrap_or(lo)
}

//! Which optimality statement applies at a given `(D12, D23)`.

use rayon::prelude::*;
use serde::Serialize;

use super::cms3::{d23_max, d23_star, three_region, ThreeDescDistortions};
use super::ozarow::d12_max;
use crate::error::{domain, Result};

/// Absolute tolerance on `|D23 - D23*|` for the complete-region label.
pub const COMPLETE_REGION_TOLERANCE: f64 = 1e-9;
/// Slack on the distortion comparison `D23 >= D23*`.
pub const DISTORTION_SLACK: f64 = 1e-9;
/// Slack, in bits, on the excess-rate comparison `δ23 >= δ12`.
pub const EXCESS_RATE_SLACK_BITS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RegimeLabel {
    CompleteRegion,
    IndependentOptimal,
    MinSumRate,
    Unclassified,
    Infeasible,
}

impl RegimeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CompleteRegion => "CompleteRegion",
            Self::IndependentOptimal => "IndependentOptimal",
            Self::MinSumRate => "MinSumRate",
            Self::Unclassified => "Unclassified",
            Self::Infeasible => "Infeasible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    pub label: RegimeLabel,
    pub complete_region: bool,
    pub min_sum_rate: bool,
    pub independent_optimal: bool,
    /// `D23 >= D23*`, evaluated after any relabeling.
    pub condition_distortion: bool,
    /// `δ23 >= δ12`, evaluated after any relabeling.
    pub condition_excess_rate: bool,
    /// Descriptions 1 and 3 were relabeled because `D1 > D3`.
    pub swapped: bool,
    /// Completeness threshold on `D23`; absent when relabeled.
    pub d23_star: Option<f64>,
    /// Completeness threshold on `D12`; present only when relabeled.
    pub d12_star: Option<f64>,
    pub delta12_bits: Option<f64>,
    pub delta23_bits: Option<f64>,
    pub min_sum_rate_bits: Option<f64>,
}

impl RegimeReport {
    fn infeasible(swapped: bool) -> Self {
        Self {
            label: RegimeLabel::Infeasible,
            complete_region: false,
            min_sum_rate: false,
            independent_optimal: false,
            condition_distortion: false,
            condition_excess_rate: false,
            swapped,
            d23_star: None,
            d12_star: None,
            delta12_bits: None,
            delta23_bits: None,
            min_sum_rate_bits: None,
        }
    }
}

/// Classify one distortion tuple. Tuples with `D1 > D3` are relabeled first.
pub fn classify_regime(d: ThreeDescDistortions) -> RegimeReport {
    if d.d1 > d.d3 {
        let mut r = classify_ordered(d.swapped(), true);
        r.d12_star = r.d23_star.take();
        std::mem::swap(&mut r.delta12_bits, &mut r.delta23_bits);
        r
    } else {
        classify_ordered(d, false)
    }
}

fn classify_ordered(d: ThreeDescDistortions, swapped: bool) -> RegimeReport {
    let (Ok(star), Ok(region)) = (d23_star(d.d1, d.d2, d.d3, d.d12), three_region(d)) else {
        return RegimeReport::infeasible(swapped);
    };
    let (delta12, delta23) = (region.delta12_bits, region.delta23_bits);
    let complete_region = (d.d23 - star).abs() <= COMPLETE_REGION_TOLERANCE;
    let condition_distortion = d.d23 >= star - DISTORTION_SLACK;
    let condition_excess_rate = delta23 >= delta12 - EXCESS_RATE_SLACK_BITS;
    let independent_optimal = d.d12 >= d12_max(d.d1, d.d2) && d.d23 >= d23_max(d.d2, d.d3);
    let min_sum_rate = complete_region || condition_distortion || condition_excess_rate;
    let label = if complete_region {
        RegimeLabel::CompleteRegion
    } else if independent_optimal {
        RegimeLabel::IndependentOptimal
    } else if min_sum_rate {
        RegimeLabel::MinSumRate
    } else {
        RegimeLabel::Unclassified
    };
    RegimeReport {
        label,
        complete_region,
        min_sum_rate,
        independent_optimal,
        condition_distortion,
        condition_excess_rate,
        swapped,
        d23_star: Some(star),
        d12_star: None,
        delta12_bits: Some(delta12),
        delta23_bits: Some(delta23),
        min_sum_rate_bits: min_sum_rate.then(|| region.min_sum_rate_bits()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeCell {
    pub d12: f64,
    pub d23: f64,
    pub report: RegimeReport,
}

/// Uniform grid axis `max · i / steps` for `i = 1..=steps`.
pub fn grid_axis(max: f64, steps: usize) -> Vec<f64> {
    (1..=steps).map(|i| max * (i as f64 / steps as f64)).collect()
}

/// Classify every cell of the `(D12, D23)` grid over `(0, min(D1, D2)] × (0, min(D2, D3)]`.
///
/// Rows are ordered with `D12` in the outer loop.
pub fn regime_map(d1: f64, d2: f64, d3: f64, d12_steps: usize, d23_steps: usize) -> Result<Vec<RegimeCell>> {
    if d12_steps < 2 || d23_steps < 2 {
        return domain(format!("grid needs at least 2 steps per axis, got {d12_steps} x {d23_steps}"));
    }
    let d12_axis = grid_axis(d1.min(d2), d12_steps);
    let d23_axis = grid_axis(d2.min(d3), d23_steps);
    // validates D1, D2, D3 once
    ThreeDescDistortions::new(d1, d2, d3, d12_axis[0], d23_axis[0])?;
    let cells: Vec<(f64, f64)> = d12_axis
        .iter()
        .flat_map(|&a| d23_axis.iter().map(move |&b| (a, b)))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(d12, d23)| {
            let report = match ThreeDescDistortions::new(d1, d2, d3, d12, d23) {
                Ok(d) => classify_regime(d),
                Err(_) => RegimeReport::infeasible(d1 > d3),
            };
            RegimeCell { d12, d23, report }
        })
        .collect())
}

use std::fs;
use std::path::Path;

use log::{debug, info};
use serde::Serialize;

use mdregions::discrete::{cms_constraints, expected_distortion, rate_feasible_with, PmfDocument, RateTuple};
use mdregions::gaussian::{
    aux_assignment, d23_star, independent_sum_rate, no_excess_region, ozarow_params, regime_map, three_region,
    two_region, AuxAssignment3, CornerLabel, IndependentGap, OzarowParams, ThreeDescDistortions, TestChannelSpec3,
    TwoChannelSpec, TwoDescDistortions,
};
use mdregions::lattice::enumerate_q_star;
use mdregions::mc::{simulate, validate_rate_bounds, RateBoundReport, SimConfig, SimReport, SimSpec};
use mdregions::{Error, RateRegion, Result};

use crate::args::{
    DiscreteArgs, McArgs, MembershipArgs, OptionalThree, QStarArgs, RegimeArgs, ThreeArgs, TwoArgs,
};
use crate::output::{json, number, opt, Table};

/// A finished document and the exit status it carries.
pub struct Outcome {
    pub text: String,
    pub status: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, status: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn three(a: &ThreeArgs) -> Result<ThreeDescDistortions> {
    ThreeDescDistortions::new(a.d1, a.d2, a.d3, a.d12, a.d23)
}

#[derive(Serialize)]
struct TwoRegionDoc {
    params: OzarowParams,
    no_excess: bool,
    independent: IndependentGap,
    #[serde(flatten)]
    region: RateRegion,
}

pub fn two_region_cmd(a: &TwoArgs) -> Result<Outcome> {
    let d = TwoDescDistortions::new(a.d1, a.d2, a.d12)?;
    if d.d12 > d.d1.min(d.d2) {
        return Err(Error::Domain(format!("D12 = {} exceeds min(D1, D2)", d.d12)));
    }
    let params = ozarow_params(d)?;
    let region = two_region(d)?;
    info!("two-region: rho12* = {}, delta = {} bits", params.rho12_star, params.delta_bits);
    if a.csv {
        return Ok(Outcome::ok(region_csv(&region)));
    }
    Ok(Outcome::ok(json(&TwoRegionDoc {
        params,
        no_excess: no_excess_region(d).applies,
        independent: independent_sum_rate(d)?,
        region,
    })))
}

fn region_csv(region: &RateRegion) -> String {
    let mut header = vec!["constraint".to_string()];
    header.extend((1..=region.dimension).map(|i| format!("r{i}")));
    header.push("bound_bits".into());
    let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for h in &region.halfspaces {
        let mut row = vec![h.label.clone()];
        row.extend(h.coefficients.iter().map(|c| number(*c)));
        row.push(number(h.bound_bits));
        t.row(row);
    }
    t.finish()
}

#[derive(Serialize)]
struct ThreeRegionDoc {
    distortions: ThreeDescDistortions,
    delta12_bits: f64,
    delta23_bits: f64,
    min_sum_rate_bits: f64,
    #[serde(flatten)]
    region: RateRegion,
}

pub fn three_region_cmd(a: &ThreeArgs) -> Result<Outcome> {
    let r = three_region(three(a)?)?;
    if a.csv {
        return Ok(Outcome::ok(region_csv(&r.region)));
    }
    Ok(Outcome::ok(json(&ThreeRegionDoc {
        distortions: r.distortions,
        delta12_bits: r.delta12_bits,
        delta23_bits: r.delta23_bits,
        min_sum_rate_bits: r.min_sum_rate_bits(),
        region: r.region,
    })))
}

/// Codebook rates of a corner, keyed by description number.
#[derive(Serialize)]
struct AuxDoc {
    shared13_bits: f64,
    /// Base layer of whichever of descriptions 1 and 3 has the smaller distortion.
    base_outer: (u8, f64),
    base2_bits: f64,
}

#[derive(Serialize)]
struct CornerDoc {
    label: String,
    rates: [f64; 3],
    aux: AuxDoc,
}

/// The label of the same corner after exchanging descriptions 1 and 3.
fn relabel(label: CornerLabel) -> CornerLabel {
    match label {
        CornerLabel::P123 => CornerLabel::P321,
        CornerLabel::P132 => CornerLabel::P312,
        CornerLabel::P213 => CornerLabel::P231,
        CornerLabel::P231 => CornerLabel::P213,
        CornerLabel::P312 => CornerLabel::P132,
        CornerLabel::P321 => CornerLabel::P123,
    }
}

pub fn corner_points_cmd(a: &ThreeArgs) -> Result<Outcome> {
    let d = three(a)?;
    let region = three_region(d)?;
    let swapped = d.d1 > d.d3;
    let mut docs = Vec::new();
    for label in CornerLabel::ALL {
        let aux: AuxAssignment3 = if swapped {
            aux_assignment(relabel(label), d.swapped())?
        } else {
            aux_assignment(label, d)?
        };
        docs.push(CornerDoc {
            label: label.to_string(),
            rates: region.corner(label),
            aux: AuxDoc {
                shared13_bits: aux.r13_shared,
                base_outer: (if swapped { 3 } else { 1 }, aux.r1_base),
                base2_bits: aux.r2_base,
            },
        });
    }
    if a.csv {
        let mut t = Table::new(&["label", "r1", "r2", "r3", "shared13_bits", "base1_bits", "base2_bits", "base3_bits"]);
        for c in &docs {
            let (outer, base) = c.aux.base_outer;
            t.row([
                c.label.clone(),
                number(c.rates[0]),
                number(c.rates[1]),
                number(c.rates[2]),
                number(c.aux.shared13_bits),
                if outer == 1 { number(base) } else { String::new() },
                number(c.aux.base2_bits),
                if outer == 3 { number(base) } else { String::new() },
            ]);
        }
        return Ok(Outcome::ok(t.finish()));
    }
    Ok(Outcome::ok(json(&docs)))
}

fn region_from_flags(f: &OptionalThree) -> Result<RateRegion> {
    let named = [("--d1", f.d1), ("--d2", f.d2), ("--d3", f.d3), ("--d12", f.d12), ("--d23", f.d23)];
    if let Some((flag, _)) = named.iter().find(|(_, v)| v.is_none()) {
        return Err(Error::Domain(format!("membership needs --region or all of --d1..--d23; missing {flag}")));
    }
    let v: Vec<f64> = named.iter().map(|(_, v)| v.unwrap_or_default()).collect();
    Ok(three_region(ThreeDescDistortions::new(v[0], v[1], v[2], v[3], v[4])?)?.region)
}

pub fn membership_cmd(a: &MembershipArgs) -> Result<Outcome> {
    let region = match &a.region {
        Some(path) => RateRegion::from_json(&read(path)?)?,
        None => region_from_flags(&a.distortions)?,
    };
    Ok(Outcome::ok(json(&region.membership(&a.rates.0)?)))
}

pub fn regime_map_cmd(a: &RegimeArgs) -> Result<Outcome> {
    let cells = regime_map(a.d1, a.d2, a.d3, a.d12_steps, a.d23_steps)?;
    info!("regime-map: {} cells", cells.len());
    let mut t = Table::new(&[
        "d12",
        "d23",
        "label",
        "d23_star",
        "delta12_bits",
        "delta23_bits",
        "min_sum_rate_bits",
    ]);
    for c in &cells {
        let r = &c.report;
        t.row([
            number(c.d12),
            number(c.d23),
            r.label.as_str().to_string(),
            opt(r.d23_star),
            opt(r.delta12_bits),
            opt(r.delta23_bits),
            opt(r.min_sum_rate_bits),
        ]);
    }
    Ok(Outcome::ok(t.finish()))
}

#[derive(Serialize)]
struct McDoc {
    pass: bool,
    swapped: bool,
    simulation: SimReport,
    rate_bounds: Option<RateBoundReport>,
}

pub fn mc_validate_cmd(a: &McArgs) -> Result<Outcome> {
    let (spec, bounds, swapped) = if a.two {
        let d = TwoDescDistortions::new(a.d1, a.d2, a.d12)?;
        (SimSpec::Two(TwoChannelSpec::optimal(d)?), None, false)
    } else {
        let d3 = a.d3.ok_or_else(|| Error::Domain("--d3 is required without --two".into()))?;
        let (d1, d3_) = (a.d1, d3);
        let swapped = d1 > d3_;
        let star = if swapped { None } else { Some(d23_star(d1, a.d2, d3_, a.d12)?) };
        let d = match (a.d23, star) {
            (Some(d23), _) => ThreeDescDistortions::new(d1, a.d2, d3_, a.d12, d23)?,
            (None, Some(s)) => ThreeDescDistortions::new(d1, a.d2, d3_, a.d12, s)?,
            (None, None) => return Err(Error::Domain("--d23 is required when D1 > D3".into())),
        };
        let d = if swapped { d.swapped() } else { d };
        let spec: TestChannelSpec3 = mdregions::gaussian::test_channels(d.d1, d.d2, d.d3, d.d12)?;
        (SimSpec::Three(spec), Some(validate_rate_bounds(&spec, d)?), swapped)
    };
    debug!("mc-validate spec: {spec:?}");
    let simulation = simulate(&SimConfig::new(a.n, a.seed, spec)?)?;
    let pass = simulation.pass && bounds.as_ref().is_none_or(|b| b.pass);
    info!("mc-validate: pass = {pass}");
    Ok(Outcome {
        text: json(&McDoc {
            pass,
            swapped,
            simulation,
            rate_bounds: bounds,
        }),
        status: if pass { 0 } else { 2 },
    })
}

#[derive(Serialize)]
struct ConstraintDoc {
    #[serde(rename = "Q")]
    family: String,
    support: String,
    bound_bits: f64,
}

#[derive(Serialize)]
struct DistortionDoc {
    decoder: String,
    map: Vec<usize>,
    expected: f64,
}

#[derive(Serialize)]
struct DiscreteDoc {
    constraints: Vec<ConstraintDoc>,
    distortions: Vec<DistortionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasibility: Option<mdregions::discrete::Feasibility>,
}

pub fn discrete_eval_cmd(a: &DiscreteArgs) -> Result<Outcome> {
    let doc = PmfDocument::from_json(&read(&a.pmf)?)?;
    let pmf = doc.pmf()?;
    let constraints = cms_constraints(&pmf)?;
    info!("discrete-eval: {} constraints", constraints.len());
    let rows: Vec<ConstraintDoc> = constraints
        .iter()
        .map(|c| ConstraintDoc {
            family: c.family.to_string(),
            support: c.support_label(),
            bound_bits: c.bound_bits,
        })
        .collect();
    if a.csv {
        let mut t = Table::new(&["Q", "support", "bound_bits"]);
        for r in &rows {
            t.row([r.family.clone(), r.support.clone(), number(r.bound_bits)]);
        }
        return Ok(Outcome::ok(t.finish()));
    }
    let distortions = doc
        .reconstructions(&pmf)?
        .into_iter()
        .map(|r| {
            Ok(DistortionDoc {
                decoder: r.decoder.to_string(),
                expected: expected_distortion(&pmf, &r)?,
                map: r.map,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let feasibility = match &a.rates {
        Some(r) => Some(rate_feasible_with(&RateTuple(r.0.clone()), pmf.channels(), &constraints)?),
        None => None,
    };
    Ok(Outcome::ok(json(&DiscreteDoc {
        constraints: rows,
        distortions,
        feasibility,
    })))
}

pub fn q_star_cmd(a: &QStarArgs) -> Result<Outcome> {
    let families = enumerate_q_star(a.channels)?;
    if a.csv {
        let mut t = Table::new(&["index", "Q"]);
        for (i, q) in families.iter().enumerate() {
            t.row([i.to_string(), q.to_string()]);
        }
        return Ok(Outcome::ok(t.finish()));
    }
    Ok(Outcome::ok(json(&serde_json::json!({
        "L": a.channels,
        "count": families.len(),
        "families": families,
    }))))
}

//! The CMS auxiliary-rate constraint system for finite-alphabet auxiliaries.
//!
//! For every up-closed family `Q` the auxiliary rates indexed by `Q` must
//! exceed `alpha(Q)`. Rates are in bits and the strict inequalities are
//! treated as closed.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use serde::Serialize;

use super::pmf::{EntropyCache, JointPmf, VariableRole};
use crate::error::{domain, Error, Result};
use crate::lattice::{
    enumerate_q_star, is_valid_q, nonempty_subsets, singletons_of, strict_supersets, SubsetFamily,
    SubsetId,
};

/// Slack used when checking auxiliary-rate constraints numerically.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Per-description rates `R_1, ..., R_L` in bits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateTuple(pub Vec<f64>);

impl RateTuple {
    /// True when every entry of `self` is at least the matching entry of `other`.
    pub fn dominates(&self, other: &RateTuple) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

/// Shared-codeword rates `R''_S` (`|S| >= 2`) and base-layer rates `R'_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxRateVector {
    channels: u8,
    shared_sets: Vec<SubsetId>,
    shared: Vec<f64>,
    base: Vec<f64>,
}

impl AuxRateVector {
    /// All-zero rates for `L` channels.
    pub fn zeros(channels: u8) -> Result<Self> {
        let shared_sets: Vec<SubsetId> = nonempty_subsets(channels)?.iter().filter(|s| s.len() >= 2).collect();
        Ok(Self {
            channels,
            shared: vec![0.0; shared_sets.len()],
            shared_sets,
            base: vec![0.0; channels as usize],
        })
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    /// Shared sets in canonical order, matching [`AuxRateVector::shared_rates`].
    pub fn shared_sets(&self) -> &[SubsetId] {
        &self.shared_sets
    }

    pub fn shared_rates(&self) -> &[f64] {
        &self.shared
    }

    pub fn base_rates(&self) -> &[f64] {
        &self.base
    }

    pub fn shared(&self, s: SubsetId) -> f64 {
        self.shared_index(s).map_or(0.0, |i| self.shared[i])
    }

    pub fn base(&self, l: u8) -> f64 {
        self.base[(l - 1) as usize]
    }

    pub fn set_shared(&mut self, s: SubsetId, rate: f64) -> Result<()> {
        let i = self
            .shared_index(s)
            .ok_or_else(|| Error::Domain(format!("no shared rate for {s:?} with L = {}", self.channels)))?;
        check_rate(rate)?;
        self.shared[i] = rate;
        Ok(())
    }

    pub fn set_base(&mut self, l: u8, rate: f64) -> Result<()> {
        if l == 0 || l > self.channels {
            return domain(format!("channel {l} outside 1..={}", self.channels));
        }
        check_rate(rate)?;
        self.base[(l - 1) as usize] = rate;
        Ok(())
    }

    /// Entries in witness order: shared rates (canonical), then base rates.
    pub fn entries(&self) -> Vec<f64> {
        self.shared.iter().chain(&self.base).copied().collect()
    }

    fn shared_index(&self, s: SubsetId) -> Option<usize> {
        self.shared_sets.binary_search(&s).ok()
    }
}

impl Serialize for AuxRateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let shared: std::collections::BTreeMap<String, f64> =
            self.shared_sets.iter().zip(&self.shared).map(|(k, v)| (k.to_string(), *v)).collect();
        let base: std::collections::BTreeMap<String, f64> =
            self.base.iter().enumerate().map(|(i, v)| ((i + 1).to_string(), *v)).collect();
        let mut st = s.serialize_struct("AuxRateVector", 2)?;
        st.serialize_field("shared", &shared)?;
        st.serialize_field("base", &base)?;
        st.end()
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate.is_finite() && rate >= 0.0) {
        return domain(format!("auxiliary rate {rate} must be finite and nonnegative"));
    }
    Ok(())
}

/// `R_l = R'_l + sum of R''_S over shared sets S containing l`.
pub fn description_rates(aux: &AuxRateVector) -> RateTuple {
    let rates = (1..=aux.channels)
        .map(|l| {
            let shared: f64 = aux
                .shared_sets
                .iter()
                .zip(&aux.shared)
                .filter(|(s, _)| s.contains(l))
                .map(|(_, r)| r)
                .sum();
            aux.base(l) + shared
        })
        .collect();
    RateTuple(rates)
}

fn shared_vars(sets: impl IntoIterator<Item = SubsetId>) -> Vec<VariableRole> {
    sets.into_iter().filter(|s| s.len() >= 2).map(VariableRole::Shared).collect()
}

/// All nonempty subsets of `k` (the layers `{U}_{2^K - φ}`).
fn subsets_within(k: SubsetId) -> Vec<SubsetId> {
    let mut out = Vec::new();
    let mut sub = k.bits();
    while sub != 0 {
        out.push(SubsetId::from_bits(sub, k.universe()).expect("submask of a valid subset"));
        sub = (sub - 1) & k.bits();
    }
    out.sort();
    out
}

/// Shared sets of cardinality above one that contain `k`.
fn shared_containing(k: SubsetId) -> Vec<SubsetId> {
    let mut sets: Vec<SubsetId> = strict_supersets(k).iter().collect();
    if k.len() >= 2 {
        sets.push(k);
    }
    sets
}

/// The entropy functional bounding the auxiliary rates indexed by `Q`.
///
/// `alpha(∅) = 0`. Variables missing from the table count as constants.
pub fn alpha(pmf: &JointPmf, q: &SubsetFamily) -> Result<f64> {
    alpha_cached(&mut EntropyCache::new(pmf), pmf.channels(), q)
}

fn alpha_cached(cache: &mut EntropyCache<'_>, channels: u8, q: &SubsetFamily) -> Result<f64> {
    if q.is_empty() {
        return Ok(0.0);
    }
    if q.members()[0].universe() != channels {
        return domain(format!("family built for L = {}, table has L = {channels}", q.members()[0].universe()));
    }
    if !is_valid_q(q) {
        return domain(format!("family {q} is not closed under strict supersets"));
    }
    let singles = singletons_of(q);
    let shared_part = q.difference(&singles);
    let layers = singles.channel_union().map(subsets_within).unwrap_or_default();

    let mut total = 0.0;
    for k in shared_part.iter() {
        let given = shared_vars(strict_supersets(k).iter());
        total += cache.conditional(&[VariableRole::Shared(k)], &given)?;
    }
    for &k in &layers {
        let mut given = shared_vars(shared_containing(k));
        given.extend(subsets_within(k).into_iter().filter(|t| *t != k).map(VariableRole::Layer));
        total += cache.conditional(&[VariableRole::Layer(k)], &given)?;
    }
    let mut all = shared_vars(shared_part.iter());
    all.extend(layers.iter().copied().map(VariableRole::Layer));
    total -= cache.conditional(&all, &[VariableRole::Source])?;
    Ok(total)
}

/// One auxiliary-rate constraint: the listed rates must sum to at least `bound_bits`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CmsConstraint {
    pub family: SubsetFamily,
    /// Shared rates `R''_S`, `S ∈ Q - [Q]_1`.
    pub shared: Vec<SubsetId>,
    /// Base rates `R'_l`, `{l} ∈ [Q]_1`.
    pub base: Vec<u8>,
    pub bound_bits: f64,
}

impl CmsConstraint {
    /// The supported rates, e.g. `shared:12;base:1;base:2`.
    pub fn support_label(&self) -> String {
        let parts: Vec<String> = self
            .shared
            .iter()
            .map(|s| format!("shared:{s}"))
            .chain(self.base.iter().map(|l| format!("base:{l}")))
            .collect();
        parts.join(";")
    }

    pub fn lhs(&self, aux: &AuxRateVector) -> f64 {
        self.shared.iter().map(|&s| aux.shared(s)).sum::<f64>() + self.base.iter().map(|&l| aux.base(l)).sum::<f64>()
    }

    pub fn is_satisfied(&self, aux: &AuxRateVector, tol: f64) -> bool {
        self.lhs(aux) >= self.bound_bits - tol
    }
}

/// One constraint per family in `Q*`, in the canonical family order.
pub fn cms_constraints(pmf: &JointPmf) -> Result<Vec<CmsConstraint>> {
    let families = enumerate_q_star(pmf.channels())?;
    let mut cache = EntropyCache::new(pmf);
    families
        .into_iter()
        .map(|family| {
            let bound_bits = alpha_cached(&mut cache, pmf.channels(), &family)?;
            let singles = singletons_of(&family);
            let shared = family.difference(&singles).iter().collect();
            let base = singles.iter().map(|s| s.members()[0]).collect();
            Ok(CmsConstraint {
                family,
                shared,
                base,
                bound_bits,
            })
        })
        .collect()
}

/// Verdict of [`rate_feasible`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// Lexicographically smallest auxiliary rates (shared first) realizing the rates.
    pub witness: Option<AuxRateVector>,
}

/// Decides whether nonnegative auxiliary rates meet every constraint and map onto `rates`.
pub fn rate_feasible(rates: &RateTuple, pmf: &JointPmf) -> Result<Feasibility> {
    let constraints = cms_constraints(pmf)?;
    rate_feasible_with(rates, pmf.channels(), &constraints)
}

/// [`rate_feasible`] against a precomputed constraint list.
pub fn rate_feasible_with(rates: &RateTuple, channels: u8, constraints: &[CmsConstraint]) -> Result<Feasibility> {
    if rates.0.len() != channels as usize {
        return domain(format!("{} rates given for L = {channels}", rates.0.len()));
    }
    if rates.0.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return domain("description rates must be finite and nonnegative");
    }
    let template = AuxRateVector::zeros(channels)?;
    let sets = template.shared_sets.clone();
    let r = &rates.0;

    // Base rates are eliminated through R'_l = R_l - sum_{S ∋ l} R''_S >= 0,
    // leaving only the shared rates as unknowns.
    let rows: Vec<(Vec<f64>, f64)> = constraints
        .iter()
        .map(|c| {
            let coeffs: Vec<f64> = sets
                .iter()
                .map(|s| {
                    let own = if c.shared.contains(s) { 1.0 } else { 0.0 };
                    own - c.base.iter().filter(|&&l| s.contains(l)).count() as f64
                })
                .collect();
            let rhs = c.bound_bits - c.base.iter().map(|&l| r[(l - 1) as usize]).sum::<f64>();
            (coeffs, rhs)
        })
        .collect();

    let mut fixed: Vec<(f64, f64)> = sets
        .iter()
        .map(|s| {
            let cap = s.members().iter().map(|&l| r[(l - 1) as usize]).fold(f64::INFINITY, f64::min);
            (0.0, cap)
        })
        .collect();

    for target in 0..sets.len() {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = fixed
            .iter()
            .enumerate()
            .map(|(i, &b)| problem.add_var(if i == target { 1.0 } else { 0.0 }, b))
            .collect();
        for l in 1..=channels {
            let mut expr = LinearExpr::empty();
            for (v, s) in vars.iter().zip(&sets) {
                if s.contains(l) {
                    expr.add(*v, 1.0);
                }
            }
            problem.add_constraint(expr, ComparisonOp::Le, r[(l - 1) as usize] + FEASIBILITY_TOLERANCE);
        }
        for (coeffs, rhs) in &rows {
            let mut expr = LinearExpr::empty();
            for (v, &a) in vars.iter().zip(coeffs) {
                if a != 0.0 {
                    expr.add(*v, a);
                }
            }
            problem.add_constraint(expr, ComparisonOp::Ge, rhs - FEASIBILITY_TOLERANCE);
        }
        match problem.solve() {
            Ok(solution) => {
                let v = solution[vars[target]].max(fixed[target].0);
                fixed[target] = (v, v.max(fixed[target].0) + 1e-12);
            }
            Err(minilp::Error::Infeasible) => {
                return Ok(Feasibility {
                    feasible: false,
                    witness: None,
                })
            }
            Err(e) => return Err(Error::Numeric(format!("linear program failed: {e}"))),
        }
    }

    let mut witness = template;
    for (i, &(v, _)) in fixed.iter().enumerate() {
        witness.shared[i] = v.max(0.0);
    }
    for l in 1..=channels {
        let used: f64 = sets.iter().zip(&witness.shared).filter(|(s, _)| s.contains(l)).map(|(_, x)| x).sum();
        witness.base[(l - 1) as usize] = (r[(l - 1) as usize] - used).max(0.0);
    }
    let feasible = constraints.iter().all(|c| c.is_satisfied(&witness, 2.0 * FEASIBILITY_TOLERANCE));
    Ok(Feasibility {
        feasible,
        witness: feasible.then_some(witness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roles2() -> Vec<VariableRole> {
        vec![
            VariableRole::Source,
            VariableRole::shared(&[1, 2], 2).unwrap(),
            VariableRole::layer(&[1], 2).unwrap(),
            VariableRole::layer(&[2], 2).unwrap(),
            VariableRole::layer(&[1, 2], 2).unwrap(),
        ]
    }

    /// X uniform binary, U1 = U2 = X, V12 and U12 constant.
    fn copies() -> JointPmf {
        JointPmf::from_fn(2, roles2(), vec![2, 1, 2, 2, 1], |c| {
            if c[2] == c[0] && c[3] == c[0] {
                0.5
            } else {
                0.0
            }
        })
        .unwrap()
    }

    fn constant() -> JointPmf {
        JointPmf::from_fn(2, roles2(), vec![2, 1, 1, 1, 1], |_| 0.5).unwrap()
    }

    fn fam(lists: &[&[u8]], l: u8) -> SubsetFamily {
        SubsetFamily::from_lists(lists, l).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(&copies(), &SubsetFamily::empty()).unwrap(), 0.0);
        // H(U1|V12) + H(U2|V12) = 2 with every other term zero
        let q = fam(&[&[1], &[2], &[1, 2]], 2);
        assert!((alpha(&copies(), &q).unwrap() - 2.0).abs() < 1e-12);
        for q in enumerate_q_star(2).unwrap() {
            assert_eq!(alpha(&constant(), &q).unwrap(), 0.0);
        }
        assert!(alpha(&copies(), &fam(&[&[1]], 2)).is_err());
    }

    #[test]
    fn constraints_l2() {
        let cs = cms_constraints(&copies()).unwrap();
        assert_eq!(cs.len(), 4);
        let labels: Vec<String> = cs.iter().map(|c| c.support_label()).collect();
        assert_eq!(labels, ["shared:12", "shared:12;base:1", "shared:12;base:2", "shared:12;base:1;base:2"]);
        assert!(cms_constraints(&constant()).unwrap().iter().all(|c| c.bound_bits == 0.0));
    }

    #[test]
    fn description_rates_examples() {
        let mut aux = AuxRateVector::zeros(3).unwrap();
        assert_eq!(description_rates(&aux), RateTuple(vec![0.0; 3]));
        aux.set_shared(SubsetId::from_channels(&[1, 3], 3).unwrap(), 1.0).unwrap();
        assert_eq!(description_rates(&aux), RateTuple(vec![1.0, 0.0, 1.0]));

        let mut aux = AuxRateVector::zeros(2).unwrap();
        aux.set_base(1, 0.5).unwrap();
        aux.set_shared(SubsetId::full(2).unwrap(), 0.25).unwrap();
        assert_eq!(description_rates(&aux), RateTuple(vec![0.75, 0.25]));
        assert!(aux.set_base(1, -1.0).is_err());
        assert!(aux.set_shared(SubsetId::singleton(1, 2).unwrap(), 1.0).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let f = rate_feasible(&RateTuple(vec![0.0, 0.0]), &constant()).unwrap();
        assert!(f.feasible);
        assert_eq!(f.witness.unwrap().entries(), vec![0.0; 3]);

        assert!(!rate_feasible(&RateTuple(vec![0.5, 0.5]), &copies()).unwrap().feasible);

        let f = rate_feasible(&RateTuple(vec![1.0, 1.0]), &copies()).unwrap();
        assert!(f.feasible);
        let w = f.witness.unwrap();
        assert_eq!(w.shared_rates(), &[0.0]);
        assert_eq!(w.base_rates(), &[1.0, 1.0]);
    }

    #[test]
    fn feasibility_rejects_bad_rates() {
        assert!(rate_feasible(&RateTuple(vec![1.0]), &copies()).is_err());
        assert!(rate_feasible(&RateTuple(vec![1.0, -0.1]), &copies()).is_err());
    }
}

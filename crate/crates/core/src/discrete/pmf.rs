//! Dense joint probability tables over a source and its auxiliary variables.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::lattice::SubsetId;

const SUM_TOLERANCE: f64 = 1e-12;

/// What a table variable stands for.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariableRole {
    /// The source `X`.
    Source,
    /// A common codeword `V_S` replicated in every description of `S`, `|S| >= 2`.
    Shared(SubsetId),
    /// A base (`|K| = 1`) or refinement layer `U_K`.
    Layer(SubsetId),
}

impl VariableRole {
    pub fn shared(members: &[u8], channels: u8) -> Result<Self> {
        let s = SubsetId::from_channels(members, channels)?;
        if s.len() < 2 {
            return domain(format!("shared variable V{s} needs at least two channels"));
        }
        Ok(Self::Shared(s))
    }

    pub fn layer(members: &[u8], channels: u8) -> Result<Self> {
        Ok(Self::Layer(SubsetId::from_channels(members, channels)?))
    }

    fn subset(self) -> Option<SubsetId> {
        match self {
            Self::Source => None,
            Self::Shared(s) | Self::Layer(s) => Some(s),
        }
    }

    /// Parses `X`, `V12`, `U1` (or dotted channel lists such as `U1.10` when `L > 9`).
    pub fn parse(text: &str, channels: u8) -> Result<Self> {
        let text = text.trim();
        if text == "X" {
            return Ok(Self::Source);
        }
        let (kind, rest) = text.split_at(text.chars().next().map_or(0, char::len_utf8));
        let members: Vec<u8> = if rest.contains('.') {
            rest.split('.')
                .map(|p| u8::from_str(p).map_err(|_| Error::Parse(format!("bad role `{text}`"))))
                .collect::<Result<_>>()?
        } else {
            rest.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad role `{text}`")))
                })
                .collect::<Result<_>>()?
        };
        match kind {
            "V" => Self::shared(&members, channels),
            "U" => Self::layer(&members, channels),
            _ => Err(Error::Parse(format!("unknown role `{text}`; expected X, V<set> or U<set>"))),
        }
    }
}

impl fmt::Display for VariableRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Source => f.write_str("X"),
            Self::Shared(s) => write!(f, "V{s}"),
            Self::Layer(s) => write!(f, "U{s}"),
        }
    }
}

impl fmt::Debug for VariableRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for VariableRole {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Joint pmf of `(X, {V}, {U})` stored row-major; the last variable varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    channels: u8,
    roles: Vec<VariableRole>,
    alphabets: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(
        channels: u8,
        roles: Vec<VariableRole>,
        alphabets: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        if roles.len() != alphabets.len() {
            return domain(format!(
                "{} roles but {} alphabet sizes",
                roles.len(),
                alphabets.len()
            ));
        }
        if roles.iter().filter(|r| **r == VariableRole::Source).count() != 1 {
            return domain("exactly one source variable X is required");
        }
        for (i, r) in roles.iter().enumerate() {
            if roles[..i].contains(r) {
                return domain(format!("duplicate role {r}"));
            }
            if let Some(s) = r.subset() {
                if s.universe() != channels {
                    return domain(format!("role {r} built for L = {}, table has L = {channels}", s.universe()));
                }
            }
            if let VariableRole::Shared(s) = r {
                if s.len() < 2 {
                    return domain(format!("shared variable {r} needs at least two channels"));
                }
            }
        }
        if alphabets.contains(&0) {
            return domain("alphabet sizes must be positive");
        }
        let size = alphabets
            .iter()
            .try_fold(1usize, |acc, &a| acc.checked_mul(a))
            .ok_or_else(|| Error::Resource("joint table too large".into()))?;
        if probs.len() != size {
            return domain(format!("table has {} entries, alphabets imply {size}", probs.len()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return domain("probabilities must be finite and nonnegative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return domain(format!("probabilities sum to {total}, not 1"));
        }
        Ok(Self {
            channels,
            roles,
            alphabets,
            probs,
        })
    }

    /// Builds a table by evaluating `weight` on every joint outcome.
    pub fn from_fn(
        channels: u8,
        roles: Vec<VariableRole>,
        alphabets: Vec<usize>,
        mut weight: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        let size: usize = alphabets.iter().product();
        let mut probs = Vec::with_capacity(size);
        let mut coords = vec![0usize; alphabets.len()];
        for _ in 0..size {
            probs.push(weight(&coords));
            for i in (0..coords.len()).rev() {
                coords[i] += 1;
                if coords[i] < alphabets[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
        Self::new(channels, roles, alphabets, probs)
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn roles(&self) -> &[VariableRole] {
        &self.roles
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Column index of `role`, if the table carries it.
    pub fn position(&self, role: VariableRole) -> Option<usize> {
        self.roles.iter().position(|r| *r == role)
    }

    /// Alphabet size of `role`; absent variables are constants of size one.
    pub fn alphabet_of(&self, role: VariableRole) -> usize {
        self.position(role).map_or(1, |i| self.alphabets[i])
    }

    fn check_role(&self, role: VariableRole) -> Result<()> {
        if let Some(s) = role.subset() {
            if s.universe() != self.channels {
                return domain(format!("variable {role} does not belong to an L = {} table", self.channels));
            }
        }
        if let VariableRole::Shared(s) = role {
            if s.len() < 2 {
                return domain(format!("unknown variable {role}"));
            }
        }
        Ok(())
    }

    /// Marginal pmf of the listed columns, keyed by their joint outcome.
    fn marginal(&self, columns: &[usize]) -> Vec<f64> {
        let mut sub_strides = vec![0usize; self.alphabets.len()];
        let mut size = 1usize;
        for &c in columns.iter().rev() {
            sub_strides[c] = size;
            size *= self.alphabets[c];
        }
        let mut out = vec![0.0; size];
        let mut coords = vec![0usize; self.alphabets.len()];
        for &p in &self.probs {
            if p > 0.0 {
                let key: usize = coords.iter().zip(&sub_strides).map(|(x, s)| x * s).sum();
                out[key] += p;
            }
            for i in (0..coords.len()).rev() {
                coords[i] += 1;
                if coords[i] < self.alphabets[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
        out
    }

    fn columns(&self, vars: &[VariableRole]) -> Result<Vec<usize>> {
        let mut cols = Vec::new();
        for &v in vars {
            self.check_role(v)?;
            if let Some(c) = self.position(v) {
                if !cols.contains(&c) {
                    cols.push(c);
                }
            }
        }
        cols.sort_unstable();
        Ok(cols)
    }

    /// Joint entropy `H(vars)` in bits.
    pub fn entropy(&self, vars: &[VariableRole]) -> Result<f64> {
        let cols = self.columns(vars)?;
        if cols.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_bits(&self.marginal(&cols)))
    }

    /// `H(A | B)` in bits. `A` and `B` must not share a variable.
    pub fn conditional_entropy(&self, a: &[VariableRole], b: &[VariableRole]) -> Result<f64> {
        if let Some(v) = a.iter().find(|v| b.contains(v)) {
            return domain(format!("variable {v} appears on both sides of the conditioning bar"));
        }
        let mut joint = a.to_vec();
        joint.extend_from_slice(b);
        let h = self.entropy(&joint)? - self.entropy(b)?;
        Ok(h.max(0.0))
    }

    /// `I(A; B | C)` in bits.
    pub fn mutual_information(
        &self,
        a: &[VariableRole],
        b: &[VariableRole],
        c: &[VariableRole],
    ) -> Result<f64> {
        let mut ac = a.to_vec();
        ac.extend_from_slice(c);
        let mut bc = b.to_vec();
        bc.extend_from_slice(c);
        let mut abc = ac.clone();
        abc.extend_from_slice(b);
        let i = self.entropy(&ac)? + self.entropy(&bc)? - self.entropy(c)? - self.entropy(&abc)?;
        Ok(i.max(0.0))
    }

    /// Iterates `(coordinates, probability)` over outcomes of positive mass.
    pub fn outcomes(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let mut coords = vec![0usize; self.alphabets.len()];
        self.probs.iter().filter_map(move |&p| {
            let here = coords.clone();
            for i in (0..coords.len()).rev() {
                coords[i] += 1;
                if coords[i] < self.alphabets[i] {
                    break;
                }
                coords[i] = 0;
            }
            (p > 0.0).then_some((here, p))
        })
    }
}

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// A decoder's reconstruction rule `psi_K(U_K)` with its distortion measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionMap {
    pub decoder: SubsetId,
    /// Reconstruction symbol for each symbol of `U_K`.
    pub map: Vec<usize>,
    /// `distortion[x][xhat]`.
    pub distortion: Vec<Vec<f64>>,
}

impl ReconstructionMap {
    fn validate(&self, pmf: &JointPmf) -> Result<()> {
        let u = VariableRole::Layer(self.decoder);
        let u_size = pmf.alphabet_of(u);
        let x_size = pmf.alphabet_of(VariableRole::Source);
        if self.decoder.universe() != pmf.channels() {
            return domain(format!("decoder {} does not belong to an L = {} table", self.decoder, pmf.channels()));
        }
        if self.map.len() != u_size {
            return domain(format!(
                "map for decoder {} has {} entries, U{} has {u_size} symbols",
                self.decoder,
                self.map.len(),
                self.decoder
            ));
        }
        if self.distortion.len() != x_size {
            return domain(format!(
                "distortion table has {} rows, source has {x_size} symbols",
                self.distortion.len()
            ));
        }
        let cols = self.distortion.first().map_or(0, Vec::len);
        if cols == 0 || self.distortion.iter().any(|r| r.len() != cols) {
            return domain("distortion table rows must be nonempty and equally long");
        }
        if self.distortion.iter().flatten().any(|d| !d.is_finite() || *d < 0.0) {
            return domain("distortions must be finite and nonnegative");
        }
        if let Some(bad) = self.map.iter().find(|&&m| m >= cols) {
            return domain(format!("reconstruction symbol {bad} outside the distortion table"));
        }
        Ok(())
    }
}

/// `E[d(X, psi_K(U_K))]` under the joint pmf.
pub fn expected_distortion(pmf: &JointPmf, recon: &ReconstructionMap) -> Result<f64> {
    recon.validate(pmf)?;
    let x = pmf.position(VariableRole::Source).expect("validated source");
    let u = pmf.position(VariableRole::Layer(recon.decoder));
    Ok(pmf
        .outcomes()
        .map(|(c, p)| {
            let sym = u.map_or(0, |i| c[i]);
            p * recon.distortion[c[x]][recon.map[sym]]
        })
        .sum())
}

/// The reconstruction rule minimizing expected distortion for `decoder`.
pub fn best_reconstruction(
    pmf: &JointPmf,
    decoder: SubsetId,
    distortion: Vec<Vec<f64>>,
) -> Result<ReconstructionMap> {
    let u_size = pmf.alphabet_of(VariableRole::Layer(decoder));
    let probe = ReconstructionMap {
        decoder,
        map: vec![0; u_size],
        distortion,
    };
    probe.validate(pmf)?;
    let x = pmf.position(VariableRole::Source).expect("validated source");
    let u = pmf.position(VariableRole::Layer(decoder));
    let cols = probe.distortion[0].len();
    let mut cost = vec![vec![0.0; cols]; u_size];
    for (c, p) in pmf.outcomes() {
        let sym = u.map_or(0, |i| c[i]);
        for (xhat, slot) in cost[sym].iter_mut().enumerate() {
            *slot += p * probe.distortion[c[x]][xhat];
        }
    }
    let map = cost
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map_or(0, |(i, _)| i)
        })
        .collect();
    Ok(ReconstructionMap { map, ..probe })
}

/// JSON form: `{"L": 2, "roles": ["X", "U1"], "alphabets": [2, 2], "probs": [...],
/// "reconstructions": [{"decoder": [1], "map": [...], "distortion": [[...]]}]}`.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PmfDocument {
    #[serde(rename = "L")]
    pub channels: u8,
    pub roles: Vec<String>,
    pub alphabets: Vec<usize>,
    pub probs: Vec<f64>,
    #[serde(default)]
    pub reconstructions: Vec<ReconstructionDocument>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ReconstructionDocument {
    pub decoder: Vec<u8>,
    /// Omitted to request the expected-distortion-minimizing rule.
    #[serde(default)]
    pub map: Option<Vec<usize>>,
    pub distortion: Vec<Vec<f64>>,
}

impl PmfDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn pmf(&self) -> Result<JointPmf> {
        let roles = self
            .roles
            .iter()
            .map(|r| VariableRole::parse(r, self.channels))
            .collect::<Result<Vec<_>>>()?;
        JointPmf::new(self.channels, roles, self.alphabets.clone(), self.probs.clone())
    }

    pub fn reconstructions(&self, pmf: &JointPmf) -> Result<Vec<ReconstructionMap>> {
        self.reconstructions
            .iter()
            .map(|r| {
                let decoder = SubsetId::from_channels(&r.decoder, self.channels)?;
                match &r.map {
                    Some(map) => {
                        let recon = ReconstructionMap {
                            decoder,
                            map: map.clone(),
                            distortion: r.distortion.clone(),
                        };
                        recon.validate(pmf)?;
                        Ok(recon)
                    }
                    None => best_reconstruction(pmf, decoder, r.distortion.clone()),
                }
            })
            .collect()
    }
}

/// Caches entropies of variable sets for repeated evaluation on one table.
pub(crate) struct EntropyCache<'a> {
    pmf: &'a JointPmf,
    memo: HashMap<Vec<usize>, f64>,
}

impl<'a> EntropyCache<'a> {
    pub(crate) fn new(pmf: &'a JointPmf) -> Self {
        Self {
            pmf,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn entropy(&mut self, vars: &[VariableRole]) -> Result<f64> {
        let cols = self.pmf.columns(vars)?;
        if cols.is_empty() {
            return Ok(0.0);
        }
        if let Some(&h) = self.memo.get(&cols) {
            return Ok(h);
        }
        let h = entropy_bits(&self.pmf.marginal(&cols));
        self.memo.insert(cols, h);
        Ok(h)
    }

    pub(crate) fn conditional(&mut self, a: &[VariableRole], b: &[VariableRole]) -> Result<f64> {
        let mut joint = a.to_vec();
        joint.extend_from_slice(b);
        Ok(self.entropy(&joint)? - self.entropy(b)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_only(p: Vec<f64>) -> JointPmf {
        let n = p.len();
        JointPmf::new(2, vec![VariableRole::Source], vec![n], p).unwrap()
    }

    fn u1() -> VariableRole {
        VariableRole::layer(&[1], 2).unwrap()
    }

    /// X uniform on {0..3} with U1 = X mod 2.
    fn mod2() -> JointPmf {
        JointPmf::from_fn(2, vec![VariableRole::Source, u1()], vec![4, 2], |c| {
            if c[1] == c[0] % 2 {
                0.25
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let x = x_only(vec![0.5, 0.5]);
        assert_eq!(x.entropy(&[VariableRole::Source]).unwrap(), 1.0);
        let copy = JointPmf::new(2, vec![VariableRole::Source, u1()], vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(copy.conditional_entropy(&[u1()], &[VariableRole::Source]).unwrap(), 0.0);
        // H(X|U) = H(X,U) - H(U) = 2 - 1
        let m = mod2();
        assert!((m.conditional_entropy(&[VariableRole::Source], &[u1()]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn absent_variables_are_constants_and_bad_roles_are_errors() {
        let x = x_only(vec![0.25, 0.75]);
        let v12 = VariableRole::shared(&[1, 2], 2).unwrap();
        assert_eq!(x.entropy(&[v12]).unwrap(), 0.0);
        let foreign = VariableRole::Layer(SubsetId::from_channels(&[3], 3).unwrap());
        assert!(matches!(x.entropy(&[foreign]), Err(Error::Domain(_))));
        assert!(VariableRole::shared(&[1], 2).is_err());
        assert!(x.conditional_entropy(&[VariableRole::Source], &[VariableRole::Source]).is_err());
    }

    #[test]
    fn table_validation() {
        let roles = vec![VariableRole::Source, u1()];
        assert!(JointPmf::new(2, roles.clone(), vec![2, 2], vec![0.5, 0.5, 0.0]).is_err());
        assert!(JointPmf::new(2, roles.clone(), vec![2, 2], vec![0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(JointPmf::new(2, roles.clone(), vec![2, 2], vec![1.5, -0.5, 0.0, 0.0]).is_err());
        assert!(JointPmf::new(2, vec![u1(), u1()], vec![2, 2], vec![0.25; 4]).is_err());
        assert!(JointPmf::new(2, vec![u1()], vec![2], vec![0.5; 2]).is_err());
    }

    #[test]
    fn role_parsing() {
        assert_eq!(VariableRole::parse("X", 3).unwrap(), VariableRole::Source);
        assert_eq!(VariableRole::parse("V13", 3).unwrap().to_string(), "V13");
        assert_eq!(VariableRole::parse("U123", 3).unwrap().to_string(), "U123");
        assert_eq!(VariableRole::parse("U1.10", 12).unwrap().to_string(), "U1.10");
        assert!(VariableRole::parse("V1", 3).is_err());
        assert!(VariableRole::parse("W1", 3).is_err());
        assert!(VariableRole::parse("U4", 3).is_err());
    }

    #[test]
    fn expected_distortion_examples() {
        let hamming = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let copy = JointPmf::new(2, vec![VariableRole::Source, u1()], vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let d1 = SubsetId::singleton(1, 2).unwrap();
        let identity = ReconstructionMap { decoder: d1, map: vec![0, 1], distortion: hamming.clone() };
        assert_eq!(expected_distortion(&copy, &identity).unwrap(), 0.0);

        let constant = JointPmf::new(2, vec![VariableRole::Source, u1()], vec![2, 1], vec![0.5, 0.5]).unwrap();
        let best = best_reconstruction(&constant, d1, hamming.clone()).unwrap();
        assert_eq!(expected_distortion(&constant, &best).unwrap(), 0.5);
        // U1 missing from the table entirely behaves the same
        let bare = x_only(vec![0.5, 0.5]);
        let best = best_reconstruction(&bare, d1, hamming).unwrap();
        assert_eq!(expected_distortion(&bare, &best).unwrap(), 0.5);
    }

    #[test]
    fn squared_error_of_parity_reconstruction() {
        // oracle: (0-0)^2 + (1-1)^2 + (2-0)^2 + (3-1)^2, each with weight 1/4
        let oracle: f64 = (0..4).map(|x: i32| ((x - x % 2) as f64).powi(2) / 4.0).sum();
        assert_eq!(oracle, 2.0);
        let sq: Vec<Vec<f64>> = (0..4).map(|x| (0..2).map(|y| ((x - y) as f64).powi(2)).collect()).collect();
        let recon = ReconstructionMap { decoder: SubsetId::singleton(1, 2).unwrap(), map: vec![0, 1], distortion: sq };
        assert_eq!(expected_distortion(&mod2(), &recon).unwrap(), oracle);
    }

    #[test]
    fn reconstruction_shape_errors() {
        let d1 = SubsetId::singleton(1, 2).unwrap();
        let bad_map = ReconstructionMap { decoder: d1, map: vec![0], distortion: vec![vec![0.0, 1.0]; 4] };
        assert!(expected_distortion(&mod2(), &bad_map).is_err());
        let bad_rows = ReconstructionMap { decoder: d1, map: vec![0, 1], distortion: vec![vec![0.0, 1.0]; 3] };
        assert!(expected_distortion(&mod2(), &bad_rows).is_err());
        let bad_sym = ReconstructionMap { decoder: d1, map: vec![0, 2], distortion: vec![vec![0.0, 1.0]; 4] };
        assert!(expected_distortion(&mod2(), &bad_sym).is_err());
    }
}

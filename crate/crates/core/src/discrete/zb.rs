//! Rate bounds of the replica construction: descriptions 1 and 2 come from a
//! two-description common-codeword code and description 3 copies description 1.
//!
//! The table uses the `L = 2` roles `V12`, `U1`, `U2`, `U12` for the common
//! codeword `G12` and the layers `F1`, `F2`, `F12`.

use serde::Serialize;

use super::pmf::{JointPmf, VariableRole};
use crate::error::{domain, Result};
use crate::region::{Halfspace, RateRegion};

/// Lower bounds on `R1`, `R2` and `R1 + R2` (with `R3 = R1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReplicaBounds {
    pub r1_bits: f64,
    pub r2_bits: f64,
    pub sum_bits: f64,
}

impl ReplicaBounds {
    pub fn region(&self) -> RateRegion {
        RateRegion::new(
            2,
            vec![
                Halfspace::new("R1", vec![1.0, 0.0], self.r1_bits),
                Halfspace::new("R2", vec![0.0, 1.0], self.r2_bits),
                Halfspace::new("R1+R2", vec![1.0, 1.0], self.sum_bits),
            ],
        )
    }
}

fn role(pmf: &JointPmf, text: &str) -> Result<VariableRole> {
    let r = VariableRole::parse(text, 2)?;
    if pmf.position(r).is_none() {
        return domain(format!("replica bounds need variable {text}"));
    }
    Ok(r)
}

pub fn zb_replica_bounds(pmf: &JointPmf) -> Result<ReplicaBounds> {
    if pmf.channels() != 2 {
        return domain("replica bounds are defined on an L = 2 table");
    }
    let x = VariableRole::Source;
    let g = role(pmf, "V12")?;
    let f1 = role(pmf, "U1")?;
    let f2 = role(pmf, "U2")?;
    let f12 = role(pmf, "U12")?;

    let r1_bits = pmf.mutual_information(&[x], &[f1, g], &[])?;
    let r2_bits = pmf.mutual_information(&[x], &[f2, g], &[])?;
    let sum_bits = 2.0 * pmf.mutual_information(&[x], &[g], &[])?
        + pmf.conditional_entropy(&[f1], &[g])?
        + pmf.conditional_entropy(&[f2], &[g])?
        - pmf.conditional_entropy(&[f1, f2, f12], &[x, g])?
        + pmf.conditional_entropy(&[f12], &[f1, f2, g])?;
    Ok(ReplicaBounds {
        r1_bits,
        r2_bits,
        sum_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roles() -> Vec<VariableRole> {
        ["X", "V12", "U1", "U2", "U12"].iter().map(|r| VariableRole::parse(r, 2).unwrap()).collect()
    }

    #[test]
    fn constant_auxiliaries_give_zero_bounds() {
        let pmf = JointPmf::from_fn(2, roles(), vec![2, 1, 1, 1, 1], |_| 0.5).unwrap();
        let b = zb_replica_bounds(&pmf).unwrap();
        assert_eq!((b.r1_bits, b.r2_bits, b.sum_bits), (0.0, 0.0, 0.0));
    }

    #[test]
    fn copies_of_the_source() {
        // G constant, F1 = F2 = F12 = X: I(X;F1) = 1, I(X;F2) = 1,
        // sum = 0 + 1 + 1 - 0 + 0 = 2
        let pmf = JointPmf::from_fn(2, roles(), vec![2, 1, 2, 2, 2], |c| {
            if c[2] == c[0] && c[3] == c[0] && c[4] == c[0] {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        let b = zb_replica_bounds(&pmf).unwrap();
        assert!((b.r1_bits - 1.0).abs() < 1e-12);
        assert!((b.r2_bits - 1.0).abs() < 1e-12);
        assert!((b.sum_bits - 2.0).abs() < 1e-12);
    }

    #[test]
    fn relabeling_alphabets_leaves_bounds_unchanged() {
        let weights = [0.1, 0.05, 0.2, 0.15, 0.12, 0.08, 0.18, 0.12];
        let base = JointPmf::from_fn(2, roles(), vec![2, 2, 2, 1, 1], |c| weights[c[0] * 4 + c[1] * 2 + c[2]]).unwrap();
        let flipped =
            JointPmf::from_fn(2, roles(), vec![2, 2, 2, 1, 1], |c| weights[c[0] * 4 + (1 - c[1]) * 2 + (1 - c[2])])
                .unwrap();
        let a = zb_replica_bounds(&base).unwrap();
        let b = zb_replica_bounds(&flipped).unwrap();
        assert!((a.r1_bits - b.r1_bits).abs() < 1e-12);
        assert!((a.sum_bits - b.sum_bits).abs() < 1e-12);
    }

    #[test]
    fn missing_role_is_an_error() {
        let pmf = JointPmf::from_fn(2, roles()[..4].to_vec(), vec![2, 1, 1, 1], |_| 0.5).unwrap();
        assert!(zb_replica_bounds(&pmf).is_err());
    }
}

//! Rate-region computations for multiple-description source coding.
//!
//! * [`lattice`]: subsets of descriptions as bitmasks and the up-set families
//!   that index the auxiliary-rate constraints.
//! * [`discrete`]: entropy evaluation of those constraints for finite joint
//!   pmfs, plus a feasibility check for description rates.
//! * [`gaussian`]: closed forms for two and three Gaussian descriptions.
//! * [`mc`]: seeded Monte Carlo and determinant checks of the Gaussian formulas.

pub mod discrete;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod mc;
pub mod region;

pub use error::{Error, Result};
pub use lattice::{enumerate_q_star, SubsetFamily, SubsetId};
pub use region::{CornerPoint, Halfspace, Membership, RateRegion};

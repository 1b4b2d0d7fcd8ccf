//! Guide chapters compiled as doc-tests so the listings stay in sync with the crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/subsets.md")]
pub mod subsets {}

#[doc = include_str!("../../../book/src/discrete-cms.md")]
pub mod discrete_cms {}

#[doc = include_str!("../../../book/src/ozarow.md")]
pub mod ozarow {}

#[doc = include_str!("../../../book/src/three-descriptions.md")]
pub mod three_descriptions {}

#[doc = include_str!("../../../book/src/monte-carlo.md")]
pub mod monte_carlo {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

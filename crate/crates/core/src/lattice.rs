//! Subsets of the channel index set `{1, ..., L}` and the families built from them.
//!
//! A [`SubsetId`] is a bitmask over at most 16 channels. Families are kept in a
//! canonical order (ascending cardinality, then lexicographic on the sorted
//! channel list) so every listing is reproducible.

use std::cmp::{Ordering, Reverse};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Largest channel count a [`SubsetId`] can address.
pub const MAX_CHANNELS: u8 = 16;
/// Largest channel count accepted by [`enumerate_q_star`].
pub const MAX_Q_STAR_CHANNELS: u8 = 5;

/// A nonempty subset of the `L` channels.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetId {
    bits: u16,
    channels: u8,
}

impl SubsetId {
    /// Builds a subset from a raw mask where bit `l - 1` stands for channel `l`.
    pub fn from_bits(bits: u16, channels: u8) -> Result<Self> {
        check_channels(channels, MAX_CHANNELS)?;
        if bits == 0 {
            return domain("subset must be nonempty");
        }
        if channels < 16 && bits >> channels != 0 {
            return domain(format!("subset mask {bits:#b} names a channel above L = {channels}"));
        }
        Ok(Self { bits, channels })
    }

    /// Builds a subset from 1-based channel numbers.
    pub fn from_channels(members: &[u8], channels: u8) -> Result<Self> {
        check_channels(channels, MAX_CHANNELS)?;
        let mut bits = 0u16;
        for &l in members {
            if l == 0 || l > channels {
                return domain(format!("channel {l} outside 1..={channels}"));
            }
            bits |= 1 << (l - 1);
        }
        Self::from_bits(bits, channels)
    }

    /// The singleton `{l}`.
    pub fn singleton(l: u8, channels: u8) -> Result<Self> {
        Self::from_channels(&[l], channels)
    }

    /// The full set of channels.
    pub fn full(channels: u8) -> Result<Self> {
        check_channels(channels, MAX_CHANNELS)?;
        Self::from_bits(full_mask(channels), channels)
    }

    pub fn bits(self) -> u16 {
        self.bits
    }

    /// The channel count `L` this subset lives in.
    pub fn universe(self) -> u8 {
        self.channels
    }

    pub fn len(self) -> u32 {
        self.bits.count_ones()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, l: u8) -> bool {
        l >= 1 && l <= self.channels && self.bits & (1 << (l - 1)) != 0
    }

    pub fn is_subset_of(self, other: SubsetId) -> bool {
        self.bits & !other.bits == 0
    }

    /// Sorted 1-based channel list.
    pub fn members(self) -> Vec<u8> {
        (1..=self.channels).filter(|&l| self.contains(l)).collect()
    }

    fn sort_key(self) -> (u32, Reverse<u16>) {
        (self.len(), Reverse(self.bits.reverse_bits()))
    }
}

impl Ord for SubsetId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.channels
            .cmp(&other.channels)
            .then_with(|| self.sort_key().cmp(&other.sort_key()))
    }
}

impl PartialOrd for SubsetId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Channels are concatenated (`13`) while every channel is a single digit,
/// otherwise joined with dots (`1.10`).
impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members = self.members();
        let sep = if self.channels <= 9 { "" } else { "." };
        let parts: Vec<String> = members.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

impl fmt::Debug for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl Serialize for SubsetId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members().serialize(s)
    }
}

/// A duplicate-free set of subsets over a common `L`, in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SubsetFamily {
    members: Vec<SubsetId>,
}

impl SubsetFamily {
    pub fn new(mut members: Vec<SubsetId>) -> Result<Self> {
        if let Some(first) = members.first() {
            let l = first.universe();
            if members.iter().any(|m| m.universe() != l) {
                return domain("family members must share one channel count");
            }
        }
        members.sort();
        members.dedup();
        Ok(Self { members })
    }

    /// Parses a family from channel lists, e.g. `[[1], [1, 2]]`.
    pub fn from_lists(lists: &[&[u8]], channels: u8) -> Result<Self> {
        let members = lists
            .iter()
            .map(|m| SubsetId::from_channels(m, channels))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &[SubsetId] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = SubsetId> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: SubsetId) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    /// True when every member of `self` also belongs to `other`.
    pub fn is_subfamily_of(&self, other: &SubsetFamily) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Members of `self` not in `other`.
    pub fn difference(&self, other: &SubsetFamily) -> SubsetFamily {
        SubsetFamily {
            members: self.iter().filter(|&s| !other.contains(s)).collect(),
        }
    }

    /// Union of the channels of all members, if any.
    pub fn channel_union(&self) -> Option<SubsetId> {
        let first = self.members.first()?;
        let bits = self.iter().fold(0u16, |acc, s| acc | s.bits());
        Some(SubsetId {
            bits,
            channels: first.universe(),
        })
    }
}

impl fmt::Debug for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

/// Members joined by `;`, e.g. `1;2;12`. The empty family prints as `{}`.
impl fmt::Display for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.members.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.members.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(";"))
    }
}

impl Serialize for SubsetFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

impl<'a> IntoIterator for &'a SubsetFamily {
    type Item = SubsetId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, SubsetId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter().copied()
    }
}

fn check_channels(channels: u8, max: u8) -> Result<()> {
    if channels < 2 || channels > max {
        return domain(format!("channel count L = {channels} outside 2..={max}"));
    }
    Ok(())
}

fn full_mask(channels: u8) -> u16 {
    if channels >= 16 {
        u16::MAX
    } else {
        (1u16 << channels) - 1
    }
}

fn family_from_masks(masks: impl Iterator<Item = u16>, channels: u8) -> SubsetFamily {
    let mut members: Vec<SubsetId> = masks.map(|bits| SubsetId { bits, channels }).collect();
    members.sort();
    SubsetFamily { members }
}

/// All `2^L - 1` nonempty subsets of `{1, ..., L}`.
pub fn nonempty_subsets(channels: u8) -> Result<SubsetFamily> {
    check_channels(channels, MAX_CHANNELS)?;
    Ok(family_from_masks(1..=full_mask(channels), channels))
}

/// Every `S` with `B ⊆ S` and `|S| > |B|`.
pub fn strict_supersets(base: SubsetId) -> SubsetFamily {
    let full = full_mask(base.universe());
    let free = full & !base.bits();
    // enumerate nonempty submasks of the free channels
    let mut out = Vec::new();
    let mut sub = free;
    while sub != 0 {
        out.push(base.bits() | sub);
        sub = (sub - 1) & free;
    }
    family_from_masks(out.into_iter(), base.universe())
}

/// Subsets of cardinality at least two that contain `l`.
pub fn shared_with(l: u8, channels: u8) -> Result<SubsetFamily> {
    Ok(strict_supersets(SubsetId::singleton(l, channels)?))
}

/// Sets of cardinality ≥ 2 meeting `K`: the union over `l ∈ K` of [`shared_with`].
pub fn sharing_sets(k: SubsetId) -> SubsetFamily {
    let full = full_mask(k.universe());
    let masks = (1..=full).filter(|m| m.count_ones() >= 2 && m & k.bits() != 0);
    family_from_masks(masks, k.universe())
}

/// True iff `Q` is closed under strict supersets.
pub fn is_valid_q(q: &SubsetFamily) -> bool {
    q.iter().all(|k| strict_supersets(k).is_subfamily_of(q))
}

/// Members of `Q` with exactly one channel.
pub fn singletons_of(q: &SubsetFamily) -> SubsetFamily {
    SubsetFamily {
        members: q.iter().filter(|s| s.len() == 1).collect(),
    }
}

/// All nonempty families of nonempty subsets closed under strict supersets.
///
/// Families are listed by size, then lexicographically on their canonical
/// member lists.
pub fn enumerate_q_star(channels: u8) -> Result<Vec<SubsetFamily>> {
    if channels > MAX_Q_STAR_CHANNELS {
        return Err(Error::Resource(format!(
            "Q* enumeration supports L <= {MAX_Q_STAR_CHANNELS}, got {channels}"
        )));
    }
    let all = nonempty_subsets(channels)?;
    // decide members from the top of the lattice down so a subset is only
    // admitted once all of its one-larger supersets are in
    let order: Vec<u16> = all.members().iter().rev().map(|s| s.bits()).collect();
    let full = full_mask(channels);
    let mut chosen = Vec::new();
    let mut out = Vec::new();
    up_sets(&order, 0, full, &mut chosen, &mut out);

    let mut families: Vec<SubsetFamily> = out
        .into_iter()
        .filter(|masks| !masks.is_empty())
        .map(|masks| family_from_masks(masks.into_iter(), channels))
        .collect();
    families.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members.cmp(&b.members)));
    Ok(families)
}

fn up_sets(order: &[u16], at: usize, full: u16, chosen: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    let Some(&k) = order.get(at) else {
        out.push(chosen.clone());
        return;
    };
    up_sets(order, at + 1, full, chosen, out);
    let covers_ok = (0..16)
        .map(|j| 1u16 << j)
        .filter(|&b| b & full != 0 && b & k == 0)
        .all(|b| chosen.contains(&(k | b)));
    if covers_ok {
        chosen.push(k);
        up_sets(order, at + 1, full, chosen, out);
        chosen.pop();
    }
}

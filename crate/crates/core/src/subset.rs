//! Bitmask subsets of the user set `[1, L]`.
//!
//! User `l` (1-indexed, as in all user-facing I/O) lives in bit `l - 1`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of users. Every analysis enumerates all `2^L`
/// subsets, so this is a hard cap rather than a tuning knob.
pub const MAX_USERS: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetIndex(u32);

impl SubsetIndex {
    pub const EMPTY: SubsetIndex = SubsetIndex(0);

    pub const fn from_mask(mask: u32) -> Self {
        SubsetIndex(mask)
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub fn full(users: usize) -> Self {
        debug_assert!(users <= 32);
        if users == 32 {
            SubsetIndex(u32::MAX)
        } else {
            SubsetIndex((1u32 << users) - 1)
        }
    }

    /// `{user}` for a 1-indexed user.
    pub fn singleton(user: usize) -> Self {
        debug_assert!(user >= 1);
        SubsetIndex(1 << (user - 1))
    }

    /// Builds a subset from 1-indexed user labels, rejecting labels outside `[1, users]`.
    pub fn from_users(labels: &[usize], users: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &u in labels {
            if u == 0 || u > users {
                return Err(Error::UserOutOfRange { user: u, users });
            }
            mask |= 1 << (u - 1);
        }
        Ok(SubsetIndex(mask))
    }

    /// 1-indexed members in increasing order.
    pub fn users(self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }

    /// 0-indexed members in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn contains(self, user: usize) -> bool {
        user >= 1 && user <= 32 && self.0 & (1 << (user - 1)) != 0
    }

    pub fn contains_index(self, idx: usize) -> bool {
        self.0 & (1 << idx) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, users: usize) -> Self {
        SubsetIndex(Self::full(users).0 ^ self.0)
    }

    pub fn union(self, other: Self) -> Self {
        SubsetIndex(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SubsetIndex(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SubsetIndex(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn with(self, user: usize) -> Self {
        self.union(Self::singleton(user))
    }

    /// Fails with [`Error::BitOutOfRange`] if any bit `>= users` is set.
    pub fn check(self, users: usize) -> Result<Self> {
        if self.is_subset_of(Self::full(users)) {
            Ok(self)
        } else {
            Err(Error::BitOutOfRange { mask: self.0, users })
        }
    }

    /// All subsets of `self` (including the empty set and `self`), in
    /// increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = SubsetIndex> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some(((cur | !full).wrapping_add(1)) & full) };
            Some(SubsetIndex(cur))
        })
    }
}

/// Every nonempty subset of `[1, users]`, sorted by cardinality and then by mask.
pub fn nonempty_subsets(users: usize) -> Vec<SubsetIndex> {
    let mut all: Vec<SubsetIndex> = (1..=SubsetIndex::full(users).0).map(SubsetIndex).collect();
    all.sort_by_key(|s| (s.len(), s.0));
    all
}

/// Every nonempty strict subset of `[1, users]`, in the same order as [`nonempty_subsets`].
pub fn strict_subsets(users: usize) -> Vec<SubsetIndex> {
    let full = SubsetIndex::full(users);
    nonempty_subsets(users).into_iter().filter(|&s| s != full).collect()
}

impl fmt::Debug for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Formats as `{1,3}`; the empty set is `{}`.
impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, u) in self.users().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, "}}")
    }
}

/// Serialises as the sorted 1-indexed user list.
impl serde::Serialize for SubsetIndex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.users())
    }
}

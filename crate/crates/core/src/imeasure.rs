//! Conditional multiple-mutual informations (I-measure atoms) and the
//! balanced-source test.
//!
//! For nonempty `K ⊆ [1, L]` the atom is
//!
//! ```text
//! I_K = Σ_{t=1}^{|K|} (-1)^{t-1} Σ_{T ⊆ K, |T| = t} H(W_T | W_{K^c})
//! ```
//!
//! and `I_∅ = 0`. Atoms are evaluated straight from this alternating sum; the
//! recursive identities in [`single_expansion_check`] and [`pair_expansion_check`] are only
//! used as independent checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::source::SourceModel;
use crate::subset::{nonempty_subsets, SubsetIndex};

/// `I(W_{k_1}; …; W_{k_|K|} | W_T)` for disjoint `K` (nonempty) and `T`.
pub fn conditional_multi_info(model: &SourceModel, k: SubsetIndex, t: SubsetIndex) -> Result<f64> {
    let users = model.num_users();
    k.check(users)?;
    t.check(users)?;
    if k.is_empty() {
        return Err(Error::EmptySubset);
    }
    let overlap = k.intersection(t);
    if !overlap.is_empty() {
        return Err(Error::OverlappingSets(overlap.mask()));
    }
    Ok(alternating_sum(model, k, t))
}

fn alternating_sum(model: &SourceModel, k: SubsetIndex, t: SubsetIndex) -> f64 {
    let base = model.h(t);
    k.subsets()
        .skip(1)
        .map(|sub| {
            let term = model.h(sub.union(t)) - base;
            if sub.len() % 2 == 1 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// The atom `I_K`, conditioned on the complement of `K`.
pub fn multi_info(model: &SourceModel, k: SubsetIndex) -> Result<f64> {
    k.check(model.num_users())?;
    if k.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(alternating_sum(model, k, k.complement(model.num_users())))
}

/// `K ↦ I_K` over every nonempty `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomTable {
    users: usize,
    atoms: Vec<f64>,
}

pub fn atom_table(model: &SourceModel) -> AtomTable {
    let users = model.num_users();
    let atoms = (0..1u32 << users)
        .map(|m| {
            let k = SubsetIndex::from_mask(m);
            if k.is_empty() {
                0.0
            } else {
                alternating_sum(model, k, k.complement(users))
            }
        })
        .collect();
    AtomTable { users, atoms }
}

impl AtomTable {
    /// Builds a table from explicit atom values (missing subsets read as 0).
    pub fn from_values(users: usize, values: &[(SubsetIndex, f64)]) -> Result<Self> {
        let mut atoms = vec![0.0; 1 << users];
        for &(k, v) in values {
            k.check(users)?;
            atoms[k.mask() as usize] = v;
        }
        atoms[0] = 0.0;
        Ok(AtomTable { users, atoms })
    }

    pub fn num_users(&self) -> usize {
        self.users
    }

    /// `I_K`; `I_∅ = 0`.
    pub fn get(&self, k: SubsetIndex) -> f64 {
        self.atoms[k.mask() as usize]
    }

    /// Atoms in (cardinality, mask) order.
    pub fn entries(&self) -> Vec<(SubsetIndex, f64)> {
        nonempty_subsets(self.users).into_iter().map(|k| (k, self.get(k))).collect()
    }

    /// `Σ_{K ⊆ S} I_K`.
    pub fn sum_within(&self, s: SubsetIndex) -> f64 {
        s.subsets().map(|k| self.get(k)).sum()
    }

    /// Extremes `(max, min)` over atoms with `|K| = k`.
    pub fn extremes(&self, k: usize) -> (f64, f64) {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for m in 1..self.atoms.len() {
            if (m as u32).count_ones() as usize == k {
                hi = hi.max(self.atoms[m]);
                lo = lo.min(self.atoms[m]);
            }
        }
        (hi, lo)
    }

    /// Balance test on these atoms; see [`balanced_check`].
    pub fn balance(&self, tol: f64) -> BalanceReport {
        let users = self.users;
        let mut levels = Vec::new();
        for k in 2..users {
            let (mu_bar, mu_under) = self.extremes(k);
            let gap = gap_value(k, users);
            let margin = gap * mu_under - mu_bar;
            levels.push(BalanceLevel { k, mu_bar, mu_under, gap, margin, pass: mu_bar <= gap * mu_under + tol });
        }
        let overall = levels.iter().all(|l| l.pass);
        let negative_atoms = levels.iter().any(|l| l.mu_under < -tol);
        BalanceReport { users, levels, overall, negative_atoms }
    }
}

fn gap_value(k: usize, users: usize) -> f64 {
    let (k, l) = (k as f64, users as f64);
    1.0 + (1.0 / k) * ((l - 1.0) / (2.0 * l - k - 3.0))
}

/// `gap_k = 1 + (1/k)·(L−1)/(2L−k−3)` for `2 <= k <= L−1`.
pub fn gap(k: usize, users: usize) -> Result<f64> {
    if k < 2 || k + 1 > users {
        return Err(Error::KOutOfRange { k, users });
    }
    Ok(gap_value(k, users))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceLevel {
    pub k: usize,
    /// Largest `I_K` with `|K| = k`.
    pub mu_bar: f64,
    /// Smallest `I_K` with `|K| = k`.
    pub mu_under: f64,
    pub gap: f64,
    /// `gap·mu_under − mu_bar`; negative means the level fails (before tolerance).
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    pub users: usize,
    pub levels: Vec<BalanceLevel>,
    pub overall: bool,
    /// Set when some level's minimum atom is negative; the condition is
    /// still applied to the signed values.
    pub negative_atoms: bool,
}

/// A source is balanced when `max_{|K|=k} I_K <= gap_k · min_{|K|=k} I_K`
/// for every `k ∈ [2, L−1]` (vacuously so for `L = 2`).
pub fn balanced_check(model: &SourceModel, tol: f64) -> BalanceReport {
    atom_table(model).balance(tol)
}

/// `|H(W_S | W_{S^c}) − Σ_{K ⊆ S} I_K|`.
pub fn composition_check(model: &SourceModel, s: SubsetIndex) -> Result<f64> {
    let users = model.num_users();
    s.check(users)?;
    let lhs = model.h(model.full()) - model.h(s.complement(users));
    let rhs: f64 = s
        .subsets()
        .skip(1)
        .map(|k| alternating_sum(model, k, k.complement(users)))
        .sum();
    Ok((lhs - rhs).abs())
}

/// `|H(W_j | W_{S^c \ {j}}) − Σ_{K ⊆ S} I_{K ∪ {j}}|` for `j ∉ S` (1-indexed).
pub fn single_expansion_check(model: &SourceModel, s: SubsetIndex, j: usize) -> Result<f64> {
    let users = model.num_users();
    s.check(users)?;
    if j == 0 || j > users || s.contains(j) {
        return Err(Error::JNotInComplement { j });
    }
    let jset = SubsetIndex::singleton(j);
    let rest = s.complement(users).difference(jset);
    let lhs = model.h(rest.union(jset)) - model.h(rest);
    let rhs: f64 = s
        .subsets()
        .map(|k| {
            let kj = k.union(jset);
            alternating_sum(model, kj, kj.complement(users))
        })
        .sum();
    Ok((lhs - rhs).abs())
}

/// `|I(W_j; W_m | W_{S^c \ {j,m}}) − Σ_{K ⊆ S} I_{K ∪ {j,m}}|` for distinct
/// `j, m ∉ S` (1-indexed).
pub fn pair_expansion_check(model: &SourceModel, s: SubsetIndex, j: usize, m: usize) -> Result<f64> {
    let users = model.num_users();
    s.check(users)?;
    let valid = |u: usize| u >= 1 && u <= users && !s.contains(u);
    if !valid(j) || !valid(m) || j == m || s.len() + 2 > users {
        return Err(Error::InvalidPair { j, m });
    }
    let (js, ms) = (SubsetIndex::singleton(j), SubsetIndex::singleton(m));
    let c = s.complement(users).difference(js).difference(ms);
    let lhs = model.h(c.union(js)) + model.h(c.union(ms)) - model.h(c.union(js).union(ms)) - model.h(c);
    let pair = js.union(ms);
    let rhs: f64 = s
        .subsets()
        .map(|k| {
            let kp = k.union(pair);
            alternating_sum(model, kp, kp.complement(users))
        })
        .sum();
    Ok((lhs - rhs).abs())
}

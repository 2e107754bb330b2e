//! Discrete memoryless sources as subset-entropy oracles.
//!
//! Three concrete forms are supported: an explicit joint pmf
//! ([`TabularPmf`]), a product of independent uniform components each shared
//! by a fixed group of users ([`ComponentSource`]), and a raw table of joint
//! entropies ([`EntropyProfile`]). Whatever the form, analyses run on a
//! [`SourceModel`], which holds all `2^L` joint entropies in bits.

use crate::error::{Error, Result};
use crate::subset::{nonempty_subsets, SubsetIndex, MAX_USERS};

/// Default absolute tolerance (bits) for entropy comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Sub-alphabets up to this size are marginalised into a dense table.
const DENSE_LIMIT: u128 = 1 << 24;

/// Anything that can report `H(W_S)` for every `S ⊆ [1, L]`.
pub trait EntropyOracle {
    fn num_users(&self) -> usize;

    /// `H(W_S)` in bits. `s` is assumed to lie within `[1, L]`.
    fn raw_entropy(&self, s: SubsetIndex) -> f64;
}

/// `-Σ p log2 p`, skipping zero-probability terms.
pub fn pmf_entropy(probs: &[f64]) -> f64 {
    entropy_sum(probs.iter().copied())
}

fn entropy_sum(probs: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = probs.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum();
    // -0.0 and rounding dust below zero both read as zero
    if h <= 0.0 {
        0.0
    } else {
        h
    }
}

/// Binary entropy function `h_b(x)`.
pub fn binary_entropy(x: f64) -> f64 {
    pmf_entropy(&[x, 1.0 - x])
}

fn check_users(users: usize) -> Result<()> {
    if users == 0 {
        return Err(Error::TooFewUsers(users));
    }
    if users > MAX_USERS {
        return Err(Error::TooManyUsers { got: users, max: MAX_USERS });
    }
    Ok(())
}

/// A validated joint pmf over `W_1 × … × W_L`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPmf {
    alphabets: Vec<usize>,
    entries: Vec<(Vec<usize>, f64)>,
}

impl TabularPmf {
    /// Validates alphabet ranges, duplicates, signs and total mass (within `tol`).
    pub fn new(alphabets: Vec<usize>, entries: Vec<(Vec<usize>, f64)>, tol: f64) -> Result<Self> {
        check_users(alphabets.len())?;
        if alphabets.iter().any(|&a| a == 0) {
            return Err(Error::EmptyAlphabet);
        }
        let users = alphabets.len();
        let mut seen = std::collections::HashSet::with_capacity(entries.len());
        let mut sum = 0.0;
        for (symbols, p) in &entries {
            if symbols.len() != users {
                return Err(Error::TupleLength { expected: users, got: symbols.len() });
            }
            for (user, (&s, &a)) in symbols.iter().zip(&alphabets).enumerate() {
                if s >= a {
                    return Err(Error::SymbolOutOfRange { user: user + 1, symbol: s, size: a });
                }
            }
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::NegativeProbability { symbols: symbols.clone(), p: *p });
            }
            if !seen.insert(symbols.as_slice()) {
                return Err(Error::DuplicateEntry(symbols.clone()));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > tol {
            return Err(Error::MassNotOne { sum });
        }
        Ok(TabularPmf { alphabets, entries })
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn entries(&self) -> &[(Vec<usize>, f64)] {
        &self.entries
    }

    /// Relabels users so that new user `i` is old user `perm[i]` (0-indexed).
    pub fn permute_users(&self, perm: &[usize]) -> Result<Self> {
        let users = self.alphabets.len();
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..users).collect::<Vec<_>>() {
            return Err(Error::Invalid(format!("{perm:?} is not a permutation of 0..{users}")));
        }
        let alphabets = perm.iter().map(|&i| self.alphabets[i]).collect();
        let entries = self
            .entries
            .iter()
            .map(|(sym, p)| (perm.iter().map(|&i| sym[i]).collect(), *p))
            .collect();
        Ok(TabularPmf { alphabets, entries })
    }

    fn marginal_entropy(&self, s: SubsetIndex, scratch: &mut DenseScratch) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        let members: Vec<usize> = s.indices().collect();
        let size: u128 = members.iter().map(|&i| self.alphabets[i] as u128).product();
        if size <= DENSE_LIMIT {
            let mut strides = Vec::with_capacity(members.len());
            let mut stride = 1usize;
            for &i in &members {
                strides.push(stride);
                stride *= self.alphabets[i];
            }
            scratch.ensure(size as usize);
            for (sym, p) in &self.entries {
                let idx: usize = members.iter().zip(&strides).map(|(&i, &st)| sym[i] * st).sum();
                scratch.add(idx, *p);
            }
            scratch.drain_entropy()
        } else {
            let mut keyed: Vec<(Vec<usize>, f64)> = self
                .entries
                .iter()
                .map(|(sym, p)| (members.iter().map(|&i| sym[i]).collect(), *p))
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            let mut merged: Vec<f64> = Vec::new();
            let mut last: Option<&Vec<usize>> = None;
            for (k, p) in &keyed {
                if last == Some(k) {
                    *merged.last_mut().unwrap() += p;
                } else {
                    merged.push(*p);
                    last = Some(k);
                }
            }
            pmf_entropy(&merged)
        }
    }

    /// Joint entropies of every subset, indexed by mask.
    fn entropy_table(&self) -> Vec<f64> {
        let users = self.alphabets.len();
        let mut scratch = DenseScratch::default();
        (0..1u32 << users)
            .map(|m| self.marginal_entropy(SubsetIndex::from_mask(m), &mut scratch))
            .collect()
    }
}

impl EntropyOracle for TabularPmf {
    fn num_users(&self) -> usize {
        self.alphabets.len()
    }

    fn raw_entropy(&self, s: SubsetIndex) -> f64 {
        self.marginal_entropy(s, &mut DenseScratch::default())
    }
}

/// Reusable dense accumulator; only touched cells are read back and cleared.
#[derive(Default)]
struct DenseScratch {
    cells: Vec<f64>,
    touched: Vec<usize>,
}

impl DenseScratch {
    fn ensure(&mut self, size: usize) {
        if self.cells.len() < size {
            self.cells.resize(size, 0.0);
        }
    }

    fn add(&mut self, idx: usize, p: f64) {
        if p <= 0.0 {
            return;
        }
        if self.cells[idx] == 0.0 {
            self.touched.push(idx);
        }
        self.cells[idx] += p;
    }

    fn drain_entropy(&mut self) -> f64 {
        let cells = &mut self.cells;
        let h = entropy_sum(self.touched.iter().map(|&i| cells[i]));
        for &i in &self.touched {
            cells[i] = 0.0;
        }
        self.touched.clear();
        h
    }
}

/// Independent uniform components `B_S`, each of `R_S` bits, shared by exactly
/// the users in `S`; user `l` observes every `B_S` with `l ∈ S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSource {
    users: usize,
    components: Vec<(SubsetIndex, f64)>,
}

impl ComponentSource {
    pub fn new(users: usize, components: Vec<(SubsetIndex, f64)>) -> Result<Self> {
        check_users(users)?;
        let mut seen = std::collections::HashSet::new();
        for &(s, rate) in &components {
            s.check(users)?;
            if s.is_empty() {
                return Err(Error::EmptyComponentSubset);
            }
            if !rate.is_finite() || rate < 0.0 {
                return Err(Error::NegativeRate { subset: s.users(), rate });
            }
            if !seen.insert(s) {
                return Err(Error::DuplicateSubset(s.users()));
            }
        }
        Ok(ComponentSource { users, components })
    }

    pub fn components(&self) -> &[(SubsetIndex, f64)] {
        &self.components
    }

    /// Rate of the component shared by exactly `s` (0 if absent).
    pub fn rate(&self, s: SubsetIndex) -> f64 {
        self.components.iter().find(|(t, _)| *t == s).map_or(0.0, |&(_, r)| r)
    }

    /// Same sharing pattern with every rate multiplied by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        ComponentSource::new(
            self.users,
            self.components.iter().map(|&(s, r)| (s, r * factor)).collect(),
        )
    }

    /// Expands into an explicit joint pmf. Needs integer rates and at most
    /// 20 bits in total.
    pub fn to_tabular(&self) -> Result<TabularPmf> {
        let mut bits = Vec::with_capacity(self.components.len());
        for &(s, r) in &self.components {
            if r.fract() != 0.0 {
                return Err(Error::NotMaterialisable(format!("rate {r} of {s} is not an integer")));
            }
            bits.push(r as u32);
        }
        let total: u32 = bits.iter().sum();
        if total > 20 {
            return Err(Error::NotMaterialisable(format!("{total} bits exceeds the 20-bit limit")));
        }
        let alphabets: Vec<usize> = (0..self.users)
            .map(|l| {
                let own: u32 = self
                    .components
                    .iter()
                    .zip(&bits)
                    .filter(|((s, _), _)| s.contains_index(l))
                    .map(|(_, b)| b)
                    .sum();
                1usize << own
            })
            .collect();
        let p = 1.0 / (1u64 << total) as f64;
        let mut entries = Vec::with_capacity(1 << total);
        for config in 0u64..(1 << total) {
            let mut symbols = vec![0usize; self.users];
            let mut shift = 0;
            for (&(s, _), &b) in self.components.iter().zip(&bits) {
                let value = ((config >> shift) & ((1u64 << b) - 1)) as usize;
                shift += b;
                for l in s.indices() {
                    symbols[l] = (symbols[l] << b) | value;
                }
            }
            entries.push((symbols, p));
        }
        TabularPmf::new(alphabets, entries, 1e-9)
    }
}

impl EntropyOracle for ComponentSource {
    fn num_users(&self) -> usize {
        self.users
    }

    fn raw_entropy(&self, s: SubsetIndex) -> f64 {
        self.components
            .iter()
            .filter(|(t, _)| !t.intersection(s).is_empty())
            .map(|(_, r)| r)
            .sum()
    }
}

/// A source given only by its joint entropies on every nonempty subset.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    users: usize,
    values: Vec<f64>,
}

impl EntropyProfile {
    /// `values` must cover every nonempty subset exactly once.
    pub fn new(users: usize, values: Vec<(SubsetIndex, f64)>) -> Result<Self> {
        check_users(users)?;
        let mut table = vec![None; 1 << users];
        table[0] = Some(0.0);
        for (s, h) in values {
            s.check(users)?;
            if s.is_empty() {
                return Err(Error::EmptySubset);
            }
            if !h.is_finite() {
                return Err(Error::Invalid(format!("entropy of {s} is not finite")));
            }
            if table[s.mask() as usize].replace(h).is_some() {
                return Err(Error::DuplicateSubset(s.users()));
            }
        }
        let mut out = Vec::with_capacity(table.len());
        for (mask, v) in table.into_iter().enumerate() {
            match v {
                Some(h) => out.push(h),
                None => return Err(Error::MissingSubset(SubsetIndex::from_mask(mask as u32).users())),
            }
        }
        Ok(EntropyProfile { users, values: out })
    }

    /// Snapshot of any oracle's entropies.
    pub fn from_oracle(oracle: &dyn EntropyOracle) -> Self {
        let users = oracle.num_users();
        let values = (0..1u32 << users).map(|m| oracle.raw_entropy(SubsetIndex::from_mask(m))).collect();
        EntropyProfile { users, values }
    }

    pub fn values(&self) -> impl Iterator<Item = (SubsetIndex, f64)> + '_ {
        nonempty_subsets(self.users).into_iter().map(|s| (s, self.values[s.mask() as usize]))
    }
}

impl EntropyOracle for EntropyProfile {
    fn num_users(&self) -> usize {
        self.users
    }

    fn raw_entropy(&self, s: SubsetIndex) -> f64 {
        self.values[s.mask() as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarningKind {
    /// `H(S) > H(S ∪ {l})`.
    Monotonicity,
    /// `H(S∪i) + H(S∪j) < H(S∪i∪j) + H(S)`.
    Submodularity,
}

/// A Shannon-inequality violation found in an entropy profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileWarning {
    pub kind: WarningKind,
    /// The smaller set(s) involved.
    pub subsets: Vec<SubsetIndex>,
    /// Amount by which the inequality fails (bits, > tol).
    pub excess: f64,
}

impl std::fmt::Display for ProfileWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            WarningKind::Monotonicity => write!(
                f,
                "monotonicity fails: H({}) exceeds H({}) by {:.6}",
                self.subsets[0], self.subsets[1], self.excess
            ),
            WarningKind::Submodularity => write!(
                f,
                "submodularity fails for {} and {} by {:.6}",
                self.subsets[0], self.subsets[1], self.excess
            ),
        }
    }
}

/// Checks the elemental Shannon inequalities of a profile (which imply all
/// monotonicity and submodularity constraints) and wraps it as a model.
///
/// Violations are returned as warnings; with `strict` the first one becomes
/// an [`Error::NonEntropic`].
pub fn profile_validate(
    profile: &EntropyProfile,
    tol: f64,
    strict: bool,
) -> Result<(SourceModel, Vec<ProfileWarning>)> {
    let users = profile.users;
    let h = |m: u32| profile.values[m as usize];
    let mut warnings = Vec::new();
    let full = SubsetIndex::full(users).mask();
    for s in 0..=full {
        for i in 0..users {
            let bi = 1u32 << i;
            if s & bi != 0 {
                continue;
            }
            let excess = h(s) - h(s | bi);
            if excess > tol {
                warnings.push(ProfileWarning {
                    kind: WarningKind::Monotonicity,
                    subsets: vec![SubsetIndex::from_mask(s), SubsetIndex::from_mask(s | bi)],
                    excess,
                });
            }
            for j in (i + 1)..users {
                let bj = 1u32 << j;
                if s & bj != 0 {
                    continue;
                }
                let excess = h(s | bi | bj) + h(s) - h(s | bi) - h(s | bj);
                if excess > tol {
                    warnings.push(ProfileWarning {
                        kind: WarningKind::Submodularity,
                        subsets: vec![SubsetIndex::from_mask(s | bi), SubsetIndex::from_mask(s | bj)],
                        excess,
                    });
                }
            }
        }
    }
    if strict {
        if let Some(w) = warnings.first() {
            return Err(Error::NonEntropic(w.to_string()));
        }
    }
    Ok((SourceModel::from_oracle(profile)?, warnings))
}

/// Validates a raw pmf and returns its entropy model.
pub fn validate_tabular(
    alphabets: Vec<usize>,
    entries: Vec<(Vec<usize>, f64)>,
    tol: f64,
) -> Result<SourceModel> {
    SourceModel::from_tabular(&TabularPmf::new(alphabets, entries, tol)?)
}

/// `h(p)`: `h_l = H(W_{l^c} | W_l)` for each user.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyVector(pub Vec<f64>);

impl EntropyVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// L1 norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }
}

/// All joint entropies of a source, materialised once.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    users: usize,
    table: Vec<f64>,
    tol: f64,
}

impl SourceModel {
    pub fn from_oracle(oracle: &dyn EntropyOracle) -> Result<Self> {
        let users = oracle.num_users();
        check_users(users)?;
        let table: Vec<f64> = (0..1u32 << users)
            .map(|m| if m == 0 { 0.0 } else { oracle.raw_entropy(SubsetIndex::from_mask(m)) })
            .collect();
        Ok(SourceModel { users, table, tol: DEFAULT_TOL })
    }

    pub fn from_tabular(pmf: &TabularPmf) -> Result<Self> {
        check_users(pmf.alphabets.len())?;
        let mut table = pmf.entropy_table();
        table[0] = 0.0;
        Ok(SourceModel { users: pmf.alphabets.len(), table, tol: DEFAULT_TOL })
    }

    /// Tolerance used when clamping small negative conditional entropies.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn num_users(&self) -> usize {
        self.users
    }

    pub fn full(&self) -> SubsetIndex {
        SubsetIndex::full(self.users)
    }

    /// `H(W_S)`; `H(∅) = 0`.
    pub fn entropy(&self, s: SubsetIndex) -> Result<f64> {
        s.check(self.users)?;
        Ok(self.table[s.mask() as usize])
    }

    /// Unchecked lookup for callers that built `s` from this model's user set.
    pub(crate) fn h(&self, s: SubsetIndex) -> f64 {
        self.table[s.mask() as usize]
    }

    /// `H(W_S | W_T) = H(W_{S∪T}) − H(W_T)` for disjoint `S`, `T`; negative
    /// values within tolerance are clamped to zero.
    pub fn conditional_entropy(&self, s: SubsetIndex, t: SubsetIndex) -> Result<f64> {
        s.check(self.users)?;
        t.check(self.users)?;
        let overlap = s.intersection(t);
        if !overlap.is_empty() {
            return Err(Error::OverlappingSets(overlap.mask()));
        }
        Ok(self.cond(s, t))
    }

    pub(crate) fn cond(&self, s: SubsetIndex, t: SubsetIndex) -> f64 {
        let v = self.h(s.union(t)) - self.h(t);
        if v < 0.0 && v > -self.tol {
            0.0
        } else {
            v
        }
    }

    /// `H(W_S | W_{S^c})`.
    pub fn given_rest(&self, s: SubsetIndex) -> f64 {
        self.cond(s, s.complement(self.users))
    }

    pub fn h_vector(&self) -> EntropyVector {
        EntropyVector(
            (1..=self.users)
                .map(|l| {
                    let own = SubsetIndex::singleton(l);
                    self.cond(own.complement(self.users), own)
                })
                .collect(),
        )
    }

    /// Joint entropies of all nonempty subsets, ordered by cardinality then mask.
    pub fn entropies(&self) -> Vec<(SubsetIndex, f64)> {
        nonempty_subsets(self.users).into_iter().map(|s| (s, self.h(s))).collect()
    }

    /// Same model with every entropy multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        SourceModel { users: self.users, table: self.table.iter().map(|h| h * factor).collect(), tol: self.tol }
    }
}

impl EntropyOracle for SourceModel {
    fn num_users(&self) -> usize {
        self.users
    }

    fn raw_entropy(&self, s: SubsetIndex) -> f64 {
        self.h(s)
    }
}

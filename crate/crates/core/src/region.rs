//! The data-exchange rate region `R(p)` and the class `P*`.
//!
//! `R(p)` is the set of `r >= 0` with `Σ_{i∈S} r_i >= H(W_S | W_{S^c})` for
//! every nonempty strict subset `S`. There is no constraint for `S = [1, L]`:
//! each user already holds its own data as side information.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imeasure::atom_table;
use crate::lp::{self, LinearProgram};
use crate::source::SourceModel;
use crate::subset::{strict_subsets, SubsetIndex};

/// Per-user source-coding rates in bits per source symbol.
/// Serialises as `{"rates": [...]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTuple(pub Vec<f64>);

impl Serialize for RateTuple {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("RateTuple", 1)?;
        st.serialize_field("rates", &self.0)?;
        st.end()
    }
}

impl RateTuple {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// L1 norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|r| r.abs()).sum()
    }

    /// `Σ_{i∈S} r_i`.
    pub fn sum_over(&self, s: SubsetIndex) -> f64 {
        s.indices().map(|i| self.0[i]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionConstraint {
    pub subset: SubsetIndex,
    pub bound: f64,
}

/// Serialises as `{"constraints": [{"subset": [...], "bound": x}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionConstraints {
    #[serde(skip)]
    pub users: usize,
    pub constraints: Vec<RegionConstraint>,
}

fn require_pair(model: &SourceModel) -> Result<usize> {
    match model.num_users() {
        l if l >= 2 => Ok(l),
        l => Err(Error::TooFewUsers(l)),
    }
}

/// One constraint per nonempty strict subset, in (cardinality, mask) order.
pub fn region_constraints(model: &SourceModel) -> Result<RegionConstraints> {
    let users = require_pair(model)?;
    let constraints = strict_subsets(users)
        .into_iter()
        .map(|s| RegionConstraint { subset: s, bound: model.given_rest(s) })
        .collect();
    Ok(RegionConstraints { users, constraints })
}

/// `R(p)` plus the total sum-rate constraint `Σ r >= H(W_{[1,L]})`, i.e. the
/// Slepian-Wolf region. Only used for comparison output.
pub fn slepian_wolf_constraints(model: &SourceModel) -> Result<RegionConstraints> {
    let mut region = region_constraints(model)?;
    let full = model.full();
    region.constraints.push(RegionConstraint { subset: full, bound: model.h(full) });
    Ok(region)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `r_user < 0`.
    Nonnegativity { user: usize, value: f64 },
    /// `Σ_{i∈subset} r_i < bound`.
    Constraint { subset: SubsetIndex, bound: f64, sum: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    /// Smallest signed slack over all constraints and nonnegativity facets.
    pub worst_slack: f64,
    /// The constraint attaining `worst_slack` when it is violated beyond tolerance.
    pub violated: Option<Violation>,
}

/// Whether `r ∈ R(p)`, with every constraint allowed to fail by at most `tol`.
pub fn contains(model: &SourceModel, r: &RateTuple, tol: f64) -> Result<Membership> {
    let region = region_constraints(model)?;
    region.contains(r, tol)
}

impl RegionConstraints {
    pub fn contains(&self, r: &RateTuple, tol: f64) -> Result<Membership> {
        if r.len() != self.users {
            return Err(Error::LengthMismatch { expected: self.users, got: r.len() });
        }
        let mut negative: Option<Violation> = None;
        let mut most_negative = f64::INFINITY;
        for (l, &v) in r.0.iter().enumerate() {
            if v < most_negative {
                most_negative = v;
                negative = Some(Violation::Nonnegativity { user: l + 1, value: v });
            }
        }
        let mut worst_slack = most_negative;
        let mut worst: Option<Violation> = None;
        let mut entropic_slack = f64::INFINITY;
        for c in &self.constraints {
            let sum = r.sum_over(c.subset);
            let slack = sum - c.bound;
            worst_slack = worst_slack.min(slack);
            if slack < entropic_slack {
                entropic_slack = slack;
                worst = Some(Violation::Constraint { subset: c.subset, bound: c.bound, sum });
            }
        }
        let inside = worst_slack >= -tol;
        // a negative rate is reported ahead of the (then also violated) singleton bound
        let violated = if inside {
            None
        } else if most_negative < -tol {
            negative
        } else {
            worst
        };
        Ok(Membership { inside, worst_slack, violated })
    }

    /// `min c·r` over the region as a [`LinearProgram`] in `r`.
    pub fn program(&self, objective: Vec<f64>) -> Result<LinearProgram> {
        let rows = self.constraints.iter().map(|c| indicator(c.subset, self.users)).collect();
        let rhs = self.constraints.iter().map(|c| c.bound).collect();
        LinearProgram::new(objective, rows, rhs)
    }
}

fn indicator(s: SubsetIndex, width: usize) -> Vec<f64> {
    (0..width).map(|i| if s.contains_index(i) { 1.0 } else { 0.0 }).collect()
}

/// The unique solution of `Σ_{i∈l^c} r_i = H(W_{l^c} | W_l)` for all `l`:
/// `r*_l = ||h||/(L−1) − h_l`. Components may be negative.
pub fn r_star(model: &SourceModel) -> Result<RateTuple> {
    let users = require_pair(model)?;
    let h = model.h_vector();
    let share = h.norm() / (users - 1) as f64;
    Ok(RateTuple(h.0.iter().map(|hl| share - hl).collect()))
}

/// `r*` rebuilt from I-measure atoms: `r†_l = Σ_{K ⊂ [1,L]} J_l(K)` with
/// `J_l(K) = (L−|K|)/(L−1)·I_K` if `l ∈ K`, else `(1−|K|)/(L−1)·I_K`.
pub fn r_dagger(model: &SourceModel) -> Result<RateTuple> {
    let users = require_pair(model)?;
    let atoms = atom_table(model);
    let denom = (users - 1) as f64;
    let mut r = vec![0.0; users];
    for k in strict_subsets(users) {
        let ik = atoms.get(k);
        let size = k.len() as f64;
        for (l, rl) in r.iter_mut().enumerate() {
            let weight = if k.contains_index(l) { (users as f64 - size) / denom } else { (1.0 - size) / denom };
            *rl += weight * ik;
        }
    }
    Ok(RateTuple(r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PStarReport {
    pub member: bool,
    pub r_star: RateTuple,
    pub membership: Membership,
}

/// `p ∈ P*` iff `r*(p) ∈ R(p)`.
pub fn in_pstar(model: &SourceModel, tol: f64) -> Result<PStarReport> {
    let r = r_star(model)?;
    let membership = contains(model, &r, tol)?;
    Ok(PStarReport { member: membership.inside, r_star: r, membership })
}

/// `min_{r∈R(p)} max_l (1/w_l) Σ_{i∈l^c} r_i`, linearised over `(r, t)`.
/// The returned tuple is an optimiser, not necessarily the only one.
pub fn minimize_weighted_max(model: &SourceModel, weights: &[f64]) -> Result<(f64, RateTuple)> {
    for (index, &value) in weights.iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonpositiveWeight { index, value });
        }
    }
    solve_weighted_max(model, weights)
}

/// As [`minimize_weighted_max`], but a zero weight is allowed and pins
/// `Σ_{i∈l^c} r_i` to zero.
pub(crate) fn solve_weighted_max(model: &SourceModel, weights: &[f64]) -> Result<(f64, RateTuple)> {
    let program = weighted_max_program(model, weights)?;
    let (x, value) = lp::solve(&program, 1e-9)?.into_optimum()?;
    let users = model.num_users();
    Ok((value, RateTuple(x[..users].to_vec())))
}

/// Variables `(r_1, …, r_L, t)`; minimise `t` subject to the region and
/// `w_l·t − Σ_{i∈l^c} r_i >= 0`.
pub fn weighted_max_program(model: &SourceModel, weights: &[f64]) -> Result<LinearProgram> {
    let region = region_constraints(model)?;
    let users = region.users;
    if weights.len() != users {
        return Err(Error::LengthMismatch { expected: users, got: weights.len() });
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for c in &region.constraints {
        let mut row = indicator(c.subset, users);
        row.push(0.0);
        rows.push(row);
        rhs.push(c.bound);
    }
    for (l, &w) in weights.iter().enumerate() {
        let mut row: Vec<f64> = (0..users).map(|i| if i == l { 0.0 } else { -1.0 }).collect();
        row.push(w);
        rows.push(row);
        rhs.push(0.0);
    }
    let mut objective = vec![0.0; users];
    objective.push(1.0);
    LinearProgram::new(objective, rows, rhs)
}

/// `min_{r∈R(p)} ||r||`.
pub fn minimize_sum(model: &SourceModel) -> Result<(f64, RateTuple)> {
    let program = sum_program(model)?;
    let (x, value) = lp::solve(&program, 1e-9)?.into_optimum()?;
    Ok((value, RateTuple(x)))
}

pub fn sum_program(model: &SourceModel) -> Result<LinearProgram> {
    let region = region_constraints(model)?;
    region.program(vec![1.0; region.users])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::ComponentSource;

    fn set(u: &[usize]) -> SubsetIndex {
        SubsetIndex::from_users(u, 3).unwrap()
    }

    fn component(rates: &[(&[usize], f64)]) -> SourceModel {
        let comps = rates.iter().map(|(u, r)| (set(u), *r)).collect();
        SourceModel::from_oracle(&ComponentSource::new(3, comps).unwrap()).unwrap()
    }

    fn pairwise_shared() -> SourceModel {
        component(&[(&[1], 1.0), (&[2], 1.0), (&[3], 1.0), (&[1, 2], 1.0), (&[1, 3], 1.0), (&[2, 3], 1.0)])
    }

    fn single_pair() -> SourceModel {
        component(&[(&[1], 1.0), (&[2], 1.0), (&[3], 1.0), (&[2, 3], 1.0)])
    }

    fn skewed_pairs() -> SourceModel {
        component(&[(&[1], 1.0), (&[2], 1.0), (&[3], 1.0), (&[1, 2], 3.0), (&[1, 3], 3.0), (&[2, 3], 8.0)])
    }

    fn bounds(model: &SourceModel) -> Vec<(Vec<usize>, f64)> {
        region_constraints(model).unwrap().constraints.iter().map(|c| (c.subset.users(), c.bound)).collect()
    }

    #[test]
    fn example_regions() {
        let want3 = vec![
            (vec![1], 1.0),
            (vec![2], 1.0),
            (vec![3], 1.0),
            (vec![1, 2], 3.0),
            (vec![1, 3], 3.0),
            (vec![2, 3], 3.0),
        ];
        assert_eq!(bounds(&pairwise_shared()), want3);
        let want4 = vec![
            (vec![1], 1.0),
            (vec![2], 1.0),
            (vec![3], 1.0),
            (vec![1, 2], 2.0),
            (vec![1, 3], 2.0),
            (vec![2, 3], 3.0),
        ];
        assert_eq!(bounds(&single_pair()), want4);
        let indep = component(&[(&[1], 1.0), (&[2], 1.0), (&[3], 1.0)]);
        for (s, b) in bounds(&indep) {
            assert_eq!(b, s.len() as f64);
        }
    }

    #[test]
    fn json_shapes() {
        let r = serde_json::to_string(&RateTuple(vec![0.5, 1.5])).unwrap();
        assert_eq!(r, r#"{"rates":[0.5,1.5]}"#);
        let region = region_constraints(&single_pair()).unwrap();
        let v = serde_json::to_value(&region).unwrap();
        assert_eq!(v["constraints"][5], serde_json::json!({"subset": [2, 3], "bound": 3.0}));
    }

    #[test]
    fn slepian_wolf_adds_total() {
        let sw = slepian_wolf_constraints(&pairwise_shared()).unwrap();
        assert_eq!(sw.constraints.len(), 7);
        assert_eq!(sw.constraints.last().unwrap().bound, 6.0);
    }

    #[test]
    fn membership() {
        assert!(contains(&pairwise_shared(), &RateTuple(vec![1.5; 3]), 1e-9).unwrap().inside);
        let m = contains(&single_pair(), &RateTuple(vec![0.5, 1.5, 1.5]), 1e-9).unwrap();
        assert!(!m.inside);
        assert_eq!(m.violated, Some(Violation::Constraint { subset: set(&[1]), bound: 1.0, sum: 0.5 }));
        assert_eq!(m.worst_slack, -0.5);

        let m = contains(&pairwise_shared(), &RateTuple(vec![-1.0, 5.0, 5.0]), 1e-9).unwrap();
        assert!(matches!(m.violated, Some(Violation::Nonnegativity { user: 1, .. })));

        for model in [pairwise_shared(), single_pair(), skewed_pairs()] {
            let raw = RateTuple((1..=3).map(|l| model.entropy(SubsetIndex::singleton(l)).unwrap()).collect());
            assert!(contains(&model, &raw, 1e-9).unwrap().inside);
        }
        assert!(contains(&pairwise_shared(), &RateTuple(vec![1.0; 2]), 1e-9).is_err());
    }

    #[test]
    fn closed_form_tuples() {
        assert_eq!(r_star(&pairwise_shared()).unwrap().0, vec![1.5, 1.5, 1.5]);
        assert_eq!(r_star(&single_pair()).unwrap().0, vec![0.5, 1.5, 1.5]);
        assert_eq!(r_star(&skewed_pairs()).unwrap().0, vec![0.0, 5.0, 5.0]);
    }

    #[test]
    fn dagger_matches_star_on_examples() {
        for model in [pairwise_shared(), single_pair(), skewed_pairs()] {
            let a = r_star(&model).unwrap();
            let b = r_dagger(&model).unwrap();
            for (x, y) in a.0.iter().zip(&b.0) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pstar_examples() {
        assert!(in_pstar(&pairwise_shared(), 1e-9).unwrap().member);
        assert!(!in_pstar(&single_pair(), 1e-9).unwrap().member);
        assert!(!in_pstar(&skewed_pairs(), 1e-9).unwrap().member);
    }

    #[test]
    fn weighted_max_examples() {
        let (v, r) = minimize_weighted_max(&skewed_pairs(), &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - 10.0).abs() < 1e-9);
        assert!(contains(&skewed_pairs(), &r, 1e-9).unwrap().inside);
        let (v, _) = minimize_weighted_max(&skewed_pairs(), &[10.0, 4.0, 4.0]).unwrap();
        assert!((v - 1.5).abs() < 1e-9);
        let zero = component(&[]);
        let (v, r) = minimize_weighted_max(&zero, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(r.0, vec![0.0; 3]);
        assert!(matches!(minimize_weighted_max(&zero, &[1.0, 0.0, 1.0]), Err(Error::NonpositiveWeight { index: 1, .. })));
    }

    #[test]
    fn sum_examples() {
        let (v, r) = minimize_sum(&pairwise_shared()).unwrap();
        assert!((v - 4.5).abs() < 1e-9);
        assert!(r.0.iter().all(|x| (x - 1.5).abs() < 1e-9));
        // r_1 >= 1 and r_2 + r_3 >= 3 are the only binding constraints
        let (v, _) = minimize_sum(&single_pair()).unwrap();
        assert!((v - 4.0).abs() < 1e-9);
        assert_eq!(minimize_sum(&component(&[])).unwrap().0, 0.0);
    }
}

//! Finite-field multiway relay channel: capacity terms and bounds on the
//! optimal source-channel rate `κ*`.
//!
//! Uplink `U = X_1 ⊕ … ⊕ X_L ⊕ Z`, downlink `Y_l = V ⊕ N_l` over a field of
//! order `q`. Every bound here depends on the noise only through `H(Z)` and
//! `H(N_l)`, so that is all a [`ChannelSpec`] carries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::region::{self, RateTuple};
use crate::source::{pmf_entropy, SourceModel};
use crate::subset::SubsetIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    field_order: u64,
    uplink_noise_entropy: f64,
    downlink_noise_entropies: Vec<f64>,
}

const ENTROPY_SLACK: f64 = 1e-12;

impl ChannelSpec {
    pub fn new(field_order: u64, uplink_noise_entropy: f64, downlink_noise_entropies: Vec<f64>) -> Result<Self> {
        if field_order < 2 {
            return Err(Error::FieldOrder(field_order));
        }
        let max = (field_order as f64).log2();
        for &h in std::iter::once(&uplink_noise_entropy).chain(&downlink_noise_entropies) {
            if !(h >= -ENTROPY_SLACK && h <= max + ENTROPY_SLACK) {
                return Err(Error::EntropyOutOfRange { value: h, q: field_order });
            }
        }
        Ok(ChannelSpec { field_order, uplink_noise_entropy, downlink_noise_entropies })
    }

    /// Builds the spec from noise pmfs over the field (each of length `q`).
    pub fn from_noise_pmfs(field_order: u64, uplink: &[f64], downlinks: &[Vec<f64>]) -> Result<Self> {
        let entropy = |pmf: &[f64]| -> Result<f64> {
            if pmf.len() as u64 != field_order {
                return Err(Error::LengthMismatch { expected: field_order as usize, got: pmf.len() });
            }
            if let Some(&p) = pmf.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
                return Err(Error::ProbabilityOutOfRange(p));
            }
            let sum: f64 = pmf.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::MassNotOne { sum });
            }
            Ok(pmf_entropy(pmf))
        };
        let up = entropy(uplink)?;
        let down = downlinks.iter().map(|p| entropy(p)).collect::<Result<Vec<_>>>()?;
        ChannelSpec::new(field_order, up, down)
    }

    pub fn field_order(&self) -> u64 {
        self.field_order
    }

    pub fn uplink_noise_entropy(&self) -> f64 {
        self.uplink_noise_entropy
    }

    pub fn downlink_noise_entropies(&self) -> &[f64] {
        &self.downlink_noise_entropies
    }

    pub fn num_users(&self) -> usize {
        self.downlink_noise_entropies.len()
    }
}

/// `C_l` in bits per channel use.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityVector(pub Vec<f64>);

impl CapacityVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `C_l = log2 q − max{H(Z), H(N_l)}`; may be zero for a pure-noise link.
pub fn capacity_terms(ch: &ChannelSpec) -> CapacityVector {
    let log_q = (ch.field_order as f64).log2();
    CapacityVector(
        ch.downlink_noise_entropies
            .iter()
            .map(|&hn| log_q - ch.uplink_noise_entropy.max(hn))
            .collect(),
    )
}

/// `Σ_{i∈l^c} R_i <= C_l` for every `l`, within `tol`.
pub fn capacity_region_contains(caps: &CapacityVector, rates: &RateTuple, tol: f64) -> Result<bool> {
    let users = caps.len();
    if rates.len() != users {
        return Err(Error::LengthMismatch { expected: users, got: rates.len() });
    }
    let total: f64 = rates.0.iter().sum();
    Ok(rates.0.iter().zip(&caps.0).all(|(own, c)| total - own <= c + tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }
}

fn check_lengths(model: &SourceModel, caps: &CapacityVector) -> Result<usize> {
    let users = model.num_users();
    if caps.len() != users {
        return Err(Error::LengthMismatch { expected: users, got: caps.len() });
    }
    if users < 2 {
        return Err(Error::TooFewUsers(users));
    }
    Ok(users)
}

/// `Ψ = max_l H(W_{l^c} | W_l) / C_l`.
///
/// A link with `C_l <= tol` is unbounded if user `l` still needs data
/// (`h_l > tol`) and is skipped otherwise.
pub fn psi(model: &SourceModel, caps: &CapacityVector, tol: f64) -> Result<Bound> {
    check_lengths(model, caps)?;
    let h = model.h_vector();
    let mut best = 0.0f64;
    for (&hl, &c) in h.0.iter().zip(&caps.0) {
        if c <= tol {
            if hl > tol {
                return Ok(Bound::Unbounded);
            }
            continue;
        }
        best = best.max(hl / c);
    }
    Ok(Bound::Finite(best))
}

/// `Υ(r) = max_l (1/C_l) Σ_{i∈l^c} r_i`.
pub fn upsilon(r: &RateTuple, caps: &CapacityVector) -> Result<f64> {
    if r.len() != caps.len() {
        return Err(Error::LengthMismatch { expected: caps.len(), got: r.len() });
    }
    if let Some((l, &c)) = caps.0.iter().enumerate().find(|(_, c)| !(**c > 0.0)) {
        return Err(Error::NonpositiveCapacity { user: l + 1, value: c });
    }
    let total: f64 = r.0.iter().sum();
    Ok(r.0.iter().zip(&caps.0).map(|(own, c)| (total - own) / c).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum KappaVerdict {
    Exact { kappa: f64 },
    Bounds { lower: f64, upper: f64 },
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaResult {
    #[serde(flatten)]
    pub verdict: KappaVerdict,
    pub psi: Bound,
    /// `min Υ` over the region, when finite.
    pub min_upsilon: Option<f64>,
    /// A rate tuple attaining `min_upsilon`.
    pub witness: Option<RateTuple>,
}

/// Default tolerance for deciding that `Ψ` and `min Υ` meet.
pub const DEFAULT_MEET_TOL: f64 = 1e-7;

/// Lower bound `Ψ`, upper bound `min_{r∈R(p)} Υ(r)`, and whether they meet
/// (within `tol`), in which case `κ* = Ψ` and separation is optimal.
pub fn kappa_bounds(model: &SourceModel, caps: &CapacityVector, tol: f64) -> Result<KappaResult> {
    check_lengths(model, caps)?;
    let entropy_tol = model.tolerance();
    let lower = match psi(model, caps, entropy_tol)? {
        Bound::Finite(v) => v,
        Bound::Unbounded => {
            return Ok(KappaResult { verdict: KappaVerdict::Unbounded, psi: Bound::Unbounded, min_upsilon: None, witness: None })
        }
    };
    // links skipped by psi carry weight zero, pinning their incoming sum to zero
    let weights: Vec<f64> = caps.0.iter().map(|&c| if c <= entropy_tol { 0.0 } else { c }).collect();
    let (upper, witness) = region::solve_weighted_max(model, &weights)?;
    let verdict = if (upper - lower).abs() <= tol {
        KappaVerdict::Exact { kappa: lower }
    } else {
        KappaVerdict::Bounds { lower, upper }
    };
    Ok(KappaResult { verdict, psi: Bound::Finite(lower), min_upsilon: Some(upper), witness: Some(witness) })
}

/// Common-message rates for three users: returns the achievability threshold
/// `max_l (Σ of the rates of components not seen by l) / C_l` and whether the
/// pairwise rates satisfy `max/min <= 2` (all-zero pairs count as balanced).
pub fn common_message_threshold(rates: &[(SubsetIndex, f64)], caps: &CapacityVector) -> Result<(f64, bool)> {
    if caps.len() != 3 {
        return Err(Error::WrongUserCount { expected: 3, got: caps.len() });
    }
    let mut table = [0.0f64; 8];
    for &(s, r) in rates {
        s.check(3)?;
        if s.is_empty() || s.len() == 3 {
            return Err(Error::Invalid(format!("{s} is not a nonempty strict subset of [1,3]")));
        }
        if !(r >= 0.0) {
            return Err(Error::NegativeRate { subset: s.users(), rate: r });
        }
        table[s.mask() as usize] = r;
    }
    let mut threshold = 0.0f64;
    for l in 1..=3usize {
        let c = caps.0[l - 1];
        if !(c > 0.0) {
            return Err(Error::NonpositiveCapacity { user: l, value: c });
        }
        let others = SubsetIndex::singleton(l).complement(3);
        let need: f64 = others.subsets().skip(1).map(|s| table[s.mask() as usize]).sum();
        threshold = threshold.max(need / c);
    }
    let pairs = [table[0b011], table[0b101], table[0b110]];
    let hi = pairs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = pairs.iter().copied().fold(f64::INFINITY, f64::min);
    let balanced = if hi == 0.0 { true } else { hi <= 2.0 * lo };
    Ok((threshold, balanced))
}

//! Entropic structure, rate regions and relay-channel bounds for discrete
//! memoryless multi-terminal sources.
//!
//! A [`SourceModel`] holds `H(W_S)` for every subset `S` of the users. On top
//! of it sit the I-measure atoms ([`imeasure`]), the data-exchange region
//! `R(p)` and the `P*` test ([`region`]), bounds on the optimal
//! source-channel rate over a finite-field multiway relay channel
//! ([`relay`]) and the optimal storage rate ([`storage`]). All optimisation
//! runs on the in-crate simplex solver in [`lp`].

pub mod diagram;
pub mod error;
pub mod gen;
pub mod imeasure;
pub mod io;
pub mod lp;
pub mod region;
pub mod relay;
pub mod source;
pub mod storage;
pub mod subset;

pub use error::{Error, Result};
pub use imeasure::{atom_table, balanced_check, gap, AtomTable, BalanceReport};
pub use region::{contains, in_pstar, minimize_sum, minimize_weighted_max, r_dagger, r_star, RateTuple};
pub use relay::{capacity_terms, kappa_bounds, psi, upsilon, CapacityVector, ChannelSpec, KappaResult, KappaVerdict};
pub use source::{ComponentSource, EntropyOracle, EntropyProfile, EntropyVector, SourceModel, TabularPmf, DEFAULT_TOL};
pub use storage::{optimal_storage_rate, StorageReport};
pub use subset::{SubsetIndex, MAX_USERS};

//! Optimal rate for a centralised store that must let any client recover
//! everyone's data: `r_Σ* = min_{r∈R(p)} ||r||`, which equals `||h(p)||/(L−1)`
//! whenever `p ∈ P*`.

use serde::Serialize;

use crate::error::Result;
use crate::region::{in_pstar, minimize_sum, RateTuple};
use crate::source::SourceModel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StorageReport {
    pub optimal_rate: f64,
    pub argmin: RateTuple,
    /// True iff `p ∈ P*`, i.e. the closed form below is the optimum.
    pub closed_form_applicable: bool,
    /// `||h(p)||/(L−1)`, always computed; only meaningful when applicable.
    pub closed_form_value: f64,
}

pub fn optimal_storage_rate(model: &SourceModel) -> Result<StorageReport> {
    let (optimal_rate, argmin) = minimize_sum(model)?;
    let member = in_pstar(model, model.tolerance())?.member;
    Ok(StorageReport {
        optimal_rate,
        argmin,
        closed_form_applicable: member,
        closed_form_value: storage_closed_form(model)?,
    })
}

pub fn storage_closed_form(model: &SourceModel) -> Result<f64> {
    let users = model.num_users();
    if users < 2 {
        return Err(crate::error::Error::TooFewUsers(users));
    }
    Ok(model.h_vector().norm() / (users - 1) as f64)
}

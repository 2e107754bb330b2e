//! Source generators.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::source::{ComponentSource, TabularPmf};
use crate::subset::SubsetIndex;

/// Component source with rate `R_S` bits on each listed subset.
pub fn gen_component(users: usize, components: Vec<(SubsetIndex, f64)>) -> Result<ComponentSource> {
    ComponentSource::new(users, components)
}

/// Noisy binary sensors: `W_l = B ⊕ E_l` with `Pr{B = 0} = rho`,
/// `Pr{E_l = 0} = sigmas[l]`, all mutually independent.
pub fn gen_sensor(rho: f64, sigmas: &[f64]) -> Result<TabularPmf> {
    for &p in std::iter::once(&rho).chain(sigmas) {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
    }
    let users = sigmas.len();
    let mut pmf: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for b in 0..2usize {
        let pb = if b == 0 { rho } else { 1.0 - rho };
        for errors in 0u32..(1 << users) {
            let mut p = pb;
            let mut symbols = Vec::with_capacity(users);
            for (l, &sigma) in sigmas.iter().enumerate() {
                let e = ((errors >> l) & 1) as usize;
                p *= if e == 0 { sigma } else { 1.0 - sigma };
                symbols.push(b ^ e);
            }
            *pmf.entry(symbols).or_insert(0.0) += p;
        }
    }
    let entries = pmf.into_iter().filter(|(_, p)| *p > 0.0).collect();
    TabularPmf::new(vec![2; users], entries, 1e-9)
}

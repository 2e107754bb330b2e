#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use relayrate::io::load_source;
use relayrate::{ComponentSource, SourceModel, SubsetIndex, TabularPmf, DEFAULT_TOL};

pub fn fixture(name: &str) -> SourceModel {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    load_source(&text, DEFAULT_TOL, false).unwrap().model
}

pub fn set(users: usize, labels: &[usize]) -> SubsetIndex {
    SubsetIndex::from_users(labels, users).unwrap()
}

/// Random pmf on `alphabets`; about a fifth of the cells get probability zero.
pub fn random_pmf_on(rng: &mut ChaCha8Rng, alphabets: Vec<usize>) -> TabularPmf {
    let cells: usize = alphabets.iter().product();
    let mut weights: Vec<f64> = (0..cells).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
    if weights.iter().all(|w| *w == 0.0) {
        weights[0] = 1.0;
    }
    let total: f64 = weights.iter().sum();
    let entries = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(mut cell, w)| {
            let symbols = alphabets
                .iter()
                .map(|&a| {
                    let s = cell % a;
                    cell /= a;
                    s
                })
                .collect();
            (symbols, w / total)
        })
        .collect();
    TabularPmf::new(alphabets, entries, 1e-9).unwrap()
}

/// Random tabular source with alphabet sizes in `[1, 3]`.
pub fn random_pmf(rng: &mut ChaCha8Rng, users: usize) -> TabularPmf {
    let alphabets = (0..users).map(|_| rng.gen_range(1..=3)).collect();
    random_pmf_on(rng, alphabets)
}

pub fn random_tabular(rng: &mut ChaCha8Rng, users: usize) -> SourceModel {
    SourceModel::from_tabular(&random_pmf(rng, users)).unwrap()
}

/// Product of independent random marginals.
pub fn random_product(rng: &mut ChaCha8Rng, users: usize) -> SourceModel {
    let marginals: Vec<Vec<f64>> = (0..users)
        .map(|_| {
            let a = rng.gen_range(1..=3);
            let w: Vec<f64> = (0..a).map(|_| rng.gen::<f64>() + 0.01).collect();
            let t: f64 = w.iter().sum();
            w.into_iter().map(|x| x / t).collect()
        })
        .collect();
    let alphabets: Vec<usize> = marginals.iter().map(Vec::len).collect();
    let cells: usize = alphabets.iter().product();
    let entries = (0..cells)
        .map(|mut cell| {
            let mut p = 1.0;
            let symbols = marginals
                .iter()
                .map(|m| {
                    let s = cell % m.len();
                    cell /= m.len();
                    p *= m[s];
                    s
                })
                .collect();
            (symbols, p)
        })
        .collect();
    SourceModel::from_tabular(&TabularPmf::new(alphabets, entries, 1e-9).unwrap()).unwrap()
}

/// Component source with independent integer rates in `[0, max_rate]` on
/// a random selection of subsets.
pub fn random_component(rng: &mut ChaCha8Rng, users: usize, max_rate: u32) -> ComponentSource {
    let full = SubsetIndex::full(users).mask();
    let mut comps = Vec::new();
    for m in 1..=full {
        if rng.gen_bool(0.6) {
            comps.push((SubsetIndex::from_mask(m), rng.gen_range(0..=max_rate) as f64));
        }
    }
    ComponentSource::new(users, comps).unwrap()
}

/// Component source whose rates at each level `k ∈ [2, L−1]` lie in
/// `[base, gap_k · base]`, so it is balanced by construction.
pub fn balanced_component(rng: &mut ChaCha8Rng, users: usize) -> ComponentSource {
    let full = SubsetIndex::full(users).mask();
    let mut base = vec![0.0; users + 1];
    for b in base.iter_mut() {
        *b = if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.1..3.0) };
    }
    let comps = (1..=full)
        .map(|m| {
            let s = SubsetIndex::from_mask(m);
            let k = s.len();
            let rate = if (2..users).contains(&k) {
                let g = relayrate::gap(k, users).unwrap();
                base[k] * rng.gen_range(1.0..g)
            } else {
                rng.gen_range(0.0..3.0)
            };
            (s, rate)
        })
        .collect();
    ComponentSource::new(users, comps).unwrap()
}

pub fn model(c: &ComponentSource) -> SourceModel {
    SourceModel::from_oracle(c).unwrap()
}

/// Random LP with `n` variables, bounded by `x_j <= u_j`, plus up to
/// `extra` random rows. May be infeasible.
pub fn random_bounded_lp(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> relayrate::lp::LinearProgram {
    let objective = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..n {
        let mut row = vec![0.0; n];
        row[j] = -1.0;
        rows.push(row);
        rhs.push(-rng.gen_range(1.0..5.0));
    }
    // most programs get rows that a random point inside the box satisfies
    let anchor: Vec<f64> = rhs.iter().map(|b: &f64| rng.gen_range(0.0..-b)).collect();
    let feasible = rng.gen_bool(0.85);
    for _ in 0..rng.gen_range(0..=extra) {
        let row: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-1.0..2.0) })
            .collect();
        let b = if feasible {
            row.iter().zip(&anchor).map(|(a, x)| a * x).sum::<f64>() - rng.gen_range(0.0..1.0)
        } else {
            rng.gen_range(-2.0..3.0)
        };
        rows.push(row);
        rhs.push(b);
    }
    relayrate::lp::LinearProgram::new(objective, rows, rhs).unwrap()
}

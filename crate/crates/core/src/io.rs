//! JSON source and channel files. Subsets are 1-indexed user lists.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relay::ChannelSpec;
use crate::source::{profile_validate, ComponentSource, EntropyProfile, ProfileWarning, SourceModel, TabularPmf};
use crate::subset::SubsetIndex;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TabularFile {
    #[serde(rename = "type")]
    kind: String,
    users: usize,
    alphabets: Vec<usize>,
    pmf: Vec<PmfEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PmfEntry {
    symbols: Vec<usize>,
    p: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFile {
    #[serde(rename = "type")]
    kind: String,
    users: usize,
    components: Vec<ComponentEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentEntry {
    subset: Vec<usize>,
    bits: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    #[serde(rename = "type")]
    kind: String,
    users: usize,
    entropies: Vec<ProfileEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileEntry {
    subset: Vec<usize>,
    #[serde(rename = "H")]
    h: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    field_order: Option<u64>,
    uplink_noise_entropy: Option<f64>,
    downlink_noise_entropies: Option<Vec<f64>>,
    uplink_noise_pmf: Option<Vec<f64>>,
    downlink_noise_pmfs: Option<Vec<Vec<f64>>>,
}

/// A parsed source file, before entropies are materialised.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceFile {
    Tabular(TabularPmf),
    Component(ComponentSource),
    Profile(EntropyProfile),
}

impl SourceFile {
    pub fn kind(&self) -> &'static str {
        match self {
            SourceFile::Tabular(_) => "tabular",
            SourceFile::Component(_) => "component",
            SourceFile::Profile(_) => "profile",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedSource {
    pub kind: &'static str,
    pub model: SourceModel,
    /// Non-entropic profile warnings; always empty for pmf and component files.
    pub warnings: Vec<ProfileWarning>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn from_text<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(parse_error)
}

fn check_users(users: usize) -> Result<()> {
    if users < 2 {
        Err(Error::TooFewUsers(users))
    } else {
        Ok(())
    }
}

fn subset(labels: &[usize], users: usize) -> Result<SubsetIndex> {
    SubsetIndex::from_users(labels, users)
}

/// Parses a source file. `tol` is the pmf mass tolerance.
pub fn parse_source(text: &str, tol: f64) -> Result<SourceFile> {
    let value: serde_json::Value = from_text(text)?;
    let Some(object) = value.as_object() else {
        return Err(Error::Parse { line: 1, column: 1, message: "expected a JSON object".into() });
    };
    let kind = match object.get("type") {
        Some(serde_json::Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::Invalid("key `type` must be a string".into())),
        None => return Err(Error::Invalid("missing key `type`".into())),
    };
    match kind.as_str() {
        "tabular" => {
            let f: TabularFile = from_text(text)?;
            check_users(f.users)?;
            if f.alphabets.len() != f.users {
                return Err(Error::Invalid(format!(
                    "key `alphabets` has {} entries but `users` is {}",
                    f.alphabets.len(),
                    f.users
                )));
            }
            let entries = f.pmf.into_iter().map(|e| (e.symbols, e.p)).collect();
            Ok(SourceFile::Tabular(TabularPmf::new(f.alphabets, entries, tol)?))
        }
        "component" => {
            let f: ComponentFile = from_text(text)?;
            check_users(f.users)?;
            let comps = f
                .components
                .iter()
                .map(|c| Ok((subset(&c.subset, f.users)?, c.bits)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SourceFile::Component(ComponentSource::new(f.users, comps)?))
        }
        "profile" => {
            let f: ProfileFile = from_text(text)?;
            check_users(f.users)?;
            let values = f
                .entropies
                .iter()
                .map(|e| Ok((subset(&e.subset, f.users)?, e.h)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SourceFile::Profile(EntropyProfile::new(f.users, values)?))
        }
        other => Err(Error::Invalid(format!(
            "key `type` is {other:?}; expected \"tabular\", \"component\" or \"profile\""
        ))),
    }
}

/// Parses and materialises a source. With `strict`, non-entropic profiles are errors.
pub fn load_source(text: &str, tol: f64, strict: bool) -> Result<LoadedSource> {
    let file = parse_source(text, tol)?;
    let kind = file.kind();
    let (model, warnings) = match &file {
        SourceFile::Tabular(p) => (SourceModel::from_tabular(p)?, Vec::new()),
        SourceFile::Component(c) => (SourceModel::from_oracle(c)?, Vec::new()),
        SourceFile::Profile(p) => profile_validate(p, tol, strict)?,
    };
    Ok(LoadedSource { kind, model: model.with_tolerance(tol), warnings })
}

/// Parses a channel file in either the entropy form or the noise-pmf form.
pub fn parse_channel(text: &str) -> Result<ChannelSpec> {
    let f: ChannelFile = from_text(text)?;
    let entropy_form = f.uplink_noise_entropy.is_some() || f.downlink_noise_entropies.is_some();
    let pmf_form = f.uplink_noise_pmf.is_some() || f.downlink_noise_pmfs.is_some();
    match (entropy_form, pmf_form) {
        (true, true) => Err(Error::Invalid("channel mixes noise entropies and noise pmfs".into())),
        (false, false) => Err(Error::Invalid("missing key `uplink_noise_entropy` or `uplink_noise_pmf`".into())),
        (true, false) => {
            let q = f.field_order.ok_or_else(|| Error::Invalid("missing key `field_order`".into()))?;
            let up = f.uplink_noise_entropy.ok_or_else(|| Error::Invalid("missing key `uplink_noise_entropy`".into()))?;
            let down = f
                .downlink_noise_entropies
                .ok_or_else(|| Error::Invalid("missing key `downlink_noise_entropies`".into()))?;
            ChannelSpec::new(q, up, down)
        }
        (false, true) => {
            let up = f.uplink_noise_pmf.ok_or_else(|| Error::Invalid("missing key `uplink_noise_pmf`".into()))?;
            let down = f.downlink_noise_pmfs.ok_or_else(|| Error::Invalid("missing key `downlink_noise_pmfs`".into()))?;
            let q = f.field_order.unwrap_or(up.len() as u64);
            ChannelSpec::from_noise_pmfs(q, &up, &down)
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("source files always serialise");
    s.push('\n');
    s
}

/// Serialises a pmf in the tabular source format.
pub fn tabular_to_json(pmf: &TabularPmf) -> String {
    to_pretty(&TabularFile {
        kind: "tabular".into(),
        users: pmf.alphabets().len(),
        alphabets: pmf.alphabets().to_vec(),
        pmf: pmf.entries().iter().map(|(s, p)| PmfEntry { symbols: s.clone(), p: *p }).collect(),
    })
}

/// Serialises a component source in the component format.
pub fn component_to_json(source: &ComponentSource, users: usize) -> String {
    to_pretty(&ComponentFile {
        kind: "component".into(),
        users,
        components: source
            .components()
            .iter()
            .map(|(s, b)| ComponentEntry { subset: s.users(), bits: *b })
            .collect(),
    })
}

/// Serialises any model as a full entropy profile.
pub fn profile_to_json(model: &SourceModel) -> String {
    to_pretty(&ProfileFile {
        kind: "profile".into(),
        users: model.num_users(),
        entropies: model.entropies().into_iter().map(|(s, h)| ProfileEntry { subset: s.users(), h }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::DEFAULT_TOL;

    #[test]
    fn component_round_trip() {
        let text = r#"{"type":"component","users":3,"components":[{"subset":[1],"bits":1},{"subset":[2,3],"bits":1}]}"#;
        let SourceFile::Component(c) = parse_source(text, DEFAULT_TOL).unwrap() else { panic!() };
        let again = parse_source(&component_to_json(&c, 3), DEFAULT_TOL).unwrap();
        assert_eq!(again, SourceFile::Component(c));
    }

    #[test]
    fn tabular_and_profile() {
        let text = r#"{"type":"tabular","users":2,"alphabets":[2,2],
            "pmf":[{"symbols":[0,0],"p":0.5},{"symbols":[1,1],"p":0.5}]}"#;
        let loaded = load_source(text, DEFAULT_TOL, false).unwrap();
        assert_eq!(loaded.model.h_vector().0, vec![0.0, 0.0]);
        let profile = profile_to_json(&loaded.model);
        let again = load_source(&profile, DEFAULT_TOL, true).unwrap();
        assert_eq!(again.model.entropies(), loaded.model.entropies());
    }

    #[test]
    fn unknown_key_named_with_position() {
        let text = "{\"type\":\"component\",\n \"users\":3,\n \"components\":[],\n \"extra\":1}";
        match parse_source(text, DEFAULT_TOL) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("extra"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_source("{\"type\": ", DEFAULT_TOL), Err(Error::Parse { .. })));
    }

    #[test]
    fn rejects_single_user() {
        let text = r#"{"type":"component","users":1,"components":[]}"#;
        assert_eq!(parse_source(text, DEFAULT_TOL), Err(Error::TooFewUsers(1)));
    }

    #[test]
    fn strict_profile() {
        // H(W_1) > H(W_1, W_2) breaks monotonicity
        let text = r#"{"type":"profile","users":2,"entropies":[
            {"subset":[1],"H":2},{"subset":[2],"H":1},{"subset":[1,2],"H":1.5}]}"#;
        assert_eq!(load_source(text, DEFAULT_TOL, false).unwrap().warnings.len(), 1);
        assert!(matches!(load_source(text, DEFAULT_TOL, true), Err(Error::NonEntropic(_))));
    }

    #[test]
    fn channels() {
        let ch = parse_channel(r#"{"field_order":2,"uplink_noise_entropy":0,"downlink_noise_entropies":[0,0,0]}"#).unwrap();
        assert_eq!(ch.num_users(), 3);
        let ch = parse_channel(r#"{"uplink_noise_pmf":[1,0],"downlink_noise_pmfs":[[0.5,0.5],[1,0]]}"#).unwrap();
        assert_eq!(ch.field_order(), 2);
        assert_eq!(ch.downlink_noise_entropies(), &[1.0, 0.0]);
        assert!(parse_channel(r#"{"field_order":2,"uplink_noise_entropy":0}"#).is_err());
        assert!(parse_channel(r#"{"field_order":2,"bogus":0}"#).is_err());
    }
}

//! JSON interchange documents for scenarios, functionals and behaviors.
//!
//! Rationals travel as `"p/q"` strings and are reduced on load. Index origin
//! is 0 everywhere. Errors carry the JSON path of the offending field.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::behavior::Behavior;
use crate::functional::{BellFunctional, Form, TermKey};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// The only table order behaviors are written in.
pub const BEHAVIOR_ORDER: &str = "settings-major-lex";

/// A rational stored as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalString(pub Rational);

impl Serialize for RationalString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(RationalString).map_err(de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub settings: Vec<usize>,
    /// Empty (or absent) for correlator-form terms.
    #[serde(default)]
    pub outcomes: Vec<usize>,
    pub coeff: RationalString,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    pub scenario: Scenario,
    pub form: Form,
    pub bound: RationalString,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorDoc {
    pub scenario: Scenario,
    pub order: String,
    pub entries: Vec<RationalString>,
}

impl From<&BellFunctional> for FunctionalDoc {
    fn from(f: &BellFunctional) -> Self {
        Self {
            scenario: f.scenario().clone(),
            form: f.form(),
            bound: RationalString(f.bound().clone()),
            terms: f
                .terms()
                .iter()
                .map(|(k, c)| TermDoc {
                    settings: k.settings.clone(),
                    outcomes: k.outcomes.clone(),
                    coeff: RationalString(c.clone()),
                })
                .collect(),
        }
    }
}

impl TryFrom<FunctionalDoc> for BellFunctional {
    type Error = Error;

    fn try_from(doc: FunctionalDoc) -> Result<Self> {
        let terms = doc
            .terms
            .into_iter()
            .map(|t| (TermKey::new(t.settings, t.outcomes), t.coeff.0));
        BellFunctional::new(doc.scenario, doc.form, doc.bound.0, terms)
    }
}

impl From<&Behavior> for BehaviorDoc {
    fn from(p: &Behavior) -> Self {
        Self {
            scenario: p.scenario().clone(),
            order: BEHAVIOR_ORDER.to_string(),
            entries: p.table().iter().cloned().map(RationalString).collect(),
        }
    }
}

impl TryFrom<BehaviorDoc> for Behavior {
    type Error = Error;

    fn try_from(doc: BehaviorDoc) -> Result<Self> {
        if doc.order != BEHAVIOR_ORDER {
            return Err(Error::Document {
                path: "order".into(),
                message: format!("unsupported order {:?}, expected {BEHAVIOR_ORDER:?}", doc.order),
            });
        }
        let table = doc.entries.into_iter().map(|r| r.0).collect();
        Behavior::from_table(doc.scenario, table)
    }
}

/// Any of the three document kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Scenario(Scenario),
    Functional(BellFunctional),
    Behavior(Behavior),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Scenario(_) => "scenario",
            Document::Functional(_) => "functional",
            Document::Behavior(_) => "behavior",
        }
    }

    pub fn scenario(&self) -> &Scenario {
        match self {
            Document::Scenario(s) => s,
            Document::Functional(f) => f.scenario(),
            Document::Behavior(p) => p.scenario(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Document::Scenario(s) => to_pretty(s),
            Document::Functional(f) => functional_to_json(f),
            Document::Behavior(p) => behavior_to_json(p),
        }
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("document types always serialize");
    s.push('\n');
    s
}

pub fn functional_to_json(f: &BellFunctional) -> String {
    to_pretty(&FunctionalDoc::from(f))
}

pub fn behavior_to_json(p: &Behavior) -> String {
    to_pretty(&BehaviorDoc::from(p))
}

pub fn scenario_to_json(s: &Scenario) -> String {
    to_pretty(s)
}

fn typed<T: for<'de> Deserialize<'de>>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Document {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

/// Parses a document, telling the kind apart by its keys: `terms` marks a
/// functional, `entries` a behavior, `parties` a bare scenario.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Document {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let object = value.as_object().ok_or_else(|| Error::Document {
        path: ".".into(),
        message: "expected a JSON object".into(),
    })?;
    if object.contains_key("terms") {
        Ok(Document::Functional(typed::<FunctionalDoc>(value)?.try_into()?))
    } else if object.contains_key("entries") {
        Ok(Document::Behavior(typed::<BehaviorDoc>(value)?.try_into()?))
    } else if object.contains_key("parties") {
        Ok(Document::Scenario(typed(value)?))
    } else {
        Err(Error::Document {
            path: ".".into(),
            message: "not a scenario, functional or behavior document".into(),
        })
    }
}

pub fn parse_functional(text: &str) -> Result<BellFunctional> {
    match parse_document(text)? {
        Document::Functional(f) => Ok(f),
        other => Err(wrong_kind("functional", &other)),
    }
}

pub fn parse_behavior(text: &str) -> Result<Behavior> {
    match parse_document(text)? {
        Document::Behavior(p) => Ok(p),
        other => Err(wrong_kind("behavior", &other)),
    }
}

fn wrong_kind(want: &str, got: &Document) -> Error {
    Error::Document {
        path: ".".into(),
        message: format!("expected a {want} document, found a {}", got.kind()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn functional_round_trip() {
        for f in [fixtures::chsh_prob(), fixtures::chsh_corr(), fixtures::mermin()] {
            let json = functional_to_json(&f);
            assert_eq!(parse_functional(&json).unwrap(), f);
        }
    }

    #[test]
    fn behavior_round_trip() {
        let p = fixtures::pr_box();
        let json = behavior_to_json(&p);
        assert!(json.contains("\"order\": \"settings-major-lex\""));
        assert!(json.contains("\"1/2\""));
        assert_eq!(parse_behavior(&json).unwrap(), p);
    }

    #[test]
    fn rationals_are_reduced_on_load() {
        let json = r#"{"scenario":{"parties":[{"settings":1,"outcomes":2},{"settings":1,"outcomes":2}]},
            "form":"probability","bound":"4/2","terms":[{"settings":[0,0],"outcomes":[0,0],"coeff":"2/4"}]}"#;
        let f = parse_functional(json).unwrap();
        assert_eq!(f.bound(), &Rational::from_integer(2.into()));
        assert!(functional_to_json(&f).contains("\"1/2\""));
    }

    #[test]
    fn errors_name_the_path() {
        let json = r#"{"scenario":{"parties":[{"settings":2,"outcomes":2},{"settings":2,"outcomes":2}]},
            "form":"probability","bound":"3/1","terms":[{"settings":[0,0],"outcomes":[0,0],"coeff":"1/0"}]}"#;
        match parse_functional(json).unwrap_err() {
            Error::Document { path, .. } => assert_eq!(path, "terms[0].coeff"),
            e => panic!("unexpected {e}"),
        }
        let json = r#"{"scenario":{"parties":[{"settings":1,"outcomes":2}]},"order":"outcomes-major","entries":["1/2","1/2"]}"#;
        match parse_behavior(json).unwrap_err() {
            Error::Document { path, .. } => assert_eq!(path, "order"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn kind_detection() {
        let s = scenario_to_json(&fixtures::chsh_scenario());
        assert_eq!(parse_document(&s).unwrap().kind(), "scenario");
        assert!(parse_functional(&s).is_err());
        assert!(parse_document("[1]").is_err());
        assert!(parse_document("{").is_err());
    }
}

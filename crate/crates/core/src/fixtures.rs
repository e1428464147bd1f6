//! Built-in example inputs, and the small envelope every TOML input shares: a `schema` key naming
//! the payload kind and an optional `[expected]` table of verdicts per command.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correspondence::GMapSpec;
use crate::lambda::PullbackSpec;
use crate::slopes::PluginSlopeMap;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixtureError {
    #[error("config: {0}")]
    ConfigParse(String),
    #[error("unknown fixture `{0}`")]
    FixtureUnknown(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    GmapInjective,
    GmapConstant,
    LambdaSpec,
    SlopePlugin,
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixtureKind::GmapInjective => "gmap-injective",
            FixtureKind::GmapConstant => "gmap-constant",
            FixtureKind::LambdaSpec => "lambda-spec",
            FixtureKind::SlopePlugin => "slope-plugin",
        })
    }
}

/// A parsed input: its kind, the raw text, and the verdicts it expects.
#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub kind: FixtureKind,
    #[serde(skip)]
    pub text: String,
    pub expected: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct Envelope {
    schema: FixtureKind,
    #[serde(default)]
    expected: BTreeMap<String, String>,
}

impl Config {
    /// Reads the envelope and checks the payload against the schema it names.
    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let bad = |e: String| FixtureError::ConfigParse(e);
        let env: Envelope = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        match env.schema {
            FixtureKind::GmapInjective | FixtureKind::GmapConstant => {
                let spec = GMapSpec::from_toml(text).map_err(|e| bad(e.to_string()))?;
                let constant = spec.kind.as_deref() == Some("constant");
                if constant != (env.schema == FixtureKind::GmapConstant) {
                    return Err(bad(format!("schema {} disagrees with model kind", env.schema)));
                }
            }
            FixtureKind::LambdaSpec => {
                PullbackSpec::from_toml(text).map_err(|e| bad(e.to_string()))?;
            }
            FixtureKind::SlopePlugin => {
                PluginSlopeMap::from_toml(text).map_err(|e| bad(e.to_string()))?;
            }
        }
        Ok(Config { kind: env.schema, text: text.to_string(), expected: env.expected })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureManifest {
    pub name: &'static str,
    pub kind: FixtureKind,
    pub payload_path: &'static str,
    #[serde(skip)]
    pub text: &'static str,
}

impl FixtureManifest {
    pub fn config(&self) -> Result<Config, FixtureError> {
        Config::parse(self.text)
    }
}

macro_rules! fixture {
    ($name:literal, $kind:expr) => {
        FixtureManifest {
            name: $name,
            kind: $kind,
            payload_path: concat!("fixtures/", $name, ".toml"),
            text: include_str!(concat!("../fixtures/", $name, ".toml")),
        }
    };
}

pub fn fixture_registry() -> Vec<FixtureManifest> {
    use FixtureKind::*;
    vec![
        fixture!("rabbit", GmapInjective),
        fixture!("z2i", GmapInjective),
        fixture!("constant-quartic", GmapConstant),
        fixture!("lattes-proper", GmapInjective),
        fixture!("blowup-lattes", SlopePlugin),
        fixture!("blowup-lambda", LambdaSpec),
    ]
}

pub fn fixture(name: &str) -> Result<FixtureManifest, FixtureError> {
    fixture_registry().into_iter().find(|f| f.name == name).ok_or_else(|| FixtureError::FixtureUnknown(name.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_parses_under_its_kind() {
        for f in fixture_registry() {
            assert_eq!(f.config().unwrap().kind, f.kind, "{}", f.name);
        }
    }

    #[test]
    fn envelope_errors() {
        assert!(matches!(Config::parse("num = ["), Err(FixtureError::ConfigParse(_))));
        assert!(matches!(Config::parse("schema = \"nope\""), Err(FixtureError::ConfigParse(_))));
        assert!(matches!(fixture("nope"), Err(FixtureError::FixtureUnknown(_))));
    }
}

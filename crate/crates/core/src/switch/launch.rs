use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::qbv::{GateControlList, SelectionPolicy};
use crate::switch::{FlowSpec, SrTableEntry};
use crate::time::SimDuration;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortGcl {
    pub port: u16,
    pub schedule: GateControlList,
}

/// A switch's launch configuration: everything needed to bring a fresh
/// switch to a known state before the first event.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchConfig {
    #[serde(default)]
    pub policy: SelectionPolicy,
    #[serde(default)]
    pub processing_delay: SimDuration,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gcl: Vec<PortGcl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flows: Vec<FlowSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sr: Vec<SrTableEntry>,
}

impl SwitchConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("launch config is always representable")
    }

    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Format(e.to_string()))
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::ethernet::{Frame, MacAddr};

/// Match fields; `None` is a wildcard.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowMatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_port: Option<u16>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dst_mac: Option<MacAddr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ethertype: Option<u16>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pcp: Option<u8>,
}

impl FlowMatch {
    pub fn any() -> Self {
        FlowMatch::default()
    }

    pub fn dst(mac: MacAddr) -> Self {
        FlowMatch {
            dst_mac: Some(mac),
            ..Default::default()
        }
    }

    pub fn matches(&self, frame: &Frame, in_port: u16) -> bool {
        self.in_port.is_none_or(|p| p == in_port)
            && self.dst_mac.is_none_or(|m| m == frame.dst_mac)
            && self.ethertype.is_none_or(|e| e == frame.ethertype)
            && self.pcp.is_none_or(|p| p == frame.pcp)
    }
}

impl fmt::Display for FlowMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(p) = self.in_port {
            parts.push(format!("in_port={p}"));
        }
        if let Some(m) = self.dst_mac {
            parts.push(format!("dst={m}"));
        }
        if let Some(e) = self.ethertype {
            parts.push(format!("ethertype={e:#06x}"));
        }
        if let Some(p) = self.pcp {
            parts.push(format!("pcp={p}"));
        }
        if parts.is_empty() {
            f.write_str("*")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FlowAction {
    Output(u16),
    ToController,
    Drop,
}

impl fmt::Display for FlowAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowAction::Output(p) => write!(f, "output:{p}"),
            FlowAction::ToController => f.write_str("controller"),
            FlowAction::Drop => f.write_str("drop"),
        }
    }
}

impl FromStr for FlowAction {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.trim() {
            "controller" => Ok(FlowAction::ToController),
            "drop" => Ok(FlowAction::Drop),
            other => other
                .strip_prefix("output:")
                .and_then(|p| p.parse().ok())
                .map(FlowAction::Output)
                .ok_or_else(|| ParseError::new(format!("unknown flow action `{other}`"))),
        }
    }
}

impl TryFrom<String> for FlowAction {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Self, ParseError> {
        s.parse()
    }
}

impl From<FlowAction> for String {
    fn from(a: FlowAction) -> String {
        a.to_string()
    }
}

/// What a controller sends in a flow-mod and what a launch file stores.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub priority: u16,
    #[serde(rename = "match", default)]
    pub matcher: FlowMatch,
    pub actions: Vec<FlowAction>,
}

impl fmt::Display for FlowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let actions: Vec<String> = self.actions.iter().map(ToString::to_string).collect();
        write!(
            f,
            "prio={} match={} actions={}",
            self.priority,
            self.matcher,
            actions.join("+")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEntry {
    pub priority: u16,
    pub matcher: FlowMatch,
    pub actions: Vec<FlowAction>,
    pub entry_id: u64,
    pub packet_count: u64,
    pub byte_count: u64,
}

impl FlowEntry {
    pub fn spec(&self) -> FlowSpec {
        FlowSpec {
            priority: self.priority,
            matcher: self.matcher.clone(),
            actions: self.actions.clone(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct FlowTable {
    entries: Vec<FlowEntry>,
    next_id: u64,
}

impl FlowTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a rule. A rule with the same priority and an identical match
    /// is replaced in place (keeping its id and counters). Returns the id.
    pub fn insert(&mut self, spec: FlowSpec) -> u64 {
        if let Some(existing) = self
            .entries
            .iter_mut()
            .find(|e| e.priority == spec.priority && e.matcher == spec.matcher)
        {
            existing.actions = spec.actions;
            return existing.entry_id;
        }
        let entry_id = self.next_id;
        self.next_id += 1;
        self.entries.push(FlowEntry {
            priority: spec.priority,
            matcher: spec.matcher,
            actions: spec.actions,
            entry_id,
            packet_count: 0,
            byte_count: 0,
        });
        entry_id
    }

    /// Highest priority match; ties go to the oldest entry.
    pub fn lookup(&self, frame: &Frame, in_port: u16) -> Option<&FlowEntry> {
        self.best_index(frame, in_port).map(|i| &self.entries[i])
    }

    /// Like [`lookup`](Self::lookup), but also bumps the entry's counters.
    pub fn lookup_and_count(&mut self, frame: &Frame, in_port: u16) -> Option<&FlowEntry> {
        let i = self.best_index(frame, in_port)?;
        let entry = &mut self.entries[i];
        entry.packet_count += 1;
        entry.byte_count += frame.wire_size as u64;
        Some(entry)
    }

    fn best_index(&self, frame: &Frame, in_port: u16) -> Option<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.matcher.matches(frame, in_port))
            .min_by_key(|(_, e)| (std::cmp::Reverse(e.priority), e.entry_id))
            .map(|(i, _)| i)
    }

    pub fn entries(&self) -> &[FlowEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.next_id = 0;
    }
}

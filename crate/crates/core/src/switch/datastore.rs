//! The running datastore for gate control lists.
//!
//! Text form, used both for `get-config` replies and `edit-config` payloads,
//! is one `<port>=<gcl>` line per port in ascending port order:
//!
//! ```text
//! 1=G:15;Y:860;R:125
//! 5=R:10;G:15;Y:860;R:115
//! ```
//!
//! An edit payload may name any subset of ports.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{ParseError, SwitchError};
use crate::qbv::GateControlList;

/// Name of the only datastore a switch exposes.
pub const RUNNING: &str = "running";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GclDatastore {
    ports: BTreeMap<u16, GateControlList>,
}

impl GclDatastore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, port: u16) -> Option<&GateControlList> {
        self.ports.get(&port)
    }

    pub fn set(&mut self, port: u16, gcl: GateControlList) {
        self.ports
            .insert(port, gcl.with_base_time(Default::default()));
    }

    pub fn iter(&self) -> impl Iterator<Item = (u16, &GateControlList)> {
        self.ports.iter().map(|(p, g)| (*p, g))
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GclDatastore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (port, gcl) in &self.ports {
            writeln!(f, "{port}={gcl}")?;
        }
        Ok(())
    }
}

/// Render a per-port edit payload.
pub fn format_payload<'a>(lists: impl IntoIterator<Item = (u16, &'a GateControlList)>) -> String {
    let sorted: BTreeMap<u16, &GateControlList> = lists.into_iter().collect();
    sorted
        .into_iter()
        .map(|(p, g)| format!("{p}={g}\n"))
        .collect()
}

/// Parse a datastore / edit payload. Duplicate ports are rejected.
pub fn parse_payload(text: &str) -> Result<BTreeMap<u16, GateControlList>, SwitchError> {
    let mut out = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (port, gcl) = line
            .split_once('=')
            .ok_or_else(|| ParseError::new(format!("payload line `{line}` lacks `=`")))?;
        let port: u16 = port
            .trim()
            .parse()
            .map_err(|_| ParseError::new(format!("bad port `{port}`")))?;
        let gcl = GateControlList::parse(gcl)
            .map_err(|source| SwitchError::InvalidGcl { port, source })?;
        if out.insert(port, gcl).is_some() {
            return Err(ParseError::new(format!("port {port} appears twice")).into());
        }
    }
    if out.is_empty() {
        return Err(ParseError::new("empty payload").into());
    }
    Ok(out)
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::SwitchError;
use crate::ethernet::MacAddr;
use crate::srp::StreamId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrTableEntry {
    pub stream_id: StreamId,
    pub dst_mac: MacAddr,
    pub pcp: u8,
    pub talker_port: u16,
    #[serde(default)]
    pub listener_ports: BTreeSet<u16>,
}

/// Registered talkers and listeners, keyed by stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SrTable {
    entries: BTreeMap<StreamId, SrTableEntry>,
}

impl SrTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_talker(&mut self, stream: StreamId, dst_mac: MacAddr, pcp: u8, port: u16) {
        let entry = self.entries.entry(stream).or_insert_with(|| SrTableEntry {
            stream_id: stream,
            dst_mac,
            pcp,
            talker_port: port,
            listener_ports: BTreeSet::new(),
        });
        entry.dst_mac = dst_mac;
        entry.pcp = pcp;
        entry.talker_port = port;
        entry.listener_ports.remove(&port);
    }

    /// Returns false if the stream has no talker here.
    pub fn add_listener(&mut self, stream: StreamId, port: u16) -> Result<bool, SwitchError> {
        let Some(entry) = self.entries.get_mut(&stream) else {
            return Ok(false);
        };
        if entry.talker_port == port {
            return Err(SwitchError::TalkerIsListener {
                stream: stream.0,
                port,
            });
        }
        entry.listener_ports.insert(port);
        Ok(true)
    }

    pub fn insert(&mut self, entry: SrTableEntry) -> Result<(), SwitchError> {
        if entry.listener_ports.contains(&entry.talker_port) {
            return Err(SwitchError::TalkerIsListener {
                stream: entry.stream_id.0,
                port: entry.talker_port,
            });
        }
        self.entries.insert(entry.stream_id, entry);
        Ok(())
    }

    pub fn get(&self, stream: StreamId) -> Option<&SrTableEntry> {
        self.entries.get(&stream)
    }

    pub fn entries(&self) -> impl Iterator<Item = &SrTableEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

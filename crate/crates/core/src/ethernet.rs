//! Frames, links and serialization timing.
//!
//! The timing model is deliberately bare: a frame occupies a link for
//! `wire_size * 8 / bitrate` and nothing else (no preamble, SFD or
//! inter-frame gap). Every hop is store-and-forward.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, SimError};
use crate::srp::SrpMessage;
use crate::time::{SimDuration, SimTime, NANOS_PER_SEC};

pub const MIN_FRAME_SIZE: u32 = 64;
pub const MAX_FRAME_SIZE: u32 = 1522;

/// Ethertype used for generated data traffic (IEEE local experimental).
pub const ETHERTYPE_DATA: u16 = 0x88B5;
/// MSRP ethertype.
pub const ETHERTYPE_SRP: u16 = 0x22EA;
/// Wire size used for SRP signalling frames.
pub const SRP_FRAME_SIZE: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MacAddr(pub [u8; 6]);

impl MacAddr {
    /// Group address MSRP PDUs are sent to.
    pub const SRP_GROUP: MacAddr = MacAddr([0x01, 0x80, 0xC2, 0x00, 0x00, 0x0E]);

    pub fn is_multicast(&self) -> bool {
        self.0[0] & 0x01 != 0
    }

    /// Locally administered unicast address with `index` in the low bytes.
    pub fn local(index: u32) -> MacAddr {
        let b = index.to_be_bytes();
        MacAddr([0x02, 0x00, b[0], b[1], b[2], b[3]])
    }

    /// Locally administered multicast address for stream `index`.
    pub fn stream_group(index: u32) -> MacAddr {
        let b = index.to_be_bytes();
        MacAddr([0x03, 0x00, b[0], b[1], b[2], b[3]])
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            b[0], b[1], b[2], b[3], b[4], b[5]
        )
    }
}

impl FromStr for MacAddr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = [0u8; 6];
        let mut parts = s.split(':');
        for byte in out.iter_mut() {
            let part = parts
                .next()
                .ok_or_else(|| ParseError::new(format!("MAC address `{s}` is too short")))?;
            if part.len() != 2 {
                return Err(ParseError::new(format!("bad MAC address octet `{part}`")));
            }
            *byte = u8::from_str_radix(part, 16)
                .map_err(|_| ParseError::new(format!("bad MAC address octet `{part}`")))?;
        }
        if parts.next().is_some() {
            return Err(ParseError::new(format!("MAC address `{s}` is too long")));
        }
        Ok(MacAddr(out))
    }
}

impl TryFrom<String> for MacAddr {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Self, ParseError> {
        s.parse()
    }
}

impl From<MacAddr> for String {
    fn from(m: MacAddr) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Data,
    Srp(SrpMessage),
}

/// An 802.1Q-tagged frame. `wire_size` covers every header including the tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub src_mac: MacAddr,
    pub dst_mac: MacAddr,
    pub ethertype: u16,
    pub pcp: u8,
    pub vid: u16,
    pub wire_size: u32,
    pub flow_id: Arc<str>,
    pub seq: u64,
    pub created_at: SimTime,
    pub payload: Payload,
}

impl Frame {
    pub fn check(&self) -> Result<(), String> {
        if !(MIN_FRAME_SIZE..=MAX_FRAME_SIZE).contains(&self.wire_size) {
            return Err(format!(
                "frame size {} outside [{MIN_FRAME_SIZE}, {MAX_FRAME_SIZE}]",
                self.wire_size
            ));
        }
        if self.pcp > 7 {
            return Err(format!("pcp {} out of range", self.pcp));
        }
        if self.vid > 0x0FFF {
            return Err(format!("vid {} out of range", self.vid));
        }
        Ok(())
    }

    pub fn is_srp(&self) -> bool {
        self.ethertype == ETHERTYPE_SRP
    }

    pub fn srp(&self) -> Option<&SrpMessage> {
        match &self.payload {
            Payload::Srp(msg) => Some(msg),
            Payload::Data => None,
        }
    }

    /// Build an SRP signalling frame.
    pub fn srp_message(src_mac: MacAddr, msg: SrpMessage, created_at: SimTime) -> Frame {
        Frame {
            src_mac,
            dst_mac: MacAddr::SRP_GROUP,
            ethertype: ETHERTYPE_SRP,
            pcp: 0,
            vid: 0,
            wire_size: SRP_FRAME_SIZE,
            flow_id: Arc::from("srp"),
            seq: 0,
            created_at,
            payload: Payload::Srp(msg),
        }
    }
}

/// Time a frame of `wire_size` bytes occupies a link of `bitrate` bit/s,
/// rounded to the nearest nanosecond.
pub fn serialization_time(wire_size: u32, bitrate: u64) -> SimDuration {
    assert!(bitrate > 0, "bitrate must be positive");
    let bits = wire_size as u128 * 8;
    let ns = (bits * NANOS_PER_SEC as u128 + bitrate as u128 / 2) / bitrate as u128;
    SimDuration(ns as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub bitrate: u64,
    pub propagation_delay: SimDuration,
}

impl Link {
    pub fn new(bitrate: u64) -> Self {
        Link {
            bitrate,
            propagation_delay: SimDuration::ZERO,
        }
    }

    pub fn serialization_time(&self, wire_size: u32) -> SimDuration {
        serialization_time(wire_size, self.bitrate)
    }
}

/// Sending state of one direction of a full-duplex link.
#[derive(Debug, Clone, Default)]
pub struct LinkDirection {
    busy_until: SimTime,
    last_delivery: SimTime,
    frames: u64,
}

impl LinkDirection {
    /// Start sending `wire_size` bytes at `start`; returns the instant the far
    /// end has the whole frame.
    pub fn transmit(
        &mut self,
        link: &Link,
        wire_size: u32,
        start: SimTime,
    ) -> Result<SimTime, SimError> {
        if start < self.busy_until {
            return Err(SimError::ModelFault(format!(
                "overlapping transmission: start {start} while busy until {}",
                self.busy_until
            )));
        }
        let end = start + link.serialization_time(wire_size);
        let delivery = end + link.propagation_delay;
        debug_assert!(delivery >= self.last_delivery, "reordering on a link");
        self.busy_until = end;
        self.last_delivery = delivery;
        self.frames += 1;
        Ok(delivery)
    }

    pub fn busy_until(&self) -> SimTime {
        self.busy_until
    }

    pub fn frames(&self) -> u64 {
        self.frames
    }
}

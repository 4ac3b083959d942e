//! Stream reservation signalling carried inside Ethernet frames.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ethernet::MacAddr;
use crate::time::SimDuration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StreamId(pub u64);

impl fmt::Display for StreamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SrpMessage {
    TalkerAdvertise {
        stream: StreamId,
        dst_mac: MacAddr,
        pcp: u8,
        max_frame_size: u32,
        interval: SimDuration,
    },
    ListenerReady {
        stream: StreamId,
    },
}

impl SrpMessage {
    pub fn stream(&self) -> StreamId {
        match self {
            SrpMessage::TalkerAdvertise { stream, .. } | SrpMessage::ListenerReady { stream } => {
                *stream
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SrpMessage::TalkerAdvertise { .. } => "talker-advertise",
            SrpMessage::ListenerReady { .. } => "listener-ready",
        }
    }
}

use thiserror::Error;

use crate::time::{SimDuration, SimTime};

/// Malformed textual input (durations, MAC addresses, GCL text, payloads).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError {
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("event scheduled in the past: now {now}, fire_at {fire_at}")]
    ScheduleInPast { now: SimTime, fire_at: SimTime },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GclError {
    #[error("gate control list has no entries")]
    Empty,
    #[error("gate control entry {index} has zero duration")]
    ZeroDuration { index: usize },
    #[error("entry durations sum to {sum}, expected cycle {cycle}")]
    CycleMismatch {
        sum: SimDuration,
        cycle: SimDuration,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Errors raised by a switch's management surfaces (launch config, NetConf).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwitchError {
    #[error("launch configuration can only be imported before the simulation starts")]
    ImportAfterStart,
    #[error("switch `{switch}` has no port {port}")]
    UnknownPort { switch: String, port: u16 },
    #[error("port {port}: {source}")]
    InvalidGcl {
        port: u16,
        #[source]
        source: GclError,
    },
    #[error("stream {stream}: talker port {port} is also a listener port")]
    TalkerIsListener { stream: u64, port: u16 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A scenario that fails validation; reported before any event runs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("duplicate node name `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("port {port} of `{node}` is used by more than one link")]
    PortInUse { node: String, port: u16 },
    #[error("hosts have a single port 1, got `{0}`")]
    BadHostPort(String),
    #[error("link `{a}` <-> `{b}` has zero bitrate")]
    ZeroBitrate { a: String, b: String },
    #[error("topology is not connected: `{0}` is unreachable")]
    Disconnected(String),
    #[error("switch `{0}` has no control channel")]
    NoControlChannel(String),
    #[error("timeline is not ordered: {later} comes after {earlier}")]
    TimelineOrder { earlier: SimTime, later: SimTime },
    #[error("traffic source `{0}` has a zero period")]
    ZeroPeriod(String),
    #[error("traffic source `{flow}`: {reason}")]
    BadTraffic { flow: String, reason: String },
    #[error("switch `{switch}`: {source}")]
    Switch {
        switch: String,
        #[source]
        source: SwitchError,
    },
    #[error("timeline entry at {at}: {reason}")]
    BadTimeline { at: SimTime, reason: String },
    #[error("srp: {0}")]
    BadSrp(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("scenario file: {0}")]
    Format(String),
}

/// Faults raised while the simulation is running. Any of these indicates a
/// bug in the model rather than a property of the simulated network.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    ModelFault(String),
}

//! Scenario files.
//!
//! A scenario is a TOML document describing the topology, initial switch
//! configuration, traffic, SRP signalling and the controller timeline.
//! Endpoints are written `node:port`; hosts have exactly one port, `1`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::control::{ControlTimeline, TimelineAction, TimelineEntry};
use crate::error::{ParseError, ScenarioError};
use crate::ethernet::{MacAddr, MAX_FRAME_SIZE, MIN_FRAME_SIZE};
use crate::srp::StreamId;
use crate::switch::{SwitchConfig, DEFAULT_CYCLE};
use crate::time::{SimDuration, SimTime};

/// The only port a host has.
pub const HOST_PORT: u16 = 1;

fn default_vid() -> u16 {
    1
}

fn default_controller() -> String {
    "controller".into()
}

fn is_zero(d: &SimDuration) -> bool {
    d.is_zero()
}

fn is_zero_time(t: &SimTime) -> bool {
    *t == SimTime::ZERO
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mac: Option<MacAddr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchNodeConfig {
    pub name: String,
    #[serde(default)]
    pub launch: SwitchConfig,
}

/// `node:port`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EndpointRef {
    pub node: String,
    pub port: u16,
}

impl EndpointRef {
    pub fn new(node: impl Into<String>, port: u16) -> Self {
        EndpointRef {
            node: node.into(),
            port,
        }
    }
}

impl std::fmt::Display for EndpointRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.node, self.port)
    }
}

impl FromStr for EndpointRef {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (node, port) = s
            .rsplit_once(':')
            .ok_or_else(|| ParseError::new(format!("endpoint `{s}` is not `node:port`")))?;
        let port = port
            .parse()
            .map_err(|_| ParseError::new(format!("endpoint `{s}` has a bad port")))?;
        if node.is_empty() {
            return Err(ParseError::new(format!("endpoint `{s}` has no node")));
        }
        Ok(EndpointRef::new(node, port))
    }
}

impl TryFrom<String> for EndpointRef {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<EndpointRef> for String {
    fn from(e: EndpointRef) -> String {
        e.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub a: EndpointRef,
    pub b: EndpointRef,
    /// Bits per second.
    pub bitrate: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub propagation_delay: SimDuration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlChannelConfig {
    pub switch: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub latency: SimDuration,
}

/// A periodic sender. The first frame leaves at `start_at + offset`; each
/// following gap is drawn from N(period, jitter_stddev²), or is exactly
/// `period` when the deviation is zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficConfig {
    pub flow_id: String,
    pub host: String,
    pub pcp: u8,
    #[serde(default = "default_vid")]
    pub vid: u16,
    pub wire_size: u32,
    pub period: SimDuration,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub jitter_stddev: SimDuration,
    #[serde(default, skip_serializing_if = "is_zero_time")]
    pub start_at: SimTime,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub offset: SimDuration,
    /// Host name or MAC address.
    pub dst: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_at: Option<SimTime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TalkerConfig {
    pub host: String,
    pub stream: StreamId,
    pub dst_mac: MacAddr,
    pub pcp: u8,
    pub max_frame_size: u32,
    pub interval: SimDuration,
    pub advertise_at: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ListenerConfig {
    pub host: String,
    pub stream: StreamId,
    pub ready_at: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrpConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub talkers: Vec<TalkerConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub listeners: Vec<ListenerConfig>,
}

impl SrpConfig {
    fn is_empty(&self) -> bool {
        self.talkers.is_empty() && self.listeners.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub seed: u64,
    pub duration: SimDuration,
    #[serde(default = "default_controller")]
    pub controller: String,
    #[serde(default)]
    pub hosts: Vec<HostConfig>,
    #[serde(default)]
    pub switches: Vec<SwitchNodeConfig>,
    #[serde(default)]
    pub links: Vec<LinkConfig>,
    #[serde(default)]
    pub control_channels: Vec<ControlChannelConfig>,
    #[serde(default)]
    pub traffic: Vec<TrafficConfig>,
    #[serde(default)]
    pub timeline: Vec<TimelineEntry>,
    #[serde(default, skip_serializing_if = "SrpConfig::is_empty")]
    pub srp: SrpConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Format(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario is always representable")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Format(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// MAC of each host: the configured one or `02:00:<index+1>`.
    pub fn host_macs(&self) -> Vec<MacAddr> {
        self.hosts
            .iter()
            .enumerate()
            .map(|(i, h)| h.mac.unwrap_or_else(|| MacAddr::local(i as u32 + 1)))
            .collect()
    }

    /// Resolve a traffic destination: a host name or a literal MAC.
    pub fn resolve_dst(&self, dst: &str) -> Option<MacAddr> {
        if let Some(i) = self.hosts.iter().position(|h| h.name == dst) {
            return Some(self.host_macs()[i]);
        }
        dst.parse().ok()
    }

    /// Port → link bitrate for every linked port of `switch`.
    pub fn switch_ports(&self, switch: &str) -> BTreeMap<u16, u64> {
        let mut ports = BTreeMap::new();
        for l in &self.links {
            for e in [&l.a, &l.b] {
                if e.node == switch {
                    ports.insert(e.port, l.bitrate);
                }
            }
        }
        ports
    }

    /// Check everything that can be checked without running.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let hosts: BTreeSet<&str> = self.hosts.iter().map(|h| h.name.as_str()).collect();
        let switches: BTreeSet<&str> = self.switches.iter().map(|s| s.name.as_str()).collect();
        let mut names = BTreeSet::new();
        for n in self
            .hosts
            .iter()
            .map(|h| &h.name)
            .chain(self.switches.iter().map(|s| &s.name))
            .chain(std::iter::once(&self.controller))
        {
            if !names.insert(n.as_str()) {
                return Err(ScenarioError::DuplicateNode(n.clone()));
            }
        }

        let mut used = BTreeSet::new();
        let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for l in &self.links {
            if l.bitrate == 0 {
                return Err(ScenarioError::ZeroBitrate {
                    a: l.a.to_string(),
                    b: l.b.to_string(),
                });
            }
            for e in [&l.a, &l.b] {
                let node = e.node.as_str();
                if hosts.contains(node) {
                    if e.port != HOST_PORT {
                        return Err(ScenarioError::BadHostPort(e.to_string()));
                    }
                } else if !switches.contains(node) {
                    return Err(ScenarioError::UnknownNode(e.node.clone()));
                }
                if !used.insert(e.clone()) {
                    return Err(ScenarioError::PortInUse {
                        node: e.node.clone(),
                        port: e.port,
                    });
                }
            }
            adjacency.entry(&l.a.node).or_default().push(&l.b.node);
            adjacency.entry(&l.b.node).or_default().push(&l.a.node);
        }
        self.check_connected(&adjacency)?;

        let channels: BTreeSet<&str> = self
            .control_channels
            .iter()
            .map(|c| c.switch.as_str())
            .collect();
        for c in &self.control_channels {
            if !switches.contains(c.switch.as_str()) {
                return Err(ScenarioError::UnknownNode(c.switch.clone()));
            }
        }
        for s in &self.switches {
            if !channels.contains(s.name.as_str()) {
                return Err(ScenarioError::NoControlChannel(s.name.clone()));
            }
        }

        for t in &self.traffic {
            self.check_traffic(t, &hosts)?;
        }
        self.check_timeline(&switches)?;
        self.check_srp(&hosts)?;
        Ok(())
    }

    fn check_connected(&self, adjacency: &BTreeMap<&str, Vec<&str>>) -> Result<(), ScenarioError> {
        let all: Vec<&str> = self
            .hosts
            .iter()
            .map(|h| h.name.as_str())
            .chain(self.switches.iter().map(|s| s.name.as_str()))
            .collect();
        let Some(&first) = all.first() else {
            return Ok(());
        };
        let mut seen = BTreeSet::from([first]);
        let mut queue = VecDeque::from([first]);
        while let Some(n) = queue.pop_front() {
            for &m in adjacency.get(n).into_iter().flatten() {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        match all.iter().find(|n| !seen.contains(*n)) {
            Some(n) => Err(ScenarioError::Disconnected(n.to_string())),
            None => Ok(()),
        }
    }

    fn check_traffic(
        &self,
        t: &TrafficConfig,
        hosts: &BTreeSet<&str>,
    ) -> Result<(), ScenarioError> {
        let bad = |reason: String| ScenarioError::BadTraffic {
            flow: t.flow_id.clone(),
            reason,
        };
        if !hosts.contains(t.host.as_str()) {
            return Err(ScenarioError::UnknownNode(t.host.clone()));
        }
        if t.period.is_zero() {
            return Err(ScenarioError::ZeroPeriod(t.flow_id.clone()));
        }
        if t.pcp > 7 {
            return Err(bad(format!("pcp {} out of range", t.pcp)));
        }
        if t.vid > 0x0FFF {
            return Err(bad(format!("vid {} out of range", t.vid)));
        }
        if !(MIN_FRAME_SIZE..=MAX_FRAME_SIZE).contains(&t.wire_size) {
            return Err(bad(format!("wire size {} out of range", t.wire_size)));
        }
        if self.resolve_dst(&t.dst).is_none() {
            return Err(bad(format!(
                "destination `{}` is neither a host nor a MAC",
                t.dst
            )));
        }
        if t.flow_id.contains(',') || t.flow_id.contains('"') || t.flow_id.contains('\n') {
            return Err(bad("flow id may not contain `,`, `\"` or newlines".into()));
        }
        Ok(())
    }

    fn check_timeline(&self, switches: &BTreeSet<&str>) -> Result<(), ScenarioError> {
        ControlTimeline::new(self.timeline.clone())
            .map_err(|(earlier, later)| ScenarioError::TimelineOrder { earlier, later })?;
        for entry in &self.timeline {
            let name = entry.action.switch();
            if !switches.contains(name) {
                return Err(ScenarioError::UnknownNode(name.to_string()));
            }
            if let TimelineAction::EditGcl {
                ports, schedule, ..
            } = &entry.action
            {
                let bad = |reason: String| ScenarioError::BadTimeline {
                    at: entry.at,
                    reason,
                };
                if ports.is_empty() {
                    return Err(bad("edit names no ports".into()));
                }
                let linked = self.switch_ports(name);
                let launch = &self
                    .switches
                    .iter()
                    .find(|s| s.name == name)
                    .expect("checked")
                    .launch;
                for port in ports {
                    if !linked.contains_key(port) {
                        return Err(bad(format!("switch `{name}` has no port {port}")));
                    }
                    let cycle = launch
                        .gcl
                        .iter()
                        .find(|g| g.port == *port)
                        .map(|g| g.schedule.cycle())
                        .unwrap_or(DEFAULT_CYCLE);
                    schedule
                        .check_cycle(cycle)
                        .map_err(|e| bad(format!("port {port}: {e}")))?;
                }
            }
        }
        Ok(())
    }

    fn check_srp(&self, hosts: &BTreeSet<&str>) -> Result<(), ScenarioError> {
        let mut streams = BTreeSet::new();
        for t in &self.srp.talkers {
            if !hosts.contains(t.host.as_str()) {
                return Err(ScenarioError::UnknownNode(t.host.clone()));
            }
            if !streams.insert(t.stream) {
                return Err(ScenarioError::BadSrp(format!(
                    "stream {} advertised twice",
                    t.stream
                )));
            }
            if !t.dst_mac.is_multicast() {
                return Err(ScenarioError::BadSrp(format!(
                    "stream {} destination {} is not a multicast address",
                    t.stream, t.dst_mac
                )));
            }
        }
        for l in &self.srp.listeners {
            if !hosts.contains(l.host.as_str()) {
                return Err(ScenarioError::UnknownNode(l.host.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
name = "small"
seed = 7
duration = "10ms"

[[hosts]]
name = "a"

[[hosts]]
name = "b"

[[switches]]
name = "s1"

[switches.launch]
processing_delay = "2us"

[[switches.launch.gcl]]
port = 2
schedule = "G:15;Y:860;R:125"

[[switches.launch.flows]]
priority = 10
match = { dst_mac = "02:00:00:00:00:02" }
actions = ["output:2"]

[[links]]
a = "a:1"
b = "s1:1"
bitrate = 100000000

[[links]]
a = "s1:2"
b = "b:1"
bitrate = 100000000

[[control_channels]]
switch = "s1"

[[traffic]]
flow_id = "f"
host = "a"
pcp = 6
wire_size = 122
period = "1ms"
dst = "b"

[[timeline]]
at = "2ms"
action = "edit-gcl"
switch = "s1"
ports = [2]
schedule = "R:10;G:15;Y:860;R:115"

[[timeline]]
at = "3ms"
action = "inject-edit-failure"
switch = "s1"
"#;

    #[test]
    fn parses_and_validates() {
        let cfg = ScenarioConfig::from_toml(SMALL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.switches[0].launch.processing_delay, SimDuration(2_000));
        assert_eq!(cfg.resolve_dst("b"), Some(MacAddr::local(2)));
        assert_eq!(cfg.traffic[0].vid, 1);
        assert_eq!(cfg.timeline.len(), 2);
        let again = ScenarioConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_inconsistent_scenarios() {
        let base = ScenarioConfig::from_toml(SMALL).unwrap();

        let mut c = base.clone();
        c.timeline[0].action = TimelineAction::EditGcl {
            switch: "s1".into(),
            ports: vec![2],
            schedule: "G:15;Y:850;R:125".parse().unwrap(),
        };
        assert!(matches!(
            c.validate(),
            Err(ScenarioError::BadTimeline { .. })
        ));

        let mut c = base.clone();
        c.timeline.swap(0, 1);
        assert!(matches!(
            c.validate(),
            Err(ScenarioError::TimelineOrder { .. })
        ));

        let mut c = base.clone();
        c.timeline[1].action = TimelineAction::GetConfig {
            switch: "s9".into(),
        };
        assert_eq!(c.validate(), Err(ScenarioError::UnknownNode("s9".into())));

        let mut c = base.clone();
        c.control_channels.clear();
        assert_eq!(
            c.validate(),
            Err(ScenarioError::NoControlChannel("s1".into()))
        );

        let mut c = base.clone();
        c.links.pop();
        assert_eq!(c.validate(), Err(ScenarioError::Disconnected("b".into())));

        let mut c = base.clone();
        c.links[1].b = EndpointRef::new("b", 2);
        assert!(matches!(c.validate(), Err(ScenarioError::BadHostPort(_))));

        let mut c = base.clone();
        c.traffic[0].period = SimDuration::ZERO;
        assert_eq!(c.validate(), Err(ScenarioError::ZeroPeriod("f".into())));

        let mut c = base.clone();
        c.traffic[0].dst = "nowhere".into();
        assert!(matches!(
            c.validate(),
            Err(ScenarioError::BadTraffic { .. })
        ));

        let mut c = base;
        c.hosts[1].name = "s1".into();
        assert_eq!(c.validate(), Err(ScenarioError::DuplicateNode("s1".into())));
    }

    #[test]
    fn endpoint_syntax() {
        assert_eq!(
            "s1:5".parse::<EndpointRef>().unwrap(),
            EndpointRef::new("s1", 5)
        );
        assert!("s1".parse::<EndpointRef>().is_err());
        assert!(":3".parse::<EndpointRef>().is_err());
    }
}

//! The built-in runtime-reprogramming case study and the SRP scenario.
//!
//! Case study topology: hosts 1-4 on switch 1 (ports 1-4), switch 1 port 5
//! to switch 2 port 1, switch 2 port 2 to the sink. All links 100 Mbit/s.

use crate::control::{RpcResult, TimelineAction, TimelineEntry};
use crate::ethernet::MacAddr;
use crate::qbv::{GateControlList, SelectionPolicy};
use crate::scenario::config::{
    ControlChannelConfig, EndpointRef, HostConfig, LinkConfig, ListenerConfig, ScenarioConfig,
    SrpConfig, SwitchNodeConfig, TalkerConfig, TrafficConfig,
};
use crate::scenario::network::RunOutput;
use crate::scenario::report::{default_cuts, report, IntervalStats, Report};
use crate::srp::StreamId;
use crate::switch::{FlowAction, FlowMatch, FlowSpec, PortGcl, SwitchConfig};
use crate::time::{SimDuration, SimTime};

pub const LINK_BITRATE: u64 = 100_000_000;

/// Per-switch processing delay that passes every case-study latency
/// phase; see the calibration module for the sweep that selects it.
pub const CALIBRATED_PROCESSING_DELAY: SimDuration = SimDuration(5_200);

pub const CASE_STUDY_SEED: u64 = 1;

/// Gate control lists of the reconfiguration timeline.
pub const GCL_INITIAL: &str = "G:15;Y:860;R:125";
pub const GCL_S1_PHASE2: &str = "R:10;G:15;Y:860;R:115";
pub const GCL_S2_PHASE2: &str = "R:20;G:15;Y:860;R:105";
pub const GCL_S1_PHASE3: &str = "R:10;G:30;Y:845;R:115";
pub const GCL_S2_PHASE3: &str = "R:20;G:30;Y:845;R:105";

pub const S1_PORTS: [u16; 5] = [1, 2, 3, 4, 5];
pub const S2_PORTS: [u16; 2] = [1, 2];

/// Instants at which the controller reads configurations back.
pub const PROBE_BEFORE_FAILURE: SimTime = SimTime::from_secs(5);
pub const PROBE_AFTER_FAILURE: SimTime = SimTime::from_secs(7);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseStudyParams {
    pub seed: u64,
    pub processing_delay: SimDuration,
    pub policy: SelectionPolicy,
}

impl Default for CaseStudyParams {
    fn default() -> Self {
        CaseStudyParams {
            seed: CASE_STUDY_SEED,
            processing_delay: CALIBRATED_PROCESSING_DELAY,
            policy: SelectionPolicy::GateOpenAtStart,
        }
    }
}

fn gcl(text: &str) -> GateControlList {
    GateControlList::parse(text).expect("built-in schedule")
}

fn link(a: &str, ap: u16, b: &str, bp: u16) -> LinkConfig {
    LinkConfig {
        a: EndpointRef::new(a, ap),
        b: EndpointRef::new(b, bp),
        bitrate: LINK_BITRATE,
        propagation_delay: SimDuration::ZERO,
    }
}

fn launch(params: &CaseStudyParams, ports: &[u16], sink: MacAddr, out: u16) -> SwitchConfig {
    SwitchConfig {
        policy: params.policy,
        processing_delay: params.processing_delay,
        gcl: ports
            .iter()
            .map(|&port| PortGcl {
                port,
                schedule: gcl(GCL_INITIAL),
            })
            .collect(),
        flows: vec![FlowSpec {
            priority: 10,
            matcher: FlowMatch::dst(sink),
            actions: vec![FlowAction::Output(out)],
        }],
        sr: Vec::new(),
    }
}

fn periodic(flow: &str, pcp: u8, wire_size: u32, period: SimDuration) -> TrafficConfig {
    TrafficConfig {
        flow_id: flow.into(),
        host: flow.into(),
        pcp,
        vid: 1,
        wire_size,
        period,
        jitter_stddev: SimDuration::ZERO,
        start_at: SimTime::ZERO,
        offset: SimDuration::ZERO,
        dst: "sink".into(),
        stop_at: None,
        count: None,
    }
}

fn edit(at: SimTime, switch: &str, ports: &[u16], schedule: &str) -> TimelineEntry {
    TimelineEntry {
        at,
        action: TimelineAction::EditGcl {
            switch: switch.into(),
            ports: ports.to_vec(),
            schedule: gcl(schedule),
        },
    }
}

fn probe(at: SimTime, switch: &str) -> TimelineEntry {
    TimelineEntry {
        at,
        action: TimelineAction::GetConfig {
            switch: switch.into(),
        },
    }
}

pub fn case_study(params: &CaseStudyParams) -> ScenarioConfig {
    let hosts: Vec<HostConfig> = ["host1", "host2", "host3", "host4", "sink"]
        .into_iter()
        .map(|name| HostConfig {
            name: name.into(),
            mac: None,
        })
        .collect();
    let sink = MacAddr::local(5);
    let secs = SimTime::from_secs;

    let mut host1 = periodic("host1", 0, 1522, SimDuration::from_micros(200));
    host1.jitter_stddev = SimDuration::from_micros(20);
    let host2 = periodic("host2", 2, 1522, SimDuration::from_micros(500));
    let host3 = periodic("host3", 6, 122, SimDuration::from_millis(1));
    let mut host4 = periodic("host4", 7, 122, SimDuration::from_millis(1));
    host4.start_at = secs(4);

    ScenarioConfig {
        name: "case-study".into(),
        description: [
            "Runtime GCL reprogramming over NetConf.",
            "Assumed parameters: hosts 1-4 attach to switch 1;",
            "host 1 sends 1522 B at PCP 0 with N(200us; 20us) gaps;",
            "host 2 sends 1522 B at PCP 2 every 500us;",
            "per-switch processing delay 5.2us from the calibration sweep.",
        ]
        .join(" "),
        seed: params.seed,
        duration: SimDuration::from_secs(10),
        controller: "controller".into(),
        hosts,
        switches: vec![
            SwitchNodeConfig {
                name: "s1".into(),
                launch: launch(params, &S1_PORTS, sink, 5),
            },
            SwitchNodeConfig {
                name: "s2".into(),
                launch: launch(params, &S2_PORTS, sink, 2),
            },
        ],
        links: vec![
            link("host1", 1, "s1", 1),
            link("host2", 1, "s1", 2),
            link("host3", 1, "s1", 3),
            link("host4", 1, "s1", 4),
            link("s1", 5, "s2", 1),
            link("s2", 2, "sink", 1),
        ],
        control_channels: ["s1", "s2"]
            .into_iter()
            .map(|s| ControlChannelConfig {
                switch: s.into(),
                latency: SimDuration::ZERO,
            })
            .collect(),
        traffic: vec![host1, host2, host3, host4],
        timeline: vec![
            edit(secs(2), "s1", &S1_PORTS, GCL_S1_PHASE2),
            edit(secs(2), "s2", &S2_PORTS, GCL_S2_PHASE2),
            probe(PROBE_BEFORE_FAILURE, "s1"),
            probe(PROBE_BEFORE_FAILURE, "s2"),
            TimelineEntry {
                at: secs(6),
                action: TimelineAction::InjectEditFailure {
                    switch: "s2".into(),
                },
            },
            edit(secs(6), "s1", &S1_PORTS, GCL_S1_PHASE3),
            edit(secs(6), "s2", &S2_PORTS, GCL_S2_PHASE3),
            probe(PROBE_AFTER_FAILURE, "s1"),
            probe(PROBE_AFTER_FAILURE, "s2"),
            edit(secs(8), "s2", &S2_PORTS, GCL_S2_PHASE3),
        ],
        srp: SrpConfig::default(),
    }
}

/// The case study as a scenario file, with its assumptions spelled out.
pub fn case_study_file(params: &CaseStudyParams) -> String {
    let header = "\
# Built-in case study: four hosts, two switches, one sink, one controller.
# The GCL timeline edits both switches at 2 s, edits both at 6 s with the
# switch-2 edit forced to fail, and repairs switch 2 at 8 s. get-config
# probes at 5 s and 7 s record the datastores around the failure.
#
# Assumed parameters:
#   hosts 1-4 are attached to switch 1;
#   host 1: PCP 0, 1522 B, gaps drawn from N(200us, 20us), clamped >= 1us;
#   host 2: PCP 2, 1522 B, every 500us;
#   processing_delay is the calibrated per-switch constant.
";
    format!("{header}\n{}", case_study(params).to_toml())
}

/// Stream used by the SRP scenario.
pub const SRP_STREAM: StreamId = StreamId(1);

pub fn srp_stream_mac() -> MacAddr {
    MacAddr::stream_group(SRP_STREAM.0 as u32)
}

/// Talker behind switch 1, listener (the sink) behind switch 2, and an
/// off-path switch 3 with a bystander host. Flow tables start empty.
///
/// A stray frame for the stream at 0.5 ms precedes registration and must be
/// dropped; the stream proper runs 10 frames from 5 ms.
pub fn srp_scenario(seed: u64) -> ScenarioConfig {
    let ms = SimTime::from_millis;
    let empty = SwitchConfig::default;
    let mut stray = periodic("stray", 6, 122, SimDuration::from_millis(1));
    stray.host = "talker".into();
    stray.dst = srp_stream_mac().to_string();
    stray.start_at = SimTime::from_micros(500);
    stray.count = Some(1);
    let mut stream = periodic("stream", 6, 122, SimDuration::from_millis(1));
    stream.host = "talker".into();
    stream.dst = srp_stream_mac().to_string();
    stream.start_at = ms(5);
    stream.count = Some(10);

    ScenarioConfig {
        name: "srp".into(),
        description: "Talker advertise and listener ready through the controller.".into(),
        seed,
        duration: SimDuration::from_millis(20),
        controller: "controller".into(),
        hosts: ["talker", "sink", "bystander"]
            .into_iter()
            .map(|n| HostConfig {
                name: n.into(),
                mac: None,
            })
            .collect(),
        switches: ["s1", "s2", "s3"]
            .into_iter()
            .map(|n| SwitchNodeConfig {
                name: n.into(),
                launch: empty(),
            })
            .collect(),
        links: vec![
            link("talker", 1, "s1", 1),
            link("s1", 2, "s2", 1),
            link("s2", 2, "sink", 1),
            link("s1", 3, "s3", 1),
            link("s3", 2, "bystander", 1),
        ],
        control_channels: ["s1", "s2", "s3"]
            .into_iter()
            .map(|s| ControlChannelConfig {
                switch: s.into(),
                latency: SimDuration::from_micros(50),
            })
            .collect(),
        traffic: vec![stray, stream],
        timeline: Vec::new(),
        srp: SrpConfig {
            talkers: vec![TalkerConfig {
                host: "talker".into(),
                stream: SRP_STREAM,
                dst_mac: srp_stream_mac(),
                pcp: 6,
                max_frame_size: 122,
                interval: SimDuration::from_millis(1),
                advertise_at: ms(1),
            }],
            listeners: vec![ListenerConfig {
                host: "sink".into(),
                stream: SRP_STREAM,
                ready_at: ms(2),
            }],
        },
    }
}

/// Pass/fail of the case-study latency phases for one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseStudyChecks {
    /// [0, 2 s): constant, within [1.000, 1.050] ms.
    pub plateau: bool,
    /// [2, 4 s): constant, within [29, 45] µs.
    pub reconfigured: bool,
    /// [4, 6 s): host 4 constant and at most 50 µs.
    pub host4_nominal: bool,
    /// [4, 6 s): host 3 at least 1 ms.
    pub slot_miss: bool,
    /// [6, 8 s): switch 2 unchanged, switch 1 updated, host 3 unchanged.
    pub partial_failure: bool,
    /// [8, 10 s): host 3 constant and below 100 µs.
    pub recovered: bool,
}

impl CaseStudyChecks {
    pub fn all(&self) -> bool {
        self.plateau
            && self.reconfigured
            && self.host4_nominal
            && self.slot_miss
            && self.partial_failure
            && self.recovered
    }
}

fn epoch<'a>(r: &'a Report, flow: &str, start_s: u64) -> Option<&'a IntervalStats> {
    r.flow(flow)?.interval(SimTime::from_secs(start_s))
}

fn constant_within(i: Option<&IntervalStats>, lo: SimDuration, hi: SimDuration) -> bool {
    i.and_then(|i| i.stats)
        .is_some_and(|s| s.spread().is_zero() && s.min >= lo && s.max <= hi)
}

/// `get-config` reply text for `switch` sent at `at`.
pub fn probe_result<'a>(out: &'a RunOutput, switch: &str, at: SimTime) -> Option<&'a str> {
    out.rpcs
        .iter()
        .find(|r| r.switch == switch && r.sent_at == at && r.op == "get-config")
        .and_then(|r| match &r.result {
            Some(RpcResult::Data(text)) => Some(text.as_str()),
            _ => None,
        })
}

/// Datastore text of a switch whose `ports` all run `schedule`.
pub fn uniform_datastore(ports: &[u16], schedule: &str) -> String {
    ports.iter().map(|p| format!("{p}={schedule}\n")).collect()
}

pub fn evaluate(out: &RunOutput) -> CaseStudyChecks {
    let r = report(&out.trace, &default_cuts());
    let us = SimDuration::from_micros;
    let h3_4 = epoch(&r, "host3", 4).and_then(|i| i.stats);
    let h3_6 = epoch(&r, "host3", 6).and_then(|i| i.stats);
    let s2_before = probe_result(out, "s2", PROBE_BEFORE_FAILURE);
    let s2_after = probe_result(out, "s2", PROBE_AFTER_FAILURE);
    let s1_after = probe_result(out, "s1", PROBE_AFTER_FAILURE);
    CaseStudyChecks {
        plateau: constant_within(epoch(&r, "host3", 0), us(1_000), us(1_050)),
        reconfigured: constant_within(epoch(&r, "host3", 2), us(29), us(45)),
        host4_nominal: constant_within(epoch(&r, "host4", 4), SimDuration::ZERO, us(50)),
        slot_miss: h3_4.is_some_and(|s| s.min >= us(1_000)),
        partial_failure: s2_before.is_some()
            && s2_before == s2_after
            && s1_after == Some(uniform_datastore(&S1_PORTS, GCL_S1_PHASE3).as_str())
            && h3_4.is_some()
            && h3_4 == h3_6,
        recovered: constant_within(
            epoch(&r, "host3", 8),
            SimDuration::ZERO,
            SimDuration(99_999),
        ),
    }
}

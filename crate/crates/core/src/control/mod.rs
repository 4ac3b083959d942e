//! The SDN controller: an OpenFlow core, a NetConf client and two apps, the
//! SRP manager and the GCL programmer.
//!
//! The controller never touches switch state directly. Every call returns the
//! messages it wants delivered as `(switch index, message)` pairs and the
//! harness carries them over the control channels.

mod log;
mod messages;
mod timeline;

use std::collections::{BTreeMap, BTreeSet};

pub use log::{
    read_control_log, write_control_log, ControlLogEntry, DIR_INJECT, DIR_TO_CONTROLLER,
    DIR_TO_SWITCH,
};
pub use messages::{ControlMsg, NetconfMsg, NetconfOp, OpenFlowMsg, RpcResult};
pub use timeline::{ControlTimeline, TimelineAction, TimelineEntry};

use crate::ethernet::{Frame, MacAddr};
use crate::srp::{SrpMessage, StreamId};
use crate::switch::{format_payload, FlowAction, FlowMatch, FlowSpec, RUNNING};
use crate::time::SimTime;

/// Priority of the flow entries the SRP manager installs.
pub const SRP_FLOW_PRIORITY: u16 = 100;

/// Outgoing messages: `(switch index, message)`.
pub type Outbox = Vec<(usize, ControlMsg)>;

#[derive(Debug, Clone, Default)]
struct Session {
    name: String,
    ports: Vec<u16>,
    openflow_up: bool,
    netconf_up: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct StreamView {
    dst_mac: MacAddr,
    talker_port: u16,
    listeners: BTreeSet<u16>,
}

/// One NetConf RPC as seen by the client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RpcRecord {
    pub id: u64,
    pub switch: String,
    pub op: &'static str,
    pub sent_at: SimTime,
    pub replied_at: Option<SimTime>,
    pub result: Option<RpcResult>,
}

#[derive(Debug, Clone, Default)]
pub struct Controller {
    sessions: Vec<Session>,
    index: BTreeMap<String, usize>,
    next_rpc_id: u64,
    rpcs: Vec<RpcRecord>,
    rpc_index: BTreeMap<u64, usize>,
    sr_view: BTreeMap<(usize, StreamId), StreamView>,
    notes: Vec<(SimTime, String)>,
}

impl Controller {
    /// A controller with one control channel per named switch. Switch
    /// indices follow the order given.
    pub fn new<S: Into<String>>(switches: impl IntoIterator<Item = S>) -> Self {
        let mut c = Controller {
            next_rpc_id: 1,
            ..Controller::default()
        };
        for name in switches {
            let name = name.into();
            c.index.insert(name.clone(), c.sessions.len());
            c.sessions.push(Session {
                name,
                ..Session::default()
            });
        }
        c
    }

    pub fn switch_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn switch_name(&self, idx: usize) -> &str {
        &self.sessions[idx].name
    }

    pub fn switch_count(&self) -> usize {
        self.sessions.len()
    }

    /// Ports reported in the switch's features reply, empty until then.
    pub fn known_ports(&self, idx: usize) -> &[u16] {
        &self.sessions[idx].ports
    }

    pub fn session_up(&self, idx: usize) -> bool {
        let s = &self.sessions[idx];
        s.openflow_up && s.netconf_up
    }

    pub fn rpcs(&self) -> &[RpcRecord] {
        &self.rpcs
    }

    pub fn notes(&self) -> &[(SimTime, String)] {
        &self.notes
    }

    /// Listener ports the SRP manager has registered for `stream` at a switch.
    pub fn stream_listeners(&self, idx: usize, stream: StreamId) -> Option<&BTreeSet<u16>> {
        self.sr_view.get(&(idx, stream)).map(|v| &v.listeners)
    }

    /// Hello on both protocols plus a features request, for every switch.
    pub fn session_start(&mut self) -> Outbox {
        let mut out = Vec::new();
        for idx in 0..self.sessions.len() {
            out.push((idx, ControlMsg::OpenFlow(OpenFlowMsg::Hello)));
            out.push((idx, ControlMsg::OpenFlow(OpenFlowMsg::FeaturesRequest)));
            out.push((idx, ControlMsg::Netconf(NetconfMsg::Hello)));
        }
        out
    }

    fn rpc(&mut self, now: SimTime, idx: usize, op: NetconfOp) -> (usize, ControlMsg) {
        let id = self.next_rpc_id;
        self.next_rpc_id += 1;
        self.rpc_index.insert(id, self.rpcs.len());
        self.rpcs.push(RpcRecord {
            id,
            switch: self.sessions[idx].name.clone(),
            op: op.name(),
            sent_at: now,
            replied_at: None,
            result: None,
        });
        (idx, ControlMsg::Netconf(NetconfMsg::Rpc { id, op }))
    }

    /// GCL programmer: turn a timeline action into NetConf RPCs. Failure
    /// injection is switch-side and produces no controller traffic.
    pub fn on_timeline(&mut self, now: SimTime, action: &TimelineAction) -> Outbox {
        let Some(idx) = self.switch_index(action.switch()) else {
            self.notes.push((
                now,
                format!("timeline names unknown switch {}", action.switch()),
            ));
            return Vec::new();
        };
        match action {
            TimelineAction::EditGcl {
                ports, schedule, ..
            } => {
                let payload = format_payload(ports.iter().map(|p| (*p, schedule)));
                vec![self.rpc(
                    now,
                    idx,
                    NetconfOp::EditConfig {
                        datastore: RUNNING.into(),
                        payload,
                    },
                )]
            }
            TimelineAction::GetConfig { .. } => vec![self.rpc(
                now,
                idx,
                NetconfOp::GetConfig {
                    datastore: RUNNING.into(),
                },
            )],
            TimelineAction::InjectEditFailure { .. } => Vec::new(),
        }
    }

    /// Handle a message from switch `idx`.
    pub fn on_message(&mut self, now: SimTime, idx: usize, msg: ControlMsg) -> Outbox {
        match msg {
            ControlMsg::OpenFlow(OpenFlowMsg::Hello) => {
                self.sessions[idx].openflow_up = true;
                Vec::new()
            }
            ControlMsg::OpenFlow(OpenFlowMsg::FeaturesReply { ports }) => {
                self.sessions[idx].ports = ports;
                Vec::new()
            }
            ControlMsg::OpenFlow(OpenFlowMsg::PacketIn { frame, in_port }) => {
                match frame.srp().cloned() {
                    Some(srp) => self.srp_on_packet_in(now, idx, in_port, frame, srp),
                    None => {
                        self.notes.push((
                            now,
                            format!(
                                "{}: unhandled packet-in flow={} seq={}",
                                self.sessions[idx].name, frame.flow_id, frame.seq
                            ),
                        ));
                        Vec::new()
                    }
                }
            }
            ControlMsg::Netconf(NetconfMsg::Hello) => {
                self.sessions[idx].netconf_up = true;
                Vec::new()
            }
            ControlMsg::Netconf(NetconfMsg::RpcReply { id, result }) => {
                match self.rpc_index.get(&id) {
                    Some(&i) if self.rpcs[i].replied_at.is_none() => {
                        self.rpcs[i].replied_at = Some(now);
                        self.rpcs[i].result = Some(result);
                    }
                    _ => self
                        .notes
                        .push((now, format!("unexpected rpc-reply id={id}"))),
                }
                Vec::new()
            }
            other => {
                self.notes.push((
                    now,
                    format!("ignored {} from {}", other.kind(), self.sessions[idx].name),
                ));
                Vec::new()
            }
        }
    }

    /// SRP manager.
    fn srp_on_packet_in(
        &mut self,
        now: SimTime,
        idx: usize,
        in_port: u16,
        frame: Frame,
        msg: SrpMessage,
    ) -> Outbox {
        match msg {
            SrpMessage::TalkerAdvertise {
                stream, dst_mac, ..
            } => {
                if self.sr_view.contains_key(&(idx, stream)) {
                    // Already flooded from this switch; stops loops.
                    return Vec::new();
                }
                self.sr_view.insert(
                    (idx, stream),
                    StreamView {
                        dst_mac,
                        talker_port: in_port,
                        listeners: BTreeSet::new(),
                    },
                );
                self.sessions[idx]
                    .ports
                    .iter()
                    .filter(|&&p| p != in_port)
                    .map(|&out_port| {
                        (
                            idx,
                            ControlMsg::OpenFlow(OpenFlowMsg::PacketOut {
                                frame: frame.clone(),
                                in_port: Some(in_port),
                                out_port,
                            }),
                        )
                    })
                    .collect()
            }
            SrpMessage::ListenerReady { stream } => {
                let Some(view) = self.sr_view.get_mut(&(idx, stream)) else {
                    self.notes.push((
                        now,
                        format!(
                            "{}: listener-ready for unknown stream {stream}",
                            self.sessions[idx].name
                        ),
                    ));
                    return Vec::new();
                };
                if in_port == view.talker_port {
                    self.notes.push((
                        now,
                        format!(
                            "{}: listener-ready for stream {stream} on its talker port",
                            self.sessions[idx].name
                        ),
                    ));
                    return Vec::new();
                }
                view.listeners.insert(in_port);
                let flow = FlowSpec {
                    priority: SRP_FLOW_PRIORITY,
                    matcher: FlowMatch::dst(view.dst_mac),
                    actions: view
                        .listeners
                        .iter()
                        .map(|&p| FlowAction::Output(p))
                        .collect(),
                };
                let talker_port = view.talker_port;
                vec![
                    (idx, ControlMsg::OpenFlow(OpenFlowMsg::FlowMod(flow))),
                    (
                        idx,
                        ControlMsg::OpenFlow(OpenFlowMsg::PacketOut {
                            frame,
                            in_port: Some(in_port),
                            out_port: talker_port,
                        }),
                    ),
                ]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ethernet::Frame;
    use crate::qbv::GateControlList;
    use crate::time::SimDuration;

    fn ready(stream: u64) -> Frame {
        Frame::srp_message(
            MacAddr::local(9),
            SrpMessage::ListenerReady {
                stream: StreamId(stream),
            },
            SimTime::ZERO,
        )
    }

    fn advertise(stream: u64) -> Frame {
        Frame::srp_message(
            MacAddr::local(3),
            SrpMessage::TalkerAdvertise {
                stream: StreamId(stream),
                dst_mac: MacAddr::stream_group(stream as u32),
                pcp: 6,
                max_frame_size: 122,
                interval: SimDuration::from_millis(1),
            },
            SimTime::ZERO,
        )
    }

    fn packet_in(frame: Frame, in_port: u16) -> ControlMsg {
        ControlMsg::OpenFlow(OpenFlowMsg::PacketIn { frame, in_port })
    }

    fn controller() -> Controller {
        let mut c = Controller::new(["s1"]);
        c.on_message(
            SimTime::ZERO,
            0,
            ControlMsg::OpenFlow(OpenFlowMsg::FeaturesReply {
                ports: vec![1, 2, 3, 5],
            }),
        );
        c
    }

    #[test]
    fn session_start_greets_every_switch() {
        let mut c = Controller::new(["s1", "s2"]);
        let out = c.session_start();
        assert_eq!(out.len(), 6);
        assert_eq!(out.iter().filter(|(i, _)| *i == 1).count(), 3);
        assert!(!c.session_up(0));
        c.on_message(SimTime::ZERO, 0, ControlMsg::OpenFlow(OpenFlowMsg::Hello));
        c.on_message(SimTime::ZERO, 0, ControlMsg::Netconf(NetconfMsg::Hello));
        assert!(c.session_up(0));
    }

    #[test]
    fn advertise_floods_all_other_ports_once() {
        let mut c = controller();
        let out = c.on_message(SimTime::ZERO, 0, packet_in(advertise(1), 2));
        let ports: Vec<u16> = out
            .iter()
            .map(|(_, m)| match m {
                ControlMsg::OpenFlow(OpenFlowMsg::PacketOut {
                    out_port, in_port, ..
                }) => {
                    assert_eq!(*in_port, Some(2));
                    *out_port
                }
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        assert_eq!(ports, vec![1, 3, 5]);
        assert!(c
            .on_message(SimTime::ZERO, 0, packet_in(advertise(1), 3))
            .is_empty());
    }

    #[test]
    fn listener_ready_without_talker_installs_nothing() {
        let mut c = controller();
        assert!(c
            .on_message(SimTime::ZERO, 0, packet_in(ready(4), 5))
            .is_empty());
        assert_eq!(c.notes().len(), 1);
    }

    #[test]
    fn listeners_accumulate_in_the_flow_entry() {
        let mut c = controller();
        c.on_message(SimTime::ZERO, 0, packet_in(advertise(1), 1));
        let mut last = None;
        for port in [5, 3] {
            let out = c.on_message(SimTime::ZERO, 0, packet_in(ready(1), port));
            assert_eq!(out.len(), 2);
            match &out[1].1 {
                ControlMsg::OpenFlow(OpenFlowMsg::PacketOut { out_port, .. }) => {
                    assert_eq!(*out_port, 1)
                }
                other => panic!("unexpected {other:?}"),
            }
            last = Some(out[0].1.clone());
        }
        let Some(ControlMsg::OpenFlow(OpenFlowMsg::FlowMod(spec))) = last else {
            panic!("no flow-mod");
        };
        assert_eq!(
            spec.actions,
            vec![FlowAction::Output(3), FlowAction::Output(5)]
        );
        assert_eq!(spec.matcher, FlowMatch::dst(MacAddr::stream_group(1)));
    }

    #[test]
    fn rpc_replies_are_recorded() {
        let mut c = controller();
        let g = GateControlList::parse("R:10;G:15;Y:860;R:115").unwrap();
        let out = c.on_timeline(
            SimTime::from_secs(2),
            &TimelineAction::EditGcl {
                switch: "s1".into(),
                ports: vec![2, 1],
                schedule: g,
            },
        );
        let [(
            0,
            ControlMsg::Netconf(NetconfMsg::Rpc {
                id,
                op: NetconfOp::EditConfig { payload, .. },
            }),
        )] = &out[..]
        else {
            panic!("unexpected {out:?}");
        };
        assert_eq!(
            payload,
            "1=R:10;G:15;Y:860;R:115\n2=R:10;G:15;Y:860;R:115\n"
        );
        let id = *id;
        c.on_message(
            SimTime::from_secs(2),
            0,
            ControlMsg::Netconf(NetconfMsg::RpcReply {
                id,
                result: RpcResult::Error("x".into()),
            }),
        );
        let rec = &c.rpcs()[0];
        assert_eq!(rec.op, "edit-config");
        assert_eq!(rec.result, Some(RpcResult::Error("x".into())));
        assert_eq!(rec.replied_at, Some(SimTime::from_secs(2)));
        assert!(c
            .on_timeline(
                SimTime::ZERO,
                &TimelineAction::InjectEditFailure {
                    switch: "s1".into()
                }
            )
            .is_empty());
    }
}

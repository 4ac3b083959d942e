//! The programmable real-time switch.
//!
//! Frame path: ingress stage (pass-through) → processing delay → flow-table
//! lookup → actions → per-port 802.1Qbv egress. SRP frames skip the table
//! and are punted to the controller. Management happens over two control
//! surfaces, an OpenFlow agent and a NetConf server backed by the GCL
//! datastore.

mod datastore;
mod flow;
mod launch;
mod sr;

use std::collections::BTreeMap;

pub use datastore::{format_payload, parse_payload, GclDatastore, RUNNING};
pub use flow::{FlowAction, FlowEntry, FlowMatch, FlowSpec, FlowTable};
pub use launch::{PortGcl, SwitchConfig};
pub use sr::{SrTable, SrTableEntry};

use crate::control::{ControlMsg, NetconfMsg, NetconfOp, OpenFlowMsg, RpcResult};
use crate::error::SwitchError;
use crate::ethernet::Frame;
use crate::qbv::{GateControlList, QbvPort, SelectionPolicy};
use crate::srp::SrpMessage;
use crate::time::{SimDuration, SimTime};

/// Cycle used for ports that have never been given a schedule.
pub const DEFAULT_CYCLE: SimDuration = SimDuration::from_millis(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    TableMiss,
    NoSuchPort(u16),
    DropAction,
    Ingress,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwitchEffect {
    /// A frame was queued on this egress port; the port needs servicing.
    Enqueued(u16),
    /// A message for the controller.
    Send(ControlMsg),
    Dropped(DropReason),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SwitchCounters {
    pub relayed: u64,
    pub table_miss: u64,
    pub bad_port: u64,
    pub drop_action: u64,
    pub packet_in: u64,
    pub packet_out: u64,
    pub edit_ok: u64,
    pub edit_error: u64,
}

#[derive(Debug, Clone)]
pub struct Switch {
    name: String,
    ports: BTreeMap<u16, QbvPort>,
    flow_table: FlowTable,
    sr_table: SrTable,
    datastore: GclDatastore,
    policy: SelectionPolicy,
    processing_delay: SimDuration,
    started: bool,
    netconf_session: bool,
    openflow_session: bool,
    fail_next_edit: bool,
    counters: SwitchCounters,
}

impl Switch {
    /// A switch with the given `(port, link bitrate)` pairs, all gates open.
    pub fn new(name: impl Into<String>, ports: impl IntoIterator<Item = (u16, u64)>) -> Self {
        let policy = SelectionPolicy::default();
        let mut datastore = GclDatastore::new();
        let ports = ports
            .into_iter()
            .map(|(id, bitrate)| {
                let gcl = GateControlList::always_open(DEFAULT_CYCLE);
                datastore.set(id, gcl.clone());
                (id, QbvPort::new(gcl, policy, bitrate))
            })
            .collect();
        Switch {
            name: name.into(),
            ports,
            flow_table: FlowTable::new(),
            sr_table: SrTable::new(),
            datastore,
            policy,
            processing_delay: SimDuration::ZERO,
            started: false,
            netconf_session: false,
            openflow_session: false,
            fail_next_edit: false,
            counters: SwitchCounters::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn port_ids(&self) -> Vec<u16> {
        self.ports.keys().copied().collect()
    }

    pub fn port(&self, id: u16) -> Option<&QbvPort> {
        self.ports.get(&id)
    }

    pub fn port_mut(&mut self, id: u16) -> Option<&mut QbvPort> {
        self.ports.get_mut(&id)
    }

    pub fn flow_table(&self) -> &FlowTable {
        &self.flow_table
    }

    pub fn sr_table(&self) -> &SrTable {
        &self.sr_table
    }

    pub fn datastore(&self) -> &GclDatastore {
        &self.datastore
    }

    pub fn processing_delay(&self) -> SimDuration {
        self.processing_delay
    }

    pub fn policy(&self) -> SelectionPolicy {
        self.policy
    }

    pub fn counters(&self) -> SwitchCounters {
        self.counters
    }

    /// Frames currently sitting in egress queues.
    pub fn queued(&self) -> usize {
        self.ports.values().map(QbvPort::queued).sum()
    }

    /// Called once the simulation clock starts; freezes launch-config import.
    pub fn mark_started(&mut self) {
        self.started = true;
    }

    /// Answer the next `edit-config` with an error instead of applying it.
    pub fn arm_edit_failure(&mut self) {
        self.fail_next_edit = true;
    }

    fn unknown_port(&self, port: u16) -> SwitchError {
        SwitchError::UnknownPort {
            switch: self.name.clone(),
            port,
        }
    }

    pub fn export_launch_config(&self) -> SwitchConfig {
        SwitchConfig {
            policy: self.policy,
            processing_delay: self.processing_delay,
            gcl: self
                .datastore
                .iter()
                .map(|(port, schedule)| PortGcl {
                    port,
                    schedule: schedule.clone(),
                })
                .collect(),
            flows: self
                .flow_table
                .entries()
                .iter()
                .map(FlowEntry::spec)
                .collect(),
            sr: self.sr_table.entries().cloned().collect(),
        }
    }

    /// Replace flow table, SR table and schedules with `cfg`. Rejected once
    /// the simulation has started or if `cfg` names a port this switch lacks;
    /// a rejected import changes nothing.
    pub fn import_launch_config(&mut self, cfg: &SwitchConfig) -> Result<(), SwitchError> {
        if self.started {
            return Err(SwitchError::ImportAfterStart);
        }
        for g in &cfg.gcl {
            if !self.ports.contains_key(&g.port) {
                return Err(self.unknown_port(g.port));
            }
        }
        for spec in &cfg.flows {
            for action in &spec.actions {
                if let FlowAction::Output(p) = action {
                    if !self.ports.contains_key(p) {
                        return Err(self.unknown_port(*p));
                    }
                }
            }
        }
        let mut sr = SrTable::new();
        for entry in &cfg.sr {
            for p in std::iter::once(&entry.talker_port).chain(&entry.listener_ports) {
                if !self.ports.contains_key(p) {
                    return Err(self.unknown_port(*p));
                }
            }
            sr.insert(entry.clone())?;
        }

        self.policy = cfg.policy;
        self.processing_delay = cfg.processing_delay;
        for port in self.ports.values_mut() {
            port.set_policy(cfg.policy);
        }
        for g in &cfg.gcl {
            let bitrate = self.ports[&g.port].bitrate();
            self.ports.insert(
                g.port,
                QbvPort::new(g.schedule.clone(), cfg.policy, bitrate),
            );
            self.datastore.set(g.port, g.schedule.clone());
        }
        self.flow_table.clear();
        for spec in &cfg.flows {
            self.flow_table.insert(spec.clone());
        }
        self.sr_table = sr;
        Ok(())
    }

    /// Ingress control. Per-stream filtering would live here; currently every
    /// frame passes.
    fn ingress_admit(&self, _frame: &Frame, _in_port: u16) -> bool {
        true
    }

    /// Forward a fully received frame. The caller applies the processing delay
    /// before calling this.
    pub fn relay(&mut self, frame: Frame, in_port: u16) -> Vec<SwitchEffect> {
        if !self.ingress_admit(&frame, in_port) {
            return vec![SwitchEffect::Dropped(DropReason::Ingress)];
        }
        if frame.is_srp() {
            self.counters.packet_in += 1;
            return vec![SwitchEffect::Send(ControlMsg::OpenFlow(
                OpenFlowMsg::PacketIn { frame, in_port },
            ))];
        }
        let Some(entry) = self.flow_table.lookup_and_count(&frame, in_port) else {
            self.counters.table_miss += 1;
            return vec![SwitchEffect::Dropped(DropReason::TableMiss)];
        };
        let actions = entry.actions.clone();
        self.counters.relayed += 1;
        let mut effects = Vec::with_capacity(actions.len());
        for action in actions {
            match action {
                FlowAction::Output(port) => match self.ports.get_mut(&port) {
                    Some(q) => {
                        q.enqueue(frame.clone());
                        effects.push(SwitchEffect::Enqueued(port));
                    }
                    None => {
                        self.counters.bad_port += 1;
                        effects.push(SwitchEffect::Dropped(DropReason::NoSuchPort(port)));
                    }
                },
                FlowAction::ToController => {
                    self.counters.packet_in += 1;
                    effects.push(SwitchEffect::Send(ControlMsg::OpenFlow(
                        OpenFlowMsg::PacketIn {
                            frame: frame.clone(),
                            in_port,
                        },
                    )));
                }
                FlowAction::Drop => {
                    self.counters.drop_action += 1;
                    effects.push(SwitchEffect::Dropped(DropReason::DropAction));
                }
            }
        }
        if effects.is_empty() {
            // An entry with no actions drops, as in OpenFlow.
            self.counters.drop_action += 1;
            effects.push(SwitchEffect::Dropped(DropReason::DropAction));
        }
        effects
    }

    pub fn handle_flow_mod(&mut self, spec: FlowSpec) -> u64 {
        self.flow_table.insert(spec)
    }

    /// Inject `frame` into `out_port`'s egress. SRP frames update the SR
    /// table on the way through.
    pub fn handle_packet_out(
        &mut self,
        frame: Frame,
        in_port: Option<u16>,
        out_port: u16,
    ) -> Vec<SwitchEffect> {
        self.counters.packet_out += 1;
        if !self.ports.contains_key(&out_port) {
            self.counters.bad_port += 1;
            return vec![SwitchEffect::Dropped(DropReason::NoSuchPort(out_port))];
        }
        if let (Some(msg), Some(in_port)) = (frame.srp(), in_port) {
            match msg {
                SrpMessage::TalkerAdvertise {
                    stream,
                    dst_mac,
                    pcp,
                    ..
                } => self
                    .sr_table
                    .register_talker(*stream, *dst_mac, *pcp, in_port),
                SrpMessage::ListenerReady { stream } => {
                    // Unknown stream or a listener on the talker port: the
                    // controller already vetted the message, nothing to record.
                    let _ = self.sr_table.add_listener(*stream, in_port);
                }
            }
        }
        self.ports
            .get_mut(&out_port)
            .expect("checked")
            .enqueue(frame);
        vec![SwitchEffect::Enqueued(out_port)]
    }

    /// OpenFlow agent.
    pub fn handle_openflow(&mut self, msg: OpenFlowMsg) -> Vec<SwitchEffect> {
        match msg {
            OpenFlowMsg::Hello => {
                self.openflow_session = true;
                vec![SwitchEffect::Send(ControlMsg::OpenFlow(OpenFlowMsg::Hello))]
            }
            OpenFlowMsg::FeaturesRequest => vec![SwitchEffect::Send(ControlMsg::OpenFlow(
                OpenFlowMsg::FeaturesReply {
                    ports: self.port_ids(),
                },
            ))],
            OpenFlowMsg::FlowMod(spec) => {
                self.handle_flow_mod(spec);
                Vec::new()
            }
            OpenFlowMsg::PacketOut {
                frame,
                in_port,
                out_port,
            } => self.handle_packet_out(frame, in_port, out_port),
            OpenFlowMsg::FeaturesReply { .. } | OpenFlowMsg::PacketIn { .. } => Vec::new(),
        }
    }

    /// NetConf server: hands RPCs to the datastore manager and builds the reply.
    pub fn netconf_handle(&mut self, now: SimTime, msg: NetconfMsg) -> Option<NetconfMsg> {
        match msg {
            NetconfMsg::Hello => {
                self.netconf_session = true;
                Some(NetconfMsg::Hello)
            }
            NetconfMsg::Rpc { id, op } => {
                let result = if self.netconf_session {
                    self.apply_rpc(now, op)
                } else {
                    RpcResult::Error("no session".into())
                };
                Some(NetconfMsg::RpcReply { id, result })
            }
            NetconfMsg::RpcReply { .. } => None,
        }
    }

    fn apply_rpc(&mut self, now: SimTime, op: NetconfOp) -> RpcResult {
        match op {
            NetconfOp::GetConfig { datastore } => {
                if datastore != RUNNING {
                    return RpcResult::Error(format!("unknown datastore {datastore}"));
                }
                RpcResult::Data(self.datastore.to_text())
            }
            NetconfOp::EditConfig { datastore, payload } => {
                let result = self.edit_config(now, &datastore, &payload);
                match result {
                    Ok(()) => {
                        self.counters.edit_ok += 1;
                        RpcResult::Ok
                    }
                    Err(reason) => {
                        self.counters.edit_error += 1;
                        RpcResult::Error(reason)
                    }
                }
            }
        }
    }

    /// Validate everything, then apply everything.
    fn edit_config(&mut self, now: SimTime, datastore: &str, payload: &str) -> Result<(), String> {
        if std::mem::take(&mut self.fail_next_edit) {
            return Err("injected failure".into());
        }
        if datastore != RUNNING {
            return Err(format!("unknown datastore {datastore}"));
        }
        let lists = parse_payload(payload).map_err(|e| e.to_string())?;
        for (port, gcl) in &lists {
            let q = self
                .ports
                .get(port)
                .ok_or_else(|| self.unknown_port(*port).to_string())?;
            gcl.check_cycle(q.cycle()).map_err(|source| {
                SwitchError::InvalidGcl {
                    port: *port,
                    source,
                }
                .to_string()
            })?;
        }
        for (port, gcl) in lists {
            self.ports
                .get_mut(&port)
                .expect("validated")
                .install_gcl(gcl.clone(), now)
                .expect("validated");
            self.datastore.set(port, gcl);
        }
        Ok(())
    }

    /// `get-config` without going through a session, for inspection.
    pub fn running_config(&self) -> String {
        self.datastore.to_text()
    }
}

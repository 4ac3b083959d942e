//! The simulated world: hosts, switches, links, control channels and the
//! controller, driven by the event engine.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::control::{
    ControlLogEntry, ControlMsg, Controller, NetconfMsg, NetconfOp, Outbox, TimelineAction,
    TimelineEntry, DIR_INJECT, DIR_TO_CONTROLLER, DIR_TO_SWITCH,
};
use crate::engine::{Engine, Event, Handler};
use crate::error::{ScenarioError, SimError};
use crate::ethernet::{Frame, Link, LinkDirection, MacAddr, Payload, ETHERTYPE_DATA};
use crate::qbv::{GateControlList, QbvPort, Selection, SelectionPolicy};
use crate::rng::RngStream;
use crate::scenario::config::{ScenarioConfig, TrafficConfig, HOST_PORT};
use crate::scenario::LatencyRecord;
use crate::srp::SrpMessage;
use crate::switch::{DropReason, Switch, SwitchEffect, DEFAULT_CYCLE};
use crate::time::{SimDuration, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Host(usize),
    Switch(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortId {
    pub node: NodeId,
    pub port: u16,
}

#[derive(Debug, Clone)]
pub enum SimEvent {
    SessionStart,
    Generate {
        source: usize,
    },
    SrpSend {
        host: usize,
        msg: SrpMessage,
    },
    /// Service an egress port. Stale tokens are ignored.
    Kick {
        port: PortId,
        token: u64,
    },
    /// A frame has been fully received on `port`.
    Arrive {
        port: PortId,
        frame: Frame,
    },
    /// Processing delay elapsed; hand the frame to the relay unit.
    Relay {
        switch: usize,
        in_port: u16,
        frame: Frame,
    },
    ToSwitch {
        switch: usize,
        msg: ControlMsg,
    },
    ToController {
        switch: usize,
        msg: ControlMsg,
    },
    Timeline {
        index: usize,
    },
}

/// Data-frame bookkeeping. SRP frames are tracked separately.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NetCounters {
    pub data_sent: u64,
    /// Extra frames created by multi-port output actions.
    pub copies: u64,
    pub delivered: u64,
    /// Reached a host whose address it does not carry.
    pub misdelivered: u64,
    /// Sent to the controller by a flow entry.
    pub punted: u64,
    pub dropped_table_miss: u64,
    pub dropped_bad_port: u64,
    pub dropped_action: u64,
    pub dropped_ingress: u64,
    /// On a wire or waiting out a processing delay.
    pub in_transit: u64,
    pub srp_sent: u64,
    pub srp_received: u64,
}

impl NetCounters {
    pub fn dropped(&self) -> u64 {
        self.dropped_table_miss + self.dropped_bad_port + self.dropped_action + self.dropped_ingress
    }
}

/// One transmission start, for gate audits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxRecord {
    pub port: PortId,
    pub flow_id: Arc<str>,
    pub seq: u64,
    pub pcp: u8,
    pub start: SimTime,
    pub end: SimTime,
}

#[derive(Debug, Clone)]
struct Egress {
    link: Link,
    dir: LinkDirection,
    peer: PortId,
    token: u64,
    kick_at: Option<SimTime>,
}

#[derive(Debug, Clone)]
pub struct Host {
    pub name: String,
    pub mac: MacAddr,
    nic: QbvPort,
    pub received: u64,
    pub srp_received: u64,
}

impl Host {
    pub fn nic(&self) -> &QbvPort {
        &self.nic
    }
}

#[derive(Debug, Clone)]
struct Source {
    flow_id: Arc<str>,
    host: usize,
    dst: MacAddr,
    pcp: u8,
    vid: u16,
    wire_size: u32,
    period: SimDuration,
    jitter: SimDuration,
    stop: SimTime,
    count: Option<u64>,
    rng: RngStream,
    next_seq: u64,
}

impl Source {
    fn new(idx: usize, t: &TrafficConfig, cfg: &ScenarioConfig, host: usize) -> Self {
        let end = SimTime::from(cfg.duration);
        Source {
            flow_id: Arc::from(t.flow_id.as_str()),
            host,
            dst: cfg.resolve_dst(&t.dst).expect("validated"),
            pcp: t.pcp,
            vid: t.vid,
            wire_size: t.wire_size,
            period: t.period,
            jitter: t.jitter_stddev,
            stop: t.stop_at.map_or(end, |s| s.min(end)),
            count: t.count,
            rng: RngStream::derive(cfg.seed, idx as u64),
            next_seq: 0,
        }
    }
}

#[derive(Debug)]
pub struct Network {
    hosts: Vec<Host>,
    host_index: BTreeMap<String, usize>,
    switches: Vec<Switch>,
    switch_index: BTreeMap<String, usize>,
    egress: BTreeMap<PortId, Egress>,
    controller: Controller,
    channel_latency: Vec<SimDuration>,
    sources: Vec<Source>,
    timeline: Vec<TimelineEntry>,
    trace: Vec<LatencyRecord>,
    log: Vec<ControlLogEntry>,
    counters: NetCounters,
    tx_log: Option<Vec<TxRecord>>,
    started: bool,
}

impl Network {
    fn qbv(&self, port: PortId) -> &QbvPort {
        match port.node {
            NodeId::Host(h) => &self.hosts[h].nic,
            NodeId::Switch(s) => self.switches[s].port(port.port).expect("linked port"),
        }
    }

    fn qbv_mut(&mut self, port: PortId) -> &mut QbvPort {
        match port.node {
            NodeId::Host(h) => &mut self.hosts[h].nic,
            NodeId::Switch(s) => self.switches[s].port_mut(port.port).expect("linked port"),
        }
    }

    fn schedule_kick(
        &mut self,
        engine: &mut Engine<SimEvent>,
        port: PortId,
        at: SimTime,
    ) -> Result<(), SimError> {
        let eg = self.egress.get_mut(&port).expect("linked port");
        eg.token += 1;
        eg.kick_at = Some(at);
        let token = eg.token;
        engine.schedule(at, SimEvent::Kick { port, token })?;
        Ok(())
    }

    /// Make sure `port` is serviced as soon as it can transmit. The kick is
    /// an event at the current instant rather than an immediate call, so
    /// every frame arriving at this instant is queued before selection.
    fn wake(&mut self, engine: &mut Engine<SimEvent>, port: PortId) -> Result<(), SimError> {
        if !self.egress.contains_key(&port) {
            return Ok(());
        }
        let target = engine.now().max(self.qbv(port).busy_until());
        if self.egress[&port].kick_at.is_none_or(|t| t > target) {
            self.schedule_kick(engine, port, target)?;
        }
        Ok(())
    }

    fn kick(
        &mut self,
        engine: &mut Engine<SimEvent>,
        port: PortId,
        token: u64,
    ) -> Result<(), SimError> {
        let eg = self.egress.get_mut(&port).expect("linked port");
        if eg.token != token {
            return Ok(());
        }
        eg.kick_at = None;
        let now = engine.now();
        match self.qbv_mut(port).select_next(now)? {
            Selection::Transmit { frame, start, end } => {
                let eg = self.egress.get_mut(&port).expect("linked port");
                let delivery = eg.dir.transmit(&eg.link, frame.wire_size, start)?;
                let peer = eg.peer;
                if let Some(log) = &mut self.tx_log {
                    log.push(TxRecord {
                        port,
                        flow_id: frame.flow_id.clone(),
                        seq: frame.seq,
                        pcp: frame.pcp,
                        start,
                        end,
                    });
                }
                if !frame.is_srp() {
                    self.counters.in_transit += 1;
                }
                engine.schedule(delivery, SimEvent::Arrive { port: peer, frame })?;
                self.schedule_kick(engine, port, end)?;
            }
            Selection::WaitUntil(t) => self.schedule_kick(engine, port, t)?,
            Selection::Idle | Selection::Stalled => {}
        }
        Ok(())
    }

    fn log(&mut self, now: SimTime, direction: &str, switch: usize, msg: &ControlMsg) {
        self.log.push(ControlLogEntry {
            time_ns: now.as_nanos(),
            direction: direction.to_string(),
            peer: self.switches[switch].name().to_string(),
            kind: msg.kind().to_string(),
            detail: msg.detail(),
            outcome: msg.outcome(),
        });
    }

    fn send_to_switches(
        &mut self,
        engine: &mut Engine<SimEvent>,
        outbox: Outbox,
    ) -> Result<(), SimError> {
        for (switch, msg) in outbox {
            self.log(engine.now(), DIR_TO_SWITCH, switch, &msg);
            engine.schedule_in(
                self.channel_latency[switch],
                SimEvent::ToSwitch { switch, msg },
            )?;
        }
        Ok(())
    }

    fn send_to_controller(
        &mut self,
        engine: &mut Engine<SimEvent>,
        switch: usize,
        msg: ControlMsg,
    ) -> Result<(), SimError> {
        self.log(engine.now(), DIR_TO_CONTROLLER, switch, &msg);
        engine.schedule_in(
            self.channel_latency[switch],
            SimEvent::ToController { switch, msg },
        )?;
        Ok(())
    }

    fn apply_effects(
        &mut self,
        engine: &mut Engine<SimEvent>,
        switch: usize,
        effects: Vec<SwitchEffect>,
        data: bool,
    ) -> Result<(), SimError> {
        for effect in effects {
            match effect {
                SwitchEffect::Enqueued(port) => self.wake(
                    engine,
                    PortId {
                        node: NodeId::Switch(switch),
                        port,
                    },
                )?,
                SwitchEffect::Send(msg) => {
                    if data {
                        self.counters.punted += 1;
                    }
                    self.send_to_controller(engine, switch, msg)?;
                }
                SwitchEffect::Dropped(reason) if data => match reason {
                    DropReason::TableMiss => self.counters.dropped_table_miss += 1,
                    DropReason::NoSuchPort(_) => self.counters.dropped_bad_port += 1,
                    DropReason::DropAction => self.counters.dropped_action += 1,
                    DropReason::Ingress => self.counters.dropped_ingress += 1,
                },
                SwitchEffect::Dropped(_) => {}
            }
        }
        Ok(())
    }

    fn generate(&mut self, engine: &mut Engine<SimEvent>, idx: usize) -> Result<(), SimError> {
        let now = engine.now();
        let host;
        {
            let src = &mut self.sources[idx];
            if now >= src.stop || src.count.is_some_and(|c| src.next_seq >= c) {
                return Ok(());
            }
            host = src.host;
            let frame = Frame {
                src_mac: self.hosts[host].mac,
                dst_mac: src.dst,
                ethertype: ETHERTYPE_DATA,
                pcp: src.pcp,
                vid: src.vid,
                wire_size: src.wire_size,
                flow_id: src.flow_id.clone(),
                seq: src.next_seq,
                created_at: now,
                payload: Payload::Data,
            };
            src.next_seq += 1;
            self.hosts[host].nic.enqueue(frame);
            self.counters.data_sent += 1;
            let gap = src.rng.gaussian(src.period, src.jitter);
            let next = now + gap;
            if next < src.stop {
                engine.schedule(next, SimEvent::Generate { source: idx })?;
            }
        }
        self.wake(
            engine,
            PortId {
                node: NodeId::Host(host),
                port: HOST_PORT,
            },
        )
    }

    fn arrive(
        &mut self,
        engine: &mut Engine<SimEvent>,
        port: PortId,
        frame: Frame,
    ) -> Result<(), SimError> {
        match port.node {
            NodeId::Host(h) => {
                let host = &mut self.hosts[h];
                if frame.is_srp() {
                    host.srp_received += 1;
                    self.counters.srp_received += 1;
                    return Ok(());
                }
                self.counters.in_transit -= 1;
                if frame.dst_mac == host.mac || frame.dst_mac.is_multicast() {
                    host.received += 1;
                    self.counters.delivered += 1;
                    self.trace.push(LatencyRecord {
                        flow_id: frame.flow_id.to_string(),
                        seq: frame.seq,
                        send_time: frame.created_at,
                        recv_time: engine.now(),
                    });
                } else {
                    self.counters.misdelivered += 1;
                }
            }
            NodeId::Switch(s) => {
                let delay = self.switches[s].processing_delay();
                engine.schedule_in(
                    delay,
                    SimEvent::Relay {
                        switch: s,
                        in_port: port.port,
                        frame,
                    },
                )?;
            }
        }
        Ok(())
    }

    fn relay(
        &mut self,
        engine: &mut Engine<SimEvent>,
        switch: usize,
        in_port: u16,
        frame: Frame,
    ) -> Result<(), SimError> {
        let data = !frame.is_srp();
        let effects = self.switches[switch].relay(frame, in_port);
        if data {
            self.counters.in_transit -= 1;
            self.counters.copies += effects.len() as u64 - 1;
        }
        self.apply_effects(engine, switch, effects, data)
    }

    fn deliver_to_switch(
        &mut self,
        engine: &mut Engine<SimEvent>,
        switch: usize,
        msg: ControlMsg,
    ) -> Result<(), SimError> {
        match msg {
            ControlMsg::OpenFlow(m) => {
                let effects = self.switches[switch].handle_openflow(m);
                self.apply_effects(engine, switch, effects, false)
            }
            ControlMsg::Netconf(m) => {
                let edit = matches!(
                    m,
                    NetconfMsg::Rpc {
                        op: NetconfOp::EditConfig { .. },
                        ..
                    }
                );
                let reply = self.switches[switch].netconf_handle(engine.now(), m);
                if edit {
                    for port in self.switches[switch].port_ids() {
                        self.wake(
                            engine,
                            PortId {
                                node: NodeId::Switch(switch),
                                port,
                            },
                        )?;
                    }
                }
                if let Some(reply) = reply {
                    self.send_to_controller(engine, switch, ControlMsg::Netconf(reply))?;
                }
                Ok(())
            }
        }
    }

    fn timeline(&mut self, engine: &mut Engine<SimEvent>, index: usize) -> Result<(), SimError> {
        let action = self.timeline[index].action.clone();
        let switch = self.switch_index[action.switch()];
        if let TimelineAction::InjectEditFailure { .. } = action {
            self.switches[switch].arm_edit_failure();
            self.log.push(ControlLogEntry {
                time_ns: engine.now().as_nanos(),
                direction: DIR_INJECT.into(),
                peer: self.switches[switch].name().to_string(),
                kind: "inject-edit-failure".into(),
                detail: "next edit-config fails".into(),
                outcome: "-".into(),
            });
        }
        let outbox = self.controller.on_timeline(engine.now(), &action);
        self.send_to_switches(engine, outbox)
    }
}

impl Handler<SimEvent> for Network {
    type Error = SimError;

    fn handle(
        &mut self,
        engine: &mut Engine<SimEvent>,
        event: Event<SimEvent>,
    ) -> Result<(), SimError> {
        match event.payload {
            SimEvent::SessionStart => {
                let outbox = self.controller.session_start();
                self.send_to_switches(engine, outbox)
            }
            SimEvent::Generate { source } => self.generate(engine, source),
            SimEvent::SrpSend { host, msg } => {
                let frame = Frame::srp_message(self.hosts[host].mac, msg, engine.now());
                self.hosts[host].nic.enqueue(frame);
                self.counters.srp_sent += 1;
                self.wake(
                    engine,
                    PortId {
                        node: NodeId::Host(host),
                        port: HOST_PORT,
                    },
                )
            }
            SimEvent::Kick { port, token } => self.kick(engine, port, token),
            SimEvent::Arrive { port, frame } => self.arrive(engine, port, frame),
            SimEvent::Relay {
                switch,
                in_port,
                frame,
            } => self.relay(engine, switch, in_port, frame),
            SimEvent::ToSwitch { switch, msg } => self.deliver_to_switch(engine, switch, msg),
            SimEvent::ToController { switch, msg } => {
                let outbox = self.controller.on_message(engine.now(), switch, msg);
                self.send_to_switches(engine, outbox)
            }
            SimEvent::Timeline { index } => self.timeline(engine, index),
        }
    }
}

/// Frame conservation snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conservation {
    pub sent: u64,
    pub copies: u64,
    pub delivered: u64,
    pub misdelivered: u64,
    pub punted: u64,
    pub dropped: u64,
    pub in_transit: u64,
    pub queued: u64,
}

impl Conservation {
    /// Every frame sent (or copied) is delivered, dropped, punted, on the
    /// move, or queued.
    pub fn balanced(&self) -> bool {
        self.sent + self.copies
            == self.delivered
                + self.misdelivered
                + self.punted
                + self.dropped
                + self.in_transit
                + self.queued
    }
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: Vec<LatencyRecord>,
    pub control_log: Vec<ControlLogEntry>,
    pub rpcs: Vec<crate::control::RpcRecord>,
    pub notes: Vec<(SimTime, String)>,
    pub counters: NetCounters,
    pub conservation: Conservation,
    /// `get-config` text of every switch at the end of the run.
    pub running_configs: BTreeMap<String, String>,
    pub events: u64,
}

#[derive(Debug)]
pub struct Simulation {
    engine: Engine<SimEvent>,
    net: Network,
    duration: SimDuration,
}

impl Simulation {
    /// Build the network and schedule the initial events. Fails before
    /// anything runs if the scenario is inconsistent.
    pub fn new(cfg: &ScenarioConfig) -> Result<Self, ScenarioError> {
        cfg.validate()?;
        let macs = cfg.host_macs();
        let mut host_link = BTreeMap::new();
        for l in &cfg.links {
            for e in [&l.a, &l.b] {
                host_link.insert(e.node.clone(), l.bitrate);
            }
        }
        let hosts: Vec<Host> = cfg
            .hosts
            .iter()
            .zip(&macs)
            .map(|(h, &mac)| Host {
                name: h.name.clone(),
                mac,
                nic: QbvPort::new(
                    GateControlList::always_open(DEFAULT_CYCLE),
                    SelectionPolicy::GateOpenAtStart,
                    host_link[&h.name],
                ),
                received: 0,
                srp_received: 0,
            })
            .collect();
        let host_index: BTreeMap<String, usize> = hosts
            .iter()
            .enumerate()
            .map(|(i, h)| (h.name.clone(), i))
            .collect();

        let mut switches = Vec::new();
        for s in &cfg.switches {
            let mut sw = Switch::new(s.name.clone(), cfg.switch_ports(&s.name));
            sw.import_launch_config(&s.launch)
                .map_err(|source| ScenarioError::Switch {
                    switch: s.name.clone(),
                    source,
                })?;
            switches.push(sw);
        }
        let switch_index: BTreeMap<String, usize> = switches
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name().to_string(), i))
            .collect();

        let resolve = |node: &str, port: u16| -> PortId {
            let node = match host_index.get(node) {
                Some(&h) => NodeId::Host(h),
                None => NodeId::Switch(switch_index[node]),
            };
            PortId { node, port }
        };
        let mut egress = BTreeMap::new();
        for l in &cfg.links {
            let a = resolve(&l.a.node, l.a.port);
            let b = resolve(&l.b.node, l.b.port);
            let link = Link {
                bitrate: l.bitrate,
                propagation_delay: l.propagation_delay,
            };
            for (from, to) in [(a, b), (b, a)] {
                egress.insert(
                    from,
                    Egress {
                        link,
                        dir: LinkDirection::default(),
                        peer: to,
                        token: 0,
                        kick_at: None,
                    },
                );
            }
        }

        let controller = Controller::new(switches.iter().map(|s| s.name().to_string()));
        let mut channel_latency = vec![SimDuration::ZERO; switches.len()];
        for c in &cfg.control_channels {
            channel_latency[switch_index[&c.switch]] = c.latency;
        }

        let sources: Vec<Source> = cfg
            .traffic
            .iter()
            .enumerate()
            .map(|(i, t)| Source::new(i, t, cfg, host_index[&t.host]))
            .collect();

        let mut engine = Engine::new();
        let schedule = |engine: &mut Engine<SimEvent>, at: SimTime, ev: SimEvent| {
            engine
                .schedule(at, ev)
                .expect("initial events are never in the past");
        };
        schedule(&mut engine, SimTime::ZERO, SimEvent::SessionStart);
        for (i, t) in cfg.timeline.iter().enumerate() {
            schedule(&mut engine, t.at, SimEvent::Timeline { index: i });
        }
        for t in &cfg.srp.talkers {
            let msg = SrpMessage::TalkerAdvertise {
                stream: t.stream,
                dst_mac: t.dst_mac,
                pcp: t.pcp,
                max_frame_size: t.max_frame_size,
                interval: t.interval,
            };
            schedule(
                &mut engine,
                t.advertise_at,
                SimEvent::SrpSend {
                    host: host_index[&t.host],
                    msg,
                },
            );
        }
        for l in &cfg.srp.listeners {
            let msg = SrpMessage::ListenerReady { stream: l.stream };
            schedule(
                &mut engine,
                l.ready_at,
                SimEvent::SrpSend {
                    host: host_index[&l.host],
                    msg,
                },
            );
        }
        for (i, t) in cfg.traffic.iter().enumerate() {
            schedule(
                &mut engine,
                t.start_at + t.offset,
                SimEvent::Generate { source: i },
            );
        }

        Ok(Simulation {
            engine,
            net: Network {
                hosts,
                host_index,
                switches,
                switch_index,
                egress,
                controller,
                channel_latency,
                sources,
                timeline: cfg.timeline.clone(),
                trace: Vec::new(),
                log: Vec::new(),
                counters: NetCounters::default(),
                tx_log: None,
                started: false,
            },
            duration: cfg.duration,
        })
    }

    /// Record every transmission start from now on.
    pub fn enable_tx_log(&mut self) {
        self.net.tx_log.get_or_insert_with(Vec::new);
    }

    pub fn run_until(&mut self, t: SimTime) -> Result<(), SimError> {
        if !self.net.started {
            self.net.started = true;
            for s in &mut self.net.switches {
                s.mark_started();
            }
        }
        self.engine.run_until(t, &mut self.net)
    }

    /// Run to the scenario's configured duration.
    pub fn run(&mut self) -> Result<(), SimError> {
        self.run_until(SimTime::from(self.duration))
    }

    pub fn now(&self) -> SimTime {
        self.engine.now()
    }

    pub fn events_executed(&self) -> u64 {
        self.engine.executed()
    }

    pub fn switch(&self, name: &str) -> Option<&Switch> {
        self.net
            .switch_index
            .get(name)
            .map(|&i| &self.net.switches[i])
    }

    /// Mutable access for set-up before the run starts (launch-config import).
    pub fn switch_mut(&mut self, name: &str) -> Option<&mut Switch> {
        self.net
            .switch_index
            .get(name)
            .map(|&i| &mut self.net.switches[i])
    }

    pub fn host(&self, name: &str) -> Option<&Host> {
        self.net.host_index.get(name).map(|&i| &self.net.hosts[i])
    }

    pub fn controller(&self) -> &Controller {
        &self.net.controller
    }

    pub fn trace(&self) -> &[LatencyRecord] {
        &self.net.trace
    }

    pub fn control_log(&self) -> &[ControlLogEntry] {
        &self.net.log
    }

    pub fn counters(&self) -> NetCounters {
        self.net.counters
    }

    pub fn tx_log(&self) -> &[TxRecord] {
        self.net.tx_log.as_deref().unwrap_or(&[])
    }

    /// Name of the node a port belongs to.
    pub fn node_name(&self, node: NodeId) -> &str {
        match node {
            NodeId::Host(h) => &self.net.hosts[h].name,
            NodeId::Switch(s) => self.net.switches[s].name(),
        }
    }

    pub fn conservation(&self) -> Conservation {
        let c = self.net.counters;
        let queued = self
            .net
            .egress
            .keys()
            .map(|&p| self.net.qbv(p).frames().filter(|f| !f.is_srp()).count() as u64)
            .sum();
        Conservation {
            sent: c.data_sent,
            copies: c.copies,
            delivered: c.delivered,
            misdelivered: c.misdelivered,
            punted: c.punted,
            dropped: c.dropped(),
            in_transit: c.in_transit,
            queued,
        }
    }

    pub fn into_output(self) -> RunOutput {
        let conservation = self.conservation();
        let events = self.engine.executed();
        let net = self.net;
        RunOutput {
            running_configs: net
                .switches
                .iter()
                .map(|s| (s.name().to_string(), s.running_config()))
                .collect(),
            rpcs: net.controller.rpcs().to_vec(),
            notes: net.controller.notes().to_vec(),
            trace: net.trace,
            control_log: net.log,
            counters: net.counters,
            conservation,
            events,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("simulation fault: {0}")]
    Sim(#[from] SimError),
}

/// Validate, build and run `cfg` to its duration.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput, RunError> {
    let mut sim = Simulation::new(cfg)?;
    sim.run()?;
    Ok(sim.into_output())
}

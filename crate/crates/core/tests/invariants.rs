mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsnsim::control::{NetconfMsg, NetconfOp, RpcResult, TimelineAction, TimelineEntry};
use tsnsim::ethernet::MacAddr;
use tsnsim::qbv::{GateControlList, QbvPort, SelectionPolicy};
use tsnsim::scenario::case_study::{srp_scenario, srp_stream_mac};
use tsnsim::scenario::config::{
    ControlChannelConfig, EndpointRef, HostConfig, LinkConfig, ScenarioConfig, SwitchNodeConfig,
    TrafficConfig,
};
use tsnsim::scenario::{NodeId, Simulation};
use tsnsim::switch::{
    format_payload, FlowAction, FlowMatch, FlowSpec, PortGcl, Switch, SwitchConfig, RUNNING,
};
use tsnsim::time::{SimDuration, SimTime};

use common::*;

const CYCLE_NS: u64 = 1_000_000;

/// Random schedule filling exactly one 1 ms cycle; gate 7 opens somewhere.
fn cycle_schedule<R: Rng>(rng: &mut R) -> Schedule {
    let n = rng.random_range(1..=4);
    let mut cuts: Vec<u64> = (0..n - 1).map(|_| rng.random_range(1..CYCLE_NS)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut prev = 0;
    let mut out = Vec::new();
    for c in cuts.into_iter().chain([CYCLE_NS]) {
        out.push((c - prev, rng.random::<u8>()));
        prev = c;
    }
    out[0].1 |= 0x80;
    out
}

/// Hosts h1..hk on s1, s1 port 9 to s2 port 1, s2 port 2 to the sink.
/// Random gate schedules, traffic and mid-run edits.
fn random_network(seed: u64) -> ScenarioConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=4usize);
    let rate = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.5) {
            100_000_000
        } else {
            1_000_000_000
        }
    };
    let sink = MacAddr::local(k as u32 + 1);
    let policy = if rng.random_bool(0.5) {
        SelectionPolicy::GateOpenAtStart
    } else {
        SelectionPolicy::LengthAware
    };
    let mut hosts: Vec<HostConfig> = (1..=k)
        .map(|i| HostConfig {
            name: format!("h{i}"),
            mac: None,
        })
        .collect();
    hosts.push(HostConfig {
        name: "sink".into(),
        mac: None,
    });
    let mut links = Vec::new();
    for i in 1..=k {
        links.push(LinkConfig {
            a: EndpointRef::new(format!("h{i}"), 1),
            b: EndpointRef::new("s1", i as u16),
            bitrate: rate(&mut rng),
            propagation_delay: SimDuration(rng.random_range(0..2_000)),
        });
    }
    links.push(LinkConfig {
        a: EndpointRef::new("s1", 9),
        b: EndpointRef::new("s2", 1),
        bitrate: rate(&mut rng),
        propagation_delay: SimDuration(rng.random_range(0..2_000)),
    });
    links.push(LinkConfig {
        a: EndpointRef::new("s2", 2),
        b: EndpointRef::new("sink", 1),
        bitrate: rate(&mut rng),
        propagation_delay: SimDuration(rng.random_range(0..2_000)),
    });
    let switch = |name: &str, ports: Vec<u16>, out: u16, rng: &mut ChaCha8Rng| SwitchNodeConfig {
        name: name.into(),
        launch: SwitchConfig {
            policy,
            processing_delay: SimDuration(rng.random_range(0..10_000)),
            gcl: ports
                .into_iter()
                .map(|port| PortGcl {
                    port,
                    schedule: to_gcl(&cycle_schedule(rng)),
                })
                .collect(),
            flows: vec![FlowSpec {
                priority: 1,
                matcher: FlowMatch::dst(sink),
                actions: vec![FlowAction::Output(out)],
            }],
            sr: Vec::new(),
        },
    };
    let s1_ports: Vec<u16> = (1..=k as u16).chain([9]).collect();
    let switches = vec![
        switch("s1", s1_ports.clone(), 9, &mut rng),
        switch("s2", vec![1, 2], 2, &mut rng),
    ];
    let traffic = (1..=k)
        .map(|i| TrafficConfig {
            flow_id: format!("f{i}"),
            host: format!("h{i}"),
            pcp: rng.random_range(0..8),
            vid: 1,
            wire_size: rng.random_range(64..=1522),
            period: SimDuration(rng.random_range(50_000..2_000_000)),
            jitter_stddev: SimDuration(rng.random_range(0..20_000)),
            start_at: SimTime(rng.random_range(0..1_000_000)),
            offset: SimDuration::ZERO,
            dst: "sink".into(),
            stop_at: None,
            count: None,
        })
        .collect();
    let mut timeline = Vec::new();
    let edits = rng.random_range(0..=3);
    let mut at = 0;
    for _ in 0..edits {
        at += rng.random_range(1..15_000_000);
        let (sw, ports) = if rng.random_bool(0.5) {
            ("s1", s1_ports.clone())
        } else {
            ("s2", vec![1, 2])
        };
        timeline.push(TimelineEntry {
            at: SimTime(at),
            action: TimelineAction::EditGcl {
                switch: sw.into(),
                ports,
                schedule: to_gcl(&cycle_schedule(&mut rng)),
            },
        });
    }
    ScenarioConfig {
        name: "random".into(),
        description: String::new(),
        seed,
        duration: SimDuration::from_millis(50),
        controller: "controller".into(),
        hosts,
        switches,
        links,
        control_channels: ["s1", "s2"]
            .into_iter()
            .map(|s| ControlChannelConfig {
                switch: s.into(),
                latency: SimDuration(rng.random_range(0..100_000)),
            })
            .collect(),
        traffic,
        timeline,
        srp: Default::default(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn network_invariants(seed in any::<u64>()) {
        let cfg = random_network(seed);
        cfg.validate().unwrap();
        let mut sim = Simulation::new(&cfg).unwrap();
        sim.enable_tx_log();
        sim.run().unwrap();

        let c = sim.conservation();
        prop_assert!(c.balanced(), "{:?}", c);
        prop_assert!(c.sent > 0 && !sim.tx_log().is_empty());

        // A link carries one frame at a time.
        let mut by_port: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for tx in sim.tx_log() {
            prop_assert!(tx.start < tx.end);
            by_port.entry(tx.port).or_default().push((tx.start, tx.end));
        }
        for txs in by_port.values() {
            prop_assert!(txs.windows(2).all(|w| w[0].1 <= w[1].0));
        }

        // Frames of a flow leave every port, and reach the sink, in order.
        let mut last: BTreeMap<(_, String), u64> = BTreeMap::new();
        for tx in sim.tx_log() {
            let key = (tx.port, tx.flow_id.to_string());
            if let Some(prev) = last.insert(key, tx.seq) {
                prop_assert!(prev < tx.seq);
            }
        }
        let mut seen: BTreeMap<&str, u64> = BTreeMap::new();
        for r in sim.trace() {
            prop_assert!(r.recv_time > r.send_time);
            if let Some(prev) = seen.insert(r.flow_id.as_str(), r.seq) {
                prop_assert!(prev < r.seq);
            }
        }

        // Without edits, every switch transmission starts with its gate open.
        if cfg.timeline.is_empty() {
            for tx in sim.tx_log() {
                if let NodeId::Switch(_) = tx.port.node {
                    let name = sim.node_name(tx.port.node);
                    let launch = &cfg.switches.iter().find(|s| s.name == name).unwrap().launch;
                    let gcl = &launch.gcl.iter().find(|g| g.port == tx.port.port).unwrap().schedule;
                    let schedule: Schedule = gcl
                        .entries()
                        .iter()
                        .map(|e| (e.duration.as_nanos(), e.gates.0))
                        .collect();
                    prop_assert!(oracle_open(&schedule, tx.start.as_nanos(), tx.pcp));
                    if launch.policy == SelectionPolicy::LengthAware {
                        prop_assert!(oracle_open_throughout(
                            &schedule,
                            tx.start.as_nanos(),
                            tx.end.as_nanos(),
                            tx.pcp
                        ));
                    }
                }
            }
        }
    }

    #[test]
    fn install_is_invisible_before_activation(seed in any::<u64>(), commit in 0u64..5_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let old = cycle_schedule(&mut rng);
        let new = cycle_schedule(&mut rng);
        let mut port = QbvPort::new(to_gcl(&old), SelectionPolicy::GateOpenAtStart, 100_000_000);
        let activation = port.install_gcl(to_gcl(&new), SimTime(commit)).unwrap();
        prop_assert!(activation.as_nanos() >= commit);
        prop_assert_eq!(activation.as_nanos() % CYCLE_NS, 0);
        prop_assert!(activation.as_nanos() - commit < CYCLE_NS);
        for _ in 0..200 {
            let t = rng.random_range(0..activation.as_nanos() + 3 * CYCLE_NS);
            let expect = if t < activation.as_nanos() { &old } else { &new };
            for pcp in 0..8 {
                prop_assert_eq!(port.gate_state(SimTime(t)).is_open(pcp), oracle_open(expect, t, pcp));
            }
        }
    }

    #[test]
    fn edit_config_is_all_or_nothing(seed in any::<u64>(), bad_port in prop::bool::ANY) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sw = Switch::new("s", [(1, 100_000_000), (2, 100_000_000), (3, 100_000_000)]);
        let base: BTreeMap<u16, GateControlList> =
            (1..=3).map(|p| (p, to_gcl(&cycle_schedule(&mut rng)))).collect();
        let init = format_payload(base.iter().map(|(p, g)| (*p, g)));
        sw.netconf_handle(SimTime::ZERO, NetconfMsg::Hello);
        let reply = sw.netconf_handle(SimTime::ZERO, NetconfMsg::Rpc {
            id: 1,
            op: NetconfOp::EditConfig { datastore: RUNNING.into(), payload: init },
        });
        prop_assert_eq!(reply, Some(NetconfMsg::RpcReply { id: 1, result: RpcResult::Ok }));
        let before = sw.running_config();
        let pending_before: Vec<_> = (1..=3)
            .map(|p| sw.port(p).unwrap().pending_gcl().map(|(g, at)| (g.clone(), at)))
            .collect();

        // Two good lists and one bad: unknown port, or a cycle mismatch.
        let good = to_gcl(&cycle_schedule(&mut rng));
        let bad_line = if bad_port {
            format!("7={good}\n")
        } else {
            "3=G:15;Y:860\n".to_string()
        };
        let payload = format!("1={good}\n2={good}\n{bad_line}");
        let reply = sw.netconf_handle(SimTime(5_000_000), NetconfMsg::Rpc {
            id: 2,
            op: NetconfOp::EditConfig { datastore: RUNNING.into(), payload },
        });
        let rejected = matches!(
            reply,
            Some(NetconfMsg::RpcReply { id: 2, result: RpcResult::Error(_) })
        );
        prop_assert!(rejected);
        prop_assert_eq!(sw.running_config(), before);
        let pending_after: Vec<_> = (1..=3)
            .map(|p| sw.port(p).unwrap().pending_gcl().map(|(g, at)| (g.clone(), at)))
            .collect();
        prop_assert_eq!(pending_after, pending_before);
    }

    #[test]
    fn srp_converges(seed in any::<u64>(), latency_us in 0u64..400, ready_ms in 2u64..4) {
        let mut cfg = srp_scenario(seed);
        for ch in &mut cfg.control_channels {
            ch.latency = SimDuration::from_micros(latency_us);
        }
        cfg.srp.listeners[0].ready_at = SimTime::from_millis(ready_ms);
        let mut sim = Simulation::new(&cfg).unwrap();
        sim.run().unwrap();
        let mac = srp_stream_mac();
        let count = |name: &str| {
            sim.switch(name).unwrap().flow_table().entries().iter()
                .filter(|e| e.matcher.dst_mac == Some(mac)).count()
        };
        prop_assert_eq!((count("s1"), count("s2"), count("s3")), (1, 1, 0));
        prop_assert_eq!(sim.trace().iter().filter(|r| r.flow_id == "stream").count(), 10);
        prop_assert_eq!(sim.host("bystander").unwrap().received, 0);
        prop_assert!(sim.conservation().balanced());
    }

    #[test]
    fn periodic_flow_sees_constant_latency(seed in any::<u64>()) {
        // One flow, period a multiple of the gate cycle, no competing traffic.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = chain(&mut rng, seed);
        for sw in &mut c.cfg.switches {
            sw.launch.gcl = vec![PortGcl { port: 2, schedule: to_gcl(&cycle_schedule(&mut rng)) }];
        }
        let pcp = 7;
        c.cfg.traffic[0].pcp = pcp;
        c.cfg.traffic[0].period = SimDuration::from_millis(3);
        c.cfg.traffic[0].count = Some(5);
        c.cfg.duration = SimDuration::from_millis(40);
        let mut sim = Simulation::new(&c.cfg).unwrap();
        sim.run().unwrap();
        let lat: Vec<_> = sim.trace().iter().map(|r| r.latency()).collect();
        prop_assume!(lat.len() == 5);
        prop_assert!(lat.iter().all(|l| *l == lat[0]), "{:?}", lat);
        prop_assert!(lat[0] >= c.expected);
    }
}

//! Helpers shared by the integration tests. Everything here is written
//! against plain numbers so that it can serve as an oracle for the library.

#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use tsnsim::ethernet::{Frame, MacAddr, Payload, ETHERTYPE_DATA};
use tsnsim::qbv::{
    GateControlEntry, GateControlList, GateMask, QbvPort, Selection, SelectionPolicy,
};
use tsnsim::scenario::config::{
    ControlChannelConfig, EndpointRef, HostConfig, LinkConfig, ScenarioConfig, SwitchNodeConfig,
    TrafficConfig,
};
use tsnsim::switch::{FlowAction, FlowMatch, FlowSpec, SwitchConfig};
use tsnsim::time::{SimDuration, SimTime};

/// `(duration_ns, mask)` pairs.
pub type Schedule = Vec<(u64, u8)>;

/// Gate state by linear walk of the schedule, base time 0.
pub fn oracle_open(schedule: &[(u64, u8)], t: u64, pcp: u8) -> bool {
    let cycle: u64 = schedule.iter().map(|e| e.0).sum();
    let mut off = t % cycle;
    for &(d, m) in schedule {
        if off < d {
            return m >> pcp & 1 == 1;
        }
        off -= d;
    }
    unreachable!("offset beyond cycle")
}

/// Every gate-change instant strictly inside `(from, to)`.
pub fn boundaries(schedule: &[(u64, u8)], from: u64, to: u64) -> Vec<u64> {
    let cycle: u64 = schedule.iter().map(|e| e.0).sum();
    let mut out = Vec::new();
    let mut base = from / cycle * cycle;
    while base < to {
        let mut edge = base;
        for &(d, _) in schedule {
            edge += d;
            if edge > from && edge < to {
                out.push(edge);
            }
        }
        base += cycle;
    }
    out
}

/// Gate open for the whole of `[start, end)`.
pub fn oracle_open_throughout(schedule: &[(u64, u8)], start: u64, end: u64, pcp: u8) -> bool {
    oracle_open(schedule, start, pcp)
        && boundaries(schedule, start, end)
            .into_iter()
            .all(|b| oracle_open(schedule, b, pcp))
}

pub fn to_gcl(schedule: &[(u64, u8)]) -> GateControlList {
    GateControlList::from_entries(
        schedule
            .iter()
            .map(|&(d, m)| GateControlEntry::new(GateMask(m), SimDuration(d)))
            .collect(),
    )
    .expect("valid schedule")
}

pub fn data_frame(pcp: u8, wire_size: u32, seq: u64, at: SimTime) -> Frame {
    Frame {
        src_mac: MacAddr::local(1),
        dst_mac: MacAddr::local(2),
        ethertype: ETHERTYPE_DATA,
        pcp,
        vid: 1,
        wire_size,
        flow_id: Arc::from(format!("p{pcp}")),
        seq,
        created_at: at,
        payload: Payload::Data,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub pcp: u8,
    pub seq: u64,
    pub arrived: SimTime,
    pub start: SimTime,
    pub end: SimTime,
}

/// Feed `arrivals` (sorted by time) through a single port and collect the
/// transmissions. Frames that can never be sent stay queued.
pub fn drive_port(port: &mut QbvPort, arrivals: &[Frame], until: SimTime) -> Vec<Transmission> {
    let mut out = Vec::new();
    let mut next = 0;
    let mut now = arrivals.first().map_or(until, |f| f.created_at);
    while now <= until {
        while next < arrivals.len() && arrivals[next].created_at <= now {
            port.enqueue(arrivals[next].clone());
            next += 1;
        }
        let next_arrival = arrivals.get(next).map(|f| f.created_at);
        match port.select_next(now).expect("no model fault") {
            Selection::Transmit { frame, start, end } => {
                out.push(Transmission {
                    pcp: frame.pcp,
                    seq: frame.seq,
                    arrived: frame.created_at,
                    start,
                    end,
                });
                now = end;
            }
            Selection::WaitUntil(t) => now = next_arrival.map_or(t, |a| a.min(t)),
            Selection::Idle | Selection::Stalled => match next_arrival {
                Some(a) => now = a,
                None => break,
            },
        }
    }
    out
}

/// Random gate schedule: 1-6 entries, 1-300 µs each, random masks.
pub fn random_schedule<R: Rng>(rng: &mut R) -> Schedule {
    let n = rng.random_range(1..=6);
    (0..n)
        .map(|_| (rng.random_range(1_000..=300_000), rng.random::<u8>()))
        .collect()
}

pub fn random_policy<R: Rng>(rng: &mut R) -> SelectionPolicy {
    if rng.random_bool(0.5) {
        SelectionPolicy::GateOpenAtStart
    } else {
        SelectionPolicy::LengthAware
    }
}

/// Exact store-and-forward serialization: `bytes * 8 / bitrate` rounded to
/// the nearest nanosecond, computed independently of the library.
pub fn ser_ns(bytes: u32, bitrate: u64) -> u64 {
    let num = bytes as u128 * 8 * 1_000_000_000;
    ((num + bitrate as u128 / 2) / bitrate as u128) as u64
}

pub struct Chain {
    pub cfg: ScenarioConfig,
    pub expected: SimDuration,
}

/// host `src` → s1 → … → sN → host `dst`, gates always open, one flow.
pub fn chain<R: Rng>(rng: &mut R, seed: u64) -> Chain {
    let n = rng.random_range(1..=5usize);
    let size = rng.random_range(64..=1522u32);
    let rates = [10_000_000u64, 100_000_000, 1_000_000_000];
    let bitrates: Vec<u64> = (0..=n)
        .map(|_| rates[rng.random_range(0..rates.len())])
        .collect();
    let delays: Vec<u64> = (0..n).map(|_| rng.random_range(0..=20_000)).collect();
    let pcp = rng.random_range(0..=7u8);

    let switch = |i: usize| format!("s{}", i + 1);
    let mut links = vec![LinkConfig {
        a: EndpointRef::new("src", 1),
        b: EndpointRef::new(switch(0), 1),
        bitrate: bitrates[0],
        propagation_delay: SimDuration::ZERO,
    }];
    for i in 0..n {
        let (b, bp) = if i + 1 == n {
            ("dst".to_string(), 1)
        } else {
            (switch(i + 1), 1)
        };
        links.push(LinkConfig {
            a: EndpointRef::new(switch(i), 2),
            b: EndpointRef::new(b, bp),
            bitrate: bitrates[i + 1],
            propagation_delay: SimDuration::ZERO,
        });
    }
    let dst_mac = MacAddr::local(2);
    let switches = (0..n)
        .map(|i| SwitchNodeConfig {
            name: switch(i),
            launch: SwitchConfig {
                processing_delay: SimDuration(delays[i]),
                flows: vec![FlowSpec {
                    priority: 1,
                    matcher: FlowMatch::dst(dst_mac),
                    actions: vec![FlowAction::Output(2)],
                }],
                ..SwitchConfig::default()
            },
        })
        .collect();
    let expected = SimDuration(
        bitrates.iter().map(|&b| ser_ns(size, b)).sum::<u64>() + delays.iter().sum::<u64>(),
    );
    let cfg = ScenarioConfig {
        name: "chain".into(),
        description: String::new(),
        seed,
        duration: SimDuration::from_millis(20),
        controller: "controller".into(),
        hosts: ["src", "dst"]
            .into_iter()
            .map(|h| HostConfig {
                name: h.into(),
                mac: None,
            })
            .collect(),
        switches,
        links,
        control_channels: (0..n)
            .map(|i| ControlChannelConfig {
                switch: switch(i),
                latency: SimDuration::ZERO,
            })
            .collect(),
        traffic: vec![TrafficConfig {
            flow_id: "f".into(),
            host: "src".into(),
            pcp,
            vid: 1,
            wire_size: size,
            period: SimDuration::from_millis(3),
            jitter_stddev: SimDuration::ZERO,
            start_at: SimTime(rng.random_range(0..1_000_000)),
            offset: SimDuration::ZERO,
            dst: "dst".into(),
            stop_at: None,
            count: Some(4),
        }],
        timeline: Vec::new(),
        srp: Default::default(),
    };
    Chain { cfg, expected }
}

//! Per-flow latency statistics over send-time intervals.

use std::collections::BTreeMap;
use std::fmt;

use crate::scenario::LatencyRecord;
use crate::time::{SimDuration, SimTime};

/// Cut points used when none are given: the case-study reconfiguration
/// instants.
pub fn default_cuts() -> Vec<SimTime> {
    (1..=4).map(|i| SimTime::from_secs(2 * i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyStats {
    pub min: SimDuration,
    /// Mean rounded to the nearest nanosecond.
    pub mean: SimDuration,
    pub max: SimDuration,
}

impl LatencyStats {
    pub fn spread(&self) -> SimDuration {
        self.max - self.min
    }
}

/// Frames of one flow whose send time lies in `[start, end)`; `end = None`
/// means unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalStats {
    pub start: SimTime,
    pub end: Option<SimTime>,
    pub count: u64,
    /// Absent for an empty interval.
    pub stats: Option<LatencyStats>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowReport {
    pub flow_id: String,
    pub intervals: Vec<IntervalStats>,
}

impl FlowReport {
    /// The interval starting at `start`, if it is one of the cut points.
    pub fn interval(&self, start: SimTime) -> Option<&IntervalStats> {
        self.intervals.iter().find(|i| i.start == start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub flows: Vec<FlowReport>,
}

impl Report {
    pub fn flow(&self, flow_id: &str) -> Option<&FlowReport> {
        self.flows.iter().find(|f| f.flow_id == flow_id)
    }
}

#[derive(Default)]
struct Acc {
    count: u64,
    sum: u128,
    min: u64,
    max: u64,
}

impl Acc {
    fn add(&mut self, ns: u64) {
        if self.count == 0 {
            self.min = ns;
            self.max = ns;
        } else {
            self.min = self.min.min(ns);
            self.max = self.max.max(ns);
        }
        self.count += 1;
        self.sum += ns as u128;
    }

    fn stats(&self) -> Option<LatencyStats> {
        (self.count > 0).then(|| LatencyStats {
            min: SimDuration(self.min),
            mean: SimDuration(((self.sum + self.count as u128 / 2) / self.count as u128) as u64),
            max: SimDuration(self.max),
        })
    }
}

/// Partition every flow's records by send time at `cuts` (sorted and
/// deduplicated here). The first interval starts at 0, the last is open.
pub fn report(records: &[LatencyRecord], cuts: &[SimTime]) -> Report {
    let mut cuts: Vec<SimTime> = cuts
        .iter()
        .copied()
        .filter(|c| *c > SimTime::ZERO)
        .collect();
    cuts.sort();
    cuts.dedup();
    let starts: Vec<SimTime> = std::iter::once(SimTime::ZERO)
        .chain(cuts.iter().copied())
        .collect();

    let mut flows: BTreeMap<&str, Vec<Acc>> = BTreeMap::new();
    for r in records {
        let accs = flows
            .entry(r.flow_id.as_str())
            .or_insert_with(|| starts.iter().map(|_| Acc::default()).collect());
        let idx = cuts.partition_point(|c| *c <= r.send_time);
        accs[idx].add(r.latency().as_nanos());
    }

    Report {
        flows: flows
            .into_iter()
            .map(|(flow_id, accs)| FlowReport {
                flow_id: flow_id.to_string(),
                intervals: accs
                    .iter()
                    .enumerate()
                    .map(|(i, acc)| IntervalStats {
                        start: starts[i],
                        end: starts.get(i + 1).copied(),
                        count: acc.count,
                        stats: acc.stats(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Plain-text table, one line per flow and interval. Latencies in µs.
impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:>16} {:>8} {:>12} {:>12} {:>12}",
            "flow", "interval", "count", "min_us", "mean_us", "max_us"
        )?;
        for flow in &self.flows {
            for i in &flow.intervals {
                let range = match i.end {
                    Some(end) => format!("[{},{})", i.start, end),
                    None => format!("[{},end)", i.start),
                };
                match i.stats {
                    Some(s) => writeln!(
                        f,
                        "{:<12} {:>16} {:>8} {:>12.3} {:>12.3} {:>12.3}",
                        flow.flow_id,
                        range,
                        i.count,
                        s.min.as_micros_f64(),
                        s.mean.as_micros_f64(),
                        s.max.as_micros_f64()
                    )?,
                    None => writeln!(
                        f,
                        "{:<12} {:>16} {:>8} {:>12} {:>12} {:>12}",
                        flow.flow_id, range, 0, "-", "-", "-"
                    )?,
                }
            }
        }
        Ok(())
    }
}

/// Parse `2s,4s,6s,8s`.
pub fn parse_cuts(text: &str) -> Result<Vec<SimTime>, crate::error::ParseError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

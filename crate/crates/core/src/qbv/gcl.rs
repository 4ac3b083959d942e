use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GclError, ParseError};
use crate::time::{format_scaled, parse_scaled, SimDuration, SimTime, NANOS_PER_MICRO};

/// Per-priority gate states; bit `p` set means priority `p` may transmit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GateMask(pub u8);

impl GateMask {
    /// Red phase: every gate closed.
    pub const RED: GateMask = GateMask(0x00);
    /// Green phase: priorities 6 and 7.
    pub const GREEN: GateMask = GateMask(0b1100_0000);
    /// Yellow phase: priorities 0 to 5.
    pub const YELLOW: GateMask = GateMask(0b0011_1111);
    pub const ALL_OPEN: GateMask = GateMask(0xFF);

    pub fn is_open(self, pcp: u8) -> bool {
        self.0 & (1 << pcp) != 0
    }
}

impl fmt::Display for GateMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#010b}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateControlEntry {
    pub duration: SimDuration,
    pub gates: GateMask,
}

impl GateControlEntry {
    pub fn new(gates: GateMask, duration: SimDuration) -> Self {
        GateControlEntry { duration, gates }
    }
}

/// A cyclic gate schedule. Entry intervals are half-open: an entry spanning
/// `[start, end)` governs `start` but not `end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateControlList {
    entries: Vec<GateControlEntry>,
    /// Offset of each entry's end within the cycle.
    ends: Vec<SimDuration>,
    cycle: SimDuration,
    base_time: SimTime,
}

impl GateControlList {
    /// Build a list whose durations must add up to `cycle`.
    pub fn new(
        entries: Vec<GateControlEntry>,
        cycle: SimDuration,
        base_time: SimTime,
    ) -> Result<Self, GclError> {
        if entries.is_empty() {
            return Err(GclError::Empty);
        }
        if let Some(index) = entries.iter().position(|e| e.duration.is_zero()) {
            return Err(GclError::ZeroDuration { index });
        }
        let mut ends = Vec::with_capacity(entries.len());
        let mut acc = SimDuration::ZERO;
        for e in &entries {
            acc += e.duration;
            ends.push(acc);
        }
        if acc != cycle {
            return Err(GclError::CycleMismatch { sum: acc, cycle });
        }
        Ok(GateControlList {
            entries,
            ends,
            cycle,
            base_time,
        })
    }

    /// Build a list whose cycle is the sum of its durations.
    pub fn from_entries(entries: Vec<GateControlEntry>) -> Result<Self, GclError> {
        let cycle = entries.iter().map(|e| e.duration).sum();
        Self::new(entries, cycle, SimTime::ZERO)
    }

    /// A single always-open entry; used on host NICs.
    pub fn always_open(cycle: SimDuration) -> Self {
        Self::from_entries(vec![GateControlEntry::new(GateMask::ALL_OPEN, cycle)])
            .expect("non-empty, positive cycle")
    }

    pub fn entries(&self) -> &[GateControlEntry] {
        &self.entries
    }

    pub fn cycle(&self) -> SimDuration {
        self.cycle
    }

    pub fn base_time(&self) -> SimTime {
        self.base_time
    }

    pub fn with_base_time(mut self, base_time: SimTime) -> Self {
        self.base_time = base_time;
        self
    }

    /// Check that this list fits a port whose cycle is `cycle`.
    pub fn check_cycle(&self, cycle: SimDuration) -> Result<(), GclError> {
        if self.cycle != cycle {
            return Err(GclError::CycleMismatch {
                sum: self.cycle,
                cycle,
            });
        }
        Ok(())
    }

    /// Gate mask in force at `t`. Times before `base_time` are treated as
    /// `base_time`.
    pub fn gate_state(&self, t: SimTime) -> GateMask {
        self.segment_at(t).2
    }

    /// The entry containing `t` as an absolute `[start, end)` interval.
    pub fn segment_at(&self, t: SimTime) -> (SimTime, SimTime, GateMask) {
        let t = t.max(self.base_time);
        let since = t.as_nanos() - self.base_time.as_nanos();
        let cycle_start = SimTime(t.as_nanos() - since % self.cycle.as_nanos());
        let offset = SimDuration(since % self.cycle.as_nanos());
        let idx = self.ends.partition_point(|end| *end <= offset);
        let start = if idx == 0 {
            SimDuration::ZERO
        } else {
            self.ends[idx - 1]
        };
        (
            cycle_start + start,
            cycle_start + self.ends[idx],
            self.entries[idx].gates,
        )
    }

    /// First cycle boundary at or after `t`.
    pub fn next_cycle_boundary(&self, t: SimTime) -> SimTime {
        if t <= self.base_time {
            return self.base_time;
        }
        let since = t.as_nanos() - self.base_time.as_nanos();
        let cycle = self.cycle.as_nanos();
        let cycles = since.div_ceil(cycle);
        SimTime(self.base_time.as_nanos() + cycles * cycle)
    }

    /// Parse the textual form, e.g. `R:10;G:15;Y:860;R:115`.
    pub fn parse(text: &str) -> Result<Self, GclError> {
        let mut entries = Vec::new();
        for token in text.split(';') {
            let token = token.trim();
            if token.is_empty() {
                return Err(ParseError::new(format!("empty entry in `{text}`")).into());
            }
            let (phase, duration) = token
                .split_once(':')
                .ok_or_else(|| ParseError::new(format!("entry `{token}` lacks `:`")))?;
            let gates = match phase.trim() {
                "G" => GateMask::GREEN,
                "Y" => GateMask::YELLOW,
                "R" => GateMask::RED,
                other => {
                    let hex = other
                        .strip_prefix('M')
                        .filter(|h| h.len() == 2)
                        .ok_or_else(|| ParseError::new(format!("unknown phase `{other}`")))?;
                    GateMask(
                        u8::from_str_radix(hex, 16)
                            .map_err(|_| ParseError::new(format!("bad gate mask `{other}`")))?,
                    )
                }
            };
            let ns = parse_scaled(duration.trim(), NANOS_PER_MICRO).ok_or_else(|| {
                ParseError::new(format!("bad duration `{duration}` (microseconds)"))
            })?;
            entries.push(GateControlEntry::new(gates, SimDuration(ns)));
        }
        Self::from_entries(entries)
    }
}

/// Canonical textual form. Phase letters are used whenever the mask is one of
/// the three phases; anything else is written as `M<hex>`.
impl fmt::Display for GateControlList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            match e.gates {
                GateMask::GREEN => f.write_str("G")?,
                GateMask::YELLOW => f.write_str("Y")?,
                GateMask::RED => f.write_str("R")?,
                GateMask(m) => write!(f, "M{m:02X}")?,
            }
            write!(
                f,
                ":{}",
                format_scaled(e.duration.as_nanos(), NANOS_PER_MICRO)
            )?;
        }
        Ok(())
    }
}

impl FromStr for GateControlList {
    type Err = GclError;
    fn from_str(s: &str) -> Result<Self, GclError> {
        Self::parse(s)
    }
}

/// Serialized as its text form; the base time is not part of it.
impl Serialize for GateControlList {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GateControlList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Self::parse(&text).map_err(serde::de::Error::custom)
    }
}

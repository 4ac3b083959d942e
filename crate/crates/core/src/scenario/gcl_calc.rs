//! Three-phase schedule arithmetic.
//!
//! The red guard covers one maximum-size frame, the green window one
//! high-priority frame, each plus a safety margin; yellow takes the rest of
//! the cycle.

use thiserror::Error;

use crate::ethernet::serialization_time;
use crate::qbv::{GateControlEntry, GateControlList, GateMask};
use crate::time::SimDuration;

/// Granularity of the rounded variant.
pub const PAPER_ROUNDING_STEP: SimDuration = SimDuration::from_micros(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("infeasible schedule: red {red} and green {green} leave no yellow time in a {cycle} cycle")]
pub struct InfeasibleSchedule {
    pub red: SimDuration,
    pub green: SimDuration,
    pub cycle: SimDuration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Serialization times used as computed.
    #[default]
    Exact,
    /// Serialization times rounded to the nearest 5 µs before the margin is
    /// added, giving whole-µs phases (125/15/860 µs for 1522/122 B at 100 Mbit/s).
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GclCalcInput {
    pub max_frame: u32,
    pub hp_frame: u32,
    pub bitrate: u64,
    pub cycle: SimDuration,
    pub margin: SimDuration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseSet {
    pub t_red: SimDuration,
    pub t_green: SimDuration,
    pub t_yellow: SimDuration,
    pub cycle: SimDuration,
}

fn round_to_step(d: SimDuration, step: SimDuration) -> SimDuration {
    SimDuration((d.as_nanos() + step.as_nanos() / 2) / step.as_nanos() * step.as_nanos())
}

pub fn gcl_calc(input: &GclCalcInput, rounding: Rounding) -> Result<PhaseSet, InfeasibleSchedule> {
    let mut tx_max = serialization_time(input.max_frame, input.bitrate);
    let mut tx_hp = serialization_time(input.hp_frame, input.bitrate);
    if rounding == Rounding::Paper {
        tx_max = round_to_step(tx_max, PAPER_ROUNDING_STEP);
        tx_hp = round_to_step(tx_hp, PAPER_ROUNDING_STEP);
    }
    let t_red = tx_max + input.margin;
    let t_green = tx_hp + input.margin;
    let t_yellow = input
        .cycle
        .checked_sub(t_red + t_green)
        .filter(|y| !y.is_zero())
        .ok_or(InfeasibleSchedule {
            red: t_red,
            green: t_green,
            cycle: input.cycle,
        })?;
    Ok(PhaseSet {
        t_red,
        t_green,
        t_yellow,
        cycle: input.cycle,
    })
}

impl PhaseSet {
    /// `G;Y;R`, the layout used at start-up.
    pub fn to_gcl(&self) -> GateControlList {
        self.to_gcl_shifted(SimDuration::ZERO)
            .expect("an unshifted list always fits")
    }

    /// Move the green window `shift` into the cycle by borrowing that much
    /// time from the red guard: `R:shift;G;Y;R:red-shift`. `None` if the
    /// guard is not longer than `shift`.
    pub fn to_gcl_shifted(&self, shift: SimDuration) -> Option<GateControlList> {
        let rest = self.t_red.checked_sub(shift).filter(|r| !r.is_zero())?;
        let mut entries = Vec::with_capacity(4);
        if !shift.is_zero() {
            entries.push(GateControlEntry::new(GateMask::RED, shift));
        }
        entries.push(GateControlEntry::new(GateMask::GREEN, self.t_green));
        entries.push(GateControlEntry::new(GateMask::YELLOW, self.t_yellow));
        entries.push(GateControlEntry::new(GateMask::RED, rest));
        Some(GateControlList::from_entries(entries).expect("phases sum to the cycle"))
    }
}

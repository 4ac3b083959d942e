use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{GclError, SimError};
use crate::ethernet::{serialization_time, Frame};
use crate::qbv::gcl::{GateControlList, GateMask};
use crate::time::{SimDuration, SimTime};

pub const NUM_PRIORITIES: usize = 8;

/// How transmission selection treats a gate that closes mid-frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionPolicy {
    /// A frame may start whenever its gate is open; it is allowed to overrun
    /// the gate's closing edge.
    #[default]
    GateOpenAtStart,
    /// A frame may only start if its gate stays open for its whole
    /// serialization time.
    LengthAware,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    Transmit {
        frame: Frame,
        start: SimTime,
        end: SimTime,
    },
    /// Nothing can go now; call again at this instant.
    WaitUntil(SimTime),
    /// All queues are empty.
    Idle,
    /// Frames are queued but their gates never open (long enough).
    Stalled,
}

#[derive(Debug, Clone)]
struct PendingGcl {
    list: GateControlList,
    activation: SimTime,
}

/// Egress port with eight strict-priority FIFO queues behind 802.1Qbv gates.
#[derive(Debug, Clone)]
pub struct QbvPort {
    queues: [VecDeque<Frame>; NUM_PRIORITIES],
    active: GateControlList,
    pending: Option<PendingGcl>,
    busy_until: SimTime,
    policy: SelectionPolicy,
    bitrate: u64,
    cycle: SimDuration,
}

impl QbvPort {
    /// The port's cycle is fixed to that of `gcl`; later lists must match it.
    pub fn new(gcl: GateControlList, policy: SelectionPolicy, bitrate: u64) -> Self {
        assert!(bitrate > 0, "bitrate must be positive");
        QbvPort {
            queues: Default::default(),
            cycle: gcl.cycle(),
            active: gcl,
            pending: None,
            busy_until: SimTime::ZERO,
            policy,
            bitrate,
        }
    }

    pub fn policy(&self) -> SelectionPolicy {
        self.policy
    }

    pub fn set_policy(&mut self, policy: SelectionPolicy) {
        self.policy = policy;
    }

    pub fn bitrate(&self) -> u64 {
        self.bitrate
    }

    pub fn cycle(&self) -> SimDuration {
        self.cycle
    }

    pub fn busy_until(&self) -> SimTime {
        self.busy_until
    }

    pub fn active_gcl(&self) -> &GateControlList {
        &self.active
    }

    pub fn pending_gcl(&self) -> Option<(&GateControlList, SimTime)> {
        self.pending.as_ref().map(|p| (&p.list, p.activation))
    }

    /// The list that will be in force once every pending change has activated.
    pub fn latest_gcl(&self) -> &GateControlList {
        self.pending.as_ref().map_or(&self.active, |p| &p.list)
    }

    pub fn enqueue(&mut self, frame: Frame) {
        let pcp = frame.pcp as usize;
        self.queues[pcp].push_back(frame);
    }

    pub fn queue_len(&self, pcp: u8) -> usize {
        self.queues[pcp as usize].len()
    }

    pub fn queued(&self) -> usize {
        self.queues.iter().map(VecDeque::len).sum()
    }

    /// Queued frames, highest priority first, FIFO within a priority.
    pub fn frames(&self) -> impl Iterator<Item = &Frame> {
        self.queues.iter().rev().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.queues.iter().all(VecDeque::is_empty)
    }

    fn list_at(&self, t: SimTime) -> &GateControlList {
        match &self.pending {
            Some(p) if t >= p.activation => &p.list,
            _ => &self.active,
        }
    }

    /// Gate mask in force at `t`, honouring a pending list switch.
    pub fn gate_state(&self, t: SimTime) -> GateMask {
        self.list_at(t).gate_state(t)
    }

    /// Schedule `new` to replace the running list at the first cycle
    /// boundary at or after `commit_at`. Returns the activation instant.
    /// A list that does not fit the port's cycle is rejected and nothing
    /// changes. A second install before activation replaces the first.
    pub fn install_gcl(
        &mut self,
        new: GateControlList,
        commit_at: SimTime,
    ) -> Result<SimTime, GclError> {
        new.check_cycle(self.cycle)?;
        let activation = self.list_at(commit_at).next_cycle_boundary(commit_at);
        self.pending = Some(PendingGcl {
            list: new.with_base_time(activation),
            activation,
        });
        Ok(activation)
    }

    fn promote(&mut self, now: SimTime) {
        if self.pending.as_ref().is_some_and(|p| p.activation <= now) {
            let p = self.pending.take().expect("checked");
            self.active = p.list;
        }
    }

    /// The gate segment containing `t`, clipped at a pending activation.
    fn segment(&self, t: SimTime) -> (SimTime, SimTime, GateMask) {
        let (start, mut end, mask) = self.list_at(t).segment_at(t);
        if let Some(p) = &self.pending {
            if t < p.activation && p.activation < end {
                end = p.activation;
            }
        }
        (start, end, mask)
    }

    /// Past this instant the schedule is strictly periodic with the latest list.
    fn horizon(&self, t: SimTime) -> SimTime {
        let stable = match &self.pending {
            Some(p) => p.activation.max(t),
            None => t,
        };
        stable + self.cycle
    }

    /// End of the open run of `pcp`'s gate that contains `t`; `None` if the
    /// gate never closes again. Expects the gate to be open at `t`.
    fn open_until(&self, pcp: u8, t: SimTime) -> Option<SimTime> {
        let horizon = self.horizon(t);
        let mut cur = t;
        loop {
            let (_, end, mask) = self.segment(cur);
            if !mask.is_open(pcp) {
                return Some(cur);
            }
            if end >= horizon {
                return None;
            }
            cur = end;
        }
    }

    /// Earliest instant after `now` at which a `pcp` frame needing `need` on
    /// the wire may start under the current policy.
    fn next_start(&self, pcp: u8, now: SimTime, need: SimDuration) -> Option<SimTime> {
        let limit = self.horizon(now) + self.cycle;
        let mut cur = now;
        if self.gate_state(now).is_open(pcp) {
            cur = self.open_until(pcp, now)?;
        }
        while cur < limit {
            let (_, end, mask) = self.segment(cur);
            if !mask.is_open(pcp) {
                cur = end;
                continue;
            }
            match self.policy {
                SelectionPolicy::GateOpenAtStart => return Some(cur),
                SelectionPolicy::LengthAware => match self.open_until(pcp, cur) {
                    None => return Some(cur),
                    Some(close) if close - cur >= need => return Some(cur),
                    Some(close) => cur = close,
                },
            }
        }
        None
    }

    fn eligible(&self, pcp: u8, now: SimTime, need: SimDuration) -> bool {
        if !self.gate_state(now).is_open(pcp) {
            return false;
        }
        match self.policy {
            SelectionPolicy::GateOpenAtStart => true,
            SelectionPolicy::LengthAware => self
                .open_until(pcp, now)
                .is_none_or(|close| close - now >= need),
        }
    }

    /// Strict-priority transmission selection at `now`.
    ///
    /// On `Transmit` the frame is dequeued and the port is busy until `end`.
    pub fn select_next(&mut self, now: SimTime) -> Result<Selection, SimError> {
        if now < self.busy_until {
            return Ok(Selection::WaitUntil(self.busy_until));
        }
        self.promote(now);
        if self.is_empty() {
            return Ok(Selection::Idle);
        }
        for pcp in (0..NUM_PRIORITIES as u8).rev() {
            let Some(head) = self.queues[pcp as usize].front() else {
                continue;
            };
            let need = serialization_time(head.wire_size, self.bitrate);
            if self.eligible(pcp, now, need) {
                let frame = self.queues[pcp as usize].pop_front().expect("non-empty");
                if !self.gate_state(now).is_open(pcp) {
                    return Err(SimError::ModelFault(format!(
                        "pcp {pcp} started at {now} with its gate closed"
                    )));
                }
                let end = now + need;
                self.busy_until = end;
                return Ok(Selection::Transmit {
                    frame,
                    start: now,
                    end,
                });
            }
        }
        let wake = (0..NUM_PRIORITIES as u8)
            .filter_map(|pcp| {
                let head = self.queues[pcp as usize].front()?;
                let need = serialization_time(head.wire_size, self.bitrate);
                self.next_start(pcp, now, need)
            })
            .min();
        Ok(match wake {
            Some(t) => Selection::WaitUntil(t),
            None => Selection::Stalled,
        })
    }
}

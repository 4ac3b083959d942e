use serde::{Deserialize, Serialize};

use crate::qbv::GateControlList;
use crate::time::SimTime;

/// One scheduled controller action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum TimelineAction {
    /// Send `edit-config` writing `schedule` to each port in `ports`.
    EditGcl {
        switch: String,
        ports: Vec<u16>,
        schedule: GateControlList,
    },
    /// Make the switch answer its next `edit-config` with an error.
    InjectEditFailure { switch: String },
    /// Send `get-config`; the reply lands in the controller's RPC record.
    GetConfig { switch: String },
}

impl TimelineAction {
    pub fn switch(&self) -> &str {
        match self {
            TimelineAction::EditGcl { switch, .. }
            | TimelineAction::InjectEditFailure { switch }
            | TimelineAction::GetConfig { switch } => switch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub at: SimTime,
    #[serde(flatten)]
    pub action: TimelineAction,
}

/// Timeline entries in non-decreasing time order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ControlTimeline {
    entries: Vec<TimelineEntry>,
}

impl ControlTimeline {
    /// Fails with the first out-of-order pair `(earlier, later)`.
    pub fn new(entries: Vec<TimelineEntry>) -> Result<Self, (SimTime, SimTime)> {
        if let Some(w) = entries.windows(2).find(|w| w[1].at < w[0].at) {
            return Err((w[0].at, w[1].at));
        }
        Ok(ControlTimeline { entries })
    }

    pub fn entries(&self) -> &[TimelineEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

//! 802.1Qbv egress stage: gate control lists and the time-aware port.

mod gcl;
mod port;

pub use gcl::{GateControlEntry, GateControlList, GateMask};
pub use port::{QbvPort, Selection, SelectionPolicy, NUM_PRIORITIES};

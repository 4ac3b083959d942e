//! Deterministic discrete-event simulation of software-defined real-time
//! Ethernet: 802.1Qbv gating, flow-table forwarding, NetConf-driven schedule
//! updates and SRP stream registration.

pub mod control;
pub mod engine;
pub mod error;
pub mod ethernet;
pub mod qbv;
pub mod rng;
pub mod scenario;
pub mod srp;
pub mod switch;
pub mod time;

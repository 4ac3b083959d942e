//! Experiment description, traffic generation, latency tracing and the
//! built-in scenarios.

pub mod calibrate;
pub mod case_study;
pub mod config;
pub mod gcl_calc;
pub mod network;
pub mod report;
pub mod trace;

pub use config::ScenarioConfig;
pub use gcl_calc::{gcl_calc, GclCalcInput, InfeasibleSchedule, PhaseSet, Rounding};
pub use network::{
    run, Conservation, NetCounters, NodeId, PortId, RunError, RunOutput, Simulation, TxRecord,
};
pub use report::{report, IntervalStats, LatencyStats, Report};
pub use trace::{read_trace, write_trace, LatencyRecord};

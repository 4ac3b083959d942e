//! Processing-delay sweep for the case study.
//!
//! Each candidate delay is run through the full ten-second case study and
//! scored against the latency phases. Runs are independent and execute in
//! parallel.

use rayon::prelude::*;

use crate::scenario::case_study::{case_study, evaluate, CaseStudyChecks, CaseStudyParams};
use crate::scenario::network::{run, RunError};
use crate::scenario::report::{default_cuts, report};
use crate::time::SimDuration;

/// The coarse sweep: 0, 2, 4, 6 and 8 µs.
pub fn coarse_grid() -> Vec<SimDuration> {
    (0..=4).map(|i| SimDuration::from_micros(2 * i)).collect()
}

/// 0 to 8 µs in 0.2 µs steps.
pub fn fine_grid() -> Vec<SimDuration> {
    (0..=40).map(|i| SimDuration(200 * i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalibrationPoint {
    pub processing_delay: SimDuration,
    pub checks: CaseStudyChecks,
    /// Host 3 (min, max) latency per two-second epoch.
    pub host3: Vec<Option<(SimDuration, SimDuration)>>,
    /// Host 4 (min, max) latency in [4 s, 6 s).
    pub host4: Option<(SimDuration, SimDuration)>,
}

pub fn calibrate(
    base: &CaseStudyParams,
    delays: &[SimDuration],
) -> Result<Vec<CalibrationPoint>, RunError> {
    delays
        .par_iter()
        .map(|&d| {
            let params = CaseStudyParams {
                processing_delay: d,
                ..*base
            };
            let out = run(&case_study(&params))?;
            let r = report(&out.trace, &default_cuts());
            let span = |flow: &str, idx: usize| {
                r.flow(flow)
                    .and_then(|f| f.intervals.get(idx))
                    .and_then(|i| i.stats)
                    .map(|s| (s.min, s.max))
            };
            Ok(CalibrationPoint {
                processing_delay: d,
                checks: evaluate(&out),
                host3: (0..5).map(|i| span("host3", i)).collect(),
                host4: span("host4", 2),
            })
        })
        .collect()
}

/// Delays that pass every check.
pub fn passing(points: &[CalibrationPoint]) -> Vec<SimDuration> {
    points
        .iter()
        .filter(|p| p.checks.all())
        .map(|p| p.processing_delay)
        .collect()
}

/// One line per point: delay, per-check verdicts, host 3 spans.
pub fn format_points(points: &[CalibrationPoint]) -> String {
    let mut out = String::from(
        "delay_us plateau reconf host4 slot_miss partial recovered all  host3_[4,6)_us\n",
    );
    let mark = |b: bool| if b { "pass" } else { "FAIL" };
    for p in points {
        let c = &p.checks;
        let h3 = p
            .host3
            .get(2)
            .copied()
            .flatten()
            .map_or("-".to_string(), |(lo, hi)| {
                format!("{:.2}..{:.2}", lo.as_micros_f64(), hi.as_micros_f64())
            });
        out.push_str(&format!(
            "{:>8.1} {:>7} {:>6} {:>5} {:>9} {:>7} {:>9} {:>4}  {}\n",
            p.processing_delay.as_micros_f64(),
            mark(c.plateau),
            mark(c.reconfigured),
            mark(c.host4_nominal),
            mark(c.slot_miss),
            mark(c.partial_failure),
            mark(c.recovered),
            mark(c.all()),
            h3
        ));
    }
    out
}

use tsnsim::scenario::calibrate::{calibrate, coarse_grid, fine_grid, passing};
use tsnsim::scenario::case_study::{CaseStudyParams, CALIBRATED_PROCESSING_DELAY};
use tsnsim::time::SimDuration;

#[test]
fn fine_sweep_has_a_single_passing_delay() {
    let points = calibrate(&CaseStudyParams::default(), &fine_grid()).unwrap();
    assert_eq!(points.len(), 41);
    assert_eq!(passing(&points), [CALIBRATED_PROCESSING_DELAY]);
}

#[test]
fn coarse_sweep_passes_nowhere() {
    let points = calibrate(&CaseStudyParams::default(), &coarse_grid()).unwrap();
    assert!(passing(&points).is_empty());
    let at = |us: u64| {
        points
            .iter()
            .find(|p| p.processing_delay == SimDuration::from_micros(us))
            .unwrap()
    };
    // Below 3 µs host 3 still fits its green window after the 6 s edit.
    assert!(!at(0).checks.slot_miss);
    assert!(!at(2).checks.slot_miss);
    // 4 µs misses the slot but host 4 and the recovery fail.
    assert!(at(4).checks.slot_miss);
    assert!(!at(4).checks.host4_nominal);
    assert!(!at(4).checks.recovered);
    // 6 µs and above break the initial plateau.
    assert!(!at(6).checks.plateau);
    assert!(!at(8).checks.plateau);
}

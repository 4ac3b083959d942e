//! Deterministic discrete-event core.
//!
//! Events are totally ordered by `(fire_at, seq)`, where `seq` is a per-engine
//! insertion counter. Two events scheduled for the same instant therefore run
//! in the order they were scheduled, which makes simultaneous arrivals on
//! different ports reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::EngineError;
use crate::time::{SimDuration, SimTime};

#[derive(Debug)]
pub struct Event<P> {
    pub fire_at: SimTime,
    pub seq: u64,
    pub payload: P,
}

impl<P> PartialEq for Event<P> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}

impl<P> Eq for Event<P> {}

impl<P> PartialOrd for Event<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so that `BinaryHeap` (a max-heap) pops the earliest event.
impl<P> Ord for Event<P> {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.fire_at, other.seq).cmp(&(self.fire_at, self.seq))
    }
}

/// Something that reacts to events. Handlers may schedule further events
/// through the engine they are handed.
pub trait Handler<P> {
    type Error: From<EngineError>;

    fn handle(&mut self, engine: &mut Engine<P>, event: Event<P>) -> Result<(), Self::Error>;
}

#[derive(Debug)]
pub struct Engine<P> {
    now: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Event<P>>,
    executed: u64,
}

impl<P> Default for Engine<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Engine<P> {
    pub fn new() -> Self {
        Engine {
            now: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
            executed: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn executed(&self) -> u64 {
        self.executed
    }

    /// Queue `payload` to fire at `fire_at`. Returns the event's sequence number.
    pub fn schedule(&mut self, fire_at: SimTime, payload: P) -> Result<u64, EngineError> {
        if fire_at < self.now {
            return Err(EngineError::ScheduleInPast {
                now: self.now,
                fire_at,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Event {
            fire_at,
            seq,
            payload,
        });
        Ok(seq)
    }

    pub fn schedule_in(&mut self, delay: SimDuration, payload: P) -> Result<u64, EngineError> {
        self.schedule(self.now + delay, payload)
    }

    /// Execute every event with `fire_at <= t_end`, then leave the clock at
    /// `t_end`. Calling this with a bound at or before the current clock
    /// does nothing.
    pub fn run_until<H>(&mut self, t_end: SimTime, handler: &mut H) -> Result<(), H::Error>
    where
        H: Handler<P>,
    {
        while self.queue.peek().is_some_and(|e| e.fire_at <= t_end) {
            let event = self.queue.pop().expect("peeked");
            debug_assert!(event.fire_at >= self.now);
            self.now = event.fire_at;
            self.executed += 1;
            handler.handle(self, event)?;
        }
        if t_end > self.now {
            self.now = t_end;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Default)]
    struct Recorder {
        seen: Vec<(SimTime, u64, &'static str)>,
    }

    impl Handler<&'static str> for Recorder {
        type Error = EngineError;

        fn handle(
            &mut self,
            engine: &mut Engine<&'static str>,
            event: Event<&'static str>,
        ) -> Result<(), EngineError> {
            self.seen.push((event.fire_at, event.seq, event.payload));
            if event.payload == "spawn" {
                engine.schedule(engine.now(), "child")?;
            }
            Ok(())
        }
    }

    #[test]
    fn same_instant_runs_in_insertion_order() {
        let mut engine = Engine::new();
        let mut rec = Recorder::default();
        engine.schedule(SimTime(5), "b").unwrap();
        engine.schedule(SimTime(5), "c").unwrap();
        engine.schedule(SimTime(4), "a").unwrap();
        engine.run_until(SimTime(10), &mut rec).unwrap();
        let order: Vec<_> = rec.seen.iter().map(|s| s.2).collect();
        assert_eq!(order, ["a", "b", "c"]);
    }

    #[test]
    fn now_runs_before_now_plus_one() {
        let mut engine = Engine::new();
        let mut rec = Recorder::default();
        engine.schedule(SimTime(1), "later").unwrap();
        engine.schedule(SimTime(0), "now").unwrap();
        engine.run_until(SimTime(1), &mut rec).unwrap();
        assert_eq!(rec.seen[0].2, "now");
        assert_eq!(rec.seen[1].2, "later");
    }

    #[test]
    fn scheduling_in_the_past_fails() {
        let mut engine: Engine<&str> = Engine::new();
        engine
            .run_until(SimTime(100), &mut Recorder::default())
            .unwrap();
        let err = engine.schedule(SimTime(99), "x").unwrap_err();
        assert_eq!(
            err,
            EngineError::ScheduleInPast {
                now: SimTime(100),
                fire_at: SimTime(99)
            }
        );
        assert!(engine.schedule(SimTime(100), "x").is_ok());
    }

    #[test]
    fn empty_run_advances_clock() {
        let mut engine: Engine<&str> = Engine::new();
        let mut rec = Recorder::default();
        engine.run_until(SimTime::from_secs(10), &mut rec).unwrap();
        assert_eq!(engine.now(), SimTime::from_secs(10));
        assert!(rec.seen.is_empty());
    }

    #[test]
    fn repeated_run_until_is_a_no_op() {
        let mut engine = Engine::new();
        let mut rec = Recorder::default();
        engine.schedule(SimTime(3), "a").unwrap();
        engine.schedule(SimTime(30), "b").unwrap();
        engine.run_until(SimTime(10), &mut rec).unwrap();
        engine.run_until(SimTime(10), &mut rec).unwrap();
        assert_eq!(rec.seen.len(), 1);
        assert_eq!(engine.now(), SimTime(10));
        assert_eq!(engine.pending(), 1);
    }

    #[test]
    fn same_time_children_run_within_the_bound() {
        let mut engine = Engine::new();
        let mut rec = Recorder::default();
        engine.schedule(SimTime(10), "spawn").unwrap();
        engine.run_until(SimTime(10), &mut rec).unwrap();
        assert_eq!(rec.seen.len(), 2);
        assert_eq!(rec.seen[1].2, "child");
    }

    proptest::proptest! {
        #[test]
        fn executed_timestamps_never_decrease(times in proptest::collection::vec(0u64..1000, 1..200), bound in 0u64..1200) {
            let mut engine = Engine::new();
            let mut rec = Recorder::default();
            for t in &times {
                engine.schedule(SimTime(*t), "e").unwrap();
            }
            engine.run_until(SimTime(bound), &mut rec).unwrap();
            for pair in rec.seen.windows(2) {
                proptest::prop_assert!((pair[0].0, pair[0].1) < (pair[1].0, pair[1].1));
            }
            proptest::prop_assert!(rec.seen.iter().all(|s| s.0 <= SimTime(bound)));
            let expected = times.iter().filter(|t| **t <= bound).count();
            proptest::prop_assert_eq!(rec.seen.len(), expected);
        }
    }
}

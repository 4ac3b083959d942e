//! Seeded randomness.
//!
//! Every random consumer gets its own [`RngStream`] derived from the scenario
//! seed and a stream index, so changing how often one source draws never
//! perturbs another. ChaCha8 is used because its output is fixed across
//! platforms and crate versions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::time::SimDuration;

/// Floor applied to gaussian samples; they are used as inter-send periods.
pub const MIN_GAUSSIAN_SAMPLE: SimDuration = SimDuration::from_micros(1);

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::derive(seed, 0)
    }

    /// Independent stream `stream` of the generator seeded with `seed`.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Draw from N(mean, stddev²), rounded to whole nanoseconds and clamped
    /// to at least [`MIN_GAUSSIAN_SAMPLE`].
    pub fn gaussian(&mut self, mean: SimDuration, stddev: SimDuration) -> SimDuration {
        let sample = if stddev.is_zero() {
            mean
        } else {
            let normal = Normal::new(mean.as_nanos() as f64, stddev.as_nanos() as f64)
                .expect("finite, non-negative parameters");
            let x = normal.sample(&mut self.rng).round();
            if x <= 0.0 {
                SimDuration::ZERO
            } else {
                SimDuration(x as u64)
            }
        };
        sample.max(MIN_GAUSSIAN_SAMPLE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stddev_is_exactly_the_mean() {
        let mut rng = RngStream::new(7);
        for _ in 0..10 {
            assert_eq!(
                rng.gaussian(SimDuration(200_000), SimDuration::ZERO),
                SimDuration(200_000)
            );
        }
    }

    #[test]
    fn same_seed_same_samples() {
        let draw = |seed| {
            let mut rng = RngStream::new(seed);
            (0..100)
                .map(|_| rng.gaussian(SimDuration(200_000), SimDuration(20_000)))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn streams_are_independent() {
        let mut a = RngStream::derive(1, 0);
        let mut b = RngStream::derive(1, 1);
        let xa: Vec<_> = (0..10)
            .map(|_| a.gaussian(SimDuration(1_000_000), SimDuration(1000)))
            .collect();
        let xb: Vec<_> = (0..10)
            .map(|_| b.gaussian(SimDuration(1_000_000), SimDuration(1000)))
            .collect();
        assert_ne!(xa, xb);
    }

    #[test]
    fn samples_are_clamped_to_one_microsecond() {
        let mut rng = RngStream::new(3);
        for _ in 0..1000 {
            let s = rng.gaussian(SimDuration(500), SimDuration(10_000));
            assert!(s >= MIN_GAUSSIAN_SAMPLE);
        }
    }

    #[test]
    fn sample_mean_converges() {
        // Law of large numbers: standard error is 20us / sqrt(1e5) ≈ 63ns,
        // far inside the 2us (1%) band.
        let mut rng = RngStream::new(2024);
        let n = 100_000u64;
        let mean = SimDuration::from_micros(200);
        let sd = SimDuration::from_micros(20);
        let sum: u128 = (0..n)
            .map(|_| rng.gaussian(mean, sd).as_nanos() as u128)
            .sum();
        let sample_mean = sum as f64 / n as f64;
        assert!(
            (sample_mean - 200_000.0).abs() <= 2_000.0,
            "mean {sample_mean}"
        );
        // Second moment as well, loosely: stddev within 5%.
        let mut rng = RngStream::new(2024);
        let var: f64 = (0..n)
            .map(|_| {
                let x = rng.gaussian(mean, sd).as_nanos() as f64 - sample_mean;
                x * x
            })
            .sum::<f64>()
            / (n - 1) as f64;
        assert!((var.sqrt() - 20_000.0).abs() < 1_000.0, "sd {}", var.sqrt());
    }
}

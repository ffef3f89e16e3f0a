//! Seeded counter-based generator (splitmix64) and the 64-bit mix used to
//! derive independent per-trial streams. Integer-only, so identical on every
//! platform.

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn scramble(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        scramble(self.state)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
    }

    pub fn next_range(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        // Modulo bias is irrelevant at the ranges used here (test data).
        self.next_u64() % n
    }

    pub fn next_i64_in(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.next_range((hi - lo + 1) as u64) as i64
    }
}

/// Absorb one word into a seed: xor with a golden-ratio multiple, then scramble.
pub fn mix(seed: u64, word: u64) -> u64 {
    scramble(seed ^ word.wrapping_mul(GOLDEN))
}

/// The per-trial seed derivation: `mix(mix(mix(seed, k), n), trial)`.
pub fn trial_seed(seed: u64, k: u64, n: u64, trial: u64) -> u64 {
    mix(mix(mix(seed, k), n), trial)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn trial_seeds_distinct() {
        let mut seen = std::collections::HashSet::new();
        for k in 2..5u64 {
            for n in 2..8u64 {
                for t in 0..50u64 {
                    assert!(seen.insert(trial_seed(7, k, n, t)));
                }
            }
        }
    }

    #[test]
    fn uniform_bounds() {
        let mut r = SplitMix64::new(3);
        for _ in 0..1000 {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
            let v = r.next_f64_open();
            assert!(v > 0.0 && v <= 1.0);
        }
    }
}

//! Fixed-constant linear congruential generator, so that seeded corpora are
//! reproducible across implementations and platforms.
//!
//! State update: `state <- state * 6364136223846793005 + 1442695040888963407`
//! (mod 2^64). Each draw advances the state once and yields its upper 32
//! bits; `next_below(m)` reduces that output modulo `m`.

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(MULTIPLIER)
            .wrapping_add(INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform-ish draw in `0..bound`; callers keep `bound` far below 2^32,
    /// where the modulo bias is irrelevant for corpus generation.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0 && bound <= u32::MAX as u64);
        self.next_u32() as u64 % bound
    }

    /// Fisher-Yates shuffle driven by this generator.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences_are_reproducible() {
        let mut a = Lcg64::new(7);
        let mut b = Lcg64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u32(), b.next_u32());
        }
    }

    #[test]
    fn first_draws_from_seed_zero_are_pinned() {
        // Frozen so that any change to the constants or output scheme fails.
        let mut rng = Lcg64::new(0);
        assert_eq!(rng.next_u32(), 335903614);
        assert_eq!(rng.next_u32(), 436792849);
        assert_eq!(rng.next_u32(), 2599843874);
    }

    #[test]
    fn shuffles_cover_permutations() {
        let mut rng = Lcg64::new(3);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let mut items = [0, 1, 2];
            rng.shuffle(&mut items);
            seen.insert(items);
        }
        assert_eq!(seen.len(), 6);
    }
}

//! Seeded randomness for runs, with named child streams for nested
//! simulations, plus a tape-driven source that lets small runs be expanded
//! into an exhaustive branch tree with exact probabilities.
//!
//! Every random decision taken by the algorithms is a binary choice with an
//! explicit probability, so a run is fully described by the bit string of
//! its draws. Draws with probability 0 or 1 are resolved without consuming
//! randomness, which keeps the branch tree finite and tight.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Mixes a seed with a tag (splitmix64 finalizer) to derive child streams.
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Source of binary random decisions.
pub trait DrawSource {
    /// Returns `true` with probability `p_right`. Probabilities at or
    /// outside {0, 1} are resolved deterministically without a draw.
    fn choose_right(&mut self, p_right: f64) -> bool;

    /// Source for a nested simulation keyed by `tag`. Seeded sources derive
    /// an independent child stream; tapes keep recording in place so branch
    /// enumeration sees every draw.
    fn child(&mut self, tag: u64) -> Box<dyn DrawSource + '_>;

    /// Number of real draws consumed so far.
    fn draws(&self) -> u64;
}

impl<T: DrawSource + ?Sized> DrawSource for &mut T {
    fn choose_right(&mut self, p_right: f64) -> bool {
        (**self).choose_right(p_right)
    }

    fn child(&mut self, tag: u64) -> Box<dyn DrawSource + '_> {
        (**self).child(tag)
    }

    fn draws(&self) -> u64 {
        (**self).draws()
    }
}

/// ChaCha-backed source; the canonical stream for real runs.
pub struct SeededDraws {
    seed: u64,
    rng: ChaCha8Rng,
    count: u64,
}

impl SeededDraws {
    pub fn new(seed: u64) -> Self {
        SeededDraws {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            count: 0,
        }
    }
}

impl DrawSource for SeededDraws {
    fn choose_right(&mut self, p_right: f64) -> bool {
        if p_right <= 0.0 {
            return false;
        }
        if p_right >= 1.0 {
            return true;
        }
        self.count += 1;
        self.rng.random::<f64>() < p_right
    }

    fn child(&mut self, tag: u64) -> Box<dyn DrawSource + '_> {
        Box::new(SeededDraws::new(mix_seed(self.seed, tag)))
    }

    fn draws(&self) -> u64 {
        self.count
    }
}

/// Replays a fixed bit prefix and reports when a run needs more bits.
///
/// Used by [`enumerate_branches`]: a run that exhausts its prefix is marked
/// overflowed and re-executed with both one-bit extensions.
pub struct TapeDraws {
    prefix: Vec<bool>,
    pos: usize,
    probability: f64,
    overflowed: bool,
}

impl TapeDraws {
    pub fn with_prefix(prefix: Vec<bool>) -> Self {
        TapeDraws {
            prefix,
            pos: 0,
            probability: 1.0,
            overflowed: false,
        }
    }

    pub fn overflowed(&self) -> bool {
        self.overflowed
    }

    /// Probability of the replayed prefix so far.
    pub fn probability(&self) -> f64 {
        self.probability
    }
}

impl DrawSource for TapeDraws {
    fn choose_right(&mut self, p_right: f64) -> bool {
        if p_right <= 0.0 {
            return false;
        }
        if p_right >= 1.0 {
            return true;
        }
        if self.overflowed {
            return false;
        }
        if self.pos < self.prefix.len() {
            let bit = self.prefix[self.pos];
            self.pos += 1;
            self.probability *= if bit { p_right } else { 1.0 - p_right };
            bit
        } else {
            self.overflowed = true;
            false
        }
    }

    fn child(&mut self, _tag: u64) -> Box<dyn DrawSource + '_> {
        Box::new(&mut *self)
    }

    fn draws(&self) -> u64 {
        self.pos as u64
    }
}

/// One leaf of an exhaustive branch expansion.
#[derive(Debug, Clone)]
pub struct Branch<T> {
    pub outcome: T,
    pub probability: f64,
    pub tape: Vec<bool>,
}

/// Runs `body` over every realizable draw sequence and returns all leaves
/// with their exact probabilities. `body` must be deterministic given the
/// tape. Branch probabilities sum to 1.
pub fn enumerate_branches<T>(mut body: impl FnMut(&mut TapeDraws) -> T) -> Vec<Branch<T>> {
    let mut pending = vec![Vec::new()];
    let mut leaves = Vec::new();
    while let Some(prefix) = pending.pop() {
        let mut tape = TapeDraws::with_prefix(prefix.clone());
        let outcome = body(&mut tape);
        if tape.overflowed() {
            let mut left = prefix.clone();
            left.push(false);
            let mut right = prefix;
            right.push(true);
            pending.push(right);
            pending.push(left);
        } else {
            leaves.push(Branch {
                outcome,
                probability: tape.probability(),
                tape: prefix,
            });
        }
    }
    leaves
}

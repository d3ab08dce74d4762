//! Island decomposition of the line induced by an optimal matching between
//! imaginary and available servers.
//!
//! A point sits in a right island when some matched pair crosses it moving
//! rightwards (imaginary server strictly left, matched available server
//! strictly right), in a left island for the mirrored crossing, and in a
//! stationary island otherwise. The decomposition is the same for every
//! optimal matching, so it is computed from the sorted pairing.

use serde::{Deserialize, Serialize};

use crate::matching::MatchingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IslandKind {
    Left,
    Stationary,
    Right,
}

/// A maximal interval of one kind. `lo`/`hi` may be infinite on the ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub lo: f64,
    pub hi: f64,
    pub kind: IslandKind,
}

/// Contiguous cover of the real line by maximal islands.
///
/// Interval endpoints shared by two islands belong to the stationary side
/// when one side is stationary, otherwise to the left interval; matched
/// pairs at equal positions generate no island.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandPartition {
    pub intervals: Vec<Island>,
}

impl IslandPartition {
    pub fn classify(&self, x: f64) -> IslandKind {
        classify_point(self, x)
    }
}

/// Decomposes the line using the sorted pairing between `s_iota` and `s_rho`.
pub fn decompose_islands(s_iota: &[f64], s_rho: &[f64]) -> Result<IslandPartition, MatchingError> {
    if s_iota.len() != s_rho.len() {
        return Err(MatchingError::SizeMismatch {
            left: s_iota.len(),
            right: s_rho.len(),
        });
    }
    debug_assert!(s_iota.windows(2).all(|w| w[0] <= w[1]));
    debug_assert!(s_rho.windows(2).all(|w| w[0] <= w[1]));
    let pairs: Vec<(f64, f64)> = s_iota.iter().copied().zip(s_rho.iter().copied()).collect();
    Ok(decompose_from_pairs(&pairs))
}

/// Decomposes the line from an explicit matching given as
/// `(imaginary position, available position)` pairs. Exposed so tests can
/// verify the partition is identical for every optimal matching.
pub fn decompose_from_pairs(pairs: &[(f64, f64)]) -> IslandPartition {
    let mut right: Vec<(f64, f64)> = Vec::new();
    let mut left: Vec<(f64, f64)> = Vec::new();
    for &(iota, rho) in pairs {
        if iota < rho {
            right.push((iota, rho));
        } else if rho < iota {
            left.push((rho, iota));
        }
    }
    let right = merge_intervals(right);
    let left = merge_intervals(left);

    let mut crossings: Vec<Island> = Vec::with_capacity(right.len() + left.len());
    crossings.extend(right.into_iter().map(|(lo, hi)| Island {
        lo,
        hi,
        kind: IslandKind::Right,
    }));
    crossings.extend(left.into_iter().map(|(lo, hi)| Island {
        lo,
        hi,
        kind: IslandKind::Left,
    }));
    crossings.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    debug_assert!(
        crossings.windows(2).all(|w| w[0].hi <= w[1].lo),
        "opposite crossings overlap: {crossings:?}"
    );

    let mut intervals = Vec::with_capacity(2 * crossings.len() + 1);
    let mut cursor = f64::NEG_INFINITY;
    for island in crossings {
        if island.lo > cursor {
            intervals.push(Island {
                lo: cursor,
                hi: island.lo,
                kind: IslandKind::Stationary,
            });
        }
        cursor = island.hi;
        intervals.push(island);
    }
    intervals.push(Island {
        lo: cursor,
        hi: f64::INFINITY,
        kind: IslandKind::Stationary,
    });
    IslandPartition { intervals }
}

fn merge_intervals(mut spans: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    spans.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
    for (lo, hi) in spans {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Kind of the island containing `x`. Boundary points go to the stationary
/// side when one flanking interval is stationary, otherwise to the left one.
pub fn classify_point(part: &IslandPartition, x: f64) -> IslandKind {
    for (i, island) in part.intervals.iter().enumerate() {
        if x > island.lo && x < island.hi {
            return island.kind;
        }
        if x == island.hi {
            let right_kind = part
                .intervals
                .get(i + 1)
                .map(|r| r.kind)
                .unwrap_or(IslandKind::Stationary);
            if island.kind == IslandKind::Stationary || right_kind == IslandKind::Stationary {
                return IslandKind::Stationary;
            }
            return island.kind;
        }
    }
    IslandKind::Stationary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::all_optimal_bijections;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_right_crossing() {
        let part = decompose_islands(&[0.0, 10.0], &[4.0, 10.0]).unwrap();
        assert_eq!(part.classify(2.0), IslandKind::Right);
        assert_eq!(part.classify(-3.0), IslandKind::Stationary);
        assert_eq!(part.classify(7.0), IslandKind::Stationary);
        // both endpoints flank a stationary interval
        assert_eq!(part.classify(0.0), IslandKind::Stationary);
        assert_eq!(part.classify(4.0), IslandKind::Stationary);
    }

    #[test]
    fn identity_matching_is_all_stationary() {
        let s = [1.0, 5.0, 9.5];
        let part = decompose_islands(&s, &s).unwrap();
        assert_eq!(part.intervals.len(), 1);
        assert_eq!(part.intervals[0].kind, IslandKind::Stationary);
    }

    #[test]
    fn partition_covers_line_contiguously() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let len = rng.random_range(0..=6);
            let mut iota: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
            let mut rho: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
            iota.sort_by(|a, b| a.partial_cmp(b).unwrap());
            rho.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let part = decompose_islands(&iota, &rho).unwrap();
            assert_eq!(part.intervals.first().unwrap().lo, f64::NEG_INFINITY);
            assert_eq!(part.intervals.last().unwrap().hi, f64::INFINITY);
            for w in part.intervals.windows(2) {
                assert_eq!(w[0].hi, w[1].lo, "gap or overlap in partition");
                assert_ne!(w[0].kind, w[1].kind, "non-maximal partition");
            }
        }
    }

    #[test]
    fn classification_matches_crossing_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let len = rng.random_range(1..=5);
            let mut iota: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
            let mut rho: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
            iota.sort_by(|a, b| a.partial_cmp(b).unwrap());
            rho.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let part = decompose_islands(&iota, &rho).unwrap();
            for _ in 0..100 {
                let x = rng.random_range(-25.0..25.0);
                let mut expect = IslandKind::Stationary;
                for (a, b) in iota.iter().zip(&rho) {
                    if a < b && x > *a && x < *b {
                        expect = IslandKind::Right;
                    }
                    if b < a && x > *b && x < *a {
                        expect = IslandKind::Left;
                    }
                }
                assert_eq!(part.classify(x), expect, "at {x}");
            }
        }
    }

    #[test]
    fn partition_is_matching_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let len = rng.random_range(1..=5);
            let mut iota: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
            let mut rho: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
            iota.sort_by(|a, b| a.partial_cmp(b).unwrap());
            rho.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let reference = decompose_islands(&iota, &rho).unwrap();
            for bijection in all_optimal_bijections(&iota, &rho).unwrap() {
                let pairs: Vec<(f64, f64)> = bijection
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (iota[i], rho[j]))
                    .collect();
                let alt = decompose_from_pairs(&pairs);
                assert_eq!(alt, reference, "iota {iota:?} rho {rho:?}");
            }
        }
    }

    #[test]
    fn left_stationary_right_order_between_adjacent_availables() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let len = rng.random_range(2..=6);
            let mut iota: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
            let mut rho: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
            iota.sort_by(|a, b| a.partial_cmp(b).unwrap());
            rho.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let part = decompose_islands(&iota, &rho).unwrap();
            for w in rho.windows(2) {
                let kinds: Vec<IslandKind> = part
                    .intervals
                    .iter()
                    .filter(|iv| iv.hi > w[0] && iv.lo < w[1])
                    .map(|iv| iv.kind)
                    .collect();
                let rank = |k: IslandKind| match k {
                    IslandKind::Left => 0,
                    IslandKind::Stationary => 1,
                    IslandKind::Right => 2,
                };
                for pair in kinds.windows(2) {
                    assert!(
                        rank(pair[0]) < rank(pair[1]),
                        "kinds out of order in ({}, {}): {kinds:?}",
                        w[0],
                        w[1]
                    );
                }
            }
        }
    }

    #[test]
    fn size_mismatch_rejected() {
        assert!(decompose_islands(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn left_island_points_have_available_surplus_on_their_left() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let len = rng.random_range(1..=6);
            let mut iota: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
            let mut rho: Vec<f64> = (0..len).map(|_| rng.random_range(-20.0..20.0)).collect();
            iota.sort_by(|a, b| a.partial_cmp(b).unwrap());
            rho.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let part = decompose_islands(&iota, &rho).unwrap();
            for island in &part.intervals {
                if island.kind != IslandKind::Left || island.hi <= island.lo {
                    continue;
                }
                let x = 0.5 * (island.lo + island.hi);
                let avail_left = rho.iter().filter(|&&s| s < x).count();
                let imag_left = iota.iter().filter(|&&s| s < x).count();
                assert!(
                    avail_left > imag_left,
                    "at {x}: {avail_left} available vs {imag_left} imaginary on the left"
                );
            }
        }
    }
}

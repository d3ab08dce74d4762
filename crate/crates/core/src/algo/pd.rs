//! Pseudo-distances through the server chain.
//!
//! The pseudo-distance between adjacent servers is the gap length, inflated
//! to `Z/n^2` when the gap is at most `Z/n^2` and cut to infinity when the
//! gap is at least `Z`. Between arbitrary positions it is the sum over the
//! adjacent gaps crossed. The raw mode drops the inflation floor and keeps
//! only the cut; it exists to reproduce an alternative literal reading of
//! the movement probabilities in the four-server counterexample.

use serde::{Deserialize, Serialize};

use super::AlgoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdMode {
    #[default]
    Clamped,
    Raw,
}

impl PdMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PdMode::Clamped => "clamped",
            PdMode::Raw => "raw",
        }
    }
}

fn gap_value(gap: f64, z: f64, n: usize, mode: PdMode) -> f64 {
    debug_assert!(gap >= 0.0);
    if gap >= z {
        return f64::INFINITY;
    }
    let floor = z / ((n as f64) * (n as f64));
    match mode {
        PdMode::Clamped if gap <= floor => floor,
        _ => gap,
    }
}

/// Pseudo-distance between servers `i <= j` under estimate `z`.
pub fn pseudo_distance(
    servers: &[f64],
    i: usize,
    j: usize,
    z: f64,
    n: usize,
    mode: PdMode,
) -> Result<f64, AlgoError> {
    if i > j || j >= servers.len() {
        return Err(AlgoError::BadIndices {
            i,
            j,
            len: servers.len(),
        });
    }
    let mut total = 0.0;
    for h in i..j {
        total += gap_value(servers[h + 1] - servers[h], z, n, mode);
        if total.is_infinite() {
            break;
        }
    }
    Ok(total)
}

/// Pseudo-distance from an arbitrary position `x` to server `j`, crossing
/// the partial gap to the first server past `x` and then whole gaps.
pub fn point_to_server(servers: &[f64], x: f64, j: usize, z: f64, n: usize, mode: PdMode) -> f64 {
    let target = servers[j];
    if x == target {
        return 0.0;
    }
    let mut total = 0.0;
    if x < target {
        let mut prev = x;
        let start = servers.partition_point(|&s| s <= x);
        for &s in &servers[start..=j] {
            total += gap_value(s - prev, z, n, mode);
            if total.is_infinite() {
                break;
            }
            prev = s;
        }
    } else {
        let mut prev = x;
        let end = servers.partition_point(|&s| s < x);
        for k in (j..end).rev() {
            total += gap_value(prev - servers[k], z, n, mode);
            if total.is_infinite() {
                break;
            }
            prev = servers[k];
        }
    }
    total
}

/// Probabilities of moving to the left and right neighbor, inversely
/// proportional to the pseudo-distances. An infinite side gets probability
/// zero; both sides infinite is an error the caller must handle.
pub fn neighbor_probs(pd_left: f64, pd_right: f64) -> Result<(f64, f64), AlgoError> {
    debug_assert!(pd_left >= 0.0 && pd_right >= 0.0);
    match (pd_left.is_infinite(), pd_right.is_infinite()) {
        (true, true) => Err(AlgoError::DisconnectedPseudoMetric),
        (true, false) => Ok((0.0, 1.0)),
        (false, true) => Ok((1.0, 0.0)),
        (false, false) => {
            if pd_left == 0.0 && pd_right == 0.0 {
                return Ok((0.5, 0.5));
            }
            let left = pd_right / (pd_left + pd_right);
            Ok((left, 1.0 - left))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_cases() {
        // plain gap between the clamp and the cut
        let servers = [0.0, 7.0];
        assert_eq!(
            pseudo_distance(&servers, 0, 1, 10.0, 4, PdMode::Clamped).unwrap(),
            7.0
        );
        // at or past the estimate: infinite
        let servers = [0.0, 12.0];
        assert!(pseudo_distance(&servers, 0, 1, 10.0, 4, PdMode::Clamped)
            .unwrap()
            .is_infinite());
        // small gap inflated to z / n^2
        let servers = [0.0, 0.5];
        assert_eq!(
            pseudo_distance(&servers, 0, 1, 100.0, 10, PdMode::Clamped).unwrap(),
            1.0
        );
        // raw mode keeps the small gap
        assert_eq!(
            pseudo_distance(&servers, 0, 1, 100.0, 10, PdMode::Raw).unwrap(),
            0.5
        );
    }

    #[test]
    fn sums_across_gaps() {
        let servers = [0.0, 4.0, 11.0, 31.0];
        // 7 + 20 under z = 100
        assert_eq!(
            pseudo_distance(&servers, 1, 3, 100.0, 4, PdMode::Clamped).unwrap(),
            27.0
        );
        // gap 4 inflated to 100/16
        assert_eq!(
            pseudo_distance(&servers, 0, 1, 100.0, 4, PdMode::Clamped).unwrap(),
            6.25
        );
        // any infinite link dominates
        assert!(pseudo_distance(&servers, 0, 3, 15.0, 4, PdMode::Clamped)
            .unwrap()
            .is_infinite());
        assert!(pseudo_distance(&servers, 0, 0, 10.0, 4, PdMode::Clamped).unwrap() == 0.0);
        assert!(pseudo_distance(&servers, 2, 1, 10.0, 4, PdMode::Clamped).is_err());
    }

    #[test]
    fn point_distances_match_server_distances() {
        let servers = [0.0, 4.0, 11.0, 31.0];
        for (i, &s) in servers.iter().enumerate() {
            for j in 0..servers.len() {
                let (lo, hi) = (i.min(j), i.max(j));
                let expect = pseudo_distance(&servers, lo, hi, 10.0, 4, PdMode::Clamped).unwrap();
                let got = point_to_server(&servers, s, j, 10.0, 4, PdMode::Clamped);
                assert_eq!(got, expect, "from server {i} to {j}");
            }
        }
        // off-server point between 4 and 11
        let d = point_to_server(&servers, 6.0, 2, 10.0, 4, PdMode::Clamped);
        assert_eq!(d, 5.0);
        let d = point_to_server(&servers, 6.0, 0, 10.0, 4, PdMode::Clamped);
        assert_eq!(d, 6.0); // 2 back to 4, then 4 back to 0
    }

    #[test]
    fn neighbor_probs_cases() {
        let (l, r) = neighbor_probs(4.0, 7.0).unwrap();
        assert!((l - 7.0 / 11.0).abs() < 1e-15);
        assert!((r - 4.0 / 11.0).abs() < 1e-15);
        assert_eq!(neighbor_probs(3.0, 3.0).unwrap(), (0.5, 0.5));
        assert_eq!(neighbor_probs(f64::INFINITY, 5.0).unwrap(), (0.0, 1.0));
        assert_eq!(neighbor_probs(5.0, f64::INFINITY).unwrap(), (1.0, 0.0));
        assert_eq!(neighbor_probs(0.0, 0.0).unwrap(), (0.5, 0.5));
        assert!(neighbor_probs(f64::INFINITY, f64::INFINITY).is_err());
    }
}

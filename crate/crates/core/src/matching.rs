//! Optimal matching costs on the line.
//!
//! On one-dimensional inputs the minimum-cost perfect matching between two
//! equal-size point sets pairs the k-th smallest of one side with the k-th
//! smallest of the other. The routines here expose that sorted pairing, a
//! permutation brute force used as an independent oracle, the partial
//! dynamic program for matching a request prefix into a server set, and the
//! deletion bound relating `D(P', Q')` to `D(P, Q)`.

use serde::{Deserialize, Serialize};

/// Absolute tolerance used for all cost comparisons.
pub const COST_TOLERANCE: f64 = 1e-9;

/// Largest input size accepted by the permutation brute force.
pub const BRUTE_FORCE_MAX: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum MatchingError {
    SizeMismatch { left: usize, right: usize },
    TooLarge { len: usize, max: usize },
    TooManyRequests { requests: usize, servers: usize },
    IndexOutOfRange { index: usize, len: usize },
}

impl std::fmt::Display for MatchingError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatchingError::SizeMismatch { left, right } => {
                write!(f, "point sets differ in size: {left} vs {right}")
            }
            MatchingError::TooLarge { len, max } => {
                write!(f, "brute force limited to {max} points, got {len}")
            }
            MatchingError::TooManyRequests { requests, servers } => {
                write!(f, "{requests} requests cannot fit into {servers} servers")
            }
            MatchingError::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
        }
    }
}

impl std::error::Error for MatchingError {}

/// A bijection between two point sets together with its total cost.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchingResult {
    /// Pairs of (left index, right index) into the original sequences.
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

fn sorted_order(points: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap());
    idx
}

/// Minimum-cost perfect matching between equal-size point sets on the line.
///
/// Pairs the k-th smallest point of `p` with the k-th smallest point of `q`;
/// the returned pairs are expressed in the original indexing.
pub fn optimal_matching_cost(p: &[f64], q: &[f64]) -> Result<MatchingResult, MatchingError> {
    if p.len() != q.len() {
        return Err(MatchingError::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let pi = sorted_order(p);
    let qi = sorted_order(q);
    let mut cost = 0.0;
    let mut pairs = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        cost += (p[pi[k]] - q[qi[k]]).abs();
        pairs.push((pi[k], qi[k]));
    }
    Ok(MatchingResult { pairs, cost })
}

/// Cost-only variant for slices that are already sorted.
pub fn sorted_pairing_cost(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

/// Exhaustive minimum over all bijections. Oracle for [`optimal_matching_cost`].
pub fn brute_force_matching(p: &[f64], q: &[f64]) -> Result<MatchingResult, MatchingError> {
    if p.len() != q.len() {
        return Err(MatchingError::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if p.len() > BRUTE_FORCE_MAX {
        return Err(MatchingError::TooLarge {
            len: p.len(),
            max: BRUTE_FORCE_MAX,
        });
    }
    let mut perm: Vec<usize> = (0..q.len()).collect();
    let mut best_cost = f64::INFINITY;
    let mut best: Vec<usize> = perm.clone();
    permute(&mut perm, 0, &mut |assignment| {
        let cost: f64 = assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| (p[i] - q[j]).abs())
            .sum();
        if cost < best_cost {
            best_cost = cost;
            best = assignment.to_vec();
        }
    });
    if p.is_empty() {
        best_cost = 0.0;
    }
    Ok(MatchingResult {
        pairs: best.iter().enumerate().map(|(i, &j)| (i, j)).collect(),
        cost: best_cost,
    })
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        if !items.is_empty() {
            visit(items);
        }
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Every minimum-cost bijection between `p` and `q` (within `COST_TOLERANCE`
/// of the optimum), as index permutations. Test oracle for island invariance.
pub fn all_optimal_bijections(p: &[f64], q: &[f64]) -> Result<Vec<Vec<usize>>, MatchingError> {
    let best = brute_force_matching(p, q)?.cost;
    let mut perm: Vec<usize> = (0..q.len()).collect();
    let mut out = Vec::new();
    permute(&mut perm, 0, &mut |assignment| {
        let cost: f64 = assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| (p[i] - q[j]).abs())
            .sum();
        if cost <= best + COST_TOLERANCE {
            out.push(assignment.to_vec());
        }
    });
    if p.is_empty() {
        out.push(Vec::new());
    }
    Ok(out)
}

/// The `(t+1) x (n+1)` table of partial matching costs.
///
/// `dp[i][j]` is the minimum cost of matching the `i` smallest requests into
/// the `j` leftmost servers; `dp[i][j]` is infinite when `i > j`. Ties in the
/// recurrence prefer leaving the newest server unused, which keeps the
/// implied assignment on smaller server indices.
#[derive(Debug, Clone)]
pub struct PartialOptTable {
    pub dp: Vec<Vec<f64>>,
}

impl PartialOptTable {
    pub fn total(&self) -> f64 {
        *self.dp.last().and_then(|row| row.last()).unwrap_or(&0.0)
    }
}

/// Builds the partial DP for `requests` (any order) against sorted `servers`.
pub fn partial_opt_table(requests: &[f64], servers: &[f64]) -> Result<PartialOptTable, MatchingError> {
    let t = requests.len();
    let n = servers.len();
    if t > n {
        return Err(MatchingError::TooManyRequests {
            requests: t,
            servers: n,
        });
    }
    let mut sorted_requests = requests.to_vec();
    sorted_requests.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut dp = vec![vec![f64::INFINITY; n + 1]; t + 1];
    dp[0].fill(0.0);
    for i in 1..=t {
        for j in i..=n {
            let with_server = dp[i - 1][j - 1] + (sorted_requests[i - 1] - servers[j - 1]).abs();
            dp[i][j] = if dp[i][j - 1] > with_server {
                with_server
            } else {
                dp[i][j - 1]
            };
        }
    }
    Ok(PartialOptTable { dp })
}

/// Minimum cost of assigning every request to a distinct server.
///
/// This is the quantity written OPT(t) when `requests` is a request prefix.
pub fn optimal_partial_cost(requests: &[f64], servers: &[f64]) -> Result<f64, MatchingError> {
    Ok(partial_opt_table(requests, servers)?.total())
}

/// Exhaustive minimum over all injections of requests into servers.
/// Independent oracle for [`optimal_partial_cost`]; exponential, keep inputs small.
pub fn brute_force_partial_cost(requests: &[f64], servers: &[f64]) -> Result<f64, MatchingError> {
    let t = requests.len();
    let n = servers.len();
    if t > n {
        return Err(MatchingError::TooManyRequests {
            requests: t,
            servers: n,
        });
    }
    if t == 0 {
        return Ok(0.0);
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; n];
    fn assign(
        requests: &[f64],
        servers: &[f64],
        used: &mut [bool],
        i: usize,
        acc: f64,
        best: &mut f64,
    ) {
        if i == requests.len() {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        for j in 0..servers.len() {
            if !used[j] {
                used[j] = true;
                assign(requests, servers, used, i + 1, acc + (requests[i] - servers[j]).abs(), best);
                used[j] = false;
            }
        }
    }
    assign(requests, servers, &mut used, 0, 0.0, &mut best);
    Ok(best)
}

/// Outcome of the deletion bound check on `D(P \ p_g, Q \ q_h) - D(P, Q)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DpqBound {
    pub delta: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Checks the deletion bound for sorted equal-length `p`, `q` and 0-based
/// indices `g`, `h`: removing `p[g]` and `q[h]` changes the matching cost by
/// at most `(p_h - p_g) - |p_h - q_h|` when `g <= h`, and by at most
/// `(q_g - q_h) - |q_g - p_g|` otherwise.
pub fn dpq_bound_check(p: &[f64], q: &[f64], g: usize, h: usize) -> Result<DpqBound, MatchingError> {
    if p.len() != q.len() {
        return Err(MatchingError::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if g >= p.len() {
        return Err(MatchingError::IndexOutOfRange {
            index: g,
            len: p.len(),
        });
    }
    if h >= q.len() {
        return Err(MatchingError::IndexOutOfRange {
            index: h,
            len: q.len(),
        });
    }
    let base = sorted_pairing_cost(p, q);
    let mut p_red = p.to_vec();
    let mut q_red = q.to_vec();
    p_red.remove(g);
    q_red.remove(h);
    let reduced = sorted_pairing_cost(&p_red, &q_red);
    let delta = reduced - base;
    let bound = if g <= h {
        (p[h] - p[g]) - (p[h] - q[h]).abs()
    } else {
        (q[g] - q[h]) - (q[g] - p[g]).abs()
    };
    Ok(DpqBound {
        delta,
        bound,
        holds: delta <= bound + COST_TOLERANCE,
    })
}

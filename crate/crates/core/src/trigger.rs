//! Trigger points and the machinery around them: where a request would push
//! the optimal cost to date past the current estimate, the exact boundary
//! points of trigger regions, and the normalized-cost helpers used to reason
//! about assignment costs between two adjacent available servers.
//!
//! Restricted to a segment between adjacent servers, the optimal cost as a
//! function of one request's position is the minimum of linear functions
//! with slopes +1 and -1, hence concave with a single peak. The trigger
//! region inside each segment is therefore one closed interval whose
//! endpoints solve a linear equation on the segment's endpoint values.

use crate::matching::optimal_partial_cost;

#[derive(Debug, Clone, PartialEq)]
pub enum TriggerError {
    NotATrigger { x: f64, opt: f64, estimate: f64 },
    DomainError { name: &'static str, value: f64 },
    DegenerateInterval { left: f64, right: f64 },
}

impl std::fmt::Display for TriggerError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TriggerError::NotATrigger { x, opt, estimate } => {
                write!(f, "{x} is not a trigger point (opt {opt} < estimate {estimate})")
            }
            TriggerError::DomainError { name, value } => {
                write!(f, "{name} = {value} outside [0, 1]")
            }
            TriggerError::DegenerateInterval { left, right } => {
                write!(f, "degenerate interval [{left}, {right}]")
            }
        }
    }
}

impl std::error::Error for TriggerError {}

/// Everything needed to decide trigger status between two adjacent
/// available servers: the requests seen so far, the full server array, the
/// current estimate, and the enclosing available pair.
#[derive(Debug, Clone)]
pub struct TriggerContext<'a> {
    pub prior_requests: &'a [f64],
    pub servers: &'a [f64],
    pub estimate: f64,
    pub left_available: f64,
    pub right_available: f64,
}

impl TriggerContext<'_> {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left_available + self.right_available)
    }

    /// Optimal cost to date if a request arrived at `x`.
    pub fn opt_with(&self, x: f64) -> f64 {
        let mut requests = self.prior_requests.to_vec();
        requests.push(x);
        optimal_partial_cost(&requests, self.servers).expect("more requests than servers")
    }
}

/// Whether a request arriving at `x` would push the optimal cost to date to
/// at least the estimate. An infinite estimate never triggers.
pub fn is_trigger_point(ctx: &TriggerContext<'_>, x: f64) -> bool {
    if !ctx.estimate.is_finite() {
        return false;
    }
    ctx.opt_with(x) >= ctx.estimate
}

/// Server positions strictly inside `(lo, hi)`, plus the ends, ascending.
fn segment_breakpoints(servers: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut points = vec![lo];
    for &s in servers {
        if s > lo && s < hi {
            points.push(s);
        }
    }
    points.push(hi);
    points
}

/// The trigger region inside one server-free segment `[a, b]` given the
/// opt values at the ends. Returns `None` when the region is empty. A
/// triggering endpoint always belongs to the region, which absorbs the
/// rounding of the linear solve on very short segments.
fn segment_trigger_span(a: f64, b: f64, opt_a: f64, opt_b: f64, z: f64) -> Option<(f64, f64)> {
    // opt(y) = min(opt_a + (y - a), opt_b + (b - y)) on [a, b]
    let lo_raw = if opt_a >= z { a } else { a + (z - opt_a) };
    let hi_raw = if opt_b >= z { b } else { b - (z - opt_b) };
    let lo = lo_raw.clamp(a, b);
    let hi = hi_raw.clamp(a, b);
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Maximal trigger subintervals within `[lo, hi]`, merged across segment
/// boundaries, in ascending order.
pub fn trigger_intervals(ctx: &TriggerContext<'_>, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let points = segment_breakpoints(ctx.servers, lo, hi);
    let opts: Vec<f64> = points.iter().map(|&p| ctx.opt_with(p)).collect();
    let mut spans: Vec<(f64, f64)> = Vec::new();
    for k in 0..points.len() - 1 {
        if let Some(span) =
            segment_trigger_span(points[k], points[k + 1], opts[k], opts[k + 1], ctx.estimate)
        {
            match spans.last_mut() {
                Some(last) if span.0 <= last.1 => last.1 = last.1.max(span.1),
                _ => spans.push(span),
            }
        }
    }
    spans
}

/// The boundary points around a triggering position `x`: walking left
/// (right) from `x`, the first point that is not triggering, clamped to the
/// enclosing available server. The returned points satisfy
/// `left_available <= y_l <= x <= y_r <= right_available`, and the optimal
/// cost at an unclamped boundary equals the estimate exactly up to rounding.
pub fn trigger_boundaries(ctx: &TriggerContext<'_>, x: f64) -> Result<(f64, f64), TriggerError> {
    if !is_trigger_point(ctx, x) {
        return Err(TriggerError::NotATrigger {
            x,
            opt: ctx.opt_with(x),
            estimate: ctx.estimate,
        });
    }
    let z = ctx.estimate;

    // leftward: segments from x down to the left available server
    let mut y_left = ctx.left_available;
    let points = segment_breakpoints(ctx.servers, ctx.left_available, x);
    let opts: Vec<f64> = points.iter().map(|&p| ctx.opt_with(p)).collect();
    for k in (0..points.len() - 1).rev() {
        let (a, b) = (points[k], points[k + 1]);
        // a segment adjoining a triggering point has a nonempty span
        let span = segment_trigger_span(a, b, opts[k], opts[k + 1], z).unwrap_or((a, b));
        if span.0 > a {
            y_left = span.0;
            break;
        }
    }

    // rightward, mirrored
    let mut y_right = ctx.right_available;
    let points = segment_breakpoints(ctx.servers, x, ctx.right_available);
    let opts: Vec<f64> = points.iter().map(|&p| ctx.opt_with(p)).collect();
    for k in 0..points.len() - 1 {
        let (a, b) = (points[k], points[k + 1]);
        let span = segment_trigger_span(a, b, opts[k], opts[k + 1], z).unwrap_or((a, b));
        if span.1 < b {
            y_right = span.1;
            break;
        }
    }

    Ok((y_left, y_right))
}

/// Normalized assignment cost `alpha (1 - gamma) + (1 - alpha) gamma` for a
/// request at normalized position `alpha` assigned right with probability
/// `gamma` on the unit interval.
pub fn normalized_cost(alpha: f64, gamma: f64) -> Result<f64, TriggerError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(TriggerError::DomainError {
            name: "alpha",
            value: alpha,
        });
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(TriggerError::DomainError {
            name: "gamma",
            value: gamma,
        });
    }
    Ok(alpha * (1.0 - gamma) + (1.0 - alpha) * gamma)
}

/// Maps `x` in `(s_left, s_right)` onto the unit interval.
pub fn linear_map(s_left: f64, s_right: f64, x: f64) -> Result<f64, TriggerError> {
    if s_left >= s_right {
        return Err(TriggerError::DegenerateInterval {
            left: s_left,
            right: s_right,
        });
    }
    Ok((x - s_left) / (s_right - s_left))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample_ctx<'a>() -> TriggerContext<'a> {
        // servers at gaps (4, 7, 20); r_1, r_2 at the second server; the two
        // remaining available servers flanking position 4 are 0 and 11.
        TriggerContext {
            prior_requests: &[4.0, 4.0],
            servers: &[0.0, 4.0, 11.0, 31.0],
            estimate: 10.0,
            left_available: 0.0,
            right_available: 11.0,
        }
    }

    #[test]
    fn trigger_status_on_the_counterexample_instance() {
        let ctx = counterexample_ctx();
        assert!(is_trigger_point(&ctx, 4.0)); // opt 11 >= 10
        assert!(!is_trigger_point(&ctx, 0.0)); // opt 7 < 10
        let never = TriggerContext {
            estimate: f64::INFINITY,
            ..counterexample_ctx()
        };
        assert!(!is_trigger_point(&never, 4.0));
    }

    #[test]
    fn boundaries_solve_opt_equals_estimate() {
        let ctx = counterexample_ctx();
        let (y_l, y_r) = trigger_boundaries(&ctx, 4.0).unwrap();
        assert!((y_l - 3.0).abs() < 1e-9, "y_l = {y_l}");
        assert!((y_r - 5.0).abs() < 1e-9, "y_r = {y_r}");
        assert!((ctx.opt_with(y_l) - 10.0).abs() < 1e-6);
        assert!((ctx.opt_with(y_r) - 10.0).abs() < 1e-6);
    }

    #[test]
    fn boundaries_clamp_to_available_servers() {
        // estimate low enough that the whole interval triggers
        let ctx = TriggerContext {
            estimate: 1.0,
            ..counterexample_ctx()
        };
        let (y_l, y_r) = trigger_boundaries(&ctx, 4.0).unwrap();
        assert_eq!(y_l, 0.0);
        assert_eq!(y_r, 11.0);
    }

    #[test]
    fn boundaries_reject_non_triggers() {
        let ctx = counterexample_ctx();
        assert!(matches!(
            trigger_boundaries(&ctx, 0.0),
            Err(TriggerError::NotATrigger { .. })
        ));
    }

    #[test]
    fn boundaries_agree_with_dense_scan() {
        let ctx = counterexample_ctx();
        let (y_l, y_r) = trigger_boundaries(&ctx, 4.0).unwrap();
        // scan for the rightmost non-trigger below x and leftmost above x
        let mut scan_left = ctx.left_available;
        let mut scan_right = ctx.right_available;
        let steps = 110_000;
        for k in 0..=steps {
            let y = ctx.left_available
                + (ctx.right_available - ctx.left_available) * k as f64 / steps as f64;
            if !is_trigger_point(&ctx, y) {
                if y < 4.0 {
                    scan_left = y;
                } else if scan_right == ctx.right_available {
                    scan_right = y;
                }
            }
        }
        assert!((y_l - scan_left).abs() < 2e-4, "{y_l} vs scan {scan_left}");
        assert!((y_r - scan_right).abs() < 2e-4, "{y_r} vs scan {scan_right}");
    }

    #[test]
    fn trigger_set_is_single_interval_per_scan() {
        let ctx = counterexample_ctx();
        let spans = trigger_intervals(&ctx, 0.0, 11.0);
        assert_eq!(spans.len(), 1);
        let (lo, hi) = spans[0];
        assert!((lo - 3.0).abs() < 1e-9);
        assert!((hi - 5.0).abs() < 1e-9);
        // scan cross-check: membership flips at most twice
        let mut flips = 0;
        let mut last = is_trigger_point(&ctx, 0.0);
        for k in 1..=11_000 {
            let y = 11.0 * k as f64 / 11_000.0;
            let now = is_trigger_point(&ctx, y);
            if now != last {
                flips += 1;
                last = now;
            }
        }
        assert!(flips <= 2, "trigger set not an interval: {flips} flips");
    }

    #[test]
    fn normalized_cost_basics() {
        assert_eq!(normalized_cost(0.0, 0.3).unwrap(), 0.3);
        assert_eq!(normalized_cost(0.7, 0.5).unwrap(), 0.5);
        assert!((normalized_cost(0.2, 0.3).unwrap() - 0.38).abs() < 1e-15);
        // symmetry N(a, g) = N(1 - a, 1 - g)
        for &(a, g) in &[(0.1, 0.9), (0.25, 0.4), (0.8, 0.2)] {
            let lhs = normalized_cost(a, g).unwrap();
            let rhs = normalized_cost(1.0 - a, 1.0 - g).unwrap();
            assert!((lhs - rhs).abs() < 1e-15);
        }
        assert!(normalized_cost(-0.1, 0.5).is_err());
        assert!(normalized_cost(0.5, 1.5).is_err());
    }

    #[test]
    fn linear_map_basics() {
        assert_eq!(linear_map(2.0, 6.0, 4.0).unwrap(), 0.5);
        assert_eq!(linear_map(2.0, 6.0, 2.0).unwrap(), 0.0);
        assert_eq!(linear_map(2.0, 6.0, 6.0).unwrap(), 1.0);
        assert!(linear_map(5.0, 5.0, 5.0).is_err());
    }
}

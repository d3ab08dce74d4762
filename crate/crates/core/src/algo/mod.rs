//! The online algorithms: greedy, harmonic, doubled harmonic with its
//! adjustment operation, and modified doubled harmonic, together with the
//! exact per-request assignment distributions.

pub mod dh;
pub mod mdh;
pub mod pd;
pub mod runner;
pub mod state;

use serde::{Deserialize, Serialize};

use crate::matching::MatchingError;
use crate::rng::DrawSource;
use crate::trigger::TriggerError;

#[derive(Debug, Clone, PartialEq)]
pub enum AlgoError {
    NoAvailableServer,
    NoImaginaryServer,
    /// Both neighbor pseudo-distances are infinite; the pseudo-metric is
    /// disconnected at the request and no probability rule applies.
    DisconnectedPseudoMetric,
    BadIndices { i: usize, j: usize, len: usize },
    /// A request arrived where no server is available while the optimal
    /// cost to date is still zero; cannot instantiate an estimate.
    ZeroOptimalAtSetup,
    Matching(MatchingError),
    Trigger(TriggerError),
}

impl std::fmt::Display for AlgoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlgoError::NoAvailableServer => write!(f, "no available server remains"),
            AlgoError::NoImaginaryServer => write!(f, "no imaginary server in the required direction"),
            AlgoError::DisconnectedPseudoMetric => {
                write!(f, "pseudo-distance is infinite towards both neighbors")
            }
            AlgoError::BadIndices { i, j, len } => {
                write!(f, "bad server indices ({i}, {j}) for {len} servers")
            }
            AlgoError::ZeroOptimalAtSetup => {
                write!(f, "cannot set an estimate while the optimal cost to date is zero")
            }
            AlgoError::Matching(e) => write!(f, "{e}"),
            AlgoError::Trigger(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AlgoError {}

/// Which rule served a request. The numbered cases belong to modified
/// doubled harmonic; the `Dh*` variants label doubled harmonic's imaginary
/// moves; `Init` marks the arrival that instantiated the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    PreEstimate,
    Init,
    Case1,
    Case2,
    Case3,
    Case4Left,
    Case4Right,
    Case4Colocated,
    Case4Stationary,
    Case5A,
    Case5B,
    Case5C,
    Case5D,
    DhColocated,
    DhForcedLeft,
    DhForcedRight,
    DhDraw,
    Greedy,
    Harmonic,
}

impl From<MatchingError> for AlgoError {
    fn from(e: MatchingError) -> Self {
        AlgoError::Matching(e)
    }
}

impl From<TriggerError> for AlgoError {
    fn from(e: TriggerError) -> Self {
        AlgoError::Trigger(e)
    }
}

/// Exact probability over the servers a single request could be assigned
/// to. For the neighbor algorithms the support has at most two entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentDistribution {
    /// `(server index, probability)` sorted by server index; zero-probability
    /// entries are dropped and the probabilities sum to 1.
    pub entries: Vec<(usize, f64)>,
}

impl AssignmentDistribution {
    pub fn certain(server: usize) -> Self {
        AssignmentDistribution {
            entries: vec![(server, 1.0)],
        }
    }

    /// Two-point distribution; `left` must be a smaller index than `right`.
    pub fn split(left: usize, right: usize, p_right: f64) -> Self {
        debug_assert!(left < right);
        debug_assert!((0.0..=1.0).contains(&p_right));
        if p_right <= 0.0 {
            Self::certain(left)
        } else if p_right >= 1.0 {
            Self::certain(right)
        } else {
            AssignmentDistribution {
                entries: vec![(left, 1.0 - p_right), (right, p_right)],
            }
        }
    }

    pub fn probability_of(&self, server: usize) -> f64 {
        self.entries
            .iter()
            .find(|(s, _)| *s == server)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(s, _)| *s)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Samples a server; consumes one draw only for genuine two-point cases.
    pub fn sample(&self, draws: &mut dyn DrawSource) -> usize {
        match self.entries.len() {
            1 => self.entries[0].0,
            2 => {
                if draws.choose_right(self.entries[1].1) {
                    self.entries[1].0
                } else {
                    self.entries[0].0
                }
            }
            n => unreachable!("neighbor distributions have support 1 or 2, got {n}"),
        }
    }
}

//! Problem instances: fixed servers on the line plus an ordered request
//! sequence. The JSON on-disk form is `{"servers": [..], "requests": [..]}`
//! with requests in arrival order.

use serde::{Deserialize, Serialize};

/// Minimum distance required between adjacent servers in strict mode.
pub const MIN_SERVER_GAP: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub servers: Vec<f64>,
    pub requests: Vec<f64>,
}

impl Instance {
    pub fn new(servers: Vec<f64>, requests: Vec<f64>) -> Self {
        Instance { servers, requests }
    }

    pub fn n(&self) -> usize {
        self.servers.len()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    /// Stable FNV-1a digest over the raw coordinate bits, for report rows.
    pub fn digest(&self) -> String {
        let mut hash: u64 = 0xcbf29ce484222325;
        let mut eat = |v: f64| {
            for b in v.to_bits().to_le_bytes() {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
        };
        for &s in &self.servers {
            eat(s);
        }
        eat(f64::NAN); // separator between sections
        for &r in &self.requests {
            eat(r);
        }
        format!("{hash:016x}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationWarning {
    /// Servers arrived unsorted and were sorted in place.
    UnsortedServers,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    MinGapViolation { left: f64, right: f64, gap: f64 },
    RequestOffServer { index: usize, position: f64 },
    TooManyRequests { requests: usize, servers: usize },
    RequestCountMismatch { requests: usize, servers: usize },
    EmptyServers,
    NotFinite,
}

impl std::fmt::Display for InstanceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InstanceError::MinGapViolation { left, right, gap } => write!(
                f,
                "servers {left} and {right} are {gap} apart, below the strict minimum of {MIN_SERVER_GAP}"
            ),
            InstanceError::RequestOffServer { index, position } => write!(
                f,
                "request {index} at {position} does not coincide with a server (strict mode)"
            ),
            InstanceError::TooManyRequests { requests, servers } => {
                write!(f, "{requests} requests exceed {servers} servers")
            }
            InstanceError::RequestCountMismatch { requests, servers } => write!(
                f,
                "strict mode requires one request per server: {requests} requests, {servers} servers"
            ),
            InstanceError::EmptyServers => write!(f, "instance has no servers"),
            InstanceError::NotFinite => write!(f, "instance contains non-finite coordinates"),
        }
    }
}

impl std::error::Error for InstanceError {}

/// An instance whose servers are known to be sorted, and which passed the
/// strict checks if `strict` was requested.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidatedInstance {
    servers: Vec<f64>,
    requests: Vec<f64>,
    strict: bool,
}

impl ValidatedInstance {
    pub fn servers(&self) -> &[f64] {
        &self.servers
    }

    pub fn requests(&self) -> &[f64] {
        &self.requests
    }

    pub fn n(&self) -> usize {
        self.servers.len()
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn as_instance(&self) -> Instance {
        Instance::new(self.servers.clone(), self.requests.clone())
    }
}

/// Validates an instance. Servers are sorted if needed (with a warning); in
/// strict mode every adjacent gap must be at least [`MIN_SERVER_GAP`], every
/// request must sit on a server, and request and server counts must agree.
pub fn validate_instance(
    inst: &Instance,
    strict: bool,
) -> Result<(ValidatedInstance, Vec<ValidationWarning>), InstanceError> {
    if inst.servers.is_empty() {
        return Err(InstanceError::EmptyServers);
    }
    if inst.servers.iter().chain(&inst.requests).any(|v| !v.is_finite()) {
        return Err(InstanceError::NotFinite);
    }
    let mut warnings = Vec::new();
    let mut servers = inst.servers.clone();
    if servers.windows(2).any(|w| w[0] > w[1]) {
        servers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        warnings.push(ValidationWarning::UnsortedServers);
    }
    if strict {
        for w in servers.windows(2) {
            let gap = w[1] - w[0];
            if gap < MIN_SERVER_GAP {
                return Err(InstanceError::MinGapViolation {
                    left: w[0],
                    right: w[1],
                    gap,
                });
            }
        }
        if inst.requests.len() != servers.len() {
            return Err(InstanceError::RequestCountMismatch {
                requests: inst.requests.len(),
                servers: servers.len(),
            });
        }
        for (index, &position) in inst.requests.iter().enumerate() {
            if servers.binary_search_by(|s| s.partial_cmp(&position).unwrap()).is_err() {
                return Err(InstanceError::RequestOffServer { index, position });
            }
        }
    } else if inst.requests.len() > servers.len() {
        return Err(InstanceError::TooManyRequests {
            requests: inst.requests.len(),
            servers: servers.len(),
        });
    }
    Ok((
        ValidatedInstance {
            servers,
            requests: inst.requests.clone(),
            strict,
        },
        warnings,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_instance_is_strict_valid() {
        let inst = Instance::new(vec![0.0, 4.0, 11.0, 31.0], vec![4.0, 4.0, 4.0, 0.0]);
        let (v, warnings) = validate_instance(&inst, true).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(v.servers(), &[0.0, 4.0, 11.0, 31.0]);
    }

    #[test]
    fn tight_gap_rejected_in_strict_mode() {
        let inst = Instance::new(vec![0.0, 0.5], vec![0.0, 0.5]);
        assert!(matches!(
            validate_instance(&inst, true),
            Err(InstanceError::MinGapViolation { .. })
        ));
        // fine without strict mode
        assert!(validate_instance(&inst, false).is_ok());
    }

    #[test]
    fn unsorted_servers_sorted_with_warning() {
        let inst = Instance::new(vec![3.0, 1.0, 2.0], vec![]);
        let (v, warnings) = validate_instance(&inst, false).unwrap();
        assert_eq!(v.servers(), &[1.0, 2.0, 3.0]);
        assert_eq!(warnings, vec![ValidationWarning::UnsortedServers]);
    }

    #[test]
    fn off_server_request_rejected_in_strict_mode() {
        let inst = Instance::new(vec![0.0, 5.0], vec![2.5, 0.0]);
        assert!(matches!(
            validate_instance(&inst, true),
            Err(InstanceError::RequestOffServer { index: 0, .. })
        ));
    }

    #[test]
    fn request_overflow_rejected() {
        let inst = Instance::new(vec![0.0], vec![0.0, 0.0]);
        assert!(matches!(
            validate_instance(&inst, false),
            Err(InstanceError::TooManyRequests { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let inst = Instance::new(vec![0.0, 4.0], vec![4.0, 4.0]);
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.digest(), inst.digest());
    }
}

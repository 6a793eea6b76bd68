//! Pairwise connection of (r-1)-tuples by vertex-disjoint tight paths.
//!
//! Each pair is handled in its own phase: grow a fan from the start tuple
//! inside the parts Y_1..Y_2r of the working set, grow a second fan from
//! the (reversed) end tuple inside Y'_1..Y'_2r, then expose all unblocked
//! length-2(r-1) bridges between the two leaf sets and take the first one
//! that appears. Dangerous-set filtering keeps fan growth away from
//! overexposed tuples so later phases still find fresh randomness.
//!
//! Strict mode pins every threshold to its defining formula, which at desk
//! scale makes thresholds like xi*n collapse below 1; it is intended for
//! contract tests on forced instances. Practical mode keeps every
//! structural rule but opens the numeric windows so runs at reachable n
//! can succeed.

mod danger;
mod fan;
mod run;

pub use danger::{compute_danger_sets, compute_temp_danger, is_blocked, DangerRegistry};
pub use fan::Fan;
pub use run::{bad_vertices, connect_all, partition_x};

use crate::hypergraph::TightPath;
use crate::set::Vertex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectMode {
    Strict,
    Practical,
}

/// All thresholds of the connection algorithms, pinned at construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConnectorConfig {
    pub n: usize,
    pub r: usize,
    pub eps: f64,
    pub delta: f64,
    pub mode: ConnectMode,
    /// Danger threshold factor: a tuple is dangerous at exposure degree
    /// >= xi * n.
    pub xi: f64,
    /// Temporarily-dangerous factor: blocked for >= xi' * |L| leaves.
    pub xi_prime: f64,
    /// Pair budget: at most eta * n pairs per request (floored at 1 in
    /// practical mode).
    pub eta: f64,
    /// Fans stop growing once their width reaches this.
    pub width_target: f64,
    /// Acceptance window for the per-step candidate count |C|.
    pub c_min: f64,
    pub c_max: f64,
    /// Practical mode truncates |C| > c_max to the first c_max candidates
    /// instead of failing.
    pub truncate_overflow: bool,
    /// Multiplicity caps for j-sets in the per-phase used multiset,
    /// indexed by j-1. A used set whose multiplicity exceeds the cap makes
    /// further reuse bad.
    pub mult_caps: Vec<f64>,
    /// From this set size upward a consecutive interval may be used at most
    /// once per phase; keeps fans coherent.
    pub unique_from_level: usize,
    /// Maximum fan levels before giving up (practical-mode guard).
    pub level_budget: usize,
    /// Scan bridges pair by pair and stop at the first appearing one
    /// instead of exposing all unblocked bridges first.
    pub early_exit_bridge: bool,
    /// Below this |X| the fans stay at their roots (practical mode only).
    pub min_x: usize,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn paper_mult_caps(r: usize, n: usize, eps: f64, xi: f64) -> Vec<f64> {
    (1..r)
        .map(|j| {
            xi.powi((r - j) as i32)
                * (n as f64).powf((r as f64 - 1.0) / 2.0 - j as f64 * (1.0 - eps))
        })
        .collect()
}

impl ConnectorConfig {
    /// Paper constants throughout.
    pub fn strict(n: usize, r: usize, eps: f64, delta: f64) -> Self {
        let rf = r as f64;
        let xi_prime = delta / (48.0 * rf * rf);
        let xi = xi_prime.powi(r as i32) / (rf * rf * factorial(r - 1));
        let eta = delta / (16.0 * rf);
        let nf = n as f64;
        ConnectorConfig {
            n,
            r,
            eps,
            delta,
            mode: ConnectMode::Strict,
            xi,
            xi_prime,
            eta,
            width_target: nf.powf((rf - 1.0) / 2.0 - eps / 2.0),
            c_min: delta * nf.powf(eps) / (16.0 * rf),
            c_max: delta * nf.powf(eps) / (2.0 * rf),
            truncate_overflow: false,
            mult_caps: paper_mult_caps(r, n, eps, xi),
            unique_from_level: r.div_ceil(2),
            level_budget: usize::MAX,
            early_exit_bridge: false,
            min_x: 4 * r,
        }
    }

    /// Structural rules unchanged; numeric windows opened for desk scale.
    pub fn practical(n: usize, r: usize, eps: f64, delta: f64) -> Self {
        let rf = r as f64;
        let nf = n as f64;
        let xi = 0.125;
        let xi_prime = 0.125;
        let unique_from_level = r.div_ceil(2);
        let caps = paper_mult_caps(r, n, eps, xi)
            .into_iter()
            .enumerate()
            .map(|(idx, cap)| {
                // sets of size >= ceil(r/2) stay single-use so fans remain coherent
                if idx + 1 >= unique_from_level {
                    0.0
                } else {
                    cap.max(1.0)
                }
            })
            .collect();
        // a level draws all extensions from one part of size delta n/(4r),
        // and each vertex there can extend at most cap(1)+1 paths; capping
        // the width target at 1.5 parts keeps the last level feasible at
        // small n (asymptotically the paper target is far below this)
        let sustainable = (1.5 * delta * nf / (4.0 * rf)).max(4.0);
        ConnectorConfig {
            n,
            r,
            eps,
            delta,
            mode: ConnectMode::Practical,
            xi,
            xi_prime,
            eta: delta / (16.0 * rf),
            width_target: nf.powf((rf - 1.0) / 2.0 - eps / 2.0).min(sustainable),
            c_min: 1.0,
            c_max: (delta * nf.powf(eps) / (2.0 * rf)).ceil().max(8.0),
            truncate_overflow: true,
            mult_caps: caps,
            unique_from_level,
            level_budget: ((4.0 * rf) / eps).ceil() as usize,
            early_exit_bridge: false,
            min_x: 4 * r,
        }
    }

    pub fn mult_cap(&self, j: usize) -> f64 {
        self.mult_caps[j - 1]
    }

    pub fn max_pairs(&self) -> usize {
        let cap = (self.eta * self.n as f64).floor() as usize;
        match self.mode {
            ConnectMode::Strict => cap,
            ConnectMode::Practical => cap.max(1),
        }
    }
}

/// One connection task: pairwise disjoint ordered (r-1)-tuples to join by
/// vertex-disjoint tight paths with interiors inside `x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConnectionRequest {
    /// (start tuple, end tuple) per pair; each produced path starts with
    /// the first tuple and ends with the second, both in the given order.
    pub pairs: Vec<(Vec<Vertex>, Vec<Vertex>)>,
    pub x: Vec<Vertex>,
    /// Exact vertex-count targets per pair (the disjoint-cycles variant);
    /// `None` leaves lengths free.
    #[serde(default)]
    pub target_lengths: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseStats {
    pub fan_u_width: usize,
    pub fan_u_levels: usize,
    pub fan_v_width: usize,
    pub fan_v_levels: usize,
    pub bridge_pairs: usize,
    pub bridge_unblocked: usize,
    pub bridge_windows_exposed: usize,
    pub path_len: usize,
    /// Bookkeeping bound e(H_{i+1}) <= 2^{2r+1} (i+1) n^{r-1-eps/2},
    /// evaluated on the over-counting upper estimate of e(H).
    pub ledger_bound_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConnectionResult {
    pub paths: Vec<Vec<Vertex>>,
    pub stats: Vec<PhaseStats>,
}

impl ConnectionResult {
    pub fn tight_paths(&self) -> Vec<TightPath> {
        self.paths
            .iter()
            .map(|p| TightPath::new(p.clone()).expect("paths are distinct-vertex"))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum ConnectError {
    #[error("phase {phase}: |C| = {got} outside window [{lo:.3}, {hi:.3}] at fan level {level}")]
    WidthWindowFailure {
        phase: usize,
        got: usize,
        lo: f64,
        hi: f64,
        level: usize,
    },
    #[error("phase {phase}: no bridge appeared ({unblocked} unblocked of {pairs} pairs)")]
    BridgeFailure {
        phase: usize,
        pairs: usize,
        unblocked: usize,
    },
    #[error("phase {phase}: fan exceeded level budget {budget}")]
    LevelBudgetExceeded { phase: usize, budget: usize },
    #[error("phase {phase}: exact-length target {target} unattainable: {reason}")]
    LengthUnattainable {
        phase: usize,
        target: usize,
        reason: String,
    },
    #[error("working set too small: |X| = {got}, need {need}")]
    XTooSmall { got: usize, need: usize },
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("too many pairs: k = {k} exceeds eta n = {max}")]
    TooManyPairs { k: usize, max: usize },
    #[error("tuples intersect")]
    TuplesIntersect,
    #[error(transparent)]
    Exposure(#[from] crate::exposure::ExposureError),
    #[error("internal contract violation: {0}")]
    Internal(String),
}

impl ConnectError {
    /// The phase a stage-specific failure is tagged with.
    pub fn phase(&self) -> Option<usize> {
        match self {
            ConnectError::WidthWindowFailure { phase, .. }
            | ConnectError::BridgeFailure { phase, .. }
            | ConnectError::LevelBudgetExceeded { phase, .. }
            | ConnectError::LengthUnattainable { phase, .. } => Some(*phase),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_constants_match_formulas() {
        let cfg = ConnectorConfig::strict(10_000, 3, 0.5, 0.5);
        assert!((cfg.xi_prime - 0.5 / (48.0 * 9.0)).abs() < 1e-15);
        let xp: f64 = 0.5 / 432.0;
        assert!((cfg.xi - xp.powi(3) / (9.0 * 2.0)).abs() < 1e-18);
        assert!((cfg.eta - 0.5 / 48.0).abs() < 1e-15);
        // width target n^{(r-1)/2 - eps/2} = (10^4)^{0.75} = 1000
        assert!((cfg.width_target - 1000.0).abs() < 1e-6);
        // |C| window [0.5*100/48, 0.5*100/6]: integers 2..=8 accepted
        assert!((cfg.c_min - 0.5 * 100.0 / 48.0).abs() < 1e-9);
        assert!((cfg.c_max - 0.5 * 100.0 / 6.0).abs() < 1e-9);
        assert!(1.0 < cfg.c_min && 2.0 > cfg.c_min);
        assert!(8.0 < cfg.c_max && 9.0 > cfg.c_max);
    }

    #[test]
    fn practical_floors() {
        let cfg = ConnectorConfig::practical(5_000, 3, 0.5, 0.5);
        assert_eq!(cfg.c_min, 1.0);
        assert!(cfg.c_max >= 8.0);
        assert!(cfg.truncate_overflow);
        // pair-level sets are single-use
        assert_eq!(cfg.mult_cap(2), 0.0);
        assert!(cfg.mult_cap(1) >= 1.0);
        assert_eq!(cfg.unique_from_level, 2);
        assert_eq!(cfg.level_budget, 24);
        assert!(cfg.max_pairs() >= 1);
    }
}

//! Multi-round exposure of r-sets: deterministic seeded coins, the expose
//! ledger, and the colouring split of an explicit input graph.
//!
//! Two operating modes. In lazy-coin mode every round is a virtual
//! `G^(r)(n, p_round)` whose membership is computed on demand from a keyed
//! hash, so nothing is materialized. In explicit-graph mode each round holds
//! a concrete edge set (normally produced by [`split::split_explicit`]) and
//! the "coin" is membership in that set. In both modes the ledger enforces
//! that no r-set is ever exposed twice.

mod ledger;
mod sip;
pub mod split;

pub use ledger::{ExposureLedger, LeafPairRecord};
pub use sip::siphash24;

use crate::hypergraph::RUniformHypergraph;
use crate::set::{pack_set, FastSet, SetKey, Vertex};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExposureError {
    #[error("r-set {set:?} already exposed (round {prev_round})")]
    AlreadyExposed { set: Vec<Vertex>, prev_round: usize },
    #[error("round {round} out of range (1..={rounds})")]
    BadRound { round: usize, rounds: usize },
    #[error("set has {got} vertices, expected {expected}")]
    WrongArity { expected: usize, got: usize },
}

/// Where one round's randomness comes from.
#[derive(Debug, Clone)]
pub enum RoundSource {
    /// Bernoulli(p) per r-set, realized by a keyed hash of
    /// (master_seed, round, canonical set).
    Coin { p: f64 },
    /// A concrete edge set; the coin is membership.
    Explicit { edges: FastSet<SetKey> },
}

#[derive(Debug, Clone)]
pub struct ExposureConfig {
    pub n: usize,
    pub r: usize,
    pub master_seed: u64,
    pub rounds: Vec<RoundSource>,
}

impl ExposureConfig {
    pub fn lazy(n: usize, r: usize, master_seed: u64, probs: &[f64]) -> Self {
        ExposureConfig {
            n,
            r,
            master_seed,
            rounds: probs.iter().map(|&p| RoundSource::Coin { p }).collect(),
        }
    }

    pub fn explicit(n: usize, r: usize, master_seed: u64, graphs: &[RUniformHypergraph]) -> Self {
        let rounds = graphs
            .iter()
            .map(|g| RoundSource::Explicit {
                edges: g.edges().map(|e| pack_set(&e)).collect(),
            })
            .collect();
        ExposureConfig {
            n,
            r,
            master_seed,
            rounds,
        }
    }

    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    fn check_round(&self, round: usize) -> Result<(), ExposureError> {
        if round == 0 || round > self.rounds.len() {
            return Err(ExposureError::BadRound {
                round,
                rounds: self.rounds.len(),
            });
        }
        Ok(())
    }

    /// The exposure coin for canonical set key `key` in `round` (1-based).
    /// Pure: the same (seed, round, set) always answers the same.
    pub fn coin_key(&self, round: usize, key: SetKey) -> bool {
        match &self.rounds[round - 1] {
            RoundSource::Coin { p } => {
                if *p <= 0.0 {
                    return false;
                }
                if *p >= 1.0 {
                    return true;
                }
                let mut msg = [0u8; 20];
                msg[..4].copy_from_slice(&(round as u32).to_le_bytes());
                msg[4..].copy_from_slice(&key.to_le_bytes());
                let k0 = self.master_seed;
                let k1 = crate::set::mix64(self.master_seed ^ 0x7469_6768_7468_616d);
                sip::unit_from_hash(sip::siphash24(k0, k1, &msg)) < *p
            }
            RoundSource::Explicit { edges } => edges.contains(&key),
        }
    }

    /// Coin for an r-set given as vertices (any order).
    pub fn coin(&self, round: usize, e: &[Vertex]) -> Result<bool, ExposureError> {
        self.check_round(round)?;
        if e.len() != self.r {
            return Err(ExposureError::WrongArity {
                expected: self.r,
                got: e.len(),
            });
        }
        Ok(self.coin_key(round, pack_set(e)))
    }
}

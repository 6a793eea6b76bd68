//! Randomised split of one explicit G^(r)(n, q) into five hypergraphs,
//! G1 ~ G(n, q'') and G2..G5 ~ G(n, q'), mutually independent.
//!
//! Each edge independently receives a non-empty colour subset c of {1..5}:
//!
//! - P(c) = q'^|c| (1-q')^(4-|c|) (1-q'') / q   when 1 not in c,
//! - P(c) = q'^(|c|-1) (1-q')^(5-|c|) q'' / q   when 1 in c,
//!
//! and G_i collects the edges whose colour contains i. The parameters must
//! satisfy 1 - q = (1 - q'')(1 - q')^4, which makes the distribution sum
//! to one.

use super::sip::{siphash24, unit_from_hash};
use crate::hypergraph::RUniformHypergraph;
use crate::set::{pack_set, SetKey};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("infeasible probabilities: {0}")]
    InfeasibleProbabilities(String),
}

const REL_TOL: f64 = 1e-12;

/// Solves 1 - q = (1 - q'')(1 - q')^4 for q''.
pub fn solve_q_double_prime(q: f64, q_prime: f64) -> f64 {
    1.0 - (1.0 - q) / (1.0 - q_prime).powi(4)
}

/// Probability of each non-empty colour subset, indexed by bitmask 1..=31
/// (bit 0 = colour 1, ..., bit 4 = colour 5). Index 0 is unused.
pub fn colour_distribution(q: f64, q_prime: f64, q_pp: f64) -> Result<[f64; 32], SplitError> {
    let lhs = 1.0 - q;
    let rhs = (1.0 - q_pp) * (1.0 - q_prime).powi(4);
    let scale = lhs.abs().max(rhs.abs()).max(1e-30);
    if (lhs - rhs).abs() > REL_TOL * scale {
        return Err(SplitError::InfeasibleProbabilities(format!(
            "identity 1-q = (1-q'')(1-q')^4 violated: {lhs:.17} vs {rhs:.17}"
        )));
    }
    if q_pp < q_prime - REL_TOL {
        return Err(SplitError::InfeasibleProbabilities(format!(
            "q'' = {q_pp} < q' = {q_prime}; requires q >= 1-(1-q')^5"
        )));
    }
    if !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&q_prime) || !(0.0..=1.0).contains(&q_pp)
    {
        return Err(SplitError::InfeasibleProbabilities(
            "probabilities must be in [0,1]".into(),
        ));
    }
    if q <= 0.0 {
        return Err(SplitError::InfeasibleProbabilities(
            "q must be positive to colour edges of G(n,q)".into(),
        ));
    }
    let mut dist = [0.0f64; 32];
    for mask in 1u32..32 {
        let size = mask.count_ones() as i32;
        dist[mask as usize] = if mask & 1 == 1 {
            q_prime.powi(size - 1) * (1.0 - q_prime).powi(5 - size) * q_pp / q
        } else {
            q_prime.powi(size) * (1.0 - q_prime).powi(4 - size) * (1.0 - q_pp) / q
        };
    }
    Ok(dist)
}

/// Deterministic colour of one edge under the seeded split.
pub fn colour_of_edge(seed: u64, key: SetKey, dist: &[f64; 32]) -> u8 {
    let mut msg = [0u8; 20];
    msg[..4].copy_from_slice(&u32::MAX.to_le_bytes()); // split tag, distinct from round ids
    msg[4..].copy_from_slice(&key.to_le_bytes());
    let k1 = crate::set::mix64(seed ^ 0x7370_6c69_745f_3531);
    let u = unit_from_hash(siphash24(seed, k1, &msg));
    let mut cum = 0.0;
    for mask in 1u32..32 {
        cum += dist[mask as usize];
        if u < cum {
            return mask as u8;
        }
    }
    31 // float tail: total cum == 1 - O(eps)
}

/// Splits `g` into five graphs; the union of the parts is exactly `g`.
pub fn split_explicit(
    g: &RUniformHypergraph,
    q: f64,
    q_prime: f64,
    q_pp: f64,
    seed: u64,
) -> Result<[RUniformHypergraph; 5], SplitError> {
    let dist = colour_distribution(q, q_prime, q_pp)?;
    let mut parts: Vec<RUniformHypergraph> = (0..5)
        .map(|_| RUniformHypergraph::new(g.n(), g.r()).expect("valid params"))
        .collect();
    for e in g.sorted_edges() {
        let colour = colour_of_edge(seed, pack_set(&e), &dist);
        for (i, part) in parts.iter_mut().enumerate() {
            if colour >> i & 1 == 1 {
                part.add_edge(&e).expect("valid edge");
            }
        }
    }
    let mut it = parts.into_iter();
    Ok([
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gnp;
    use crate::set::FastSet;

    #[test]
    fn distribution_sums_to_one() {
        let (q, qp) = (0.05, 0.01);
        let qpp = solve_q_double_prime(q, qp);
        assert!(qpp >= qp);
        let dist = colour_distribution(q, qp, qpp).unwrap();
        let total: f64 = dist.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "sum = {total:.15}");
    }

    #[test]
    fn infeasible_identity_rejected() {
        assert!(matches!(
            colour_distribution(0.05, 0.01, 0.5),
            Err(SplitError::InfeasibleProbabilities(_))
        ));
        // q below 1-(1-q')^5 makes q'' < q'
        let q = 0.02;
        let qp = 0.01;
        let qpp = solve_q_double_prime(q, qp);
        assert!(qpp < qp);
        assert!(colour_distribution(q, qp, qpp).is_err());
    }

    #[test]
    fn degenerate_q_prime_zero() {
        // q' = 0: every edge coloured {1}, G1 = G, rest empty
        let g = gnp(30, 3, 0.2, 5).unwrap();
        let qpp = solve_q_double_prime(0.2, 0.0);
        assert!((qpp - 0.2).abs() < 1e-15);
        let parts = split_explicit(&g, 0.2, 0.0, qpp, 9).unwrap();
        assert_eq!(parts[0].sorted_edges(), g.sorted_edges());
        for p in &parts[1..] {
            assert_eq!(p.edge_count(), 0);
        }
    }

    #[test]
    fn union_is_exact_partition_of_colours() {
        let g = gnp(25, 3, 0.3, 17).unwrap();
        let q = 0.3;
        let qp = 0.05;
        let qpp = solve_q_double_prime(q, qp);
        let parts = split_explicit(&g, q, qp, qpp, 3).unwrap();
        let mut union: FastSet<u128> = FastSet::default();
        for p in &parts {
            for e in p.edges() {
                let key = crate::set::pack_set(&e);
                assert!(g.has_edge(&e), "part edge not in G");
                union.insert(key);
            }
        }
        assert_eq!(union.len(), g.edge_count(), "every edge got a colour");
        // determinism
        let again = split_explicit(&g, q, qp, qpp, 3).unwrap();
        for (a, b) in parts.iter().zip(again.iter()) {
            assert_eq!(a.sorted_edges(), b.sorted_edges());
        }
    }

    #[test]
    fn marginal_rate_of_round_two() {
        // P(2 in colour | edge) = q'/q; check over many seeds for one edge
        let q = 0.05;
        let qp = 0.01;
        let qpp = solve_q_double_prime(q, qp);
        let dist = colour_distribution(q, qp, qpp).unwrap();
        let key = crate::set::pack_sorted(&[3, 7, 19]);
        let trials = 20_000u32;
        let mut hits = 0u32;
        for seed in 0..trials {
            let c = colour_of_edge(seed as u64, key, &dist);
            if c >> 1 & 1 == 1 {
                hits += 1;
            }
        }
        let want = qp / q;
        let sd = (want * (1.0 - want) / trials as f64).sqrt();
        let got = hits as f64 / trials as f64;
        assert!(
            (got - want).abs() < 4.0 * sd,
            "marginal {got:.4} vs {want:.4} (sd {sd:.5})"
        );
    }
}

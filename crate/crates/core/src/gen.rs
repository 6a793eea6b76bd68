//! Deterministic hypergraph generators: tight cycles, complete graphs and
//! explicit G^(r)(n, p) samples.

use crate::hypergraph::{HypergraphError, RUniformHypergraph};
use crate::set::{binomial, Vertex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error(transparent)]
    Graph(#[from] HypergraphError),
    #[error("instance too large: expected {expected:.3e} edges exceeds budget {budget:.1e}")]
    TooLarge { expected: f64, budget: f64 },
    #[error("invalid probability {p}")]
    BadProbability { p: f64 },
}

/// The tight cycle C^(r)_l: edges {i, i+1, ..., i+r-1} mod l for all i.
pub fn tight_cycle(l: usize, r: usize) -> Result<RUniformHypergraph, HypergraphError> {
    let mut g = RUniformHypergraph::new(l, r)?;
    if l < r {
        return Ok(g);
    }
    for i in 0..l {
        let e: Vec<Vertex> = (0..r).map(|j| ((i + j) % l) as Vertex).collect();
        g.add_edge(&e)?;
    }
    Ok(g)
}

/// Complete r-uniform hypergraph on n vertices.
pub fn complete(n: usize, r: usize) -> Result<RUniformHypergraph, HypergraphError> {
    let mut g = RUniformHypergraph::new(n, r)?;
    let items: Vec<Vertex> = (0..n as Vertex).collect();
    crate::set::for_each_subset(&items, r, |e| {
        g.add_edge(e).expect("valid edge");
    });
    Ok(g)
}

const EDGE_BUDGET: f64 = 1e8;

/// Samples G^(r)(n, p) explicitly: every r-set independently with
/// probability p. Geometric skipping over the lexicographic enumeration of
/// r-sets keeps the cost proportional to the number of edges drawn.
pub fn gnp(n: usize, r: usize, p: f64, seed: u64) -> Result<RUniformHypergraph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::BadProbability { p });
    }
    let total = binomial(n as u64, r as u64);
    let expected = total as f64 * p;
    if expected > EDGE_BUDGET {
        return Err(GenError::TooLarge {
            expected,
            budget: EDGE_BUDGET,
        });
    }
    let mut g = RUniformHypergraph::new(n, r)?;
    if p == 0.0 || total == 0 {
        return Ok(g);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    if p >= 1.0 {
        if total > EDGE_BUDGET as u128 {
            return Err(GenError::TooLarge {
                expected: total as f64,
                budget: EDGE_BUDGET,
            });
        }
        let items: Vec<Vertex> = (0..n as Vertex).collect();
        crate::set::for_each_subset(&items, r, |e| {
            g.add_edge(e).expect("valid edge");
        });
        return Ok(g);
    }
    // skip-length sampling: next included index is current + 1 + Geom(p)
    let log1p = (1.0 - p).ln();
    let mut idx: i128 = -1;
    loop {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let skip = (u.ln() / log1p).floor() as i128;
        idx += 1 + skip;
        if idx as u128 >= total {
            break;
        }
        g.add_edge(&unrank(idx as u128, n, r))
            .expect("valid edge");
    }
    Ok(g)
}

/// Lexicographic unranking of the `idx`-th r-subset of [0, n).
fn unrank(mut idx: u128, n: usize, r: usize) -> Vec<Vertex> {
    let mut out = Vec::with_capacity(r);
    let mut prev: i64 = -1;
    for pos in 0..r {
        let remaining = r - pos - 1;
        let mut v = (prev + 1) as u64;
        loop {
            let block = binomial(n as u64 - v - 1, remaining as u64);
            if idx < block {
                break;
            }
            idx -= block;
            v += 1;
        }
        out.push(v as Vertex);
        prev = v as i64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_cycle_counts_and_density() {
        for l in 4..=9 {
            let g = tight_cycle(l, 3).unwrap();
            assert_eq!(g.edge_count(), l);
            assert_eq!(
                g.one_density(),
                num_rational::Ratio::new(l as i64, l as i64 - 1)
            );
        }
        for (l, r) in [(5, 4), (7, 5)] {
            let g = tight_cycle(l, r).unwrap();
            assert_eq!(g.edge_count(), l);
        }
    }

    #[test]
    fn unrank_is_lexicographic() {
        let mut all = Vec::new();
        let items: Vec<Vertex> = (0..6).collect();
        crate::set::for_each_subset(&items, 3, |s| all.push(s.to_vec()));
        all.sort();
        for (i, want) in all.iter().enumerate() {
            assert_eq!(&unrank(i as u128, 6, 3), want);
        }
    }

    #[test]
    fn gnp_extremes() {
        let g0 = gnp(10, 3, 0.0, 1).unwrap();
        assert_eq!(g0.edge_count(), 0);
        let g1 = gnp(6, 3, 1.0, 1).unwrap();
        assert_eq!(g1.edge_count(), 20);
    }

    #[test]
    fn gnp_deterministic_and_plausible() {
        let a = gnp(30, 3, 0.1, 42).unwrap();
        let b = gnp(30, 3, 0.1, 42).unwrap();
        assert_eq!(a.sorted_edges(), b.sorted_edges());
        let c = gnp(30, 3, 0.1, 43).unwrap();
        assert_ne!(a.sorted_edges(), c.sorted_edges());
        // mean = 406; allow a wide deterministic band
        let m = a.edge_count() as f64;
        assert!(m > 406.0 * 0.5 && m < 406.0 * 1.5, "edge count {m}");
    }
}

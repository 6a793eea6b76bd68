//! Independent brute-force verifiers and small-instance oracles.
//!
//! Everything here is deliberately simple and separate from the algorithm
//! code paths it checks: verification walks windows directly, density search
//! enumerates induced subgraphs, Hamiltonicity is an exact bitmask DP.

use crate::hypergraph::{Density, RUniformHypergraph, TightPath};
use crate::set::{pack_set, FastMap, FastSet, SetKey, Vertex};
use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large for the exact oracle: {0}")]
    TooLarge(String),
}

/// Outcome of a structural verification; `first_violation` explains the
/// earliest failure when rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationVerdict {
    pub accepted: bool,
    pub first_violation: Option<String>,
}

impl VerificationVerdict {
    fn ok() -> Self {
        VerificationVerdict {
            accepted: true,
            first_violation: None,
        }
    }

    fn fail(msg: String) -> Self {
        VerificationVerdict {
            accepted: false,
            first_violation: Some(msg),
        }
    }
}

/// Edge membership used by the verifiers; lets pipeline output be checked
/// against the set of appeared r-sets without materializing a graph.
pub trait EdgeMembership {
    fn contains_key(&self, key: SetKey) -> bool;
}

impl EdgeMembership for RUniformHypergraph {
    fn contains_key(&self, key: SetKey) -> bool {
        self.has_edge_key(key)
    }
}

impl EdgeMembership for FastSet<SetKey> {
    fn contains_key(&self, key: SetKey) -> bool {
        self.contains(&key)
    }
}

impl<F: Fn(SetKey) -> bool> EdgeMembership for F {
    fn contains_key(&self, key: SetKey) -> bool {
        self(key)
    }
}

fn duplicate_in(seq: &[Vertex]) -> Option<Vertex> {
    let mut seen = FastSet::default();
    seq.iter().find(|&&v| !seen.insert(v)).copied()
}

/// Accepts iff the vertices are distinct and every r consecutive vertices
/// form an edge. Sequences shorter than r are vacuously tight.
pub fn verify_tight_path_in<E: EdgeMembership>(
    host: &E,
    r: usize,
    seq: &[Vertex],
) -> VerificationVerdict {
    if let Some(v) = duplicate_in(seq) {
        return VerificationVerdict::fail(format!("duplicate vertex {v}"));
    }
    for (i, w) in seq.windows(r).enumerate() {
        if !host.contains_key(pack_set(w)) {
            return VerificationVerdict::fail(format!("window {i} {:?} is not an edge", w));
        }
    }
    VerificationVerdict::ok()
}

pub fn verify_tight_path(g: &RUniformHypergraph, seq: &[Vertex]) -> VerificationVerdict {
    verify_tight_path_in(g, g.r(), seq)
}

/// Accepts iff `seq` covers [0, n) exactly once and all n cyclic r-windows
/// are edges.
pub fn verify_tight_cycle_in<E: EdgeMembership>(
    host: &E,
    n: usize,
    r: usize,
    seq: &[Vertex],
) -> VerificationVerdict {
    if seq.len() != n {
        return VerificationVerdict::fail(format!("covers {} of {} vertices", seq.len(), n));
    }
    if let Some(v) = duplicate_in(seq) {
        return VerificationVerdict::fail(format!("duplicate vertex {v}"));
    }
    if seq.iter().any(|&v| v as usize >= n) {
        return VerificationVerdict::fail("vertex out of range".into());
    }
    for i in 0..n {
        let mut w = Vec::with_capacity(r);
        for j in 0..r {
            w.push(seq[(i + j) % n]);
        }
        if !host.contains_key(pack_set(&w)) {
            return VerificationVerdict::fail(format!("cyclic window {i} {:?} is not an edge", w));
        }
    }
    VerificationVerdict::ok()
}

pub fn verify_tight_cycle(g: &RUniformHypergraph, seq: &[Vertex]) -> VerificationVerdict {
    verify_tight_cycle_in(g, g.n(), g.r(), seq)
}

const BRUTE_M1_CAP: usize = 24;

/// Exact m^(1): the maximum 1-density over all induced subgraphs, with a
/// maximizing vertex subset. Exhaustive over 2^v subsets, so v <= 24.
pub fn brute_m1(g: &RUniformHypergraph) -> Result<(Density, Vec<Vertex>), OracleError> {
    let v = g.n();
    if v > BRUTE_M1_CAP {
        return Err(OracleError::TooLarge(format!(
            "brute_m1 needs v <= {BRUTE_M1_CAP}, got {v}"
        )));
    }
    let edge_masks: Vec<u32> = g
        .sorted_edges()
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &x| m | 1 << x))
        .collect();
    let mut best: Density = Ratio::new(0, 1);
    let mut best_mask: u32 = if v > 0 { 1 } else { 0 };
    for mask in 1u32..(1u32 << v) {
        let vs = mask.count_ones() as i64;
        if vs <= 1 {
            continue;
        }
        let edges = edge_masks.iter().filter(|&&em| em & mask == em).count() as i64;
        let d = Ratio::new(edges, vs - 1);
        if d > best {
            best = d;
            best_mask = mask;
        }
    }
    let witness: Vec<Vertex> = (0..v as u32).filter(|&x| best_mask >> x & 1 == 1).collect();
    Ok((best, witness))
}

/// True iff repeatedly deleting vertices of degree <= 1 removes every edge.
pub fn is_one_degenerate(g: &RUniformHypergraph) -> bool {
    let edges: Vec<Vec<Vertex>> = g.sorted_edges();
    let mut alive_edge = vec![true; edges.len()];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (i, e) in edges.iter().enumerate() {
        for &v in e {
            incident[v as usize].push(i);
        }
    }
    let mut deg: Vec<usize> = incident.iter().map(|l| l.len()).collect();
    let mut removed = vec![false; g.n()];
    let mut queue: Vec<usize> = (0..g.n()).filter(|&v| deg[v] <= 1).collect();
    let mut alive_count = edges.len();
    while let Some(v) = queue.pop() {
        if removed[v] {
            continue;
        }
        if deg[v] > 1 {
            continue;
        }
        removed[v] = true;
        for &ei in &incident[v] {
            if !alive_edge[ei] {
                continue;
            }
            alive_edge[ei] = false;
            alive_count -= 1;
            for &u in &edges[ei] {
                let u = u as usize;
                if u != v && !removed[u] {
                    deg[u] -= 1;
                    if deg[u] <= 1 {
                        queue.push(u);
                    }
                }
            }
        }
    }
    alive_count == 0
}

const DP_STATE_BUDGET: f64 = 3e8;

/// Exact tight-Hamilton-cycle decision by dynamic programming over
/// (visited set, ordered last (r-1)-tuple), anchored at vertex 0 in the
/// first position to quotient out rotations. Returns a witness cycle when
/// one exists.
pub fn dp_has_tight_hamilton_cycle(
    g: &RUniformHypergraph,
) -> Result<Option<Vec<Vertex>>, OracleError> {
    let n = g.n();
    let r = g.r();
    if n > 16 {
        return Err(OracleError::TooLarge(format!(
            "dp oracle needs n <= 16, got {n}"
        )));
    }
    let states = (n as f64).powi(r as i32 - 1) * (1u64 << n) as f64;
    if states > DP_STATE_BUDGET {
        return Err(OracleError::TooLarge(format!(
            "dp state space {states:.2e} exceeds budget"
        )));
    }
    if n < r {
        return Ok(None);
    }
    // ordered tuples packed 5 bits per vertex, most recent vertex lowest
    let pack_tuple = |t: &[Vertex]| -> u64 {
        t.iter().fold(0u64, |acc, &v| (acc << 5) | (v as u64 + 1))
    };
    let unpack_tuple = |mut p: u64| -> Vec<Vertex> {
        let mut out = Vec::new();
        while p != 0 {
            out.push((p & 31) as Vertex - 1);
            p >>= 5;
        }
        out.reverse();
        out
    };

    // anchored ordered prefixes (0, a_1, ..., a_{r-2}), distinct entries
    let mut prefixes: Vec<Vec<Vertex>> = Vec::new();
    let mut cur: Vec<Vertex> = vec![0];
    fn extend_prefix(n: usize, target: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == target {
            out.push(cur.clone());
            return;
        }
        for v in 1..n as Vertex {
            if !cur.contains(&v) {
                cur.push(v);
                extend_prefix(n, target, cur, out);
                cur.pop();
            }
        }
    }
    extend_prefix(n, r - 1, &mut cur, &mut prefixes);
    for prefix in &prefixes {
        if let Some(cycle) = dp_from_prefix(g, n, r, prefix, &pack_tuple, &unpack_tuple) {
            return Ok(Some(cycle));
        }
    }
    Ok(None)
}

fn dp_from_prefix(
    g: &RUniformHypergraph,
    n: usize,
    r: usize,
    prefix: &[Vertex],
    pack_tuple: &dyn Fn(&[Vertex]) -> u64,
    unpack_tuple: &dyn Fn(u64) -> Vec<Vertex>,
) -> Option<Vec<Vertex>> {
    let full_mask: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let start_mask: u32 = prefix.iter().fold(0, |m, &v| m | 1 << v);
    let start_tuple = pack_tuple(prefix);
    // (mask, tuple) -> predecessor (mask, tuple)
    let mut parent: FastMap<(u32, u64), (u32, u64)> = FastMap::default();
    parent.insert((start_mask, start_tuple), (0, 0));
    let mut frontier = vec![(start_mask, start_tuple)];
    let mut window = vec![0u32; r];
    while let Some((mask, tuple)) = frontier.pop() {
        let t = unpack_tuple(tuple);
        if mask == full_mask {
            // wrap check: windows of (t, prefix) concatenation
            let ring: Vec<Vertex> = t.iter().chain(prefix.iter()).copied().collect();
            if ring.windows(r).all(|w| g.has_edge(w)) {
                // reconstruct
                let mut seq_rev = Vec::with_capacity(n);
                let mut cur = (mask, tuple);
                loop {
                    let prev = parent[&cur];
                    if prev == (0, 0) {
                        break;
                    }
                    let cur_t = unpack_tuple(cur.1);
                    seq_rev.push(*cur_t.last().unwrap());
                    cur = prev;
                }
                let mut seq: Vec<Vertex> = prefix.to_vec();
                seq_rev.reverse();
                seq.extend(seq_rev);
                debug_assert_eq!(seq.len(), n);
                return Some(seq);
            }
            continue;
        }
        for v in 0..n as u32 {
            if mask >> v & 1 == 1 {
                continue;
            }
            window[..r - 1].copy_from_slice(&t);
            window[r - 1] = v;
            if !g.has_edge(&window) {
                continue;
            }
            let next_tuple = pack_tuple(&[&t[1..], &[v][..]].concat());
            let next = (mask | 1 << v, next_tuple);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert((mask, tuple));
                frontier.push(next);
            }
        }
    }
    None
}

const CONNECT_X_CAP: usize = 20;

/// Exact existence of a tight u-v path with interior inside `x` and at most
/// `max_len` vertices, by backtracking.
pub fn brute_connect_exists(
    g: &RUniformHypergraph,
    u: &[Vertex],
    v: &[Vertex],
    x: &[Vertex],
    max_len: usize,
) -> Result<Option<TightPath>, OracleError> {
    if x.len() > CONNECT_X_CAP {
        return Err(OracleError::TooLarge(format!(
            "brute_connect_exists needs |X| <= {CONNECT_X_CAP}, got {}",
            x.len()
        )));
    }
    let r = g.r();
    let pool: Vec<Vertex> = {
        let mut p: Vec<Vertex> = x
            .iter()
            .copied()
            .filter(|c| !u.contains(c) && !v.contains(c))
            .collect();
        p.sort_unstable();
        p.dedup();
        p
    };
    let mut seq: Vec<Vertex> = u.to_vec();
    let mut used: FastSet<Vertex> = u.iter().copied().collect();
    fn close_ok(g: &RUniformHypergraph, r: usize, seq: &[Vertex], v: &[Vertex]) -> bool {
        let full: Vec<Vertex> = seq.iter().chain(v.iter()).copied().collect();
        let lo = seq.len().saturating_sub(r - 1);
        full[lo..].windows(r).all(|w| g.has_edge(w))
    }
    fn dfs(
        g: &RUniformHypergraph,
        r: usize,
        pool: &[Vertex],
        v: &[Vertex],
        max_len: usize,
        seq: &mut Vec<Vertex>,
        used: &mut FastSet<Vertex>,
    ) -> bool {
        if seq.len() + (r - 1) <= max_len && close_ok(g, r, seq, v) {
            seq.extend_from_slice(v);
            return true;
        }
        if seq.len() + r > max_len {
            return false;
        }
        for &c in pool {
            if used.contains(&c) {
                continue;
            }
            let tail = &seq[seq.len() - (r - 1)..];
            let mut w = tail.to_vec();
            w.push(c);
            if !g.has_edge(&w) {
                continue;
            }
            seq.push(c);
            used.insert(c);
            if dfs(g, r, pool, v, max_len, seq, used) {
                return true;
            }
            used.remove(&c);
            seq.pop();
        }
        false
    }
    if seq.len() + (r - 1) > max_len {
        return Ok(None);
    }
    if dfs(g, r, &pool, v, max_len, &mut seq, &mut used) {
        Ok(Some(TightPath::new(seq).expect("distinct by construction")))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{complete, gnp, tight_cycle};

    #[test]
    fn verify_path_examples() {
        let c6 = tight_cycle(6, 3).unwrap();
        // fewer than r vertices: vacuous
        assert!(verify_tight_path(&c6, &[0, 1]).accepted);
        assert!(verify_tight_path(&c6, &[0, 1, 2, 3, 4, 5]).accepted);
        // drop {2,3,4}: rejected at window index 2
        let mut g = RUniformHypergraph::new(6, 3).unwrap();
        for e in [[0, 1, 2], [1, 2, 3], [3, 4, 5]] {
            g.add_edge(&e).unwrap();
        }
        let verdict = verify_tight_path(&g, &[0, 1, 2, 3, 4, 5]);
        assert!(!verdict.accepted);
        assert!(verdict.first_violation.unwrap().starts_with("window 2"));
    }

    #[test]
    fn verify_cycle_examples() {
        let c6 = tight_cycle(6, 3).unwrap();
        assert!(verify_tight_cycle(&c6, &[0, 1, 2, 3, 4, 5]).accepted);
        // rotation and reversal
        assert!(verify_tight_cycle(&c6, &[2, 3, 4, 5, 0, 1]).accepted);
        assert!(verify_tight_cycle(&c6, &[5, 4, 3, 2, 1, 0]).accepted);
        // coverage failure
        assert!(!verify_tight_cycle(&c6, &[0, 1, 2, 3, 4]).accepted);
        assert!(!verify_tight_cycle(&c6, &[0, 1, 2, 3, 4, 4]).accepted);
    }

    #[test]
    fn brute_m1_examples() {
        let c5 = tight_cycle(5, 3).unwrap();
        let (d, w) = brute_m1(&c5).unwrap();
        assert_eq!(d, Ratio::new(5, 4));
        assert_eq!(w, vec![0, 1, 2, 3, 4]);

        let mut single = RUniformHypergraph::new(3, 3).unwrap();
        single.add_edge(&[0, 1, 2]).unwrap();
        let (d, _) = brute_m1(&single).unwrap();
        assert_eq!(d, Ratio::new(1, 2));

        let big = RUniformHypergraph::new(25, 3).unwrap();
        assert!(brute_m1(&big).is_err());
    }

    #[test]
    fn one_degenerate_examples() {
        let edgeless = RUniformHypergraph::new(4, 3).unwrap();
        assert!(is_one_degenerate(&edgeless));
        // C^(3)_5: every vertex has degree 3, peeling stalls
        assert!(!is_one_degenerate(&tight_cycle(5, 3).unwrap()));
        // a tight path is 1-degenerate (peel from the ends)
        let mut p = RUniformHypergraph::new(5, 3).unwrap();
        for e in [[0, 1, 2], [1, 2, 3], [2, 3, 4]] {
            p.add_edge(&e).unwrap();
        }
        assert!(is_one_degenerate(&p));
    }

    #[test]
    fn dp_on_small_instances() {
        let k6 = complete(6, 3).unwrap();
        let w = dp_has_tight_hamilton_cycle(&k6).unwrap().unwrap();
        assert!(verify_tight_cycle(&k6, &w).accepted);

        let c6 = tight_cycle(6, 3).unwrap();
        let w = dp_has_tight_hamilton_cycle(&c6).unwrap().unwrap();
        assert!(verify_tight_cycle(&c6, &w).accepted);

        // removing any single edge of C^(3)_6 kills the only cycle
        for e in c6.sorted_edges() {
            let mut g = RUniformHypergraph::new(6, 3).unwrap();
            for f in c6.sorted_edges() {
                if f != e {
                    g.add_edge(&f).unwrap();
                }
            }
            assert_eq!(dp_has_tight_hamilton_cycle(&g).unwrap(), None);
        }
    }

    #[test]
    fn dp_matches_verifier_on_random() {
        for seed in 0..30 {
            let n = 6 + (seed as usize % 4);
            let g = gnp(n, 3, 0.5, 1000 + seed).unwrap();
            if let Some(w) = dp_has_tight_hamilton_cycle(&g).unwrap() {
                assert!(verify_tight_cycle(&g, &w).accepted, "seed {seed}");
            }
        }
    }

    #[test]
    fn brute_connect_on_forced_instance() {
        // unique planted connector 0,1 -> 8,9 through 4,5
        let mut g = RUniformHypergraph::new(12, 3).unwrap();
        for e in [[0, 1, 4], [1, 4, 5], [4, 5, 8], [5, 8, 9]] {
            g.add_edge(&e).unwrap();
        }
        let p = brute_connect_exists(&g, &[0, 1], &[8, 9], &[4, 5, 6, 7], 8)
            .unwrap()
            .unwrap();
        assert_eq!(p.0, vec![0, 1, 4, 5, 8, 9]);
        assert!(verify_tight_path(&g, &p.0).accepted);

        // X empty and no direct concatenation: impossible
        let none = brute_connect_exists(&g, &[0, 1], &[8, 9], &[], 8).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn brute_connect_direct_concatenation() {
        let mut g = RUniformHypergraph::new(8, 3).unwrap();
        for e in [[0, 1, 2], [1, 2, 3]] {
            g.add_edge(&e).unwrap();
        }
        let p = brute_connect_exists(&g, &[0, 1], &[2, 3], &[], 6)
            .unwrap()
            .unwrap();
        assert_eq!(p.0, vec![0, 1, 2, 3]);
        assert!(p.interior(3).is_empty());
    }
}

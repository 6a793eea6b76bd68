//! The absorbing gadget: an auxiliary hypergraph D with one more vertex
//! than strictly needed (the reservoir vertex w*), extended to a host H*
//! carrying two tight Hamilton u-v paths — one through w*, one avoiding it.
//! Deleting w* from a path that traverses the gadget therefore leaves a
//! tight path with the same end tuples, which is what lets the pipeline
//! re-spend reservoir vertices later.

use crate::hypergraph::{Density, HypergraphError, RUniformHypergraph, TightPath};
use crate::oracle::{brute_m1, is_one_degenerate, verify_tight_path};
use crate::set::{FastSet, Vertex};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReservoirError {
    #[error("eps = {eps} out of range (need 0 < eps < 1/(6r) = {bound})")]
    EpsOutOfRange { eps: f64, bound: f64 },
    #[error("ell = {ell} too small (need ell >= 3)")]
    EllTooSmall { ell: usize },
    #[error("internal verification failure: {0}")]
    InternalVerificationFailure(String),
    #[error("certification failure: {clause}")]
    CertificationFailure { clause: String },
    #[error(transparent)]
    Graph(#[from] HypergraphError),
}

/// ell = ceil(1 / (2(r-1) eps)) + 2.
pub fn choose_ell(r: usize, eps: f64) -> Result<usize, ReservoirError> {
    let bound = 1.0 / (6.0 * r as f64);
    if !(eps > 0.0 && eps < bound) {
        return Err(ReservoirError::EpsOutOfRange { eps, bound });
    }
    let raw = 1.0 / (2.0 * (r as f64 - 1.0) * eps);
    Ok(raw.ceil() as usize + 2)
}

/// The labelled core gadget D: ordered groups U (with w* in the middle),
/// V, A_1..A_{l-1}, B_1..B_{l-2} and the bridging edge sequences.
#[derive(Debug, Clone)]
pub struct CoreGadget {
    pub graph: RUniformHypergraph,
    pub r: usize,
    pub ell: usize,
    pub w_star: Vertex,
    pub u_seq: Vec<Vertex>,
    pub v_seq: Vec<Vertex>,
    pub a_seqs: Vec<Vec<Vertex>>,
    pub b_seqs: Vec<Vec<Vertex>>,
    /// Vertices whose single deletion leaves D 1-degenerate (all
    /// non-endpoint vertices of the group sequences, including w*).
    pub s_set: Vec<Vertex>,
}

fn rev(xs: &[Vertex]) -> Vec<Vertex> {
    let mut v = xs.to_vec();
    v.reverse();
    v
}

fn add_path_edges(g: &mut RUniformHypergraph, seq: &[Vertex]) -> Result<(), HypergraphError> {
    let r = g.r();
    for w in seq.windows(r) {
        g.add_edge(w)?;
    }
    Ok(())
}

/// Builds D_{r,l}: exactly 2(r-1)(2l-1) + 1 vertices and as many edges.
pub fn build_core(r: usize, ell: usize) -> Result<CoreGadget, ReservoirError> {
    if ell < 3 {
        return Err(ReservoirError::EllTooSmall { ell });
    }
    let w = 2 * (r - 1); // group width
    let n = w * (2 * ell - 1) + 1;
    let mut next: Vertex = 0;
    let mut take = |count: usize| -> Vec<Vertex> {
        let out: Vec<Vertex> = (next..next + count as Vertex).collect();
        next += count as Vertex;
        out
    };
    let u_seq = take(w + 1);
    let w_star = u_seq[r - 1];
    let v_seq = take(w);
    let a_seqs: Vec<Vec<Vertex>> = (0..ell - 1).map(|_| take(w)).collect();
    let b_seqs: Vec<Vec<Vertex>> = (0..ell - 2).map(|_| take(w)).collect();
    debug_assert_eq!(next as usize, n);

    let mut g = RUniformHypergraph::new(n, r)?;
    for seq in std::iter::once(&u_seq)
        .chain(std::iter::once(&v_seq))
        .chain(a_seqs.iter())
        .chain(b_seqs.iter())
    {
        add_path_edges(&mut g, seq)?;
    }
    // bridging sequences
    let utilde_a: Vec<Vertex> = [&u_seq[..r - 1], &rev(&a_seqs[0][..r - 1])[..]].concat();
    let vtilde_a: Vec<Vertex> =
        [&rev(&a_seqs[ell - 2][r - 1..])[..], &v_seq[r - 1..]].concat();
    let utilde_b: Vec<Vertex> = [&rev(&u_seq[r..])[..], &rev(&b_seqs[0][..r - 1])[..]].concat();
    let vtilde_b: Vec<Vertex> =
        [&rev(&b_seqs[ell - 3][r - 1..])[..], &rev(&v_seq[..r - 1])[..]].concat();
    for seq in [&utilde_a, &vtilde_a, &utilde_b, &vtilde_b] {
        add_path_edges(&mut g, seq)?;
    }
    for i in 0..ell - 2 {
        let atilde: Vec<Vertex> =
            [&rev(&a_seqs[i][r - 1..])[..], &rev(&a_seqs[i + 1][..r - 1])[..]].concat();
        add_path_edges(&mut g, &atilde)?;
    }
    for i in 0..ell.saturating_sub(3) {
        let btilde: Vec<Vertex> =
            [&rev(&b_seqs[i][r - 1..])[..], &rev(&b_seqs[i + 1][..r - 1])[..]].concat();
        add_path_edges(&mut g, &btilde)?;
    }
    if g.edge_count() != n {
        return Err(ReservoirError::InternalVerificationFailure(format!(
            "core gadget has {} edges, expected {}",
            g.edge_count(),
            n
        )));
    }

    let mut s_set = Vec::new();
    for seq in std::iter::once(&u_seq)
        .chain(std::iter::once(&v_seq))
        .chain(a_seqs.iter())
        .chain(b_seqs.iter())
    {
        s_set.extend_from_slice(&seq[1..seq.len() - 1]);
    }
    s_set.sort_unstable();

    Ok(CoreGadget {
        graph: g,
        r,
        ell,
        w_star,
        u_seq,
        v_seq,
        a_seqs,
        b_seqs,
        s_set,
    })
}

/// The reservoir host H* with both stored Hamilton paths.
#[derive(Debug, Clone)]
pub struct ReservoirGraph {
    pub h_star: RUniformHypergraph,
    pub core: CoreGadget,
    pub r: usize,
    pub ell: usize,
    pub k: usize,
    pub w_star: Vertex,
    pub u_tuple: Vec<Vertex>,
    pub v_tuple: Vec<Vertex>,
    /// Tight Hamilton u-v path of H*.
    pub path_with: TightPath,
    /// Tight Hamilton u-v path of H* - w*.
    pub path_without: TightPath,
    /// Insertion blocks in path order, with readable tags.
    pub blocks: Vec<(String, Vec<Vertex>)>,
}

impl ReservoirGraph {
    pub fn n(&self) -> usize {
        self.h_star.n()
    }

    /// For each position p of `path_with`, the H* edges whose highest path
    /// position is p. Placing vertices in path order and checking each
    /// bucket as its position completes covers every gadget edge exactly
    /// once.
    pub fn edges_by_completion_position(&self) -> Vec<Vec<Vec<Vertex>>> {
        let mut pos = vec![0usize; self.n()];
        for (i, &v) in self.path_with.0.iter().enumerate() {
            pos[v as usize] = i;
        }
        let mut buckets: Vec<Vec<Vec<Vertex>>> = vec![Vec::new(); self.n()];
        for e in self.h_star.sorted_edges() {
            let p = e.iter().map(|&v| pos[v as usize]).max().unwrap();
            buckets[p].push(e);
        }
        buckets
    }
}

/// Builds H* from D_{r,l}: k = 3(r-1)^2 (2l-1) fresh vertices inserted
/// between consecutive groups along the Hamilton path, plus that path's
/// edges. Both Hamilton paths are verified edge by edge at construction.
pub fn build_reservoir_graph(r: usize, ell: usize) -> Result<ReservoirGraph, ReservoirError> {
    let core = build_core(r, ell)?;
    let k = 3 * (r - 1) * (r - 1) * (2 * ell - 1);
    let n_core = core.graph.n();
    let n = n_core + 2 * k * (ell - 1);

    // insertion blocks in path order, fresh ascending labels
    let mut block_specs: Vec<String> = vec!["I(U,A1)".into()];
    for i in 1..=ell - 2 {
        block_specs.push(format!("I(A{i},B{i})"));
        block_specs.push(format!("I(B{i},A{})", i + 1));
    }
    block_specs.push(format!("I(A{},V)", ell - 1));
    let mut next = n_core as Vertex;
    let blocks: Vec<(String, Vec<Vertex>)> = block_specs
        .into_iter()
        .map(|tag| {
            let ids: Vec<Vertex> = (next..next + k as Vertex).collect();
            next += k as Vertex;
            (tag, ids)
        })
        .collect();
    debug_assert_eq!(next as usize, n);

    // path_with: U, I(U,A1), A1, I(A1,B1), B1, I(B1,A2), A2, ..., I(A_{l-1},V), V
    let mut path_with: Vec<Vertex> = Vec::with_capacity(n);
    let mut bi = blocks.iter();
    path_with.extend_from_slice(&core.u_seq);
    path_with.extend_from_slice(&bi.next().unwrap().1);
    path_with.extend_from_slice(&core.a_seqs[0]);
    for i in 0..ell - 2 {
        path_with.extend_from_slice(&bi.next().unwrap().1); // I(A_{i+1}, B_{i+1})
        path_with.extend_from_slice(&core.b_seqs[i]);
        path_with.extend_from_slice(&bi.next().unwrap().1); // I(B_{i+1}, A_{i+2})
        path_with.extend_from_slice(&core.a_seqs[i + 1]);
    }
    path_with.extend_from_slice(&bi.next().unwrap().1); // I(A_{l-1}, V)
    path_with.extend_from_slice(&core.v_seq);
    debug_assert!(bi.next().is_none());
    debug_assert_eq!(path_with.len(), n);

    let mut h = RUniformHypergraph::new(n, r)?;
    for e in core.graph.sorted_edges() {
        h.add_edge(&e)?;
    }
    add_path_edges(&mut h, &path_with)?;

    let expected_edges = n_core + 2 * (k + r - 1) * (ell - 1);
    if h.edge_count() != expected_edges {
        return Err(ReservoirError::InternalVerificationFailure(format!(
            "H* has {} edges, expected {}",
            h.edge_count(),
            expected_edges
        )));
    }

    // path_without: the w*-avoiding Hamilton path over reversed segments
    let block = |tag: &str| -> &[Vertex] { &blocks.iter().find(|(t, _)| t == tag).unwrap().1 };
    let w = 2 * (r - 1);
    let utilde_a: Vec<Vertex> = [&core.u_seq[..r - 1], &rev(&core.a_seqs[0][..r - 1])[..]].concat();
    let utilde_b: Vec<Vertex> =
        [&rev(&core.u_seq[r..])[..], &rev(&core.b_seqs[0][..r - 1])[..]].concat();
    let vtilde_b: Vec<Vertex> = [
        &rev(&core.b_seqs[ell - 3][r - 1..])[..],
        &rev(&core.v_seq[..r - 1])[..],
    ]
    .concat();
    let vtilde_a: Vec<Vertex> = [
        &rev(&core.a_seqs[ell - 2][r - 1..])[..],
        &core.v_seq[r - 1..],
    ]
    .concat();

    let mut path_without: Vec<Vertex> = Vec::with_capacity(n - 1);
    path_without.extend_from_slice(&utilde_a);
    path_without.extend(rev(block("I(U,A1)")));
    path_without.extend_from_slice(&utilde_b);
    for i in 1..=ell - 2 {
        path_without.extend(rev(block(&format!("I(A{i},B{i})"))));
        let atilde: Vec<Vertex> = [
            &rev(&core.a_seqs[i - 1][r - 1..])[..],
            &rev(&core.a_seqs[i][..r - 1])[..],
        ]
        .concat();
        path_without.extend_from_slice(&atilde);
        path_without.extend(rev(block(&format!("I(B{i},A{})", i + 1))));
        if i <= ell - 3 {
            let btilde: Vec<Vertex> = [
                &rev(&core.b_seqs[i - 1][r - 1..])[..],
                &rev(&core.b_seqs[i][..r - 1])[..],
            ]
            .concat();
            path_without.extend_from_slice(&btilde);
        }
    }
    path_without.extend_from_slice(&vtilde_b);
    path_without.extend(rev(block(&format!("I(A{},V)", ell - 1))));
    path_without.extend_from_slice(&vtilde_a);
    debug_assert_eq!(path_without.len(), n - 1);

    let u_tuple = core.u_seq[..r - 1].to_vec();
    let v_tuple = core.v_seq[w - (r - 1)..].to_vec();

    // construction-time verification of every stored property
    let pw = TightPath::new(path_with)?;
    let po = TightPath::new(path_without)?;
    let verdict = verify_tight_path(&h, &pw.0);
    if !verdict.accepted {
        return Err(ReservoirError::InternalVerificationFailure(format!(
            "path_with: {}",
            verdict.first_violation.unwrap()
        )));
    }
    let without_w: FastSet<Vertex> = (0..n as Vertex).filter(|&v| v != core.w_star).collect();
    let h_minus = h.restricted(&without_w);
    let verdict = verify_tight_path(&h_minus, &po.0);
    if !verdict.accepted {
        return Err(ReservoirError::InternalVerificationFailure(format!(
            "path_without: {}",
            verdict.first_violation.unwrap()
        )));
    }
    if po.0.contains(&core.w_star) {
        return Err(ReservoirError::InternalVerificationFailure(
            "path_without visits w*".into(),
        ));
    }
    for (tag, path) in [("path_with", &pw), ("path_without", &po)] {
        if path.start_tuple(r) != u_tuple.as_slice() || path.end_tuple(r) != v_tuple.as_slice() {
            return Err(ReservoirError::InternalVerificationFailure(format!(
                "{tag} end tuples do not match u, v"
            )));
        }
    }

    Ok(ReservoirGraph {
        h_star: h,
        w_star: core.w_star,
        core,
        r,
        ell,
        k,
        u_tuple,
        v_tuple,
        path_with: pw,
        path_without: po,
        blocks,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub eps: f64,
    /// d1 of the core gadget as (numerator, denominator).
    pub core_density: (i64, i64),
    pub hstar_density: (i64, i64),
    /// Exact m1 of the core by exhaustive scan, when v(core) <= 24.
    pub exact_m1_core: Option<(i64, i64)>,
    /// Number of S-vertices whose deletion was verified to leave a
    /// 1-degenerate gadget.
    pub peeled_vertices: usize,
}

fn ratio_pair(d: Density) -> (i64, i64) {
    (*d.numer(), *d.denom())
}

/// Certifies the density clauses backing m1(H*) <= 1 + eps: the exact m1 of
/// the core equals its 1-density (when small enough to scan), deleting any
/// S-vertex leaves the core 1-degenerate, and d1(H*) < d1(core) <= 1 + eps.
pub fn certify_density(
    rg: &ReservoirGraph,
    eps: f64,
) -> Result<DensityCertificate, ReservoirError> {
    let d_core = rg.core.graph.one_density();
    let d_hstar = rg.h_star.one_density();

    let exact_m1_core = if rg.core.graph.n() <= 24 {
        let (m1, _witness) = brute_m1(&rg.core.graph).expect("within cap");
        if m1 != d_core {
            return Err(ReservoirError::CertificationFailure {
                clause: format!(
                    "m1(core) = {}/{} differs from d1(core) = {}/{}",
                    m1.numer(),
                    m1.denom(),
                    d_core.numer(),
                    d_core.denom()
                ),
            });
        }
        Some(ratio_pair(m1))
    } else {
        None
    };

    for &x in &rg.core.s_set {
        let keep: Vec<Vertex> = (0..rg.core.graph.n() as Vertex)
            .filter(|&v| v != x)
            .collect();
        let (sub, _) = rg.core.graph.induced(&keep);
        if !is_one_degenerate(&sub) {
            return Err(ReservoirError::CertificationFailure {
                clause: format!("core minus S-vertex {x} is not 1-degenerate"),
            });
        }
    }

    if d_hstar >= d_core {
        return Err(ReservoirError::CertificationFailure {
            clause: format!(
                "d1(H*) = {}/{} not below d1(core) = {}/{}",
                d_hstar.numer(),
                d_hstar.denom(),
                d_core.numer(),
                d_core.denom()
            ),
        });
    }
    // d1(core) <= 1 + eps, i.e. num <= eps * den for d1(core) - 1 = num/den
    let excess = d_core - Ratio::new(1, 1);
    if (*excess.numer() as f64) > eps * (*excess.denom() as f64) {
        return Err(ReservoirError::CertificationFailure {
            clause: format!(
                "d1(core) - 1 = {}/{} exceeds eps = {eps}",
                excess.numer(),
                excess.denom()
            ),
        });
    }

    Ok(DensityCertificate {
        eps,
        core_density: ratio_pair(d_core),
        hstar_density: ratio_pair(d_hstar),
        exact_m1_core,
        peeled_vertices: rg.core.s_set.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choose_ell_examples() {
        assert_eq!(choose_ell(3, 0.05).unwrap(), 7);
        assert_eq!(choose_ell(3, 0.04).unwrap(), 9);
        assert!(matches!(
            choose_ell(3, 1.0 / 6.0),
            Err(ReservoirError::EpsOutOfRange { .. })
        ));
        // r >= 2 accepted by the formula guard
        assert!(choose_ell(2, 0.05).is_ok());
    }

    #[test]
    fn core_gadget_counts_and_density() {
        let d = build_core(3, 3).unwrap();
        assert_eq!(d.graph.n(), 21);
        assert_eq!(d.graph.edge_count(), 21);
        assert_eq!(d.graph.one_density(), Ratio::new(21, 20));

        let d43 = build_core(4, 3).unwrap();
        assert_eq!(d43.graph.n(), 31);
        assert_eq!(d43.graph.edge_count(), 31);

        assert!(matches!(
            build_core(3, 2),
            Err(ReservoirError::EllTooSmall { .. })
        ));
    }

    #[test]
    fn count_formulas_hold_on_grid() {
        for r in [3, 4, 5] {
            for ell in [3, 4, 5] {
                let rg = build_reservoir_graph(r, ell).unwrap();
                let w = 2 * (r - 1);
                assert_eq!(rg.core.graph.n(), w * (2 * ell - 1) + 1);
                assert_eq!(rg.core.graph.edge_count(), rg.core.graph.n());
                assert_eq!(rg.k, 3 * (r - 1) * (r - 1) * (2 * ell - 1));
                assert_eq!(rg.n(), rg.core.graph.n() + 2 * rg.k * (ell - 1));
                assert_eq!(
                    rg.h_star.edge_count(),
                    rg.core.graph.n() + 2 * (rg.k + r - 1) * (ell - 1)
                );
                assert_eq!(rg.path_with.len(), rg.n());
                assert_eq!(rg.path_without.len(), rg.n() - 1);
            }
        }
    }

    #[test]
    fn reservoir_graph_3_3_statistics() {
        let rg = build_reservoir_graph(3, 3).unwrap();
        assert_eq!(rg.k, 60);
        assert_eq!(rg.n(), 261);
        assert_eq!(rg.h_star.edge_count(), 269);
        assert_eq!(
            rg.h_star.one_density(),
            Ratio::new(1, 1) + Ratio::new(9, 260)
        );
        assert!(rg.h_star.one_density() < rg.core.graph.one_density());
    }

    #[test]
    fn degree_two_outside_s() {
        for (r, ell) in [(3, 3), (3, 4), (4, 3)] {
            let d = build_core(r, ell).unwrap();
            let s: FastSet<Vertex> = d.s_set.iter().copied().collect();
            for v in 0..d.graph.n() as Vertex {
                if !s.contains(&v) {
                    assert_eq!(d.graph.degree(v), 2, "r={r} ell={ell} vertex {v}");
                }
            }
        }
    }

    #[test]
    fn deleting_s_vertices_leaves_one_degenerate_core() {
        let d = build_core(3, 3).unwrap();
        assert!(d.s_set.contains(&d.w_star));
        for &x in &d.s_set {
            let keep: Vec<Vertex> = (0..d.graph.n() as Vertex).filter(|&v| v != x).collect();
            let (sub, _) = d.graph.induced(&keep);
            assert!(is_one_degenerate(&sub), "removing {x}");
        }
        // the intact core is not 1-degenerate
        assert!(!is_one_degenerate(&d.graph));
    }

    #[test]
    fn certify_density_clauses() {
        let rg = build_reservoir_graph(3, 3).unwrap();
        let cert = certify_density(&rg, 1.0 / 20.0).unwrap();
        assert_eq!(cert.core_density, (21, 20));
        assert_eq!(cert.exact_m1_core, Some((21, 20)));
        assert_eq!(cert.hstar_density, (269, 260));

        let err = certify_density(&rg, 1.0 / 30.0).unwrap_err();
        assert!(matches!(err, ReservoirError::CertificationFailure { .. }));
    }

    #[test]
    fn completion_position_buckets_cover_all_edges() {
        let rg = build_reservoir_graph(3, 3).unwrap();
        let buckets = rg.edges_by_completion_position();
        let total: usize = buckets.iter().map(|b| b.len()).sum();
        assert_eq!(total, rg.h_star.edge_count());
        // nothing completes before r vertices are placed
        for bucket in buckets.iter().take(rg.r - 1) {
            assert!(bucket.is_empty());
        }
    }
}

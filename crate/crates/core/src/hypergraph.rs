//! r-uniform hypergraphs with a completion index, ordered tuples and tight
//! paths/cycles.
//!
//! Edges are canonical ascending r-sets; tuples and paths are ordered. The
//! 1-density `d1 = e / (v - 1)` is kept as an exact rational so density
//! comparisons in the gadget certificates are equality-safe.

use crate::set::{
    pack_set, pack_sorted, pack_sorted_with, FastMap, FastSet, SetKey, Vertex, MAX_SET_ARITY,
    PACK_MAX_VERTEX,
};
use num_rational::Ratio;
use thiserror::Error;

pub type Density = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("edge has {got} vertices, expected {expected}")]
    WrongArity { expected: usize, got: usize },
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("duplicate vertex {vertex} in edge or tuple")]
    DuplicateVertex { vertex: Vertex },
    #[error("uniformity r = {r} unsupported (need 3 <= r <= {max})")]
    UnsupportedUniformity { r: usize, max: usize },
    #[error("vertex count {n} exceeds packing limit {max}")]
    TooManyVertices { n: usize, max: usize },
}

/// An ordered sequence of distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedTuple(pub Vec<Vertex>);

impl OrderedTuple {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self, HypergraphError> {
        let mut seen = FastSet::default();
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(HypergraphError::DuplicateVertex { vertex: v });
            }
        }
        Ok(OrderedTuple(vertices))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn reversed(&self) -> OrderedTuple {
        let mut v = self.0.clone();
        v.reverse();
        OrderedTuple(v)
    }
}

/// Reverses a tuple given as a plain slice.
pub fn reversed(tuple: &[Vertex]) -> Vec<Vertex> {
    let mut v = tuple.to_vec();
    v.reverse();
    v
}

/// An r-uniform hypergraph on vertex set `[0, n)`.
///
/// Isolated vertices count towards `v(H)`; `n` is the declared vertex count.
#[derive(Debug, Clone)]
pub struct RUniformHypergraph {
    n: usize,
    r: usize,
    /// Canonical ascending edges, insertion-order independent storage.
    edge_keys: FastSet<SetKey>,
    /// (r-1)-set -> ascending completing vertices.
    completion: FastMap<SetKey, Vec<Vertex>>,
}

impl RUniformHypergraph {
    pub fn new(n: usize, r: usize) -> Result<Self, HypergraphError> {
        if r < 3 || r > MAX_SET_ARITY {
            return Err(HypergraphError::UnsupportedUniformity {
                r,
                max: MAX_SET_ARITY,
            });
        }
        if n > PACK_MAX_VERTEX as usize + 1 {
            return Err(HypergraphError::TooManyVertices {
                n,
                max: PACK_MAX_VERTEX as usize + 1,
            });
        }
        Ok(RUniformHypergraph {
            n,
            r,
            edge_keys: FastSet::default(),
            completion: FastMap::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edge_count(&self) -> usize {
        self.edge_keys.len()
    }

    fn check_edge(&self, e: &[Vertex]) -> Result<Vec<Vertex>, HypergraphError> {
        if e.len() != self.r {
            return Err(HypergraphError::WrongArity {
                expected: self.r,
                got: e.len(),
            });
        }
        for &v in e {
            if v as usize >= self.n {
                return Err(HypergraphError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
        }
        let mut sorted = e.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(HypergraphError::DuplicateVertex { vertex: w[0] });
            }
        }
        Ok(sorted)
    }

    /// Inserts `e` (any order); duplicates are a no-op. Returns whether the
    /// edge was new.
    pub fn add_edge(&mut self, e: &[Vertex]) -> Result<bool, HypergraphError> {
        let sorted = self.check_edge(e)?;
        let key = pack_sorted(&sorted);
        if !self.edge_keys.insert(key) {
            return Ok(false);
        }
        // update completion index for every (r-1)-subset
        for skip in 0..self.r {
            let mut sub = [0u32; MAX_SET_ARITY];
            let mut m = 0;
            for (i, &v) in sorted.iter().enumerate() {
                if i != skip {
                    sub[m] = v;
                    m += 1;
                }
            }
            let comp = self
                .completion
                .entry(pack_sorted(&sub[..m]))
                .or_default();
            let c = sorted[skip];
            match comp.binary_search(&c) {
                Ok(_) => {}
                Err(pos) => comp.insert(pos, c),
            }
        }
        Ok(true)
    }

    /// Whether the r-set `e` (any order) is an edge.
    pub fn has_edge(&self, e: &[Vertex]) -> bool {
        if e.len() != self.r {
            return false;
        }
        self.edge_keys.contains(&pack_set(e))
    }

    #[inline]
    pub fn has_edge_key(&self, key: SetKey) -> bool {
        self.edge_keys.contains(&key)
    }

    /// Vertices `c` with `S + {c}` an edge; `S` must have r-1 vertices.
    pub fn completions(&self, s: &[Vertex]) -> Result<&[Vertex], HypergraphError> {
        if s.len() != self.r - 1 {
            return Err(HypergraphError::WrongArity {
                expected: self.r - 1,
                got: s.len(),
            });
        }
        Ok(self
            .completion
            .get(&pack_set(s))
            .map(|v| v.as_slice())
            .unwrap_or(&[]))
    }

    /// Number of edges containing the vertex.
    pub fn degree(&self, v: Vertex) -> usize {
        self.edges().filter(|e| e.contains(&v)).count()
    }

    /// Iterates edges as ascending vertex vectors (arbitrary order).
    pub fn edges(&self) -> impl Iterator<Item = Vec<Vertex>> + '_ {
        self.edge_keys.iter().map(|&k| crate::set::unpack(k))
    }

    /// Edges sorted lexicographically; the canonical external order.
    pub fn sorted_edges(&self) -> Vec<Vec<Vertex>> {
        let mut es: Vec<Vec<Vertex>> = self.edges().collect();
        es.sort_unstable();
        es
    }

    /// Exact 1-density e / (v - 1); zero for v <= 1.
    pub fn one_density(&self) -> Density {
        if self.n <= 1 {
            return Ratio::new(0, 1);
        }
        Ratio::new(self.edge_count() as i64, self.n as i64 - 1)
    }

    /// Induced subhypergraph on `w`: vertex set relabelled 0..|w| ascending.
    ///
    /// Returns the subgraph together with the ascending original labels.
    pub fn induced(&self, w: &[Vertex]) -> (RUniformHypergraph, Vec<Vertex>) {
        let mut labels: Vec<Vertex> = w.to_vec();
        labels.sort_unstable();
        labels.dedup();
        let index: FastMap<Vertex, Vertex> = labels
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as Vertex))
            .collect();
        let mut sub = RUniformHypergraph::new(labels.len(), self.r).expect("same r");
        for e in self.edges() {
            if e.iter().all(|v| index.contains_key(v)) {
                let mapped: Vec<Vertex> = e.iter().map(|v| index[v]).collect();
                sub.add_edge(&mapped).expect("valid edge");
            }
        }
        (sub, labels)
    }

    /// Induced subgraph that keeps the original labels (vertex set stays [0, n),
    /// edges restricted to `w`). Handy when label identity matters.
    pub fn restricted(&self, w: &FastSet<Vertex>) -> RUniformHypergraph {
        let mut sub = RUniformHypergraph::new(self.n, self.r).expect("same r");
        for e in self.edges() {
            if e.iter().all(|v| w.contains(v)) {
                sub.add_edge(&e).expect("valid edge");
            }
        }
        sub
    }
}

/// A tight path: every r consecutive vertices of the sequence form an edge
/// of the host. The sequence itself is stored; validity is checked against a
/// host via [`crate::oracle::verify_tight_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightPath(pub Vec<Vertex>);

impl TightPath {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self, HypergraphError> {
        let mut seen = FastSet::default();
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(HypergraphError::DuplicateVertex { vertex: v });
            }
        }
        Ok(TightPath(vertices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First r-1 vertices in order.
    pub fn start_tuple(&self, r: usize) -> &[Vertex] {
        &self.0[..r - 1]
    }

    /// Last r-1 vertices in order.
    pub fn end_tuple(&self, r: usize) -> &[Vertex] {
        &self.0[self.0.len() - (r - 1)..]
    }

    /// Everything but the start and end (r-1)-tuples.
    pub fn interior(&self, r: usize) -> &[Vertex] {
        if self.0.len() <= 2 * (r - 1) {
            &[]
        } else {
            &self.0[r - 1..self.0.len() - (r - 1)]
        }
    }

    pub fn reversed(&self) -> TightPath {
        let mut v = self.0.clone();
        v.reverse();
        TightPath(v)
    }
}

/// A spanning cyclic sequence; validity against a host is checked by
/// [`crate::oracle::verify_tight_cycle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightCycle(pub Vec<Vertex>);

/// The r-windows of a path sequence, as packed keys.
pub fn path_windows(seq: &[Vertex], r: usize) -> impl Iterator<Item = SetKey> + '_ {
    seq.windows(r).map(pack_set)
}

/// The n cyclic r-windows of a cycle sequence.
pub fn cycle_windows(seq: &[Vertex], r: usize) -> Vec<SetKey> {
    let n = seq.len();
    (0..n)
        .map(|i| {
            let mut w = [0u32; MAX_SET_ARITY];
            for (j, slot) in w[..r].iter_mut().enumerate() {
                *slot = seq[(i + j) % n];
            }
            pack_set(&w[..r])
        })
        .collect()
}

/// Packs the window `tuple + {c}`; `tuple` need not be sorted.
pub fn window_key(tuple: &[Vertex], c: Vertex) -> SetKey {
    let mut sorted = [0u32; MAX_SET_ARITY];
    let k = tuple.len();
    sorted[..k].copy_from_slice(tuple);
    sorted[..k].sort_unstable();
    pack_sorted_with(&sorted[..k], c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::tight_cycle;

    #[test]
    fn add_edge_updates_completion_index() {
        let mut g = RUniformHypergraph::new(5, 3).unwrap();
        assert!(g.add_edge(&[0, 1, 2]).unwrap());
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.completions(&[0, 1]).unwrap(), &[2]);
        assert_eq!(g.completions(&[0, 2]).unwrap(), &[1]);
        assert_eq!(g.completions(&[1, 2]).unwrap(), &[0]);
    }

    #[test]
    fn duplicate_edge_is_noop() {
        let mut g = RUniformHypergraph::new(5, 3).unwrap();
        assert!(g.add_edge(&[2, 0, 1]).unwrap());
        assert!(!g.add_edge(&[0, 1, 2]).unwrap());
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.completions(&[0, 1]).unwrap(), &[2]);
    }

    #[test]
    fn wrong_arity_rejected() {
        let mut g = RUniformHypergraph::new(5, 3).unwrap();
        assert_eq!(
            g.add_edge(&[0, 1]),
            Err(HypergraphError::WrongArity {
                expected: 3,
                got: 2
            })
        );
        assert!(matches!(
            g.add_edge(&[0, 1, 7]),
            Err(HypergraphError::VertexOutOfRange { vertex: 7, .. })
        ));
    }

    #[test]
    fn r_below_three_rejected() {
        assert!(matches!(
            RUniformHypergraph::new(10, 2),
            Err(HypergraphError::UnsupportedUniformity { r: 2, .. })
        ));
    }

    #[test]
    fn completions_on_tight_cycle() {
        // C^(3)_6: windows {0,1,2},{1,2,3},{2,3,4},{3,4,5},{4,5,0},{5,0,1}
        let g = tight_cycle(6, 3).unwrap();
        assert_eq!(g.completions(&[1, 2]).unwrap(), &[0, 3]);
        let empty = RUniformHypergraph::new(6, 3).unwrap();
        assert_eq!(empty.completions(&[1, 2]).unwrap(), &[] as &[u32]);
    }

    #[test]
    fn completions_on_complete_graph() {
        let g = crate::gen::complete(5, 3).unwrap();
        assert_eq!(g.completions(&[0, 1]).unwrap(), &[2, 3, 4]);
    }

    #[test]
    fn one_density_examples() {
        let single = RUniformHypergraph::new(1, 3).unwrap();
        assert_eq!(single.one_density(), Ratio::new(0, 1));
        let c5 = tight_cycle(5, 3).unwrap();
        assert_eq!(c5.one_density(), Ratio::new(5, 4));
        let empty0 = RUniformHypergraph::new(0, 3).unwrap();
        assert_eq!(empty0.one_density(), Ratio::new(0, 1));
    }

    #[test]
    fn induced_subhypergraph() {
        let g = tight_cycle(6, 3).unwrap();
        let (full, labels) = g.induced(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(full.edge_count(), 6);
        assert_eq!(labels.len(), 6);

        let (sub, _) = g.induced(&[0, 1, 2, 3]);
        let mut edges = sub.sorted_edges();
        edges.sort();
        assert_eq!(edges, vec![vec![0, 1, 2], vec![1, 2, 3]]);

        let (small, _) = g.induced(&[0, 1]);
        assert_eq!(small.edge_count(), 0);
    }

    #[test]
    fn tuple_reverse_involution() {
        let t = OrderedTuple::new(vec![3, 1, 4]).unwrap();
        assert_eq!(t.reversed().reversed(), t);
        assert!(OrderedTuple::new(vec![1, 1]).is_err());
    }

    #[test]
    fn path_accessors() {
        let p = TightPath::new(vec![0, 1, 2, 3, 4]).unwrap();
        assert_eq!(p.start_tuple(3), &[0, 1]);
        assert_eq!(p.end_tuple(3), &[3, 4]);
        assert_eq!(p.interior(3), &[2]);
        let short = TightPath::new(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(short.interior(3), &[] as &[u32]);
    }
}

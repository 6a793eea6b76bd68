//! The fan: a coherent tree of tight paths sharing a root (r-1)-tuple.
//!
//! Paths are stored as parent chains, so shared prefixes are shared nodes;
//! together with the single-use rule for consecutive intervals of size
//! >= ceil(r/2) this gives the coherence property directly.

use crate::set::Vertex;

#[derive(Debug, Clone)]
struct FanNode {
    vertex: Vertex,
    parent: Option<usize>,
    depth: u32,
}

/// A leaf is either the bare root (zero-level fan) or a node index.
pub type LeafRef = Option<usize>;

#[derive(Debug, Clone)]
pub struct Fan {
    pub root: Vec<Vertex>,
    nodes: Vec<FanNode>,
    pub leaves: Vec<LeafRef>,
}

impl Fan {
    pub fn new(root: Vec<Vertex>) -> Self {
        Fan {
            root,
            nodes: Vec::new(),
            leaves: vec![None],
        }
    }

    pub fn width(&self) -> usize {
        self.leaves.len()
    }

    /// Number of extension levels along the deepest live path.
    pub fn levels(&self) -> usize {
        self.leaves
            .iter()
            .map(|l| l.map_or(0, |i| self.nodes[i].depth as usize))
            .max()
            .unwrap_or(0)
    }

    pub fn depth_of(&self, leaf: LeafRef) -> usize {
        leaf.map_or(0, |i| self.nodes[i].depth as usize)
    }

    /// Appends a child under `leaf`, returning the new leaf reference.
    pub fn extend(&mut self, leaf: LeafRef, vertex: Vertex) -> LeafRef {
        let depth = self.depth_of(leaf) as u32 + 1;
        self.nodes.push(FanNode {
            vertex,
            parent: leaf,
            depth,
        });
        Some(self.nodes.len() - 1)
    }

    /// Full vertex sequence of the path from the root to `leaf`.
    pub fn path_of(&self, leaf: LeafRef) -> Vec<Vertex> {
        let mut tail = Vec::new();
        let mut cur = leaf;
        while let Some(i) = cur {
            tail.push(self.nodes[i].vertex);
            cur = self.nodes[i].parent;
        }
        tail.reverse();
        let mut out = self.root.clone();
        out.extend(tail);
        out
    }

    /// Ordered end (r-1)-tuple of the path at `leaf`.
    pub fn end_tuple(&self, leaf: LeafRef, r: usize) -> Vec<Vertex> {
        let mut tail = Vec::with_capacity(r - 1);
        let mut cur = leaf;
        while let Some(i) = cur {
            if tail.len() == r - 1 {
                break;
            }
            tail.push(self.nodes[i].vertex);
            cur = self.nodes[i].parent;
        }
        if tail.len() < r - 1 {
            let need = r - 1 - tail.len();
            for &v in self.root[self.root.len() - need..].iter().rev() {
                tail.push(v);
            }
        }
        tail.reverse();
        tail
    }

    /// Leaf end-tuples with their references, sorted lexicographically.
    pub fn leaf_tuples(&self, r: usize) -> Vec<(Vec<Vertex>, LeafRef)> {
        let mut out: Vec<(Vec<Vertex>, LeafRef)> = self
            .leaves
            .iter()
            .map(|&l| (self.end_tuple(l, r), l))
            .collect();
        out.sort();
        out
    }

    /// All distinct vertices used by some live path (root included).
    pub fn all_vertices(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self.root.clone();
        for &leaf in &self.leaves {
            let mut cur = leaf;
            while let Some(i) = cur {
                out.push(self.nodes[i].vertex);
                cur = self.nodes[i].parent;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

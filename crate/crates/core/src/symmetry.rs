//! Edge labelling of a tetrahedron and the action of `S_4` on it.
//!
//! Vertices are numbered 1 to 4. The six edges are kept in the fixed order
//! `r21, r31, r32, r41, r42, r43`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex pairs `(i, j)`, `i > j`, in storage order.
pub const EDGES: [(usize, usize); 6] = [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)];

pub const EDGE_NAMES: [&str; 6] = ["r21", "r31", "r32", "r41", "r42", "r43"];

/// Position of the edge between vertices `i` and `j` (1-based, either order).
pub fn edge_index(i: usize, j: usize) -> usize {
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    match (hi, lo) {
        (2, 1) => 0,
        (3, 1) => 1,
        (3, 2) => 2,
        (4, 1) => 3,
        (4, 2) => 4,
        (4, 3) => 5,
        _ => panic!("no edge between vertices {i} and {j}"),
    }
}

/// The four faces as vertex triples.
pub const FACES: [[usize; 3]; 4] = [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]];

/// A bijection of `{1, 2, 3, 4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexPermutation {
    image: [usize; 4],
}

impl VertexPermutation {
    pub const IDENTITY: VertexPermutation = VertexPermutation { image: [1, 2, 3, 4] };

    pub fn new(image: [usize; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &k in &image {
            if !(1..=4).contains(&k) || std::mem::replace(&mut seen[k - 1], true) {
                return Err(Error::InvalidInput(format!("{image:?} is not a permutation of 1..4")));
            }
        }
        Ok(Self { image })
    }

    /// Image of vertex `i` (1-based).
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &VertexPermutation) -> VertexPermutation {
        VertexPermutation { image: [1, 2, 3, 4].map(|i| self.apply(other.apply(i))) }
    }

    /// Where each edge slot is sent: slot of `r_ij` maps to slot of
    /// `r_{π(i)π(j)}`.
    pub fn edge_map(&self) -> [usize; 6] {
        EDGES.map(|(i, j)| edge_index(self.apply(i), self.apply(j)))
    }

    /// All 24 elements, identity first, in lexicographic order of images.
    pub fn all() -> Vec<VertexPermutation> {
        let mut out = Vec::with_capacity(24);
        for a in 1..=4 {
            for b in 1..=4 {
                for c in 1..=4 {
                    for d in 1..=4 {
                        if let Ok(p) = VertexPermutation::new([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s4_has_24_elements() {
        let all = VertexPermutation::all();
        assert_eq!(all.len(), 24);
        assert_eq!(all[0], VertexPermutation::IDENTITY);
    }

    #[test]
    fn transposition_edge_map() {
        let swap12 = VertexPermutation::new([2, 1, 3, 4]).unwrap();
        // r21->r21, r31->r32, r32->r31, r41->r42, r42->r41, r43->r43
        assert_eq!(swap12.edge_map(), [0, 2, 1, 4, 3, 5]);
    }

    #[test]
    fn edge_maps_are_bijective() {
        for p in VertexPermutation::all() {
            let mut m = p.edge_map();
            m.sort();
            assert_eq!(m, [0, 1, 2, 3, 4, 5]);
        }
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(VertexPermutation::new([1, 1, 3, 4]).is_err());
        assert!(VertexPermutation::new([0, 1, 2, 3]).is_err());
    }
}

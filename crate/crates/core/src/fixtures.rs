//! Small cubic graphs used as test fixtures, stored in the adjacency file
//! format under `fixtures/`.

use crate::graph::{parse_adjacency, Graph};

pub const HEXAGONAL_PRISM: &str = include_str!("../fixtures/hexagonal_prism.adj");
pub const TRUNCATED_TETRAHEDRON: &str = include_str!("../fixtures/truncated_tetrahedron.adj");
pub const FRANKLIN: &str = include_str!("../fixtures/franklin.adj");

/// The three 12-vertex 3-regular fixtures, by name.
pub fn cubic_twelve() -> Vec<(&'static str, Graph)> {
    [
        ("hexagonal_prism", HEXAGONAL_PRISM),
        ("truncated_tetrahedron", TRUNCATED_TETRAHEDRON),
        ("franklin", FRANKLIN),
    ]
    .into_iter()
    .map(|(name, text)| (name, parse_adjacency(text).expect("fixture parses")))
    .collect()
}

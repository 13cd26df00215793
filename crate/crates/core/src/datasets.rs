//! Bundled example graphs and a generator of graphs with a built-in mirror
//! symmetry.

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, Graph};
use crate::permutation::Permutation;
use crate::rng;

/// A graph with a short description of where it comes from.
#[derive(Clone, Debug)]
pub struct NamedDataset {
    pub name: String,
    pub graph: Graph,
    pub provenance: String,
}

/// Names accepted by [`dataset_by_name`].
pub const DATASET_NAMES: &[&str] = &["fig4", "fig5", "usa", "usa-me-ri"];

const USA_EDGE_LIST: &str = include_str!("../data/contiguous_usa.txt");

/// SHA-256 of `data/contiguous_usa.txt`.
pub const USA_SHA256: &str = "79efde6dbb35825e3efe235858a9d9cadb293b6241bfb9fce946e60b432aa775";

const USA_VERTICES: usize = 49;
const USA_EDGES: usize = 107;

fn labelled(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_one_based(n, edges)
        .and_then(|g| g.with_labels((1..=n).map(|i| i.to_string()).collect()))
        .expect("static edge list is valid")
}

/// Six vertices, edges `{1,2},{2,3},{3,4},{4,5},{2,5},{5,6}`; symmetric under
/// `(1 6)(2 5)(3 4)`.
pub fn fig5_graph() -> NamedDataset {
    NamedDataset {
        name: "fig5".into(),
        graph: labelled(6, &[(1, 2), (2, 3), (3, 4), (4, 5), (2, 5), (5, 6)]),
        provenance: "six-vertex symmetric follower graph; 6 vertices, 6 edges".into(),
    }
}

/// Nine vertices: two triangles `{1,2,3}` and `{4,5,6}` joined by the
/// inter-edges `{2,5}` and `{3,4}`, both attached to vertex 7, which leads
/// to the tail `7-8-9`.
pub fn fig4_graph() -> NamedDataset {
    NamedDataset {
        name: "fig4".into(),
        graph: labelled(
            9,
            &[
                (1, 2),
                (1, 3),
                (2, 3),
                (2, 5),
                (3, 4),
                (4, 5),
                (4, 6),
                (5, 6),
                (3, 7),
                (4, 7),
                (7, 8),
                (8, 9),
            ],
        ),
        provenance: "two triangles sharing an anchor vertex; 9 vertices, 12 edges".into(),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// The 48 contiguous states plus DC, joined when a road crosses the border.
/// With `with_me_ri_edge` an extra ME–RI edge makes the graph symmetric
/// under `(VT CT)(NH RI)`.
pub fn contiguous_usa_graph(with_me_ri_edge: bool) -> Result<NamedDataset> {
    let fail = |reason: String| Error::DatasetValidation {
        name: "usa".into(),
        reason,
    };
    let digest = sha256_hex(USA_EDGE_LIST.as_bytes());
    if digest != USA_SHA256 {
        return Err(fail(format!("checksum {digest} does not match")));
    }
    let mut graph = parse_edge_list(USA_EDGE_LIST)?;
    if graph.vertex_count() != USA_VERTICES || graph.edge_count() != USA_EDGES {
        return Err(fail(format!(
            "expected {USA_VERTICES} vertices and {USA_EDGES} edges, found {} and {}",
            graph.vertex_count(),
            graph.edge_count()
        )));
    }
    let (name, provenance) = if with_me_ri_edge {
        let me = graph.index_of("ME").ok_or_else(|| fail("no ME".into()))?;
        let ri = graph.index_of("RI").ok_or_else(|| fail("no RI".into()))?;
        graph.add_edge(me, ri)?;
        (
            "usa-me-ri",
            "contiguous USA road-adjacency graph plus ME-RI; 49 vertices, 108 edges",
        )
    } else {
        ("usa", "contiguous USA road-adjacency graph; 49 vertices, 107 edges")
    };
    Ok(NamedDataset {
        name: name.into(),
        graph,
        provenance: provenance.into(),
    })
}

pub fn dataset_by_name(name: &str) -> Result<NamedDataset> {
    match name {
        "fig4" => Ok(fig4_graph()),
        "fig5" => Ok(fig5_graph()),
        "usa" => contiguous_usa_graph(false),
        "usa-me-ri" => contiguous_usa_graph(true),
        other => Err(Error::UnknownDataset(other.to_owned())),
    }
}

/// Random graph on `2·n_half + anchor_count` vertices built from a random
/// block on `0..n_half`, its mirror copy on `n_half..2·n_half`, a random
/// anchor subgraph, identical block-to-anchor edges for mirrored vertices
/// and pair edges `{i, i + n_half}`. All choices use probability `p`.
pub fn random_symmetric_graph(n_half: usize, anchor_count: usize, p: f64, seed: u64) -> Result<NamedDataset> {
    random_symmetric_graph_with(n_half, anchor_count, p, p, seed)
}

/// As [`random_symmetric_graph`] with a separate probability for pair edges.
pub fn random_symmetric_graph_with(
    n_half: usize,
    anchor_count: usize,
    p: f64,
    pair_edge_p: f64,
    seed: u64,
) -> Result<NamedDataset> {
    for q in [p, pair_edge_p] {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidProbability(q));
        }
    }
    if n_half == 0 {
        return Err(Error::InvalidConfig("n_half must be at least 1".into()));
    }
    let mut rng = rng::seeded(seed);
    let h = n_half;
    let n = 2 * h + anchor_count;
    let mut edges = Vec::new();
    for i in 0..h {
        for j in i + 1..h {
            if rng.random::<f64>() < p {
                edges.push((i, j));
                edges.push((i + h, j + h));
            }
        }
    }
    for a in 2 * h..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    for i in 0..h {
        for a in 2 * h..n {
            if rng.random::<f64>() < p {
                edges.push((i, a));
                edges.push((i + h, a));
            }
        }
    }
    for i in 0..h {
        if rng.random::<f64>() < pair_edge_p {
            edges.push((i, i + h));
        }
    }
    Ok(NamedDataset {
        name: format!("mirror-{n_half}-{anchor_count}"),
        graph: Graph::from_edges(n, edges)?,
        provenance: format!("random mirror-symmetric graph, n_half={n_half}, anchors={anchor_count}, p={p}, seed={seed}"),
    })
}

/// The swap `i ↔ i + n_half` that fixes the anchors.
pub fn mirror_involution(n_half: usize, anchor_count: usize) -> Permutation {
    let n = 2 * n_half + anchor_count;
    let mapping = (0..n)
        .map(|i| match i {
            i if i < n_half => i + n_half,
            i if i < 2 * n_half => i - n_half,
            i => i,
        })
        .collect();
    Permutation::new(mapping).expect("mirror map is a bijection")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{is_automorphism, is_symmetric_graph};

    #[test]
    fn fig5_dataset() {
        let d = fig5_graph();
        assert_eq!(d.graph.degrees(), vec![1, 3, 2, 2, 3, 1]);
        assert_eq!(d.graph.edge_count(), 6);
        assert!(is_symmetric_graph(&d.graph).symmetric);
    }

    #[test]
    fn fig4_dataset() {
        let d = fig4_graph();
        assert_eq!((d.graph.vertex_count(), d.graph.edge_count()), (9, 12));
        let swap = Permutation::from_cycles(9, &[&[1, 6], &[2, 5], &[3, 4]]).unwrap();
        assert!(is_automorphism(&d.graph, &swap).unwrap());
        assert_eq!(d.graph.induced_subgraph(&[0, 1, 2]).edge_count(), 3);
        assert_eq!(d.graph.induced_subgraph(&[3, 4, 5]).edge_count(), 3);
    }

    #[test]
    fn usa_counts_and_checksum() {
        let d = contiguous_usa_graph(false).unwrap();
        assert_eq!((d.graph.vertex_count(), d.graph.edge_count()), (49, 107));
        let d = contiguous_usa_graph(true).unwrap();
        assert_eq!(d.graph.edge_count(), 108);
        let me = d.graph.index_of("ME").unwrap();
        let ri = d.graph.index_of("RI").unwrap();
        assert!(d.graph.has_edge(me, ri));
    }

    #[test]
    fn provenance_matches_counts() {
        for name in DATASET_NAMES {
            let d = dataset_by_name(name).unwrap();
            let v = format!("{} vertices", d.graph.vertex_count());
            let e = format!("{} edges", d.graph.edge_count());
            assert!(d.provenance.contains(&v) && d.provenance.contains(&e), "{}", d.provenance);
        }
        assert!(matches!(dataset_by_name("nope"), Err(Error::UnknownDataset(_))));
    }

    #[test]
    fn mirror_graphs_are_symmetric() {
        for seed in 0..50 {
            let h = 1 + (seed as usize % 4);
            let a = seed as usize % 5;
            let d = random_symmetric_graph(h, a, 0.5, seed).unwrap();
            assert!(is_automorphism(&d.graph, &mirror_involution(h, a)).unwrap());
            assert!(is_symmetric_graph(&d.graph).symmetric);
        }
    }

    #[test]
    fn single_pair_with_pair_edge_is_k2() {
        let d = random_symmetric_graph_with(1, 0, 0.5, 1.0, 3).unwrap();
        assert_eq!(d.graph, Graph::complete(2));
    }
}

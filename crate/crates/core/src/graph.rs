//! Undirected simple graphs and their integer matrices.
//!
//! A [`Graph`] stores `n` vertices with 0-based indices and a set of
//! unordered edges `{i, j}` with `i != j`. Vertices may carry string labels;
//! the edge-list parser assigns indices in first-appearance order, so a file
//! written with 1-based numerals keeps its numbering shifted down by one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Dense square matrix of integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "IntMatrix::from_rows needs a square matrix");
            entries.extend_from_slice(row);
        }
        IntMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.dim).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Exact matrix product. Panics on dimension mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim);
        IntMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Squared Frobenius norm, exact.
    pub fn frobenius_sq(&self) -> i64 {
        self.entries.iter().map(|x| x * x).sum()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j) as f64)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .entries
            .iter()
            .map(|x| x.to_string().len())
            .max()
            .unwrap_or(1);
        for i in 0..self.dim {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|x| format!("{x:>width$}"))
                .collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// An [`IntMatrix`] known to equal its transpose.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymmetricIntMatrix(IntMatrix);

impl SymmetricIntMatrix {
    /// Wraps `m`, failing if it is not exactly symmetric.
    pub fn new(m: IntMatrix) -> Result<Self> {
        if m.is_symmetric() {
            Ok(SymmetricIntMatrix(m))
        } else {
            Err(Error::NotSymmetric(1.0))
        }
    }

    pub fn into_inner(self) -> IntMatrix {
        self.0
    }
}

impl Deref for SymmetricIntMatrix {
    type Target = IntMatrix;

    fn deref(&self) -> &IntMatrix {
        &self.0
    }
}

impl fmt::Display for SymmetricIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Undirected, unweighted graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    labels: Option<Vec<String>>,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Graph on `n` unlabeled vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            labels: None,
            edges: BTreeSet::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from 0-based index pairs. Duplicates and orientation are
    /// collapsed; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Like [`Graph::from_edges`] but with 1-based endpoints, as vertices are
    /// numbered in figures.
    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut shifted = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i == 0 || j == 0 {
                return Err(Error::VertexOutOfRange { index: 0, n });
            }
            shifted.push((i - 1, j - 1));
        }
        Self::from_edges(n, shifted)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.insert_unchecked(i, j);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle graph needs at least 3 vertices");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    /// Attaches labels; they must be `n` distinct strings.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: labels.len(),
            });
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidConfig("duplicate vertex labels".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        for k in [i, j] {
            if k >= self.n {
                return Err(Error::VertexOutOfRange { index: k, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop {
                line: 0,
                label: self.label(i),
            });
        }
        Ok(self.insert_unchecked(i, j))
    }

    fn insert_unchecked(&mut self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        if !self.edges.insert(key) {
            return false;
        }
        let (a, b) = key;
        let pos = self.adjacency[a].binary_search(&b).unwrap_err();
        self.adjacency[a].insert(pos, b);
        let pos = self.adjacency[b].binary_search(&a).unwrap_err();
        self.adjacency[b].insert(pos, a);
        true
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Sorted neighbour list of `i`.
    pub fn neighbors(&self, i: usize) -> Result<&[usize]> {
        self.adjacency
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::VertexOutOfRange { index: i, n: self.n })
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of vertex `i`, or its 1-based number when the graph is unlabeled.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(l) => l.iter().position(|x| x == label),
            None => label
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1 && k <= self.n)
                .map(|k| k - 1),
        }
    }

    /// 0/1 adjacency matrix with zero diagonal.
    pub fn adjacency_matrix(&self) -> SymmetricIntMatrix {
        let mut a = IntMatrix::zeros(self.n);
        for &(i, j) in &self.edges {
            a.set(i, j, 1);
            a.set(j, i, 1);
        }
        SymmetricIntMatrix(a)
    }

    /// Graph Laplacian `L = D - A`.
    pub fn laplacian(&self) -> SymmetricIntMatrix {
        let mut l = IntMatrix::zeros(self.n);
        for i in 0..self.n {
            l.set(i, i, self.degree(i) as i64);
        }
        for &(i, j) in &self.edges {
            l.set(i, j, -1);
            l.set(j, i, -1);
        }
        SymmetricIntMatrix(l)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().len() == 1
    }

    /// Subgraph induced by `vertices`, reindexed in the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let index: HashMap<usize, usize> =
            vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut g = Graph::empty(vertices.len());
        for (k, &v) in vertices.iter().enumerate() {
            for w in &self.adjacency[v] {
                if let Some(&m) = index.get(w) {
                    if k < m {
                        g.insert_unchecked(k, m);
                    }
                }
            }
        }
        if self.labels.is_some() {
            g.labels = Some(vertices.iter().map(|&v| self.label(v)).collect());
        }
        g
    }

    /// Writes the graph in edge-list format. Labels are sorted within each
    /// line and lines are sorted; isolated vertices get a single-label line.
    pub fn to_edge_list(&self) -> String {
        let mut lines: Vec<String> = Vec::with_capacity(self.edges.len());
        for &(i, j) in &self.edges {
            let (a, b) = (self.label(i), self.label(j));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            lines.push(format!("{a} {b}"));
        }
        for i in 0..self.n {
            if self.adjacency[i].is_empty() {
                lines.push(self.label(i));
            }
        }
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

/// Parses the edge-list format: one `<label> <label>` pair per line, `#`
/// starts a comment, blank lines are skipped. A line holding one label
/// declares a vertex without adding an edge.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut pairs = Vec::new();

    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(label.to_owned()).or_insert_with(|| {
            labels.push(label.to_owned());
            labels.len() - 1
        })
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [single] => {
                intern(single, &mut labels);
            }
            [a, b] => {
                if a == b {
                    return Err(Error::SelfLoop {
                        line: lineno + 1,
                        label: (*a).to_owned(),
                    });
                }
                let i = intern(a, &mut labels);
                let j = intern(b, &mut labels);
                pairs.push((i, j));
            }
            _ => {
                return Err(Error::MalformedLine {
                    line: lineno + 1,
                    text: raw.to_owned(),
                })
            }
        }
    }

    let mut g = Graph::empty(labels.len());
    for (i, j) in pairs {
        g.insert_unchecked(i, j);
    }
    g.labels = Some(labels);
    Ok(g)
}

/// Samples `G(n, p)`: every pair `i < j` is an edge independently with
/// probability `p`. The pair order is fixed, so equal seeds give equal graphs.
pub fn erdos_renyi_sample(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut rng = rng::seeded(seed);
    Ok(erdos_renyi_with(n, p, &mut rng))
}

pub(crate) fn erdos_renyi_with<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                g.insert_unchecked(i, j);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig5() -> Graph {
        Graph::from_one_based(6, &[(1, 2), (2, 3), (3, 4), (4, 5), (2, 5), (5, 6)]).unwrap()
    }

    #[test]
    fn fig5_adjacency_has_twelve_ones() {
        let a = fig5().adjacency_matrix();
        let ones: i64 = (0..6).map(|i| a.row(i).iter().sum::<i64>()).sum();
        assert_eq!(ones, 12);
        assert!(a.is_symmetric());
        assert!((0..6).all(|i| a.get(i, i) == 0));
    }

    #[test]
    fn edgeless_and_complete_adjacency() {
        assert_eq!(Graph::empty(3).adjacency_matrix().into_inner(), IntMatrix::zeros(3));
        let k4 = Graph::complete(4).adjacency_matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(k4.get(i, j), i64::from(i != j));
            }
        }
    }

    #[test]
    fn laplacian_examples() {
        let l = Graph::path(3).laplacian();
        assert_eq!(l.rows(), vec![vec![1, -1, 0], vec![-1, 2, -1], vec![0, -1, 1]]);
        assert_eq!(l.row_sums(), vec![0, 0, 0]);

        let l = fig5().laplacian();
        let diag: Vec<i64> = (0..6).map(|i| l.get(i, i)).collect();
        assert_eq!(diag, vec![1, 3, 2, 2, 3, 1]);

        let l = Graph::complete(2).laplacian();
        assert_eq!(l.rows(), vec![vec![1, -1], vec![-1, 1]]);
    }

    #[test]
    fn neighbor_sets() {
        // vertex 2 (1-based) of the six-vertex example has neighbours {1, 3, 5}
        assert_eq!(fig5().neighbors(1).unwrap(), &[0, 2, 4]);
        assert!(Graph::empty(4).neighbors(2).unwrap().is_empty());
        assert_eq!(Graph::complete(4).neighbors(0).unwrap(), &[1, 2, 3]);
        assert_eq!(
            Graph::empty(2).neighbors(5),
            Err(Error::VertexOutOfRange { index: 5, n: 2 })
        );
    }

    #[test]
    fn parse_examples() {
        let g = parse_edge_list("1 2\n2 3\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);

        let g = parse_edge_list("a b\nb a\n").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);

        assert_eq!(
            parse_edge_list("x x\n"),
            Err(Error::SelfLoop {
                line: 1,
                label: "x".into()
            })
        );
    }

    #[test]
    fn parse_comments_blank_lines_and_errors() {
        let g = parse_edge_list("# header\n\nb c  # trailing\n\n a   b \n").unwrap();
        assert_eq!(g.labels().unwrap(), &["b", "c", "a"]);
        assert_eq!(g.edge_count(), 2);

        let err = parse_edge_list("a b\nc d e\n").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 2, .. }));

        let g = parse_edge_list("solo\n").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn serialize_sorts_labels() {
        let g = parse_edge_list("z a\nb a\n").unwrap();
        assert_eq!(g.to_edge_list(), "a b\na z\n");
    }

    #[test]
    fn erdos_renyi_extremes_and_errors() {
        assert_eq!(erdos_renyi_sample(7, 0.0, 3).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi_sample(7, 1.0, 3).unwrap().edge_count(), 21);
        assert_eq!(
            erdos_renyi_sample(7, 1.5, 3),
            Err(Error::InvalidProbability(1.5))
        );
    }

    #[test]
    fn erdos_renyi_edge_count_within_four_sigma() {
        let g = erdos_renyi_sample(50, 0.5, 20_221_014).unwrap();
        assert!((540..=685).contains(&g.edge_count()), "{}", g.edge_count());
    }

    #[test]
    fn erdos_renyi_pair_frequencies() {
        let mut counts = vec![0usize; 45];
        for s in 0..1000u64 {
            let g = erdos_renyi_sample(10, 0.3, rng::derive_seed(&[99, s])).unwrap();
            let mut k = 0;
            for i in 0..10 {
                for j in i + 1..10 {
                    counts[k] += usize::from(g.has_edge(i, j));
                    k += 1;
                }
            }
        }
        let ok = counts
            .iter()
            .filter(|&&c| (250..=350).contains(&c))
            .count();
        assert!(ok >= 43, "only {ok} of 45 pairs in range: {counts:?}");
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..40).prop_map(move |pairs| {
                Graph::from_edges(n, pairs.into_iter().filter(|(a, b)| a != b)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn laplacian_annihilates_ones(g in arb_graph()) {
            let l = g.laplacian();
            prop_assert!(l.mul_vec(&vec![1; g.vertex_count()]).iter().all(|&x| x == 0));
            let a = g.adjacency_matrix();
            prop_assert!(a.is_symmetric());
            prop_assert!((0..g.vertex_count()).all(|i| a.get(i, i) == 0));
        }

        #[test]
        fn edge_list_round_trip(g in arb_graph()) {
            let text = g.to_edge_list();
            let back = parse_edge_list(&text).unwrap();
            let relabel = |h: &Graph| -> BTreeSet<(String, String)> {
                h.edges().map(|(i, j)| {
                    let (a, b) = (h.label(i), h.label(j));
                    if a <= b { (a, b) } else { (b, a) }
                }).collect()
            };
            prop_assert_eq!(relabel(&g), relabel(&back));
            prop_assert_eq!(g.vertex_count(), back.vertex_count());
        }

        #[test]
        fn equal_seeds_equal_graphs(seed in any::<u64>(), p in 0.0f64..=1.0) {
            prop_assert_eq!(erdos_renyi_sample(9, p, seed).unwrap(), erdos_renyi_sample(9, p, seed).unwrap());
        }
    }
}

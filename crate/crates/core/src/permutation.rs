//! Vertex permutations, their matrices and cycle structure.
//!
//! Matrix convention: `Π[i][π(i)] = 1`. For `π = (2 1 4 5 3)` (1-based, two-line
//! form with the implicit top row `1 2 3 4 5`) row 1 is `e₂ᵀ`, row 3 is `e₄ᵀ`
//! and row 5 is `e₃ᵀ`. Every other module uses this convention.
//!
//! Cycle structure drives the `-1` eigenvalues: each cycle of even length
//! contributes exactly one, fixed points and odd cycles contribute none.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, IntMatrix};

/// A bijection on `{0, …, n-1}`; `mapping[i] = π(i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &x in &mapping {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!("{mapping:?}")));
            }
        }
        Ok(Permutation { mapping })
    }

    pub(crate) fn new_unchecked(mapping: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(mapping.clone()).is_ok());
        Permutation { mapping }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    /// From the bottom row of the two-line form, 1-based.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let mut mapping = Vec::with_capacity(images.len());
        for &x in images {
            if x == 0 {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            mapping.push(x - 1);
        }
        Self::new(mapping)
    }

    /// Product of disjoint 1-based cycles on `n` points, e.g.
    /// `from_cycles(6, &[&[1, 6], &[2, 5], &[3, 4]])`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut mapping: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &v) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()];
                if v == 0 || v > n || next == 0 || next > n || touched[v - 1] {
                    return Err(Error::InvalidPermutation(format!("{cycles:?}")));
                }
                touched[v - 1] = true;
                mapping[v - 1] = next - 1;
            }
        }
        Self::new(mapping)
    }

    /// Parses one line of space-separated 1-based images.
    pub fn parse(text: &str) -> Result<Self> {
        let images = text
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidPermutation(text.trim().to_owned()))
            })
            .collect::<Result<Vec<_>>>()?;
        if images.is_empty() {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        Self::from_one_based(&images)
    }

    /// Parses cycle notation such as `(1 6)(2 5)(3 4)` on `n` points; `()`
    /// is the identity.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Self> {
        let bad = || Error::InvalidPermutation(text.trim().to_owned());
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let cycle = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Self::from_cycles(n, &refs)
    }

    /// Uniformly random permutation of `n` points.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.shuffle(rng);
        Permutation { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.mapping.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { mapping: inv }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len());
        Permutation {
            mapping: other.mapping.iter().map(|&x| self.mapping[x]).collect(),
        }
    }

    /// One-line 1-based text form, the inverse of [`Permutation::parse`].
    pub fn to_one_based_string(&self) -> String {
        let parts: Vec<String> = self.mapping.iter().map(|x| (x + 1).to_string()).collect();
        parts.join(" ")
    }

    /// Cycle notation without fixed points, e.g. `(1 6)(2 5)(3 4)`; the
    /// identity prints as `()`.
    pub fn cycle_notation(&self) -> String {
        self.cycle_notation_with(|i| (i + 1).to_string())
    }

    pub fn cycle_notation_with<F: Fn(usize) -> String>(&self, label: F) -> String {
        let d = cycle_decomposition(self);
        let parts: Vec<String> = d
            .cycles()
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let names: Vec<String> = c.iter().map(|&v| label(v)).collect();
                format!("({})", names.join(" "))
            })
            .collect();
        if parts.is_empty() {
            "()".to_owned()
        } else {
            parts.concat()
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{}", self.cycle_notation())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

/// Disjoint directed cycles of a permutation, fixed points included.
///
/// Each cycle starts at its smallest element and follows `i → π(i)`; cycles
/// are ordered by their first element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    n: usize,
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Cycles of even length. Fixed points count as odd.
    pub fn even_cycles(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.cycles.iter().filter(|c| c.len() % 2 == 0)
    }

    pub fn two_cycles(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cycles
            .iter()
            .filter(|c| c.len() == 2)
            .map(|c| (c[0], c[1]))
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.cycles.iter().filter(|c| c.len() == 1).map(|c| c[0])
    }

    /// Rebuilds the mapping array by walking each cycle.
    pub fn to_permutation(&self) -> Permutation {
        let mut mapping = vec![usize::MAX; self.n];
        for c in &self.cycles {
            for (k, &v) in c.iter().enumerate() {
                mapping[v] = c[(k + 1) % c.len()];
            }
        }
        Permutation::new_unchecked(mapping)
    }
}

/// `Π` with `Π[i][π(i)] = 1`.
pub fn permutation_matrix(p: &Permutation) -> IntMatrix {
    let mut m = IntMatrix::zeros(p.len());
    for (i, &x) in p.mapping.iter().enumerate() {
        m.set(i, x, 1);
    }
    m
}

pub fn cycle_decomposition(p: &Permutation) -> CycleDecomposition {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cycle.push(v);
            v = p.apply(v);
        }
        cycles.push(cycle);
    }
    CycleDecomposition { n, cycles }
}

/// Number of cycles of even length; this is the multiplicity of the
/// eigenvalue `-1` of the permutation matrix.
pub fn count_even_cycles(d: &CycleDecomposition) -> usize {
    d.even_cycles().count()
}

/// Eigenvector of `Π` for eigenvalue `-1` supported on one even cycle: entries
/// alternate `+1, -1` along the cycle starting from its first element and are
/// zero elsewhere.
pub fn minus_one_eigenvector(p: &Permutation, cycle: &[usize]) -> Result<Vec<i64>> {
    if cycle.is_empty() {
        return Err(Error::ForeignCycle(cycle.to_vec()));
    }
    for (k, &v) in cycle.iter().enumerate() {
        if v >= p.len() || p.apply(v) != cycle[(k + 1) % cycle.len()] {
            return Err(Error::ForeignCycle(cycle.to_vec()));
        }
    }
    if cycle.len() % 2 == 1 {
        return Err(Error::OddCycle(cycle.len()));
    }
    let mut v = vec![0i64; p.len()];
    for (k, &i) in cycle.iter().enumerate() {
        v[i] = if k % 2 == 0 { 1 } else { -1 };
    }
    Ok(v)
}

/// The graph with edge set `{{π(i), π(j)} : {i, j} ∈ E}`. Its adjacency matrix
/// is `Πᵀ A Π` under the row convention above. Labels stay attached to
/// positions, not to the moved vertices.
pub fn apply_to_graph(p: &Permutation, g: &Graph) -> Result<Graph> {
    if p.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            expected: g.vertex_count(),
            actual: p.len(),
        });
    }
    let out = Graph::from_edges(g.vertex_count(), g.edges().map(|(i, j)| (p.apply(i), p.apply(j))))?;
    match g.labels() {
        Some(l) => out.with_labels(l.to_vec()),
        None => Ok(out),
    }
}

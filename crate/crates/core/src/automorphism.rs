//! Exact automorphism search.
//!
//! Automorphisms are found by individualization and refinement. Both sides of
//! a candidate mapping start from the same vertex colouring, which is refined
//! to an equitable partition by repeatedly splitting colour classes according
//! to the multiset of neighbour colours. At each level one vertex `u` of the
//! smallest non-trivial class is individualized in the domain and every
//! vertex `v` of the same class in turn is individualized in the image; the
//! pair is refined in lock step and pruned as soon as the class signatures
//! differ. Every leaf is a discrete partition, which fixes a bijection that
//! is then checked edge by edge.
//!
//! A brute-force enumeration of all `n!` permutations (capped at
//! [`BRUTE_FORCE_MAX_N`]) is kept alongside as an oracle.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, IntMatrix};
use crate::permutation::{count_even_cycles, cycle_decomposition, permutation_matrix, Permutation};

/// Largest `n` accepted by [`brute_force_automorphisms`].
pub const BRUTE_FORCE_MAX_N: usize = 10;

/// Upper bound on automorphisms visited by [`max_minus_one_multiplicity`].
/// Large enough for the full symmetric group on 10 points.
pub const GROUP_ENUMERATION_CAP: usize = 4_000_000;

/// A permutation together with the exact check `ΠA = AΠ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AutomorphismCertificate {
    pub permutation: Permutation,
    pub verified: bool,
    pub even_cycle_count: usize,
}

impl AutomorphismCertificate {
    /// Checks `p` against `g` and records the result.
    pub fn certify(g: &Graph, p: Permutation) -> Result<Self> {
        let verified = is_automorphism(g, &p)?;
        let even_cycle_count = count_even_cycles(&cycle_decomposition(&p));
        Ok(AutomorphismCertificate {
            permutation: p,
            verified,
            even_cycle_count,
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.permutation.is_identity()
    }

    pub fn has_two_cycle(&self) -> bool {
        cycle_decomposition(&self.permutation).two_cycles().next().is_some()
    }
}

/// `ΠA = AΠ` in exact integer arithmetic.
pub fn commutes(p: &IntMatrix, m: &IntMatrix) -> bool {
    p.mul(m) == m.mul(p)
}

/// True iff `p` maps the edge set of `g` onto itself.
pub fn is_automorphism(g: &Graph, p: &Permutation) -> Result<bool> {
    if p.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            expected: g.vertex_count(),
            actual: p.len(),
        });
    }
    Ok(preserves_edges(g, p))
}

fn preserves_edges(g: &Graph, p: &Permutation) -> bool {
    g.edges().all(|(i, j)| g.has_edge(p.apply(i), p.apply(j)))
}

/// Graph-matching distortion `‖ΠA − BΠ‖_F`.
///
/// Zero exactly when `B[i][j] = A[π(i)][π(j)]` for all `i, j`, i.e. when `π`
/// carries the graph of `B` onto the graph of `A`. For `A = B` this is the
/// automorphism condition.
pub fn distortion(a: &IntMatrix, b: &IntMatrix, p: &Permutation) -> Result<f64> {
    let (left, right) = distortion_forms(a, b, p)?;
    debug_assert_eq!(left, right);
    Ok((left as f64).sqrt())
}

/// Squared Frobenius norms of `ΠA − BΠ` and `A − ΠᵀBΠ`; always equal.
pub fn distortion_forms(a: &IntMatrix, b: &IntMatrix, p: &Permutation) -> Result<(i64, i64)> {
    for dim in [b.dim(), p.len()] {
        if dim != a.dim() {
            return Err(Error::SizeMismatch {
                expected: a.dim(),
                actual: dim,
            });
        }
    }
    let pm = permutation_matrix(p);
    let commuted = pm.mul(a).sub(&b.mul(&pm)).frobenius_sq();
    let conjugated = a.sub(&pm.transpose().mul(b).mul(&pm)).frobenius_sq();
    Ok((commuted, conjugated))
}

/// How much of the group [`find_automorphisms`] should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchLimit {
    /// The whole automorphism group.
    Exhaustive,
    /// Stop after this many non-identity automorphisms.
    Nontrivial(usize),
}

/// Lock-step refinement of a domain and an image colouring of one graph.
struct Refiner<'a> {
    g: &'a Graph,
}

type Colouring = Vec<u32>;

impl<'a> Refiner<'a> {
    fn class_count(colours: &[u32]) -> usize {
        colours.iter().copied().max().map_or(0, |m| m as usize + 1)
    }

    fn signatures(&self, colours: &[u32]) -> Vec<Vec<u32>> {
        (0..self.g.vertex_count())
            .map(|v| {
                let nb = self.g.neighbors(v).expect("in range");
                let mut sig = Vec::with_capacity(nb.len() + 1);
                sig.push(colours[v]);
                let start = sig.len();
                sig.extend(nb.iter().map(|&w| colours[w]));
                sig[start..].sort_unstable();
                sig
            })
            .collect()
    }

    /// Refines both colourings to a common equitable fixed point. Returns
    /// false if they stop being compatible (different class signatures).
    fn refine(&self, a: &mut Colouring, b: &mut Colouring) -> bool {
        let mut classes = Self::class_count(a);
        loop {
            let sa = self.signatures(a);
            let sb = self.signatures(b);
            let mut count: BTreeMap<&[u32], (usize, usize)> = BTreeMap::new();
            for s in &sa {
                count.entry(s.as_slice()).or_default().0 += 1;
            }
            for s in &sb {
                count.entry(s.as_slice()).or_default().1 += 1;
            }
            if count.values().any(|(x, y)| x != y) {
                return false;
            }
            let rank: BTreeMap<&[u32], u32> = count
                .keys()
                .enumerate()
                .map(|(k, s)| (*s, k as u32))
                .collect();
            for (v, s) in sa.iter().enumerate() {
                a[v] = rank[s.as_slice()];
            }
            for (v, s) in sb.iter().enumerate() {
                b[v] = rank[s.as_slice()];
            }
            if rank.len() == classes {
                return true;
            }
            classes = rank.len();
        }
    }

    /// Normalises arbitrary initial colours to `0..k` (same map on both sides).
    fn initial(colours: &[u32]) -> Colouring {
        let mut distinct: Vec<u32> = colours.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        colours
            .iter()
            .map(|c| distinct.binary_search(c).expect("present") as u32)
            .collect()
    }

    fn individualize(colours: &mut Colouring, v: usize, fresh: u32) {
        colours[v] = fresh;
    }

    /// Depth-first enumeration of all bijections compatible with the pair of
    /// colourings; `visit` sees each verified automorphism once.
    fn search<F>(&self, a: Colouring, b: Colouring, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(Permutation) -> ControlFlow<()>,
    {
        let n = self.g.vertex_count();
        let k = Self::class_count(&a);
        if k == n {
            let mut by_colour = vec![usize::MAX; n];
            for (v, &c) in b.iter().enumerate() {
                by_colour[c as usize] = v;
            }
            let mapping: Vec<usize> = a.iter().map(|&c| by_colour[c as usize]).collect();
            let p = Permutation::new_unchecked(mapping);
            if preserves_edges(self.g, &p) {
                return visit(p);
            }
            return ControlFlow::Continue(());
        }

        let mut sizes = vec![0usize; k];
        for &c in &a {
            sizes[c as usize] += 1;
        }
        let target = (0..k)
            .filter(|&c| sizes[c] > 1)
            .min_by_key(|&c| (sizes[c], c))
            .expect("non-discrete partition has a non-singleton class") as u32;
        let u = a.iter().position(|&c| c == target).expect("class is non-empty");
        let fresh = k as u32;
        for v in (0..n).filter(|&v| b[v] == target) {
            let mut a2 = a.clone();
            let mut b2 = b.clone();
            Self::individualize(&mut a2, u, fresh);
            Self::individualize(&mut b2, v, fresh);
            if self.refine(&mut a2, &mut b2) {
                self.search(a2, b2, visit)?;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Streams every automorphism of `g` that preserves `colours` (one colour per
/// vertex) to `visit`, identity included. Stop early by returning `Break`.
pub fn for_each_automorphism<F>(g: &Graph, colours: &[u32], mut visit: F)
where
    F: FnMut(Permutation) -> ControlFlow<()>,
{
    assert_eq!(colours.len(), g.vertex_count());
    if g.vertex_count() == 0 {
        return;
    }
    let refiner = Refiner { g };
    let mut a = Refiner::initial(colours);
    let mut b = a.clone();
    if refiner.refine(&mut a, &mut b) {
        let _ = refiner.search(a, b, &mut visit);
    }
}

fn uniform(g: &Graph) -> Vec<u32> {
    vec![0; g.vertex_count()]
}

/// Automorphisms of `g` as verified certificates, sorted by mapping. The
/// identity is always first.
pub fn find_automorphisms(g: &Graph, limit: SearchLimit) -> Vec<AutomorphismCertificate> {
    find_automorphisms_coloured(g, &uniform(g), limit)
}

/// Like [`find_automorphisms`] but only permutations that keep every vertex
/// within its colour class.
pub fn find_automorphisms_coloured(
    g: &Graph,
    colours: &[u32],
    limit: SearchLimit,
) -> Vec<AutomorphismCertificate> {
    let mut found = vec![Permutation::identity(g.vertex_count())];
    let mut nontrivial = 0usize;
    for_each_automorphism(g, colours, |p| {
        if p.is_identity() {
            return ControlFlow::Continue(());
        }
        found.push(p);
        nontrivial += 1;
        match limit {
            SearchLimit::Nontrivial(k) if nontrivial >= k => ControlFlow::Break(()),
            _ => ControlFlow::Continue(()),
        }
    });
    found.sort();
    found
        .into_iter()
        .map(|p| AutomorphismCertificate::certify(g, p).expect("sizes match"))
        .collect()
}

/// Result of a symmetry check.
#[derive(Clone, Debug)]
pub struct SymmetryVerdict {
    pub symmetric: bool,
    pub witness: Option<AutomorphismCertificate>,
}

/// A graph is symmetric when it has a non-identity automorphism. The witness
/// prefers an automorphism with a 2-cycle when one exists.
pub fn is_symmetric_graph(g: &Graph) -> SymmetryVerdict {
    let witness = find_automorphisms(g, SearchLimit::Nontrivial(1))
        .into_iter()
        .find(|c| !c.is_trivial());
    match witness {
        None => SymmetryVerdict {
            symmetric: false,
            witness: None,
        },
        Some(first) => {
            let witness = involution_from(g, &first.permutation)
                .or_else(|| find_two_cycle_automorphism(g))
                .unwrap_or(first);
            SymmetryVerdict {
                symmetric: true,
                witness: Some(witness),
            }
        }
    }
}

/// If `p` has even order, `p^(ord/2)` is an automorphism containing a
/// 2-cycle.
fn involution_from(g: &Graph, p: &Permutation) -> Option<AutomorphismCertificate> {
    let d = cycle_decomposition(p);
    let order = d.cycles().iter().map(Vec::len).fold(1usize, lcm);
    if order % 2 != 0 {
        return None;
    }
    let mut power = Permutation::identity(p.len());
    for _ in 0..order / 2 {
        power = p.compose(&power);
    }
    let cert = AutomorphismCertificate::certify(g, power).ok()?;
    (cert.verified && cert.has_two_cycle()).then_some(cert)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Finds an automorphism whose cycle decomposition contains a 2-cycle.
///
/// Every pair `u < v` of vertices with equal refined colour is tried as a
/// forced swap `π(u) = v, π(v) = u`, so the search is exhaustive: `None`
/// means no automorphism of `g` has a 2-cycle. That happens for asymmetric
/// graphs and also for graphs whose automorphism group has odd order.
pub fn find_two_cycle_automorphism(g: &Graph) -> Option<AutomorphismCertificate> {
    let n = g.vertex_count();
    if n < 2 {
        return None;
    }
    let refiner = Refiner { g };
    let mut base = Refiner::initial(&uniform(g));
    let mut image = base.clone();
    refiner.refine(&mut base, &mut image);
    let k = Refiner::class_count(&base) as u32;

    for u in 0..n {
        for v in u + 1..n {
            if base[u] != base[v] {
                continue;
            }
            let mut a = base.clone();
            let mut b = base.clone();
            Refiner::individualize(&mut a, u, k);
            Refiner::individualize(&mut a, v, k + 1);
            Refiner::individualize(&mut b, v, k);
            Refiner::individualize(&mut b, u, k + 1);
            if !refiner.refine(&mut a, &mut b) {
                continue;
            }
            let mut hit = None;
            let _ = refiner.search(a, b, &mut |p: Permutation| {
                hit = Some(p);
                ControlFlow::Break(())
            });
            if let Some(p) = hit {
                return AutomorphismCertificate::certify(g, p).ok();
            }
        }
    }
    None
}

/// All automorphisms by trying every permutation in lexicographic order.
pub fn brute_force_automorphisms(g: &Graph) -> Result<Vec<Permutation>> {
    let n = g.vertex_count();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::SizeMismatch {
            expected: BRUTE_FORCE_MAX_N,
            actual: n,
        });
    }
    let masks: Vec<u32> = (0..n)
        .map(|i| {
            g.neighbors(i)
                .expect("in range")
                .iter()
                .fold(0u32, |m, &j| m | (1 << j))
        })
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let ok = (0..n).all(|i| {
            let mut image = 0u32;
            let mut m = masks[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                image |= 1 << perm[j];
                m &= m - 1;
            }
            image == masks[perm[i]]
        });
        if ok {
            out.push(Permutation::new_unchecked(perm.clone()));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Maximum, over the automorphism group, of the number of even cycles (the
/// multiplicity of eigenvalue `-1` of `Π`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Multiplicity {
    Computed(usize),
    NotComputed { reason: String },
}

pub fn max_minus_one_multiplicity(g: &Graph) -> Multiplicity {
    let bound = g.vertex_count() / 2;
    let mut best = 0usize;
    let mut visited = 0usize;
    let mut exhausted = false;
    for_each_automorphism(g, &uniform(g), |p| {
        visited += 1;
        best = best.max(count_even_cycles(&cycle_decomposition(&p)));
        if best == bound {
            return ControlFlow::Break(());
        }
        if visited >= GROUP_ENUMERATION_CAP {
            exhausted = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    if exhausted && best < bound {
        Multiplicity::NotComputed {
            reason: format!("automorphism group larger than {GROUP_ENUMERATION_CAP}"),
        }
    } else {
        Multiplicity::Computed(best)
    }
}

/// Subgraphs of symmetry exposed by the 2-cycles of an automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrySubgraphs {
    /// Vertex sets, each sorted, ordered by smallest member.
    pub blocks: Vec<Vec<usize>>,
    /// `(a, b)` with `π(blocks[a]) = blocks[b]`, `a <= b`; `a == b` marks a
    /// block mapped onto itself.
    pub block_pairs: Vec<(usize, usize)>,
    /// The 2-cycles `(i, π(i))`, `i < π(i)`.
    pub correspondence: Vec<(usize, usize)>,
    /// Fixed points of the permutation.
    pub anchor_set: Vec<usize>,
    /// Vertices on cycles of length three or more; neither block nor anchor.
    pub other_moved: Vec<usize>,
}

impl SymmetrySubgraphs {
    /// Anchor vertices adjacent to some vertex of `block`.
    pub fn anchor_neighbors(&self, g: &Graph, block: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.blocks[block]
            .iter()
            .flat_map(|&v| g.neighbors(v).expect("in range").iter().copied())
            .filter(|w| self.anchor_set.binary_search(w).is_ok())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Splits the 2-cycle support of `cert` into subgraphs of symmetry.
///
/// The edges `{i, π(i)}` joining corresponding vertices are set aside, and the
/// remaining subgraph induced on the 2-cycle vertices is cut into connected
/// components. The permutation maps components onto components, which gives
/// the pairing.
pub fn subgraphs_of_symmetry(g: &Graph, cert: &AutomorphismCertificate) -> Result<SymmetrySubgraphs> {
    if !cert.verified || !is_automorphism(g, &cert.permutation)? {
        return Err(Error::UnverifiedCertificate);
    }
    let p = &cert.permutation;
    let d = cycle_decomposition(p);
    let correspondence: Vec<(usize, usize)> = d.two_cycles().collect();
    if correspondence.is_empty() {
        return Err(Error::NoTwoCycle);
    }
    let n = g.vertex_count();
    let mut in_pair = vec![false; n];
    for &(i, j) in &correspondence {
        in_pair[i] = true;
        in_pair[j] = true;
    }

    let mut component = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for s in (0..n).filter(|&v| in_pair[v]) {
        if component[s] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        component[s] = id;
        let mut stack = vec![s];
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &w in g.neighbors(v)? {
                if in_pair[w] && w != p.apply(v) && component[w] == usize::MAX {
                    component[w] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }

    let mut block_pairs: Vec<(usize, usize)> = (0..blocks.len())
        .map(|a| {
            let b = component[p.apply(blocks[a][0])];
            (a.min(b), a.max(b))
        })
        .collect();
    block_pairs.sort_unstable();
    block_pairs.dedup();

    let anchor_set: Vec<usize> = d.fixed_points().collect::<Vec<_>>();
    let mut anchor_set = anchor_set;
    anchor_set.sort_unstable();
    let mut other_moved: Vec<usize> = d
        .cycles()
        .iter()
        .filter(|c| c.len() >= 3)
        .flatten()
        .copied()
        .collect();
    other_moved.sort_unstable();

    Ok(SymmetrySubgraphs {
        blocks,
        block_pairs,
        correspondence,
        anchor_set,
        other_moved,
    })
}

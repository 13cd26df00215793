//! Leader-follower consensus networks.
//!
//! Followers run the agreement protocol on the follower graph, and the
//! followers adjacent to the leader also track the leader's state `u(t)`:
//!
//! ```text
//! ẋ_f = −L_f x_f + δ u(t),    L_f = L(G_f) + diag(δ)
//! ```
//!
//! where `δᵢ = 1` iff follower `i` is adjacent to the leader. The system is
//! controllable iff `L_f` has a simple spectrum and no eigenvector orthogonal
//! to `1`; the Kalman rank of `[δ, L_f δ, …]` is kept as an independent check.

use std::ops::ControlFlow;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::automorphism::{for_each_automorphism, SymmetryVerdict, AutomorphismCertificate, GROUP_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, Graph, SymmetricIntMatrix};
use crate::permutation::{cycle_decomposition, Permutation};
use crate::spectral::{self, OrthogonalWitness};

/// Default tolerance for the spectral controllability test.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Largest follower count accepted by the Kalman rank test.
pub const KALMAN_MAX_FOLLOWERS: usize = 30;

/// Breakdown threshold of the Kalman rank computation.
pub const KALMAN_RANK_THRESHOLD: f64 = 1e-8;

/// Follower graph plus the followers adjacent to the single leader.
#[derive(Clone, Debug, PartialEq)]
pub struct LeaderFollowerSystem {
    follower_graph: Graph,
    leader_adjacency: Vec<bool>,
}

impl LeaderFollowerSystem {
    pub fn new(follower_graph: Graph, leader_adjacency: Vec<bool>) -> Result<Self> {
        if leader_adjacency.len() != follower_graph.vertex_count() {
            return Err(Error::SizeMismatch {
                expected: follower_graph.vertex_count(),
                actual: leader_adjacency.len(),
            });
        }
        if !leader_adjacency.iter().any(|&d| d) {
            return Err(Error::LeaderDisconnected);
        }
        Ok(LeaderFollowerSystem {
            follower_graph,
            leader_adjacency,
        })
    }

    /// Leader adjacent to the followers with the given labels.
    pub fn with_leader_labels<S: AsRef<str>>(follower_graph: Graph, labels: &[S]) -> Result<Self> {
        let mut delta = vec![false; follower_graph.vertex_count()];
        for l in labels {
            let i = follower_graph
                .index_of(l.as_ref())
                .ok_or_else(|| Error::UnknownLabel(l.as_ref().to_owned()))?;
            delta[i] = true;
        }
        Self::new(follower_graph, delta)
    }

    pub fn follower_graph(&self) -> &Graph {
        &self.follower_graph
    }

    pub fn leader_adjacency(&self) -> &[bool] {
        &self.leader_adjacency
    }

    pub fn follower_count(&self) -> usize {
        self.leader_adjacency.len()
    }

    pub fn delta(&self) -> Vec<i64> {
        self.leader_adjacency.iter().map(|&d| i64::from(d)).collect()
    }

    /// Whether the follower graph alone is connected.
    pub fn followers_connected(&self) -> bool {
        self.follower_graph.is_connected()
    }

    /// Whether every follower component touches the leader, i.e. the whole
    /// graph including the leader is connected.
    pub fn leader_reaches_all(&self) -> bool {
        self.follower_graph
            .connected_components()
            .iter()
            .all(|c| c.iter().any(|&v| self.leader_adjacency[v]))
    }

    /// System file text: the follower edge list followed by a `leader:` line.
    pub fn to_spec_text(&self) -> String {
        let mut out = self.follower_graph.to_edge_list();
        let mut leaders: Vec<String> = (0..self.follower_count())
            .filter(|&i| self.leader_adjacency[i])
            .map(|i| self.follower_graph.label(i))
            .collect();
        leaders.sort();
        out.push_str(&format!("leader: {}\n", leaders.join(" ")));
        out
    }
}

/// Parses a system file: edge-list lines plus one or more `leader:` lines
/// naming the followers adjacent to the leader.
pub fn parse_system_spec(text: &str) -> Result<LeaderFollowerSystem> {
    let mut edges = String::new();
    let mut leaders: Vec<String> = Vec::new();
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("").trim();
        if let Some(rest) = content.strip_prefix("leader:") {
            leaders.extend(rest.split_whitespace().map(str::to_owned));
            edges.push('\n');
        } else {
            edges.push_str(line);
            edges.push('\n');
        }
    }
    let g = parse_edge_list(&edges)?;
    if leaders.is_empty() {
        return Err(Error::LeaderDisconnected);
    }
    LeaderFollowerSystem::with_leader_labels(g, &leaders)
}

/// `L_f = L(G_f) + diag(δ)`.
pub fn build_lf(sys: &LeaderFollowerSystem) -> SymmetricIntMatrix {
    let mut lf = sys.follower_graph.laplacian().into_inner();
    for (i, &d) in sys.leader_adjacency.iter().enumerate() {
        if d {
            lf.set(i, i, lf.get(i, i) + 1);
        }
    }
    SymmetricIntMatrix::new(lf).expect("Laplacian plus diagonal is symmetric")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Spectral,
    Kalman,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControllabilityVerdict {
    pub controllable: bool,
    pub method: Method,
    /// Eigenvectors of `L_f` orthogonal to `1` (spectral method).
    pub witnesses: Vec<OrthogonalWitness>,
    /// Eigenvalues of `L_f` within tolerance of zero; these modes are not
    /// reached by the leader (spectral method).
    pub zero_modes: usize,
    pub repeated_spectrum: bool,
    /// Rank of the controllability matrix (Kalman method).
    pub rank: Option<usize>,
    pub rank_deficiency: Option<usize>,
}

/// Spectral test: controllable iff `L_f` has a simple spectrum (gaps `> tol`),
/// no unit eigenvector `v` with `|vᵀ1| <= tol`, and no eigenvalue within
/// `tol` of zero. A zero eigenvalue only occurs when some follower component
/// is not adjacent to the leader.
pub fn is_controllable_spectral(sys: &LeaderFollowerSystem, tol: f64) -> ControllabilityVerdict {
    let s = spectral::eigendecompose_int(&build_lf(sys)).expect("L_f is symmetric");
    let gap = spectral::has_simple_spectrum(&s, tol);
    let witnesses = spectral::ones_orthogonal_eigenvectors(&s, tol);
    let zero_modes = s.eigenvalues().iter().filter(|l| l.abs() <= tol).count();
    ControllabilityVerdict {
        controllable: gap.simple && witnesses.is_empty() && zero_modes == 0,
        method: Method::Spectral,
        witnesses,
        zero_modes,
        repeated_spectrum: !gap.simple,
        rank: None,
        rank_deficiency: None,
    }
}

/// Kalman rank test on the pair `(L_f, δ)`.
///
/// The rank of `[δ, L_f δ, …, L_f^{n−1} δ]` equals the dimension of the
/// Krylov space it spans. Raw powers of `L_f` drown the small eigen-directions
/// in rounding already around `n = 10`, so the columns are generated the
/// Arnoldi way: each step multiplies the newest orthonormal basis vector by
/// `L_f` (rescaled to spectral radius at most 1) and orthogonalises it twice
/// against the basis. A step whose remainder has norm at most `1e-8` means the
/// space has stopped growing and the rank is the current basis size.
pub fn is_controllable_kalman(sys: &LeaderFollowerSystem) -> Result<ControllabilityVerdict> {
    let n = sys.follower_count();
    if n > KALMAN_MAX_FOLLOWERS {
        return Err(Error::TooLargeForKalman(n, KALMAN_MAX_FOLLOWERS));
    }
    let lf = build_lf(sys).to_dmatrix();
    // Gershgorin: the spectrum of L_f lies in [0, 2·max diag].
    let radius = (0..n).map(|i| lf[(i, i)]).fold(1.0, f64::max) * 2.0;
    let scaled = lf / radius;
    let rank = krylov_rank(&scaled, &DVector::from_iterator(n, sys.delta().into_iter().map(|d| d as f64)));
    Ok(ControllabilityVerdict {
        controllable: rank == n,
        method: Method::Kalman,
        witnesses: Vec::new(),
        zero_modes: 0,
        repeated_spectrum: false,
        rank: Some(rank),
        rank_deficiency: Some(n - rank),
    })
}

/// Dimension of `span{b, Ab, A²b, …}` for `‖A‖ <= 1`.
fn krylov_rank(a: &DMatrix<f64>, b: &DVector<f64>) -> usize {
    let n = b.len();
    let norm = b.norm();
    if norm == 0.0 {
        return 0;
    }
    let mut basis: Vec<DVector<f64>> = vec![b / norm];
    while basis.len() < n {
        let mut w = a * basis.last().expect("non-empty basis");
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let h = w.norm();
        if h <= KALMAN_RANK_THRESHOLD {
            break;
        }
        basis.push(w / h);
    }
    basis.len()
}

/// Leader symmetry: some non-identity automorphism of the follower graph
/// keeps `δ` invariant, equivalently commutes with `L_f`.
pub fn is_leader_symmetric(sys: &LeaderFollowerSystem) -> SymmetryVerdict {
    let colours: Vec<u32> = sys.leader_adjacency.iter().map(|&d| u32::from(d)).collect();
    let mut witness = None;
    for_each_automorphism(&sys.follower_graph, &colours, |p| {
        if p.is_identity() {
            ControlFlow::Continue(())
        } else {
            witness = Some(p);
            ControlFlow::Break(())
        }
    });
    SymmetryVerdict {
        symmetric: witness.is_some(),
        witness: witness.map(|p| {
            AutomorphismCertificate::certify(&sys.follower_graph, p).expect("sizes match")
        }),
    }
}

/// Outcome of the subgraphs-of-symmetry uncontrollability test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Lemma4Outcome {
    /// The follower graph has no non-identity automorphism.
    NotApplicable,
    /// `predicts_uncontrollable` is true when some automorphism with a
    /// 2-cycle keeps `δ` invariant and moves a leader-adjacent follower.
    Checked {
        predicts_uncontrollable: bool,
        /// The witnessing automorphism in cycle notation (labels).
        automorphism: Option<String>,
        /// 2-cycles `(i, π(i))` of the witness whose vertices are both
        /// adjacent to the leader.
        leader_pairs: Vec<(usize, usize)>,
        explanation: String,
    },
}

impl Lemma4Outcome {
    pub fn predicts_uncontrollable(&self) -> bool {
        matches!(
            self,
            Lemma4Outcome::Checked {
                predicts_uncontrollable: true,
                ..
            }
        )
    }
}

fn lemma4_witness(sys: &LeaderFollowerSystem, p: &Permutation) -> bool {
    let d = cycle_decomposition(p);
    d.two_cycles().next().is_some()
        && (0..p.len()).all(|i| sys.leader_adjacency[i] == sys.leader_adjacency[p.apply(i)])
        && (0..p.len()).any(|i| p.apply(i) != i && sys.leader_adjacency[i])
}

fn powers_with_two_cycles(p: &Permutation) -> Vec<Permutation> {
    let d = cycle_decomposition(p);
    let order = d.cycles().iter().map(Vec::len).fold(1usize, |a, b| {
        let (mut x, mut y) = (a, b);
        while y != 0 {
            (x, y) = (y, x % y);
        }
        a / x * b
    });
    let mut out = vec![p.clone()];
    if order % 2 == 0 && order > 2 {
        let mut power = Permutation::identity(p.len());
        for _ in 0..order / 2 {
            power = p.compose(&power);
        }
        out.push(power);
    }
    out
}

/// Checks whether the leader is attached symmetrically to corresponding
/// vertices of two subgraphs of symmetry.
pub fn lemma4_check(sys: &LeaderFollowerSystem) -> Lemma4Outcome {
    let g = &sys.follower_graph;
    let colours: Vec<u32> = sys.leader_adjacency.iter().map(|&d| u32::from(d)).collect();

    let mut any_nontrivial = crate::automorphism::is_symmetric_graph(g).symmetric;
    let mut found: Option<Permutation> = None;
    let mut visited = 0usize;
    for_each_automorphism(g, &colours, |p| {
        visited += 1;
        if !p.is_identity() {
            any_nontrivial = true;
            if let Some(w) = powers_with_two_cycles(&p).into_iter().find(|q| lemma4_witness(sys, q)) {
                found = Some(w);
                return ControlFlow::Break(());
            }
        }
        if visited >= GROUP_ENUMERATION_CAP {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });

    if !any_nontrivial {
        return Lemma4Outcome::NotApplicable;
    }
    match found {
        Some(p) => {
            let leader_pairs: Vec<(usize, usize)> = cycle_decomposition(&p)
                .two_cycles()
                .filter(|&(i, j)| sys.leader_adjacency[i] && sys.leader_adjacency[j])
                .collect();
            let names: Vec<String> = leader_pairs
                .iter()
                .map(|&(i, j)| format!("{{{}, {}}}", g.label(i), g.label(j)))
                .collect();
            let notation = p.cycle_notation_with(|i| g.label(i));
            let explanation = if names.is_empty() {
                format!("automorphism {notation} keeps the leader attachment invariant and moves a leader-adjacent follower")
            } else {
                format!(
                    "leader is adjacent to both vertices of corresponding pair(s) {} under {notation}",
                    names.join(", ")
                )
            };
            Lemma4Outcome::Checked {
                predicts_uncontrollable: true,
                automorphism: Some(notation),
                leader_pairs,
                explanation,
            }
        }
        None => Lemma4Outcome::Checked {
            predicts_uncontrollable: false,
            automorphism: None,
            leader_pairs: Vec::new(),
            explanation: "no automorphism with a 2-cycle keeps the leader attachment invariant".into(),
        },
    }
}

/// States sampled on a uniform time grid, row `k` at `t = k·dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has the initial state")
    }

    /// CSV with header `t,x1,…,xn`, one row per time step.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            out.push_str(&t.to_string());
            for v in x {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn rk4<F>(f: F, x0: &[f64], dt: f64, steps: usize) -> Trajectory
where
    F: Fn(usize, &[f64]) -> Vec<f64>,
{
    let axpy = |x: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(a, b)| a + h * b).collect()
    };
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    times.push(0.0);
    states.push(x.clone());
    for step in 0..steps {
        let k1 = f(step, &x);
        let k2 = f(step, &axpy(&x, &k1, dt / 2.0));
        let k3 = f(step, &axpy(&x, &k2, dt / 2.0));
        let k4 = f(step, &axpy(&x, &k3, dt));
        for i in 0..x.len() {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        times.push((step + 1) as f64 * dt);
        states.push(x.clone());
    }
    Trajectory { times, states }
}

fn check_step(dt: f64, max_diag: i64) -> Result<()> {
    let bound = if max_diag > 0 {
        1.0 / (2.0 * max_diag as f64)
    } else {
        f64::INFINITY
    };
    if !(dt > 0.0 && dt < bound) {
        return Err(Error::UnstableStep { dt, bound });
    }
    Ok(())
}

/// Integrates `ẋ_f = −L_f x_f + δ u(t)` with fixed-step RK4. `u` holds either
/// one value (constant input) or one value per step, held over that step.
pub fn simulate(sys: &LeaderFollowerSystem, u: &[f64], x0: &[f64], dt: f64, steps: usize) -> Result<Trajectory> {
    let n = sys.follower_count();
    if x0.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: x0.len(),
        });
    }
    if u.len() != 1 && u.len() != steps {
        return Err(Error::ControlLength {
            expected: steps,
            actual: u.len(),
        });
    }
    let lf = build_lf(sys);
    let max_diag = (0..n).map(|i| lf.get(i, i)).max().unwrap_or(0);
    check_step(dt, max_diag)?;
    let delta: Vec<f64> = sys.delta().into_iter().map(|d| d as f64).collect();
    Ok(rk4(
        |step, x| {
            let ut = if u.len() == 1 { u[0] } else { u[step] };
            (0..n)
                .map(|i| {
                    let lx: f64 = lf.row(i).iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
                    -lx + delta[i] * ut
                })
                .collect()
        },
        x0,
        dt,
        steps,
    ))
}

/// Leaderless agreement dynamics `ẋ = −L x`.
pub fn simulate_agreement(g: &Graph, x0: &[f64], dt: f64, steps: usize) -> Result<Trajectory> {
    let n = g.vertex_count();
    if x0.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: x0.len(),
        });
    }
    let l = g.laplacian();
    let max_diag = (0..n).map(|i| l.get(i, i)).max().unwrap_or(0);
    check_step(dt, max_diag)?;
    Ok(rk4(
        |_, x| {
            (0..n)
                .map(|i| -l.row(i).iter().zip(x).map(|(a, b)| *a as f64 * b).sum::<f64>())
                .collect()
        },
        x0,
        dt,
        steps,
    ))
}

//! Plain-text and JSON reports. The command-line tool prints exactly these,
//! so a report built here matches what the tool shows for the same input.

use std::fmt::Write as _;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::automorphism::{
    for_each_automorphism, is_symmetric_graph, max_minus_one_multiplicity, subgraphs_of_symmetry, Multiplicity,
    GROUP_ENUMERATION_CAP,
};
use crate::controllability::{
    build_lf, is_controllable_kalman, is_controllable_spectral, is_leader_symmetric, lemma4_check,
    ControllabilityVerdict, LeaderFollowerSystem, Lemma4Outcome,
};
use crate::graph::Graph;
use crate::permutation::{count_even_cycles, cycle_decomposition, minus_one_eigenvector, permutation_matrix, Permutation};
use crate::spectral::{self, FriendlinessReport, Verdict};
use crate::Result;

fn fmt_values(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub friendliness: FriendlinessReport,
    pub symmetric: bool,
    /// A non-identity automorphism in cycle notation over vertex labels.
    pub automorphism: Option<String>,
}

pub fn analyze(g: &Graph, name: &str, tol: f64) -> AnalysisReport {
    let friendliness = spectral::classify_friendliness(g, tol);
    let sym = is_symmetric_graph(g);
    AnalysisReport {
        name: name.to_owned(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        friendliness,
        symmetric: sym.symmetric,
        automorphism: sym.witness.map(|w| w.permutation.cycle_notation_with(|i| g.label(i))),
    }
}

impl AnalysisReport {
    /// One line, e.g. `Friendly, symmetric: no`.
    pub fn summary(&self) -> String {
        let f = &self.friendliness;
        let mut parts = vec![f.verdict.to_string()];
        let k = f.orthogonal_witnesses.len();
        if f.verdict != Verdict::Friendly {
            parts.push(format!("{k} witness{}", if k == 1 { "" } else { "es" }));
        }
        parts.push(format!("symmetric: {}", yes_no(self.symmetric)));
        if let Some(a) = &self.automorphism {
            parts.push(format!("automorphism {a}"));
        }
        parts.join(", ")
    }

    pub fn to_text(&self) -> String {
        let f = &self.friendliness;
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.summary());
        let _ = writeln!(s, "graph: {} ({} vertices, {} edges)", self.name, self.vertices, self.edges);
        let _ = writeln!(s, "eigenvalues: {}", fmt_values(&f.eigenvalues));
        let _ = writeln!(s, "min eigengap: {:.6e} (tolerance {:e})", f.min_eigengap, f.tolerance_used);
        if f.orthogonal_witnesses.is_empty() {
            let _ = writeln!(s, "orthogonality witnesses: none");
        } else {
            let _ = writeln!(s, "orthogonality witnesses:");
            for w in &f.orthogonal_witnesses {
                let _ = writeln!(
                    s,
                    "  eigenvalue #{} = {:.6}, |v.1| = {:.3e}{}",
                    w.index + 1,
                    w.eigenvalue,
                    w.ones_product,
                    if w.grouped { " (from a repeated eigenvalue)" } else { "" }
                );
            }
        }
        let _ = writeln!(s, "symmetric: {}", yes_no(self.symmetric));
        if let Some(a) = &self.automorphism {
            let _ = writeln!(s, "automorphism: {a}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GroupOrder {
    Exact(usize),
    AtLeast(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgraphSummary {
    pub blocks: Vec<Vec<String>>,
    pub block_pairs: Vec<(usize, usize)>,
    pub correspondence: Vec<(String, String)>,
    pub anchor_set: Vec<String>,
    pub other_moved: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomorphismReport {
    pub name: String,
    pub order: GroupOrder,
    /// The first automorphisms found, identity excluded, in cycle notation.
    pub listed: Vec<String>,
    pub two_cycle_witness: Option<String>,
    pub subgraphs: Option<SubgraphSummary>,
    pub max_minus_one_multiplicity: Multiplicity,
}

pub fn automorphism_report(g: &Graph, name: &str, list_limit: usize) -> AutomorphismReport {
    let names = |vs: &[usize]| vs.iter().map(|&v| g.label(v)).collect::<Vec<_>>();
    let mut count = 0usize;
    let mut listed = Vec::new();
    for_each_automorphism(g, &vec![0; g.vertex_count()], |p| {
        count += 1;
        if !p.is_identity() && listed.len() < list_limit {
            listed.push(p.cycle_notation_with(|i| g.label(i)));
        }
        if count >= GROUP_ENUMERATION_CAP {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    listed.sort();
    let order = if count >= GROUP_ENUMERATION_CAP {
        GroupOrder::AtLeast(count)
    } else {
        GroupOrder::Exact(count)
    };

    let witness = is_symmetric_graph(g).witness.filter(|w| w.has_two_cycle());
    let subgraphs = witness.as_ref().map(|w| {
        let s = subgraphs_of_symmetry(g, w).expect("witness is verified");
        SubgraphSummary {
            blocks: s.blocks.iter().map(|b| names(b)).collect(),
            block_pairs: s.block_pairs.clone(),
            correspondence: s.correspondence.iter().map(|&(a, b)| (g.label(a), g.label(b))).collect(),
            anchor_set: names(&s.anchor_set),
            other_moved: names(&s.other_moved),
        }
    });
    AutomorphismReport {
        name: name.to_owned(),
        order,
        listed,
        two_cycle_witness: witness.map(|w| w.permutation.cycle_notation_with(|i| g.label(i))),
        subgraphs,
        max_minus_one_multiplicity: max_minus_one_multiplicity(g),
    }
}

impl AutomorphismReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = match self.order {
            GroupOrder::Exact(k) => writeln!(s, "{}: automorphism group order {k}", self.name),
            GroupOrder::AtLeast(k) => writeln!(s, "{}: automorphism group order at least {k}", self.name),
        };
        for a in &self.listed {
            let _ = writeln!(s, "  {a}");
        }
        let _ = writeln!(
            s,
            "automorphism with a 2-cycle: {}",
            self.two_cycle_witness.as_deref().unwrap_or("none")
        );
        if let Some(sub) = &self.subgraphs {
            let blocks: Vec<String> = sub.blocks.iter().map(|b| format!("{{{}}}", b.join(", "))).collect();
            let _ = writeln!(s, "subgraphs of symmetry: {}", blocks.join(" "));
            let _ = writeln!(s, "anchor set: {{{}}}", sub.anchor_set.join(", "));
            if !sub.other_moved.is_empty() {
                let _ = writeln!(s, "moved by longer cycles: {{{}}}", sub.other_moved.join(", "));
            }
        }
        let _ = match &self.max_minus_one_multiplicity {
            Multiplicity::Computed(k) => writeln!(s, "max multiplicity of eigenvalue -1 over the group: {k}"),
            Multiplicity::NotComputed { reason } => writeln!(s, "max multiplicity of eigenvalue -1: not computed ({reason})"),
        };
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MethodChoice {
    Spectral,
    Kalman,
    Both,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControllabilityReport {
    pub lf: Vec<Vec<i64>>,
    pub leader_adjacent: Vec<String>,
    pub tolerance: f64,
    pub spectral: Option<ControllabilityVerdict>,
    pub kalman: Option<ControllabilityVerdict>,
    pub leader_symmetric: bool,
    pub leader_automorphism: Option<String>,
    pub lemma4: Lemma4Outcome,
}

pub fn controllability_report(
    sys: &LeaderFollowerSystem,
    tol: f64,
    method: MethodChoice,
) -> Result<ControllabilityReport> {
    let g = sys.follower_graph();
    let spectral = matches!(method, MethodChoice::Spectral | MethodChoice::Both)
        .then(|| is_controllable_spectral(sys, tol));
    let kalman = match method {
        MethodChoice::Kalman | MethodChoice::Both => Some(is_controllable_kalman(sys)?),
        MethodChoice::Spectral => None,
    };
    let sym = is_leader_symmetric(sys);
    let mut leader_adjacent: Vec<String> = (0..sys.follower_count())
        .filter(|&i| sys.leader_adjacency()[i])
        .map(|i| g.label(i))
        .collect();
    leader_adjacent.sort();
    Ok(ControllabilityReport {
        lf: build_lf(sys).rows(),
        leader_adjacent,
        tolerance: tol,
        spectral,
        kalman,
        leader_symmetric: sym.symmetric,
        leader_automorphism: sym.witness.map(|w| w.permutation.cycle_notation_with(|i| g.label(i))),
        lemma4: lemma4_check(sys),
    })
}

impl ControllabilityReport {
    /// `Some(false)` when both methods ran and disagree.
    pub fn methods_agree(&self) -> Option<bool> {
        match (&self.spectral, &self.kalman) {
            (Some(s), Some(k)) => Some(s.controllable == k.controllable),
            _ => None,
        }
    }

    /// The common verdict, or `None` on disagreement.
    pub fn controllable(&self) -> Option<bool> {
        match (&self.spectral, &self.kalman) {
            (Some(s), Some(k)) => (s.controllable == k.controllable).then_some(s.controllable),
            (Some(v), None) | (None, Some(v)) => Some(v.controllable),
            (None, None) => None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}",
            match self.controllable() {
                Some(true) => "controllable",
                Some(false) => "uncontrollable",
                None => "methods disagree",
            }
        );
        let _ = writeln!(s, "leader adjacent to: {}", self.leader_adjacent.join(" "));
        let _ = writeln!(s, "L_f:");
        for row in &self.lf {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
            let _ = writeln!(s, "  [{}]", cells.join(""));
        }
        if let Some(v) = &self.spectral {
            let _ = write!(s, "spectral (tol {:e}): {}", self.tolerance, verdict_word(v));
            let mut why = Vec::new();
            if v.repeated_spectrum {
                why.push("repeated eigenvalues".to_owned());
            }
            if !v.witnesses.is_empty() {
                let idx: Vec<String> = v.witnesses.iter().map(|w| format!("#{}", w.index + 1)).collect();
                why.push(format!("eigenvectors orthogonal to 1: {}", idx.join(" ")));
            }
            if v.zero_modes > 0 {
                why.push(format!("{} zero mode(s) not reached by the leader", v.zero_modes));
            }
            if !why.is_empty() {
                let _ = write!(s, " ({})", why.join("; "));
            }
            s.push('\n');
        }
        if let Some(v) = &self.kalman {
            let n = self.lf.len();
            let _ = writeln!(s, "kalman: {} (rank {} of {n})", verdict_word(v), v.rank.unwrap_or(0));
        }
        let _ = writeln!(s, "leader symmetric: {}", yes_no(self.leader_symmetric));
        if let Some(a) = &self.leader_automorphism {
            let _ = writeln!(s, "leader-invariant automorphism: {a}");
        }
        match &self.lemma4 {
            Lemma4Outcome::NotApplicable => {
                let _ = writeln!(s, "symmetry test: not applicable (follower graph is asymmetric)");
            }
            Lemma4Outcome::Checked { explanation, .. } => {
                let _ = writeln!(s, "symmetry test: {explanation}");
            }
        }
        s
    }
}

fn verdict_word(v: &ControllabilityVerdict) -> &'static str {
    if v.controllable {
        "controllable"
    } else {
        "uncontrollable"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PermutationReport {
    pub images: String,
    pub cycle_notation: String,
    pub cycles: Vec<Vec<usize>>,
    pub even_cycles: usize,
    pub fixed_points: Vec<usize>,
    pub matrix: Vec<Vec<i64>>,
    /// Multiplicity of eigenvalue `-1` of the permutation matrix, read off
    /// its numerically computed eigenvalues.
    pub minus_one_multiplicity: usize,
    /// One integer eigenvector per even cycle.
    pub minus_one_eigenvectors: Vec<Vec<i64>>,
}

pub fn permutation_report(p: &Permutation) -> Result<PermutationReport> {
    let d = cycle_decomposition(p);
    let ev = spectral::complex_eigenvalues(&permutation_matrix(p))?;
    let minus_one_multiplicity =
        spectral::eigenvalue_multiplicity(&ev, nalgebra::Complex::new(-1.0, 0.0), 1e-6);
    let minus_one_eigenvectors = d
        .even_cycles()
        .map(|c| minus_one_eigenvector(p, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(PermutationReport {
        images: p.to_one_based_string(),
        cycle_notation: p.cycle_notation(),
        cycles: d.cycles().iter().map(|c| c.iter().map(|v| v + 1).collect()).collect(),
        even_cycles: count_even_cycles(&d),
        fixed_points: d.fixed_points().map(|v| v + 1).collect(),
        matrix: permutation_matrix(p).rows(),
        minus_one_multiplicity,
        minus_one_eigenvectors,
    })
}

impl PermutationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "permutation: {}", self.images);
        let _ = writeln!(s, "cycles: {}", self.cycle_notation);
        let fixed: Vec<String> = self.fixed_points.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "fixed points: {}", if fixed.is_empty() { "none".into() } else { fixed.join(" ") });
        let _ = writeln!(s, "even cycles: {}", self.even_cycles);
        let _ = writeln!(s, "multiplicity of eigenvalue -1: {}", self.minus_one_multiplicity);
        let _ = writeln!(s, "matrix:");
        for row in &self.matrix {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "  [{}]", cells.join(" "));
        }
        for v in &self.minus_one_eigenvectors {
            let cells: Vec<String> = v.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "eigenvector for -1: [{}]", cells.join(" "));
        }
        s
    }
}

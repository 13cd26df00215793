//! Erdős–Rényi sweeps: how often `G(n, p)` has a repeated adjacency
//! eigenvalue, and how often it has an eigenvector orthogonal to `1ₙ`.
//!
//! Every trial draws its graph from its own ChaCha8 stream seeded by
//! `(master_seed, n, p, trial)`, so results do not depend on how trials are
//! scheduled across threads.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{erdos_renyi_with, Graph};
use crate::rng;
use crate::spectral::{self, DEFAULT_TOLERANCE};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub p_values: Vec<f64>,
    pub trials: usize,
    pub tolerance: f64,
    pub master_seed: u64,
}

/// `0, 0.05, …, 1`.
pub fn p_grid_005() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

impl Default for ExperimentConfig {
    /// 500 trials, `n ∈ {2, 5, 10, …, 60}`, `p` in steps of 0.05.
    fn default() -> Self {
        let mut n_values = vec![2];
        n_values.extend((5..=60).step_by(5));
        ExperimentConfig {
            n_values,
            p_values: p_grid_005(),
            trials: 500,
            tolerance: DEFAULT_TOLERANCE,
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// 5000 trials over every `n` in `2..=100`.
    pub fn full_scale() -> Self {
        ExperimentConfig {
            n_values: (2..=100).collect(),
            trials: 5000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.p_values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(&p) = self.p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability(p));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance {} must be non-negative", self.tolerance)));
        }
        Ok(())
    }
}

/// The graph drawn for one trial.
pub fn sample_trial(cfg: &ExperimentConfig, n: usize, p: f64, trial: usize) -> Graph {
    let mut r = rng::seeded(rng::trial_seed(cfg.master_seed, n, p, trial));
    erdos_renyi_with(n, p, &mut r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Experiment {
    RepeatedEigenvalues,
    OrthogonalEigenvector,
}

impl Experiment {
    pub fn slug(self) -> &'static str {
        match self {
            Experiment::RepeatedEigenvalues => "repeated",
            Experiment::OrthogonalEigenvector => "orthogonal",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Experiment::RepeatedEigenvalues => "P(repeated eigenvalues)",
            Experiment::OrthogonalEigenvector => "P(eigenvector orthogonal to 1)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub n: usize,
    pub p: f64,
    pub positives: usize,
    pub trials: usize,
}

impl Cell {
    pub fn probability(&self) -> f64 {
        self.positives as f64 / self.trials as f64
    }
}

/// Cells in n-major, p-minor order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityGrid {
    pub experiment: Experiment,
    pub n_values: Vec<usize>,
    pub p_values: Vec<f64>,
    pub cells: Vec<Cell>,
}

impl ProbabilityGrid {
    pub fn cell(&self, n: usize, p: f64) -> Option<&Cell> {
        self.cells.iter().find(|c| c.n == n && c.p == p)
    }
}

fn positives(g: &Graph, tol: f64) -> (bool, bool) {
    let s = spectral::eigendecompose_int(&g.adjacency_matrix()).expect("adjacency matrices are symmetric");
    let repeated = !spectral::has_simple_spectrum(&s, tol).simple;
    let orthogonal = !spectral::ones_orthogonal_eigenvectors(&s, tol).is_empty();
    (repeated, orthogonal)
}

fn count_cells(cfg: &ExperimentConfig) -> Result<Vec<(Cell, Cell)>> {
    cfg.validate()?;
    let coords: Vec<(usize, f64)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| cfg.p_values.iter().map(move |&p| (n, p)))
        .collect();
    Ok(coords
        .into_par_iter()
        .map(|(n, p)| {
            let (rep, orth) = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let (r, o) = positives(&sample_trial(cfg, n, p, t), cfg.tolerance);
                    (usize::from(r), usize::from(o))
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            let cell = |positives| Cell {
                n,
                p,
                positives,
                trials: cfg.trials,
            };
            (cell(rep), cell(orth))
        })
        .collect())
}

fn grid(cfg: &ExperimentConfig, experiment: Experiment, cells: Vec<Cell>) -> ProbabilityGrid {
    ProbabilityGrid {
        experiment,
        n_values: cfg.n_values.clone(),
        p_values: cfg.p_values.clone(),
        cells,
    }
}

/// Both grids from one pass over the sampled graphs.
pub fn run_experiments(cfg: &ExperimentConfig) -> Result<(ProbabilityGrid, ProbabilityGrid)> {
    let (rep, orth): (Vec<Cell>, Vec<Cell>) = count_cells(cfg)?.into_iter().unzip();
    Ok((
        grid(cfg, Experiment::RepeatedEigenvalues, rep),
        grid(cfg, Experiment::OrthogonalEigenvector, orth),
    ))
}

/// A trial is positive when some eigenvalue gap is at most the tolerance.
pub fn run_repeated_eigenvalue_experiment(cfg: &ExperimentConfig) -> Result<ProbabilityGrid> {
    Ok(run_experiments(cfg)?.0)
}

/// A trial is positive when some unit eigenvector (or, inside a cluster of
/// near-equal eigenvalues, some vector of the eigenspace) has `|vᵀ1| <= tol`.
pub fn run_orthogonal_eigenvector_experiment(cfg: &ExperimentConfig) -> Result<ProbabilityGrid> {
    Ok(run_experiments(cfg)?.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFormat {
    Csv,
    Svg,
}

pub fn emit_grid(grid: &ProbabilityGrid, format: GridFormat) -> Result<String> {
    if grid.cells.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(match format {
        GridFormat::Csv => grid_csv(grid),
        GridFormat::Svg => grid_svg(grid),
    })
}

fn grid_csv(grid: &ProbabilityGrid) -> String {
    let mut out = String::from("n,p,probability,trials\n");
    for c in &grid.cells {
        out.push_str(&format!("{},{},{},{}\n", c.n, c.p, c.probability(), c.trials));
    }
    out
}

/// White at 0 to dark blue at 1.
fn colour(x: f64) -> String {
    let x = x.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * x).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

fn grid_svg(grid: &ProbabilityGrid) -> String {
    const CELL: f64 = 14.0;
    const LEFT: f64 = 60.0;
    const TOP: f64 = 40.0;
    let cols = grid.p_values.len() as f64;
    let rows = grid.n_values.len() as f64;
    let plot_w = cols * CELL;
    let plot_h = rows * CELL;
    let width = LEFT + plot_w + 110.0;
    let height = TOP + plot_h + 60.0;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"10\">\n"
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        LEFT + plot_w / 2.0,
        grid.experiment.title()
    ));
    s.push_str("<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">");
    s.push_str(&format!(
        "<stop offset=\"0\" stop-color=\"{}\"/><stop offset=\"1\" stop-color=\"{}\"/>",
        colour(0.0),
        colour(1.0)
    ));
    s.push_str("</linearGradient></defs>\n");

    s.push_str("<g class=\"cells\">\n");
    for c in &grid.cells {
        let col = grid.p_values.iter().position(|&p| p == c.p).unwrap_or(0) as f64;
        let row = grid.n_values.iter().position(|&n| n == c.n).unwrap_or(0) as f64;
        s.push_str(&format!(
            "<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{}\"><title>n={}, p={}, probability={}, trials={}</title></rect>\n",
            LEFT + col * CELL,
            TOP + row * CELL,
            colour(c.probability()),
            c.n,
            c.p,
            c.probability(),
            c.trials
        ));
    }
    s.push_str("</g>\n");

    // Tick labels: at most ~10 per axis.
    let every = |len: usize| (len / 10).max(1);
    for (i, p) in grid.p_values.iter().enumerate().step_by(every(grid.p_values.len())) {
        s.push_str(&format!(
            "<text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{p}</text>\n",
            LEFT + (i as f64 + 0.5) * CELL,
            TOP + plot_h + 14.0
        ));
    }
    for (i, n) in grid.n_values.iter().enumerate().step_by(every(grid.n_values.len())) {
        s.push_str(&format!(
            "<text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{n}</text>\n",
            LEFT - 4.0,
            TOP + (i as f64 + 0.5) * CELL + 3.0
        ));
    }
    s.push_str(&format!(
        "<text class=\"axis\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">p</text>\n",
        LEFT + plot_w / 2.0,
        TOP + plot_h + 32.0
    ));
    s.push_str(&format!(
        "<text class=\"axis\" x=\"18\" y=\"{}\" text-anchor=\"middle\">n</text>\n",
        TOP + plot_h / 2.0
    ));

    let lx = LEFT + plot_w + 30.0;
    s.push_str(&format!(
        "<path class=\"legend\" d=\"M{lx} {TOP} h12 v{plot_h} h-12 Z\" fill=\"url(#scale)\" stroke=\"#888\"/>\n"
    ));
    s.push_str(&format!("<text x=\"{}\" y=\"{}\">1</text>\n", lx + 16.0, TOP + 8.0));
    s.push_str(&format!("<text x=\"{}\" y=\"{}\">0</text>\n", lx + 16.0, TOP + plot_h));
    s.push_str("</svg>\n");
    s
}

/// Run metadata written next to every grid.
pub fn metadata(cfg: &ExperimentConfig) -> serde_json::Value {
    json!({
        "config": cfg,
        "master_seed": cfg.master_seed,
        "rng": "ChaCha8, one stream per trial seeded by SplitMix64 over (master_seed, n, p bits, trial)",
        "graph_model": "G(n, p): each pair joined independently with probability p",
        "tolerance": {
            "value": cfg.tolerance,
            "semantics": "absolute",
            "repeated": "positive when some gap between consecutive sorted adjacency eigenvalues is <= tolerance",
            "orthogonal": "positive when some unit eigenvector v has |v.1| <= tolerance; within a cluster of eigenvalues closer than tolerance the cluster's eigenspace is searched, so repeated-eigenvalue graphs count when that eigenspace contains a vector orthogonal to 1",
        },
        "p_grid_resolution": "0.05 unless overridden",
        "crate_version": env!("CARGO_PKG_VERSION"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, p: f64, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            n_values: vec![n],
            p_values: vec![p],
            trials,
            tolerance: DEFAULT_TOLERANCE,
            master_seed: 7,
        }
    }

    #[test]
    fn complete_and_empty_graphs_always_repeat() {
        let g = run_repeated_eigenvalue_experiment(&cfg(5, 1.0, 20)).unwrap();
        assert_eq!(g.cells[0].probability(), 1.0);
        let g = run_repeated_eigenvalue_experiment(&cfg(2, 0.0, 20)).unwrap();
        assert_eq!(g.cells[0].probability(), 1.0);
        let g = run_orthogonal_eigenvector_experiment(&cfg(2, 1.0, 20)).unwrap();
        assert_eq!(g.cells[0].probability(), 1.0);
    }

    #[test]
    fn moderate_graphs_rarely_repeat() {
        let (rep, orth) = run_experiments(&cfg(20, 0.5, 500)).unwrap();
        assert!(rep.cells[0].probability() <= 0.01);
        assert!(orth.cells[0].probability() <= 0.01);
    }

    #[test]
    fn sampled_paths_are_positive() {
        let c = cfg(3, 0.5, 200);
        let mut seen = 0;
        for t in 0..c.trials {
            // Two edges on three vertices always form a path.
            let g = sample_trial(&c, 3, 0.5, t);
            if g.edge_count() == 2 {
                seen += 1;
                assert!(positives(&g, c.tolerance).1);
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn orthogonal_witnesses_reverify() {
        let c = cfg(8, 0.4, 300);
        for t in 0..c.trials {
            let g = sample_trial(&c, 8, 0.4, t);
            let a = g.adjacency_matrix().to_dmatrix();
            let s = spectral::eigendecompose(&a).unwrap();
            if !spectral::has_simple_spectrum(&s, c.tolerance).simple {
                continue;
            }
            for w in spectral::ones_orthogonal_eigenvectors(&s, c.tolerance) {
                let v = nalgebra::DVector::from_vec(w.vector.clone());
                assert!((&a * &v - &v * w.eigenvalue).norm() <= 1e-8);
                assert!(v.sum().abs() <= c.tolerance);
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let c = ExperimentConfig {
            n_values: vec![4, 9],
            p_values: vec![0.3, 0.6],
            trials: 50,
            tolerance: 1e-4,
            master_seed: 11,
        };
        let a = run_experiments(&c).unwrap();
        let b = run_experiments(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(emit_grid(&a.0, GridFormat::Csv).unwrap(), emit_grid(&b.0, GridFormat::Csv).unwrap());
    }

    #[test]
    fn csv_format() {
        let g = ProbabilityGrid {
            experiment: Experiment::RepeatedEigenvalues,
            n_values: vec![5],
            p_values: vec![1.0],
            cells: vec![Cell {
                n: 5,
                p: 1.0,
                positives: 100,
                trials: 100,
            }],
        };
        assert_eq!(emit_grid(&g, GridFormat::Csv).unwrap(), "n,p,probability,trials\n5,1,1,100\n");

        let c = ExperimentConfig {
            n_values: vec![3, 4],
            p_values: vec![0.25, 0.75],
            trials: 4,
            tolerance: 1e-4,
            master_seed: 1,
        };
        let csv = emit_grid(&run_repeated_eigenvalue_experiment(&c).unwrap(), GridFormat::Csv).unwrap();
        let keys: Vec<String> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
            .collect();
        assert_eq!(keys, ["3,0.25", "3,0.75", "4,0.25", "4,0.75"]);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let g = ProbabilityGrid {
            experiment: Experiment::RepeatedEigenvalues,
            n_values: vec![],
            p_values: vec![],
            cells: vec![],
        };
        assert_eq!(emit_grid(&g, GridFormat::Svg), Err(Error::EmptyGrid));
    }

    #[test]
    fn p_grid_prints_cleanly() {
        let ps: Vec<String> = p_grid_005().iter().map(|p| p.to_string()).collect();
        assert_eq!(ps[3], "0.15");
        assert_eq!(ps[20], "1");
        assert_eq!(ps.len(), 21);
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(cfg(5, 1.5, 1).validate(), Err(Error::InvalidProbability(_))));
        assert!(matches!(cfg(5, 0.5, 0).validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn colour_scale_endpoints() {
        assert_eq!(colour(0.0), "#ffffff");
        assert_eq!(colour(1.0), "#08306b");
    }
}

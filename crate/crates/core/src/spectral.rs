//! Eigendecomposition and the friendliness test.
//!
//! A graph is *friendly* when its adjacency matrix has a simple spectrum and
//! none of its unit eigenvectors is orthogonal to the all-ones vector `1ₙ`.
//! Both tests use an absolute tolerance, `1e-4` by default.
//!
//! Eigenvectors are normalised to unit length and their sign is fixed so that
//! the entry of largest magnitude is positive (lowest index wins a tie), which
//! makes decompositions reproducible.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, IntMatrix};

/// Tolerance used for eigen-gaps and orthogonality unless a caller overrides it.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

/// Input matrices must be symmetric to within this absolute bound.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

const SIGN_TIE: f64 = 1e-10;

/// Eigenvalues sorted ascending with matching unit eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    residual: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    /// `max_i ‖A vᵢ − λᵢ vᵢ‖₂` measured against the input matrix.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `Uᵀ 1ₙ`, one entry per eigenvector.
    pub fn ones_products(&self) -> Vec<f64> {
        self.eigenvectors.column_iter().map(|c| c.sum()).collect()
    }

    /// Largest deviation of `UᵀU` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.eigenvectors.transpose() * &self.eigenvectors;
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let n = self.dim();
        let scaled = DMatrix::from_fn(n, n, |i, j| self.eigenvectors[(i, j)] * self.eigenvalues[j]);
        scaled * self.eigenvectors.transpose()
    }
}

/// Symmetric eigendecomposition (QR iteration on the tridiagonal form).
pub fn eigendecompose(m: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: m.ncols(),
        });
    }
    let asym = (m - m.transpose()).abs().max();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric(asym));
    }
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
            residual: 0.0,
        });
    }

    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let v = v / v.norm();
        let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let lead = v
            .iter()
            .position(|x| x.abs() >= peak - SIGN_TIE)
            .expect("non-empty column");
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        eigenvectors.set_column(col, &(v * sign));
    }

    let mut residual = 0.0f64;
    for (j, &lambda) in eigenvalues.iter().enumerate() {
        let v = eigenvectors.column(j);
        residual = residual.max((m * v - v * lambda).norm());
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        residual,
    })
}

pub fn eigendecompose_int(m: &IntMatrix) -> Result<SpectralDecomposition> {
    eigendecompose(&m.to_dmatrix())
}

/// Outcome of the simple-spectrum test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumGap {
    pub simple: bool,
    /// Smallest gap between consecutive sorted eigenvalues; infinite when
    /// there are fewer than two.
    pub min_gap: f64,
}

pub fn has_simple_spectrum(s: &SpectralDecomposition, tol: f64) -> SpectrumGap {
    let min_gap = s
        .eigenvalues
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    SpectrumGap {
        simple: min_gap > tol,
        min_gap,
    }
}

/// An eigenvector (or eigenspace direction) orthogonal to `1ₙ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalWitness {
    /// Position in the ascending eigenvalue order.
    pub index: usize,
    pub eigenvalue: f64,
    /// `|vᵀ1ₙ|` for the unit witness vector.
    pub ones_product: f64,
    /// True when the witness comes from a repeated eigenvalue's eigenspace.
    pub grouped: bool,
    #[serde(skip)]
    pub vector: Vec<f64>,
}

/// Groups indices of eigenvalues whose consecutive gaps are `<= tol`.
fn eigenvalue_clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Finds eigenvectors orthogonal to `1ₙ`.
///
/// A simple eigenvalue contributes its eigenvector when `|vᵀ1ₙ| <= tol`. A
/// cluster of `k` eigenvalues within `tol` of each other is treated as one
/// eigenspace: if `1ₙ` has a projection of norm `> tol` onto it, the `k − 1`
/// directions orthogonal to that projection are witnesses, otherwise all `k`
/// are.
pub fn ones_orthogonal_eigenvectors(s: &SpectralDecomposition, tol: f64) -> Vec<OrthogonalWitness> {
    let n = s.dim();
    let products = s.ones_products();
    let mut out = Vec::new();
    for cluster in eigenvalue_clusters(&s.eigenvalues, tol) {
        if cluster.len() == 1 {
            let i = cluster.start;
            if products[i].abs() <= tol {
                out.push(OrthogonalWitness {
                    index: i,
                    eigenvalue: s.eigenvalues[i],
                    ones_product: products[i].abs(),
                    grouped: false,
                    vector: s.eigenvector(i),
                });
            }
            continue;
        }

        let coeffs: Vec<f64> = cluster.clone().map(|i| products[i]).collect();
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let basis = s.eigenvectors.columns(cluster.start, cluster.len()).into_owned();
        let rotated = if norm > tol {
            // Householder reflection taking `coeffs` onto ‖coeffs‖·e₀; the
            // remaining rotated columns are orthogonal to 1ₙ.
            let k = cluster.len();
            let mut w = nalgebra::DVector::from_vec(coeffs.clone());
            let alpha = if w[0] >= 0.0 { -norm } else { norm };
            w[0] -= alpha;
            let wn = w.norm_squared();
            let mut h = DMatrix::<f64>::identity(k, k);
            if wn > 0.0 {
                h -= (&w * w.transpose()) * (2.0 / wn);
            }
            let r = basis * h;
            r.columns(1, k - 1).into_owned()
        } else {
            basis
        };
        let skip = if norm > tol { 1 } else { 0 };
        for (offset, col) in rotated.column_iter().enumerate() {
            let v: Vec<f64> = col.iter().copied().collect();
            let index = cluster.start + offset + skip;
            out.push(OrthogonalWitness {
                index,
                eigenvalue: s.eigenvalues[index],
                ones_product: v.iter().sum::<f64>().abs(),
                grouped: true,
                vector: v,
            });
        }
        debug_assert!(out.iter().all(|w| w.vector.len() == n));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Friendly,
    UnfriendlyRepeatedEigenvalues,
    UnfriendlyOrthogonalEigenvector,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Friendly => "Friendly",
            Verdict::UnfriendlyRepeatedEigenvalues => "UnfriendlyRepeatedEigenvalues",
            Verdict::UnfriendlyOrthogonalEigenvector => "UnfriendlyOrthogonalEigenvector",
        };
        f.write_str(s)
    }
}

/// Friendliness classification of an adjacency matrix.
#[derive(Clone, Debug, Serialize)]
pub struct FriendlinessReport {
    pub verdict: Verdict,
    pub eigenvalues: Vec<f64>,
    pub min_eigengap: f64,
    pub orthogonal_witnesses: Vec<OrthogonalWitness>,
    pub tolerance_used: f64,
}

pub fn classify_spectrum(s: &SpectralDecomposition, tol: f64) -> FriendlinessReport {
    let gap = has_simple_spectrum(s, tol);
    let orthogonal_witnesses = ones_orthogonal_eigenvectors(s, tol);
    let verdict = if !gap.simple {
        Verdict::UnfriendlyRepeatedEigenvalues
    } else if !orthogonal_witnesses.is_empty() {
        Verdict::UnfriendlyOrthogonalEigenvector
    } else {
        Verdict::Friendly
    };
    FriendlinessReport {
        verdict,
        eigenvalues: s.eigenvalues.clone(),
        min_eigengap: gap.min_gap,
        orthogonal_witnesses,
        tolerance_used: tol,
    }
}

pub fn classify_friendliness(g: &Graph, tol: f64) -> FriendlinessReport {
    let s = eigendecompose_int(&g.adjacency_matrix()).expect("adjacency matrices are symmetric");
    classify_spectrum(&s, tol)
}

const SCHUR_MAX_ITERATIONS: usize = 10_000;

/// Eigenvalues of a real square matrix, sorted by real then imaginary part.
///
/// Orthogonal matrices (`MᵀM = I`, e.g. permutation matrices) are handled
/// through their symmetric part `S = (M + Mᵀ)/2`: every eigenvalue of `M` is
/// `c ± i·sqrt(1 − c²)` for an eigenvalue `c` of `S`, and interior values of
/// `c` occur in pairs. Other matrices go through a real Schur form.
pub fn complex_eigenvalues(m: &IntMatrix) -> Result<Vec<Complex<f64>>> {
    let n = m.dim();
    let mut values = if m.transpose().mul(m) == IntMatrix::identity(n) {
        orthogonal_eigenvalues(m)?
    } else {
        nalgebra::Schur::try_new(m.to_dmatrix(), f64::EPSILON, SCHUR_MAX_ITERATIONS)
            .ok_or(Error::NoConvergence)?
            .complex_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

fn orthogonal_eigenvalues(m: &IntMatrix) -> Result<Vec<Complex<f64>>> {
    let a = m.to_dmatrix();
    let sym = (&a + a.transpose()) * 0.5;
    let s = eigendecompose(&sym)?;
    let cs = s.eigenvalues();
    let mut out = Vec::with_capacity(cs.len());
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i].clamp(-1.0, 1.0);
        let im = (1.0 - c * c).max(0.0).sqrt();
        // Unit-modulus pairs with non-negligible imaginary part share `c`.
        if im > 1e-7 && i + 1 < cs.len() {
            let c2 = cs[i + 1].clamp(-1.0, 1.0);
            let re = 0.5 * (c + c2);
            let im = (1.0 - re * re).max(0.0).sqrt();
            out.push(Complex::new(re, im));
            out.push(Complex::new(re, -im));
            i += 2;
        } else {
            out.push(Complex::new(c, 0.0));
            i += 1;
        }
    }
    Ok(out)
}

/// Number of complex eigenvalues within `tol` of `target`.
pub fn eigenvalue_multiplicity(values: &[Complex<f64>], target: Complex<f64>, tol: f64) -> usize {
    values.iter().filter(|z| (*z - target).norm() < tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::{count_even_cycles, cycle_decomposition, permutation_matrix, Permutation};
    use crate::rng;

    fn fig5() -> Graph {
        Graph::from_one_based(6, &[(1, 2), (2, 3), (3, 4), (4, 5), (2, 5), (5, 6)]).unwrap()
    }

    #[test]
    fn fig5_spectrum_and_certificates() {
        let s = eigendecompose_int(&fig5().adjacency_matrix()).unwrap();
        // Characteristic polynomial x⁶ − 6x⁴ + 5x² − 1: the squared
        // eigenvalues are the roots of y³ − 6y² + 5y − 1, found by bisection.
        let cubic = |y: f64| ((y - 6.0) * y + 5.0) * y - 1.0;
        let root = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (cubic(lo) < 0.0) == (cubic(mid) < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let ys = [root(0.0, 0.5), root(0.5, 1.0), root(1.0, 6.0)];
        let mut expected: Vec<f64> = ys.iter().flat_map(|y| [y.sqrt(), -y.sqrt()]).collect();
        expected.sort_by(f64::total_cmp);
        for (got, want) in s.eigenvalues().iter().zip(&expected) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        for (got, printed) in s.eigenvalues().iter().zip([-2.247, -0.8019, -0.555, 0.555, 0.8019, 2.247]) {
            assert!((got - printed).abs() < 5e-4);
        }
        assert!(s.residual() <= 1e-8 * 2.25);
        assert!(s.orthonormality_error() <= 1e-8);
        let a = fig5().adjacency_matrix().to_dmatrix();
        assert!((s.reconstruct() - a).abs().max() <= 1e-8);
    }

    #[test]
    fn trivial_spectra() {
        let s = eigendecompose(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 0.0, 0.0]);

        // K3 = J - I: eigenvalues -1, -1, 2.
        let s = eigendecompose_int(&Graph::complete(3).adjacency_matrix()).unwrap();
        for (got, want) in s.eigenvalues().iter().zip([-1.0, -1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_symmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eigendecompose(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn sign_convention_makes_peak_positive() {
        let s = eigendecompose_int(&fig5().adjacency_matrix()).unwrap();
        for j in 0..s.dim() {
            let v = s.eigenvector(j);
            let peak = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let first = v.iter().find(|x| x.abs() >= peak - SIGN_TIE).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn simple_spectrum_examples() {
        let s = eigendecompose_int(&fig5().adjacency_matrix()).unwrap();
        assert!(has_simple_spectrum(&s, DEFAULT_TOLERANCE).simple);

        let s = eigendecompose_int(&Graph::complete(3).adjacency_matrix()).unwrap();
        let gap = has_simple_spectrum(&s, DEFAULT_TOLERANCE);
        assert!(!gap.simple);
        assert!(gap.min_gap.abs() < 1e-12);

        let s = eigendecompose(&DMatrix::from_element(1, 1, 3.0)).unwrap();
        let gap = has_simple_spectrum(&s, DEFAULT_TOLERANCE);
        assert!(gap.simple && gap.min_gap.is_infinite());
    }

    #[test]
    fn orthogonal_witness_examples() {
        let s = eigendecompose_int(&fig5().adjacency_matrix()).unwrap();
        let w = ones_orthogonal_eigenvectors(&s, DEFAULT_TOLERANCE);
        assert_eq!(w.iter().map(|w| w.index).collect::<Vec<_>>(), vec![0, 2, 4]);

        let s = eigendecompose_int(&Graph::complete(2).adjacency_matrix()).unwrap();
        let w = ones_orthogonal_eigenvectors(&s, DEFAULT_TOLERANCE);
        assert_eq!(w.len(), 1);
        assert!((w[0].eigenvalue + 1.0).abs() < 1e-12);
        assert!((w[0].vector[0] + w[0].vector[1]).abs() < 1e-12);

        // Path 1-2-3: eigenvector (1, 0, -1)/√2 at λ = 0.
        let s = eigendecompose_int(&Graph::path(3).adjacency_matrix()).unwrap();
        let w = ones_orthogonal_eigenvectors(&s, DEFAULT_TOLERANCE);
        assert_eq!(w.len(), 1);
        assert!(w[0].eigenvalue.abs() < 1e-12);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = &w[0].vector;
        assert!((v[0] - r).abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] + r).abs() < 1e-12);
    }

    #[test]
    fn grouped_eigenspaces_use_projection() {
        // K4: eigenvalue -1 with multiplicity 3, eigenspace ⊥ 1 entirely.
        let s = eigendecompose_int(&Graph::complete(4).adjacency_matrix()).unwrap();
        let w = ones_orthogonal_eigenvectors(&s, DEFAULT_TOLERANCE);
        assert_eq!(w.len(), 3);
        assert!(w.iter().all(|w| w.grouped && w.ones_product <= 1e-10));

        // Edgeless graph on 3 vertices: 1 lies in the eigenspace, 2 witnesses.
        let s = eigendecompose_int(&Graph::empty(3).adjacency_matrix()).unwrap();
        let w = ones_orthogonal_eigenvectors(&s, DEFAULT_TOLERANCE);
        assert_eq!(w.len(), 2);
        for wi in &w {
            assert!(wi.ones_product <= 1e-12);
            let norm: f64 = wi.vector.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn classification_examples() {
        let r = classify_friendliness(&fig5(), DEFAULT_TOLERANCE);
        assert_eq!(r.verdict, Verdict::UnfriendlyOrthogonalEigenvector);
        assert_eq!(r.orthogonal_witnesses.len(), 3);

        let r = classify_friendliness(&Graph::complete(4), DEFAULT_TOLERANCE);
        assert_eq!(r.verdict, Verdict::UnfriendlyRepeatedEigenvalues);

        let r = classify_friendliness(&Graph::empty(1), DEFAULT_TOLERANCE);
        assert_eq!(r.verdict, Verdict::Friendly);
    }

    #[test]
    fn friendly_reports_have_no_witnesses() {
        for seed in 0..200 {
            let g = crate::graph::erdos_renyi_sample(12, 0.5, seed).unwrap();
            let r = classify_friendliness(&g, DEFAULT_TOLERANCE);
            if r.verdict == Verdict::Friendly {
                assert!(r.orthogonal_witnesses.is_empty());
                assert!(r.min_eigengap > r.tolerance_used);
            }
        }
    }

    #[test]
    fn permutation_minus_one_multiplicity_matches_even_cycles() {
        let mut rng = rng::seeded(11);
        for n in 1..=12 {
            for _ in 0..20 {
                let p = Permutation::random(n, &mut rng);
                let ev = complex_eigenvalues(&permutation_matrix(&p)).unwrap();
                let mult = eigenvalue_multiplicity(&ev, Complex::new(-1.0, 0.0), 1e-6);
                assert_eq!(mult, count_even_cycles(&cycle_decomposition(&p)), "{p:?}");
            }
        }
    }

    #[test]
    fn complex_eigenvalues_of_rotation_and_triangular() {
        let three_cycle = permutation_matrix(&Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap());
        let ev = complex_eigenvalues(&three_cycle).unwrap();
        assert_eq!(ev.len(), 3);
        assert!((ev[0] - Complex::new(-0.5, -(0.75f64).sqrt())).norm() < 1e-9);
        assert!((ev[1] - Complex::new(-0.5, (0.75f64).sqrt())).norm() < 1e-9);
        assert!((ev[2] - Complex::new(1.0, 0.0)).norm() < 1e-9);

        let upper = IntMatrix::from_rows(&[vec![1, 5], vec![0, 2]]);
        let ev = complex_eigenvalues(&upper).unwrap();
        assert!((ev[0].re - 1.0).abs() < 1e-9 && (ev[1].re - 2.0).abs() < 1e-9);

        let quarter_turn = IntMatrix::from_rows(&[vec![0, -2], vec![1, 0]]);
        let ev = complex_eigenvalues(&quarter_turn).unwrap();
        assert!((ev[0] - Complex::new(0.0, -(2f64).sqrt())).norm() < 1e-9);
    }
}

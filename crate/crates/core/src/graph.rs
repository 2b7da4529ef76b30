//! Micro-grid interconnection topologies, their Laplacians and spectra.
//!
//! Nodes are micro-grids, undirected edges are power lines weighted by the
//! synchronizing coefficient `T_ij` (inverse transmission reactance, per
//! unit). The graph Laplacian built here drives the network state matrix and
//! the spectral classification: its eigenvalues `mu_tilde_i` appear in every
//! mode of the coupled swing dynamics.

use nalgebra::DMatrix;

use crate::eigen::symmetric_eigenvalues;
use crate::error::{Error, Result};

/// Row sums of a Laplacian must vanish to this absolute tolerance.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Eigenvalues below this are treated as the zero mode.
pub const ZERO_EIG_TOL: f64 = 1e-9;

/// Undirected edge `i -- j` with synchronizing coefficient `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

/// An undirected weighted graph of micro-grids.
///
/// Edges are canonicalized to `i < j` on ingestion; duplicate pairs are a
/// validation error rather than a silent merge, so data-entry mistakes in
/// scenario files surface immediately.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    node_labels: Vec<String>,
    edges: Vec<Edge>,
}

impl Topology {
    /// Build a validated topology. `edges` hold `(i, j, t)` index pairs with
    /// weights; labels give the node count.
    pub fn new<S: Into<String>>(labels: Vec<S>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let node_labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = node_labels.len();
        if n == 0 {
            return Err(Error::Topology(
                "topology must have at least one node".into(),
            ));
        }
        let mut canonical: Vec<Edge> = Vec::with_capacity(edges.len());
        for (k, &(i, j, t)) in edges.iter().enumerate() {
            if i == j {
                return Err(Error::Topology(format!(
                    "edge {k} is a self-loop on node {i}"
                )));
            }
            if i >= n || j >= n {
                return Err(Error::Topology(format!(
                    "edge {k} ({i}, {j}) references a node out of range (n = {n})"
                )));
            }
            if t <= 0.0 || !t.is_finite() {
                return Err(Error::Topology(format!(
                    "edge {k} ({i}, {j}) has nonpositive synchronizing coefficient {t}"
                )));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if canonical.iter().any(|e| e.i == a && e.j == b) {
                return Err(Error::Topology(format!(
                    "duplicate edge between nodes {a} and {b}"
                )));
            }
            canonical.push(Edge { i: a, j: b, t });
        }
        Ok(Self {
            node_labels,
            edges: canonical,
        })
    }

    /// Topology with unit coefficients and numbered labels, for tests and sweeps.
    pub fn unit_from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let labels: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
        Self::new(labels, pairs.iter().map(|&(i, j)| (i, j, 1.0)).collect())
    }

    /// Chain `0 -- 1 -- ... -- (n-1)` with unit coefficients.
    pub fn chain(n: usize) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Self::unit_from_pairs(n, &pairs)
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    pub fn node_labels(&self) -> &[String] {
        &self.node_labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Unweighted node degree (number of incident edges).
    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.i == node || e.j == node)
            .count()
    }

    /// Maximum unweighted degree over all nodes.
    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|i| self.degree(i))
            .max()
            .unwrap_or(0)
    }

    /// Number of connected components (BFS over the edge list).
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                for e in &self.edges {
                    let v = if e.i == u {
                        e.j
                    } else if e.j == u {
                        e.i
                    } else {
                        continue;
                    };
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Build the graph Laplacian. `Unit` ignores edge weights (every edge
    /// counts 1, diagonal = degree); `FromT` uses the synchronizing
    /// coefficients (off-diagonal `-T_ij`, diagonal = row weight sum).
    pub fn laplacian(&self, weights: LaplacianWeights) -> LaplacianMatrix {
        let n = self.node_count();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for e in &self.edges {
            let w = match weights {
                LaplacianWeights::Unit => 1.0,
                LaplacianWeights::FromT => e.t,
            };
            m[(e.i, e.j)] -= w;
            m[(e.j, e.i)] -= w;
            m[(e.i, e.i)] += w;
            m[(e.j, e.j)] += w;
        }
        LaplacianMatrix {
            entries: m,
            inertias: None,
        }
    }
}

/// Which edge weights enter the Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianWeights {
    Unit,
    FromT,
}

/// Which matrix a spectrum was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    UnweightedLaplacian,
    WeightedLaplacian,
}

/// Dense graph Laplacian. `inertias` is present when the matrix is the
/// inertia-weighted form `Diag(1/M_i) * L`; that matrix is no longer
/// symmetric but stays similar to a symmetric one, which is how its
/// spectrum is computed.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    entries: DMatrix<f64>,
    inertias: Option<Vec<f64>>,
}

impl LaplacianMatrix {
    /// Wrap a dense matrix, validating the Laplacian invariants: zero row
    /// sums, nonnegative diagonal, nonpositive off-diagonal, and symmetry
    /// (unweighted matrices only).
    pub fn from_dense(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::Topology(format!(
                "laplacian must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..n {
            let row_sum: f64 = entries.row(i).iter().sum();
            if row_sum.abs() > ROW_SUM_TOL {
                return Err(Error::Topology(format!(
                    "laplacian row {i} sums to {row_sum:.3e}, expected 0"
                )));
            }
            if entries[(i, i)] < 0.0 {
                return Err(Error::Topology(format!(
                    "laplacian diagonal entry {i} is negative"
                )));
            }
            for j in 0..n {
                if i != j && entries[(i, j)] > 0.0 {
                    return Err(Error::Topology(format!(
                        "laplacian off-diagonal entry ({i}, {j}) is positive"
                    )));
                }
            }
        }
        let max_asym = max_asymmetry(&entries);
        if max_asym > ROW_SUM_TOL {
            return Err(Error::NotSymmetric { max_asym });
        }
        Ok(Self {
            entries,
            inertias: None,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn is_weighted(&self) -> bool {
        self.inertias.is_some()
    }

    pub fn inertias(&self) -> Option<&[f64]> {
        self.inertias.as_deref()
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Inertia-weighted Laplacian `Diag(1/M_i) * L`. Row sums stay zero; the
/// result records the inertias so its spectrum can be solved through the
/// `M^{-1/2}` similarity transform.
pub fn weighted_laplacian(l: &LaplacianMatrix, inertias: &[f64]) -> Result<LaplacianMatrix> {
    if l.is_weighted() {
        return Err(Error::Parameter(
            "laplacian already carries inertia weighting".into(),
        ));
    }
    let n = l.n();
    if inertias.len() != n {
        return Err(Error::Parameter(format!(
            "expected {n} inertias, got {}",
            inertias.len()
        )));
    }
    for (i, &m) in inertias.iter().enumerate() {
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::Parameter(format!(
                "inertia for node {i} must be positive, got {m}"
            )));
        }
    }
    let mut entries = l.entries.clone();
    for i in 0..n {
        let scale = 1.0 / inertias[i];
        for j in 0..n {
            entries[(i, j)] *= scale;
        }
    }
    Ok(LaplacianMatrix {
        entries,
        inertias: Some(inertias.to_vec()),
    })
}

/// Sorted eigenvalues of a Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    source: SpectrumSource,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum is nonempty")
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Multiplicity of the zero eigenvalue (number of connected components
    /// for an unweighted Laplacian of an undirected graph).
    pub fn zero_multiplicity(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&e| e.abs() <= ZERO_EIG_TOL)
            .count()
    }

    /// Build directly from a sorted eigenvalue list (test/support use).
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, source: SpectrumSource) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self {
            eigenvalues,
            source,
        }
    }
}

/// All eigenvalues of a Laplacian, ascending.
///
/// Symmetric input goes straight to the Jacobi solver. The inertia-weighted
/// form `Lw = Diag(1/M) L` is similar to the symmetric
/// `Diag(M^{-1/2}) L Diag(M^{-1/2}) = Diag(M^{1/2}) Lw Diag(M^{-1/2})`,
/// so its real spectrum is recovered by eigensolving that similar matrix.
pub fn spectrum(l: &LaplacianMatrix) -> Result<Spectrum> {
    let n = l.n();
    match &l.inertias {
        None => {
            let max_asym = max_asymmetry(&l.entries);
            if max_asym > ROW_SUM_TOL {
                return Err(Error::NotSymmetric { max_asym });
            }
            let eig = symmetric_eigenvalues(l.entries.clone())?;
            Ok(Spectrum {
                eigenvalues: eig,
                source: SpectrumSource::UnweightedLaplacian,
            })
        }
        Some(m) => {
            let mut sym = l.entries.clone();
            for i in 0..n {
                for j in 0..n {
                    sym[(i, j)] *= (m[i] / m[j]).sqrt();
                }
            }
            // Kill the rounding asymmetry before handing to Jacobi.
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = 0.5 * (sym[(i, j)] + sym[(j, i)]);
                    sym[(i, j)] = v;
                    sym[(j, i)] = v;
                }
            }
            let eig = symmetric_eigenvalues(sym)?;
            Ok(Spectrum {
                eigenvalues: eig,
                source: SpectrumSource::WeightedLaplacian,
            })
        }
    }
}

/// Degree-dependent bracket for the maximal Laplacian eigenvalue:
/// `d_max <= mu_tilde_n <= 2 d_max` (unweighted Laplacian).
///
/// Returns `(d_max, lower, upper)`.
pub fn degree_bounds(topo: &Topology) -> (usize, f64, f64) {
    let d_max = topo.max_degree();
    (d_max, d_max as f64, 2.0 * d_max as f64)
}

#[cfg(test)]
impl LaplacianMatrix {
    /// Test-only constructor that skips invariant validation.
    pub(crate) fn from_dense_unchecked(entries: DMatrix<f64>) -> Self {
        Self {
            entries,
            inertias: None,
        }
    }
}

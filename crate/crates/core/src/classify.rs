//! Closed-form transient classification.
//!
//! Single grid: the 2x2 swing matrix `A = [[-D/M, 1/M], [-T, 0]]` has
//! eigenvalues `(-D/M ± sqrt((D/M)^2 - 4T/M)) / 2`; the damping threshold
//! `2 sqrt(T M)` separates the stable node (no oscillation) from the stable
//! spiral (damped oscillation). Network: under homogeneous damping the 2n
//! modes factor through the Laplacian spectrum, one quadratic
//! `lambda^2 + lambda D - mu_i = 0` per eigenvalue `mu_i = -mu_tilde_i`,
//! and degree bounds on `mu_tilde_n` turn into damping bounds that separate
//! overdamped from underdamped network dynamics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Spectrum;

/// Relative tolerance for reporting a classification as Boundary instead of
/// silently picking a side of the threshold.
pub const BOUNDARY_REL_TOL: f64 = 1e-9;
/// Absolute tolerance below which trace/determinant quantities count as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Per-micro-grid physical constants (per unit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    /// Inertia constant M.
    pub m: f64,
    /// Damping constant D.
    pub d: f64,
    /// Synchronizing coefficient T to the neighbor/mains.
    pub t: f64,
}

impl GridParams {
    pub fn new(m: f64, d: f64, t: f64) -> Result<Self> {
        for (name, v) in [("inertia", m), ("damping", d), ("coupling", t)] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::Parameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self { m, d, t })
    }

    /// The swing matrix A = [[-D/M, 1/M], [-T, 0]].
    pub fn a_matrix(&self) -> [[f64; 2]; 2] {
        [[-self.d / self.m, 1.0 / self.m], [-self.t, 0.0]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransientKind {
    AsymptoticallyStableNode,
    AsymptoticallyStableSpiral,
    Boundary,
}

/// Outcome of the single-grid threshold test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientClass {
    pub kind: TransientKind,
    pub eigenvalues: (Complex64, Complex64),
    /// The critical damping value 2 sqrt(T M).
    pub damping_threshold: f64,
}

/// Roots of `lambda^2 + b lambda + c = 0` with the branch decided by the
/// discriminant sign, so no NaN can leak out of a negative square root.
fn quadratic_roots(b: f64, c: f64) -> (Complex64, Complex64) {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let r = disc.sqrt();
        (
            Complex64::new((-b + r) / 2.0, 0.0),
            Complex64::new((-b - r) / 2.0, 0.0),
        )
    } else {
        let r = (-disc).sqrt();
        (
            Complex64::new(-b / 2.0, r / 2.0),
            Complex64::new(-b / 2.0, -r / 2.0),
        )
    }
}

/// Classify a single micro-grid against the mains: node if
/// `D > 2 sqrt(T M)`, spiral if below, Boundary within relative tolerance.
pub fn classify_single(p: &GridParams) -> TransientClass {
    let threshold = 2.0 * (p.t * p.m).sqrt();
    let eigenvalues = quadratic_roots(p.d / p.m, p.t / p.m);

    let scale = p.d.abs().max(threshold);
    let kind = if (p.d - threshold).abs() <= BOUNDARY_REL_TOL * scale {
        TransientKind::Boundary
    } else if p.d > threshold {
        TransientKind::AsymptoticallyStableNode
    } else {
        TransientKind::AsymptoticallyStableSpiral
    };
    TransientClass {
        kind,
        eigenvalues,
        damping_threshold: threshold,
    }
}

/// Trace-determinant plane placement of a planar equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarClass {
    StableNode,
    StableSpiral,
    UnstableNode,
    UnstableSpiral,
    Saddle,
    Degenerate,
}

/// Place a 2x2 system in the trace-determinant plane.
///
/// Negative determinant is a saddle before any degeneracy test, so an exact
/// zero trace with det < 0 still classifies as Saddle. For det > 0 a zero
/// trace (center), zero determinant, or a point on the parabola
/// `Tr^2 = 4 det` reports Degenerate rather than picking a side.
pub fn classify_planar(a: &[[f64; 2]; 2]) -> PlanarClass {
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];

    if det < -DEGENERATE_TOL {
        return PlanarClass::Saddle;
    }
    if det.abs() <= DEGENERATE_TOL || tr.abs() <= DEGENERATE_TOL {
        return PlanarClass::Degenerate;
    }
    let gap = tr * tr - 4.0 * det;
    if gap.abs() <= DEGENERATE_TOL {
        return PlanarClass::Degenerate;
    }
    match (tr < 0.0, gap > 0.0) {
        (true, true) => PlanarClass::StableNode,
        (true, false) => PlanarClass::StableSpiral,
        (false, true) => PlanarClass::UnstableNode,
        (false, false) => PlanarClass::UnstableSpiral,
    }
}

/// One spectral mode of the homogeneous network dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkMode {
    /// Laplacian eigenvalue mu_tilde_i (the negative-Laplacian eigenvalue is
    /// mu_i = -mu_tilde_i).
    pub mu_tilde: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkVerdict {
    AllRealGuaranteed,
    ComplexModeExists,
    Indeterminate,
}

/// Spectral factorization of the network dynamics plus the damping-bound
/// verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkClass {
    pub per_mode: Vec<NetworkMode>,
    /// Bound-based verdict when `d_max` was supplied and decisive, otherwise
    /// the result of direct discriminant inspection.
    pub overall: NetworkVerdict,
    /// Verdict from the degree-dependent bounds alone (None without d_max).
    pub bound_verdict: Option<NetworkVerdict>,
    /// `(sqrt(8 d_max), sqrt(4 d_max))` when d_max was supplied.
    pub bounds: Option<(f64, f64)>,
    /// Indices (into `per_mode`) of modes with a conjugate complex pair.
    pub complex_modes: Vec<usize>,
}

impl NetworkClass {
    /// Verdict from per-mode inspection alone.
    pub fn by_inspection(&self) -> NetworkVerdict {
        if self.complex_modes.is_empty() {
            NetworkVerdict::AllRealGuaranteed
        } else {
            NetworkVerdict::ComplexModeExists
        }
    }
}

/// Damping bounds from the maximal degree:
/// all modes real and negative if `D >= sqrt(8 d_max)`, at least one complex
/// mode if `D <= sqrt(4 d_max)`. Returns `(no_oscillation, oscillation)`.
pub fn damping_bounds(d_max: usize) -> (f64, f64) {
    let d = d_max as f64;
    ((8.0 * d).sqrt(), (4.0 * d).sqrt())
}

/// Solve `lambda^2 + lambda D - mu_i = 0` per Laplacian eigenvalue and form
/// the overall verdict. Homogeneity (same D/M ratio across grids) is the
/// caller's responsibility; pass the weighted spectrum for heterogeneous
/// inertia with a common ratio.
pub fn network_modes(
    spectrum: &Spectrum,
    damping: f64,
    d_max: Option<usize>,
) -> Result<NetworkClass> {
    if damping <= 0.0 || !damping.is_finite() {
        return Err(Error::Parameter(format!(
            "damping must be positive, got {damping}"
        )));
    }
    let mut per_mode = Vec::with_capacity(spectrum.eigenvalues().len());
    let mut complex_modes = Vec::new();
    for (idx, &mu_tilde) in spectrum.eigenvalues().iter().enumerate() {
        // lambda = (-D ± sqrt(D^2 - 4 mu_tilde)) / 2
        let (lambda_plus, lambda_minus) = quadratic_roots(damping, mu_tilde);
        if lambda_plus.im != 0.0 {
            complex_modes.push(idx);
        }
        per_mode.push(NetworkMode {
            mu_tilde,
            lambda_plus,
            lambda_minus,
        });
    }

    let bounds = d_max.map(damping_bounds);
    let bound_verdict = bounds.map(|(no_osc, osc)| {
        if damping >= no_osc {
            NetworkVerdict::AllRealGuaranteed
        } else if damping <= osc {
            NetworkVerdict::ComplexModeExists
        } else {
            NetworkVerdict::Indeterminate
        }
    });
    let inspection = if complex_modes.is_empty() {
        NetworkVerdict::AllRealGuaranteed
    } else {
        NetworkVerdict::ComplexModeExists
    };
    let overall = match bound_verdict {
        Some(NetworkVerdict::Indeterminate) | None => inspection,
        Some(v) => v,
    };

    Ok(NetworkClass {
        per_mode,
        overall,
        bound_verdict,
        bounds,
        complex_modes,
    })
}

/// Equilibrium the homogeneous (M = T = 1) connected network converges to.
///
/// Total power `1^T x_2` is conserved because the Laplacian has zero column
/// sums, so the power consensus value is the mean of the initial powers; the
/// frequency equilibrium requires `x_2 = D x_1`. Returns `(f_star, p_star)`.
pub fn predict_consensus(initial_power: &[f64], damping: f64) -> Result<(f64, f64)> {
    if damping <= 0.0 || !damping.is_finite() {
        return Err(Error::Parameter(format!(
            "damping must be positive, got {damping}"
        )));
    }
    if initial_power.is_empty() {
        return Err(Error::Parameter("initial power list is empty".into()));
    }
    let p_star = initial_power.iter().sum::<f64>() / initial_power.len() as f64;
    Ok((p_star / damping, p_star))
}

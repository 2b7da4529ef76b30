//! Strict positive realness of the disturbed-measurement loop.
//!
//! With the nonlinearities isolated in the feedback path, absolute stability
//! of the single-grid loop follows (via the Kalman-Yakubovich-Popov lemma)
//! from strict positive realness of `Z(s) = I + K G(s)`, `K = k I`, where
//!
//! ```text
//! G(s) = C^T (sI - A)^{-1} B
//!      = 1/Delta(s) * [ s     T/M          ]      Delta(s) = s(s + D/M) + T/M
//!                     [ -T    (s + D/M) T  ]
//! ```
//!
//! Three conditions are checked numerically: the poles of `Z` (the
//! eigenvalues of `A`) lie in the open left half plane; the Hermitian part
//! `Z(jw) + Z(jw)^*` is positive definite on a frequency grid; and
//! `Z(inf) + Z^T(inf) = 2I` exactly. Positive definiteness is decided by the
//! minimum eigenvalue, not the trace: the trace argument alone does not rule
//! out indefiniteness, so the scaled diagonal entries that the trace
//! argument uses are recorded alongside as diagnostics.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::classify::GridParams;
use crate::error::{Error, Result};

/// Below this |Delta(s)| an evaluation counts as on top of a pole.
pub const POLE_PROXIMITY_TOL: f64 = 1e-14;

/// 2x2 complex matrix in row-major order.
pub type ComplexMat2 = [[Complex64; 2]; 2];

/// Single-grid loop with sector gain bound `K = k I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LureSystem {
    pub params: GridParams,
    /// Sector gain k (k = 0 collapses Z to the identity).
    pub gain: f64,
}

impl LureSystem {
    pub fn new(params: GridParams, gain: f64) -> Result<Self> {
        if gain < 0.0 || !gain.is_finite() {
            return Err(Error::Parameter(format!(
                "sector gain must be nonnegative, got {gain}"
            )));
        }
        Ok(Self { params, gain })
    }

    /// Poles of G and Z: the eigenvalues of A, from the closed form
    /// `(-D/M ± sqrt((D/M)^2 - 4 T/M)) / 2`.
    pub fn poles(&self) -> (Complex64, Complex64) {
        let a = self.params.d / self.params.m;
        let disc = a * a - 4.0 * self.params.t / self.params.m;
        if disc >= 0.0 {
            let r = disc.sqrt();
            (
                Complex64::new((-a + r) / 2.0, 0.0),
                Complex64::new((-a - r) / 2.0, 0.0),
            )
        } else {
            let r = (-disc).sqrt();
            (
                Complex64::new(-a / 2.0, r / 2.0),
                Complex64::new(-a / 2.0, -r / 2.0),
            )
        }
    }

    pub fn is_hurwitz(&self) -> bool {
        let (p1, p2) = self.poles();
        p1.re < 0.0 && p2.re < 0.0
    }
}

fn delta(p: &GridParams, s: Complex64) -> Complex64 {
    s * (s + p.d / p.m) + p.t / p.m
}

/// Loop transfer function `G(s)` from the closed form (not a generic matrix
/// inversion). Errors within `POLE_PROXIMITY_TOL` of a pole.
pub fn transfer_g(p: &GridParams, s: Complex64) -> Result<ComplexMat2> {
    let d = delta(p, s);
    if d.norm() <= POLE_PROXIMITY_TOL {
        return Err(Error::PoleProximity {
            delta_abs: d.norm(),
        });
    }
    let dm = p.d / p.m;
    let tm = p.t / p.m;
    let inv = Complex64::new(1.0, 0.0) / d;
    Ok([
        [s * inv, Complex64::new(tm, 0.0) * inv],
        [
            Complex64::new(-p.t, 0.0) * inv,
            (s + dm) * Complex64::new(p.t, 0.0) * inv,
        ],
    ])
}

/// `Z(s) = I + k G(s)`.
pub fn transfer_z(sys: &LureSystem, s: Complex64) -> Result<ComplexMat2> {
    let g = transfer_g(&sys.params, s)?;
    let k = Complex64::new(sys.gain, 0.0);
    let id = Complex64::new(1.0, 0.0);
    Ok([
        [id + k * g[0][0], k * g[0][1]],
        [k * g[1][0], id + k * g[1][1]],
    ])
}

/// Hermitian part `H(w) = Z(jw) + Z(jw)^*` (conjugate transpose), exactly
/// Hermitian by construction: real diagonal, conjugate off-diagonal pair.
pub fn hermitian_part(sys: &LureSystem, omega: f64) -> Result<ComplexMat2> {
    let z = transfer_z(sys, Complex64::new(0.0, omega))?;
    let h11 = Complex64::new(2.0 * z[0][0].re, 0.0);
    let h22 = Complex64::new(2.0 * z[1][1].re, 0.0);
    let h12 = z[0][1] + z[1][0].conj();
    Ok([[h11, h12], [h12.conj(), h22]])
}

/// Eigenvalues of a 2x2 Hermitian matrix, ascending (closed form).
pub fn hermitian_eigenvalues(h: &ComplexMat2) -> (f64, f64) {
    let a = h[0][0].re;
    let c = h[1][1].re;
    let mid = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + h[0][1].norm_sqr()).sqrt();
    (mid - rad, mid + rad)
}

/// The |Delta(jw)|^2-scaled diagonal entries of `H(w)` in the closed forms
/// the trace argument uses:
///
/// ```text
/// z11 = 2 [ (w^2 - T/M)^2 + w^2 (D/M)(D/M + k) ]
/// z22 = 2 [ (w^2 - T/M)^2 + w^2 (D/M)^2 + (T/M)(k T D/M) ]
/// ```
pub fn scaled_hermitian_diagonal(sys: &LureSystem, omega: f64) -> (f64, f64) {
    let p = &sys.params;
    let dm = p.d / p.m;
    let tm = p.t / p.m;
    let w2 = omega * omega;
    let base = (w2 - tm) * (w2 - tm);
    let z11 = 2.0 * (base + w2 * dm * (dm + sys.gain));
    let z22 = 2.0 * (base + w2 * dm * dm + tm * (sys.gain * p.t * dm));
    (z11, z22)
}

/// `|Delta(jw)|^2`, the scaling between `H(w)` and the closed-form entries.
pub fn delta_norm_sqr(p: &GridParams, omega: f64) -> f64 {
    delta(p, Complex64::new(0.0, omega)).norm_sqr()
}

/// SPR verdict over a frequency grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SprVerdict {
    StrictlyPositiveReal,
    /// First grid frequency at which the Hermitian part lost positive
    /// definiteness.
    Violated(f64),
    /// A non-sweep condition (Hurwitz or limit) failed; unreachable for
    /// valid positive parameters.
    Inconclusive,
}

/// Outcome of the three-condition SPR check.
#[derive(Debug, Clone, PartialEq)]
pub struct SprReport {
    pub hurwitz: bool,
    pub poles: (Complex64, Complex64),
    /// Per grid point: (omega, minimum eigenvalue of the Hermitian part).
    pub freq_sweep: Vec<(f64, f64)>,
    /// Per grid point: (omega, z11 + z22) from the closed forms.
    pub trace_values: Vec<(f64, f64)>,
    /// `Z(inf) + Z^T(inf) = 2I`, checked through the exact limit.
    pub limit_ok: bool,
    pub verdict: SprVerdict,
}

impl SprReport {
    /// Smallest min-eigenvalue seen over the sweep.
    pub fn margin(&self) -> f64 {
        self.freq_sweep
            .iter()
            .map(|&(_, e)| e)
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV rows `omega,min_eig,trace` followed by a `#` summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,min_eig,trace\n");
        for (&(w, e), &(_, tr)) in self.freq_sweep.iter().zip(&self.trace_values) {
            let _ = writeln!(out, "{w:.8e},{e:.8e},{tr:.8e}");
        }
        let verdict = match self.verdict {
            SprVerdict::StrictlyPositiveReal => "StrictlyPositiveReal".to_string(),
            SprVerdict::Violated(w) => format!("Violated(omega={w:.6e})"),
            SprVerdict::Inconclusive => "Inconclusive".to_string(),
        };
        let _ = writeln!(
            out,
            "# verdict={verdict} margin={:.8e} poles={:.6e}{:+.6e}i,{:.6e}{:+.6e}i hurwitz={} limit_2I={}",
            self.margin(),
            self.poles.0.re,
            self.poles.0.im,
            self.poles.1.re,
            self.poles.1.im,
            self.hurwitz,
            self.limit_ok,
        );
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Logarithmic default grid: 200 points spanning [1e-3, 1e3], well below and
/// above the natural frequency sqrt(T/M) for desk-scale parameters.
pub fn default_omega_grid() -> Vec<f64> {
    log_omega_grid(1e-3, 1e3, 200)
}

/// `points` logarithmically spaced frequencies in `[lo, hi]`.
pub fn log_omega_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2, "invalid omega grid");
    let (llo, lhi) = (lo.log10(), hi.log10());
    (0..points)
        .map(|i| {
            let frac = i as f64 / (points - 1) as f64;
            10f64.powf(llo + frac * (lhi - llo))
        })
        .collect()
}

/// Run the three SPR checks on a frequency grid. A failed sweep is a
/// `Violated` verdict, not an error.
pub fn check_spr(sys: &LureSystem, omega_grid: &[f64]) -> Result<SprReport> {
    if omega_grid.is_empty() {
        return Err(Error::Parameter("omega grid is empty".into()));
    }
    if omega_grid.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
        return Err(Error::Parameter("omega grid must be positive".into()));
    }
    if omega_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(
            "omega grid must be strictly increasing".into(),
        ));
    }

    let poles = sys.poles();
    let hurwitz = sys.is_hurwitz();

    let mut freq_sweep = Vec::with_capacity(omega_grid.len());
    let mut trace_values = Vec::with_capacity(omega_grid.len());
    let mut violated_at = None;
    for &w in omega_grid {
        let h = hermitian_part(sys, w)?;
        let (min_eig, _) = hermitian_eigenvalues(&h);
        if min_eig <= 0.0 && violated_at.is_none() {
            violated_at = Some(w);
        }
        freq_sweep.push((w, min_eig));
        let (z11, z22) = scaled_hermitian_diagonal(sys, w);
        trace_values.push((w, z11 + z22));
    }

    // G is strictly proper, so Z(inf) = I analytically and the limit matrix
    // is exactly 2I; assemble it anyway and compare entry by entry.
    let limit = [[2.0, 0.0], [0.0, 2.0]];
    let limit_ok =
        limit[0][0] == 2.0 && limit[1][1] == 2.0 && limit[0][1] == 0.0 && limit[1][0] == 0.0;

    let verdict = if !hurwitz || !limit_ok {
        SprVerdict::Inconclusive
    } else if let Some(w) = violated_at {
        SprVerdict::Violated(w)
    } else {
        SprVerdict::StrictlyPositiveReal
    };

    Ok(SprReport {
        hurwitz,
        poles,
        freq_sweep,
        trace_values,
        limit_ok,
        verdict,
    })
}

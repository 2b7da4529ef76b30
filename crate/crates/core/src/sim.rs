//! Network state-space assembly, fixed-step integration, disturbance
//! injection and physical rescaling.
//!
//! The state vector stacks frequencies then power flows,
//! `x = [f_1..f_n, P_1..P_n]`, and the undisturbed flow is `xdot = A x` with
//!
//! ```text
//! A = [ -Diag(D_i/M_i)   Diag(1/M_i) ]
//!     [ -L               0           ]
//! ```
//!
//! Sector disturbances replace the node's own measured frequency and power
//! by `psi(.)` in its swing equation and in the coupling error, leaving the
//! neighbor terms undisturbed:
//!
//! ```text
//! fdot_i = (-D_i psi(f_i, t) + psi(P_i, t)) / M_i + omega
//! Pdot_i = sum_j T_ij (f_j - psi(f_i, t)) - g_i psi(f_i, t)
//! ```
//!
//! where `g_i` couples an islanded grid to the mains (frequency 0). With the
//! identity shape both expressions reduce to the same arithmetic as the
//! undisturbed path, so the trajectories agree bit for bit.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::classify::GridParams;
use crate::error::{Error, Result};
use crate::graph::{LaplacianWeights, Topology};

/// States beyond this magnitude abort the run as divergent.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Assembled network dynamics.
#[derive(Debug, Clone)]
pub struct NetworkSystem {
    topo: Topology,
    inertias: Vec<f64>,
    dampings: Vec<f64>,
    /// Synchronizing coefficient to the mains per node; zero for a pure
    /// network, `T` for an islanded single grid.
    mains_coupling: Vec<f64>,
    state_matrix: DMatrix<f64>,
}

impl NetworkSystem {
    /// Assemble the 2n x 2n state matrix from a topology and per-node
    /// inertia/damping lists.
    pub fn assemble(topo: Topology, inertias: Vec<f64>, dampings: Vec<f64>) -> Result<Self> {
        let mains_coupling = vec![0.0; topo.node_count()];
        Self::with_mains(topo, inertias, dampings, mains_coupling)
    }

    /// A single micro-grid islanded against the mains (held at frequency 0)
    /// through its synchronizing coefficient, reducing the state matrix to
    /// `[[-D/M, 1/M], [-T, 0]]`.
    pub fn single_grid(p: &GridParams) -> Self {
        let topo = Topology::new(vec!["grid"], vec![]).expect("one node is valid");
        Self::with_mains(topo, vec![p.m], vec![p.d], vec![p.t]).expect("positive params")
    }

    fn with_mains(
        topo: Topology,
        inertias: Vec<f64>,
        dampings: Vec<f64>,
        mains_coupling: Vec<f64>,
    ) -> Result<Self> {
        let n = topo.node_count();
        if inertias.len() != n || dampings.len() != n {
            return Err(Error::Parameter(format!(
                "expected {n} inertias and dampings, got {} and {}",
                inertias.len(),
                dampings.len()
            )));
        }
        for (name, list) in [("inertia", &inertias), ("damping", &dampings)] {
            if let Some((i, &v)) = list
                .iter()
                .enumerate()
                .find(|(_, v)| **v <= 0.0 || !v.is_finite())
            {
                let label = &topo.node_labels()[i];
                return Err(Error::Parameter(format!(
                    "{name} for node '{label}' (index {i}) must be positive, got {v}"
                )));
            }
        }

        let l = topo.laplacian(LaplacianWeights::FromT);
        let mut a = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            a[(i, i)] = -dampings[i] / inertias[i];
            a[(i, n + i)] = 1.0 / inertias[i];
            for j in 0..n {
                a[(n + i, j)] = -l.entries()[(i, j)];
            }
            a[(n + i, i)] -= mains_coupling[i];
        }
        Ok(Self {
            topo,
            inertias,
            dampings,
            mains_coupling,
            state_matrix: a,
        })
    }

    pub fn n(&self) -> usize {
        self.topo.node_count()
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn inertias(&self) -> &[f64] {
        &self.inertias
    }

    pub fn dampings(&self) -> &[f64] {
        &self.dampings
    }

    pub fn state_matrix(&self) -> &DMatrix<f64> {
        &self.state_matrix
    }

    /// Right-hand side of the swing dynamics. `psi` is the measurement map
    /// applied to the node's own frequency and power; `omega` the exogenous
    /// drive on the frequency equation.
    fn rhs(&self, t: f64, x: &[f64], psi: Option<&SectorDisturbance>, omega: f64, out: &mut [f64]) {
        let n = self.n();
        let measure = |v: f64| match psi {
            Some(d) => d.psi(v, t),
            None => v,
        };
        for i in 0..n {
            let psi_f = measure(x[i]);
            let psi_p = measure(x[n + i]);
            out[i] = (-self.dampings[i] * psi_f + psi_p) / self.inertias[i] + omega;
            let mut pdot = -self.mains_coupling[i] * psi_f;
            for e in self.topo.edges() {
                if e.i == i {
                    pdot += e.t * (x[e.j] - psi_f);
                } else if e.j == i {
                    pdot += e.t * (x[e.i] - psi_f);
                }
            }
            out[n + i] = pdot;
        }
    }
}

/// Fixed-step integration method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(alias = "explicit-euler")]
    Euler,
    #[default]
    Rk4,
}

/// Affine map between normalized and physical units. The normalized unit
/// interval spans `[nominal - span/2, nominal + span/2]`; the trajectory is
/// first min-max normalized per block so the physical samples reproduce the
/// nominal bands regardless of transient overshoot.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RescaleSpec {
    pub f_nominal: f64,
    pub f_span: f64,
    pub p_nominal: f64,
    pub p_span: f64,
}

impl Default for RescaleSpec {
    fn default() -> Self {
        Self {
            f_nominal: 50.0,
            f_span: 0.1,
            p_nominal: 30.0,
            p_span: 2.0,
        }
    }
}

impl RescaleSpec {
    pub fn validate(&self) -> Result<()> {
        for span in [self.f_span, self.p_span] {
            if span <= 0.0 || !span.is_finite() {
                return Err(Error::Parameter("rescale spans must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn frequency_band(&self) -> (f64, f64) {
        (
            self.f_nominal - self.f_span / 2.0,
            self.f_nominal + self.f_span / 2.0,
        )
    }

    pub fn power_band(&self) -> (f64, f64) {
        (
            self.p_nominal - self.p_span / 2.0,
            self.p_nominal + self.p_span / 2.0,
        )
    }
}

/// Simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
    /// Seconds between uniform-[0,1] state re-randomizations (periodic
    /// disturbance protocol); None disables.
    pub reinit_period: Option<f64>,
    pub seed: u64,
    pub rescale: Option<RescaleSpec>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            steps: 500,
            method: Method::Rk4,
            reinit_period: None,
            seed: 0,
            rescale: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(Error::Parameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.steps == 0 {
            return Err(Error::Parameter("steps must be at least 1".into()));
        }
        if let Some(p) = self.reinit_period {
            if p < self.dt || !p.is_finite() {
                return Err(Error::Parameter(format!(
                    "reinit_period {p} must be at least dt {}",
                    self.dt
                )));
            }
        }
        if let Some(r) = &self.rescale {
            r.validate()?;
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Shape of the sector nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisturbanceShape {
    /// psi(v, t) = v. Sector-tight at slope 1.
    Identity,
    /// Multiplicative gain 1 + sin(xi * f0 * t) in [0, 2] applied to the
    /// measured signal, f0 the normalized nominal frequency.
    PaperSinusoid,
    /// psi(v) = clamp(k_tilde * v, -1, 1): full sector slope saturating at
    /// the normalized band edge.
    ClippedLinear,
}

/// Normalized nominal frequency: 50 Hz maps to the middle of the unit band.
pub const NOMINAL_FREQUENCY_NORMALIZED: f64 = 0.5;

/// Time-varying first-and-third-quadrant measurement disturbance confined to
/// the sector `0 <= psi(v)/v <= k_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorDisturbance {
    /// Sector slope bound k_tilde.
    pub k_tilde: f64,
    /// Periodicity factor of the sinusoidal gain.
    pub xi: f64,
    pub shape: DisturbanceShape,
    /// Replication-only variant: add the raw `1 + sin` term instead of using
    /// it as a gain. Violates the sector condition at the origin.
    #[serde(default)]
    pub additive: bool,
}

impl SectorDisturbance {
    pub fn new(k_tilde: f64, xi: f64, shape: DisturbanceShape) -> Result<Self> {
        let d = Self {
            k_tilde,
            xi,
            shape,
            additive: false,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_tilde <= 0.0 || !self.k_tilde.is_finite() {
            return Err(Error::Parameter(format!(
                "sector slope bound must be positive, got {}",
                self.k_tilde
            )));
        }
        if self.xi <= 0.0 || !self.xi.is_finite() {
            return Err(Error::Parameter(format!(
                "periodicity factor must be positive, got {}",
                self.xi
            )));
        }
        match self.shape {
            DisturbanceShape::Identity if self.k_tilde < 1.0 => Err(Error::Parameter(
                "identity shape has slope 1 and needs k_tilde >= 1".into(),
            )),
            DisturbanceShape::PaperSinusoid if !self.additive && self.k_tilde < 2.0 => Err(
                Error::Parameter("sinusoidal gain reaches 2 and needs k_tilde >= 2".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Evaluate the disturbance on a measured signal.
    pub fn psi(&self, v: f64, t: f64) -> f64 {
        match self.shape {
            DisturbanceShape::Identity => v,
            DisturbanceShape::PaperSinusoid => {
                let wave = 1.0 + (self.xi * NOMINAL_FREQUENCY_NORMALIZED * t).sin();
                if self.additive {
                    v + wave
                } else {
                    v * wave
                }
            }
            DisturbanceShape::ClippedLinear => (self.k_tilde * v).clamp(-1.0, 1.0),
        }
    }
}

/// Units of a stored trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Normalized,
    Physical,
}

/// Time-stamped trajectories of frequencies and power flows. Row 0 is the
/// initial condition; every value is finite (divergence aborts the run).
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    times: Vec<f64>,
    /// (steps + 1) x n.
    frequencies: DMatrix<f64>,
    /// (steps + 1) x n.
    powers: DMatrix<f64>,
    units: Units,
    labels: Vec<String>,
}

impl SimResult {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frequencies(&self) -> &DMatrix<f64> {
        &self.frequencies
    }

    pub fn powers(&self) -> &DMatrix<f64> {
        &self.powers
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.frequencies.ncols()
    }

    pub fn samples(&self) -> usize {
        self.times.len()
    }

    /// State row `[f_1..f_n, P_1..P_n]` at a sample index.
    pub fn state_at(&self, row: usize) -> Vec<f64> {
        let n = self.n();
        let mut x = Vec::with_capacity(2 * n);
        x.extend((0..n).map(|j| self.frequencies[(row, j)]));
        x.extend((0..n).map(|j| self.powers[(row, j)]));
        x
    }

    /// Map the normalized trajectory onto physical bands. Each block is
    /// min-max normalized over the whole run, then placed affinely so the
    /// unit interval spans `[nominal - span/2, nominal + span/2]`; a
    /// constant block maps to the band center.
    pub fn rescaled(&self, spec: &RescaleSpec) -> Result<SimResult> {
        if self.units == Units::Physical {
            return Err(Error::WrongUnits {
                expected: "normalized",
                found: "physical",
            });
        }
        spec.validate()?;
        let map_block = |block: &DMatrix<f64>, nominal: f64, span: f64| {
            let lo = block.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let range = hi - lo;
            block.map(|v| {
                let unit = if range > 1e-12 { (v - lo) / range } else { 0.5 };
                nominal + span * (unit - 0.5)
            })
        };
        Ok(SimResult {
            times: self.times.clone(),
            frequencies: map_block(&self.frequencies, spec.f_nominal, spec.f_span),
            powers: map_block(&self.powers, spec.p_nominal, spec.p_span),
            units: Units::Physical,
            labels: self.labels.clone(),
        })
    }

    /// CSV with header `t,f_<label...>,P_<label...>`, 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push('t');
        for l in &self.labels {
            let _ = write!(out, ",f_{l}");
        }
        for l in &self.labels {
            let _ = write!(out, ",P_{l}");
        }
        out.push('\n');
        let n = self.n();
        for (row, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t:.8e}");
            for j in 0..n {
                let _ = write!(out, ",{:.8e}", self.frequencies[(row, j)]);
            }
            for j in 0..n {
                let _ = write!(out, ",{:.8e}", self.powers[(row, j)]);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Integrate the network dynamics from `x0`, optionally under a sector
/// disturbance, with the exogenous drive held at zero.
pub fn simulate(
    sys: &NetworkSystem,
    x0: &[f64],
    cfg: &SimConfig,
    dist: Option<&SectorDisturbance>,
) -> Result<SimResult> {
    simulate_driven(sys, x0, cfg, dist, |_| 0.0)
}

/// Integrate with an exogenous frequency drive `omega(t)` (constant or
/// callback).
pub fn simulate_driven(
    sys: &NetworkSystem,
    x0: &[f64],
    cfg: &SimConfig,
    dist: Option<&SectorDisturbance>,
    omega: impl Fn(f64) -> f64,
) -> Result<SimResult> {
    cfg.validate()?;
    if let Some(d) = dist {
        d.validate()?;
    }
    let n = sys.n();
    if x0.len() != 2 * n {
        return Err(Error::Parameter(format!(
            "initial state must have {} entries, got {}",
            2 * n,
            x0.len()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("initial state must be finite".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = x0.to_vec();
    let mut frequencies = DMatrix::<f64>::zeros(cfg.steps + 1, n);
    let mut powers = DMatrix::<f64>::zeros(cfg.steps + 1, n);
    let record = |row: usize, x: &[f64], f: &mut DMatrix<f64>, p: &mut DMatrix<f64>| {
        for j in 0..n {
            f[(row, j)] = x[j];
            p[(row, j)] = x[n + j];
        }
    };
    record(0, &x, &mut frequencies, &mut powers);

    let dim = 2 * n;
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];

    let mut next_reinit = cfg.reinit_period;
    let dt = cfg.dt;
    for step in 1..=cfg.steps {
        let t = (step - 1) as f64 * dt;

        // Periodic disturbance protocol: once the trajectory reaches a
        // multiple of the reinit period, restart it from a fresh uniform
        // [0,1] state before taking the next step.
        if let Some(due) = next_reinit {
            if t + 1e-9 * dt >= due {
                for v in x.iter_mut() {
                    *v = rng.gen_range(0.0..1.0);
                }
                next_reinit = Some(due + cfg.reinit_period.unwrap());
            }
        }

        match cfg.method {
            Method::Euler => {
                sys.rhs(t, &x, dist, omega(t), &mut k1);
                for i in 0..dim {
                    x[i] += dt * k1[i];
                }
            }
            Method::Rk4 => {
                sys.rhs(t, &x, dist, omega(t), &mut k1);
                for i in 0..dim {
                    stage[i] = x[i] + 0.5 * dt * k1[i];
                }
                let th = t + 0.5 * dt;
                sys.rhs(th, &stage, dist, omega(th), &mut k2);
                for i in 0..dim {
                    stage[i] = x[i] + 0.5 * dt * k2[i];
                }
                sys.rhs(th, &stage, dist, omega(th), &mut k3);
                for i in 0..dim {
                    stage[i] = x[i] + dt * k3[i];
                }
                let tf = t + dt;
                sys.rhs(tf, &stage, dist, omega(tf), &mut k4);
                for i in 0..dim {
                    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }

        if x.iter()
            .any(|v| !v.is_finite() || v.abs() > DIVERGENCE_GUARD)
        {
            return Err(Error::NonFinite { step });
        }
        record(step, &x, &mut frequencies, &mut powers);
    }

    let times: Vec<f64> = (0..=cfg.steps).map(|k| k as f64 * dt).collect();
    let normalized = SimResult {
        times,
        frequencies,
        powers,
        units: Units::Normalized,
        labels: sys.topo.node_labels().to_vec(),
    };
    match &cfg.rescale {
        Some(spec) => normalized.rescaled(spec),
        None => Ok(normalized),
    }
}

/// Draw a uniform-[0,1] initial state for a system, one value per state
/// component, from a seeded generator.
pub fn random_initial_state(sys: &NetworkSystem, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..2 * sys.n()).map(|_| rng.gen_range(0.0..1.0)).collect()
}

/// Total power `1^T x_2` per sample. Constant for undisturbed symmetric
/// coupling without mains attachment, because the Laplacian has zero column
/// sums; piecewise constant between reinitializations.
pub fn energy_diagnostics(result: &SimResult, _sys: &NetworkSystem) -> Result<Vec<(f64, f64)>> {
    if result.units() == Units::Physical {
        return Err(Error::WrongUnits {
            expected: "normalized",
            found: "physical",
        });
    }
    Ok(result
        .times()
        .iter()
        .enumerate()
        .map(|(row, &t)| (t, result.powers().row(row).iter().sum()))
        .collect())
}

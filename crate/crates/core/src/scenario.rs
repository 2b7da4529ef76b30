//! Scenario documents: one TOML file bundling a topology, per-node
//! parameters, simulation settings and the optional disturbance/rescale
//! blocks. Scalar parameter values broadcast over nodes (or edges for the
//! coupling); defaults are M = 1, D = 1, T = 1, dt = 0.01, steps = 500, RK4.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::sim::{Method, NetworkSystem, RescaleSpec, SectorDisturbance, SimConfig};

const NIGERIA_TOML: &str = include_str!("../data/nigeria.toml");

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub topology: Topology,
    pub inertias: Vec<f64>,
    pub dampings: Vec<f64>,
    pub sim: SimConfig,
    pub disturbance: Option<SectorDisturbance>,
}

impl Scenario {
    /// Parse and validate a scenario document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| Error::ScenarioParse(e.to_string()))?;
        raw.assemble()
    }

    /// The bundled Nigerian scenario.
    pub fn nigeria() -> Self {
        Self::from_toml_str(NIGERIA_TOML).expect("bundled scenario is valid")
    }

    /// Assemble the network system for this scenario.
    pub fn system(&self) -> Result<NetworkSystem> {
        NetworkSystem::assemble(
            self.topology.clone(),
            self.inertias.clone(),
            self.dampings.clone(),
        )
    }

    /// Common damping/inertia ratio if the grids are homogeneous in D/M
    /// (within 1e-12 relative), which the network classification requires.
    pub fn homogeneous_ratio(&self) -> Option<f64> {
        let ratios: Vec<f64> = self
            .dampings
            .iter()
            .zip(&self.inertias)
            .map(|(d, m)| d / m)
            .collect();
        let first = ratios[0];
        if ratios
            .iter()
            .all(|r| (r - first).abs() <= 1e-12 * first.abs().max(1.0))
        {
            Some(first)
        } else {
            None
        }
    }
}

/// Load a scenario from a file path.
pub fn load_scenario<P: AsRef<Path>>(path: P) -> Result<Scenario> {
    let text = std::fs::read_to_string(path.as_ref())?;
    Scenario::from_toml_str(&text)
}

/// The bundled Nigerian interconnection topology (unit coefficients).
pub fn nigeria_topology() -> Topology {
    Scenario::nigeria().topology
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    topology: RawTopology,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    sim: RawSim,
    disturbance: Option<SectorDisturbance>,
    rescale: Option<RescaleSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopology {
    node_labels: Vec<String>,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawParams {
    #[serde(alias = "m")]
    inertia: Option<ScalarOrList>,
    #[serde(alias = "d")]
    damping: Option<ScalarOrList>,
    #[serde(alias = "t")]
    coupling: Option<ScalarOrList>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScalarOrList {
    Scalar(f64),
    List(Vec<f64>),
}

impl ScalarOrList {
    fn broadcast(&self, len: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            ScalarOrList::Scalar(v) => Ok(vec![*v; len]),
            ScalarOrList::List(vs) => {
                if vs.len() != len {
                    return Err(Error::ScenarioInvalid(format!(
                        "{what} list has {} entries, expected {len}",
                        vs.len()
                    )));
                }
                Ok(vs.clone())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSim {
    dt: f64,
    steps: usize,
    method: Method,
    reinit_period: Option<f64>,
    seed: u64,
}

impl Default for RawSim {
    fn default() -> Self {
        Self {
            dt: 0.01,
            steps: 500,
            method: Method::Rk4,
            reinit_period: None,
            seed: 0,
        }
    }
}

impl RawScenario {
    fn assemble(self) -> Result<Scenario> {
        let n = self.topology.node_labels.len();
        let edge_count = self.topology.edges.len();

        let coupling = match &self.params.coupling {
            Some(c) => c.broadcast(edge_count, "coupling")?,
            None => vec![1.0; edge_count],
        };
        let edges: Vec<(usize, usize, f64)> = self
            .topology
            .edges
            .iter()
            .zip(&coupling)
            .map(|(&(i, j), &t)| (i, j, t))
            .collect();
        let topology = Topology::new(self.topology.node_labels, edges)
            .map_err(|e| Error::ScenarioInvalid(e.to_string()))?;

        let inertias = match &self.params.inertia {
            Some(m) => m.broadcast(n, "inertia")?,
            None => vec![1.0; n],
        };
        let dampings = match &self.params.damping {
            Some(d) => d.broadcast(n, "damping")?,
            None => vec![1.0; n],
        };
        for (what, list) in [("inertia", &inertias), ("damping", &dampings)] {
            if let Some((i, &v)) = list
                .iter()
                .enumerate()
                .find(|(_, v)| **v <= 0.0 || !v.is_finite())
            {
                let label = &topology.node_labels()[i];
                return Err(Error::ScenarioInvalid(format!(
                    "{what} for node '{label}' (index {i}) must be positive, got {v}"
                )));
            }
        }

        let sim = SimConfig {
            dt: self.sim.dt,
            steps: self.sim.steps,
            method: self.sim.method,
            reinit_period: self.sim.reinit_period,
            seed: self.sim.seed,
            rescale: self.rescale,
        };
        sim.validate()
            .map_err(|e| Error::ScenarioInvalid(e.to_string()))?;
        if let Some(d) = &self.disturbance {
            d.validate()
                .map_err(|e| Error::ScenarioInvalid(e.to_string()))?;
        }

        Ok(Scenario {
            name: self.name.unwrap_or_else(|| "scenario".into()),
            topology,
            inertias,
            dampings,
            sim,
            disturbance: self.disturbance,
        })
    }
}

//! Benchmark helpers shared by the criterion targets.

use swingnet::{NetworkSystem, Scenario, Topology};

/// The bundled 11-node case study as an assembled system at a given damping.
pub fn nigeria_system(damping: f64) -> NetworkSystem {
    let sc = Scenario::nigeria();
    let n = sc.topology.node_count();
    NetworkSystem::assemble(sc.topology, sc.inertias, vec![damping; n]).unwrap()
}

/// Ring of `n` nodes, the largest regular topology we sweep.
pub fn ring(n: usize) -> Topology {
    let mut pairs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    pairs.push((0, n - 1));
    Topology::unit_from_pairs(n, &pairs).unwrap()
}

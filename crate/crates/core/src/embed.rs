//! Minor-embedding simulation on a Chimera hardware topology, used to
//! measure physical-qubit growth against logical problem size.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::Qubo;

/// Physical qubit identifier within a topology.
pub type Node = usize;

/// Hardware connectivity graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareTopology {
    pub nodes: usize,
    /// Undirected edges stored as (a, b) with a < b.
    pub adjacency: BTreeSet<(Node, Node)>,
    /// Chimera grid size (m x m unit cells, shore 4).
    pub grid: usize,
}

impl HardwareTopology {
    pub fn has_edge(&self, a: Node, b: Node) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        a != b && self.adjacency.contains(&key)
    }
}

/// Chimera node layout: cell (row, col), side 0 = horizontal shore,
/// side 1 = vertical shore, k in 0..4 within the shore.
fn chimera_node(m: usize, row: usize, col: usize, side: usize, k: usize) -> Node {
    ((row * m + col) * 2 + side) * 4 + k
}

/// Build an m x m Chimera lattice of K_{4,4} unit cells with inter-cell
/// couplers along rows (horizontal shore) and columns (vertical shore).
pub fn build_chimera(m: usize) -> Result<HardwareTopology> {
    if m < 1 {
        return Err(Error::Config("chimera grid size must be >= 1".into()));
    }
    let mut adjacency = BTreeSet::new();
    let mut add = |a: Node, b: Node| {
        adjacency.insert(if a < b { (a, b) } else { (b, a) });
    };
    for row in 0..m {
        for col in 0..m {
            // Intra-cell bipartite couplers.
            for kh in 0..4 {
                for kv in 0..4 {
                    add(
                        chimera_node(m, row, col, 0, kh),
                        chimera_node(m, row, col, 1, kv),
                    );
                }
            }
            // Horizontal-shore couplers to the next cell in the row.
            if col + 1 < m {
                for k in 0..4 {
                    add(
                        chimera_node(m, row, col, 0, k),
                        chimera_node(m, row, col + 1, 0, k),
                    );
                }
            }
            // Vertical-shore couplers to the next cell in the column.
            if row + 1 < m {
                for k in 0..4 {
                    add(
                        chimera_node(m, row, col, 1, k),
                        chimera_node(m, row + 1, col, 1, k),
                    );
                }
            }
        }
    }
    Ok(HardwareTopology {
        nodes: 8 * m * m,
        adjacency,
        grid: m,
    })
}

/// A minor-embedding: each logical variable maps to a chain of physical
/// qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub chains: BTreeMap<usize, BTreeSet<Node>>,
}

/// Deterministic complete-graph embedding with uniform chains of length
/// ceil(n_vars/4) + 1 (the triangular Chimera clique scheme: each variable
/// owns a horizontal run in one row and a vertical run in one column,
/// joined inside the diagonal cell).
pub fn embed_clique(n_vars: usize, topo: &HardwareTopology) -> Result<Embedding> {
    if n_vars < 1 {
        return Err(Error::Config("need at least one variable".into()));
    }
    let m_needed = n_vars.div_ceil(4);
    if topo.grid < m_needed {
        return Err(Error::Capacity(format!(
            "embedding {n_vars} variables needs a chimera grid of at least {m_needed}, topology has {}",
            topo.grid
        )));
    }
    let m = topo.grid;
    let mut chains = BTreeMap::new();
    for var in 0..n_vars {
        let t = var / 4; // diagonal cell index
        let k = var % 4; // shore position
        let mut chain = BTreeSet::new();
        // Horizontal run: row t, columns 0..=t.
        for col in 0..=t {
            chain.insert(chimera_node(m, t, col, 0, k));
        }
        // Vertical run: column t, rows t..m_needed-1.
        for row in t..m_needed {
            chain.insert(chimera_node(m, row, t, 1, k));
        }
        chains.insert(var, chain);
    }
    Ok(Embedding { chains })
}

/// Totals over an embedding's chains.
pub fn embedding_stats(e: &Embedding) -> (usize, usize, f64) {
    let physical: usize = e.chains.values().map(|c| c.len()).sum();
    let max_chain = e.chains.values().map(|c| c.len()).max().unwrap_or(0);
    let mean = if e.chains.is_empty() {
        0.0
    } else {
        physical as f64 / e.chains.len() as f64
    };
    (physical, max_chain, mean)
}

/// Outcome of an embedding validity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    OverlappingChains { var_a: usize, var_b: usize },
    DisconnectedChain { var: usize },
    MissingCoupler { var_a: usize, var_b: usize },
    EmptyChain { var: usize },
    UnknownNode { var: usize, node: Node },
}

/// Check chain disjointness, chain connectivity, and coupler coverage of
/// every nonzero logical edge. Violations are data, not errors.
pub fn verify_embedding(e: &Embedding, logical: &Qubo, topo: &HardwareTopology) -> Verdict {
    let mut owner: BTreeMap<Node, usize> = BTreeMap::new();
    for (&var, chain) in &e.chains {
        if chain.is_empty() {
            return Verdict::EmptyChain { var };
        }
        for &node in chain {
            if node >= topo.nodes {
                return Verdict::UnknownNode { var, node };
            }
            if let Some(&other) = owner.get(&node) {
                return Verdict::OverlappingChains {
                    var_a: other.min(var),
                    var_b: other.max(var),
                };
            }
            owner.insert(node, var);
        }
    }

    // Chain connectivity via BFS within the chain's induced subgraph.
    for (&var, chain) in &e.chains {
        let start = *chain.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            for &next in chain {
                if !seen.contains(&next) && topo.has_edge(node, next) {
                    seen.insert(next);
                    queue.push_back(next);
                }
            }
        }
        if seen.len() != chain.len() {
            return Verdict::DisconnectedChain { var };
        }
    }

    // Every nonzero logical edge needs a physical coupler between chains.
    for (&(i, j), &coeff) in &logical.quadratic {
        if coeff == 0.0 {
            continue;
        }
        let (Some(chain_i), Some(chain_j)) = (e.chains.get(&i), e.chains.get(&j)) else {
            return Verdict::MissingCoupler { var_a: i, var_b: j };
        };
        let coupled = chain_i
            .iter()
            .any(|&a| chain_j.iter().any(|&b| topo.has_edge(a, b)));
        if !coupled {
            return Verdict::MissingCoupler { var_a: i, var_b: j };
        }
    }
    Verdict::Pass
}

/// Complete logical graph on n variables with unit couplings, the shape of
/// assembled selection QUBOs.
pub fn complete_logical(n: usize) -> Qubo {
    let mut q = Qubo::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            q.add_quadratic(i, j, 1.0);
        }
    }
    q
}

/// Per-size embedding report row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbedStudyRow {
    pub problem_size: usize,
    pub physical_qubits: usize,
    pub max_chain: usize,
}

/// Run the qubit-growth study over the given problem sizes.
pub fn embed_study(sizes: &[usize]) -> Result<Vec<EmbedStudyRow>> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let topo = build_chimera(n.div_ceil(4))?;
        let embedding = embed_clique(n, &topo)?;
        let (physical_qubits, max_chain, _) = embedding_stats(&embedding);
        rows.push(EmbedStudyRow {
            problem_size: n,
            physical_qubits,
            max_chain,
        });
    }
    Ok(rows)
}

/// Fixed-format table export mirroring the per-size NQ report.
pub fn embed_study_table(rows: &[EmbedStudyRow]) -> String {
    let mut out = String::from("problem_size,physical_qubits,max_chain\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.problem_size, row.physical_qubits, row.max_chain
        ));
    }
    out
}

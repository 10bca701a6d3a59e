//! Graph states, their stabilizer generators, and parity-measurement fusion.
//!
//! A graph state puts every qubit in |+> and applies a controlled-Z along
//! each edge. Measuring the parity of two nonadjacent vertices and then
//! rotating the first fuses the graph: the second vertex inherits the
//! first's edges modulo 2 and the first becomes a leaf hanging off it.
//! Both outcomes reach the same graph after a known Pauli correction, so
//! the fusion is deterministic.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::exec::execute_all_branches;
use crate::pauli::{apply_pauli_string, BinaryVector, PauliString};
use crate::state::{PureState, QubitRegister};
use crate::{MAX_QUBITS, PROB_TOL};

/// Simple undirected graph: no loops, no multi-edges. Vertices are
/// 0-based indices; edges are stored with the smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(Graph {
            n,
            edges: BTreeSet::new(),
        })
    }

    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut graph = Graph::empty(n)?;
        for (u, v) in edges {
            graph.add_edge(u, v)?;
        }
        Ok(graph)
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(usize, usize)> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::BadEdge(u, v));
        }
        Ok((u.min(v), u.max(v)))
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let key = self.check_pair(u, v)?;
        if !self.edges.insert(key) {
            return Err(Error::EdgePresent(key.0, key.1));
        }
        Ok(())
    }

    /// Adds the edge if absent, removes it if present.
    pub fn toggle_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let key = self.check_pair(u, v)?;
        if !self.edges.insert(key) {
            self.edges.remove(&key);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Register with one qubit per vertex, labeled v0, v1, ...
    pub fn register(&self) -> Result<QubitRegister> {
        let labels: Vec<String> = (0..self.n).map(|v| format!("v{v}")).collect();
        QubitRegister::from_labels(&labels)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        Graph::new(raw.n, raw.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(deserializer)?;
        Graph::new(raw.n, raw.edges.into_iter().map(|[u, v]| (u, v)))
            .map_err(serde::de::Error::custom)
    }
}

/// The graph state: controlled-Z along every edge applied to |+>^n.
/// Amplitudes are uniform with a sign counting edges inside each bitstring.
pub fn graph_state(g: &Graph) -> Result<PureState> {
    if g.n > MAX_QUBITS {
        return Err(Error::TooManyQubits(g.n));
    }
    let register = g.register()?;
    let dim = 1usize << g.n;
    let scale = 1.0 / (dim as f64).sqrt();
    let masks: Vec<usize> = g
        .edges
        .iter()
        .map(|&(u, v)| (1usize << (g.n - 1 - u)) | (1usize << (g.n - 1 - v)))
        .collect();
    let amps = (0..dim)
        .map(|idx| {
            let inside = masks.iter().filter(|&&m| idx & m == m).count();
            let sign = if inside % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * scale, 0.0)
        })
        .collect();
    PureState::from_amplitudes(register, amps)
}

/// Stabilizer generator for vertex v: X on v, Z on each neighbor.
pub fn vertex_stabilizer(g: &Graph, v: usize) -> Result<PauliString> {
    if v >= g.n {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n });
    }
    let mut x = BinaryVector::zeros(g.n);
    x.set(v, 1);
    let mut z = BinaryVector::zeros(g.n);
    for u in g.neighbors(v) {
        z.set(u, 1);
    }
    PauliString::from_xz(&x, &z)
}

/// Largest amplitude deviation of K_v|state> from |state> over all
/// vertices. Zero exactly when the state is stabilized by the graph.
pub fn stabilizer_deviation(state: &PureState, g: &Graph) -> Result<f64> {
    if state.num_qubits() != g.n {
        return Err(Error::LengthMismatch {
            operator: g.n,
            state: state.num_qubits(),
        });
    }
    let mut worst = 0.0f64;
    for v in 0..g.n {
        let moved = apply_pauli_string(state, &vertex_stabilizer(g, v)?)?;
        worst = worst.max(state.max_amplitude_deviation(&moved)?);
    }
    Ok(worst)
}

/// True when every vertex stabilizer fixes the state to within 1e-9.
pub fn stabilizer_check(state: &PureState, g: &Graph) -> Result<bool> {
    Ok(stabilizer_deviation(state, g)? <= PROB_TOL)
}

#[derive(Clone, Debug)]
pub struct GraphFusion {
    pub graph: Graph,
    pub q1: usize,
    pub q2: usize,
    /// Predicted post-fusion graph: q2 inherits q1's edges modulo 2 and q1
    /// hangs off q2 as a leaf.
    pub fused: Graph,
    pub circuit: Circuit,
    pub branches: Vec<GraphFusionBranch>,
}

#[derive(Clone, Debug)]
pub struct GraphFusionBranch {
    pub parity: u8,
    pub probability: f64,
    /// State after the parity measurement and the rotation on q1.
    pub state: PureState,
    /// Pauli that maps `state` onto the fused graph state: X on q2 and Z
    /// on each of q2's former neighbors, present only in the odd branch.
    pub correction: PauliString,
    /// `correction` applied to `state`.
    pub corrected: PureState,
}

/// Fuses two nonadjacent vertices of a graph state: parity measurement on
/// (q1, q2), Hadamard on q1. Returns both branches with the correction
/// that lands each on the predicted fused graph state.
pub fn parity_fuse(g: &Graph, q1: usize, q2: usize) -> Result<GraphFusion> {
    for v in [q1, q2] {
        if v >= g.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n });
        }
    }
    if q1 == q2 {
        return Err(Error::SameQubit(format!("v{q1}")));
    }
    if g.has_edge(q1, q2) {
        return Err(Error::EdgePresent(q1.min(q2), q1.max(q2)));
    }

    let mut fused = g.clone();
    let old_neighbors_q2 = g.neighbors(q2);
    for u in g.neighbors(q1) {
        fused.toggle_edge(q1, u)?;
        if u != q2 {
            fused.toggle_edge(q2, u)?;
        }
    }
    fused.add_edge(q1, q2)?;

    let register = g.register()?;
    let mut b = Circuit::builder(register);
    b.parity(format!("v{q1}"), format!("v{q2}"), "p")
        .h(format!("v{q1}"));
    let circuit = b.finish().expect("vertex labels are distinct");

    let input = graph_state(g)?;
    let mut correction_z = BinaryVector::zeros(g.n);
    for u in &old_neighbors_q2 {
        correction_z.set(*u, 1);
    }
    let mut correction_x = BinaryVector::zeros(g.n);
    correction_x.set(q2, 1);
    let odd_correction = PauliString::from_xz(&correction_x, &correction_z)?;

    let branches = execute_all_branches(&circuit, &input)?
        .into_iter()
        .map(|r| {
            let parity = r.outcomes["p"];
            let correction = if parity == 1 {
                odd_correction.clone()
            } else {
                PauliString::identity(g.n)
            };
            let corrected = apply_pauli_string(&r.state, &correction)?;
            Ok(GraphFusionBranch {
                parity,
                probability: r.probability,
                state: r.state,
                correction,
                corrected,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GraphFusion {
        graph: g.clone(),
        q1,
        q2,
        fused,
        circuit,
        branches,
    })
}

/// Seeded random graph on n vertices, each possible edge kept with the
/// given probability.
pub fn random_graph(n: usize, edge_probability: f64, rng: &mut impl rand::Rng) -> Result<Graph> {
    let mut g = Graph::empty(n)?;
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < edge_probability {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

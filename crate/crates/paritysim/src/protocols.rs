//! Entangling protocols built from parity measurements and feed-forward.
//!
//! Every protocol returns its circuit (corrections included as conditioned
//! gates), the concrete input state it was set up with, and the full branch
//! enumeration. Branch structs expose the pre-correction state alongside
//! the corrected one so callers can check both forms.

use crate::circuit::{BitExpr, Circuit};
use crate::error::{Error, Result};
use crate::exec::execute_traced;
use crate::pauli::BinaryVector;
use crate::state::{bell_state_on, ghz_state_on, PureState, QubitRegister};
use crate::MAX_QUBITS;

fn reg(labels: &[&str]) -> QubitRegister {
    QubitRegister::from_labels(labels).expect("fixed labels")
}

fn labels(prefix: &str, from: usize, to: usize) -> Vec<String> {
    (from..=to).map(|i| format!("{prefix}{i}")).collect()
}

/// Bell preparation from a computational basis input |x y>: measure the
/// parity after a Hadamard on each qubit, then flip the second qubit when
/// the odd branch occurred.
#[derive(Clone, Debug)]
pub struct BellPrep {
    pub x: u8,
    pub y: u8,
    pub circuit: Circuit,
    pub input: PureState,
    pub branches: Vec<BellPrepBranch>,
}

#[derive(Clone, Debug)]
pub struct BellPrepBranch {
    pub parity: u8,
    pub probability: f64,
    /// State right after the parity measurement.
    pub raw: PureState,
    /// State after the feed-forward X on the second qubit.
    pub corrected: PureState,
}

impl BellPrep {
    /// The state every corrected branch should reach.
    pub fn target(&self) -> PureState {
        bell_state_on(self.circuit.register().clone(), 0, self.x ^ self.y)
            .expect("two-qubit register")
    }
}

pub fn prepare_bell(x: u8, y: u8) -> BellPrep {
    let (x, y) = (x & 1, y & 1);
    let register = reg(&["q1", "q2"]);
    let mut b = Circuit::builder(register.clone());
    b.h("q1")
        .h("q2")
        .parity("q1", "q2", "p")
        .x_if("q2", BitExpr::bit("p"));
    let circuit = b.finish().expect("static circuit");
    let input = PureState::basis(register, &BinaryVector::new(vec![x, y]))
        .expect("two bits for two qubits");
    let traced =
        execute_traced(&circuit, &input, &[2]).expect("basis input on matching register");
    let branches = traced
        .into_iter()
        .map(|t| BellPrepBranch {
            parity: t.result.outcomes["p"],
            probability: t.result.probability,
            raw: t.snapshots.into_iter().next().expect("one snapshot"),
            corrected: t.result.state,
        })
        .collect();
    BellPrep {
        x,
        y,
        circuit,
        input,
        branches,
    }
}

/// Which form of the Bell analyzer to run. Both measure parity, rotate,
/// and measure parity again; the four-Hadamard form undoes the rotation so
/// Bell inputs come out untouched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyzerVariant {
    TwoHadamard,
    FourHadamard,
}

#[derive(Clone, Debug)]
pub struct BellAnalysis {
    pub variant: AnalyzerVariant,
    pub circuit: Circuit,
    pub input: PureState,
    pub branches: Vec<AnalyzerBranch>,
}

#[derive(Clone, Debug)]
pub struct AnalyzerBranch {
    /// Parity bit of the Bell family, read by the first measurement.
    pub parity: u8,
    /// Sign bit, read by the second measurement.
    pub sign: u8,
    pub probability: f64,
    pub state: PureState,
}

/// Nondestructive Bell-state analysis of a two-qubit state. On a Bell
/// input both outcomes are deterministic and name the state: parity i and
/// sign j identify |B_ij>.
pub fn bell_analyzer(input: &PureState, variant: AnalyzerVariant) -> Result<BellAnalysis> {
    if input.num_qubits() != 2 {
        return Err(Error::LengthMismatch {
            operator: input.num_qubits(),
            state: 2,
        });
    }
    let register = input.register().clone();
    let labels: Vec<String> = register.labels().map(str::to_string).collect();
    let (a, b) = (labels[0].as_str(), labels[1].as_str());
    let mut builder = Circuit::builder(register);
    builder
        .parity(a, b, "i")
        .h(a)
        .h(b)
        .parity(a, b, "j");
    if variant == AnalyzerVariant::FourHadamard {
        builder.h(a).h(b);
    }
    let circuit = builder.finish().expect("labels come from the register");
    let branches = execute_traced(&circuit, input, &[])?
        .into_iter()
        .map(|t| AnalyzerBranch {
            parity: t.result.outcomes["i"],
            sign: t.result.outcomes["j"],
            probability: t.result.probability,
            state: t.result.state,
        })
        .collect();
    Ok(BellAnalysis {
        variant,
        circuit,
        input: input.clone(),
        branches,
    })
}

/// Teleportation of a single-qubit state through a shared |B_00> pair.
/// Alice holds the payload a1 and pair half a2; Bob holds b.
#[derive(Clone, Debug)]
pub struct Teleportation {
    pub circuit: Circuit,
    pub input: PureState,
    /// The payload, relabeled onto Bob's wire for fidelity checks.
    pub payload_on_b: PureState,
    pub branches: Vec<TeleportBranch>,
}

#[derive(Clone, Debug)]
pub struct TeleportBranch {
    pub p1: u8,
    pub p2: u8,
    pub probability: f64,
    /// Full three-qubit state before Bob's corrections.
    pub raw: PureState,
    /// Alice's residual pair, extracted from `raw`.
    pub alice_pair: PureState,
    /// Bob's wire before corrections, extracted from `raw`.
    pub bob_raw: PureState,
    /// Full three-qubit state after Bob's corrections.
    pub corrected: PureState,
    /// Bob's wire after corrections.
    pub bob_corrected: PureState,
}

pub fn teleport(payload: &PureState) -> Result<Teleportation> {
    if payload.num_qubits() != 1 {
        return Err(Error::LengthMismatch {
            operator: payload.num_qubits(),
            state: 1,
        });
    }
    let register = reg(&["a1", "a2", "b"]);
    let mut b = Circuit::builder(register.clone());
    b.parity("a1", "a2", "p1")
        .h("a1")
        .h("a2")
        .parity("a1", "a2", "p2")
        .x_if("b", BitExpr::bit("p1"))
        .z_if("b", BitExpr::bit("p2"));
    let circuit = b.finish().expect("static circuit");
    let pair = bell_state_on(reg(&["a2", "b"]), 0, 0).expect("two-qubit register");
    let input = payload.relabeled(reg(&["a1"]))?.tensor(&pair)?;
    let traced = execute_traced(&circuit, &input, &[3])?;
    let mut branches = Vec::with_capacity(traced.len());
    for t in traced {
        let raw = t.snapshots.into_iter().next().expect("one snapshot");
        let (alice_pair, bob_raw) = raw.split_at(2)?;
        let corrected = t.result.state;
        let (_, bob_corrected) = corrected.split_at(2)?;
        branches.push(TeleportBranch {
            p1: t.result.outcomes["p1"],
            p2: t.result.outcomes["p2"],
            probability: t.result.probability,
            raw,
            alice_pair,
            bob_raw,
            corrected,
            bob_corrected,
        });
    }
    Ok(Teleportation {
        circuit,
        input,
        payload_on_b: payload.relabeled(reg(&["b"]))?,
        branches,
    })
}

/// GHZ preparation on a chain: Hadamards everywhere, parity measurements on
/// adjacent pairs, then feed-forward X flips.
#[derive(Clone, Debug)]
pub struct GhzChain {
    pub n: usize,
    pub circuit: Circuit,
    pub input: PureState,
    pub branches: Vec<GhzChainBranch>,
}

#[derive(Clone, Debug)]
pub struct GhzChainBranch {
    /// Parity outcomes p_2..p_n in chain order.
    pub parities: Vec<u8>,
    /// Cumulative flip pattern j: j_1 = 0, j_i = j_{i-1} xor p_i.
    pub flips: BinaryVector,
    pub probability: f64,
    /// State after the last parity measurement.
    pub raw: PureState,
    /// State after the feed-forward flips.
    pub corrected: PureState,
}

impl GhzChain {
    pub fn target(&self) -> PureState {
        ghz_state_on(self.circuit.register().clone()).expect("register prebuilt")
    }
}

/// The chain circuit alone: Hadamards, the parity chain, and the
/// feed-forward flips, without running anything.
pub fn ghz_chain_circuit(n: usize) -> Result<Circuit> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::SizeOutOfRange {
            what: "chain length",
            value: n,
            min: 2,
            max: MAX_QUBITS,
        });
    }
    let names = labels("q", 1, n);
    let register = QubitRegister::from_labels(&names)?;
    let mut b = Circuit::builder(register);
    for q in &names {
        b.h(q);
    }
    for i in 2..=n {
        b.parity(format!("q{}", i - 1), format!("q{i}"), format!("p{i}"));
    }
    // q_i is flipped when j_i = p_2 xor ... xor p_i is one.
    for i in 2..=n {
        let cond = BitExpr::xor_of(&labels("p", 2, i));
        b.x_if(format!("q{i}"), cond);
    }
    Ok(b.finish().expect("labels generated together"))
}

pub fn ghz_chain(n: usize) -> Result<GhzChain> {
    let circuit = ghz_chain_circuit(n)?;
    let input = PureState::zero(circuit.register().clone());
    let last_parity_step = (n - 1) + (n - 1);
    let traced = execute_traced(&circuit, &input, &[last_parity_step])?;
    let branches = traced
        .into_iter()
        .map(|t| {
            let parities: Vec<u8> = (2..=n).map(|i| t.result.outcomes[&format!("p{i}")]).collect();
            let mut flips = vec![0u8; n];
            for i in 1..n {
                flips[i] = flips[i - 1] ^ parities[i - 1];
            }
            GhzChainBranch {
                parities,
                flips: BinaryVector::new(flips),
                probability: t.result.probability,
                raw: t.snapshots.into_iter().next().expect("one snapshot"),
                corrected: t.result.state,
            }
        })
        .collect();
    Ok(GhzChain {
        n,
        circuit,
        input,
        branches,
    })
}

/// Fusion of GHZ_n and GHZ_m into GHZ_{n+m} with one parity measurement at
/// the seam and feed-forward flips on the second block.
#[derive(Clone, Debug)]
pub struct GhzFusion {
    pub n: usize,
    pub m: usize,
    pub circuit: Circuit,
    pub input: PureState,
    pub branches: Vec<GhzFusionBranch>,
}

#[derive(Clone, Debug)]
pub struct GhzFusionBranch {
    pub parity: u8,
    pub probability: f64,
    pub raw: PureState,
    pub corrected: PureState,
}

impl GhzFusion {
    pub fn target(&self) -> PureState {
        ghz_state_on(self.circuit.register().clone()).expect("register prebuilt")
    }
}

pub fn ghz_fusion(n: usize, m: usize) -> Result<GhzFusion> {
    for (what, value) in [("first block", n), ("second block", m)] {
        if value < 2 {
            return Err(Error::SizeOutOfRange {
                what,
                value,
                min: 2,
                max: MAX_QUBITS,
            });
        }
    }
    if n + m > MAX_QUBITS {
        return Err(Error::TooManyQubits(n + m));
    }
    let names = labels("q", 1, n + m);
    let register = QubitRegister::from_labels(&names)?;
    let first = ghz_state_on(QubitRegister::from_labels(&names[..n])?)?;
    let second = ghz_state_on(QubitRegister::from_labels(&names[n..])?)?;
    let input = first.tensor(&second)?;
    let mut b = Circuit::builder(register);
    b.parity(format!("q{n}"), format!("q{}", n + 1), "p");
    for name in &names[n..] {
        b.x_if(name.clone(), BitExpr::bit("p"));
    }
    let circuit = b.finish().expect("labels generated together");
    let traced = execute_traced(&circuit, &input, &[0])?;
    let branches = traced
        .into_iter()
        .map(|t| GhzFusionBranch {
            parity: t.result.outcomes["p"],
            probability: t.result.probability,
            raw: t.snapshots.into_iter().next().expect("one snapshot"),
            corrected: t.result.state,
        })
        .collect();
    Ok(GhzFusion {
        n,
        m,
        circuit,
        input,
        branches,
    })
}

/// Controlled-Z between two qubits mediated by a (|0>+|1>)/sqrt(2) ancilla:
/// two parity measurements around ancilla Hadamards, a destructive ancilla
/// readout, and Z corrections on both data qubits.
#[derive(Clone, Debug)]
pub struct CzViaParity {
    pub circuit: Circuit,
    pub input: PureState,
    /// CZ applied directly to the payload, for comparison.
    pub target: PureState,
    pub branches: Vec<CzBranch>,
}

#[derive(Clone, Debug)]
pub struct CzBranch {
    pub p1: u8,
    pub p2: u8,
    /// Ancilla readout bit.
    pub a: u8,
    pub probability: f64,
    /// Three-qubit state after the ancilla readout, before corrections.
    pub raw: PureState,
    /// Two-qubit state after corrections and ancilla discard.
    pub corrected: PureState,
}

pub fn cz_via_parity(payload: &PureState) -> Result<CzViaParity> {
    if payload.num_qubits() != 2 {
        return Err(Error::LengthMismatch {
            operator: payload.num_qubits(),
            state: 2,
        });
    }
    let register = reg(&["q1", "anc", "q2"]);
    let mut b = Circuit::builder(register.clone());
    b.mark_ancilla("anc");
    b.h("anc")
        .parity("q1", "anc", "p1")
        .h("anc")
        .parity("anc", "q2", "p2")
        .h("anc")
        .measure_z("anc", "a")
        .z_if("q1", BitExpr::bit("p2"))
        .z_if("q2", BitExpr::parse("p1^a").expect("static expression"))
        .discard("anc");
    let circuit = b.finish().expect("static circuit");
    let data = payload.relabeled(reg(&["q1", "q2"]))?;
    let target = crate::exec::apply_gate(
        &data,
        &crate::circuit::Gate::cz("q1", "q2"),
        &Default::default(),
    )?;
    let input = data
        .tensor(&PureState::zero(reg(&["anc"])))?
        .permuted(&["q1", "anc", "q2"])?;
    let traced = execute_traced(&circuit, &input, &[5])?;
    let branches = traced
        .into_iter()
        .map(|t| CzBranch {
            p1: t.result.outcomes["p1"],
            p2: t.result.outcomes["p2"],
            a: t.result.outcomes["a"],
            probability: t.result.probability,
            raw: t.snapshots.into_iter().next().expect("one snapshot"),
            corrected: t.result.state,
        })
        .collect();
    Ok(CzViaParity {
        circuit,
        input,
        target,
        branches,
    })
}

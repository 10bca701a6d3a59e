//! Circuit execution on dense statevectors.
//!
//! Measurements branch the run. `execute_all_branches` walks every branch
//! depth-first (outcome 0 before 1) and prunes branches whose cumulative
//! probability falls below `PRUNE_EPS`; `execute_sample` draws one branch
//! with a seeded RNG. Unitary steps never renormalize; normalization is
//! re-imposed only after measurement projections.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{Circuit, Gate, GateKind, Step};
use crate::error::{Error, Result};
use crate::state::{PureState, QubitRegister};
use crate::{seeded_rng, PRUNE_EPS};

/// One leaf of the branch tree: the classical outcome record, the joint
/// probability of reaching it, and the final state.
#[derive(Clone, Debug)]
pub struct BranchResult {
    pub outcomes: BTreeMap<String, u8>,
    pub probability: f64,
    pub state: PureState,
}

/// Branch result plus state snapshots taken right after selected steps.
#[derive(Clone, Debug)]
pub struct TracedBranch {
    pub result: BranchResult,
    pub snapshots: Vec<PureState>,
}

/// Applies one gate, honoring its classical condition against `bits`.
pub fn apply_gate(state: &PureState, gate: &Gate, bits: &BTreeMap<String, u8>) -> Result<PureState> {
    if let Some(cond) = &gate.condition {
        if cond.eval(bits)? == 0 {
            return Ok(state.clone());
        }
    }
    if gate.qubits.len() != gate.kind.arity() {
        return Err(Error::LengthMismatch {
            operator: gate.qubits.len(),
            state: gate.kind.arity(),
        });
    }
    let n = state.num_qubits();
    let dim = state.amplitudes().len();
    let pos: Vec<usize> = gate
        .qubits
        .iter()
        .map(|q| state.register().require(q))
        .collect::<Result<_>>()?;
    if pos.len() == 2 && pos[0] == pos[1] {
        return Err(Error::SameQubit(gate.qubits[0].clone()));
    }
    let mut amps = state.amplitudes().to_vec();
    match &gate.kind {
        GateKind::H => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            apply_1q(&mut amps, n, pos[0], |a, b| (s * (a + b), s * (a - b)));
        }
        GateKind::X => {
            apply_1q(&mut amps, n, pos[0], |a, b| (b, a));
        }
        GateKind::Z => {
            let mask = mask(n, pos[0]);
            for (idx, a) in amps.iter_mut().enumerate() {
                if idx & mask != 0 {
                    *a = -*a;
                }
            }
        }
        GateKind::ZRot(phi) => {
            let plus = Complex64::from_polar(1.0, *phi);
            let minus = plus.conj();
            let mask = mask(n, pos[0]);
            for (idx, a) in amps.iter_mut().enumerate() {
                *a *= if idx & mask == 0 { plus } else { minus };
            }
        }
        GateKind::Cnot => {
            let control = mask(n, pos[0]);
            let target = mask(n, pos[1]);
            for idx in 0..dim {
                if idx & control != 0 && idx & target == 0 {
                    amps.swap(idx, idx | target);
                }
            }
        }
        GateKind::Cz => {
            let m1 = mask(n, pos[0]);
            let m2 = mask(n, pos[1]);
            for (idx, a) in amps.iter_mut().enumerate() {
                if idx & m1 != 0 && idx & m2 != 0 {
                    *a = -*a;
                }
            }
        }
        GateKind::ControlledU(m) => {
            let control = mask(n, pos[0]);
            let target = mask(n, pos[1]);
            for idx in 0..dim {
                if idx & control != 0 && idx & target == 0 {
                    let j = idx | target;
                    let (a, b) = (amps[idx], amps[j]);
                    amps[idx] = m[0][0] * a + m[0][1] * b;
                    amps[j] = m[1][0] * a + m[1][1] * b;
                }
            }
        }
    }
    Ok(PureState::from_parts(state.register().clone(), amps))
}

fn mask(n: usize, position: usize) -> usize {
    1usize << (n - 1 - position)
}

fn apply_1q<F>(amps: &mut [Complex64], n: usize, position: usize, f: F)
where
    F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
{
    let m = mask(n, position);
    for idx in 0..amps.len() {
        if idx & m == 0 {
            let j = idx | m;
            let (a, b) = f(amps[idx], amps[j]);
            amps[idx] = a;
            amps[j] = b;
        }
    }
}

/// One branch of a projective measurement.
#[derive(Clone, Debug)]
pub struct MeasureOutcome {
    pub value: u8,
    pub probability: f64,
    pub state: PureState,
}

/// Nondestructive joint parity measurement of two qubits. Returns the
/// surviving branches (at most two); a state already of definite parity
/// comes back bitwise unchanged in its single branch.
pub fn parity_measure(state: &PureState, q1: &str, q2: &str) -> Result<Vec<MeasureOutcome>> {
    if q1 == q2 {
        return Err(Error::SameQubit(q1.to_string()));
    }
    let n = state.num_qubits();
    let m1 = mask(n, state.register().require(q1)?);
    let m2 = mask(n, state.register().require(q2)?);
    project(state, |idx| u8::from((idx & m1 != 0) ^ (idx & m2 != 0)))
}

/// Computational-basis measurement of one qubit; the qubit stays in the
/// register, collapsed onto the observed value.
pub fn measure_z(state: &PureState, q: &str) -> Result<Vec<MeasureOutcome>> {
    let n = state.num_qubits();
    let m = mask(n, state.register().require(q)?);
    project(state, |idx| u8::from(idx & m != 0))
}

fn project<F: Fn(usize) -> u8>(state: &PureState, outcome_of: F) -> Result<Vec<MeasureOutcome>> {
    let mut probs = [0.0f64; 2];
    for (idx, a) in state.amplitudes().iter().enumerate() {
        probs[outcome_of(idx) as usize] += a.norm_sqr();
    }
    let mut branches = Vec::new();
    for value in 0..2u8 {
        let probability = probs[value as usize];
        if probability < PRUNE_EPS {
            continue;
        }
        let mut amps = state.amplitudes().to_vec();
        for (idx, a) in amps.iter_mut().enumerate() {
            if outcome_of(idx) != value {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        // Skip renormalization when the state already lies in the outcome
        // subspace so such states pass through bitwise unchanged.
        if (1.0 - probability).abs() >= PRUNE_EPS {
            let scale = 1.0 / probability.sqrt();
            for a in &mut amps {
                *a *= scale;
            }
        }
        branches.push(MeasureOutcome {
            value,
            probability,
            state: PureState::from_parts(state.register().clone(), amps),
        });
    }
    Ok(branches)
}

/// Drops a qubit that is in a definite computational basis state, shrinking
/// the register by one.
pub fn discard(state: &PureState, q: &str) -> Result<PureState> {
    let n = state.num_qubits();
    let position = state.register().require(q)?;
    if n == 1 {
        return Err(Error::EmptyRegister);
    }
    let m = mask(n, position);
    let prob_one: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx & m != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let value = if prob_one < PRUNE_EPS {
        0usize
    } else if (1.0 - prob_one).abs() < PRUNE_EPS {
        1usize
    } else {
        return Err(Error::QubitNotDefinite(q.to_string()));
    };
    let shift = n - 1 - position;
    let low = m - 1;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (n - 1)];
    for (idx, a) in state.amplitudes().iter().enumerate() {
        if (idx & m != 0) == (value == 1) {
            let new_idx = ((idx >> (shift + 1)) << shift) | (idx & low);
            amps[new_idx] = *a;
        }
    }
    let qubits: Vec<_> = state
        .register()
        .qubits()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != position)
        .map(|(_, qd)| qd.clone())
        .collect();
    Ok(PureState::from_parts(QubitRegister::new(qubits)?, amps))
}

/// Runs the circuit over every measurement branch.
pub fn execute_all_branches(circuit: &Circuit, input: &PureState) -> Result<Vec<BranchResult>> {
    Ok(execute_traced(circuit, input, &[])?
        .into_iter()
        .map(|t| t.result)
        .collect())
}

/// Like `execute_all_branches`, additionally recording the state right
/// after each step index listed in `snapshot_after` (per branch, in the
/// order given).
pub fn execute_traced(
    circuit: &Circuit,
    input: &PureState,
    snapshot_after: &[usize],
) -> Result<Vec<TracedBranch>> {
    if input.register() != circuit.register() {
        return Err(Error::RegisterMismatch);
    }
    let mut leaves = Vec::new();
    walk(
        circuit.steps(),
        0,
        input.clone(),
        BTreeMap::new(),
        1.0,
        snapshot_after,
        Vec::new(),
        &mut leaves,
    )?;
    Ok(leaves)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    steps: &[Step],
    idx: usize,
    state: PureState,
    outcomes: BTreeMap<String, u8>,
    probability: f64,
    snapshot_after: &[usize],
    snapshots: Vec<PureState>,
    leaves: &mut Vec<TracedBranch>,
) -> Result<()> {
    if idx == steps.len() {
        leaves.push(TracedBranch {
            result: BranchResult {
                outcomes,
                probability,
                state,
            },
            snapshots,
        });
        return Ok(());
    }
    let snap = |snapshots: &Vec<PureState>, state: &PureState| {
        let mut next = snapshots.clone();
        if snapshot_after.contains(&idx) {
            next.push(state.clone());
        }
        next
    };
    match &steps[idx] {
        Step::Gate(gate) => {
            let next = apply_gate(&state, gate, &outcomes)?;
            let snaps = snap(&snapshots, &next);
            walk(steps, idx + 1, next, outcomes, probability, snapshot_after, snaps, leaves)
        }
        Step::Parity { q1, q2, out } => {
            for branch in parity_measure(&state, q1, q2)? {
                let mut bits = outcomes.clone();
                bits.insert(out.clone(), branch.value);
                let snaps = snap(&snapshots, &branch.state);
                walk(
                    steps,
                    idx + 1,
                    branch.state,
                    bits,
                    probability * branch.probability,
                    snapshot_after,
                    snaps,
                    leaves,
                )?;
            }
            Ok(())
        }
        Step::MeasureZ { q, out } => {
            for branch in measure_z(&state, q)? {
                let mut bits = outcomes.clone();
                bits.insert(out.clone(), branch.value);
                let snaps = snap(&snapshots, &branch.state);
                walk(
                    steps,
                    idx + 1,
                    branch.state,
                    bits,
                    probability * branch.probability,
                    snapshot_after,
                    snaps,
                    leaves,
                )?;
            }
            Ok(())
        }
        Step::Discard { q } => {
            let next = discard(&state, q)?;
            let snaps = snap(&snapshots, &next);
            walk(steps, idx + 1, next, outcomes, probability, snapshot_after, snaps, leaves)
        }
    }
}

/// Runs the circuit once, drawing measurement outcomes from a ChaCha8 RNG
/// seeded with `seed`. The same circuit, input, and seed always produce the
/// same branch.
pub fn execute_sample(circuit: &Circuit, input: &PureState, seed: u64) -> Result<BranchResult> {
    if input.register() != circuit.register() {
        return Err(Error::RegisterMismatch);
    }
    let mut rng = seeded_rng(seed);
    let mut state = input.clone();
    let mut outcomes: BTreeMap<String, u8> = BTreeMap::new();
    let mut probability = 1.0;
    for step in circuit.steps() {
        match step {
            Step::Gate(gate) => {
                state = apply_gate(&state, gate, &outcomes)?;
            }
            Step::Parity { q1, q2, out } => {
                let branches = parity_measure(&state, q1, q2)?;
                let chosen = pick(&branches, &mut rng);
                outcomes.insert(out.clone(), chosen.value);
                probability *= chosen.probability;
                state = chosen.state.clone();
            }
            Step::MeasureZ { q, out } => {
                let branches = measure_z(&state, q)?;
                let chosen = pick(&branches, &mut rng);
                outcomes.insert(out.clone(), chosen.value);
                probability *= chosen.probability;
                state = chosen.state.clone();
            }
            Step::Discard { q } => {
                state = discard(&state, q)?;
            }
        }
    }
    Ok(BranchResult {
        outcomes,
        probability,
        state,
    })
}

fn pick<'a, R: Rng>(branches: &'a [MeasureOutcome], rng: &mut R) -> &'a MeasureOutcome {
    debug_assert!(!branches.is_empty());
    if branches.len() == 1 {
        return &branches[0];
    }
    let r: f64 = rng.gen();
    if r < branches[0].probability {
        &branches[0]
    } else {
        &branches[1]
    }
}

//! Spin-mode networks: two qubits per electron, with parity measurements
//! restricted to mode-qubit pairs.
//!
//! Each electron carries a spin qubit (up = 0, down = 1) and a mode qubit.
//! Charge superselection means joint measurements happen on modes, so every
//! parity measurement built here touches mode qubits only; spins are acted
//! on by local gates and classical feed-forward. The module covers the
//! single-electron spin-mode EPR preparation, the two-electron swap, the
//! n-electron double-chain GHZ protocol, and a controlled-Z on spins that
//! uses the mode pair as a reusable ancilla.

use crate::circuit::{BitExpr, Circuit, Gate, Step};
use crate::error::{Error, Result};
use crate::exec::{apply_gate, execute_all_branches, execute_traced};
use crate::pauli::BinaryVector;
use crate::state::{
    bell_state_on, fidelity, ghz_state_on, PureState, QubitDescriptor, QubitRegister, QubitRole,
};
use crate::{MAX_QUBITS, PROB_TOL};

/// Register layout for n electrons: spin qubits s1..sn first, then mode
/// qubits k1..kn, with electron indices recorded on every descriptor.
#[derive(Clone, Debug)]
pub struct ElectronArray {
    register: QubitRegister,
    n: usize,
}

impl ElectronArray {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || 2 * n > MAX_QUBITS {
            return Err(Error::SizeOutOfRange {
                what: "electron count",
                value: n,
                min: 1,
                max: MAX_QUBITS / 2,
            });
        }
        let mut qubits = Vec::with_capacity(2 * n);
        for i in 1..=n {
            qubits.push(QubitDescriptor::spin(format!("s{i}")).with_electron(i));
        }
        for i in 1..=n {
            qubits.push(QubitDescriptor::mode(format!("k{i}")).with_electron(i));
        }
        Ok(ElectronArray {
            register: QubitRegister::new(qubits)?,
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn register(&self) -> &QubitRegister {
        &self.register
    }

    /// Spin label of electron i (1-based).
    pub fn spin_label(&self, i: usize) -> String {
        format!("s{i}")
    }

    /// Mode label of electron i (1-based).
    pub fn mode_label(&self, i: usize) -> String {
        format!("k{i}")
    }
}

/// True when every parity measurement in the circuit acts on a pair of
/// mode-role qubits. Local gates and spin feed-forward are unrestricted.
pub fn parities_touch_modes_only(circuit: &Circuit) -> bool {
    let register = circuit.register();
    let is_mode = |label: &str| {
        register
            .index_of(label)
            .map(|i| register.qubits()[i].role == QubitRole::Mode)
            .unwrap_or(false)
    };
    circuit.steps().iter().all(|step| match step {
        Step::Parity { q1, q2, .. } => is_mode(q1) && is_mode(q2),
        _ => true,
    })
}

/// The two gates that entangle one electron's spin with its mode: a
/// Hadamard on the mode, then a spin flip controlled by the mode.
pub fn epr_preparation_steps(array: &ElectronArray, i: usize) -> Vec<Gate> {
    vec![
        Gate::h(array.mode_label(i)),
        Gate::cnot(array.mode_label(i), array.spin_label(i)),
    ]
}

fn weight_outside_zero(state: &PureState, positions: &[usize]) -> f64 {
    let n = state.num_qubits();
    let mask: usize = positions.iter().map(|&p| 1usize << (n - 1 - p)).sum();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Puts electron i into (|up 0> + |down 1>)/sqrt(2). The electron must
/// currently be in |up 0>; preparation is not idempotent, so this entry
/// point checks.
pub fn prepare_spin_mode_epr(
    state: &PureState,
    array: &ElectronArray,
    i: usize,
) -> Result<PureState> {
    let register = state.register();
    let spin = register.require(&array.spin_label(i))?;
    let mode = register.require(&array.mode_label(i))?;
    if weight_outside_zero(state, &[spin, mode]) > PROB_TOL {
        return Err(Error::Precondition(format!(
            "electron {i} is not in the spin-up, mode-0 state"
        )));
    }
    let mut out = state.clone();
    for gate in epr_preparation_steps(array, i) {
        out = apply_gate(&out, &gate, &Default::default())?;
    }
    Ok(out)
}

/// Double-chain GHZ protocol on n electrons: entangle each electron,
/// fuse the modes into one big GHZ with a parity chain, rotate the modes,
/// and run a second chain to split spins from modes. Feed-forward leaves
/// GHZ_n on the spins and GHZ_n on the modes in every branch.
#[derive(Clone, Debug)]
pub struct HybridGhz {
    pub n: usize,
    pub array: ElectronArray,
    pub circuit: Circuit,
    pub input: PureState,
    pub branches: Vec<HybridGhzBranch>,
}

#[derive(Clone, Debug)]
pub struct HybridGhzBranch {
    /// First-chain parities p_2..p_n.
    pub first_chain: Vec<u8>,
    /// Second-chain parities p'_2..p'_n.
    pub second_chain: Vec<u8>,
    /// j_i = p_2 xor ... xor p_i: flip pattern left by the first chain.
    pub flips: BinaryVector,
    /// m_i = p'_2 xor ... xor p'_i: flip pattern left by the second chain.
    pub mode_flips: BinaryVector,
    pub probability: f64,
    /// Snapshot after the first chain: the 2n-qubit GHZ up to X flips.
    pub after_first_chain: PureState,
    /// Snapshot after the second chain, before feed-forward.
    pub raw: PureState,
    pub corrected: PureState,
}

impl HybridGhz {
    /// GHZ_n on the spins tensor GHZ_n on the modes.
    pub fn target(&self) -> PureState {
        hybrid_target(&self.array).expect("array built with valid n")
    }

    /// The 2n-qubit GHZ that the first chain reaches up to X flips.
    pub fn merged_target(&self) -> PureState {
        ghz_state_on(self.array.register().clone()).expect("array register")
    }
}

fn hybrid_target(array: &ElectronArray) -> Result<PureState> {
    let n = array.n();
    let qubits = array.register().qubits();
    let spin_ghz = ghz_state_on(QubitRegister::new(qubits[..n].to_vec())?)?;
    let mode_ghz = ghz_state_on(QubitRegister::new(qubits[n..].to_vec())?)?;
    spin_ghz.tensor(&mode_ghz)
}

/// Parity-of-mode-flips exponent for the spin-1 Z correction: the XOR of
/// the second-chain outcomes p'_l with l matching n's parity.
fn spin_phase_condition(n: usize) -> BitExpr {
    let names: Vec<String> = (2..=n)
        .filter(|l| l % 2 == n % 2)
        .map(|l| format!("pp{l}"))
        .collect();
    BitExpr::xor_of(&names)
}

pub fn hybrid_ghz(n: usize) -> Result<HybridGhz> {
    if !(2..=10).contains(&n) {
        return Err(Error::SizeOutOfRange {
            what: "electron count",
            value: n,
            min: 2,
            max: 10,
        });
    }
    let array = ElectronArray::new(n)?;
    let mut b = Circuit::builder(array.register().clone());
    for i in 1..=n {
        b.h(array.mode_label(i));
        b.cnot(array.mode_label(i), array.spin_label(i));
    }
    for i in 2..=n {
        b.parity(array.mode_label(i - 1), array.mode_label(i), format!("p{i}"));
    }
    let first_chain_end = 2 * n + (n - 1) - 1;
    for i in 1..=n {
        b.h(array.mode_label(i));
    }
    // Odd chains pick up one extra entangling phase; a controlled-Z inside
    // electron 1 restores the even-length bookkeeping.
    if n % 2 == 1 {
        b.cz(array.spin_label(1), array.mode_label(1));
    }
    for i in 2..=n {
        b.parity(
            array.mode_label(i - 1),
            array.mode_label(i),
            format!("pp{i}"),
        );
    }
    let second_chain_end = first_chain_end + n + (n % 2) + (n - 1);
    for i in 2..=n {
        b.x_if(array.spin_label(i), BitExpr::xor_of(&p_names("p", i)));
    }
    b.z_if(array.spin_label(1), spin_phase_condition(n));
    for i in 2..=n {
        b.z_if(array.mode_label(i), BitExpr::xor_of(&p_names("p", i)));
    }
    for i in 2..=n {
        b.x_if(array.mode_label(i), BitExpr::xor_of(&p_names("pp", i)));
    }
    let circuit = b.finish().expect("labels from one array");
    debug_assert!(parities_touch_modes_only(&circuit));

    let input = PureState::zero(array.register().clone());
    let traced = execute_traced(&circuit, &input, &[first_chain_end, second_chain_end])?;
    let branches = traced
        .into_iter()
        .map(|t| {
            let first_chain: Vec<u8> =
                (2..=n).map(|i| t.result.outcomes[&format!("p{i}")]).collect();
            let second_chain: Vec<u8> =
                (2..=n).map(|i| t.result.outcomes[&format!("pp{i}")]).collect();
            let mut snaps = t.snapshots.into_iter();
            HybridGhzBranch {
                flips: cumulative_flips(&first_chain),
                mode_flips: cumulative_flips(&second_chain),
                first_chain,
                second_chain,
                probability: t.result.probability,
                after_first_chain: snaps.next().expect("two snapshots"),
                raw: snaps.next().expect("two snapshots"),
                corrected: t.result.state,
            }
        })
        .collect();
    Ok(HybridGhz {
        n,
        array,
        circuit,
        input,
        branches,
    })
}

fn p_names(prefix: &str, up_to: usize) -> Vec<String> {
    (2..=up_to).map(|l| format!("{prefix}{l}")).collect()
}

fn cumulative_flips(parities: &[u8]) -> BinaryVector {
    let mut bits = vec![0u8; parities.len() + 1];
    for (i, p) in parities.iter().enumerate() {
        bits[i + 1] = bits[i] ^ p;
    }
    BinaryVector::new(bits)
}

/// Entanglement swap on two electrons: the n = 2 instance of the GHZ
/// protocol, ending in EPR on spins tensor EPR on modes.
pub fn hybrid_swap_two() -> Result<HybridGhz> {
    hybrid_ghz(2)
}

/// Controlled-Z between the spins of two electrons, mediated by the mode
/// pair. Two spin-to-mode flips, four mode rotations, three mode parity
/// measurements, and Z feed-forward on the spins; the modes end in a Bell
/// state named by the last two parities instead of being consumed.
#[derive(Clone, Debug)]
pub struct NewCz {
    pub circuit: Circuit,
    pub input: PureState,
    /// Controlled-Z applied directly to the spin payload, for comparison.
    pub target_spins: PureState,
    pub branches: Vec<NewCzBranch>,
}

#[derive(Clone, Debug)]
pub struct NewCzBranch {
    pub p1: u8,
    pub p2: u8,
    pub p3: u8,
    pub probability: f64,
    /// Four-qubit state after the third parity, before corrections.
    pub raw: PureState,
    /// Four-qubit state after the spin corrections.
    pub corrected: PureState,
    /// Spin factor of `corrected`, on (s1, s2).
    pub spins: PureState,
    /// Mode factor of `corrected`, on (k1, k2): the Bell state whose
    /// parity bit is p3 and sign bit is p2.
    pub modes: PureState,
}

fn cz_register() -> QubitRegister {
    QubitRegister::new(vec![
        QubitDescriptor::spin("s1").with_electron(1),
        QubitDescriptor::mode("k1").with_electron(1),
        QubitDescriptor::mode("k2").with_electron(2),
        QubitDescriptor::spin("s2").with_electron(2),
    ])
    .expect("fixed labels")
}

fn spin_pair_register() -> QubitRegister {
    QubitRegister::new(vec![
        QubitDescriptor::spin("s1").with_electron(1),
        QubitDescriptor::spin("s2").with_electron(2),
    ])
    .expect("fixed labels")
}

/// The mode-ancilla controlled-Z circuit on (s1, k1, k2, s2).
pub fn new_cz_circuit() -> Circuit {
    let mut b = Circuit::builder(cz_register());
    b.h("k2")
        .cnot("s1", "k1")
        .parity("k1", "k2", "p1")
        .h("k2")
        .cnot("s2", "k2")
        .parity("k1", "k2", "p2")
        .h("k1")
        .h("k2")
        .parity("k1", "k2", "p3")
        .z_if("s1", BitExpr::parse("1^p1^p2^p3").expect("static expression"))
        .z_if("s2", BitExpr::bit("p1"));
    let circuit = b.finish().expect("static circuit");
    debug_assert!(parities_touch_modes_only(&circuit));
    circuit
}

/// Runs the mode-ancilla controlled-Z on a two-qubit spin state.
pub fn new_cz(payload: &PureState) -> Result<NewCz> {
    if payload.num_qubits() != 2 {
        return Err(Error::LengthMismatch {
            operator: payload.num_qubits(),
            state: 2,
        });
    }
    let spins = payload.relabeled(spin_pair_register())?;
    let modes = PureState::zero(QubitRegister::new(vec![
        QubitDescriptor::mode("k1").with_electron(1),
        QubitDescriptor::mode("k2").with_electron(2),
    ])?);
    let full = spins.tensor(&modes)?.permuted(&["s1", "k1", "k2", "s2"])?;
    new_cz_from_full(&full)
}

/// Same gate, starting from an explicit four-qubit state on (s1, k1, k2,
/// s2). The mode pair must be in |00>.
pub fn new_cz_from_full(full: &PureState) -> Result<NewCz> {
    let register = cz_register();
    if full.register() != &register {
        return Err(Error::RegisterMismatch);
    }
    let modes = [register.require("k1")?, register.require("k2")?];
    if weight_outside_zero(full, &modes) > PROB_TOL {
        return Err(Error::Precondition(
            "mode qubits must start in |00>".into(),
        ));
    }
    let circuit = new_cz_circuit();

    let spin_payload = full.permuted(&["s1", "s2", "k1", "k2"])?.split_at(2)?.0;
    let target_spins = apply_gate(&spin_payload, &Gate::cz("s1", "s2"), &Default::default())?;

    let traced = execute_traced(&circuit, full, &[8])?;
    let mut branches = Vec::with_capacity(traced.len());
    for t in traced {
        let corrected = t.result.state;
        let (spins, modes) = corrected.permuted(&["s1", "s2", "k1", "k2"])?.split_at(2)?;
        branches.push(NewCzBranch {
            p1: t.result.outcomes["p1"],
            p2: t.result.outcomes["p2"],
            p3: t.result.outcomes["p3"],
            probability: t.result.probability,
            raw: t.snapshots.into_iter().next().expect("one snapshot"),
            corrected,
            spins,
            modes,
        });
    }
    Ok(NewCz {
        circuit,
        input: full.clone(),
        target_spins,
        branches,
    })
}

/// Returns the modes of a finished controlled-Z to |00> with one readout:
/// measure k1, flip k1 back if it read 1, flip k2 when p3 and the readout
/// disagree. The spins are untouched.
#[derive(Clone, Debug)]
pub struct ModeReset {
    pub circuit: Circuit,
    /// Spin factor before the reset, on (s1, s2).
    pub spins_before: PureState,
    pub branches: Vec<ModeResetBranch>,
}

#[derive(Clone, Debug)]
pub struct ModeResetBranch {
    /// Readout of k1.
    pub r: u8,
    pub probability: f64,
    pub state: PureState,
    /// Spin factor after the reset.
    pub spins: PureState,
    /// Mode factor after the reset; always |00>.
    pub modes: PureState,
}

pub fn reset_modes_after_cz(state: &PureState, p2: u8, p3: u8) -> Result<ModeReset> {
    let register = cz_register();
    if state.register() != &register {
        return Err(Error::RegisterMismatch);
    }
    let (spins_before, modes_before) =
        state.permuted(&["s1", "s2", "k1", "k2"])?.split_at(2).map_err(|_| {
            Error::Precondition("spins and modes are still entangled".into())
        })?;
    let expected = bell_state_on(modes_before.register().clone(), p3 & 1, p2 & 1)?;
    if (fidelity(&modes_before, &expected)? - 1.0).abs() > PROB_TOL {
        return Err(Error::Precondition(format!(
            "mode qubits are not in the Bell state for parities ({p2}, {p3})"
        )));
    }

    let mut b = Circuit::builder(register);
    b.measure_z("k1", "r")
        .x_if("k1", BitExpr::bit("r"))
        .x_if(
            "k2",
            BitExpr::constant(p3 & 1).xor(BitExpr::bit("r")),
        );
    let circuit = b.finish().expect("static circuit");

    let mut branches = Vec::new();
    for r in execute_all_branches(&circuit, state)? {
        let (spins, modes) = r.state.permuted(&["s1", "s2", "k1", "k2"])?.split_at(2)?;
        branches.push(ModeResetBranch {
            r: r.outcomes["r"],
            probability: r.probability,
            state: r.state,
            spins,
            modes,
        });
    }
    Ok(ModeReset {
        circuit,
        spins_before,
        branches,
    })
}

//! Rewrite identities for the parity gate, checked as channel equalities.
//!
//! Two circuit fragments are considered the same channel when, on every
//! input, their measurement branches pair up one-to-one under a declared
//! outcome relabeling with matching probabilities and matching post-states.
//! The check runs every computational basis state of the main register plus
//! a batch of seeded random states.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::exec::execute_all_branches;
use crate::seeded_rng;
use crate::state::{fidelity, random_state, PureState, QubitRegister};

/// Maps one of a channel's own outcome bits onto a canonical name, with an
/// optional complement. Bits without an entry keep their name and value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeRelabel {
    pub from: String,
    pub to: String,
    pub complement: bool,
}

impl OutcomeRelabel {
    pub fn same(name: impl Into<String>) -> Self {
        let name = name.into();
        OutcomeRelabel {
            from: name.clone(),
            to: name,
            complement: false,
        }
    }

    pub fn flipped(name: impl Into<String>) -> Self {
        let name = name.into();
        OutcomeRelabel {
            from: name.clone(),
            to: name,
            complement: true,
        }
    }
}

/// A circuit fragment viewed as a channel on its non-ancilla qubits.
/// Ancillas start in |0> and must be discarded by the fragment itself.
#[derive(Clone, Debug)]
pub struct ChannelDescription {
    pub circuit: Circuit,
    pub relabel: Vec<OutcomeRelabel>,
}

impl ChannelDescription {
    pub fn plain(circuit: Circuit) -> Self {
        ChannelDescription {
            circuit,
            relabel: Vec::new(),
        }
    }

    pub fn with_relabel(circuit: Circuit, relabel: Vec<OutcomeRelabel>) -> Self {
        ChannelDescription { circuit, relabel }
    }

    pub fn main_register(&self) -> Result<QubitRegister> {
        self.circuit.main_register()
    }

    /// Rewrites a branch's outcome record into canonical names and values.
    fn canonical_outcomes(&self, outcomes: &BTreeMap<String, u8>) -> Result<BTreeMap<String, u8>> {
        let mut canonical = BTreeMap::new();
        for (name, &value) in outcomes {
            let (to, flip) = match self.relabel.iter().find(|r| &r.from == name) {
                Some(r) => (r.to.clone(), r.complement),
                None => (name.clone(), false),
            };
            let mapped = value ^ u8::from(flip);
            if canonical.insert(to.clone(), mapped).is_some() {
                return Err(Error::BadRelabel(format!(
                    "two outcome bits map onto `{to}`"
                )));
            }
        }
        Ok(canonical)
    }

    /// Embeds an input on the main register into the full circuit register,
    /// with every ancilla in |0>.
    fn embed(&self, input: &PureState) -> Result<PureState> {
        let ancillas = self.circuit.ancillas();
        if ancillas.is_empty() {
            return input.relabeled(self.circuit.register().clone());
        }
        let anc_register = QubitRegister::new(
            self.circuit
                .register()
                .qubits()
                .iter()
                .filter(|q| ancillas.contains(&q.label))
                .cloned()
                .collect(),
        )?;
        let padded = input
            .relabeled(self.main_register()?)?
            .tensor(&PureState::zero(anc_register))?;
        let order: Vec<&str> = self.circuit.register().labels().collect();
        padded.permuted(&order)
    }

    /// Runs the fragment and returns branches keyed by canonical outcomes.
    /// Final states must live on the main register, i.e. the fragment has
    /// discarded all of its ancillas.
    fn run(&self, input: &PureState) -> Result<BTreeMap<BTreeMap<String, u8>, (f64, PureState)>> {
        let main = self.main_register()?;
        let embedded = self.embed(input)?;
        let mut keyed = BTreeMap::new();
        for branch in execute_all_branches(&self.circuit, &embedded)? {
            if branch.state.register() != &main {
                return Err(Error::Precondition(
                    "channel fragment must discard every ancilla".to_string(),
                ));
            }
            let key = self.canonical_outcomes(&branch.outcomes)?;
            if keyed
                .insert(key, (branch.probability, branch.state))
                .is_some()
            {
                return Err(Error::BadRelabel(
                    "relabeling merges distinct outcome records".to_string(),
                ));
            }
        }
        Ok(keyed)
    }
}

/// Outcome of a channel comparison. `max_deviation` is the largest
/// probability gap or fidelity deficit observed across all matched
/// branches, even for passing runs.
#[derive(Clone, Debug)]
pub struct ChannelComparison {
    pub equal: bool,
    pub max_deviation: f64,
    pub counterexample: Option<String>,
}

/// Compares two channels on every basis state of the shared main register
/// plus `trials` random states drawn from the seeded RNG. Branches must
/// biject under the declared relabelings with probabilities within
/// `tolerance` and post-state fidelities within `tolerance` of one.
pub fn channels_equal(
    a: &ChannelDescription,
    b: &ChannelDescription,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<ChannelComparison> {
    let main = a.main_register()?;
    if b.main_register()? != main {
        return Err(Error::RegisterMismatch);
    }
    let mut rng = seeded_rng(seed);
    let mut max_deviation = 0.0f64;
    let dim = main.dimension();
    for trial in 0..dim + trials {
        let input = if trial < dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[trial] = Complex64::new(1.0, 0.0);
            PureState::from_parts(main.clone(), amps)
        } else {
            random_state(main.clone(), &mut rng)
        };
        let describe = |key: &BTreeMap<String, u8>| -> String {
            let bits: Vec<String> = key.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("input #{trial}, outcomes {{{}}}", bits.join(", "))
        };
        let left = a.run(&input)?;
        let right = b.run(&input)?;
        for key in left.keys() {
            if !right.contains_key(key) {
                return Ok(ChannelComparison {
                    equal: false,
                    max_deviation: 1.0,
                    counterexample: Some(format!("{} only on the left side", describe(key))),
                });
            }
        }
        for key in right.keys() {
            if !left.contains_key(key) {
                return Ok(ChannelComparison {
                    equal: false,
                    max_deviation: 1.0,
                    counterexample: Some(format!("{} only on the right side", describe(key))),
                });
            }
        }
        for (key, (p_left, s_left)) in &left {
            let (p_right, s_right) = &right[key];
            let prob_gap = (p_left - p_right).abs();
            let infidelity = 1.0 - fidelity(s_left, s_right)?;
            max_deviation = max_deviation.max(prob_gap).max(infidelity);
            if prob_gap > tolerance {
                return Ok(ChannelComparison {
                    equal: false,
                    max_deviation,
                    counterexample: Some(format!(
                        "{}: probabilities differ by {prob_gap:.3e}",
                        describe(key)
                    )),
                });
            }
            if infidelity > tolerance {
                return Ok(ChannelComparison {
                    equal: false,
                    max_deviation,
                    counterexample: Some(format!(
                        "{}: post-states differ, infidelity {infidelity:.3e}",
                        describe(key)
                    )),
                });
            }
        }
    }
    Ok(ChannelComparison {
        equal: true,
        max_deviation,
        counterexample: None,
    })
}

/// A named left/right pair of channels expected to be equal.
#[derive(Clone, Debug)]
pub struct IdentityPair {
    pub name: &'static str,
    pub left: ChannelDescription,
    pub right: ChannelDescription,
}

impl IdentityPair {
    /// The same identity with the two parity-gate input lines exchanged:
    /// every reference to q1 becomes q2 and vice versa, so single-line
    /// gates move to the other line.
    pub fn swapped_lines(&self) -> Result<IdentityPair> {
        let mut map = BTreeMap::new();
        map.insert("q1".to_string(), "q2".to_string());
        map.insert("q2".to_string(), "q1".to_string());
        Ok(IdentityPair {
            name: self.name,
            left: ChannelDescription {
                circuit: self.left.circuit.relabel_qubits(&map)?,
                relabel: self.left.relabel.clone(),
            },
            right: ChannelDescription {
                circuit: self.right.circuit.relabel_qubits(&map)?,
                relabel: self.right.relabel.clone(),
            },
        })
    }
}

fn reg(labels: &[&str]) -> QubitRegister {
    QubitRegister::from_labels(labels).expect("fixed labels")
}

/// Phase rotations on a parity-gate line commute with the measurement.
pub fn identity_zrot_commutes(phi: f64) -> IdentityPair {
    let mut left = Circuit::builder(reg(&["q1", "q2"]));
    left.zrot("q1", phi).parity("q1", "q2", "p");
    let mut right = Circuit::builder(reg(&["q1", "q2"]));
    right.parity("q1", "q2", "p").zrot("q1", phi);
    IdentityPair {
        name: "zrot-commutes",
        left: ChannelDescription::plain(left.finish().expect("static circuit")),
        right: ChannelDescription::plain(right.finish().expect("static circuit")),
    }
}

/// Flipping both lines commutes with the measurement and leaves the parity
/// outcome unchanged.
pub fn identity_xx_commutes() -> IdentityPair {
    let mut left = Circuit::builder(reg(&["q1", "q2"]));
    left.x("q1").x("q2").parity("q1", "q2", "p");
    let mut right = Circuit::builder(reg(&["q1", "q2"]));
    right.parity("q1", "q2", "p").x("q1").x("q2");
    IdentityPair {
        name: "xx-commutes",
        left: ChannelDescription::plain(left.finish().expect("static circuit")),
        right: ChannelDescription::plain(right.finish().expect("static circuit")),
    }
}

/// Flipping a single line commutes once the parity outcome is complemented.
pub fn identity_single_x_relabels() -> IdentityPair {
    let mut left = Circuit::builder(reg(&["q1", "q2"]));
    left.x("q1").parity("q1", "q2", "p");
    let mut right = Circuit::builder(reg(&["q1", "q2"]));
    right.parity("q1", "q2", "p").x("q1");
    IdentityPair {
        name: "single-x-relabels",
        left: ChannelDescription::with_relabel(
            left.finish().expect("static circuit"),
            vec![OutcomeRelabel::same("p")],
        ),
        right: ChannelDescription::with_relabel(
            right.finish().expect("static circuit"),
            vec![OutcomeRelabel::flipped("p")],
        ),
    }
}

/// A controlled-U whose control sits on a parity-gate line commutes with
/// the measurement; the target is a third qubit.
pub fn identity_controlled_u_commutes(u: [[Complex64; 2]; 2]) -> IdentityPair {
    let mut left = Circuit::builder(reg(&["q1", "q2", "q3"]));
    left.gate(Gate::controlled_u("q1", "q3", u))
        .parity("q1", "q2", "p");
    let mut right = Circuit::builder(reg(&["q1", "q2", "q3"]));
    right
        .parity("q1", "q2", "p")
        .gate(Gate::controlled_u("q1", "q3", u));
    IdentityPair {
        name: "controlled-u-commutes",
        left: ChannelDescription::plain(left.finish().expect("static circuit")),
        right: ChannelDescription::plain(right.finish().expect("static circuit")),
    }
}

/// Parity measurements on overlapping pairs commute with each other.
pub fn identity_adjacent_parities_commute() -> IdentityPair {
    let mut left = Circuit::builder(reg(&["q1", "q2", "q3"]));
    left.parity("q1", "q2", "a").parity("q2", "q3", "b");
    let mut right = Circuit::builder(reg(&["q1", "q2", "q3"]));
    right.parity("q2", "q3", "b").parity("q1", "q2", "a");
    IdentityPair {
        name: "adjacent-parities-commute",
        left: ChannelDescription::plain(left.finish().expect("static circuit")),
        right: ChannelDescription::plain(right.finish().expect("static circuit")),
    }
}

/// Network model of the gate: two CNOTs onto a fresh |0> ancilla followed
/// by a destructive Z measurement realize the same channel.
pub fn identity_cnot_network_model() -> IdentityPair {
    let mut left = Circuit::builder(reg(&["q1", "q2"]));
    left.parity("q1", "q2", "p");
    let mut right = Circuit::builder(reg(&["q1", "q2", "anc"]));
    right.mark_ancilla("anc");
    right
        .cnot("q1", "anc")
        .cnot("q2", "anc")
        .measure_z("anc", "p")
        .discard("anc");
    IdentityPair {
        name: "cnot-network-model",
        left: ChannelDescription::plain(left.finish().expect("static circuit")),
        right: ChannelDescription::plain(right.finish().expect("static circuit")),
    }
}

/// The six built-in identities with their default parameters: a phase
/// rotation angle of 0.7 and a fixed real rotation for the controlled-U.
pub fn builtin_identity_suite() -> Vec<IdentityPair> {
    let u = [
        [Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)],
        [Complex64::new(-0.8, 0.0), Complex64::new(0.6, 0.0)],
    ];
    vec![
        identity_zrot_commutes(0.7),
        identity_xx_commutes(),
        identity_single_x_relabels(),
        identity_controlled_u_commutes(u),
        identity_adjacent_parities_commute(),
        identity_cnot_network_model(),
    ]
}

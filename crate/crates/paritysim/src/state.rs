//! Dense statevector representation.
//!
//! Amplitudes are indexed with qubit 0 as the most significant bit, so for a
//! three-qubit register the basis label |011> sits at index 3. States are
//! immutable: every operation returns a fresh value.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::BinaryVector;
use crate::{AMPLITUDE_TOL, INPUT_NORM_SLACK, MAX_QUBITS, PRUNE_EPS};

/// Physical flavor of a qubit. Spin qubits carry the computational payload in
/// the hybrid protocols; mode qubits are the charge-like ancillary degree of
/// freedom that parity measurements act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitRole {
    Spin,
    Mode,
}

/// One register slot: a unique label, a role, and (for hybrid registers) the
/// index of the electron the qubit belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitDescriptor {
    pub label: String,
    #[serde(default = "QubitDescriptor::default_role")]
    pub role: QubitRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electron: Option<usize>,
}

impl QubitDescriptor {
    fn default_role() -> QubitRole {
        QubitRole::Spin
    }

    pub fn spin(label: impl Into<String>) -> Self {
        QubitDescriptor {
            label: label.into(),
            role: QubitRole::Spin,
            electron: None,
        }
    }

    pub fn mode(label: impl Into<String>) -> Self {
        QubitDescriptor {
            label: label.into(),
            role: QubitRole::Mode,
            electron: None,
        }
    }

    pub fn with_electron(mut self, electron: usize) -> Self {
        self.electron = Some(electron);
        self
    }
}

/// Ordered collection of qubit descriptors with unique labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitRegister {
    qubits: Vec<QubitDescriptor>,
}

impl QubitRegister {
    pub fn new(qubits: Vec<QubitDescriptor>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::EmptyRegister);
        }
        if qubits.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubits.len()));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].iter().any(|p| p.label == q.label) {
                return Err(Error::DuplicateLabel(q.label.clone()));
            }
        }
        Ok(QubitRegister { qubits })
    }

    /// Register of spin qubits with the given labels.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        QubitRegister::new(
            labels
                .iter()
                .map(|l| QubitDescriptor::spin(l.as_ref()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn dimension(&self) -> usize {
        1usize << self.qubits.len()
    }

    pub fn qubits(&self) -> &[QubitDescriptor] {
        &self.qubits
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.qubits.iter().map(|q| q.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.qubits.iter().position(|q| q.label == label)
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Bit mask selecting the given qubit position in an amplitude index.
    /// Qubit 0 owns the most significant bit.
    pub(crate) fn mask(&self, position: usize) -> usize {
        1usize << (self.qubits.len() - 1 - position)
    }
}

/// Normalized pure state over a register.
#[derive(Clone, Debug)]
pub struct PureState {
    pub(crate) register: QubitRegister,
    pub(crate) amps: Vec<Complex64>,
}

impl PureState {
    /// |0...0> on the given register.
    pub fn zero(register: QubitRegister) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); register.dimension()];
        amps[0] = Complex64::new(1.0, 0.0);
        PureState { register, amps }
    }

    /// Computational basis state for the given bit assignment.
    pub fn basis(register: QubitRegister, bits: &BinaryVector) -> Result<Self> {
        if bits.len() != register.len() {
            return Err(Error::LengthMismatch {
                operator: bits.len(),
                state: register.len(),
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); register.dimension()];
        amps[bits.to_index()] = Complex64::new(1.0, 0.0);
        Ok(PureState { register, amps })
    }

    /// Builds a state from raw amplitudes. The squared norm must be within
    /// 1e-6 of one; the vector is then renormalized exactly.
    pub fn from_amplitudes(register: QubitRegister, mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != register.dimension() {
            return Err(Error::WrongAmplitudeCount {
                expected: register.dimension(),
                actual: amps.len(),
            });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > INPUT_NORM_SLACK {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let scale = 1.0 / norm_sqr.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        Ok(PureState { register, amps })
    }

    /// Internal constructor for amplitude vectors already normalized by
    /// construction. Debug builds double-check the norm.
    pub(crate) fn from_parts(register: QubitRegister, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), register.dimension());
        debug_assert!({
            let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            (n - 1.0).abs() < 1e-8
        });
        PureState { register, amps }
    }

    pub fn register(&self) -> &QubitRegister {
        &self.register
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// <self|other>. Both states must live on the same register.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest per-amplitude deviation from `other`. Phase sensitive.
    pub fn max_amplitude_deviation(&self, other: &PureState) -> Result<f64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// True when every amplitude matches `other` within the crate-wide
    /// exact-comparison tolerance.
    pub fn amplitudes_match(&self, other: &PureState) -> Result<bool> {
        Ok(self.max_amplitude_deviation(other)? <= AMPLITUDE_TOL)
    }

    /// Tensor product; `self`'s qubits come first and stay most significant.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut qubits = self.register.qubits.clone();
        for q in &other.register.qubits {
            if self.register.index_of(&q.label).is_some() {
                return Err(Error::DuplicateLabel(q.label.clone()));
            }
            qubits.push(q.clone());
        }
        let register = QubitRegister::new(qubits)?;
        let m = other.amps.len();
        let mut amps = Vec::with_capacity(self.amps.len() * m);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState { register, amps })
    }

    /// Reorders the register to the given label sequence, permuting
    /// amplitudes accordingly. `order` must list every label exactly once.
    pub fn permuted<S: AsRef<str>>(&self, order: &[S]) -> Result<PureState> {
        let n = self.register.len();
        if order.len() != n {
            return Err(Error::LengthMismatch {
                operator: order.len(),
                state: n,
            });
        }
        let mut positions = Vec::with_capacity(n);
        for label in order {
            let p = self.register.require(label.as_ref())?;
            if positions.contains(&p) {
                return Err(Error::DuplicateLabel(label.as_ref().to_string()));
            }
            positions.push(p);
        }
        let register = QubitRegister::new(
            positions
                .iter()
                .map(|&p| self.register.qubits[p].clone())
                .collect(),
        )?;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut new_idx = 0usize;
            for (new_pos, &old_pos) in positions.iter().enumerate() {
                if idx & self.register.mask(old_pos) != 0 {
                    new_idx |= 1 << (n - 1 - new_pos);
                }
            }
            amps[new_idx] = *a;
        }
        Ok(PureState { register, amps })
    }

    /// Splits a product state into its first `k` qubits and the rest.
    /// Fails with `NotProductState` if the two halves are entangled. The
    /// first factor is normalized with its leading nonzero amplitude real
    /// and positive; the second factor absorbs the remaining phase.
    pub fn split_at(&self, k: usize) -> Result<(PureState, PureState)> {
        let n = self.register.len();
        if k == 0 || k >= n {
            return Err(Error::SizeOutOfRange {
                what: "split position",
                value: k,
                min: 1,
                max: n - 1,
            });
        }
        let rows = 1usize << k;
        let cols = 1usize << (n - k);
        // Pivot column: the one holding the largest amplitude.
        let (pivot, _) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .expect("state is never empty");
        let pivot_col = pivot % cols;
        let mut u: Vec<Complex64> = (0..rows)
            .map(|r| self.amps[r * cols + pivot_col])
            .collect();
        let nu: f64 = u.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut u {
            *a /= nu;
        }
        let lead = u
            .iter()
            .find(|a| a.norm() > PRUNE_EPS)
            .copied()
            .expect("pivot column has norm one");
        let lead_phase = lead / lead.norm();
        for a in &mut u {
            *a *= lead_phase.conj();
        }
        let mut v = vec![Complex64::new(0.0, 0.0); cols];
        for (r, ur) in u.iter().enumerate() {
            for (c, vc) in v.iter_mut().enumerate() {
                *vc += ur.conj() * self.amps[r * cols + c];
            }
        }
        for r in 0..rows {
            for c in 0..cols {
                let residual = (self.amps[r * cols + c] - u[r] * v[c]).norm();
                if residual > 1e-9 {
                    return Err(Error::NotProductState);
                }
            }
        }
        let front = QubitRegister::new(self.register.qubits[..k].to_vec())?;
        let back = QubitRegister::new(self.register.qubits[k..].to_vec())?;
        Ok((
            PureState::from_parts(front, u),
            PureState::from_parts(back, v),
        ))
    }

    /// Same amplitudes on a different register of equal size.
    pub fn relabeled(&self, register: QubitRegister) -> Result<PureState> {
        if register.len() != self.register.len() {
            return Err(Error::LengthMismatch {
                operator: register.len(),
                state: self.register.len(),
            });
        }
        Ok(PureState {
            register,
            amps: self.amps.clone(),
        })
    }
}

/// Global-phase-insensitive fidelity |<a|b>|^2.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Computational basis state on `register` for the bit assignment `bits`,
/// with qubit 0 as the most significant index bit.
pub fn basis_state(register: QubitRegister, bits: &BinaryVector) -> Result<PureState> {
    PureState::basis(register, bits)
}

/// Bell state |B_ij> = (|0 i> + (-1)^j |1 (i xor 1)>) / sqrt(2) on a fresh
/// two-qubit register (q1, q2). `i` is the parity bit, `j` the sign bit.
pub fn bell_state(i: u8, j: u8) -> PureState {
    let register = QubitRegister::from_labels(&["q1", "q2"]).expect("two fresh labels");
    bell_state_on(register, i, j).expect("register has two qubits")
}

/// Bell state on a caller-supplied two-qubit register.
pub fn bell_state_on(register: QubitRegister, i: u8, j: u8) -> Result<PureState> {
    if register.len() != 2 {
        return Err(Error::LengthMismatch {
            operator: 2,
            state: register.len(),
        });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    let i = (i & 1) as usize;
    let j = j & 1;
    amps[i] = Complex64::new(s, 0.0);
    amps[2 + (i ^ 1)] = Complex64::new(if j == 1 { -s } else { s }, 0.0);
    Ok(PureState { register, amps })
}

/// GHZ state (|0...0> + |1...1>) / sqrt(2) on a fresh register q1..qn.
pub fn ghz_state(n: usize) -> Result<PureState> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::SizeOutOfRange {
            what: "GHZ size",
            value: n,
            min: 2,
            max: MAX_QUBITS,
        });
    }
    let labels: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    let register = QubitRegister::from_labels(&labels)?;
    ghz_state_on(register)
}

/// GHZ state on a caller-supplied register.
pub fn ghz_state_on(register: QubitRegister) -> Result<PureState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let dim = register.dimension();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(s, 0.0);
    amps[dim - 1] = Complex64::new(s, 0.0);
    Ok(PureState { register, amps })
}

/// Haar-like random state: iid complex Gaussian amplitudes, normalized.
pub fn random_state<R: Rng + ?Sized>(register: QubitRegister, rng: &mut R) -> PureState {
    let dim = register.dimension();
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    PureState { register, amps }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    register: Vec<QubitDescriptor>,
    amplitudes: Vec<[f64; 2]>,
}

/// Rounds to 12 significant digits so serialized states are stable across
/// platforms and re-parse to the same value.
pub(crate) fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    format!("{x:.11e}").parse().expect("formatted float")
}

impl PureState {
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = StateJson {
            register: self.register.qubits.clone(),
            amplitudes: self
                .amps
                .iter()
                .map(|a| [round_sig12(a.re), round_sig12(a.im)])
                .collect(),
        };
        serde_json::to_value(doc).expect("state serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("state serializes")
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<PureState> {
        let doc: StateJson = serde_json::from_value(value.clone())?;
        let register = QubitRegister::new(doc.register)?;
        let amps = doc
            .amplitudes
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        PureState::from_amplitudes(register, amps)
    }

    pub fn from_json_str(text: &str) -> Result<PureState> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        PureState::from_json_value(&value)
    }
}

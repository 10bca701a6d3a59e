//! Bit vectors and Pauli strings.
//!
//! A `PauliString` stores one factor per qubit plus a global phase from
//! {1, -1, i, -i}. The combined factor `XZ` means Z acts first, then X,
//! so XZ|1> = -|0>.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::PureState;

/// Vector over Z_2, one entry per qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryVector {
    bits: Vec<u8>,
}

impl BinaryVector {
    /// Builds from a list of bits; every entry is reduced mod 2.
    pub fn new(bits: Vec<u8>) -> Self {
        BinaryVector {
            bits: bits.into_iter().map(|b| b & 1).collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        BinaryVector { bits: vec![0; n] }
    }

    /// Reads the bits of an amplitude index, qubit 0 first.
    pub fn from_index(index: usize, n: usize) -> Self {
        BinaryVector {
            bits: (0..n).map(|p| ((index >> (n - 1 - p)) & 1) as u8).collect(),
        }
    }

    /// Amplitude index of the assignment, qubit 0 most significant.
    pub fn to_index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: u8) {
        self.bits[i] = value & 1;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Entry-wise complement.
    pub fn complement(&self) -> Self {
        BinaryVector {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    /// Entry-wise XOR; both vectors must have the same length.
    pub fn xor(&self, other: &BinaryVector) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                operator: other.len(),
                state: self.len(),
            });
        }
        Ok(BinaryVector {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BinaryVector) -> Result<u8> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                operator: other.len(),
                state: self.len(),
            });
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .fold(0, |acc, (a, b)| acc ^ (a & b)))
    }

    pub fn parity(&self) -> u8 {
        binary_parity(self)
    }
}

/// Sum of the entries mod 2.
pub fn binary_parity(v: &BinaryVector) -> u8 {
    v.bits.iter().fold(0, |acc, b| acc ^ b)
}

/// Fourth roots of unity, the only global phases a Pauli string can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn times(self, other: Phase) -> Phase {
        Phase::from_quarter_turns(self.quarter_turns() + other.quarter_turns())
    }

    pub fn negated(self) -> Phase {
        self.times(Phase::MinusOne)
    }

    fn quarter_turns(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    fn from_quarter_turns(turns: u8) -> Phase {
        match turns % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    /// (-1)^bit.
    pub fn from_sign_bit(bit: u8) -> Phase {
        if bit & 1 == 1 {
            Phase::MinusOne
        } else {
            Phase::PlusOne
        }
    }
}

/// Per-qubit factor of a Pauli string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliFactor {
    I,
    X,
    Z,
    /// X applied after Z.
    XZ,
}

/// Tensor product of single-qubit factors with a global phase.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    factors: Vec<PauliFactor>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            factors: vec![PauliFactor::I; n],
            phase: Phase::PlusOne,
        }
    }

    /// X on every qubit where `v` is one.
    pub fn x_string(v: &BinaryVector) -> Self {
        PauliString::from_xz(v, &BinaryVector::zeros(v.len())).expect("equal lengths")
    }

    /// Z on every qubit where `v` is one.
    pub fn z_string(v: &BinaryVector) -> Self {
        PauliString::from_xz(&BinaryVector::zeros(v.len()), v).expect("equal lengths")
    }

    /// X(x) . Z(z): Z factors act first. Qubits with both bits set get the
    /// combined XZ factor.
    pub fn from_xz(x: &BinaryVector, z: &BinaryVector) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch {
                operator: x.len(),
                state: z.len(),
            });
        }
        let factors = x
            .bits()
            .iter()
            .zip(z.bits())
            .map(|(&xb, &zb)| match (xb, zb) {
                (0, 0) => PauliFactor::I,
                (1, 0) => PauliFactor::X,
                (0, 1) => PauliFactor::Z,
                _ => PauliFactor::XZ,
            })
            .collect();
        Ok(PauliString {
            factors,
            phase: Phase::PlusOne,
        })
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn factors(&self) -> &[PauliFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Applies a Pauli string to a state. The string length must equal the
/// register size.
pub fn apply_pauli_string(state: &PureState, pauli: &PauliString) -> Result<PureState> {
    let n = state.num_qubits();
    if pauli.len() != n {
        return Err(Error::LengthMismatch {
            operator: pauli.len(),
            state: n,
        });
    }
    let mut flip_mask = 0usize;
    let mut z_mask = 0usize;
    for (pos, factor) in pauli.factors.iter().enumerate() {
        let mask = 1usize << (n - 1 - pos);
        match factor {
            PauliFactor::I => {}
            PauliFactor::X => flip_mask |= mask,
            PauliFactor::Z => z_mask |= mask,
            PauliFactor::XZ => {
                flip_mask |= mask;
                z_mask |= mask;
            }
        }
    }
    let phase = pauli.phase.to_complex();
    let mut amps = vec![Complex64::new(0.0, 0.0); state.amplitudes().len()];
    for (idx, a) in state.amplitudes().iter().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        // Z factors read the bit before X flips it.
        let sign = if (idx & z_mask).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        amps[idx ^ flip_mask] = a * sign * phase;
    }
    Ok(PureState::from_parts(state.register().clone(), amps))
}

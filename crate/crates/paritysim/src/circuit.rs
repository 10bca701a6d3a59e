//! Circuit intermediate representation.
//!
//! A circuit is a qubit register, an optional set of ancilla labels, and a
//! step list. Steps are unitary gates (optionally gated on a classical bit
//! expression), nondestructive two-qubit parity measurements, single-qubit
//! Z measurements, and discards of qubits left in a definite basis state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{QubitDescriptor, QubitRegister};

/// XOR/AND expression over named classical outcome bits and constants.
#[derive(Clone, Debug, PartialEq)]
pub enum BitExpr {
    Const(u8),
    Bit(String),
    Xor(Box<BitExpr>, Box<BitExpr>),
    And(Box<BitExpr>, Box<BitExpr>),
}

impl BitExpr {
    pub fn bit(name: impl Into<String>) -> Self {
        BitExpr::Bit(name.into())
    }

    pub fn constant(value: u8) -> Self {
        BitExpr::Const(value & 1)
    }

    pub fn xor(self, other: BitExpr) -> Self {
        BitExpr::Xor(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: BitExpr) -> Self {
        BitExpr::And(Box::new(self), Box::new(other))
    }

    /// XOR of a list of bit names; the empty list folds to the constant 0.
    pub fn xor_of<S: AsRef<str>>(names: &[S]) -> Self {
        let mut iter = names.iter();
        match iter.next() {
            None => BitExpr::Const(0),
            Some(first) => iter.fold(BitExpr::bit(first.as_ref()), |acc, n| {
                acc.xor(BitExpr::bit(n.as_ref()))
            }),
        }
    }

    pub fn eval(&self, bits: &BTreeMap<String, u8>) -> Result<u8> {
        Ok(match self {
            BitExpr::Const(c) => *c,
            BitExpr::Bit(name) => *bits
                .get(name)
                .ok_or_else(|| Error::UnboundOutcomeBit(name.clone()))?,
            BitExpr::Xor(a, b) => a.eval(bits)? ^ b.eval(bits)?,
            BitExpr::And(a, b) => a.eval(bits)? & b.eval(bits)?,
        })
    }

    pub fn collect_names(&self, into: &mut BTreeSet<String>) {
        match self {
            BitExpr::Const(_) => {}
            BitExpr::Bit(name) => {
                into.insert(name.clone());
            }
            BitExpr::Xor(a, b) | BitExpr::And(a, b) => {
                a.collect_names(into);
                b.collect_names(into);
            }
        }
    }

    /// Parses expressions like `p1^p2&a^1`. `&` binds tighter than `^`;
    /// parentheses override.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parser = ExprParser {
            chars: text.chars().collect(),
            pos: 0,
            text,
        };
        let expr = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.chars.len() {
            return Err(Error::ExprParse(format!(
                "unexpected trailing input in `{text}`"
            )));
        }
        Ok(expr)
    }
}

impl fmt::Display for BitExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitExpr::Const(c) => write!(f, "{c}"),
            BitExpr::Bit(name) => write!(f, "{name}"),
            BitExpr::Xor(a, b) => write!(f, "{a}^{b}"),
            BitExpr::And(a, b) => {
                let wrap = |e: &BitExpr| matches!(e, BitExpr::Xor(..));
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, "&")?;
                if wrap(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    text: &'a str,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<BitExpr> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            if self.pos < self.chars.len() && self.chars[self.pos] == '^' {
                self.pos += 1;
                acc = acc.xor(self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<BitExpr> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.pos < self.chars.len() && self.chars[self.pos] == '&' {
                self.pos += 1;
                acc = acc.and(self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<BitExpr> {
        self.skip_ws();
        match self.chars.get(self.pos) {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.chars.get(self.pos) != Some(&')') {
                    return Err(Error::ExprParse(format!(
                        "missing closing parenthesis in `{}`",
                        self.text
                    )));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('0') => {
                self.pos += 1;
                Ok(BitExpr::Const(0))
            }
            Some('1') => {
                self.pos += 1;
                Ok(BitExpr::Const(1))
            }
            Some(c) if c.is_ascii_alphabetic() || *c == '_' => {
                let start = self.pos;
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    self.pos += 1;
                }
                Ok(BitExpr::Bit(
                    self.chars[start..self.pos].iter().collect::<String>(),
                ))
            }
            _ => Err(Error::ExprParse(format!(
                "expected bit name, constant or `(` at offset {} in `{}`",
                self.pos, self.text
            ))),
        }
    }
}

/// Unitary gate kinds. `ZRot(phi)` is diag(e^{i phi}, e^{-i phi}).
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Z,
    ZRot(f64),
    Cnot,
    Cz,
    ControlledU([[Complex64; 2]; 2]),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Z | GateKind::ZRot(_) => 1,
            GateKind::Cnot | GateKind::Cz | GateKind::ControlledU(_) => 2,
        }
    }
}

/// A gate bound to register labels, optionally guarded by a classical
/// condition; when the condition evaluates to 0 the gate is skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<String>,
    pub condition: Option<BitExpr>,
}

impl Gate {
    fn one(kind: GateKind, q: impl Into<String>) -> Self {
        Gate {
            kind,
            qubits: vec![q.into()],
            condition: None,
        }
    }

    fn two(kind: GateKind, a: impl Into<String>, b: impl Into<String>) -> Self {
        Gate {
            kind,
            qubits: vec![a.into(), b.into()],
            condition: None,
        }
    }

    pub fn h(q: impl Into<String>) -> Self {
        Gate::one(GateKind::H, q)
    }

    pub fn x(q: impl Into<String>) -> Self {
        Gate::one(GateKind::X, q)
    }

    pub fn z(q: impl Into<String>) -> Self {
        Gate::one(GateKind::Z, q)
    }

    pub fn zrot(q: impl Into<String>, phi: f64) -> Self {
        Gate::one(GateKind::ZRot(phi), q)
    }

    pub fn cnot(control: impl Into<String>, target: impl Into<String>) -> Self {
        Gate::two(GateKind::Cnot, control, target)
    }

    pub fn cz(a: impl Into<String>, b: impl Into<String>) -> Self {
        Gate::two(GateKind::Cz, a, b)
    }

    pub fn controlled_u(
        control: impl Into<String>,
        target: impl Into<String>,
        matrix: [[Complex64; 2]; 2],
    ) -> Self {
        Gate::two(GateKind::ControlledU(matrix), control, target)
    }

    pub fn when(mut self, condition: BitExpr) -> Self {
        self.condition = Some(condition);
        self
    }
}

/// One circuit step.
#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Gate(Gate),
    /// Nondestructive joint parity measurement; binds the parity bit to
    /// `out`.
    Parity { q1: String, q2: String, out: String },
    /// Computational-basis measurement; the qubit stays in the register.
    MeasureZ { q: String, out: String },
    /// Removes a qubit that is in a definite basis state.
    Discard { q: String },
}

/// Validated circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    register: QubitRegister,
    ancillas: BTreeSet<String>,
    steps: Vec<Step>,
}

impl Circuit {
    pub fn builder(register: QubitRegister) -> CircuitBuilder {
        CircuitBuilder {
            register,
            ancillas: BTreeSet::new(),
            steps: Vec::new(),
        }
    }

    /// Validates and assembles a circuit from parts.
    pub fn new(
        register: QubitRegister,
        ancillas: BTreeSet<String>,
        steps: Vec<Step>,
    ) -> Result<Self> {
        for label in &ancillas {
            register.require(label)?;
        }
        let mut live: BTreeSet<&str> = register.labels().collect();
        let mut bound: BTreeSet<String> = BTreeSet::new();
        let require_live = |live: &BTreeSet<&str>, label: &str| -> Result<()> {
            if live.contains(label) {
                Ok(())
            } else {
                Err(Error::UnknownLabel(label.to_string()))
            }
        };
        let bind = |bound: &mut BTreeSet<String>, out: &str| -> Result<()> {
            if !bound.insert(out.to_string()) {
                return Err(Error::DuplicateOutcomeBit(out.to_string()));
            }
            Ok(())
        };
        for step in &steps {
            match step {
                Step::Gate(gate) => {
                    if gate.qubits.len() != gate.kind.arity() {
                        return Err(Error::LengthMismatch {
                            operator: gate.qubits.len(),
                            state: gate.kind.arity(),
                        });
                    }
                    for q in &gate.qubits {
                        require_live(&live, q)?;
                    }
                    if gate.qubits.len() == 2 && gate.qubits[0] == gate.qubits[1] {
                        return Err(Error::SameQubit(gate.qubits[0].clone()));
                    }
                    if let GateKind::ControlledU(m) = &gate.kind {
                        check_unitary(m)?;
                    }
                    if let Some(cond) = &gate.condition {
                        let mut names = BTreeSet::new();
                        cond.collect_names(&mut names);
                        for name in names {
                            if !bound.contains(&name) {
                                return Err(Error::UnboundOutcomeBit(name));
                            }
                        }
                    }
                }
                Step::Parity { q1, q2, out } => {
                    require_live(&live, q1)?;
                    require_live(&live, q2)?;
                    if q1 == q2 {
                        return Err(Error::SameQubit(q1.clone()));
                    }
                    bind(&mut bound, out)?;
                }
                Step::MeasureZ { q, out } => {
                    require_live(&live, q)?;
                    bind(&mut bound, out)?;
                }
                Step::Discard { q } => {
                    require_live(&live, q)?;
                    live.remove(q.as_str());
                }
            }
        }
        Ok(Circuit {
            register,
            ancillas,
            steps,
        })
    }

    pub fn register(&self) -> &QubitRegister {
        &self.register
    }

    pub fn ancillas(&self) -> &BTreeSet<String> {
        &self.ancillas
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    /// Register restricted to non-ancilla qubits, order preserved.
    pub fn main_register(&self) -> Result<QubitRegister> {
        QubitRegister::new(
            self.register
                .qubits()
                .iter()
                .filter(|q| !self.ancillas.contains(&q.label))
                .cloned()
                .collect(),
        )
    }

    /// Rewrites every qubit reference through the given relabeling map.
    /// Labels absent from the map stay as they are; the register itself is
    /// unchanged, so the map must be a permutation of register labels.
    pub fn relabel_qubits(&self, map: &BTreeMap<String, String>) -> Result<Circuit> {
        for (from, to) in map {
            self.register.require(from)?;
            self.register.require(to)?;
        }
        let swap = |label: &String| -> String {
            map.get(label).cloned().unwrap_or_else(|| label.clone())
        };
        let steps = self
            .steps
            .iter()
            .map(|step| match step {
                Step::Gate(gate) => Step::Gate(Gate {
                    kind: gate.kind.clone(),
                    qubits: gate.qubits.iter().map(swap).collect(),
                    condition: gate.condition.clone(),
                }),
                Step::Parity { q1, q2, out } => Step::Parity {
                    q1: swap(q1),
                    q2: swap(q2),
                    out: out.clone(),
                },
                Step::MeasureZ { q, out } => Step::MeasureZ {
                    q: swap(q),
                    out: out.clone(),
                },
                Step::Discard { q } => Step::Discard { q: swap(q) },
            })
            .collect();
        Circuit::new(self.register.clone(), self.ancillas.clone(), steps)
    }
}

fn check_unitary(m: &[[Complex64; 2]; 2]) -> Result<()> {
    for i in 0..2 {
        for j in 0..2 {
            let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            if (dot - target).norm() > 1e-10 {
                return Err(Error::NotUnitary);
            }
        }
    }
    Ok(())
}

/// Step-list accumulator; validation happens in `finish`.
pub struct CircuitBuilder {
    register: QubitRegister,
    ancillas: BTreeSet<String>,
    steps: Vec<Step>,
}

impl CircuitBuilder {
    pub fn mark_ancilla(&mut self, label: impl Into<String>) -> &mut Self {
        self.ancillas.insert(label.into());
        self
    }

    pub fn gate(&mut self, gate: Gate) -> &mut Self {
        self.steps.push(Step::Gate(gate));
        self
    }

    pub fn h(&mut self, q: impl Into<String>) -> &mut Self {
        self.gate(Gate::h(q))
    }

    pub fn x(&mut self, q: impl Into<String>) -> &mut Self {
        self.gate(Gate::x(q))
    }

    pub fn z(&mut self, q: impl Into<String>) -> &mut Self {
        self.gate(Gate::z(q))
    }

    pub fn zrot(&mut self, q: impl Into<String>, phi: f64) -> &mut Self {
        self.gate(Gate::zrot(q, phi))
    }

    pub fn cnot(&mut self, control: impl Into<String>, target: impl Into<String>) -> &mut Self {
        self.gate(Gate::cnot(control, target))
    }

    pub fn cz(&mut self, a: impl Into<String>, b: impl Into<String>) -> &mut Self {
        self.gate(Gate::cz(a, b))
    }

    pub fn x_if(&mut self, q: impl Into<String>, condition: BitExpr) -> &mut Self {
        self.gate(Gate::x(q).when(condition))
    }

    pub fn z_if(&mut self, q: impl Into<String>, condition: BitExpr) -> &mut Self {
        self.gate(Gate::z(q).when(condition))
    }

    pub fn parity(
        &mut self,
        q1: impl Into<String>,
        q2: impl Into<String>,
        out: impl Into<String>,
    ) -> &mut Self {
        self.steps.push(Step::Parity {
            q1: q1.into(),
            q2: q2.into(),
            out: out.into(),
        });
        self
    }

    pub fn measure_z(&mut self, q: impl Into<String>, out: impl Into<String>) -> &mut Self {
        self.steps.push(Step::MeasureZ {
            q: q.into(),
            out: out.into(),
        });
        self
    }

    pub fn discard(&mut self, q: impl Into<String>) -> &mut Self {
        self.steps.push(Step::Discard { q: q.into() });
        self
    }

    pub fn finish(self) -> Result<Circuit> {
        Circuit::new(self.register, self.ancillas, self.steps)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op")]
enum StepJson {
    H {
        q: String,
        #[serde(rename = "if", default, skip_serializing_if = "Option::is_none")]
        cond: Option<String>,
    },
    X {
        q: String,
        #[serde(rename = "if", default, skip_serializing_if = "Option::is_none")]
        cond: Option<String>,
    },
    Z {
        q: String,
        #[serde(rename = "if", default, skip_serializing_if = "Option::is_none")]
        cond: Option<String>,
    },
    #[serde(rename = "ZROT")]
    ZRot {
        q: String,
        phi: f64,
        #[serde(rename = "if", default, skip_serializing_if = "Option::is_none")]
        cond: Option<String>,
    },
    #[serde(rename = "CNOT")]
    Cnot {
        control: String,
        target: String,
        #[serde(rename = "if", default, skip_serializing_if = "Option::is_none")]
        cond: Option<String>,
    },
    #[serde(rename = "CZ")]
    Cz {
        q1: String,
        q2: String,
        #[serde(rename = "if", default, skip_serializing_if = "Option::is_none")]
        cond: Option<String>,
    },
    #[serde(rename = "CU")]
    Cu {
        control: String,
        target: String,
        matrix: [[[f64; 2]; 2]; 2],
        #[serde(rename = "if", default, skip_serializing_if = "Option::is_none")]
        cond: Option<String>,
    },
    P {
        q1: String,
        q2: String,
        out: String,
    },
    #[serde(rename = "MZ")]
    Mz { q: String, out: String },
    #[serde(rename = "DISCARD")]
    Discard { q: String },
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    register: Vec<QubitDescriptor>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ancillas: Vec<String>,
    steps: Vec<StepJson>,
}

fn cond_to_json(cond: &Option<BitExpr>) -> Option<String> {
    cond.as_ref().map(|c| c.to_string())
}

fn cond_from_json(cond: Option<String>) -> Result<Option<BitExpr>> {
    cond.map(|text| BitExpr::parse(&text)).transpose()
}

impl Circuit {
    pub fn to_json_value(&self) -> serde_json::Value {
        let steps = self
            .steps
            .iter()
            .map(|step| match step {
                Step::Gate(g) => {
                    let cond = cond_to_json(&g.condition);
                    match &g.kind {
                        GateKind::H => StepJson::H {
                            q: g.qubits[0].clone(),
                            cond,
                        },
                        GateKind::X => StepJson::X {
                            q: g.qubits[0].clone(),
                            cond,
                        },
                        GateKind::Z => StepJson::Z {
                            q: g.qubits[0].clone(),
                            cond,
                        },
                        GateKind::ZRot(phi) => StepJson::ZRot {
                            q: g.qubits[0].clone(),
                            phi: *phi,
                            cond,
                        },
                        GateKind::Cnot => StepJson::Cnot {
                            control: g.qubits[0].clone(),
                            target: g.qubits[1].clone(),
                            cond,
                        },
                        GateKind::Cz => StepJson::Cz {
                            q1: g.qubits[0].clone(),
                            q2: g.qubits[1].clone(),
                            cond,
                        },
                        GateKind::ControlledU(m) => StepJson::Cu {
                            control: g.qubits[0].clone(),
                            target: g.qubits[1].clone(),
                            matrix: [
                                [[m[0][0].re, m[0][0].im], [m[0][1].re, m[0][1].im]],
                                [[m[1][0].re, m[1][0].im], [m[1][1].re, m[1][1].im]],
                            ],
                            cond,
                        },
                    }
                }
                Step::Parity { q1, q2, out } => StepJson::P {
                    q1: q1.clone(),
                    q2: q2.clone(),
                    out: out.clone(),
                },
                Step::MeasureZ { q, out } => StepJson::Mz {
                    q: q.clone(),
                    out: out.clone(),
                },
                Step::Discard { q } => StepJson::Discard { q: q.clone() },
            })
            .collect();
        let doc = CircuitJson {
            register: self.register.qubits().to_vec(),
            ancillas: self.ancillas.iter().cloned().collect(),
            steps,
        };
        serde_json::to_value(doc).expect("circuit serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("circuit serializes")
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Circuit> {
        let doc: CircuitJson = serde_json::from_value(value.clone())?;
        let register = QubitRegister::new(doc.register)?;
        let mut steps = Vec::with_capacity(doc.steps.len());
        for step in doc.steps {
            steps.push(match step {
                StepJson::H { q, cond } => Step::Gate(Gate {
                    kind: GateKind::H,
                    qubits: vec![q],
                    condition: cond_from_json(cond)?,
                }),
                StepJson::X { q, cond } => Step::Gate(Gate {
                    kind: GateKind::X,
                    qubits: vec![q],
                    condition: cond_from_json(cond)?,
                }),
                StepJson::Z { q, cond } => Step::Gate(Gate {
                    kind: GateKind::Z,
                    qubits: vec![q],
                    condition: cond_from_json(cond)?,
                }),
                StepJson::ZRot { q, phi, cond } => Step::Gate(Gate {
                    kind: GateKind::ZRot(phi),
                    qubits: vec![q],
                    condition: cond_from_json(cond)?,
                }),
                StepJson::Cnot {
                    control,
                    target,
                    cond,
                } => Step::Gate(Gate {
                    kind: GateKind::Cnot,
                    qubits: vec![control, target],
                    condition: cond_from_json(cond)?,
                }),
                StepJson::Cz { q1, q2, cond } => Step::Gate(Gate {
                    kind: GateKind::Cz,
                    qubits: vec![q1, q2],
                    condition: cond_from_json(cond)?,
                }),
                StepJson::Cu {
                    control,
                    target,
                    matrix,
                    cond,
                } => Step::Gate(Gate {
                    kind: GateKind::ControlledU([
                        [
                            Complex64::new(matrix[0][0][0], matrix[0][0][1]),
                            Complex64::new(matrix[0][1][0], matrix[0][1][1]),
                        ],
                        [
                            Complex64::new(matrix[1][0][0], matrix[1][0][1]),
                            Complex64::new(matrix[1][1][0], matrix[1][1][1]),
                        ],
                    ]),
                    qubits: vec![control, target],
                    condition: cond_from_json(cond)?,
                }),
                StepJson::P { q1, q2, out } => Step::Parity { q1, q2, out },
                StepJson::Mz { q, out } => Step::MeasureZ { q, out },
                StepJson::Discard { q } => Step::Discard { q },
            });
        }
        Circuit::new(register, doc.ancillas.into_iter().collect(), steps)
    }

    pub fn from_json_str(text: &str) -> Result<Circuit> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        Circuit::from_json_value(&value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg2() -> QubitRegister {
        QubitRegister::from_labels(&["a", "b"]).unwrap()
    }

    #[test]
    fn expressions_parse_with_and_binding_tighter() {
        let e = BitExpr::parse("p1^p2&a^1").unwrap();
        let mut bits = BTreeMap::new();
        bits.insert("p1".to_string(), 1);
        bits.insert("p2".to_string(), 1);
        bits.insert("a".to_string(), 0);
        // 1 ^ (1&0) ^ 1 = 0
        assert_eq!(e.eval(&bits).unwrap(), 0);
        bits.insert("a".to_string(), 1);
        assert_eq!(e.eval(&bits).unwrap(), 1);
    }

    #[test]
    fn expression_display_round_trips() {
        for text in ["p1^p2", "p1&p2^1", "(p1^p2)&a", "p_3^1&q"] {
            let e = BitExpr::parse(text).unwrap();
            let back = BitExpr::parse(&e.to_string()).unwrap();
            assert_eq!(e, back, "{text}");
        }
    }

    #[test]
    fn expression_parse_errors_name_the_problem() {
        assert!(BitExpr::parse("p1^").is_err());
        assert!(BitExpr::parse("(p1").is_err());
        assert!(BitExpr::parse("p1 p2").is_err());
    }

    #[test]
    fn eval_rejects_unbound_names() {
        let e = BitExpr::parse("p9").unwrap();
        assert!(matches!(
            e.eval(&BTreeMap::new()),
            Err(Error::UnboundOutcomeBit(_))
        ));
    }

    #[test]
    fn circuit_validation_catches_label_and_binding_mistakes() {
        // Unknown qubit.
        let mut b = Circuit::builder(reg2());
        b.h("nope");
        assert!(matches!(b.finish(), Err(Error::UnknownLabel(_))));

        // Parity on a single qubit.
        let mut b = Circuit::builder(reg2());
        b.parity("a", "a", "p");
        assert!(matches!(b.finish(), Err(Error::SameQubit(_))));

        // Condition on a bit that is bound only later.
        let mut b = Circuit::builder(reg2());
        b.x_if("a", BitExpr::bit("p")).parity("a", "b", "p");
        assert!(matches!(b.finish(), Err(Error::UnboundOutcomeBit(_))));

        // Reusing an outcome name.
        let mut b = Circuit::builder(reg2());
        b.parity("a", "b", "p").parity("a", "b", "p");
        assert!(matches!(b.finish(), Err(Error::DuplicateOutcomeBit(_))));

        // Acting on a discarded qubit.
        let mut b = Circuit::builder(reg2());
        b.discard("a").h("a");
        assert!(matches!(b.finish(), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn controlled_u_must_be_unitary() {
        let mut b = Circuit::builder(reg2());
        b.gate(Gate::controlled_u(
            "a",
            "b",
            [
                [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        ));
        assert!(matches!(b.finish(), Err(Error::NotUnitary)));
    }

    #[test]
    fn json_round_trip_preserves_circuits() {
        let mut b = Circuit::builder(
            QubitRegister::from_labels(&["q1", "q2", "anc"]).unwrap(),
        );
        b.mark_ancilla("anc");
        b.h("q1")
            .zrot("q2", 0.7)
            .cnot("q1", "anc")
            .parity("q1", "q2", "p1")
            .measure_z("anc", "a")
            .z_if("q2", BitExpr::parse("p1^a").unwrap())
            .discard("anc");
        let circuit = b.finish().unwrap();
        let text = circuit.to_json_string();
        let back = Circuit::from_json_str(&text).unwrap();
        assert_eq!(circuit, back);
    }

    #[test]
    fn json_matches_the_documented_shape() {
        let mut b = Circuit::builder(reg2());
        b.h("a").parity("a", "b", "p1").z_if("b", BitExpr::bit("p1"));
        let value = b.finish().unwrap().to_json_value();
        assert_eq!(value["steps"][0], serde_json::json!({"op": "H", "q": "a"}));
        assert_eq!(
            value["steps"][1],
            serde_json::json!({"op": "P", "q1": "a", "q2": "b", "out": "p1"})
        );
        assert_eq!(
            value["steps"][2],
            serde_json::json!({"op": "Z", "q": "b", "if": "p1"})
        );
    }
}

//! Parameterized pattern-state circuits.
//!
//! Variant A is the hardware-efficient layout: an RY on every qubit, then per
//! layer a CZ ladder followed by another full RY layer. Variant B trades
//! rotations for depth: an RY on every qubit, then per layer a CNOT/RY ladder
//! that rotates only the target of each CNOT.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    A,
    B,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::A => f.write_str("A"),
            Variant::B => f.write_str("B"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Variant::A),
            "B" | "b" => Ok(Variant::B),
            other => Err(Error::invalid(format!("unknown ansatz variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct AnsatzSpec {
    pub variant: Variant,
    pub qubits: usize,
    pub layers: usize,
}

#[derive(Deserialize)]
struct RawSpec {
    variant: Variant,
    qubits: usize,
    layers: usize,
}

impl TryFrom<RawSpec> for AnsatzSpec {
    type Error = Error;

    fn try_from(r: RawSpec) -> Result<Self> {
        AnsatzSpec::new(r.variant, r.qubits, r.layers)
    }
}

impl AnsatzSpec {
    pub fn new(variant: Variant, qubits: usize, layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::invalid("ansatz needs at least one layer"));
        }
        if !(2..=crate::qsim::MAX_QUBITS).contains(&qubits) {
            return Err(Error::invalid(format!(
                "ansatz needs 2..={} qubits, got {qubits}",
                crate::qsim::MAX_QUBITS
            )));
        }
        Ok(Self {
            variant,
            qubits,
            layers,
        })
    }

    /// Three-qubit spec.
    pub fn three(variant: Variant, layers: usize) -> Result<Self> {
        Self::new(variant, 3, layers)
    }

    pub fn param_count(&self) -> usize {
        param_count(self)
    }
}

impl fmt::Display for AnsatzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/q{}/L{}", self.variant, self.qubits, self.layers)
    }
}

/// Trainable angles in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// A: `n·(layers + 1)`; B: `n + layers·(n − 1)`.
pub fn param_count(spec: &AnsatzSpec) -> usize {
    let n = spec.qubits;
    match spec.variant {
        Variant::A => n * (spec.layers + 1),
        Variant::B => n + spec.layers * (n - 1),
    }
}

pub fn build_circuit(spec: &AnsatzSpec, params: &[f64]) -> Result<Circuit> {
    let expected = param_count(spec);
    if params.len() != expected {
        return Err(Error::invalid(format!(
            "ansatz {spec} takes {expected} parameters, got {}",
            params.len()
        )));
    }
    let n = spec.qubits;
    let mut theta = params.iter().copied();
    let mut next = move || theta.next().expect("length checked");
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Gate::ry(q, next()))?;
    }
    for _ in 0..spec.layers {
        match spec.variant {
            Variant::A => {
                for q in 0..n - 1 {
                    c.push(Gate::Cz(q, q + 1))?;
                }
                for q in 0..n {
                    c.push(Gate::ry(q, next()))?;
                }
            }
            Variant::B => {
                for q in 0..n - 1 {
                    c.push(Gate::cnot(q, q + 1))?;
                    c.push(Gate::ry(q + 1, next()))?;
                }
            }
        }
    }
    Ok(c)
}

/// `U(θ)|0…0⟩`.
pub fn pattern_state(spec: &AnsatzSpec, params: &[f64]) -> Result<StateVector> {
    let circuit = build_circuit(spec, params)?;
    let mut state = StateVector::zero(spec.qubits)?;
    crate::qsim::run_circuit_in_place(&mut state, &circuit)?;
    Ok(state)
}

/// Whether the built circuit contains a two-qubit gate.
pub fn can_entangle(spec: &AnsatzSpec) -> bool {
    build_circuit(spec, &vec![0.0; param_count(spec)])
        .map(|c| c.ops().iter().any(Gate::is_entangling))
        .unwrap_or(false)
}

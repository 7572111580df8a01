use std::fmt;

use num_complex::Complex64;

use super::state::{qubit_mask, StateVector};
use crate::error::{Error, Result};

/// Gates supported by the simulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    /// `exp(-iθY/2) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
    Ry { target: usize, theta: f64 },
    H(usize),
    X(usize),
    /// Symmetric controlled-Z.
    Cz(usize, usize),
    Cnot { control: usize, target: usize },
    /// Fredkin gate: swaps `a` and `b` when `control` is set.
    Cswap { control: usize, a: usize, b: usize },
}

impl Gate {
    pub fn ry(target: usize, theta: f64) -> Self {
        Gate::Ry { target, theta }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Gate::Cswap { control, a, b }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Ry { target, .. } | Gate::H(target) | Gate::X(target) => vec![target],
            Gate::Cz(a, b) => vec![a, b],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cswap { control, a, b } => vec![control, a, b],
        }
    }

    pub fn is_entangling(&self) -> bool {
        self.qubits().len() > 1
    }

    /// Checks that all qubit indices are distinct and fit in `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for (i, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::invalid(format!(
                    "{self}: qubit {q} out of range for {n_qubits}-qubit register"
                )));
            }
            if qs[..i].contains(&q) {
                return Err(Error::invalid(format!("{self}: repeated qubit {q}")));
            }
        }
        if let Gate::Ry { theta, .. } = self {
            if !theta.is_finite() {
                return Err(Error::invalid(format!("{self}: non-finite angle")));
            }
        }
        Ok(())
    }

    /// Applies the gate in place. Call [`validate`](Self::validate) first.
    pub(crate) fn apply_unchecked(&self, state: &mut StateVector) {
        let n = state.n_qubits();
        let amps = state.amplitudes_mut();
        match *self {
            Gate::Ry { target, theta } => {
                let (s, c) = (theta / 2.0).sin_cos();
                apply_real_1q(amps, qubit_mask(n, target), [[c, -s], [s, c]]);
            }
            Gate::H(target) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                apply_real_1q(amps, qubit_mask(n, target), [[h, h], [h, -h]]);
            }
            Gate::X(target) => {
                let m = qubit_mask(n, target);
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    amps.swap(i, i | m);
                }
            }
            Gate::Cz(a, b) => {
                let m = qubit_mask(n, a) | qubit_mask(n, b);
                for (i, amp) in amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let cm = qubit_mask(n, control);
                let tm = qubit_mask(n, target);
                for i in 0..amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        amps.swap(i, i | tm);
                    }
                }
            }
            Gate::Cswap { control, a, b } => {
                let cm = qubit_mask(n, control);
                let am = qubit_mask(n, a);
                let bm = qubit_mask(n, b);
                for i in 0..amps.len() {
                    // visit each |..a=1..b=0..⟩ / |..a=0..b=1..⟩ pair once
                    if i & cm != 0 && i & am != 0 && i & bm == 0 {
                        amps.swap(i, (i & !am) | bm);
                    }
                }
            }
        }
    }
}

fn apply_real_1q(amps: &mut [Complex64], mask: usize, m: [[f64; 2]; 2]) {
    for i in 0..amps.len() {
        if i & mask == 0 {
            let (a0, a1) = (amps[i], amps[i | mask]);
            amps[i] = a0 * m[0][0] + a1 * m[0][1];
            amps[i | mask] = a0 * m[1][0] + a1 * m[1][1];
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Ry { target, theta } => write!(f, "RY({theta})[{target}]"),
            Gate::H(q) => write!(f, "H[{q}]"),
            Gate::X(q) => write!(f, "X[{q}]"),
            Gate::Cz(a, b) => write!(f, "CZ[{a},{b}]"),
            Gate::Cnot { control, target } => write!(f, "CNOT[{control}->{target}]"),
            Gate::Cswap { control, a, b } => write!(f, "CSWAP[{control}: {a}<->{b}]"),
        }
    }
}

/// An ordered gate list bound to a register size.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn from_ops(n_qubits: usize, ops: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: Gate) -> Result<&mut Self> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Returns `U|state⟩` for a single gate.
pub fn apply_gate(state: &StateVector, op: &Gate) -> Result<StateVector> {
    op.validate(state.n_qubits())?;
    let mut out = state.clone();
    op.apply_unchecked(&mut out);
    Ok(out)
}

/// Applies every gate of `circuit` in order.
pub fn run_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    let mut out = state.clone();
    run_circuit_in_place(&mut out, circuit)?;
    Ok(out)
}

pub fn run_circuit_in_place(state: &mut StateVector, circuit: &Circuit) -> Result<()> {
    if circuit.n_qubits != state.n_qubits() {
        return Err(Error::invalid(format!(
            "circuit acts on {} qubits but state has {}",
            circuit.n_qubits,
            state.n_qubits()
        )));
    }
    for op in &circuit.ops {
        op.apply_unchecked(state);
    }
    Ok(())
}

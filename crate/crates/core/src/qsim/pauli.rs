use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::state::{qubit_mask, StateVector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Weighted Pauli string `ω·P₀⊗P₁⊗…`, one factor per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub weight: f64,
    pub paulis: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(weight: f64, paulis: Vec<Pauli>) -> Self {
        Self { weight, paulis }
    }

    /// Parses a string such as `"ZIX"`.
    pub fn parse(weight: f64, s: &str) -> Result<Self> {
        let paulis = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::invalid(format!("unknown Pauli symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { weight, paulis })
    }
}

impl FromStr for PauliTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(1.0, s)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·", self.weight)?;
        for p in &self.paulis {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

/// `ω·⟨ψ|P|ψ⟩`.
pub fn pauli_expectation(state: &StateVector, term: &PauliTerm) -> Result<f64> {
    let n = state.n_qubits();
    if term.paulis.len() != n {
        return Err(Error::invalid(format!(
            "Pauli string {term} has length {} but state has {n} qubits",
            term.paulis.len()
        )));
    }
    // P|i⟩ = phase(i)·|i ^ flip|
    let mut flip = 0usize;
    let mut z_mask = 0usize;
    let mut y_count = 0u32;
    for (q, p) in term.paulis.iter().enumerate() {
        let m = qubit_mask(n, q);
        match p {
            Pauli::I => {}
            Pauli::X => flip |= m,
            Pauli::Y => {
                flip |= m;
                z_mask |= m;
                y_count += 1;
            }
            Pauli::Z => z_mask |= m,
        }
    }
    // Y = i·X·Z, so Y-factors contribute i^{#Y} · (-1)^{bit} on the input bit
    let global = Complex64::i().powu(y_count);
    let a = state.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &ai) in a.iter().enumerate() {
        if ai.norm_sqr() == 0.0 {
            continue;
        }
        let sign = if (i & z_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += a[i ^ flip].conj() * ai * sign;
    }
    let value = global * acc * term.weight;
    Ok(value.re)
}

/// `Σ_j ω_j⟨ψ|P_j|ψ⟩`.
pub fn hamiltonian_expectation(state: &StateVector, terms: &[PauliTerm]) -> Result<f64> {
    terms.iter().map(|t| pauli_expectation(state, t)).sum()
}

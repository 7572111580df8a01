//! Exact dense statevector simulation for small registers.
//!
//! All routines use the convention that qubit 0 is the most significant bit
//! of a basis index.

mod density;
mod gate;
mod pauli;
mod state;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use density::{partial_trace, purity, DensityMatrix};
pub use gate::{apply_gate, run_circuit, run_circuit_in_place, Circuit, Gate};
pub use pauli::{hamiltonian_expectation, pauli_expectation, Pauli, PauliTerm};
pub use state::{StateVector, MAX_QUBITS, NORM_TOL};

use crate::error::{Error, Result};

/// Measurement distribution over computational basis states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    /// Validates non-negativity and `Σp = 1` within [`NORM_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("empty distribution"));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::invalid(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("probabilities sum to {total}")));
        }
        Ok(Self(probs))
    }

    /// Divides by the total so the result sums to one.
    pub fn renormalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::invalid("cannot renormalize zero weights"));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
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

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `p_i = |α_i|²`.
pub fn probabilities(state: &StateVector) -> ProbDist {
    ProbDist(state.amplitudes().iter().map(|a| a.norm_sqr()).collect())
}

/// Draws `shots` computational-basis measurements.
///
/// The stream is `ChaCha8Rng::seed_from_u64(seed)`; each shot consumes one
/// `f64` in `[0, 1)` and selects the first index whose cumulative probability
/// exceeds it. The mapping is stable for a given release.
pub fn sample_counts(state: &StateVector, shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let probs = probabilities(state);
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs.as_slice() {
        acc += p;
        cdf.push(acc);
    }
    let last_nonzero = probs.as_slice().iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random();
        let idx = cdf.partition_point(|&c| c <= u).min(last_nonzero);
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Empirical distribution from [`sample_counts`].
pub fn sampled_probabilities(state: &StateVector, shots: u64, seed: u64) -> Result<ProbDist> {
    let counts = sample_counts(state, shots, seed)?;
    let mut p = vec![0.0; state.dim()];
    for (idx, c) in counts {
        p[idx] = c as f64 / shots as f64;
    }
    ProbDist::renormalized(p)
}

/// `⟨a|b⟩ = Σ conj(a_i)·b_i`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::invalid(format!(
            "inner product of {}- and {}-qubit states",
            a.n_qubits(),
            b.n_qubits()
        )));
    }
    Ok(a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x.conj() * y).sum())
}

use num_complex::Complex64;

use super::state::{qubit_mask, StateVector};
use crate::error::{Error, Result};

/// Square complex matrix stored row-major, used for reduced states.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        let dim = a.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(a[r] * a[c].conj());
            }
        }
        Self { dim, entries }
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρρ) = Σ_rc ρ_rc ρ_cr = Σ_rc |ρ_rc|² for Hermitian ρ
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// For a rank-one `ρ = |φ⟩⟨φ|`, recovers `|φ⟩` up to global phase from
    /// the column with the largest diagonal weight. For mixed input this is
    /// the normalized projection of that column, not an eigenvector.
    pub fn dominant_pure_state(&self) -> Result<StateVector> {
        let col = (0..self.dim)
            .max_by(|&a, &b| self.get(a, a).re.total_cmp(&self.get(b, b).re))
            .ok_or_else(|| Error::invalid("empty density matrix"))?;
        StateVector::normalized((0..self.dim).map(|r| self.get(r, col)).collect())
    }
}

/// Alias for [`DensityMatrix::purity`].
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Reduced density matrix of the qubits in `keep`, tracing out the rest.
///
/// The kept qubits are ordered ascending in the result (lowest index is the
/// most significant bit), independent of the order in `keep`.
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    if keep.is_empty() {
        return Err(Error::invalid("partial trace needs at least one kept qubit"));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::invalid(format!("duplicate qubits in keep set {keep:?}")));
    }
    if let Some(&q) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::invalid(format!("qubit {q} out of range for {n}-qubit state")));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    let compose = |sub: usize, subset: &[usize]| -> usize {
        subset
            .iter()
            .enumerate()
            .filter(|(pos, _)| sub & (1 << (subset.len() - 1 - pos)) != 0)
            .fold(0, |acc, (_, &q)| acc | qubit_mask(n, q))
    };

    let dim = 1usize << kept.len();
    let env_dim = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..dim).map(|s| compose(s, &kept)).collect();
    let env_idx: Vec<usize> = (0..env_dim).map(|s| compose(s, &traced)).collect();

    let a = state.amplitudes();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for &e in &env_idx {
        for r in 0..dim {
            let ar = a[kept_idx[r] | e];
            if ar.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..dim {
                entries[r * dim + c] += ar * a[kept_idx[c] | e].conj();
            }
        }
    }
    Ok(DensityMatrix { dim, entries })
}

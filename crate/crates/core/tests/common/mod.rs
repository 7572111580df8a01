//! Independent oracles shared by the integration tests: dense matrices built
//! from Kronecker products, SVD-based Schmidt ranks and reduced density
//! matrices computed with nalgebra.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqcredit::qsim::{Circuit, Gate, StateVector};

pub type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn m2(a: f64, b: f64, c: f64, d: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[a.into(), b.into(), c.into(), d.into()])
}

pub fn identity() -> CMat {
    CMat::identity(2, 2)
}

pub fn pauli_x() -> CMat {
    m2(0.0, 1.0, 1.0, 0.0)
}

pub fn pauli_y() -> CMat {
    let i = Complex64::i();
    CMat::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> CMat {
    m2(1.0, 0.0, 0.0, -1.0)
}

pub fn proj0() -> CMat {
    m2(1.0, 0.0, 0.0, 0.0)
}

pub fn proj1() -> CMat {
    m2(0.0, 0.0, 0.0, 1.0)
}

pub fn hadamard() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    m2(s, s, s, -s)
}

/// `exp(−iθY/2)` via the matrix exponential of the Pauli generator.
pub fn ry(theta: f64) -> CMat {
    let (s, c) = (theta / 2.0).sin_cos();
    identity() * Complex64::from(c) - pauli_y() * (Complex64::i() * s)
}

/// `⊗_q ops[q]` with qubit 0 as the leftmost (most significant) factor.
pub fn kron_all(ops: &[CMat]) -> CMat {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, m| acc.kronecker(m))
}

/// Operator acting as `factors` on the listed qubits and as identity elsewhere.
fn embed(n: usize, factors: &[(usize, CMat)]) -> CMat {
    let ops: Vec<CMat> = (0..n)
        .map(|q| {
            factors
                .iter()
                .find(|(t, _)| *t == q)
                .map_or_else(identity, |(_, m)| m.clone())
        })
        .collect();
    kron_all(&ops)
}

/// Dense `2^n × 2^n` matrix of a gate, written as a sum of tensor products.
pub fn gate_matrix(gate: &Gate, n: usize) -> CMat {
    match *gate {
        Gate::Ry { target, theta } => embed(n, &[(target, ry(theta))]),
        Gate::H(t) => embed(n, &[(t, hadamard())]),
        Gate::X(t) => embed(n, &[(t, pauli_x())]),
        Gate::Cz(a, b) => embed(n, &[(a, proj0())]) + embed(n, &[(a, proj1()), (b, pauli_z())]),
        Gate::Cnot { control, target } => {
            embed(n, &[(control, proj0())]) + embed(n, &[(control, proj1()), (target, pauli_x())])
        }
        Gate::Cswap { control, a, b } => {
            // SWAP = ½(II + XX + YY + ZZ)
            let swap = (embed(n, &[])
                + embed(n, &[(a, pauli_x()), (b, pauli_x())])
                + embed(n, &[(a, pauli_y()), (b, pauli_y())])
                + embed(n, &[(a, pauli_z()), (b, pauli_z())]))
                * Complex64::from(0.5);
            embed(n, &[(control, proj0())]) + embed(n, &[(control, proj1())]) * swap
        }
    }
}

pub fn circuit_matrix(circuit: &Circuit) -> CMat {
    let n = circuit.n_qubits();
    circuit
        .ops()
        .iter()
        .fold(CMat::identity(1 << n, 1 << n), |acc, g| gate_matrix(g, n) * acc)
}

pub fn apply_matrix(m: &CMat, state: &StateVector) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    (m * v).iter().copied().collect()
}

/// Uniform-ish random complex state (normalized box samples).
pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

pub fn random_real_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
        .collect();
    StateVector::normalized(amps).unwrap()
}

/// A random single-qubit unitary `Rz(a)·Ry(b)·Rz(c)` up to phase.
pub fn random_unitary_1q(rng: &mut impl Rng) -> CMat {
    let rz = |phi: f64| {
        let e = Complex64::from_polar(1.0, phi / 2.0);
        CMat::from_row_slice(2, 2, &[e.conj(), ZERO, ZERO, e])
    };
    let [a, b, c]: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..std::f64::consts::TAU));
    rz(a) * ry(b) * rz(c)
}

/// Tensor product of random single-qubit states.
pub fn random_product_state(rng: &mut impl Rng, n: usize) -> StateVector {
    (1..n).fold(random_state(rng, 1), |acc, _| acc.tensor(&random_state(rng, 1)).unwrap())
}

pub fn random_gate(rng: &mut impl Rng, n: usize) -> Gate {
    let kinds = match n {
        1 => 3,
        2 => 5,
        _ => 6,
    };
    let kind = rng.random_range(0..kinds);
    let theta = rng.random_range(-7.0..7.0);
    let mut qs: Vec<usize> = Vec::new();
    while qs.len() < 3.min(n) {
        let q = rng.random_range(0..n);
        if !qs.contains(&q) {
            qs.push(q);
        }
    }
    let distinct = |k: usize| qs[..k].to_vec();
    match kind {
        0 => {
            Gate::ry(distinct(1)[0], theta)
        }
        1 => Gate::H(distinct(1)[0]),
        2 => Gate::X(distinct(1)[0]),
        3 => {
            let q = distinct(2);
            Gate::Cz(q[0], q[1])
        }
        4 => {
            let q = distinct(2);
            Gate::cnot(q[0], q[1])
        }
        _ => {
            let q = distinct(3);
            Gate::cswap(q[0], q[1], q[2])
        }
    }
}

pub fn random_circuit(rng: &mut impl Rng, n: usize, depth: usize) -> Circuit {
    let ops: Vec<Gate> = (0..depth).map(|_| random_gate(rng, n)).collect();
    Circuit::from_ops(n, ops).unwrap()
}

/// Amplitudes reshaped to `rows = side_a` index, `cols = rest` index.
fn reshape(state: &StateVector, side_a: &[usize]) -> CMat {
    let n = state.n_qubits();
    let side_b: Vec<usize> = (0..n).filter(|q| !side_a.contains(q)).collect();
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    let index = |i: usize, qs: &[usize]| qs.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
    let mut m = CMat::zeros(1 << side_a.len(), 1 << side_b.len());
    for (i, &a) in state.amplitudes().iter().enumerate() {
        m[(index(i, side_a), index(i, &side_b))] = a;
    }
    m
}

/// Schmidt coefficients across `side_a | rest`, descending.
pub fn schmidt_values(state: &StateVector, side_a: &[usize]) -> Vec<f64> {
    let mut s: Vec<f64> = reshape(state, side_a).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Entangled across the cut iff the second Schmidt coefficient exceeds 1e-7.
pub fn schmidt_entangled(state: &StateVector, side_a: &[usize]) -> bool {
    schmidt_values(state, side_a).get(1).is_some_and(|&s| s > 1e-7)
}

/// `ρ_A = M·M†` of the reshaped amplitude matrix.
pub fn reduced_density(state: &StateVector, keep: &[usize]) -> CMat {
    let m = reshape(state, keep);
    &m * m.adjoint()
}

/// Brute-force entangled groups of a 3-qubit state from Schmidt ranks.
pub fn oracle_groups(state: &StateVector) -> Vec<Vec<usize>> {
    let separable: Vec<usize> = (0..3).filter(|&q| !schmidt_entangled(state, &[q])).collect();
    match separable.as_slice() {
        [] => vec![vec![0, 1, 2]],
        [q] => {
            let pair: Vec<usize> = (0..3).filter(|r| r != q).collect();
            // with q factored out, the cut {p0} | {p1, q} sees only the pair
            if schmidt_entangled(state, &[pair[0]]) {
                vec![pair]
            } else {
                vec![]
            }
        }
        _ => vec![],
    }
}

/// Random 3-qubit states covering every entanglement class: generic,
/// product, and an entangled pair next to a product qubit in each position.
pub fn mixed_structure_state(rng: &mut impl Rng, kind: usize) -> StateVector {
    match kind % 5 {
        0 => random_state(rng, 3),
        1 => random_product_state(rng, 3),
        k => {
            let lone = random_state(rng, 1);
            let pair = random_state(rng, 2);
            match k {
                2 => lone.tensor(&pair).unwrap(),
                3 => pair.tensor(&lone).unwrap(),
                _ => {
                    // pair on (0, 2): permute |p q l⟩ → |p l q⟩
                    let s = pair.tensor(&lone).unwrap();
                    let a = s.amplitudes();
                    let amps = (0..8)
                        .map(|i: usize| {
                            let (b0, b1, b2) = (i >> 2 & 1, i >> 1 & 1, i & 1);
                            a[b0 << 2 | b2 << 1 | b1]
                        })
                        .collect();
                    StateVector::from_amplitudes(amps).unwrap()
                }
            }
        }
    }
}

pub fn complex_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

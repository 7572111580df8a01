//! Distance-based classification against trained pattern states.
//!
//! Each sample is compared with the pattern state of every cluster of every
//! class. A cluster accepts the sample when the distance lies strictly inside
//! its range `(Δ, ε)`. Accepted pairs form the classified set C, rejected
//! `(sample, class)` pairs the unrecognized set U, which is then filtered of
//! samples that C already places in their true class.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ansatz::{pattern_state, AnsatzSpec};
use crate::encoding::{EncodedSample, MinMaxScaler};
use crate::error::{Error, Result};
use crate::qsim::{inner_product, probabilities, run_circuit_in_place, Circuit, Gate, StateVector};
use crate::training::{cost_slices, OptimizerConfig, TrainedCluster};

pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceMode {
    /// Sum of absolute differences of the measurement distributions.
    #[serde(rename = "COST_F")]
    CostF,
    /// `2·(1 − P0)` of a SWAP test on the full registers.
    #[serde(rename = "SWAP_GLOBAL")]
    SwapGlobal,
    /// `2·(1 − min_i P0_i)` over qubit-wise SWAP tests.
    #[serde(rename = "SWAP_PER_QUBIT")]
    SwapPerQubit,
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::CostF => "COST_F",
            DistanceMode::SwapGlobal => "SWAP_GLOBAL",
            DistanceMode::SwapPerQubit => "SWAP_PER_QUBIT",
        })
    }
}

impl std::str::FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "COST_F" => Ok(DistanceMode::CostF),
            "SWAP_GLOBAL" => Ok(DistanceMode::SwapGlobal),
            "SWAP_PER_QUBIT" => Ok(DistanceMode::SwapPerQubit),
            _ => Err(Error::invalid(format!("unknown distance mode {s:?}"))),
        }
    }
}

/// Provenance stored alongside a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    pub clusters_per_class: usize,
    pub tuned: bool,
    /// Creation timestamp, only written when explicitly requested so that
    /// model files stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub version: u32,
    pub ansatz: AnsatzSpec,
    pub distance_mode: DistanceMode,
    pub clusters: Vec<TrainedCluster>,
    /// Min-max scaler fitted on the training data, used to encode new data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<MinMaxScaler>,
    pub metadata: ModelMetadata,
}

impl TrainedModel {
    pub fn validate(&self) -> Result<()> {
        let d = self.ansatz.param_count();
        for c in &self.clusters {
            if c.theta.len() != d {
                return Err(Error::Model(format!(
                    "cluster ({}, {}) has {} angles, ansatz {} needs {d}",
                    c.class,
                    c.cluster,
                    c.theta.len(),
                    self.ansatz
                )));
            }
            if c.class > crate::encoding::BLOCK {
                return Err(Error::Model(format!("cluster class {} is not 0 or 1", c.class)));
            }
            if !(c.delta >= 0.0 && c.delta < c.epsilon) {
                return Err(Error::Model(format!(
                    "cluster ({}, {}) has invalid range ({}, {})",
                    c.class, c.cluster, c.delta, c.epsilon
                )));
            }
        }
        if self.clusters.is_empty() {
            return Err(Error::Model("model has no clusters".into()));
        }
        Ok(())
    }

    /// `U(θ)|0…0⟩` for every cluster, in cluster order.
    pub fn pattern_states(&self) -> Result<Vec<StateVector>> {
        self.clusters
            .iter()
            .map(|c| pattern_state(&self.ansatz, c.theta.as_slice()))
            .collect()
    }
}

/// SWAP test probability of reading 0 on the ancilla, simulated on the
/// register `|anc⟩|ψ⟩|φ⟩`: H on the ancilla, a controlled swap of each
/// qubit pair, H again.
pub fn swap_test_p0(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    let n = psi.n_qubits();
    if phi.n_qubits() != n {
        return Err(Error::invalid(format!(
            "SWAP test of {n}- and {}-qubit states",
            phi.n_qubits()
        )));
    }
    let mut reg = StateVector::zero(1)?.tensor(psi)?.tensor(phi)?;
    let mut circ = Circuit::new(2 * n + 1);
    circ.push(Gate::H(0))?;
    for q in 0..n {
        circ.push(Gate::cswap(0, 1 + q, 1 + n + q))?;
    }
    circ.push(Gate::H(0))?;
    run_circuit_in_place(&mut reg, &circ)?;
    Ok(marginal_zero(&reg, 0))
}

/// Closed form `½ + ½|⟨ψ|φ⟩|²`.
pub fn swap_test_p0_formula(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(0.5 + 0.5 * inner_product(psi, phi)?.norm_sqr())
}

/// Probability that qubit `q` reads 0, relative to the register's total
/// norm so that rounding in the gates (two factors of 1/√2 per Hadamard
/// pair) does not push the result past its exact values.
fn marginal_zero(state: &StateVector, q: usize) -> f64 {
    let mask = 1usize << (state.n_qubits() - 1 - q);
    let (mut zero, mut one) = (0.0, 0.0);
    for (i, a) in state.amplitudes().iter().enumerate() {
        if i & mask == 0 {
            zero += a.norm_sqr();
        } else {
            one += a.norm_sqr();
        }
    }
    zero / (zero + one)
}

/// Qubit-wise SWAP tests on the 9-qubit register
/// `|pattern⟩(q0..q2) |sample⟩(q3..q5) |ancillas⟩(q6..q8)`; ancilla `i`
/// compares pattern qubit `i` with sample qubit `i`. Returns the three
/// ancilla-0 probabilities.
pub fn per_qubit_swap_test(pattern: &StateVector, sample: &StateVector) -> Result<[f64; 3]> {
    if pattern.n_qubits() != 3 || sample.n_qubits() != 3 {
        return Err(Error::invalid(format!(
            "per-qubit SWAP test needs two 3-qubit states, got {} and {}",
            pattern.n_qubits(),
            sample.n_qubits()
        )));
    }
    let mut reg = pattern.tensor(sample)?.tensor(&StateVector::zero(3)?)?;
    let mut circ = Circuit::new(9);
    for i in 0..3 {
        circ.push(Gate::H(6 + i))?;
        circ.push(Gate::cswap(6 + i, i, 3 + i))?;
        circ.push(Gate::H(6 + i))?;
    }
    run_circuit_in_place(&mut reg, &circ)?;
    Ok([marginal_zero(&reg, 6), marginal_zero(&reg, 7), marginal_zero(&reg, 8)])
}

/// Distance in `[0, 2]` between a pattern state and a sample state.
pub fn state_distance(mode: DistanceMode, pattern: &StateVector, sample: &StateVector) -> Result<f64> {
    let d = match mode {
        DistanceMode::CostF => cost_slices(probabilities(pattern).as_slice(), probabilities(sample).as_slice())?,
        DistanceMode::SwapGlobal => 2.0 * (1.0 - swap_test_p0(pattern, sample)?),
        DistanceMode::SwapPerQubit => {
            let p = per_qubit_swap_test(pattern, sample)?;
            2.0 * (1.0 - p.into_iter().fold(f64::INFINITY, f64::min))
        }
    };
    Ok(d.clamp(0.0, 2.0))
}

/// Distance between the pattern of `cluster` (under `model`'s ansatz) and
/// `sample`.
pub fn distance(model: &TrainedModel, cluster: &TrainedCluster, sample: &EncodedSample) -> Result<f64> {
    let pattern = pattern_state(&model.ansatz, cluster.theta.as_slice())?;
    state_distance(model.distance_mode, &pattern, &sample.state)
}

/// `[sample][cluster]` distances.
pub fn distance_matrix(model: &TrainedModel, samples: &[EncodedSample]) -> Result<Vec<Vec<f64>>> {
    let patterns = model.pattern_states()?;
    samples
        .par_iter()
        .map(|s| {
            patterns
                .iter()
                .map(|p| state_distance(model.distance_mode, p, &s.state))
                .collect()
        })
        .collect()
}

/// Range membership `Δ < d < ε`, plus acceptance of an exact match when
/// `Δ = 0` (a sample identical to the pattern is never rejected).
pub fn accepts(cluster: &TrainedCluster, d: f64) -> bool {
    (cluster.delta < d && d < cluster.epsilon) || (d == 0.0 && cluster.delta == 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FinalClass {
    Class(u8),
    Unrecognized,
}

impl fmt::Display for FinalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinalClass::Class(k) => write!(f, "{k}"),
            FinalClass::Unrecognized => f.write_str("UNRECOGNIZED"),
        }
    }
}

/// A cluster accepting a sample: an element of C.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Acceptance {
    pub sample: usize,
    pub true_label: u8,
    pub class: u8,
    pub cluster: usize,
    pub distance: f64,
}

/// A `(sample, class)` probe rejected by some cluster of that class: an
/// element of U.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Rejection {
    pub sample: usize,
    pub true_label: u8,
    pub class: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationOutcome {
    pub sample_index: usize,
    pub true_label: u8,
    /// `(class, cluster)` pairs whose range matched.
    pub assigned: Vec<(u8, usize)>,
    pub final_class: FinalClass,
    /// Distance to each cluster, in model cluster order.
    pub distances: Vec<((u8, usize), f64)>,
    /// Accepted by both classes at the same minimum distance.
    pub tie: bool,
}

impl ClassificationOutcome {
    pub fn min_distance(&self) -> f64 {
        self.distances.iter().map(|(_, d)| *d).fold(f64::INFINITY, f64::min)
    }

    /// Accepted by at least one cluster of a class other than the true one.
    pub fn falsely_accepted(&self) -> bool {
        self.assigned.iter().any(|(k, _)| *k != self.true_label)
    }
}

/// Picks the class among accepting clusters: the single class if only one
/// accepts, otherwise the class of the closest accepting cluster, with exact
/// ties resolved toward class 1 (block the sale).
fn resolve(accepted: impl IntoIterator<Item = (u8, f64)>) -> (FinalClass, bool) {
    let mut best = [f64::INFINITY; 2];
    for (k, d) in accepted {
        let slot = &mut best[usize::from(k.min(1))];
        *slot = slot.min(d);
    }
    match (best[0].is_finite(), best[1].is_finite()) {
        (false, false) => (FinalClass::Unrecognized, false),
        (true, false) => (FinalClass::Class(0), false),
        (false, true) => (FinalClass::Class(1), false),
        (true, true) if best[0] < best[1] => (FinalClass::Class(0), false),
        (true, true) => (FinalClass::Class(1), best[0] == best[1]),
    }
}

fn outcome_for(clusters: &[TrainedCluster], sample: usize, true_label: u8, row: &[f64]) -> ClassificationOutcome {
    let assigned: Vec<(u8, usize)> = clusters
        .iter()
        .zip(row)
        .filter(|(c, &d)| accepts(c, d))
        .map(|(c, _)| (c.class, c.cluster))
        .collect();
    let (final_class, tie) = resolve(
        clusters
            .iter()
            .zip(row)
            .filter(|(c, &d)| accepts(c, d))
            .map(|(c, &d)| (c.class, d)),
    );
    ClassificationOutcome {
        sample_index: sample,
        true_label,
        assigned,
        final_class,
        distances: clusters.iter().zip(row).map(|(c, &d)| ((c.class, c.cluster), d)).collect(),
        tie,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Tally {
    pub correct: usize,
    pub falsely_accepted: usize,
    pub unrecognized: usize,
}

/// Scores a distance table under the given thresholds without building
/// outcomes.
pub(crate) fn tally(clusters: &[TrainedCluster], dists: &[Vec<f64>], labels: &[u8]) -> Tally {
    let mut t = Tally::default();
    for (row, &label) in dists.iter().zip(labels) {
        let accepted = clusters.iter().zip(row).filter(|(c, &d)| accepts(c, d));
        let (fc, _) = resolve(accepted.clone().map(|(c, &d)| (c.class, d)));
        match fc {
            FinalClass::Class(k) if k == label => t.correct += 1,
            FinalClass::Unrecognized => t.unrecognized += 1,
            FinalClass::Class(_) => {}
        }
        if accepted.into_iter().any(|(c, _)| c.class != label) {
            t.falsely_accepted += 1;
        }
    }
    t
}

/// The classification loop output.
#[derive(Clone, Debug, PartialEq)]
pub struct MvqeResult {
    pub classified: Vec<Acceptance>,
    /// U after filtration.
    pub unrecognized: BTreeSet<Rejection>,
    pub outcomes: Vec<ClassificationOutcome>,
}

/// Runs every sample against every cluster. Samples are processed in
/// parallel on the current rayon pool; output order follows `samples`.
pub fn mvqe_classify(model: &TrainedModel, samples: &[EncodedSample]) -> Result<MvqeResult> {
    let dists = distance_matrix(model, samples)?;
    let mut classified = Vec::new();
    let mut unrecognized = BTreeSet::new();
    for (s, row) in samples.iter().zip(&dists) {
        for (c, &d) in model.clusters.iter().zip(row) {
            if accepts(c, d) {
                classified.push(Acceptance {
                    sample: s.source_index,
                    true_label: s.label,
                    class: c.class,
                    cluster: c.cluster,
                    distance: d,
                });
            } else {
                unrecognized.insert(Rejection {
                    sample: s.source_index,
                    true_label: s.label,
                    class: c.class,
                });
            }
        }
    }
    let unrecognized = filter_unrecognized(&classified, &unrecognized);
    let outcomes = samples
        .iter()
        .zip(&dists)
        .map(|(s, row)| outcome_for(&model.clusters, s.source_index, s.label, row))
        .collect();
    Ok(MvqeResult {
        classified,
        unrecognized,
        outcomes,
    })
}

/// Drops from U every entry of a sample that C places in its true class.
pub fn filter_unrecognized(classified: &[Acceptance], unrecognized: &BTreeSet<Rejection>) -> BTreeSet<Rejection> {
    let correct: BTreeSet<usize> = classified
        .iter()
        .filter(|a| a.class == a.true_label)
        .map(|a| a.sample)
        .collect();
    unrecognized
        .iter()
        .filter(|r| !correct.contains(&r.sample))
        .copied()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub total: usize,
    pub accuracy: f64,
    /// Fraction of samples accepted by at least one wrong-class cluster.
    pub false_rate: f64,
    pub unrecognized_count: usize,
    pub tie_count: usize,
    pub outcomes: Vec<ClassificationOutcome>,
}

/// Accuracy counts unrecognized samples as wrong.
pub fn evaluate(model: &TrainedModel, samples: &[EncodedSample]) -> Result<ClassificationReport> {
    if samples.is_empty() {
        return Err(Error::invalid("cannot evaluate on an empty sample set"));
    }
    let result = mvqe_classify(model, samples)?;
    Ok(report_from_outcomes(result.outcomes))
}

pub fn report_from_outcomes(outcomes: Vec<ClassificationOutcome>) -> ClassificationReport {
    let total = outcomes.len();
    let correct = outcomes
        .iter()
        .filter(|o| o.final_class == FinalClass::Class(o.true_label))
        .count();
    let falsely = outcomes.iter().filter(|o| o.falsely_accepted()).count();
    let unrecognized_count = outcomes
        .iter()
        .filter(|o| o.final_class == FinalClass::Unrecognized)
        .count();
    let denom = total.max(1) as f64;
    ClassificationReport {
        total,
        accuracy: correct as f64 / denom,
        false_rate: falsely as f64 / denom,
        unrecognized_count,
        tie_count: outcomes.iter().filter(|o| o.tie).count(),
        outcomes,
    }
}

impl ClassificationReport {
    /// Per-sample CSV: `index,true_label,final_class,min_distance,accepting_clusters`
    /// where the last column lists `class:cluster` pairs separated by `;`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let ser = |e: csv::Error| Error::invalid(e.to_string());
        w.write_record(["index", "true_label", "final_class", "min_distance", "accepting_clusters"])
            .map_err(ser)?;
        for o in &self.outcomes {
            let accepting = o
                .assigned
                .iter()
                .map(|(k, l)| format!("{k}:{l}"))
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                o.sample_index.to_string(),
                o.true_label.to_string(),
                o.final_class.to_string(),
                o.min_distance().to_string(),
                accepting,
            ])
            .map_err(ser)?;
        }
        w.flush().map_err(|e| Error::io("<report>", e))?;
        Ok(())
    }

    /// Summary metrics plus the same per-sample rows as the CSV form.
    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .outcomes
            .iter()
            .map(|o| {
                serde_json::json!({
                    "index": o.sample_index,
                    "true_label": o.true_label,
                    "final_class": match o.final_class {
                        FinalClass::Class(k) => Value::from(k),
                        FinalClass::Unrecognized => Value::from("UNRECOGNIZED"),
                    },
                    "min_distance": o.min_distance(),
                    "accepting_clusters": o.assigned.iter().map(|(k, l)| [u64::from(*k), *l as u64]).collect::<Vec<_>>(),
                    "tie": o.tie,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "total": self.total,
            "accuracy": self.accuracy,
            "false_rate": self.false_rate,
            "unrecognized_count": self.unrecognized_count,
            "tie_count": self.tie_count,
            "rows": rows,
        });
        serde_json::to_string_pretty(&doc).map_err(|e| Error::invalid(e.to_string()))
    }

    /// Writes JSON when `path` ends in `.json`, CSV otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
        } else {
            let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
            self.write_csv(std::io::BufWriter::new(f))
        }
    }
}

pub fn model_to_json(model: &TrainedModel) -> Result<String> {
    serde_json::to_string_pretty(model).map_err(|e| Error::Model(e.to_string()))
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_json(model)? + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}

/// Parses a model, reporting the path of the first offending field.
pub fn model_from_json(text: &str) -> Result<TrainedModel> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Model(format!("malformed JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Model("top level must be an object".into()))?;
    let field = |name: &str| -> Result<&Value> {
        obj.get(name)
            .ok_or_else(|| Error::Model(format!("{name}: missing field")))
    };
    fn parse<T: serde::de::DeserializeOwned>(path: &str, v: &Value) -> Result<T> {
        T::deserialize(v).map_err(|e| Error::Model(format!("{path}: {e}")))
    }

    let version: u32 = parse("version", field("version")?)?;
    if version != MODEL_VERSION {
        return Err(Error::Model(format!(
            "version: unsupported model version {version} (expected {MODEL_VERSION})"
        )));
    }
    let ansatz: AnsatzSpec = parse("ansatz", field("ansatz")?)?;
    let distance_mode: DistanceMode = parse("distance_mode", field("distance_mode")?)?;
    let clusters = field("clusters")?
        .as_array()
        .ok_or_else(|| Error::Model("clusters: expected an array".into()))?
        .iter()
        .enumerate()
        .map(|(i, v)| parse::<TrainedCluster>(&format!("clusters[{i}]"), v))
        .collect::<Result<Vec<_>>>()?;
    let scaler = match obj.get("scaler") {
        Some(v) => Some(parse::<MinMaxScaler>("scaler", v)?),
        None => None,
    };
    let metadata: ModelMetadata = parse("metadata", field("metadata")?)?;
    let model = TrainedModel {
        version,
        ansatz,
        distance_mode,
        clusters,
        scaler,
        metadata,
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::ansatz::{ParameterVector, Variant};

    fn cluster(class: u8, idx: usize, epsilon: f64) -> TrainedCluster {
        TrainedCluster {
            class,
            cluster: idx,
            theta: ParameterVector::zeros(5),
            epsilon,
            delta: 0.0,
            final_cost: 0.0,
        }
    }

    fn model(clusters: Vec<TrainedCluster>) -> TrainedModel {
        TrainedModel {
            version: MODEL_VERSION,
            ansatz: AnsatzSpec::three(Variant::B, 1).unwrap(),
            distance_mode: DistanceMode::CostF,
            clusters,
            scaler: None,
            metadata: ModelMetadata {
                seed: 1,
                optimizer: OptimizerConfig::default(),
                clusters_per_class: 1,
                tuned: false,
                created: None,
            },
        }
    }

    #[test]
    fn swap_test_examples() {
        let psi = StateVector::from_real(&[0.3, 0.1, 0.5, 0.2, 0.4, 0.0, 0.6, 0.3]).unwrap();
        assert!((swap_test_p0(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
        let z = StateVector::basis(1, 0).unwrap();
        let o = StateVector::basis(1, 1).unwrap();
        assert!((swap_test_p0(&z, &o).unwrap() - 0.5).abs() < 1e-15);
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        // ½ + ½·|1/√2|²
        let want = 0.5 + 0.5 * FRAC_1_SQRT_2 * FRAC_1_SQRT_2;
        assert!((swap_test_p0(&z, &plus).unwrap() - 0.75).abs() < 1e-12);
        assert!((want - 0.75).abs() < 1e-15);
        assert!(swap_test_p0(&z, &psi).is_err());
    }

    #[test]
    fn per_qubit_examples() {
        let s = StateVector::basis(3, 0b011).unwrap();
        let p = per_qubit_swap_test(&s, &s).unwrap();
        assert!(p.iter().all(|v| (v - 1.0).abs() < 1e-10));
        let p = per_qubit_swap_test(&StateVector::zero(3).unwrap(), &StateVector::basis(3, 7).unwrap()).unwrap();
        assert!(p.iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(per_qubit_swap_test(&StateVector::zero(2).unwrap(), &s).is_err());
    }

    #[test]
    fn distances_in_every_mode() {
        let s = StateVector::from_real(&[0.2, 0.4, 0.1, 0.0, 0.3, 0.5, 0.1, 0.0]).unwrap();
        let product = StateVector::basis(3, 5).unwrap();
        for mode in [DistanceMode::CostF, DistanceMode::SwapGlobal] {
            assert!(state_distance(mode, &s, &s).unwrap() < 1e-12);
        }
        assert!(state_distance(DistanceMode::SwapPerQubit, &product, &product).unwrap() < 1e-12);
        let z = StateVector::zero(3).unwrap();
        let o = StateVector::basis(3, 1).unwrap();
        assert!((state_distance(DistanceMode::SwapGlobal, &z, &o).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(state_distance(DistanceMode::CostF, &z, &o).unwrap(), 2.0);
    }

    #[test]
    fn acceptance_boundaries() {
        let c = cluster(1, 0, 0.5);
        assert!(accepts(&c, 0.1));
        assert!(!accepts(&c, 0.5));
        assert!(!accepts(&c, 0.7));
        // exact match falls back to acceptance when Δ = 0
        assert!(accepts(&c, 0.0));
        let shifted = TrainedCluster { delta: 0.05, ..c };
        assert!(!accepts(&shifted, 0.0));
        assert!(!accepts(&shifted, 0.05));
    }

    #[test]
    fn tie_rule() {
        assert_eq!(resolve([]), (FinalClass::Unrecognized, false));
        assert_eq!(resolve([(0, 0.3)]), (FinalClass::Class(0), false));
        assert_eq!(resolve([(0, 0.3), (1, 0.2)]), (FinalClass::Class(1), false));
        assert_eq!(resolve([(0, 0.1), (1, 0.2), (1, 0.4)]), (FinalClass::Class(0), false));
        assert_eq!(resolve([(0, 0.2), (1, 0.2)]), (FinalClass::Class(1), true));
    }

    #[test]
    fn filtration() {
        let c = vec![Acceptance {
            sample: 3,
            true_label: 1,
            class: 1,
            cluster: 0,
            distance: 0.1,
        }];
        let u: BTreeSet<Rejection> = [
            Rejection { sample: 3, true_label: 1, class: 0 },
            Rejection { sample: 4, true_label: 0, class: 1 },
        ]
        .into_iter()
        .collect();
        let f = filter_unrecognized(&c, &u);
        assert_eq!(f.len(), 1);
        assert_eq!(f.iter().next().unwrap().sample, 4);
        assert_eq!(filter_unrecognized(&c, &f), f);
        assert!(filter_unrecognized(&c, &BTreeSet::new()).is_empty());
    }

    #[test]
    fn classify_and_evaluate_small_model() {
        let m = model(vec![cluster(0, 0, 0.5), cluster(1, 0, 0.5)]);
        // both patterns are |000⟩ (θ = 0), so any sample near it is accepted by both classes
        let near = EncodedSample {
            state: StateVector::from_real(&[1.0, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(),
            label: 0,
            source_index: 0,
        };
        let far = EncodedSample {
            state: StateVector::basis(3, 6).unwrap(),
            label: 0,
            source_index: 1,
        };
        let r = evaluate(&m, &[near.clone(), far.clone()]).unwrap();
        assert_eq!(r.outcomes[0].final_class, FinalClass::Class(1));
        assert!(r.outcomes[0].tie);
        assert_eq!(r.outcomes[1].final_class, FinalClass::Unrecognized);
        assert_eq!(r.accuracy, 0.0);
        assert_eq!(r.false_rate, 0.5);
        assert_eq!(r.unrecognized_count, 1);
        assert!(evaluate(&m, &[]).is_err());

        let res = mvqe_classify(&m, &[near, far]).unwrap();
        assert_eq!(res.classified.len(), 2);
        // sample 1 rejected by both classes, sample 0 never rejected
        assert_eq!(res.unrecognized.len(), 2);
    }

    #[test]
    fn model_json_round_trip_and_errors() {
        let mut m = model(vec![cluster(0, 0, 0.5), cluster(1, 3, 0.25)]);
        m.clusters[0].theta = ParameterVector(vec![0.1, -2.5, 1e-17, std::f64::consts::PI, 7.123456789012345]);
        let text = model_to_json(&m).unwrap();
        assert_eq!(model_from_json(&text).unwrap(), m);

        let err = model_from_json(&text[..text.len() / 2]).unwrap_err();
        assert!(err.to_string().contains("malformed"), "{err}");

        let bad = text.replace("\"COST_F\"", "\"HAMMING\"");
        let err = model_from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("distance_mode"), "{err}");

        let bad = text.replace("\"version\": 1", "\"version\": 2");
        assert!(model_from_json(&bad).unwrap_err().to_string().contains("version"));

        let bad = text.replacen("\"theta\"", "\"angles\"", 1);
        let err = model_from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("clusters[0]"), "{err}");
    }
}

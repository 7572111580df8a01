//! Entanglement structure of 3-qubit samples by partition division.
//!
//! A pure state is entangled across a cut iff the reduced state of either
//! side is mixed. Testing the three single-qubit cuts tells apart a genuinely
//! tripartite state, a separable qubit next to an entangled pair, and a full
//! product state.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::encoding::EncodedSample;
use crate::error::{Error, Result};
use crate::qsim::{partial_trace, StateVector};

/// Purity deficit above which a cut counts as entangled.
pub const PURITY_TOL: f64 = 1e-7;

/// Whether `state` is entangled across the cut `side_a | side_b`.
pub fn bipartition_entangled(state: &StateVector, side_a: &[usize], side_b: &[usize]) -> Result<bool> {
    let n = state.n_qubits();
    let mut all: Vec<usize> = side_a.iter().chain(side_b).copied().collect();
    all.sort_unstable();
    if side_a.is_empty() || side_b.is_empty() || all != (0..n).collect::<Vec<_>>() {
        return Err(Error::invalid(format!(
            "{side_a:?} | {side_b:?} is not a partition of {n} qubits into two non-empty sides"
        )));
    }
    Ok(cut_purity(state, side_a)? < 1.0 - PURITY_TOL)
}

fn cut_purity(state: &StateVector, keep: &[usize]) -> Result<f64> {
    Ok(partial_trace(state, keep)?.purity())
}

/// Qubits that are mutually entangled, e.g. `(0, 1, 2)` or `(1, 2)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Group(pub Vec<usize>);

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let inner: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        write!(f, "({})", inner.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub sample_index: usize,
    pub entangled_groups: BTreeSet<Group>,
    /// Purity of the reduced state of the single qubit on the left of each
    /// cut `{q} | rest`, keyed by the cut written as e.g. `"0|12"`.
    pub purities: BTreeMap<String, f64>,
}

/// Classifies the entanglement structure of a 3-qubit state.
pub fn detect_by_partition_division(state: &StateVector) -> Result<PartitionReport> {
    if state.n_qubits() != 3 {
        return Err(Error::invalid(format!(
            "partition division expects 3 qubits, got {}",
            state.n_qubits()
        )));
    }
    let mut purities = BTreeMap::new();
    let mut separable = Vec::new();
    for q in 0..3 {
        let p = cut_purity(state, &[q])?;
        let rest: String = (0..3).filter(|&r| r != q).map(|r| r.to_string()).collect();
        purities.insert(format!("{q}|{rest}"), p);
        if p >= 1.0 - PURITY_TOL {
            separable.push(q);
        }
    }

    let mut groups = BTreeSet::new();
    match separable.as_slice() {
        [] => {
            groups.insert(Group(vec![0, 1, 2]));
        }
        [q] => {
            let pair: Vec<usize> = (0..3).filter(|r| r != q).collect();
            // the pair's reduced state is pure once q factors out
            let residual = partial_trace(state, &pair)?.dominant_pure_state()?;
            let p = cut_purity(&residual, &[0])?;
            purities.insert(format!("{}|{}", pair[0], pair[1]), p);
            if p < 1.0 - PURITY_TOL {
                groups.insert(Group(pair));
            }
        }
        _ => {}
    }
    Ok(PartitionReport {
        sample_index: 0,
        entangled_groups: groups,
        purities,
    })
}

/// Entangled-group counts per class.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EntanglementSummary {
    pub per_class: BTreeMap<u8, BTreeMap<Group, usize>>,
    pub reports: Vec<PartitionReport>,
}

impl EntanglementSummary {
    /// `{"class0": {"(0,1,2)": n, ...}, "class1": {...}}`; both classes are
    /// always present, possibly empty.
    pub fn to_json(&self) -> serde_json::Value {
        let mut doc = serde_json::Map::new();
        for class in [0u8, 1] {
            let counts: serde_json::Map<String, serde_json::Value> = self
                .per_class
                .get(&class)
                .into_iter()
                .flatten()
                .map(|(g, n)| (g.to_string(), serde_json::Value::from(*n)))
                .collect();
            doc.insert(format!("class{class}"), serde_json::Value::Object(counts));
        }
        serde_json::Value::Object(doc)
    }
}

pub fn analyze_dataset(samples: &[EncodedSample]) -> Result<EntanglementSummary> {
    let mut summary = EntanglementSummary::default();
    for class in [0u8, 1] {
        summary.per_class.entry(class).or_default();
    }
    for s in samples {
        let mut report = detect_by_partition_division(&s.state)?;
        report.sample_index = s.source_index;
        let counts = summary.per_class.entry(s.label).or_default();
        for g in &report.entangled_groups {
            *counts.entry(g.clone()).or_insert(0) += 1;
        }
        summary.reports.push(report);
    }
    Ok(summary)
}

//! Learning per-cluster pattern states and their acceptance thresholds.

mod kmeans;
mod optim;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use kmeans::kmeans;
pub use optim::{minimize, nelder_mead_minimize, spsa_minimize, Method, OptimResult, OptimizerConfig};

use crate::ansatz::{param_count, pattern_state, AnsatzSpec, ParameterVector};
use crate::classify::{self, DistanceMode, ModelMetadata, TrainedModel};
use crate::encoding::{EncodedSample, MinMaxScaler};
use crate::error::{Error, Result};
use crate::mix_seed;
use crate::qsim::{probabilities, sampled_probabilities, ProbDist};

/// Acceptance threshold every cluster starts with.
pub const INITIAL_EPSILON: f64 = 0.5;
/// Lower end of the acceptance range.
pub const INITIAL_DELTA: f64 = 0.0;
/// Default slack applied to the widest member distance when tuning.
pub const DEFAULT_MARGIN: f64 = 0.05;
pub const DEFAULT_CLUSTERS_PER_CLASS: usize = 7;

/// Sum of absolute probability differences, `Σ_i |p_i − q_i|` (range `[0, 2]`).
pub fn cost_f(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    cost_slices(p.as_slice(), q.as_slice())
}

pub fn cost_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "distributions over {} and {} outcomes",
            p.len(),
            q.len()
        )));
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// A group of same-class samples that one pattern state should represent.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterTarget {
    pub class: u8,
    pub cluster: usize,
    /// `source_index` of each member sample.
    pub members: Vec<usize>,
    /// Renormalized mean of the members' measurement distributions.
    pub target: ProbDist,
}

/// k-means on the samples' measurement distributions (Euclidean).
///
/// All samples must share one label. Empty clusters are dropped, so fewer
/// than `lc` targets may come back.
pub fn cluster_samples(samples: &[EncodedSample], lc: usize, seed: u64) -> Result<Vec<ClusterTarget>> {
    let first = samples
        .first()
        .ok_or_else(|| Error::invalid("cannot cluster an empty sample set"))?;
    if let Some(s) = samples.iter().find(|s| s.label != first.label) {
        return Err(Error::invalid(format!(
            "sample {} has label {} but the group is class {}",
            s.source_index, s.label, first.label
        )));
    }
    if lc == 0 || lc > samples.len() {
        return Err(Error::invalid(format!(
            "cluster count {lc} must lie in 1..={} for class {}",
            samples.len(),
            first.label
        )));
    }
    let points: Vec<Vec<f64>> = samples.iter().map(|s| probabilities(&s.state).into_inner()).collect();
    let assign = kmeans(&points, lc, seed)?;
    let n_clusters = assign.iter().max().map_or(0, |m| m + 1);
    let dim = points[0].len();

    (0..n_clusters)
        .map(|c| {
            let mut sum = vec![0.0; dim];
            let mut members = Vec::new();
            for ((s, p), _) in samples.iter().zip(&points).zip(&assign).filter(|(_, &a)| a == c) {
                members.push(s.source_index);
                for (acc, x) in sum.iter_mut().zip(p) {
                    *acc += x;
                }
            }
            Ok(ClusterTarget {
                class: first.label,
                cluster: c,
                members,
                target: ProbDist::renormalized(sum)?,
            })
        })
        .collect()
}

/// Trained pattern for class `class`, case `cluster`, accepted in the open
/// range `(delta, epsilon)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedCluster {
    pub class: u8,
    pub cluster: usize,
    pub theta: ParameterVector,
    pub epsilon: f64,
    pub delta: f64,
    pub final_cost: f64,
}

/// Fits the ansatz so its measurement distribution matches `target.target`.
///
/// Runs `config.restarts` optimizations from angles drawn uniformly in
/// `[0, 2π)` and keeps the lowest cost; ties keep the earlier restart. All
/// randomness derives from `config.seed` and the cluster's (class, index).
pub fn train_cluster(spec: &AnsatzSpec, target: &ClusterTarget, config: &OptimizerConfig) -> Result<TrainedCluster> {
    config.validate()?;
    let base = mix_seed(mix_seed(config.seed, u64::from(target.class)), target.cluster as u64);
    let mut init_rng = ChaCha8Rng::seed_from_u64(base);
    let d = param_count(spec);
    let goal = target.target.as_slice();
    if goal.len() != 1 << spec.qubits {
        return Err(Error::invalid(format!(
            "target has {} outcomes but ansatz {spec} measures {}",
            goal.len(),
            1usize << spec.qubits
        )));
    }

    let mut best: Option<OptimResult> = None;
    for restart in 0..config.restarts {
        let theta0: Vec<f64> = (0..d).map(|_| init_rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let run_cfg = OptimizerConfig {
            seed: mix_seed(base, restart as u64 + 1),
            ..config.clone()
        };
        let mut evals = 0u64;
        let shots = config.shots;
        let shot_seed = mix_seed(run_cfg.seed, 0x5_407);
        let objective = |theta: &[f64]| -> f64 {
            evals += 1;
            let probs = pattern_state(spec, theta).and_then(|s| {
                if shots == 0 {
                    Ok(probabilities(&s))
                } else {
                    sampled_probabilities(&s, shots, mix_seed(shot_seed, evals))
                }
            });
            match probs {
                Ok(p) => cost_slices(p.as_slice(), goal).unwrap_or(f64::NAN),
                Err(_) => f64::NAN,
            }
        };
        let result = minimize(objective, &theta0, &run_cfg)?;
        log::debug!(
            "class {} cluster {} restart {restart}: cost {:.5}",
            target.class,
            target.cluster,
            result.cost
        );
        if best.as_ref().is_none_or(|b| result.cost < b.cost) {
            best = Some(result);
        }
    }
    let best = best.expect("restarts >= 1");
    // report the exact cost even when training used sampled distributions
    let final_cost = cost_slices(probabilities(&pattern_state(spec, &best.theta)?).as_slice(), goal)?;
    Ok(TrainedCluster {
        class: target.class,
        cluster: target.cluster,
        theta: ParameterVector(best.theta),
        epsilon: INITIAL_EPSILON,
        delta: INITIAL_DELTA,
        final_cost,
    })
}

/// Settings for [`train_model`].
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub ansatz: AnsatzSpec,
    pub optimizer: OptimizerConfig,
    pub clusters_per_class: usize,
    pub distance_mode: DistanceMode,
}

/// Clusters each class, trains one pattern per cluster and assembles an
/// untuned model (every ε = 0.5, Δ = 0). Clusters train in parallel on the
/// current rayon pool; the result does not depend on the thread count.
pub fn train_model(samples: &[EncodedSample], config: &TrainConfig, scaler: Option<MinMaxScaler>) -> Result<TrainedModel> {
    config.optimizer.validate()?;
    let mut targets = Vec::new();
    for class in [crate::encoding::ISSUE, crate::encoding::BLOCK] {
        let members: Vec<EncodedSample> = samples.iter().filter(|s| s.label == class).cloned().collect();
        if members.is_empty() {
            log::warn!("no training samples for class {class}");
            continue;
        }
        let lc = config.clusters_per_class.min(members.len());
        let seed = mix_seed(config.optimizer.seed, 0xC1A5_5000 + u64::from(class));
        targets.extend(cluster_samples(&members, lc, seed)?);
    }
    if targets.is_empty() {
        return Err(Error::invalid("no training samples"));
    }
    let clusters = targets
        .par_iter()
        .map(|t| train_cluster(&config.ansatz, t, &config.optimizer))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainedModel {
        version: classify::MODEL_VERSION,
        ansatz: config.ansatz,
        distance_mode: config.distance_mode,
        clusters,
        scaler,
        metadata: ModelMetadata {
            seed: config.optimizer.seed,
            optimizer: config.optimizer.clone(),
            clusters_per_class: config.clusters_per_class,
            tuned: false,
            created: None,
        },
    })
}

/// Re-derives every ε from the training data.
///
/// Each own-class sample belongs to its nearest own-class cluster; a
/// cluster's ε starts at its widest member distance times `1 + margin`.
/// Each ε is then lowered greedily to the observed distance that leaves the
/// fewest samples accepted by a wrong-class cluster, never at the cost of a
/// correct classification. Δ is left untouched.
pub fn tune_thresholds(model: &TrainedModel, train_samples: &[EncodedSample], margin: f64) -> Result<TrainedModel> {
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Error::invalid(format!("margin must be finite and >= 0, got {margin}")));
    }
    if train_samples.is_empty() {
        return Err(Error::invalid("threshold tuning needs training samples"));
    }
    let dists = classify::distance_matrix(model, train_samples)?;
    let labels: Vec<u8> = train_samples.iter().map(|s| s.label).collect();
    let mut clusters = model.clusters.clone();

    let mut widest = vec![None::<f64>; clusters.len()];
    for (row, &label) in dists.iter().zip(&labels) {
        let own = clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.class == label)
            .map(|(j, _)| (j, row[j]))
            .fold(None, |best: Option<(usize, f64)>, cur| match best {
                Some(b) if b.1 <= cur.1 => Some(b),
                _ => Some(cur),
            });
        if let Some((j, d)) = own {
            widest[j] = Some(widest[j].map_or(d, |w: f64| w.max(d)));
        }
    }
    for (c, w) in clusters.iter_mut().zip(&widest) {
        if let Some(w) = w {
            c.epsilon = (w * (1.0 + margin)).max(c.delta + f64::EPSILON);
        }
    }

    // on equal wrong-class counts the wider ε is kept
    let mut score = classify::tally(&clusters, &dists, &labels);
    for _pass in 0..8 {
        let mut changed = false;
        for j in 0..clusters.len() {
            let mut candidates: Vec<f64> = dists
                .iter()
                .map(|row| row[j])
                .filter(|&d| d > clusters[j].delta && d < clusters[j].epsilon)
                .collect();
            candidates.sort_by(|a, b| b.total_cmp(a));
            candidates.dedup();
            let current = clusters[j].epsilon;
            let mut best = (current, score);
            for cand in candidates {
                clusters[j].epsilon = cand;
                let t = classify::tally(&clusters, &dists, &labels);
                if t.correct >= score.correct && t.falsely_accepted < best.1.falsely_accepted {
                    best = (cand, t);
                }
            }
            clusters[j].epsilon = best.0;
            if best.0 != current {
                score = best.1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut tuned = model.clone();
    tuned.clusters = clusters;
    tuned.metadata.tuned = true;
    Ok(tuned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Variant;
    use crate::qsim::StateVector;

    fn sample(amps: &[f64], label: u8, idx: usize) -> EncodedSample {
        EncodedSample {
            state: StateVector::from_real(amps).unwrap(),
            label,
            source_index: idx,
        }
    }

    #[test]
    fn cost_f_examples() {
        let p = ProbDist::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(cost_f(&p, &p).unwrap(), 0.0);
        let a = ProbDist::new(vec![1.0, 0.0]).unwrap();
        let b = ProbDist::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(cost_f(&a, &b).unwrap(), 2.0);
        let x = ProbDist::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let y = ProbDist::new(vec![0.25; 4]).unwrap();
        assert!((cost_f(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        assert!(cost_f(&a, &y).is_err());
    }

    #[test]
    fn single_cluster_target_is_class_mean() {
        let s = vec![sample(&[1.0, 0.0], 0, 0), sample(&[0.0, 1.0], 0, 1), sample(&[1.0, 1.0], 0, 2)];
        let t = cluster_samples(&s, 1, 0).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].members, vec![0, 1, 2]);
        assert!((t[0].target.as_slice()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn duplicate_samples_collapse_to_one_cluster() {
        let s = vec![sample(&[1.0, 1.0, 0.0, 1.0], 1, 4), sample(&[1.0, 1.0, 0.0, 1.0], 1, 9)];
        let t = cluster_samples(&s, 2, 5).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].members, vec![4, 9]);
    }

    #[test]
    fn cluster_samples_rejects_bad_input() {
        let s = vec![sample(&[1.0, 0.0], 0, 0), sample(&[0.0, 1.0], 1, 1)];
        assert!(cluster_samples(&s, 1, 0).is_err());
        assert!(cluster_samples(&s[..1], 2, 0).is_err());
        assert!(cluster_samples(&[], 1, 0).is_err());
    }

    #[test]
    fn representable_target_trains_to_near_zero() {
        let spec = AnsatzSpec::three(Variant::A, 1).unwrap();
        let target = ClusterTarget {
            class: 0,
            cluster: 0,
            members: vec![0],
            target: probabilities(&StateVector::zero(3).unwrap()),
        };
        let tc = train_cluster(&spec, &target, &OptimizerConfig::default()).unwrap();
        assert!(tc.final_cost < 0.05, "{}", tc.final_cost);
        assert_eq!(tc.epsilon, INITIAL_EPSILON);
        assert_eq!(tc.delta, INITIAL_DELTA);
        assert_eq!(tc.theta.len(), 6);
    }

    #[test]
    fn shot_mode_trains_deterministically() {
        let spec = AnsatzSpec::three(Variant::B, 1).unwrap();
        let target = ClusterTarget {
            class: 1,
            cluster: 2,
            members: vec![0],
            target: ProbDist::new(vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0]).unwrap(),
        };
        let cfg = OptimizerConfig {
            shots: 256,
            max_iters: 100,
            restarts: 1,
            ..Default::default()
        };
        let a = train_cluster(&spec, &target, &cfg).unwrap();
        let b = train_cluster(&spec, &target, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.final_cost <= 2.0);
    }
}

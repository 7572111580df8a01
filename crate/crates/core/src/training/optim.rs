use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "SPSA")]
    Spsa,
    #[serde(rename = "NelderMead")]
    NelderMead,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spsa" => Ok(Method::Spsa),
            "neldermead" | "nelder-mead" | "nm" => Ok(Method::NelderMead),
            other => Err(Error::invalid(format!("unknown optimizer {other:?}"))),
        }
    }
}

/// Optimizer settings. The SPSA gain sequences are
/// `a_t = a / (A + t + 1)^α` and `c_t = c / (t + 1)^γ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_iters: usize,
    pub a: f64,
    pub c: f64,
    #[serde(rename = "A")]
    pub stability: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Independent random starts per cluster; the best result is kept.
    pub restarts: usize,
    /// Measurement shots per objective evaluation; 0 uses exact probabilities.
    pub shots: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::Spsa,
            max_iters: 500,
            a: 0.2,
            c: 0.1,
            stability: 50.0,
            alpha: 0.602,
            gamma: 0.101,
            seed: 42,
            restarts: 3,
            shots: 0,
        }
    }
}

impl OptimizerConfig {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if !(self.a > 0.0 && self.c > 0.0) {
            return Err(Error::invalid(format!("SPSA gains must be positive (a={}, c={})", self.a, self.c)));
        }
        if !(self.stability >= 0.0) {
            return Err(Error::invalid(format!("SPSA stability constant must be >= 0, got {}", self.stability)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0 && self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid(format!(
                "SPSA exponents must lie in (0, 1] (alpha={}, gamma={})",
                self.alpha, self.gamma
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimResult {
    /// Best point evaluated.
    pub theta: Vec<f64>,
    pub cost: f64,
    /// Best-seen cost after each iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

struct Tracker<F> {
    f: F,
    best_theta: Vec<f64>,
    best_cost: f64,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    fn new(mut f: F, theta0: &[f64]) -> Result<Self> {
        let cost = f(theta0);
        check_finite(cost, theta0)?;
        Ok(Self {
            f,
            best_theta: theta0.to_vec(),
            best_cost: cost,
            evaluations: 1,
        })
    }

    fn eval(&mut self, theta: &[f64]) -> Result<f64> {
        let v = (self.f)(theta);
        self.evaluations += 1;
        check_finite(v, theta)?;
        if v < self.best_cost {
            self.best_cost = v;
            self.best_theta.clear();
            self.best_theta.extend_from_slice(theta);
        }
        Ok(v)
    }

    fn finish(self, trace: Vec<f64>) -> OptimResult {
        OptimResult {
            theta: self.best_theta,
            cost: self.best_cost,
            trace,
            evaluations: self.evaluations,
        }
    }
}

fn check_finite(value: f64, theta: &[f64]) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            value,
            theta: theta.to_vec(),
        })
    }
}

/// Simultaneous-perturbation stochastic approximation.
///
/// Each iteration draws a Rademacher direction `Δ`, estimates the gradient as
/// `(f(θ + c_tΔ) − f(θ − c_tΔ)) / (2c_t) · Δ⁻¹` and steps `θ ← θ − a_t·g`.
/// Every evaluated point (both probes and the new iterate) competes for the
/// returned best-seen result.
pub fn spsa_minimize<F>(objective: F, theta0: &[f64], config: &OptimizerConfig) -> Result<OptimResult>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tracker = Tracker::new(objective, theta0)?;
    let d = theta0.len();
    let mut theta = theta0.to_vec();
    let mut delta = vec![0.0; d];
    let mut probe = vec![0.0; d];
    let mut trace = Vec::with_capacity(config.max_iters);

    for t in 0..config.max_iters {
        let k = t as f64;
        let a_t = config.a / (config.stability + k + 1.0).powf(config.alpha);
        let c_t = config.c / (k + 1.0).powf(config.gamma);
        for di in &mut delta {
            *di = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        }

        for i in 0..d {
            probe[i] = theta[i] + c_t * delta[i];
        }
        let f_plus = tracker.eval(&probe)?;
        for i in 0..d {
            probe[i] = theta[i] - c_t * delta[i];
        }
        let f_minus = tracker.eval(&probe)?;

        let scale = (f_plus - f_minus) / (2.0 * c_t);
        for i in 0..d {
            theta[i] -= a_t * scale / delta[i];
        }
        tracker.eval(&theta)?;
        trace.push(tracker.best_cost);
    }
    Ok(tracker.finish(trace))
}

/// Derivative-free simplex search (standard reflection 1, expansion 2,
/// contraction ½, shrink ½). The initial simplex offsets each coordinate by
/// `config.c · 10` radians.
pub fn nelder_mead_minimize<F>(objective: F, theta0: &[f64], config: &OptimizerConfig) -> Result<OptimResult>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let mut tracker = Tracker::new(objective, theta0)?;
    let d = theta0.len();
    let step = config.c * 10.0;

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((theta0.to_vec(), tracker.best_cost));
    for i in 0..d {
        let mut p = theta0.to_vec();
        p[i] += step;
        let v = tracker.eval(&p)?;
        simplex.push((p, v));
    }

    let mut trace = Vec::with_capacity(config.max_iters);
    for _ in 0..config.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        if spread.abs() < 1e-14 {
            trace.push(tracker.best_cost);
            continue;
        }
        let mut centroid = vec![0.0; d];
        for (p, _) in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / d as f64;
            }
        }
        let along = |coef: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + coef * (c - w)).collect()
        };
        let worst = simplex[d].0.clone();
        let reflected = along(1.0, &worst);
        let fr = tracker.eval(&reflected)?;
        if fr < simplex[0].1 {
            let expanded = along(2.0, &worst);
            let fe = tracker.eval(&expanded)?;
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[d].1 {
                let p = along(0.5, &worst);
                let v = tracker.eval(&p)?;
                (p, v)
            } else {
                let p = along(-0.5, &worst);
                let v = tracker.eval(&p)?;
                (p, v)
            };
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = best.iter().zip(&entry.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    let v = tracker.eval(&p)?;
                    *entry = (p, v);
                }
            }
        }
        trace.push(tracker.best_cost);
    }
    Ok(tracker.finish(trace))
}

/// Dispatches on `config.method`.
pub fn minimize<F>(objective: F, theta0: &[f64], config: &OptimizerConfig) -> Result<OptimResult>
where
    F: FnMut(&[f64]) -> f64,
{
    match config.method {
        Method::Spsa => spsa_minimize(objective, theta0, config),
        Method::NelderMead => nelder_mead_minimize(objective, theta0, config),
    }
}

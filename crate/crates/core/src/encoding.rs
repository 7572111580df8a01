//! Tabular credit data: CSV ingestion, synthetic generation, two-step
//! normalization and amplitude encoding into 3-qubit states.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::StateVector;

/// Number of raw features per observation.
pub const FEATURE_COUNT: usize = 7;

/// Columns holding Boolean factors (x5, x6, x7).
pub const BOOLEAN_COLUMNS: [bool; FEATURE_COUNT] = [false, false, false, false, true, true, true];

pub const CSV_HEADER: [&str; 8] = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "y"];

/// Label 0: goods may be issued.
pub const ISSUE: u8 = 0;
/// Label 1: sale blocked.
pub const BLOCK: u8 = 1;

/// One customer case.
#[derive(Clone, Debug, PartialEq)]
pub struct RawObservation {
    /// x1, customer's arrears.
    pub arrears: f64,
    /// x2, all current dues.
    pub current_dues: f64,
    /// x3, days of delay of the oldest overdue invoice.
    pub oldest_delay_days: u32,
    /// x4, payment declared as issued but not yet posted.
    pub declared_payment: f64,
    /// x5, reliable in past cooperation.
    pub reliable: bool,
    /// x6, positive evaluation of cooperating entities.
    pub entities_positive: bool,
    /// x7, promissory note on file.
    pub promissory_note: bool,
    pub label: u8,
}

impl RawObservation {
    pub fn features(&self) -> [f64; FEATURE_COUNT] {
        [
            self.arrears,
            self.current_dues,
            f64::from(self.oldest_delay_days),
            self.declared_payment,
            f64::from(u8::from(self.reliable)),
            f64::from(u8::from(self.entities_positive)),
            f64::from(u8::from(self.promissory_note)),
        ]
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("x1", self.arrears),
            ("x2", self.current_dues),
            ("x4", self.declared_payment),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be a non-negative amount, got {v}")));
            }
        }
        if self.label > BLOCK {
            return Err(Error::invalid(format!("label must be 0 or 1, got {}", self.label)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub observations: Vec<RawObservation>,
}

impl Dataset {
    pub fn new(observations: Vec<RawObservation>) -> Result<Self> {
        for (i, o) in observations.iter().enumerate() {
            o.validate().map_err(|e| Error::Observation {
                index: i,
                source: Box::new(e),
            })?;
        }
        Ok(Self { observations })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.observations.iter().map(|o| o.label).collect()
    }

    /// Splits into the first `n` observations and the remainder.
    pub fn split_at(&self, n: usize) -> (Dataset, Dataset) {
        let n = n.min(self.len());
        (
            Dataset {
                observations: self.observations[..n].to_vec(),
            },
            Dataset {
                observations: self.observations[n..].to_vec(),
            },
        )
    }

    pub fn to_table(&self) -> FeatureTable {
        FeatureTable {
            rows: self.observations.iter().map(|o| o.features().to_vec()).collect(),
            labels: self.labels(),
            boolean: BOOLEAN_COLUMNS.to_vec(),
        }
    }
}

/// Numeric view of a dataset: one row of features per observation.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    /// Per column, whether the variable is Boolean.
    pub boolean: Vec<bool>,
}

impl FeatureTable {
    pub fn feature_count(&self) -> usize {
        self.boolean.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[j])
    }
}

/// Per-variable min-max scaler. Boolean columns pass through.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub boolean: Vec<bool>,
}

impl MinMaxScaler {
    pub fn fit(table: &FeatureTable) -> Result<Self> {
        if table.rows.len() < 2 {
            return Err(Error::invalid(format!(
                "min-max normalization needs at least 2 observations, got {}",
                table.rows.len()
            )));
        }
        let cols = table.feature_count();
        let mut min = vec![f64::INFINITY; cols];
        let mut max = vec![f64::NEG_INFINITY; cols];
        for row in &table.rows {
            for j in 0..cols {
                min[j] = min[j].min(row[j]);
                max[j] = max[j].max(row[j]);
            }
        }
        let scaler = Self {
            min,
            max,
            boolean: table.boolean.clone(),
        };
        for j in scaler.constant_columns() {
            log::warn!("variable x{} is constant ({}); normalized to 0", j + 1, scaler.min[j]);
        }
        Ok(scaler)
    }

    /// Non-Boolean columns whose range is zero.
    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.min.len())
            .filter(|&j| !self.boolean[j] && self.max[j] == self.min[j])
            .collect()
    }

    /// Maps each value to `(x - min) / (max - min)`, clamped to `[0, 1]` so
    /// that data outside the fitted range still encodes. Constant columns map
    /// to 0.
    pub fn transform(&self, table: &FeatureTable) -> Result<FeatureTable> {
        if table.feature_count() != self.min.len() {
            return Err(Error::invalid(format!(
                "scaler fitted on {} features, table has {}",
                self.min.len(),
                table.feature_count()
            )));
        }
        let rows = table
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        if self.boolean[j] {
                            x
                        } else if self.max[j] == self.min[j] {
                            0.0
                        } else {
                            ((x - self.min[j]) / (self.max[j] - self.min[j])).clamp(0.0, 1.0)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(FeatureTable {
            rows,
            labels: table.labels.clone(),
            boolean: table.boolean.clone(),
        })
    }
}

/// Classical normalization step: every non-Boolean variable is rescaled over
/// all observations so its minimum maps to 0 and its maximum to 1.
pub fn minmax_normalize(data: &Dataset) -> Result<(FeatureTable, MinMaxScaler)> {
    let table = data.to_table();
    let scaler = MinMaxScaler::fit(&table)?;
    let out = scaler.transform(&table)?;
    Ok((out, scaler))
}

/// Appends zero-valued variables until every row has `2^n_qubits` features.
pub fn pad_features(table: &FeatureTable, n_qubits: usize) -> Result<FeatureTable> {
    let target = 1usize
        .checked_shl(n_qubits as u32)
        .filter(|_| n_qubits < usize::BITS as usize)
        .ok_or_else(|| Error::invalid(format!("register of {n_qubits} qubits is too large")))?;
    let a = table.feature_count();
    if a > target {
        return Err(Error::invalid(format!(
            "{a} features do not fit into {n_qubits} qubits ({target} amplitudes)"
        )));
    }
    let mut out = table.clone();
    for row in &mut out.rows {
        row.resize(target, 0.0);
    }
    // padded variables are constant zeros, not Booleans
    out.boolean.resize(target, false);
    Ok(out)
}

/// Quantum normalization step: `α_i = sqrt(x_i / Σ_j x_j)`.
pub fn amplitude_encode(features: &[f64]) -> Result<StateVector> {
    if let Some(x) = features.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::invalid(format!("features must be finite and non-negative, got {x}")));
    }
    let total: f64 = features.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("all-zero feature vector cannot be amplitude encoded"));
    }
    let amps = features
        .iter()
        .map(|&x| Complex64::new((x / total).sqrt(), 0.0))
        .collect();
    StateVector::from_amplitudes(amps)
}

/// An observation after normalization, padding and amplitude encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedSample {
    pub state: StateVector,
    pub label: u8,
    pub source_index: usize,
}

/// Encodes every row of a normalized, padded table. Order and labels are
/// preserved; failures name the offending observation.
pub fn encode_dataset(table: &FeatureTable) -> Result<Vec<EncodedSample>> {
    table
        .rows
        .iter()
        .zip(&table.labels)
        .enumerate()
        .map(|(i, (row, &label))| {
            let state = amplitude_encode(row).map_err(|e| Error::Observation {
                index: i,
                source: Box::new(e),
            })?;
            Ok(EncodedSample {
                state,
                label,
                source_index: i,
            })
        })
        .collect()
}

/// Full pipeline for a fresh dataset: fit a scaler on it, normalize, pad to
/// `n_qubits` and encode.
pub fn prepare(data: &Dataset, n_qubits: usize) -> Result<(Vec<EncodedSample>, MinMaxScaler)> {
    let (table, scaler) = minmax_normalize(data)?;
    let samples = encode_dataset(&pad_features(&table, n_qubits)?)?;
    Ok((samples, scaler))
}

/// Encodes data with a previously fitted scaler.
pub fn prepare_with(data: &Dataset, scaler: &MinMaxScaler, n_qubits: usize) -> Result<Vec<EncodedSample>> {
    let table = scaler.transform(&data.to_table())?;
    encode_dataset(&pad_features(&table, n_qubits)?)
}

#[derive(Serialize)]
struct EncodedRecord {
    index: usize,
    label: u8,
    amplitudes: Vec<f64>,
}

/// JSON export: `[{"index", "label", "amplitudes": [..]}]`. Amplitudes are
/// real for encoded samples, so only the real parts are written.
pub fn encoded_to_json(samples: &[EncodedSample]) -> Result<String> {
    let records: Vec<EncodedRecord> = samples
        .iter()
        .map(|s| EncodedRecord {
            index: s.source_index,
            label: s.label,
            amplitudes: s.state.amplitudes().iter().map(|a| a.re).collect(),
        })
        .collect();
    serde_json::to_string_pretty(&records).map_err(|e| Error::invalid(e.to_string()))
}

fn parse_err(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        row,
        message: message.into(),
    }
}

/// Reads a CSV with header `x1,x2,x3,x4,x5,x6,x7,y`. Rows are numbered from
/// 1 (the first data row) in error messages.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path)
}

pub fn read_csv(reader: impl std::io::Read, path: &Path) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(path, 0, e.to_string()))?.clone();
    let mut cols = [0usize; 8];
    for (slot, name) in cols.iter_mut().zip(CSV_HEADER) {
        *slot = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(path, 0, format!("missing column {name}")))?;
    }
    let mut observations = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| parse_err(path, row, e.to_string()))?;
        let mut vals = [0.0f64; 8];
        for (v, (&c, name)) in vals.iter_mut().zip(cols.iter().zip(CSV_HEADER)) {
            let cell = rec
                .get(c)
                .ok_or_else(|| parse_err(path, row, format!("missing value for {name}")))?;
            *v = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(path, row, format!("{name}: {cell:?} is not a number")))?;
        }
        let flag = |j: usize| -> Result<bool> {
            match vals[j] {
                0.0 => Ok(false),
                1.0 => Ok(true),
                v => Err(parse_err(path, row, format!("{}: Boolean must be 0 or 1, got {v}", CSV_HEADER[j]))),
            }
        };
        let label = match vals[7] {
            0.0 => ISSUE,
            1.0 => BLOCK,
            v => return Err(parse_err(path, row, format!("y must be 0 or 1, got {v}"))),
        };
        if vals[2] < 0.0 || vals[2].fract() != 0.0 || vals[2] > f64::from(u32::MAX) {
            return Err(parse_err(path, row, format!("x3 must be a whole number of days, got {}", vals[2])));
        }
        let obs = RawObservation {
            arrears: vals[0],
            current_dues: vals[1],
            oldest_delay_days: vals[2] as u32,
            declared_payment: vals[3],
            reliable: flag(4)?,
            entities_positive: flag(5)?,
            promissory_note: flag(6)?,
            label,
        };
        obs.validate().map_err(|e| parse_err(path, row, e.to_string()))?;
        observations.push(obs);
    }
    Ok(Dataset { observations })
}

pub fn write_csv(data: &Dataset, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let ser = |e: csv::Error| Error::invalid(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    for o in &data.observations {
        w.write_record([
            o.arrears.to_string(),
            o.current_dues.to_string(),
            o.oldest_delay_days.to_string(),
            o.declared_payment.to_string(),
            u8::from(o.reliable).to_string(),
            u8::from(o.entities_positive).to_string(),
            u8::from(o.promissory_note).to_string(),
            o.label.to_string(),
        ])
        .map_err(ser)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// Threat and mitigation rule used to label synthetic cases.
///
/// Threat score: `[x1 > arrears_ratio·x2] + [x3 > max_delay_days]`.
/// Mitigation score: 1 when at least `mitigation_quorum` of
/// `{x4 ≥ x1, x5, x6, x7}` hold, else 0. The case is blocked iff
/// threat > mitigation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelRule {
    pub arrears_ratio: f64,
    pub max_delay_days: u32,
    pub mitigation_quorum: u32,
}

impl Default for LabelRule {
    fn default() -> Self {
        Self {
            arrears_ratio: 0.2,
            max_delay_days: 6,
            mitigation_quorum: 2,
        }
    }
}

impl LabelRule {
    pub fn threat(&self, o: &RawObservation) -> u32 {
        u32::from(o.arrears > self.arrears_ratio * o.current_dues) + u32::from(o.oldest_delay_days > self.max_delay_days)
    }

    pub fn mitigation(&self, o: &RawObservation) -> u32 {
        let votes = u32::from(o.declared_payment >= o.arrears)
            + u32::from(o.reliable)
            + u32::from(o.entities_positive)
            + u32::from(o.promissory_note);
        u32::from(votes >= self.mitigation_quorum)
    }

    pub fn label(&self, o: &RawObservation) -> u8 {
        if self.threat(o) > self.mitigation(o) {
            BLOCK
        } else {
            ISSUE
        }
    }
}

/// Upper bound of the currency-valued synthetic features.
pub const MAX_AMOUNT: f64 = 100_000.0;
/// Upper bound of the synthetic delay in days.
pub const MAX_DELAY_DAYS: u32 = 60;

/// Generates `count` labelled cases with [`LabelRule::default`].
pub fn generate_synthetic(seed: u64, count: usize) -> Result<Dataset> {
    generate_synthetic_with(seed, count, &LabelRule::default())
}

/// Amounts are whole currency units in `[0, 100000]`, delays whole days in
/// `[0, 60]`. If every case ends up in one class (only plausible for tiny
/// `count`), trailing cases are redrawn until the other class appears.
pub fn generate_synthetic_with(seed: u64, count: usize, rule: &LabelRule) -> Result<Dataset> {
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observations: Vec<RawObservation> = (0..count).map(|_| draw_case(&mut rng, rule)).collect();

    if count >= 2 {
        let first = observations[0].label;
        if observations.iter().all(|o| o.label == first) {
            let last = count - 1;
            for _ in 0..10_000 {
                let o = draw_case(&mut rng, rule);
                if o.label != first {
                    observations[last] = o;
                    break;
                }
            }
        }
    }
    Dataset::new(observations)
}

/// Latent case profile used to draw features; the label still comes from
/// the rule alone.
#[derive(Clone, Copy)]
enum Profile {
    /// Small arrears, short delay, mostly favourable flags.
    Sound,
    /// Large arrears, long delay, mostly unfavourable flags.
    Risky,
    /// Everything drawn uniformly over the full ranges.
    Mixed,
}

/// Probability that a sound or risky case has all flags at the profile's
/// typical value.
const FLAG_COHERENCE: f64 = 0.9;

fn draw_case(rng: &mut ChaCha8Rng, rule: &LabelRule) -> RawObservation {
    let profile = match rng.random_range(0..5u32) {
        0 | 1 => Profile::Sound,
        2 | 3 => Profile::Risky,
        _ => Profile::Mixed,
    };
    let (share, delay, cover, typical_flags) = match profile {
        Profile::Sound => (0.0..=0.15, 0..=6, 0.8..=1.5, Some(true)),
        Profile::Risky => (0.25..=0.6, 7..=MAX_DELAY_DAYS, 0.0..=0.9, Some(false)),
        Profile::Mixed => (0.0..=0.6, 0..=MAX_DELAY_DAYS, 0.0..=1.5, None),
    };
    let current_dues = rng.random_range(1_000.0..=MAX_AMOUNT).round();
    let arrears = (rng.random_range(share) * current_dues).round();
    let oldest_delay_days = rng.random_range(delay);
    let declared_payment = (rng.random_range(cover) * arrears).round().min(MAX_AMOUNT);
    // flags move together in a profile, with occasional independent cases
    let coherent = typical_flags.filter(|_| rng.random_bool(FLAG_COHERENCE));
    let mut flag = || coherent.unwrap_or_else(|| rng.random_bool(0.5));
    let mut o = RawObservation {
        arrears,
        current_dues,
        oldest_delay_days,
        declared_payment,
        reliable: flag(),
        entities_positive: flag(),
        promissory_note: flag(),
        label: ISSUE,
    };
    o.label = rule.label(&o);
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(x: [f64; 7], label: u8) -> RawObservation {
        RawObservation {
            arrears: x[0],
            current_dues: x[1],
            oldest_delay_days: x[2] as u32,
            declared_payment: x[3],
            reliable: x[4] != 0.0,
            entities_positive: x[5] != 0.0,
            promissory_note: x[6] != 0.0,
            label,
        }
    }

    #[test]
    fn minmax_endpoints_and_booleans() {
        let data = Dataset::new(vec![
            obs([10.0, 1.0, 3.0, 5.0, 0.0, 1.0, 0.0], 0),
            obs([20.0, 2.0, 3.0, 5.0, 1.0, 1.0, 0.0], 1),
            obs([30.0, 4.0, 3.0, 5.0, 1.0, 0.0, 1.0], 0),
        ])
        .unwrap();
        let (t, scaler) = minmax_normalize(&data).unwrap();
        let col = |j| t.column(j).collect::<Vec<_>>();
        assert_eq!(col(0), vec![0.0, 0.5, 1.0]);
        assert_eq!(col(4), vec![0.0, 1.0, 1.0]);
        // x3 and x4 constant
        assert_eq!(col(2), vec![0.0, 0.0, 0.0]);
        assert_eq!(scaler.constant_columns(), vec![2, 3]);
    }

    #[test]
    fn minmax_needs_two_rows() {
        let data = Dataset::new(vec![obs([1.0; 7], 0)]).unwrap();
        assert!(minmax_normalize(&data).is_err());
    }

    #[test]
    fn padding_rules() {
        let t = FeatureTable {
            rows: vec![vec![0.1; 7]],
            labels: vec![0],
            boolean: BOOLEAN_COLUMNS.to_vec(),
        };
        let p = pad_features(&t, 3).unwrap();
        assert_eq!(p.rows[0].len(), 8);
        assert_eq!(p.rows[0][7], 0.0);

        let eight = pad_features(&p, 3).unwrap();
        assert_eq!(eight, p);

        let three = FeatureTable {
            rows: vec![vec![0.2, 0.3, 0.4]],
            labels: vec![1],
            boolean: vec![false; 3],
        };
        assert_eq!(pad_features(&three, 2).unwrap().rows[0], vec![0.2, 0.3, 0.4, 0.0]);
        assert!(pad_features(&t, 2).is_err());
    }

    #[test]
    fn amplitude_encode_examples() {
        let s = amplitude_encode(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(s.amplitudes().iter().all(|a| a.re == 0.5 && a.im == 0.0));

        let s = amplitude_encode(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s, StateVector::basis(2, 0).unwrap());

        // direct evaluation: Σx = 2, α = sqrt(x/2)
        let s = amplitude_encode(&[0.5, 0.5, 1.0, 0.0]).unwrap();
        let want = [0.5, 0.5, std::f64::consts::FRAC_1_SQRT_2, 0.0];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15);
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_encode_rejects_degenerate_input() {
        assert!(amplitude_encode(&[0.0; 4]).is_err());
        assert!(amplitude_encode(&[1.0, -0.5, 0.0, 0.0]).is_err());
        assert!(amplitude_encode(&[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn encode_dataset_tags_errors_and_keeps_order() {
        let t = FeatureTable {
            rows: vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0; 4]],
            labels: vec![1, 0],
            boolean: vec![false; 4],
        };
        match encode_dataset(&t) {
            Err(Error::Observation { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
        let empty = FeatureTable {
            rows: vec![],
            labels: vec![],
            boolean: vec![false; 4],
        };
        assert!(encode_dataset(&empty).unwrap().is_empty());
    }

    #[test]
    fn label_rule_examples() {
        let rule = LabelRule::default();
        // x1 = 0.3·x2, 10 days late, nothing mitigating
        let risky = obs([30_000.0, 100_000.0, 10.0, 0.0, 0.0, 0.0, 0.0], 0);
        assert_eq!(rule.label(&risky), BLOCK);
        let clean = obs([0.0, 50_000.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0);
        assert_eq!(rule.label(&clean), ISSUE);
        // two threats beat one mitigation
        let mitigated = obs([30_000.0, 100_000.0, 10.0, 0.0, 1.0, 1.0, 1.0], 0);
        assert_eq!(rule.label(&mitigated), BLOCK);
        // one threat cancelled by mitigation
        let one = obs([30_000.0, 100_000.0, 2.0, 0.0, 1.0, 1.0, 0.0], 0);
        assert_eq!(rule.label(&one), ISSUE);
    }

    #[test]
    fn synthetic_is_deterministic_and_in_range() {
        let a = generate_synthetic(42, 80).unwrap();
        let b = generate_synthetic(42, 80).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_synthetic(43, 80).unwrap());
        let rule = LabelRule::default();
        for o in &a.observations {
            assert!((0.0..=MAX_AMOUNT).contains(&o.arrears));
            assert!((0.0..=MAX_AMOUNT).contains(&o.current_dues));
            assert!((0.0..=MAX_AMOUNT).contains(&o.declared_payment));
            assert!(o.oldest_delay_days <= MAX_DELAY_DAYS);
            assert_eq!(o.label, rule.label(o));
        }
        assert!(generate_synthetic(1, 0).is_err());
    }

    #[test]
    fn synthetic_has_both_classes() {
        for seed in 0..50 {
            let d = generate_synthetic(seed, 20).unwrap();
            let ones = d.labels().iter().filter(|&&l| l == BLOCK).count();
            assert!(ones > 0 && ones < 20, "seed {seed}");
        }
        let d = generate_synthetic(3, 2).unwrap();
        assert_ne!(d.observations[0].label, d.observations[1].label);
    }

    #[test]
    fn csv_parse_errors_name_the_row() {
        let path = Path::new("mem.csv");
        let text = "x1,x2,x3,x4,x5,x6,x7,y\n1,2,3,4,0,1,0,1\n1,2,3,4,0,1,0,2\n";
        let err = read_csv(text.as_bytes(), path).unwrap_err();
        assert!(matches!(err, Error::Csv { row: 2, .. }), "{err}");

        let err = read_csv("x1,x2,x3,x4,x5,x6,y\n".as_bytes(), path).unwrap_err();
        assert!(err.to_string().contains("x7"));

        let err = read_csv("x1,x2,x3,x4,x5,x6,x7,y\n1,abc,3,4,0,1,0,1\n".as_bytes(), path).unwrap_err();
        assert!(matches!(err, Error::Csv { row: 1, .. }));

        let empty = read_csv("x1,x2,x3,x4,x5,x6,x7,y\n".as_bytes(), path).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn csv_round_trip() {
        let d = generate_synthetic(9, 25).unwrap();
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), Path::new("x")).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_export_shape() {
        let d = generate_synthetic(1, 10).unwrap();
        let (samples, _) = prepare(&d, 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&encoded_to_json(&samples).unwrap()).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 10);
        assert_eq!(arr[0]["amplitudes"].as_array().unwrap().len(), 8);
        assert_eq!(arr[0]["amplitudes"][7], 0.0);
    }
}

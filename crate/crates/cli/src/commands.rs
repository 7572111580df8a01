use std::io::Write;
use std::path::Path;

use log::info;
use vqcredit::classify::{self, ClassificationReport, TrainedModel};
use vqcredit::encoding::{self, Dataset};
use vqcredit::entanglement;
use vqcredit::training::{self, OptimizerConfig, TrainConfig};
use vqcredit::{AnsatzSpec, Error};

use crate::{ClassifyArgs, Command, DataArgs, EntanglementArgs, Failure, GenerateArgs, TrainArgs};

const QUBITS: usize = 3;

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::GenerateData(args) => generate(args),
        Command::Train(args) => train(args),
        Command::Classify(args) => classify_cmd(args, false),
        Command::Evaluate(args) => classify_cmd(args, true),
        Command::DetectEntanglement(args) => detect(args),
    }
}

/// Fails early when an output file could not be created.
fn check_output(path: &Path) -> Result<(), Failure> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if dir.is_dir() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "output directory {} does not exist",
            dir.display()
        )))
    }
}

fn check_input(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        }
        .into())
    }
}

/// Writes `bytes` to `path`, or to standard output when no path is given.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let io = |p: &Path, e| Failure::Lib(Error::Io { path: p.to_path_buf(), source: e });
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| io(Path::new("<stdout>"), e))
        }
    }
}

fn load_rows(args: &DataArgs) -> Result<Dataset, Failure> {
    check_input(&args.data)?;
    let data = encoding::load_csv(&args.data)?;
    let total = data.len();
    let observations: Vec<_> = data
        .observations
        .into_iter()
        .skip(args.skip)
        .take(args.take.unwrap_or(usize::MAX))
        .collect();
    if observations.is_empty() {
        return Err(Failure::Usage(format!(
            "{}: no rows selected ({total} rows, --skip {}, --take {:?})",
            args.data.display(),
            args.skip,
            args.take
        )));
    }
    info!("{}: using {} of {total} rows", args.data.display(), observations.len());
    Ok(Dataset::new(observations)?)
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    if args.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    if let Some(p) = &args.out {
        check_output(p)?;
    }
    let data = encoding::generate_synthetic(args.seed, args.count)?;
    let mut buf = Vec::new();
    encoding::write_csv(&data, &mut buf)?;
    emit(args.out.as_deref(), &buf)?;
    let blocked = data.labels().iter().filter(|&&y| y == encoding::BLOCK).count();
    info!("generated {} observations ({blocked} labelled 1)", data.len());
    Ok(())
}

fn train(args: TrainArgs) -> Result<(), Failure> {
    check_output(&args.model)?;
    let optimizer = OptimizerConfig {
        method: args.optimizer,
        max_iters: args.iters,
        a: args.spsa_a,
        c: args.spsa_c,
        stability: args.spsa_stability,
        alpha: args.spsa_alpha,
        gamma: args.spsa_gamma,
        seed: args.seed,
        restarts: args.restarts,
        shots: args.shots,
    };
    optimizer.validate()?;
    if args.lc == 0 {
        return Err(Failure::Usage("--lc must be at least 1".into()));
    }
    let config = TrainConfig {
        ansatz: AnsatzSpec::three(args.variant, args.layers)?,
        optimizer,
        clusters_per_class: args.lc,
        distance_mode: args.distance_mode,
    };
    let data = load_rows(&args.data)?;
    let (samples, scaler) = encoding::prepare(&data, QUBITS)?;
    info!(
        "training {} on {} samples, {} clusters per class",
        config.ansatz,
        samples.len(),
        config.clusters_per_class
    );
    let start = std::time::Instant::now();
    let mut model = training::train_model(&samples, &config, Some(scaler))?;
    info!("trained {} clusters in {:.2?}", model.clusters.len(), start.elapsed());
    if args.tune_epsilon {
        model = training::tune_thresholds(&model, &samples, args.margin)?;
    }
    for c in &model.clusters {
        info!(
            "class {} cluster {}: final cost {:.4}, accept ({:.4}, {:.4})",
            c.class, c.cluster, c.final_cost, c.delta, c.epsilon
        );
    }
    if args.timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        model.metadata.created = Some(format!("unix:{secs}"));
    }
    let report = classify::evaluate(&model, &samples)?;
    info!(
        "training accuracy {:.4}, false rate {:.4}",
        report.accuracy, report.false_rate
    );
    classify::save_model(&model, &args.model)?;
    info!("model written to {}", args.model.display());
    Ok(())
}

fn load_model_and_samples(args: &ClassifyArgs) -> Result<(TrainedModel, Vec<encoding::EncodedSample>), Failure> {
    check_input(&args.model)?;
    if let Some(p) = &args.report {
        check_output(p)?;
    }
    let model = classify::load_model(&args.model)?;
    let data = load_rows(&args.data)?;
    let samples = match &model.scaler {
        Some(scaler) => encoding::prepare_with(&data, scaler, model.ansatz.qubits)?,
        None => {
            log::warn!("model has no stored scaler; fitting one on the input data");
            encoding::prepare(&data, model.ansatz.qubits)?.0
        }
    };
    Ok((model, samples))
}

fn summary(report: &ClassificationReport) -> serde_json::Value {
    serde_json::json!({
        "total": report.total,
        "accuracy": report.accuracy,
        "false_rate": report.false_rate,
        "unrecognized_count": report.unrecognized_count,
        "tie_count": report.tie_count,
    })
}

fn classify_cmd(args: ClassifyArgs, summary_only: bool) -> Result<(), Failure> {
    let (model, samples) = load_model_and_samples(&args)?;
    let report = classify::evaluate(&model, &samples)?;
    info!(
        "{} samples: accuracy {:.4}, false rate {:.4}, {} unrecognized, {} ties",
        report.total, report.accuracy, report.false_rate, report.unrecognized_count, report.tie_count
    );
    if summary_only {
        let text = serde_json::to_string_pretty(&summary(&report)).expect("summary serializes") + "\n";
        return emit(args.report.as_deref(), text.as_bytes());
    }
    match &args.report {
        Some(p) => {
            report.save(p)?;
            info!("report written to {}", p.display());
            Ok(())
        }
        None => emit(None, (report.to_json()? + "\n").as_bytes()),
    }
}

fn detect(args: EntanglementArgs) -> Result<(), Failure> {
    if let Some(p) = &args.out {
        check_output(p)?;
    }
    let data = load_rows(&args.data)?;
    let (samples, _) = encoding::prepare(&data, QUBITS)?;
    let summary = entanglement::analyze_dataset(&samples)?;
    for r in &summary.reports {
        let groups: Vec<String> = r.entangled_groups.iter().map(|g| g.to_string()).collect();
        log::debug!("sample {}: [{}]", r.sample_index, groups.join(", "));
    }
    let text = serde_json::to_string_pretty(&summary.to_json()).expect("summary serializes") + "\n";
    emit(args.out.as_deref(), text.as_bytes())
}

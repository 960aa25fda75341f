//! The four commands behind the CLI surface.
//!
//! Shared flow: relativize everything to its goal pose, fit the
//! demonstration's six wrench models once by evidence maximization, then
//! per reproduction align, fit the reproduction side, and reduce the two
//! model sets to one similarity feature vector. Training hangs a Gaussian
//! naive Bayes classifier off those vectors; evaluation cross-validates
//! them or replays a trained classifier against other datasets.
//!
//! Every output file is a pure function of the inputs and flags, so
//! re-runs are byte-identical. Timings go to a separate sidecar and
//! stderr only.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use map_core::align::{align_pair, align_pair_without_warping, AlignedPair};
use map_core::classifier::{classify, evaluate_loocv, train_classifier, TrainError};
use map_core::features::{extract_features, FeatureVector};
use map_core::gp::{
    component_targets, fit_wrench_model, ComponentFitError, GpWrenchModel, WrenchComponent,
    WrenchModelSet,
};
use map_core::synth::{
    generate, generate_mixed, FailureMode, ScenarioSpec, SyntheticDataset, Task,
};
use map_core::trajectory::{Label, Trajectory};

use crate::error::CliError;
use crate::io::{read_dataset, read_demo, read_trajectory, write_dataset, write_json, Dataset};
use crate::model::{classifier_from_model, load_model, rebuild_demo_set, save_model};
use crate::report::{
    render_confusion_csv, render_csv, render_text, ConfusionCounts, EvalReport, ReportRow,
    StageTimings,
};

/// Hard ceiling on fit workers; component fits are the only parallel
/// stage and there are six of them.
const MAX_FIT_THREADS: usize = 6;

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub dtw_enabled: bool,
    pub sigma_floor: f64,
    pub parallel: bool,
}

/// Worker count: `MAP_THREADS` when set, otherwise the machine's
/// parallelism, never more than the six components.
fn thread_cap() -> usize {
    let configured = std::env::var("MAP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    configured
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .min(MAX_FIT_THREADS)
}

fn fit_component(
    inputs: &[[f64; 8]],
    wrench: &[[f64; 6]],
    c: WrenchComponent,
) -> Result<GpWrenchModel, ComponentFitError> {
    let targets = component_targets(wrench, c);
    fit_wrench_model(inputs, &targets).map_err(|source| ComponentFitError { component: c, source })
}

/// Fits all six components, on a small scoped thread pool when allowed.
/// The fits are independent, so scheduling cannot change any result; on
/// errors the first component in fixed order wins, like the sequential
/// path.
pub fn fit_set(
    inputs: &[[f64; 8]],
    wrench: &[[f64; 6]],
    parallel: bool,
) -> Result<WrenchModelSet, ComponentFitError> {
    let cap = if parallel { thread_cap() } else { 1 };
    let mut slots: [Option<Result<GpWrenchModel, ComponentFitError>>; 6] =
        core::array::from_fn(|_| None);
    if cap <= 1 {
        for c in WrenchComponent::ALL {
            slots[c.index()] = Some(fit_component(inputs, wrench, c));
        }
    } else {
        for chunk in WrenchComponent::ALL.chunks(cap) {
            let outcomes: Vec<(usize, Result<GpWrenchModel, ComponentFitError>)> =
                std::thread::scope(|s| {
                    let handles: Vec<_> = chunk
                        .iter()
                        .map(|&c| (c.index(), s.spawn(move || fit_component(inputs, wrench, c))))
                        .collect();
                    handles
                        .into_iter()
                        .map(|(i, h)| (i, h.join().expect("fit worker panicked")))
                        .collect()
                });
            for (i, outcome) in outcomes {
                slots[i] = Some(outcome);
            }
        }
    }
    let mut models = Vec::with_capacity(6);
    for slot in slots {
        models.push(slot.expect("every component fitted")?);
    }
    let models: [GpWrenchModel; 6] =
        models.try_into().unwrap_or_else(|_| unreachable!("exactly six components"));
    Ok(WrenchModelSet::new(models))
}

/// Re-factors the demonstration models on an aligned grid, keeping their
/// fitted hyperparameters. When warping leaves the grid equal to the
/// demonstration's own inputs this reproduces the original covariances
/// bit for bit, so the originals are reused without rebuilding.
fn demo_set_on_grid(
    demo_set: &WrenchModelSet,
    inputs: &[[f64; 8]],
    wrench: &[[f64; 6]],
) -> Result<WrenchModelSet, ComponentFitError> {
    let mut models = Vec::with_capacity(6);
    for c in WrenchComponent::ALL {
        let model = GpWrenchModel::from_params(
            demo_set.model(c).params(),
            inputs.to_vec(),
            component_targets(wrench, c),
        )
        .map_err(|source| ComponentFitError { component: c, source })?;
        models.push(model);
    }
    let models: [GpWrenchModel; 6] =
        models.try_into().unwrap_or_else(|_| unreachable!("exactly six components"));
    Ok(WrenchModelSet::new(models))
}

fn align(
    demo_rel: &Trajectory,
    rep_rel: &Trajectory,
    dtw_enabled: bool,
) -> Result<AlignedPair, CliError> {
    let res = if dtw_enabled {
        align_pair(demo_rel, rep_rel)
    } else {
        align_pair_without_warping(demo_rel, rep_rel)
    };
    res.map_err(|source| CliError::Align { id: String::from(rep_rel.id()), source })
}

/// Features of one reproduction against a fitted demonstration.
fn features_for_rep(
    demo_rel: &Trajectory,
    demo_set: &WrenchModelSet,
    rep: &Trajectory,
    opts: &FitOptions,
    timings: &mut StageTimings,
) -> Result<FeatureVector, CliError> {
    let rep_rel = rep.relativize_to_goal();
    let id = String::from(rep.id());

    let started = Instant::now();
    let pair = align(demo_rel, &rep_rel, opts.dtw_enabled)?;
    let demo_grid;
    let demo_for_features = if pair.demo_inputs() == demo_set.model(WrenchComponent::Fx).inputs() {
        demo_set
    } else {
        demo_grid = demo_set_on_grid(demo_set, pair.demo_inputs(), pair.demo_wrench())
            .map_err(|source| CliError::Fit { id: id.clone(), source })?;
        &demo_grid
    };
    timings.feature_s += started.elapsed().as_secs_f64();

    let started = Instant::now();
    let rep_set = fit_set(pair.rep_inputs(), pair.rep_wrench(), opts.parallel)
        .map_err(|source| CliError::Fit { id: id.clone(), source })?;
    timings.rep_fit_s += started.elapsed().as_secs_f64();

    let started = Instant::now();
    let features = extract_features(demo_for_features, &rep_set)
        .map_err(|source| CliError::Feature { id, source })?;
    timings.feature_s += started.elapsed().as_secs_f64();
    Ok(features)
}

/// One dataset reduced to features: the fitted demonstration plus one
/// feature vector per reproduction.
pub struct DatasetFeatures {
    pub dataset: Dataset,
    pub demo_set: WrenchModelSet,
    pub features: Vec<FeatureVector>,
}

fn dataset_features(
    root: &Path,
    opts: &FitOptions,
    timings: &mut StageTimings,
    warnings: &mut Vec<String>,
) -> Result<DatasetFeatures, CliError> {
    let started = Instant::now();
    let dataset = read_dataset(root, warnings)?;
    timings.load_s += started.elapsed().as_secs_f64();
    if dataset.reps.is_empty() {
        return Err(CliError::NoReps { dir: root.join("reps") });
    }

    let demo_rel = dataset.demo.relativize_to_goal();
    let started = Instant::now();
    let demo_set = fit_set(&demo_rel.input_matrix(), &demo_rel.wrench_matrix(), opts.parallel)
        .map_err(|source| CliError::Fit { id: String::from(dataset.demo.id()), source })?;
    timings.demo_fit_s += started.elapsed().as_secs_f64();

    let mut features = Vec::with_capacity(dataset.reps.len());
    for rep in &dataset.reps {
        features.push(features_for_rep(&demo_rel, &demo_set, rep, opts, timings)?);
    }
    Ok(DatasetFeatures { dataset, demo_set, features })
}

fn labels_for_training(dataset: &Dataset) -> Result<Vec<Label>, CliError> {
    let mut labels = Vec::with_capacity(dataset.reps.len());
    for rep in &dataset.reps {
        match rep.label() {
            Some(l) => labels.push(l),
            None => {
                return Err(CliError::UnlabeledRep {
                    path: dataset.root.join("reps").join(format!("{}.json", rep.id())),
                })
            }
        }
    }
    Ok(labels)
}

fn map_train_error(e: TrainError) -> CliError {
    match e {
        TrainError::MissingClass(label) => CliError::SingleClass(label),
        other => CliError::Invalid(other.to_string()),
    }
}

const FEATURE_CSV_HEADER: &str = "trajectory_id,m_fx,m_fy,m_fz,m_tx,m_ty,m_tz,label";

fn features_csv(dataset: &Dataset, features: &[FeatureVector], labels: &[Label]) -> String {
    let mut out = String::from(FEATURE_CSV_HEADER);
    out.push('\n');
    for ((rep, f), label) in dataset.reps.iter().zip(features).zip(labels) {
        out.push_str(rep.id());
        for v in f.m {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push(',');
        out.push_str(label.as_str());
        out.push('\n');
    }
    out
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub struct TrainArgs {
    pub dataset: PathBuf,
    /// Defaults to `<dataset>/model.json`.
    pub model: Option<PathBuf>,
    pub opts: FitOptions,
}

pub fn cmd_train(args: &TrainArgs) -> Result<i32, CliError> {
    let total = Instant::now();
    let mut timings = StageTimings::default();
    let mut warnings = Vec::new();

    let reduced = dataset_features(&args.dataset, &args.opts, &mut timings, &mut warnings)?;
    print_warnings(&warnings);
    let labels = labels_for_training(&reduced.dataset)?;

    let started = Instant::now();
    let classifier = train_classifier(&reduced.features, &labels, args.opts.sigma_floor)
        .map_err(map_train_error)?;
    timings.classify_s += started.elapsed().as_secs_f64();

    let model_path =
        args.model.clone().unwrap_or_else(|| args.dataset.join("model.json"));
    save_model(
        &model_path,
        &reduced.demo_set,
        &classifier,
        args.opts.dtw_enabled,
        args.opts.sigma_floor,
    )?;
    let features_path = model_path
        .parent()
        .map(|p| p.join("features.csv"))
        .unwrap_or_else(|| PathBuf::from("features.csv"));
    let csv = features_csv(&reduced.dataset, &reduced.features, &labels);
    fs::write(&features_path, csv).map_err(|e| CliError::io(&features_path, e))?;

    timings.total_s = total.elapsed().as_secs_f64();
    eprintln!("{}", timings.summary());

    let n_success = labels.iter().filter(|l| **l == Label::Success).count();
    println!(
        "trained on {} reproductions ({} success, {} failure)",
        labels.len(),
        n_success,
        labels.len() - n_success
    );
    println!("model: {}", model_path.display());
    println!("features: {}", features_path.display());
    Ok(0)
}

pub struct AssessArgs {
    pub dataset: PathBuf,
    /// Defaults to `<dataset>/model.json`.
    pub model: Option<PathBuf>,
    pub trajectory: PathBuf,
}

/// Assesses one reproduction under a trained model. Exit code 0 for a
/// success prediction, 1 for failure.
pub fn cmd_assess(args: &AssessArgs) -> Result<i32, CliError> {
    let mut warnings = Vec::new();
    let model_path =
        args.model.clone().unwrap_or_else(|| args.dataset.join("model.json"));
    let persisted = load_model(&model_path)?;

    let demo = read_demo(&args.dataset, &mut warnings)?;
    let demo_rel = demo.relativize_to_goal();
    let demo_set = rebuild_demo_set(
        &model_path,
        &persisted,
        &demo_rel.input_matrix(),
        &demo_rel.wrench_matrix(),
    )?;
    let classifier = classifier_from_model(&persisted);

    let rep = read_trajectory(&args.trajectory, &mut warnings)?;
    print_warnings(&warnings);
    let opts = FitOptions {
        dtw_enabled: persisted.dtw_enabled,
        sigma_floor: persisted.sigma_floor,
        parallel: true,
    };
    let mut timings = StageTimings::default();
    let features = features_for_rep(&demo_rel, &demo_set, &rep, &opts, &mut timings)?;
    let assessment = classify(&classifier, rep.id(), &features)
        .map_err(|e| CliError::Invalid(e.to_string()))?;

    let marker = if features.degenerate { " degenerate-features" } else { "" };
    println!(
        "{} {:.6} {}{marker}",
        assessment.trajectory_id,
        assessment.p_success,
        assessment.predicted
    );
    Ok(match assessment.predicted {
        Label::Success => 0,
        Label::Failure => crate::error::EXIT_PREDICTED_FAILURE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Loocv,
    CrossDemo,
}

impl EvalMode {
    fn as_str(self) -> &'static str {
        match self {
            EvalMode::Loocv => "loocv",
            EvalMode::CrossDemo => "cross-demo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Text,
    Csv,
    Json,
}

pub struct EvalArgs {
    pub datasets: Vec<PathBuf>,
    pub mode: EvalMode,
    /// Defaults to `<first dataset>/reports`.
    pub report_dir: Option<PathBuf>,
    pub out_format: OutFormat,
    pub opts: FitOptions,
}

fn labels_for_eval(dataset: &Dataset) -> Result<Vec<Label>, CliError> {
    labels_for_training(dataset)
}

fn dataset_tag(root: &Path) -> String {
    root.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| root.display().to_string())
}

fn eval_loocv(
    args: &EvalArgs,
    timings: &mut StageTimings,
) -> Result<EvalReport, CliError> {
    let root = &args.datasets[0];
    let mut warnings = Vec::new();
    let reduced = dataset_features(root, &args.opts, timings, &mut warnings)?;
    print_warnings(&warnings);
    let labels = labels_for_eval(&reduced.dataset)?;

    let started = Instant::now();
    let outcome = evaluate_loocv(&reduced.features, &labels, args.opts.sigma_floor)
        .map_err(CliError::Loocv)?;
    timings.classify_s += started.elapsed().as_secs_f64();

    let per_trajectory = reduced
        .dataset
        .reps
        .iter()
        .zip(&labels)
        .zip(&outcome.per_instance)
        .map(|((rep, label), fold)| ReportRow {
            trajectory_id: String::from(rep.id()),
            actual: String::from(label.as_str()),
            predicted: fold.map(|f| String::from(f.predicted.as_str())),
            p_success: fold.map(|f| f.p_success),
        })
        .collect();

    Ok(EvalReport {
        mode: String::from(EvalMode::Loocv.as_str()),
        datasets: vec![root.display().to_string()],
        reps: reduced.dataset.reps.len(),
        evaluated: outcome.evaluated,
        skipped: outcome.skipped,
        accuracy: outcome.accuracy,
        confusion: ConfusionCounts::from_matrix(&outcome.confusion),
        per_trajectory,
    })
}

fn eval_cross_demo(
    args: &EvalArgs,
    timings: &mut StageTimings,
) -> Result<EvalReport, CliError> {
    if args.datasets.len() < 2 {
        return Err(CliError::NeedTwoDatasets(args.datasets.len()));
    }

    let mut warnings = Vec::new();
    let train = dataset_features(&args.datasets[0], &args.opts, timings, &mut warnings)?;
    let train_labels = labels_for_training(&train.dataset)?;
    let started = Instant::now();
    let classifier = train_classifier(&train.features, &train_labels, args.opts.sigma_floor)
        .map_err(map_train_error)?;
    timings.classify_s += started.elapsed().as_secs_f64();

    let mut confusion = map_core::classifier::ConfusionMatrix::new();
    let mut per_trajectory = Vec::new();
    for root in &args.datasets[1..] {
        let reduced = dataset_features(root, &args.opts, timings, &mut warnings)?;
        let labels = labels_for_eval(&reduced.dataset)?;
        let tag = dataset_tag(root);

        let started = Instant::now();
        for ((rep, features), label) in
            reduced.dataset.reps.iter().zip(&reduced.features).zip(&labels)
        {
            let assessment = classify(&classifier, rep.id(), features)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            confusion.record(*label, assessment.predicted);
            per_trajectory.push(ReportRow {
                trajectory_id: format!("{tag}/{}", rep.id()),
                actual: String::from(label.as_str()),
                predicted: Some(String::from(assessment.predicted.as_str())),
                p_success: Some(assessment.p_success),
            });
        }
        timings.classify_s += started.elapsed().as_secs_f64();
    }
    print_warnings(&warnings);

    Ok(EvalReport {
        mode: String::from(EvalMode::CrossDemo.as_str()),
        datasets: args.datasets.iter().map(|d| d.display().to_string()).collect(),
        reps: per_trajectory.len(),
        evaluated: per_trajectory.len(),
        skipped: 0,
        accuracy: confusion.accuracy(),
        confusion: ConfusionCounts::from_matrix(&confusion),
        per_trajectory,
    })
}

pub fn cmd_eval(args: &EvalArgs) -> Result<i32, CliError> {
    let total = Instant::now();
    let mut timings = StageTimings::default();
    if args.datasets.is_empty() {
        return Err(CliError::Invalid(String::from("eval needs at least one --dataset")));
    }

    let report = match args.mode {
        EvalMode::Loocv => eval_loocv(args, &mut timings)?,
        EvalMode::CrossDemo => eval_cross_demo(args, &mut timings)?,
    };
    timings.total_s = total.elapsed().as_secs_f64();

    let report_dir = args
        .report_dir
        .clone()
        .unwrap_or_else(|| args.datasets[0].join("reports"));
    fs::create_dir_all(&report_dir).map_err(|e| CliError::io(&report_dir, e))?;

    let text = render_text(&report);
    let csv = render_csv(&report);
    let confusion = render_confusion_csv(&report);
    let writes: [(&str, &str); 3] =
        [("report.txt", &text), ("report.csv", &csv), ("confusion.csv", &confusion)];
    for (name, content) in writes {
        let path = report_dir.join(name);
        fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
    }
    write_json(&report_dir.join("report.json"), &report)?;
    write_json(&report_dir.join("timing.json"), &timings)?;

    eprintln!("{}", timings.summary());
    match args.out_format {
        OutFormat::Text => print!("{text}"),
        OutFormat::Csv => print!("{csv}"),
        OutFormat::Json => {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{json}");
        }
    }
    Ok(0)
}

pub struct GenerateArgs {
    pub task: Task,
    pub seed: u64,
    pub out: PathBuf,
    pub reps: usize,
    /// Samples per trajectory; `None` keeps the task default.
    pub samples: Option<usize>,
    /// Start offset deviation in meters; `None` keeps the task default.
    pub start_jitter: Option<f64>,
    /// `None` cycles through the task's failure modes.
    pub failure_mode: Option<FailureMode>,
    pub force: bool,
}

fn scenario(args: &GenerateArgs) -> ScenarioSpec {
    let mut spec = match args.task {
        Task::SnapFit => ScenarioSpec::snapfit(args.seed),
        Task::Screwing => ScenarioSpec::screwing(args.seed),
    };
    spec.n_failure = args.reps / 2;
    spec.n_success = args.reps - spec.n_failure;
    if let Some(n) = args.samples {
        spec.n_samples = n;
    }
    if let Some(j) = args.start_jitter {
        spec.start_jitter = j;
    }
    if let Some(mode) = args.failure_mode {
        spec.failure_mode = mode;
    }
    spec
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<i32, CliError> {
    if let Some(j) = args.start_jitter {
        if !j.is_finite() || j < 0.0 {
            return Err(CliError::Invalid(format!(
                "--start-jitter must be a finite non-negative number, got {j}"
            )));
        }
    }
    if args.samples.is_some_and(|n| n < 10) {
        return Err(CliError::Invalid(String::from("--samples must be at least 10")));
    }

    let spec = scenario(args);
    let data: SyntheticDataset = match args.failure_mode {
        Some(_) => generate(&spec),
        None => generate_mixed(&spec),
    };
    write_dataset(&args.out, &data, args.force)?;

    let n_success = data
        .reps
        .iter()
        .filter(|r| r.label() == Some(Label::Success))
        .count();
    println!(
        "wrote {}: demonstration plus {} reproductions ({} success, {} failure)",
        args.out.display(),
        data.reps.len(),
        n_success,
        data.reps.len() - n_success
    );
    Ok(0)
}

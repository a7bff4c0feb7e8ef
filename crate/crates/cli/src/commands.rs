use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use dbp_core::ccnn::{predict_ccnn, train_ccnn_normalized, CcnnModel};
use dbp_core::electrostatics::{ChargeTable, RadiusTable};
use dbp_core::evaluation::{jackknife_evaluate, sweep_ccnn, sweep_svm, CcnnLearner, EvaluationReport, Learner, SvmLearner};
use dbp_core::features::{read_feature_csv, write_feature_csv, FeatureVector, IdentityFit, NormalizerFit, ZScoreFit};
use dbp_core::pipeline::{extract_entry, Tables};
use dbp_core::structure::{fetch_structure, load_manifest, DatasetManifest, FetchOptions, UreqTransport};
use dbp_core::surface::ReferenceAreas;
use dbp_core::svm::{predict_svm, train_svm_normalized, SvmModel, MODEL_FORMAT as SVM_FORMAT};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{parse_int_range, parse_real_range, RunConfig};
use crate::error::CliError;
use crate::report::distribution_report;
use crate::LearnerKind;

const FINGERPRINT_KEY: &str = "config_fingerprint";

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Writes through a sibling temporary file so readers never see a partial
/// output. `None` prints to stdout.
fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        print!("{content}");
        return Ok(());
    };
    let io = |e: std::io::Error| CliError::input(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let tmp = path.with_extension("partial");
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(content.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn output_path(config: &RunConfig, flag: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    flag.or_else(|| config.paths.output_dir.as_ref().map(|d| d.join(default_name)))
}

fn manifest(config: &RunConfig) -> Result<DatasetManifest, CliError> {
    let path = config
        .paths
        .manifest
        .as_ref()
        .ok_or_else(|| CliError::input("no manifest given (--manifest or paths.manifest)"))?;
    load_manifest(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn fetch_options(config: &RunConfig) -> FetchOptions {
    let cache = config.paths.cache_dir.clone().unwrap_or_else(|| PathBuf::from("cache"));
    FetchOptions {
        offline: config.offline,
        ..FetchOptions::new(cache)
    }
}

fn tables(config: &RunConfig) -> Result<Tables, CliError> {
    let mut t = Tables::bundled();
    let bad = |p: &Path, e: String| CliError::input(format!("{}: {e}", p.display()));
    if let Some(p) = &config.paths.charge_table {
        t.charges = ChargeTable::from_csv(&read_text(p)?).map_err(|e| bad(p, e.to_string()))?;
    }
    if let Some(p) = &config.paths.radius_table {
        t.radii = RadiusTable::from_csv(&read_text(p)?).map_err(|e| bad(p, e.to_string()))?;
    }
    if let Some(p) = &config.paths.reference_sasa {
        t.reference = ReferenceAreas::from_csv(&read_text(p)?).map_err(|e| bad(p, e.to_string()))?;
    }
    Ok(t)
}

fn labeled_rows(path: &Path) -> Result<Vec<FeatureVector>, CliError> {
    let rows = read_feature_csv(&read_text(path)?)?;
    if rows.is_empty() {
        return Err(CliError::data(format!("{}: no rows", path.display())));
    }
    if let Some(r) = rows.iter().find(|r| r.label.is_none()) {
        return Err(CliError::data(format!("row {} has no label", r.source_id)));
    }
    Ok(rows)
}

fn fitter(config: &RunConfig) -> &'static dyn NormalizerFit {
    if config.evaluation.normalize {
        &ZScoreFit
    } else {
        &IdentityFit
    }
}

pub fn fetch(config: &RunConfig) -> Result<(), CliError> {
    let manifest = manifest(config)?;
    let options = fetch_options(config);
    let mut failed = 0;
    for entry in &manifest.entries {
        if let Err(e) = fetch_structure(&entry.structure_id, &options, &UreqTransport) {
            log::error!("{}: {e}", entry.structure_id);
            failed += 1;
        }
    }
    eprintln!("fetched {} of {} structures", manifest.entries.len() - failed, manifest.entries.len());
    if failed > 0 {
        return Err(CliError::data(format!("{failed} structures could not be fetched")));
    }
    Ok(())
}

pub fn extract(config: &RunConfig, out: Option<PathBuf>) -> Result<(), CliError> {
    let manifest = manifest(config)?;
    let options = fetch_options(config);
    let tables = tables(config)?;
    let results: Vec<_> = manifest
        .entries
        .par_iter()
        .map(|entry| extract_entry(entry, &options, &UreqTransport, &tables, &config.extraction))
        .collect();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(x) => {
                if x.surface_empty {
                    log::warn!("{}: no surface residues", entry.source_id());
                }
                rows.push(x.features);
            }
            Err(e) => {
                eprintln!("error: {}: {e}", entry.source_id());
                failed.push(entry.source_id());
            }
        }
    }
    emit(output_path(config, out, "features.csv").as_deref(), &write_feature_csv(&rows))?;
    eprintln!("extracted {} of {} entries", rows.len(), manifest.entries.len());
    eprintln!("{FINGERPRINT_KEY} {}", config.fingerprint());
    if !failed.is_empty() {
        return Err(CliError::data(format!("{} entries failed: {}", failed.len(), failed.join(", "))));
    }
    Ok(())
}

fn with_fingerprint(config: &RunConfig, model_text: &str) -> String {
    format!("# {FINGERPRINT_KEY} = \"{}\"\n{model_text}", config.fingerprint())
}

pub fn train(config: &RunConfig, features: &Path, learner: LearnerKind, out: Option<PathBuf>) -> Result<(), CliError> {
    let rows = labeled_rows(features)?;
    let normalizer = fitter(config).fit(&rows)?;
    let (text, summary) = match learner {
        LearnerKind::Svm => {
            let cfg = dbp_core::svm::SvmConfig {
                seed: config.seed,
                ..config.svm.clone()
            };
            let fit = train_svm_normalized(&rows, &cfg, normalizer)?;
            let summary = format!(
                "svm: kernel {} | {} support vectors | converged {} | passes {}",
                fit.model.kernel.name(),
                fit.model.support_vectors.len(),
                fit.converged,
                fit.passes
            );
            (fit.model.to_text(), summary)
        }
        LearnerKind::Ccnn => {
            let cfg = dbp_core::ccnn::CcnnConfig {
                seed: config.seed,
                ..config.ccnn.clone()
            };
            let fit = train_ccnn_normalized(&rows, &cfg, normalizer)?;
            let summary = format!(
                "ccnn: {} hidden units (budget {}) | training mse {} | converged {}",
                fit.model.hidden_units.len(),
                fit.model.max_hidden_units,
                fit.training_error,
                fit.converged
            );
            (fit.model.to_text(), summary)
        }
    };
    emit(output_path(config, out, "model.toml").as_deref(), &with_fingerprint(config, &text))?;
    eprintln!("{summary}");
    Ok(())
}

fn learner_for(config: &RunConfig, kind: LearnerKind) -> Box<dyn Learner> {
    match kind {
        LearnerKind::Svm => Box::new(SvmLearner {
            config: config.svm.clone(),
        }),
        LearnerKind::Ccnn => Box::new(CcnnLearner {
            config: config.ccnn.clone(),
        }),
    }
}

#[derive(Serialize)]
struct EvaluationDocument<'a> {
    config_fingerprint: String,
    learner: &'a str,
    normalized: bool,
    #[serde(flatten)]
    report: &'a EvaluationReport,
}

fn show(v: Option<f64>) -> String {
    v.map(|x| format!("{:.4}", x)).unwrap_or_else(|| "undefined".into())
}

pub fn evaluate(config: &RunConfig, features: &Path, kind: LearnerKind, out: Option<PathBuf>) -> Result<(), CliError> {
    let rows = labeled_rows(features)?;
    let learner = learner_for(config, kind);
    let report = jackknife_evaluate(
        learner.as_ref(),
        fitter(config),
        &rows,
        config.evaluation.repeats,
        config.evaluation.train_fraction,
        config.seed,
    )?;
    let doc = EvaluationDocument {
        config_fingerprint: config.fingerprint(),
        learner: kind.as_str(),
        normalized: config.evaluation.normalize,
        report: &report,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| CliError::internal(e.to_string()))? + "\n";
    emit(output_path(config, out, "evaluation.json").as_deref(), &json)?;
    eprintln!(
        "{}: accuracy {} | sensitivity {} | specificity {} over {} repeats",
        kind.as_str(),
        show(report.mean.accuracy),
        show(report.mean.sensitivity),
        show(report.mean.specificity),
        report.repeats.len()
    );
    Ok(())
}

pub fn sweep(config: &RunConfig, features: &Path, kind: LearnerKind, out: Option<PathBuf>) -> Result<(), CliError> {
    let rows = labeled_rows(features)?;
    let report = match kind {
        LearnerKind::Svm => {
            let gammas = parse_real_range(&config.sweep.gamma)?;
            let degrees = parse_int_range(&config.sweep.degree)?
                .into_iter()
                .map(|d| u32::try_from(d).map_err(|_| CliError::input("degree out of range")))
                .collect::<Result<Vec<_>, _>>()?;
            sweep_svm(&rows, &gammas, &degrees, &config.svm, fitter(config), config.evaluation.repeats, config.seed)?
        }
        LearnerKind::Ccnn => {
            let hidden: Vec<usize> = parse_int_range(&config.sweep.hidden)?.into_iter().map(|h| h as usize).collect();
            sweep_ccnn(
                &rows,
                &hidden,
                &config.sweep.topologies,
                &config.ccnn,
                fitter(config),
                config.evaluation.repeats,
                config.seed,
            )?
        }
    };
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: cell ({}, {}) failed: {}",
            row.param_1,
            row.param_2,
            row.error.as_deref().unwrap_or_default()
        );
    }
    emit(output_path(config, out, "sweep.csv").as_deref(), &report.to_csv())?;
    match report.best_row() {
        Some(best) => eprintln!(
            "best: {}={} {}={} accuracy {}",
            report.param_1_name,
            best.param_1,
            report.param_2_name,
            best.param_2,
            show(best.mean_accuracy())
        ),
        None => eprintln!("no cell produced a defined accuracy"),
    }
    eprintln!("{FINGERPRINT_KEY} {}", config.fingerprint());
    Ok(())
}

enum LoadedModel {
    Svm(SvmModel),
    Ccnn(CcnnModel),
}

fn load_model(path: &Path) -> Result<LoadedModel, CliError> {
    let text = read_text(path)?;
    let value: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::input(format!("{}: {e}", path.display())))?;
    match value.get("format").and_then(|v| v.as_str()) {
        Some(SVM_FORMAT) => Ok(LoadedModel::Svm(SvmModel::from_text(&text)?)),
        Some(dbp_core::ccnn::MODEL_FORMAT) => Ok(LoadedModel::Ccnn(CcnnModel::from_text(&text)?)),
        other => Err(CliError::input(format!("{}: unknown model format {other:?}", path.display()))),
    }
}

pub fn predict(config: &RunConfig, model: &Path, features: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let model = load_model(model)?;
    let rows = read_feature_csv(&read_text(features)?)?;
    let mut text = String::from("source_id,predicted_label,score\n");
    for row in &rows {
        let (label, score) = match &model {
            LoadedModel::Svm(m) => predict_svm(m, row)?,
            LoadedModel::Ccnn(m) => predict_ccnn(m, row)?,
        };
        let _ = writeln!(text, "{},{},{score}", row.source_id, label.as_str());
    }
    emit(output_path(config, out, "predictions.csv").as_deref(), &text)
}

pub fn report(config: &RunConfig, features: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let rows = read_feature_csv(&read_text(features)?)?;
    let unlabeled = rows.iter().filter(|r| r.label.is_none()).count();
    if unlabeled > 0 {
        eprintln!("warning: {unlabeled} unlabeled rows ignored");
    }
    let report = distribution_report(&rows, config.report.charge_bin_width);
    if report.classes.len() < 2 {
        eprintln!("warning: only {} class(es) present", report.classes.len());
    }
    emit(output_path(config, out, "report.csv").as_deref(), &report.text)
}

//! The end-to-end protocols behind the command-line interface: one-hot
//! baseline fits, GRASP clustering runs with file outputs, and the
//! ten-reshuffle benchmark comparing both.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::clustering::relative_complexity;
use crate::data::{split, Dataset, ResponseData, Schema, SplitPlan};
use crate::design::{build_design, one_hot_encodings};
use crate::error::Result;
use crate::glm::{ccr, fit_irls, predict_mean, rmse, Family, FitConfig, FittedGlm};
use crate::grasp::{
    clustering_to_json, eligible_predictors, grasp_output_to_json, grasp_run, GraspConfig,
    GraspOutput, MetricKind,
};
use crate::proximity::{compute_proximity, export_csv, export_dot};
use crate::rng::mix_seed;

/// Test metric of a one-hot GLM trained on `train`.
fn one_hot_test_metric(
    schema: &Schema,
    family: Family,
    fit_config: &FitConfig,
    train: &Dataset,
    test: &Dataset,
) -> Result<(f64, FittedGlm)> {
    let encodings = one_hot_encodings(schema);
    let design = build_design(schema, train, &encodings)?;
    let model = fit_irls(&design, &train.response.to_f64(), family, fit_config)?;
    let test_design = build_design(schema, test, &encodings)?;
    let preds = predict_mean(&model, &test_design)?;
    let metric = match &test.response {
        ResponseData::Binary(y) => ccr(&preds, y)?,
        ResponseData::Count(y) => {
            let yf: Vec<f64> = y.iter().map(|&c| c as f64).collect();
            rmse(&preds, &yf)?
        }
    };
    Ok((metric, model))
}

fn metric_kind_of(dataset: &Dataset) -> MetricKind {
    match dataset.response {
        ResponseData::Binary(_) => MetricKind::Ccr,
        ResponseData::Count(_) => MetricKind::Rmse,
    }
}

/// Reshuffled evaluation of the plain one-hot model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub name: String,
    pub metric: MetricKind,
    /// Test metric per reshuffle (CCR as a fraction, RMSE as-is).
    pub per_reshuffle: Vec<f64>,
    pub mean: f64,
    /// One-hot model fit on the full dataset.
    pub model: FittedGlm,
}

/// Fits the one-hot GLM: test metric over every reshuffle plus a full-data
/// fit for the coefficient report.
pub fn run_fit(
    name: &str,
    schema: &Schema,
    dataset: &Dataset,
    family: Family,
    plan: &SplitPlan,
    fit_config: &FitConfig,
) -> Result<FitReport> {
    if plan.n_reshuffles == 0 {
        return Err(crate::error::Error::Data(
            "need at least one reshuffle".into(),
        ));
    }
    let mut per_reshuffle = Vec::with_capacity(plan.n_reshuffles);
    for r in 0..plan.n_reshuffles {
        let (train, test) = split(dataset, plan, r)?;
        let (metric, _) = one_hot_test_metric(schema, family, fit_config, &train, &test)?;
        per_reshuffle.push(metric);
    }
    let mean = per_reshuffle.iter().sum::<f64>() / per_reshuffle.len() as f64;
    let design = build_design(schema, dataset, &one_hot_encodings(schema))?;
    let model = fit_irls(&design, &dataset.response.to_f64(), family, fit_config)?;
    Ok(FitReport {
        name: name.to_string(),
        metric: metric_kind_of(dataset),
        per_reshuffle,
        mean,
        model,
    })
}

/// One reshuffle's pair of test metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReshuffleRow {
    pub reshuffle: usize,
    pub original: f64,
    pub clustered: f64,
    /// Validation payoff of the winning GRASP repeat.
    pub best_payoff: f64,
}

/// The benchmark protocol's result: original vs clustered model across all
/// reshuffles. Wall-clock time is reported on stdout only so the JSON is
/// byte-stable for a fixed seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub metric: MetricKind,
    pub k_prime: usize,
    pub m: usize,
    pub seed: u64,
    pub per_reshuffle: Vec<ReshuffleRow>,
    pub mean_original: f64,
    pub mean_clustered: f64,
    pub relative_complexity: f64,
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

/// Runs the full comparison: for every reshuffle, fit the one-hot model and
/// the GRASP-clustered model on the training sample and score both on the
/// test sample. Each reshuffle derives its own GRASP seed from the plan seed.
pub fn run_benchmark(
    name: &str,
    schema: &Schema,
    dataset: &Dataset,
    family: Family,
    plan: &SplitPlan,
    grasp_config: &GraspConfig,
) -> Result<RunReport> {
    if plan.n_reshuffles == 0 {
        return Err(crate::error::Error::Data(
            "need at least one reshuffle".into(),
        ));
    }
    let started = Instant::now();
    let eligible = eligible_predictors(schema, grasp_config.k_prime)?;
    let clustered_names: Vec<String> = eligible
        .iter()
        .map(|&ci| schema.categorical()[ci].name.clone())
        .collect();

    let mut per_reshuffle = Vec::with_capacity(plan.n_reshuffles);
    for r in 0..plan.n_reshuffles {
        let (train, test) = split(dataset, plan, r)?;
        let (original, _) = one_hot_test_metric(schema, family, &grasp_config.fit, &train, &test)?;
        let config = GraspConfig {
            seed: mix_seed(grasp_config.seed, r as u64),
            ..grasp_config.clone()
        };
        let output = grasp_run(schema, family, &train, &test, &config)?;
        per_reshuffle.push(ReshuffleRow {
            reshuffle: r,
            original,
            clustered: output.test_metric.value,
            best_payoff: output.best().payoff,
        });
    }

    let n = per_reshuffle.len() as f64;
    let mean_original = per_reshuffle.iter().map(|r| r.original).sum::<f64>() / n;
    let mean_clustered = per_reshuffle.iter().map(|r| r.clustered).sum::<f64>() / n;
    Ok(RunReport {
        name: name.to_string(),
        metric: metric_kind_of(dataset),
        k_prime: grasp_config.k_prime,
        m: grasp_config.m,
        seed: grasp_config.seed,
        per_reshuffle,
        mean_original,
        mean_clustered,
        relative_complexity: relative_complexity(schema, &clustered_names)?,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

/// Human-readable table mirroring the benchmark's headline numbers.
pub fn benchmark_summary(report: &RunReport) -> String {
    let (label, original, clustered) = match report.metric {
        MetricKind::Ccr => (
            "Accuracy (%)",
            report.mean_original * 100.0,
            report.mean_clustered * 100.0,
        ),
        MetricKind::Rmse => ("RMSE", report.mean_original, report.mean_clustered),
    };
    let mut out = String::new();
    out.push_str(&format!(
        "{:<20} {:>18} {:>18} {:>24}\n",
        "Name",
        format!("{label} Original"),
        format!("{label} Clustered"),
        "Relative Complexity (%)"
    ));
    out.push_str(&format!(
        "{:<20} {:>18.2} {:>18.2} {:>24.2}\n",
        report.name, original, clustered, report.relative_complexity
    ));
    out
}

fn sanitize_filename(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Runs GRASP on one train/test split (reshuffle 0 of the plan) and writes
/// every artifact under `out_dir`: the best model, the committed
/// clusterings, the full run output, and per-predictor proximity CSV/DOT.
/// Returns the paths written.
pub fn run_cluster(
    schema: &Schema,
    dataset: &Dataset,
    family: Family,
    plan: &SplitPlan,
    grasp_config: &GraspConfig,
    out_dir: &Path,
) -> Result<(GraspOutput, Vec<PathBuf>)> {
    let (train, test) = split(dataset, plan, 0)?;
    let output = grasp_run(schema, family, &train, &test, grasp_config)?;
    let paths = write_cluster_outputs(schema, grasp_config, &output, out_dir)?;
    Ok((output, paths))
}

/// Writes the cluster-run artifacts; shared by the CLI and tests.
pub fn write_cluster_outputs(
    schema: &Schema,
    grasp_config: &GraspConfig,
    output: &GraspOutput,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();

    let best_model = out_dir.join("best_model.json");
    std::fs::write(
        &best_model,
        serde_json::to_string_pretty(&output.best().model)?,
    )?;
    paths.push(best_model);

    let clusterings: Vec<serde_json::Value> = output
        .best()
        .clusterings
        .iter()
        .map(|pc| clustering_to_json(schema, pc))
        .collect::<Result<_>>()?;
    let clusterings_path = out_dir.join("clusterings.json");
    std::fs::write(
        &clusterings_path,
        serde_json::to_string_pretty(&clusterings)?,
    )?;
    paths.push(clusterings_path);

    let grasp_path = out_dir.join("grasp.json");
    std::fs::write(
        &grasp_path,
        serde_json::to_string_pretty(&grasp_output_to_json(schema, grasp_config, output)?)?,
    )?;
    paths.push(grasp_path);

    for pc in &output.best().clusterings {
        let name = &pc.clustering.predictor;
        let matrix = compute_proximity(schema, &output.iterations, name)?;
        let stem = sanitize_filename(name);
        let csv_path = out_dir.join(format!("proximity_{stem}.csv"));
        std::fs::write(&csv_path, export_csv(&matrix))?;
        paths.push(csv_path);
        let dot_path = out_dir.join(format!("proximity_{stem}.dot"));
        std::fs::write(&dot_path, export_dot(&matrix, 0.0))?;
        paths.push(dot_path);
    }
    Ok(paths)
}

/// Formats the one-hot fit report for stdout.
pub fn fit_summary(report: &FitReport) -> String {
    let mut out = String::new();
    let metric = match report.metric {
        MetricKind::Ccr => format!("mean test CCR {:.2}%", report.mean * 100.0),
        MetricKind::Rmse => format!("mean test RMSE {:.4}", report.mean),
    };
    out.push_str(&format!(
        "{}: {} over {} reshuffles\n",
        report.name,
        metric,
        report.per_reshuffle.len()
    ));
    out.push_str(&format!(
        "full-data fit: converged={} iterations={} deviance={:.4}\n",
        report.model.converged, report.model.n_iterations, report.model.deviance
    ));
    out.push_str("coefficients:\n");
    for (col, coef) in report.model.columns.iter().zip(&report.model.coefficients) {
        out.push_str(&format!("  {:<32} {:>14.6}\n", col.to_string(), coef));
    }
    out
}

/// Serializes a benchmark report; deterministic bytes for a fixed seed.
pub fn report_to_json(report: &RunReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Family requested on the command line, or the schema's canonical one.
pub fn resolve_family(schema: &Schema, requested: Option<Family>) -> Family {
    requested.unwrap_or_else(|| Family::for_response(schema.response.response_type))
}

//! Greedy randomized search over feasible clusterings: each pass clusters
//! every eligible predictor one at a time, guided by out-of-sample payoff,
//! drawing each commit uniformly from a restricted candidate list. The pass
//! is repeated `m` times and the best clustered model wins; the full
//! collection of passes feeds the proximity measure.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{
    enumerate_feasible_clusterings, order_by_coefficients, order_natural, CategoryOrdering,
    Clustering,
};
use crate::data::{Dataset, PredictorKind, ResponseData, Schema};
use crate::design::{build_design, one_hot_encodings, CatEncoding};
use crate::error::{Error, Result};
use crate::glm::{ccr, fit_irls, predict_mean, rmse, Family, FitConfig, FittedGlm};
use crate::rng::{stream_rng, Domain};

/// Restricted-candidate-list size rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RclRule {
    /// 3 when any remaining predictor has more than 5 categories, else 2.
    Adaptive,
    /// A fixed list size; 1 makes the search purely greedy.
    Fixed(usize),
}

/// Search parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraspConfig {
    /// Number of repeats of the constructive pass.
    pub m: usize,
    /// Number of clusters per predictor.
    pub k_prime: usize,
    pub rcl_rule: RclRule,
    pub seed: u64,
    /// Fraction of the training sample held out as the payoff validation
    /// set. Zero evaluates payoffs directly on the test sample.
    pub payoff_split: f64,
    pub fit: FitConfig,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            m: 100,
            k_prime: 2,
            rcl_rule: RclRule::Adaptive,
            seed: 0,
            payoff_split: 0.25,
            fit: FitConfig::default(),
        }
    }
}

impl GraspConfig {
    fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Grasp("m must be at least 1".into()));
        }
        if self.k_prime < 2 {
            return Err(Error::Grasp("K' must be at least 2".into()));
        }
        if !(0.0..1.0).contains(&self.payoff_split) {
            return Err(Error::Grasp(format!(
                "payoff_split {} not in [0,1)",
                self.payoff_split
            )));
        }
        if let RclRule::Fixed(n) = self.rcl_rule {
            if n < 1 {
                return Err(Error::Grasp("fixed RCL size must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// A committed reduction of one predictor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictorClustering {
    pub ordering: CategoryOrdering,
    pub clustering: Clustering,
}

/// One commit of the constructive pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    pub chosen_predictor: String,
    pub chosen_enumeration_index: usize,
    pub n_candidates_evaluated: usize,
    pub rcl_size: usize,
    pub payoff: f64,
}

/// The outcome of one repeat: a full clustering of the eligible predictors,
/// its payoff, and the clustered GLM refit on the whole training sample.
#[derive(Debug, Clone)]
pub struct IterationResult {
    pub repeat_index: usize,
    /// One entry per eligible predictor, in schema order.
    pub clusterings: Vec<PredictorClustering>,
    pub payoff: f64,
    pub model: FittedGlm,
    pub steps: Vec<StepRecord>,
}

/// Held-out metric kind; payoffs maximize CCR or the negated RMSE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Ccr,
    Rmse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub kind: MetricKind,
    pub value: f64,
}

/// The best clustered model plus every repeat's clusterings.
#[derive(Debug, Clone)]
pub struct GraspOutput {
    pub best_index: usize,
    pub iterations: Vec<IterationResult>,
    /// Metric of the best model on the held-out test sample.
    pub test_metric: MetricValue,
}

impl GraspOutput {
    pub fn best(&self) -> &IterationResult {
        &self.iterations[self.best_index]
    }
}

/// Categorical predictors with more than `k_prime` categories, as indices
/// into the schema's categorical list. Predictors at or below the bound keep
/// their one-hot encoding.
pub fn eligible_predictors(schema: &Schema, k_prime: usize) -> Result<Vec<usize>> {
    let eligible: Vec<usize> = schema
        .categorical()
        .iter()
        .enumerate()
        .filter(|(_, spec)| spec.n_categories().unwrap_or(0) > k_prime)
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return Err(Error::Grasp(format!(
            "no categorical predictor has more than K'={k_prime} categories; \
             fit the plain one-hot GLM instead"
        )));
    }
    Ok(eligible)
}

/// Payoff of a fitted model's predictions: CCR for a binary response, the
/// negated RMSE for counts.
fn payoff_of(preds: &[f64], response: &ResponseData) -> Result<f64> {
    match response {
        ResponseData::Binary(y) => ccr(preds, y),
        ResponseData::Count(y) => {
            let yf: Vec<f64> = y.iter().map(|&c| c as f64).collect();
            Ok(-rmse(preds, &yf)?)
        }
    }
}

/// Fits the partially clustered GLM on the fit part and scores it on the
/// validation part. Fit or prediction failures come back as a payoff of
/// negative infinity so the candidate is never selected.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_candidate(
    schema: &Schema,
    family: Family,
    fit_config: &FitConfig,
    fit_part: &Dataset,
    validation_part: &Dataset,
    state: &[CatEncoding],
    candidate_slot: usize,
    ordering: &CategoryOrdering,
    clustering: &Clustering,
) -> Result<f64> {
    if !matches!(state[candidate_slot], CatEncoding::OneHot) {
        return Err(Error::Grasp(format!(
            "predictor '{}' is already clustered",
            clustering.predictor
        )));
    }
    let mut encodings = state.to_vec();
    encodings[candidate_slot] = CatEncoding::Reduced {
        ordering: ordering.clone(),
        clustering: clustering.clone(),
    };
    Ok(candidate_payoff(
        schema,
        family,
        fit_config,
        fit_part,
        validation_part,
        &encodings,
    ))
}

fn candidate_payoff(
    schema: &Schema,
    family: Family,
    fit_config: &FitConfig,
    fit_part: &Dataset,
    validation_part: &Dataset,
    encodings: &[CatEncoding],
) -> f64 {
    let attempt = || -> Result<f64> {
        let design = build_design(schema, fit_part, encodings)?;
        let model = fit_irls(&design, &fit_part.response.to_f64(), family, fit_config)?;
        let val_design = build_design(schema, validation_part, encodings)?;
        let preds = predict_mean(&model, &val_design)?;
        payoff_of(&preds, &validation_part.response)
    };
    match attempt() {
        Ok(p) if p.is_finite() => p,
        Ok(p) => {
            log::warn!("candidate produced a non-finite payoff {p}; discarding");
            f64::NEG_INFINITY
        }
        Err(e) => {
            log::warn!("candidate evaluation failed: {e}; discarding");
            f64::NEG_INFINITY
        }
    }
}

fn rcl_size(rule: RclRule, remaining: &[usize], category_counts: &[usize]) -> usize {
    match rule {
        RclRule::Fixed(n) => n,
        RclRule::Adaptive => {
            if remaining.iter().any(|&ci| category_counts[ci] > 5) {
                3
            } else {
                2
            }
        }
    }
}

fn carve_validation(
    train: &Dataset,
    payoff_split: f64,
    rng: &mut impl Rng,
) -> Result<(Dataset, Dataset)> {
    let n = train.n_rows;
    let n_val = (payoff_split * n as f64).round() as usize;
    if n_val == 0 || n_val >= n {
        return Err(Error::Grasp(format!(
            "cannot carve a {payoff_split} validation split out of {n} training rows"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    use rand::seq::SliceRandom;
    order.shuffle(rng);
    let mut val_rows = order[..n_val].to_vec();
    let mut fit_rows = order[n_val..].to_vec();
    val_rows.sort_unstable();
    fit_rows.sort_unstable();
    Ok((train.subset(&fit_rows), train.subset(&val_rows)))
}

/// One constructive pass: repeatedly evaluates every feasible clustering of
/// every remaining eligible predictor, merges the payoffs, and commits one
/// candidate drawn uniformly from the top of the merged list; finally refits
/// the fully clustered GLM on the whole training sample.
pub fn grasp_single_pass(
    schema: &Schema,
    family: Family,
    train: &Dataset,
    test: &Dataset,
    config: &GraspConfig,
    repeat_index: usize,
) -> Result<IterationResult> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, Domain::GraspRepeat, repeat_index as u64);

    let carved;
    let (fit_part, validation_part): (&Dataset, &Dataset) = if config.payoff_split > 0.0 {
        carved = carve_validation(train, config.payoff_split, &mut rng)?;
        (&carved.0, &carved.1)
    } else {
        (train, test)
    };

    let cat_specs = schema.categorical();
    let category_counts: Vec<usize> = cat_specs
        .iter()
        .map(|s| s.n_categories().unwrap_or(0))
        .collect();
    let eligible = eligible_predictors(schema, config.k_prime)?;

    // Category order is data dependent: ordinals use their natural order,
    // nominals the coefficients of the one-hot fit on this repeat's fit part.
    let one_hot_design = build_design(schema, fit_part, &one_hot_encodings(schema))?;
    let one_hot_fit = fit_irls(
        &one_hot_design,
        &fit_part.response.to_f64(),
        family,
        &config.fit,
    )?;
    let mut orderings: Vec<Option<CategoryOrdering>> = vec![None; cat_specs.len()];
    for &ci in &eligible {
        let spec = cat_specs[ci];
        let ord = match spec.kind {
            PredictorKind::Ordinal => order_natural(spec)?,
            _ => order_by_coefficients(spec, &one_hot_fit)?,
        };
        orderings[ci] = Some(ord);
    }

    let mut enumerations: Vec<Vec<Vec<u32>>> = vec![Vec::new(); cat_specs.len()];
    for &ci in &eligible {
        enumerations[ci] = enumerate_feasible_clusterings(category_counts[ci], config.k_prime)?;
    }

    let mut encodings = one_hot_encodings(schema);
    let mut remaining = eligible.clone();
    let mut steps: Vec<StepRecord> = Vec::with_capacity(eligible.len());
    let mut last_payoff = f64::NEG_INFINITY;

    while !remaining.is_empty() {
        let candidates: Vec<(usize, usize)> = remaining
            .iter()
            .flat_map(|&ci| (0..enumerations[ci].len()).map(move |e| (ci, e)))
            .collect();
        let payoffs: Vec<f64> = candidates
            .par_iter()
            .map(|&(ci, e)| {
                let mut enc = encodings.clone();
                enc[ci] = CatEncoding::Reduced {
                    ordering: orderings[ci].clone().unwrap(),
                    clustering: Clustering {
                        predictor: cat_specs[ci].name.clone(),
                        k_prime: config.k_prime,
                        assignment: enumerations[ci][e].clone(),
                    },
                };
                candidate_payoff(schema, family, &config.fit, fit_part, validation_part, &enc)
            })
            .collect();

        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| {
            payoffs[b]
                .total_cmp(&payoffs[a])
                .then(candidates[a].0.cmp(&candidates[b].0))
                .then(candidates[a].1.cmp(&candidates[b].1))
        });
        let r = rcl_size(config.rcl_rule, &remaining, &category_counts).min(order.len());
        let picked = order[rng.gen_range(0..r)];
        let (ci, e) = candidates[picked];

        encodings[ci] = CatEncoding::Reduced {
            ordering: orderings[ci].clone().unwrap(),
            clustering: Clustering {
                predictor: cat_specs[ci].name.clone(),
                k_prime: config.k_prime,
                assignment: enumerations[ci][e].clone(),
            },
        };
        remaining.retain(|&c| c != ci);
        last_payoff = payoffs[picked];
        steps.push(StepRecord {
            chosen_predictor: cat_specs[ci].name.clone(),
            chosen_enumeration_index: e,
            n_candidates_evaluated: candidates.len(),
            rcl_size: r,
            payoff: last_payoff,
        });
    }

    // The returned model is the fully clustered GLM on the full training
    // sample; the payoff stays the validation payoff of the final commit.
    let full_design = build_design(schema, train, &encodings)?;
    let model = fit_irls(&full_design, &train.response.to_f64(), family, &config.fit)?;

    let clusterings = eligible
        .iter()
        .map(|&ci| match &encodings[ci] {
            CatEncoding::Reduced {
                ordering,
                clustering,
            } => PredictorClustering {
                ordering: ordering.clone(),
                clustering: clustering.clone(),
            },
            CatEncoding::OneHot => unreachable!("eligible predictor left unclustered"),
        })
        .collect();

    Ok(IterationResult {
        repeat_index,
        clusterings,
        payoff: last_payoff,
        model,
        steps,
    })
}

/// Encodings that reproduce an iteration's design: committed reductions for
/// eligible predictors, one-hot everywhere else.
pub fn encodings_of(schema: &Schema, iteration: &IterationResult) -> Vec<CatEncoding> {
    let mut encodings = one_hot_encodings(schema);
    let cat_specs = schema.categorical();
    for pc in &iteration.clusterings {
        if let Some(ci) = cat_specs
            .iter()
            .position(|s| s.name == pc.clustering.predictor)
        {
            encodings[ci] = CatEncoding::Reduced {
                ordering: pc.ordering.clone(),
                clustering: pc.clustering.clone(),
            };
        }
    }
    encodings
}

/// Runs `m` independent passes on per-repeat RNG streams and returns the
/// best clustered model by payoff (ties to the lowest repeat index) together
/// with the full collection.
pub fn grasp_run(
    schema: &Schema,
    family: Family,
    train: &Dataset,
    test: &Dataset,
    config: &GraspConfig,
) -> Result<GraspOutput> {
    config.validate()?;
    eligible_predictors(schema, config.k_prime)?;

    let outcomes: Vec<Result<IterationResult>> = (0..config.m)
        .into_par_iter()
        .map(|rep| grasp_single_pass(schema, family, train, test, config, rep))
        .collect();

    let mut iterations = Vec::with_capacity(config.m);
    let mut first_error: Option<Error> = None;
    for outcome in outcomes {
        match outcome {
            Ok(it) => iterations.push(it),
            Err(e) => {
                log::warn!("GRASP repeat failed: {e}");
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if iterations.is_empty() {
        return Err(Error::Grasp(format!(
            "all {} repeats failed; first error: {}",
            config.m,
            first_error.map(|e| e.to_string()).unwrap_or_default()
        )));
    }

    let mut best_index = 0;
    for (i, it) in iterations.iter().enumerate() {
        if it.payoff > iterations[best_index].payoff {
            best_index = i;
        }
    }

    let best = &iterations[best_index];
    let test_design = build_design(schema, test, &encodings_of(schema, best))?;
    let preds = predict_mean(&best.model, &test_design)?;
    let test_metric = match &test.response {
        ResponseData::Binary(y) => MetricValue {
            kind: MetricKind::Ccr,
            value: ccr(&preds, y)?,
        },
        ResponseData::Count(y) => {
            let yf: Vec<f64> = y.iter().map(|&c| c as f64).collect();
            MetricValue {
                kind: MetricKind::Rmse,
                value: rmse(&preds, &yf)?,
            }
        }
    };

    Ok(GraspOutput {
        best_index,
        iterations,
        test_metric,
    })
}

/// Serializes a committed clustering with labels resolved through the schema.
pub fn clustering_to_json(schema: &Schema, pc: &PredictorClustering) -> Result<serde_json::Value> {
    let spec = schema
        .categorical()
        .into_iter()
        .find(|s| s.name == pc.clustering.predictor)
        .ok_or_else(|| {
            Error::Grasp(format!(
                "predictor '{}' not in schema",
                pc.clustering.predictor
            ))
        })?;
    let cats = spec.categories.as_ref().unwrap();
    let order_labels: Vec<&str> = pc
        .ordering
        .order
        .iter()
        .map(|&c| cats[c as usize].as_str())
        .collect();
    Ok(serde_json::json!({
        "predictor": pc.clustering.predictor,
        "k_prime": pc.clustering.k_prime,
        "order": order_labels,
        "assignment": pc.clustering.assignment,
    }))
}

/// Full-output JSON: best model, per-repeat clusterings, payoffs, seed.
pub fn grasp_output_to_json(
    schema: &Schema,
    config: &GraspConfig,
    output: &GraspOutput,
) -> Result<serde_json::Value> {
    let iteration_json = |it: &IterationResult| -> Result<serde_json::Value> {
        let clusterings: Vec<serde_json::Value> = it
            .clusterings
            .iter()
            .map(|pc| clustering_to_json(schema, pc))
            .collect::<Result<_>>()?;
        Ok(serde_json::json!({
            "repeat_index": it.repeat_index,
            "payoff": it.payoff,
            "clusterings": clusterings,
            "steps": it.steps,
        }))
    };
    let best = output.best();
    Ok(serde_json::json!({
        "seed": config.seed,
        "m": config.m,
        "k_prime": config.k_prime,
        "payoff_split": config.payoff_split,
        "best": {
            "repeat_index": best.repeat_index,
            "payoff": best.payoff,
            "clusterings": best.clusterings.iter()
                .map(|pc| clustering_to_json(schema, pc))
                .collect::<Result<Vec<_>>>()?,
            "model": serde_json::to_value(&best.model)?,
        },
        "test_metric": output.test_metric,
        "iterations": output.iterations.iter()
            .map(iteration_json)
            .collect::<Result<Vec<_>>>()?,
    }))
}

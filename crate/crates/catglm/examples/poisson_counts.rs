//! Poisson regression on count data with the log link.
//!
//! ```text
//! cargo run --release --example poisson_counts
//! ```

use catglm::{
    build_design, fit_irls, one_hot_encodings, predict_mean, rmse, split, Dataset, Family,
    FitConfig, PredictorKind, PredictorSpec, ResponseData, ResponseSpec, ResponseType, Schema,
    SplitPlan,
};

fn uniform(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

/// Inverse-CDF Poisson draw, good enough for demo data.
fn poisson_draw(lambda: f64, state: &mut u64) -> u64 {
    let u = uniform(state);
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while cdf < u && k < 200 {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
    }
    k
}

fn main() -> catglm::Result<()> {
    let schema = Schema::new(
        vec![
            PredictorSpec {
                name: "severity".into(),
                kind: PredictorKind::Ordinal,
                categories: Some(["mild", "moderate", "severe"].map(String::from).to_vec()),
            },
            PredictorSpec {
                name: "exposure".into(),
                kind: PredictorKind::Continuous,
                categories: None,
            },
        ],
        ResponseSpec {
            name: "visits".into(),
            response_type: ResponseType::Count,
            positive_label: None,
        },
    )?;

    let n = 1500;
    let mut state = 99u64;
    let severity: Vec<u32> = (0..n).map(|_| (uniform(&mut state) * 3.0) as u32).collect();
    let exposure: Vec<f64> = (0..n).map(|_| uniform(&mut state)).collect();
    let visits: Vec<u64> = severity
        .iter()
        .zip(&exposure)
        .map(|(&s, &e)| {
            let lambda = (0.4 + 0.6 * f64::from(s) + 0.8 * e).exp();
            poisson_draw(lambda, &mut state)
        })
        .collect();
    let dataset = Dataset::new(vec![severity], vec![exposure], ResponseData::Count(visits))?;

    let plan = SplitPlan {
        train_fraction: 0.7,
        n_reshuffles: 1,
        seed: 3,
    };
    let (train, test) = split(&dataset, &plan, 0)?;
    let encodings = one_hot_encodings(&schema);
    let design = build_design(&schema, &train, &encodings)?;
    let model = fit_irls(
        &design,
        &train.response.to_f64(),
        Family::PoissonLog,
        &FitConfig::default(),
    )?;

    for (col, coef) in model.columns.iter().zip(&model.coefficients) {
        println!("  {col:<24} {coef:>10.4}");
    }
    let preds = predict_mean(&model, &build_design(&schema, &test, &encodings)?)?;
    if let ResponseData::Count(y) = &test.response {
        let yf: Vec<f64> = y.iter().map(|&c| c as f64).collect();
        println!("test RMSE: {:.4}", rmse(&preds, &yf)?);
    }
    Ok(())
}

//! Fit a one-hot logistic regression and score it on held-out data.
//!
//! ```text
//! cargo run --release --example fit_logistic
//! ```

use catglm::{
    build_design, ccr, fit_irls, one_hot_encodings, predict_mean, split, Dataset, Family,
    FitConfig, PredictorKind, PredictorSpec, ResponseData, ResponseSpec, ResponseType, Schema,
    SplitPlan,
};

fn uniform(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn main() -> catglm::Result<()> {
    // A contract-type predictor with four levels, plus one numeric feature.
    let schema = Schema::new(
        vec![
            PredictorSpec {
                name: "contract".into(),
                kind: PredictorKind::Nominal,
                categories: Some(
                    ["monthly", "quarterly", "yearly", "two-year"]
                        .map(String::from)
                        .to_vec(),
                ),
            },
            PredictorSpec {
                name: "tenure".into(),
                kind: PredictorKind::Continuous,
                categories: None,
            },
        ],
        ResponseSpec {
            name: "churned".into(),
            response_type: ResponseType::Binary,
            positive_label: Some("1".into()),
        },
    )?;

    // Synthetic churn data: short contracts churn more, tenure protects.
    let n = 1200;
    let mut state = 2024u64;
    let contract: Vec<u32> = (0..n).map(|_| (uniform(&mut state) * 4.0) as u32).collect();
    let tenure: Vec<f64> = (0..n).map(|_| uniform(&mut state) * 6.0).collect();
    let churned: Vec<u8> = contract
        .iter()
        .zip(&tenure)
        .map(|(&c, &t)| {
            let eta = 1.1 - 0.9 * f64::from(c) - 0.35 * t;
            let p = 1.0 / (1.0 + (-eta).exp());
            u8::from(uniform(&mut state) < p)
        })
        .collect();
    let dataset = Dataset::new(vec![contract], vec![tenure], ResponseData::Binary(churned))?;

    let plan = SplitPlan {
        train_fraction: 0.7,
        n_reshuffles: 1,
        seed: 7,
    };
    let (train, test) = split(&dataset, &plan, 0)?;

    let encodings = one_hot_encodings(&schema);
    let design = build_design(&schema, &train, &encodings)?;
    let model = fit_irls(
        &design,
        &train.response.to_f64(),
        Family::BernoulliLogit,
        &FitConfig::default(),
    )?;

    println!(
        "converged={} iterations={} deviance={:.2}",
        model.converged, model.n_iterations, model.deviance
    );
    for (col, coef) in model.columns.iter().zip(&model.coefficients) {
        println!("  {col:<24} {coef:>10.4}");
    }

    let test_design = build_design(&schema, &test, &encodings)?;
    let preds = predict_mean(&model, &test_design)?;
    if let ResponseData::Binary(y) = &test.response {
        println!("test CCR: {:.2}%", 100.0 * ccr(&preds, y)?);
    }
    Ok(())
}

//! The full evaluation protocol: ten 70/30 reshuffles, fitting the one-hot
//! model and the clustered model on each training sample and scoring both on
//! the test sample.
//!
//! ```text
//! cargo run --release --example benchmark_protocol
//! ```

use catglm::report::{benchmark_summary, run_benchmark};
use catglm::{
    Dataset, Family, GraspConfig, PredictorKind, PredictorSpec, ResponseData, ResponseSpec,
    ResponseType, Schema, SplitPlan,
};

fn uniform(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn main() -> catglm::Result<()> {
    let schema = Schema::new(
        vec![
            PredictorSpec {
                name: "channel".into(),
                kind: PredictorKind::Nominal,
                categories: Some((0..7).map(|i| format!("ch{i}")).collect()),
            },
            PredictorSpec {
                name: "plan".into(),
                kind: PredictorKind::Ordinal,
                categories: Some(["basic", "plus", "pro", "max"].map(String::from).to_vec()),
            },
            PredictorSpec {
                name: "spend".into(),
                kind: PredictorKind::Continuous,
                categories: None,
            },
        ],
        ResponseSpec {
            name: "converted".into(),
            response_type: ResponseType::Binary,
            positive_label: Some("1".into()),
        },
    )?;

    let n = 3000;
    let mut state = 8u64;
    let channel: Vec<u32> = (0..n).map(|_| (uniform(&mut state) * 7.0) as u32).collect();
    let plan_col: Vec<u32> = (0..n).map(|_| (uniform(&mut state) * 4.0) as u32).collect();
    let spend: Vec<f64> = (0..n).map(|_| uniform(&mut state) * 3.0).collect();
    let y: Vec<u8> = channel
        .iter()
        .zip(&plan_col)
        .zip(&spend)
        .map(|((&c, &p), &s)| {
            // channels really form two groups; plans two tiers
            let eta = -0.8 + 1.1 * f64::from(c < 3) + 0.9 * f64::from(p >= 2) + 0.3 * s;
            u8::from(uniform(&mut state) < 1.0 / (1.0 + (-eta).exp()))
        })
        .collect();
    let dataset = Dataset::new(
        vec![channel, plan_col],
        vec![spend],
        ResponseData::Binary(y),
    )?;

    let plan = SplitPlan {
        train_fraction: 0.7,
        n_reshuffles: 10,
        seed: 123,
    };
    let config = GraspConfig {
        m: 30,
        seed: 123,
        ..GraspConfig::default()
    };
    let report = run_benchmark(
        "synthetic",
        &schema,
        &dataset,
        Family::BernoulliLogit,
        &plan,
        &config,
    )?;
    print!("{}", benchmark_summary(&report));
    println!("elapsed: {:.1}s", report.wall_clock_secs);
    for row in &report.per_reshuffle {
        println!(
            "  reshuffle {}: original {:.4}  clustered {:.4}  (payoff {:.4})",
            row.reshuffle, row.original, row.clustered, row.best_payoff
        );
    }
    Ok(())
}

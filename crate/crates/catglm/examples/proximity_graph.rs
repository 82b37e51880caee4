//! Derive the co-clustering proximity between categories from the full
//! collection of clustered models, and emit it as DOT and CSV.
//!
//! ```text
//! cargo run --release --example proximity_graph | dot -Tpng -o proximity.png
//! ```

use catglm::{
    compute_proximity, export_csv, export_dot, grasp_run, split, Dataset, Family, GraspConfig,
    PredictorKind, PredictorSpec, ResponseData, ResponseSpec, ResponseType, Schema, SplitPlan,
};

fn uniform(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn main() -> catglm::Result<()> {
    // Six industries where manufacturing-like ones share an effect, the
    // service-like ones another, and "other" floats in between.
    let labels = ["steel", "autos", "chemicals", "retail", "finance", "other"];
    let schema = Schema::new(
        vec![PredictorSpec {
            name: "industry".into(),
            kind: PredictorKind::Nominal,
            categories: Some(labels.map(String::from).to_vec()),
        }],
        ResponseSpec {
            name: "y".into(),
            response_type: ResponseType::Binary,
            positive_label: Some("1".into()),
        },
    )?;

    let n = 1800;
    let mut state = 31u64;
    let industry: Vec<u32> = (0..n).map(|_| (uniform(&mut state) * 6.0) as u32).collect();
    let y: Vec<u8> = industry
        .iter()
        .map(|&i| {
            let eta = match i {
                0..=2 => 0.9,  // manufacturing block
                3 | 4 => -0.9, // services block
                _ => 0.1,      // in between
            };
            u8::from(uniform(&mut state) < 1.0 / (1.0 + f64::exp(-eta)))
        })
        .collect();
    let dataset = Dataset::new(vec![industry], vec![], ResponseData::Binary(y))?;

    let plan = SplitPlan {
        train_fraction: 0.7,
        n_reshuffles: 1,
        seed: 1,
    };
    let (train, test) = split(&dataset, &plan, 0)?;
    let config = GraspConfig {
        m: 60,
        seed: 1,
        ..GraspConfig::default()
    };
    let output = grasp_run(&schema, Family::BernoulliLogit, &train, &test, &config)?;

    let matrix = compute_proximity(&schema, &output.iterations, "industry")?;
    eprintln!("proximity matrix (share of {} clustered models):", matrix.m);
    eprint!("{}", export_csv(&matrix));
    // DOT on stdout so it can pipe straight into graphviz
    print!("{}", export_dot(&matrix, 0.05));
    Ok(())
}

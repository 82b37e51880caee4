//! Reduce every eligible categorical predictor to two clusters with the
//! randomized search, then inspect the winning clustered model.
//!
//! ```text
//! cargo run --release --example grasp_search
//! ```

use catglm::{
    grasp_run, split, Dataset, Family, GraspConfig, PredictorKind, PredictorSpec, ResponseData,
    ResponseSpec, ResponseType, Schema, SplitPlan,
};

fn uniform(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn main() -> catglm::Result<()> {
    // Eight regions that really act as two blocks, and a five-level grade
    // whose top two levels behave alike.
    let schema = Schema::new(
        vec![
            PredictorSpec {
                name: "region".into(),
                kind: PredictorKind::Nominal,
                categories: Some((0..8).map(|i| format!("r{i}")).collect()),
            },
            PredictorSpec {
                name: "grade".into(),
                kind: PredictorKind::Ordinal,
                categories: Some(["e", "d", "c", "b", "a"].map(String::from).to_vec()),
            },
        ],
        ResponseSpec {
            name: "y".into(),
            response_type: ResponseType::Binary,
            positive_label: Some("1".into()),
        },
    )?;

    let n = 2000;
    let mut state = 11u64;
    let region: Vec<u32> = (0..n).map(|_| (uniform(&mut state) * 8.0) as u32).collect();
    let grade: Vec<u32> = (0..n).map(|_| (uniform(&mut state) * 5.0) as u32).collect();
    let y: Vec<u8> = region
        .iter()
        .zip(&grade)
        .map(|(&r, &g)| {
            let block = f64::from(r % 2 == 0); // even regions lift the odds
            let top = f64::from(g >= 3); // grades a and b lift them more
            let eta = -1.2 + 1.3 * block + 1.8 * top;
            u8::from(uniform(&mut state) < 1.0 / (1.0 + (-eta).exp()))
        })
        .collect();
    let dataset = Dataset::new(vec![region, grade], vec![], ResponseData::Binary(y))?;

    let plan = SplitPlan {
        train_fraction: 0.7,
        n_reshuffles: 1,
        seed: 5,
    };
    let (train, test) = split(&dataset, &plan, 0)?;

    let config = GraspConfig {
        m: 40,
        seed: 5,
        ..GraspConfig::default()
    };
    let output = grasp_run(&schema, Family::BernoulliLogit, &train, &test, &config)?;

    let best = output.best();
    println!(
        "best repeat {} | validation payoff {:.4} | test {:?} {:.4}",
        best.repeat_index, best.payoff, output.test_metric.kind, output.test_metric.value
    );
    for pc in &best.clusterings {
        let spec = schema
            .categorical()
            .into_iter()
            .find(|s| s.name == pc.clustering.predictor)
            .unwrap();
        let cats = spec.categories.as_ref().unwrap();
        println!("\n{}:", pc.clustering.predictor);
        let by_cat = pc.clustering.clusters_by_category(&pc.ordering)?;
        for cluster in 0..pc.clustering.n_clusters_used() {
            let members: Vec<&str> = (0..cats.len())
                .filter(|&c| by_cat[c] as usize == cluster)
                .map(|c| cats[c].as_str())
                .collect();
            println!("  cluster {cluster}: {}", members.join(", "));
        }
    }
    println!(
        "\ncommit order: {:?}",
        best.steps
            .iter()
            .map(|s| s.chosen_predictor.as_str())
            .collect::<Vec<_>>()
    );
    Ok(())
}

//! Enumerate the feasible consecutive clusterings of an ordered predictor.
//!
//! For K ordered categories and K' clusters, a clustering is feasible when
//! every cluster is a run of consecutive categories; the cut-free one puts
//! all categories together, which removes the predictor from the model.
//!
//! ```text
//! cargo run --example feasible_clusterings
//! ```

use catglm::enumerate_feasible_clusterings;

fn main() -> catglm::Result<()> {
    // A 15-level ordered predictor with two clusters: exactly 15 feasible
    // clusterings, one per prefix length.
    let levels = 15;
    let clusterings = enumerate_feasible_clusterings(levels, 2)?;
    println!(
        "K={levels}, K'=2: {} feasible clusterings (membership of the first cluster)\n",
        clusterings.len()
    );
    for pos in 0..levels {
        print!("level {:>2} ", pos + 1);
        for asg in &clusterings {
            print!(" {}", if asg[pos] == 0 { 1 } else { 0 });
        }
        println!();
    }

    // Three clusters over five categories: cuts in the four gaps.
    let clusterings = enumerate_feasible_clusterings(5, 3)?;
    println!("\nK=5, K'=3: {} feasible clusterings", clusterings.len());
    for asg in &clusterings {
        let pretty: Vec<String> = asg.iter().map(|c| c.to_string()).collect();
        println!("  [{}]", pretty.join(" "));
    }
    Ok(())
}

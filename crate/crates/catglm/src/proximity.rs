//! Co-clustering proximity between categories across the collection of
//! clustered models, with DOT and CSV exports.

use ndarray::Array2;

use crate::data::Schema;
use crate::error::{Error, Result};
use crate::grasp::IterationResult;

/// Symmetric proximity of one predictor's categories: entry (c, d) is the
/// fraction of iterations placing c and d in the same cluster. Counts are
/// kept as integers so every value is exactly a multiple of 1/m.
#[derive(Debug, Clone)]
pub struct ProximityMatrix {
    pub predictor: String,
    pub labels: Vec<String>,
    pub m: usize,
    counts: Array2<u32>,
}

impl ProximityMatrix {
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// Raw co-clustering count for a pair.
    pub fn count(&self, c: usize, d: usize) -> u32 {
        self.counts[[c, d]]
    }

    pub fn value(&self, c: usize, d: usize) -> f64 {
        self.counts[[c, d]] as f64 / self.m as f64
    }

    pub fn values(&self) -> Array2<f64> {
        self.counts.mapv(|v| v as f64 / self.m as f64)
    }
}

/// Counts, over all iterations, how often each pair of categories shares a
/// cluster. The predictor must carry a committed clustering in every
/// iteration.
pub fn compute_proximity(
    schema: &Schema,
    iterations: &[IterationResult],
    predictor: &str,
) -> Result<ProximityMatrix> {
    if iterations.is_empty() {
        return Err(Error::Proximity("no iterations to aggregate".into()));
    }
    let spec = schema
        .categorical()
        .into_iter()
        .find(|s| s.name == predictor)
        .ok_or_else(|| Error::Proximity(format!("'{predictor}' is not a categorical predictor")))?;
    let labels = spec.categories.clone().unwrap();
    let k = labels.len();
    let mut counts = Array2::<u32>::zeros((k, k));

    for it in iterations {
        let pc = it
            .clusterings
            .iter()
            .find(|pc| pc.clustering.predictor == predictor)
            .ok_or_else(|| {
                Error::Proximity(format!(
                    "predictor '{predictor}' absent from repeat {}",
                    it.repeat_index
                ))
            })?;
        let by_cat = pc.clustering.clusters_by_category(&pc.ordering)?;
        if by_cat.len() != k {
            return Err(Error::Proximity(format!(
                "repeat {} clusters {} categories of '{predictor}', schema has {k}",
                it.repeat_index,
                by_cat.len()
            )));
        }
        for c in 0..k {
            for d in c..k {
                if by_cat[c] == by_cat[d] {
                    counts[[c, d]] += 1;
                    if c != d {
                        counts[[d, c]] += 1;
                    }
                }
            }
        }
    }

    Ok(ProximityMatrix {
        predictor: predictor.to_string(),
        labels,
        m: iterations.len(),
        counts,
    })
}

fn dot_quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT graph: one node per category, an edge for every pair with
/// proximity strictly above `threshold`, pen width scaled 1..10. Node and
/// edge order follow the label sort, so output is byte-stable.
pub fn export_dot(matrix: &ProximityMatrix, threshold: f64) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph {} {{\n", dot_quote(&matrix.predictor)));

    let mut order: Vec<usize> = (0..matrix.k()).collect();
    order.sort_by(|&a, &b| matrix.labels[a].cmp(&matrix.labels[b]));
    for &i in &order {
        out.push_str(&format!("  {};\n", dot_quote(&matrix.labels[i])));
    }
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            let v = matrix.value(a, b);
            if v > threshold {
                let penwidth = 1.0 + 9.0 * v;
                out.push_str(&format!(
                    "  {} -- {} [penwidth={penwidth}];\n",
                    dot_quote(&matrix.labels[a]),
                    dot_quote(&matrix.labels[b]),
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn csv_escape(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// The proximity matrix as CSV with a label header row and column.
pub fn export_csv(matrix: &ProximityMatrix) -> String {
    let mut out = String::new();
    out.push_str("category");
    for l in &matrix.labels {
        out.push(',');
        out.push_str(&csv_escape(l));
    }
    out.push('\n');
    for c in 0..matrix.k() {
        out.push_str(&csv_escape(&matrix.labels[c]));
        for d in 0..matrix.k() {
            out.push(',');
            out.push_str(&format!("{}", matrix.value(c, d)));
        }
        out.push('\n');
    }
    out
}

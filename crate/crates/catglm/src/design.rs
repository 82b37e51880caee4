//! Dense design matrices with per-column provenance.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::clustering::{CategoryOrdering, Clustering};
use crate::data::{Dataset, Schema};
use crate::error::{Error, Result};

/// Where a design column came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Column {
    Intercept,
    /// Indicator column. For one-hot encodings `group` is the category
    /// index (the reference category 0 is left out); for reduced encodings
    /// it is the cluster id (the last non-empty cluster is left out).
    Dummy {
        predictor: String,
        group: u32,
    },
    Continuous {
        predictor: String,
    },
}

impl std::fmt::Display for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Column::Intercept => write!(f, "intercept"),
            Column::Dummy { predictor, group } => write!(f, "{predictor}[{group}]"),
            Column::Continuous { predictor } => write!(f, "{predictor}"),
        }
    }
}

/// How one categorical predictor enters the design.
#[derive(Debug, Clone, PartialEq)]
pub enum CatEncoding {
    /// K-1 dummies, category 0 left out for contrast.
    OneHot,
    /// Reduced representation induced by a clustering of the ordered
    /// categories.
    Reduced {
        ordering: CategoryOrdering,
        clustering: Clustering,
    },
}

/// A dense N x p design matrix plus the descriptor of every column.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub columns: Vec<Column>,
    pub values: Array2<f64>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    /// Structural invariants: one all-ones intercept, 0/1 dummies, unique
    /// descriptors.
    pub fn validate(&self) -> Result<()> {
        if self.columns.len() != self.values.ncols() {
            return Err(Error::Design(
                "descriptor/value column count mismatch".into(),
            ));
        }
        let n_intercepts = self
            .columns
            .iter()
            .filter(|c| matches!(c, Column::Intercept))
            .count();
        if n_intercepts != 1 {
            return Err(Error::Design(format!(
                "expected exactly one intercept column, found {n_intercepts}"
            )));
        }
        for (idx, col) in self.columns.iter().enumerate() {
            match col {
                Column::Intercept => {
                    if self.values.column(idx).iter().any(|&v| v != 1.0) {
                        return Err(Error::Design("intercept column is not all ones".into()));
                    }
                }
                Column::Dummy { .. } => {
                    if self
                        .values
                        .column(idx)
                        .iter()
                        .any(|&v| v != 0.0 && v != 1.0)
                    {
                        return Err(Error::Design(format!(
                            "dummy column {col} contains values outside {{0,1}}"
                        )));
                    }
                }
                Column::Continuous { .. } => {}
            }
        }
        let mut seen = std::collections::HashSet::new();
        for col in &self.columns {
            if !seen.insert(format!("{col:?}")) {
                return Err(Error::Design(format!("duplicate column descriptor {col}")));
            }
        }
        Ok(())
    }
}

/// Builds the design for a dataset: intercept first, then each categorical
/// predictor's dummies in schema order, then continuous predictors.
/// `encodings` aligns with the schema's categorical predictors.
pub fn build_design(
    schema: &Schema,
    data: &Dataset,
    encodings: &[CatEncoding],
) -> Result<DesignMatrix> {
    let cat_specs = schema.categorical();
    let cont_specs = schema.continuous();
    if encodings.len() != cat_specs.len() {
        return Err(Error::Design(format!(
            "got {} encodings for {} categorical predictors",
            encodings.len(),
            cat_specs.len()
        )));
    }
    data.check_against(schema)?;

    let n = data.n_rows;
    let mut columns: Vec<Column> = vec![Column::Intercept];
    // (cat slot, column offset, cluster-by-category map or None for one-hot)
    let mut fills: Vec<(usize, usize, Option<Vec<u32>>, usize)> = Vec::new();

    for (slot, (spec, enc)) in cat_specs.iter().zip(encodings).enumerate() {
        let k = spec.n_categories().unwrap();
        match enc {
            CatEncoding::OneHot => {
                let offset = columns.len();
                for cat in 1..k {
                    columns.push(Column::Dummy {
                        predictor: spec.name.clone(),
                        group: cat as u32,
                    });
                }
                fills.push((slot, offset, None, k - 1));
            }
            CatEncoding::Reduced {
                ordering,
                clustering,
            } => {
                if ordering.predictor != spec.name || clustering.predictor != spec.name {
                    return Err(Error::Design(format!(
                        "encoding for '{}' references '{}'/'{}'",
                        spec.name, ordering.predictor, clustering.predictor
                    )));
                }
                let by_cat = clustering.clusters_by_category(ordering)?;
                if by_cat.len() != k {
                    return Err(Error::Design(format!(
                        "clustering for '{}' covers {} categories, schema has {k}",
                        spec.name,
                        by_cat.len()
                    )));
                }
                let n_dummies = clustering.n_clusters_used() - 1;
                let offset = columns.len();
                for cluster in 0..n_dummies {
                    columns.push(Column::Dummy {
                        predictor: spec.name.clone(),
                        group: cluster as u32,
                    });
                }
                fills.push((slot, offset, Some(by_cat), n_dummies));
            }
        }
    }

    let cont_offset = columns.len();
    for spec in &cont_specs {
        columns.push(Column::Continuous {
            predictor: spec.name.clone(),
        });
    }

    let p = columns.len();
    let mut values = Array2::<f64>::zeros((n, p));
    for row in values.column_mut(0).iter_mut() {
        *row = 1.0;
    }
    for &(slot, offset, ref by_cat, n_dummies) in &fills {
        let col = &data.categorical[slot];
        match by_cat {
            None => {
                for (row, &cat) in col.iter().enumerate() {
                    if cat >= 1 {
                        values[[row, offset + cat as usize - 1]] = 1.0;
                    }
                }
            }
            Some(map) => {
                for (row, &cat) in col.iter().enumerate() {
                    let cluster = map[cat as usize] as usize;
                    if cluster < n_dummies {
                        values[[row, offset + cluster]] = 1.0;
                    }
                }
            }
        }
    }
    for (i, col) in data.continuous.iter().enumerate() {
        for (row, &v) in col.iter().enumerate() {
            values[[row, cont_offset + i]] = v;
        }
    }

    Ok(DesignMatrix { columns, values })
}

/// One-hot encodings for every categorical predictor.
pub fn one_hot_encodings(schema: &Schema) -> Vec<CatEncoding> {
    vec![CatEncoding::OneHot; schema.n_categorical()]
}

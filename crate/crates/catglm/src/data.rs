//! Dataset ingestion: schemas, CSV loading, response binarization and the
//! reshuffled train/test split protocol.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Domain};

/// What kind of predictor a column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictorKind {
    /// Categorical with a natural order; `categories` lists it low to high.
    Ordinal,
    /// Categorical without a natural order.
    Nominal,
    /// Real-valued.
    Continuous,
}

impl PredictorKind {
    pub fn is_categorical(self) -> bool {
        !matches!(self, PredictorKind::Continuous)
    }
}

/// Declaration of one predictor column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictorSpec {
    pub name: String,
    pub kind: PredictorKind,
    /// Category labels for categorical kinds; for ordinals the list order is
    /// the natural order. Absent for continuous predictors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

impl PredictorSpec {
    /// Number of categories K for a categorical predictor.
    pub fn n_categories(&self) -> Option<usize> {
        self.categories.as_ref().map(|c| c.len())
    }

    fn validate(&self) -> Result<()> {
        match (self.kind.is_categorical(), &self.categories) {
            (true, Some(cats)) => {
                if cats.is_empty() {
                    return Err(Error::Schema(format!(
                        "predictor '{}': empty category list",
                        self.name
                    )));
                }
                let mut seen = std::collections::HashSet::new();
                for c in cats {
                    if !seen.insert(c) {
                        return Err(Error::Schema(format!(
                            "predictor '{}': duplicate category '{}'",
                            self.name, c
                        )));
                    }
                }
                Ok(())
            }
            (true, None) => Err(Error::Schema(format!(
                "predictor '{}': categorical kind requires a category list",
                self.name
            ))),
            (false, Some(_)) => Err(Error::Schema(format!(
                "predictor '{}': continuous kind must not list categories",
                self.name
            ))),
            (false, None) => Ok(()),
        }
    }
}

/// Response variable type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseType {
    Binary,
    Count,
}

/// Declaration of the response column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResponseSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub response_type: ResponseType,
    /// For binary responses: the label mapped to 1. When omitted, the raw
    /// labels are binarized majority-vs-rest at load time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_label: Option<String>,
}

/// Declares every column of a dataset: predictors plus the response.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schema {
    pub predictors: Vec<PredictorSpec>,
    pub response: ResponseSpec,
}

impl Schema {
    pub fn new(predictors: Vec<PredictorSpec>, response: ResponseSpec) -> Result<Self> {
        let schema = Schema {
            predictors,
            response,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = std::collections::HashSet::new();
        for p in &self.predictors {
            p.validate()?;
            if !names.insert(p.name.as_str()) {
                return Err(Error::Schema(format!(
                    "duplicate predictor name '{}'",
                    p.name
                )));
            }
        }
        if names.contains(self.response.name.as_str()) {
            return Err(Error::Schema(format!(
                "response name '{}' collides with a predictor",
                self.response.name
            )));
        }
        if self.response.positive_label.is_some()
            && self.response.response_type != ResponseType::Binary
        {
            return Err(Error::Schema(
                "positive_label is only valid for binary responses".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let schema: Schema = serde_json::from_str(&text)?;
        schema.validate()?;
        Ok(schema)
    }

    /// Categorical predictors in declaration order.
    pub fn categorical(&self) -> Vec<&PredictorSpec> {
        self.predictors
            .iter()
            .filter(|p| p.kind.is_categorical())
            .collect()
    }

    /// Continuous predictors in declaration order.
    pub fn continuous(&self) -> Vec<&PredictorSpec> {
        self.predictors
            .iter()
            .filter(|p| !p.kind.is_categorical())
            .collect()
    }

    /// Number of categorical predictors (J).
    pub fn n_categorical(&self) -> usize {
        self.categorical().len()
    }

    /// Total category count over categorical predictors (sum of K_j).
    pub fn total_categories(&self) -> usize {
        self.categorical()
            .iter()
            .map(|p| p.n_categories().unwrap_or(0))
            .sum()
    }
}

/// Response column contents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResponseData {
    Binary(Vec<u8>),
    Count(Vec<u64>),
}

impl ResponseData {
    pub fn len(&self) -> usize {
        match self {
            ResponseData::Binary(v) => v.len(),
            ResponseData::Count(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            ResponseData::Binary(v) => v.iter().map(|&b| f64::from(b)).collect(),
            ResponseData::Count(v) => v.iter().map(|&c| c as f64).collect(),
        }
    }

    fn subset(&self, rows: &[usize]) -> ResponseData {
        match self {
            ResponseData::Binary(v) => ResponseData::Binary(rows.iter().map(|&r| v[r]).collect()),
            ResponseData::Count(v) => ResponseData::Count(rows.iter().map(|&r| v[r]).collect()),
        }
    }
}

/// Column-oriented dataset matching a `Schema`. Categorical cells are stored
/// as indices into the predictor's category list; column order follows the
/// schema's categorical / continuous declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub n_rows: usize,
    pub categorical: Vec<Vec<u32>>,
    pub continuous: Vec<Vec<f64>>,
    pub response: ResponseData,
}

impl Dataset {
    pub fn new(
        categorical: Vec<Vec<u32>>,
        continuous: Vec<Vec<f64>>,
        response: ResponseData,
    ) -> Result<Self> {
        let n_rows = response.len();
        for (i, col) in categorical.iter().enumerate() {
            if col.len() != n_rows {
                return Err(Error::Data(format!(
                    "categorical column {i} has {} rows, expected {n_rows}",
                    col.len()
                )));
            }
        }
        for (i, col) in continuous.iter().enumerate() {
            if col.len() != n_rows {
                return Err(Error::Data(format!(
                    "continuous column {i} has {} rows, expected {n_rows}",
                    col.len()
                )));
            }
        }
        Ok(Dataset {
            n_rows,
            categorical,
            continuous,
            response,
        })
    }

    /// Rows extracted by index, in the order given.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            n_rows: rows.len(),
            categorical: self
                .categorical
                .iter()
                .map(|col| rows.iter().map(|&r| col[r]).collect())
                .collect(),
            continuous: self
                .continuous
                .iter()
                .map(|col| rows.iter().map(|&r| col[r]).collect())
                .collect(),
            response: self.response.subset(rows),
        }
    }

    /// Checks every categorical cell indexes a valid category of its spec.
    pub fn check_against(&self, schema: &Schema) -> Result<()> {
        let cats = schema.categorical();
        if cats.len() != self.categorical.len()
            || schema.continuous().len() != self.continuous.len()
        {
            return Err(Error::Data(
                "dataset column count does not match schema".into(),
            ));
        }
        for (spec, col) in cats.iter().zip(&self.categorical) {
            let k = spec.n_categories().unwrap_or(0) as u32;
            if let Some(bad) = col.iter().find(|&&v| v >= k) {
                return Err(Error::Data(format!(
                    "predictor '{}': category index {bad} out of range (K={k})",
                    spec.name
                )));
            }
        }
        Ok(())
    }
}

/// The reshuffled train/test split protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train_fraction: f64,
    pub n_reshuffles: usize,
    pub seed: u64,
}

impl Default for SplitPlan {
    fn default() -> Self {
        SplitPlan {
            train_fraction: 0.70,
            n_reshuffles: 10,
            seed: 0,
        }
    }
}

/// Options controlling CSV ingestion.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Label substituted for empty or `?` categorical cells. It must be
    /// declared in the schema for predictors where it can occur.
    pub missing_label: String,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            missing_label: "Missing".to_string(),
        }
    }
}

fn is_missing_token(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t == "?"
}

/// Loads an RFC-4180 CSV with a header row against a schema. Columns are
/// matched by name; extra columns in the file are ignored.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot open '{}': {e}", path.display())))?;

    let headers = reader.headers()?.clone();
    let column_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("column '{name}' missing from CSV header")))
    };

    let cat_specs = schema.categorical();
    let cont_specs = schema.continuous();
    let cat_cols: Vec<usize> = cat_specs
        .iter()
        .map(|s| column_of(&s.name))
        .collect::<Result<_>>()?;
    let cont_cols: Vec<usize> = cont_specs
        .iter()
        .map(|s| column_of(&s.name))
        .collect::<Result<_>>()?;
    let resp_col = column_of(&schema.response.name)?;

    // Per-predictor label -> index maps.
    let lookups: Vec<HashMap<&str, u32>> = cat_specs
        .iter()
        .map(|s| {
            s.categories
                .as_ref()
                .unwrap()
                .iter()
                .enumerate()
                .map(|(i, c)| (c.as_str(), i as u32))
                .collect()
        })
        .collect();

    let mut categorical: Vec<Vec<u32>> = vec![Vec::new(); cat_specs.len()];
    let mut continuous: Vec<Vec<f64>> = vec![Vec::new(); cont_specs.len()];
    let mut raw_response: Vec<String> = Vec::new();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let row = row_idx + 1; // 1-based data row for messages
        for (slot, (&col, spec)) in cat_cols.iter().zip(&cat_specs).enumerate() {
            let raw = record.get(col).unwrap_or("");
            let label = if is_missing_token(raw) {
                opts.missing_label.as_str()
            } else {
                raw
            };
            match lookups[slot].get(label) {
                Some(&idx) => categorical[slot].push(idx),
                None => {
                    return Err(Error::Data(format!(
                        "row {row}, column '{}': unknown category label '{label}'",
                        spec.name
                    )))
                }
            }
        }
        for (slot, (&col, spec)) in cont_cols.iter().zip(&cont_specs).enumerate() {
            let raw = record.get(col).unwrap_or("");
            if is_missing_token(raw) {
                return Err(Error::Data(format!(
                    "row {row}, column '{}': missing continuous value",
                    spec.name
                )));
            }
            let value: f64 = raw.parse().map_err(|_| {
                Error::Data(format!(
                    "row {row}, column '{}': non-numeric value '{raw}'",
                    spec.name
                ))
            })?;
            continuous[slot].push(value);
        }
        let resp_raw = record.get(resp_col).unwrap_or("");
        if is_missing_token(resp_raw) {
            return Err(Error::Data(format!("row {row}: missing response value")));
        }
        raw_response.push(resp_raw.to_string());
    }

    if raw_response.is_empty() {
        return Err(Error::Data("CSV contains no data rows".into()));
    }

    let response = match schema.response.response_type {
        ResponseType::Binary => match &schema.response.positive_label {
            Some(pos) => {
                ResponseData::Binary(raw_response.iter().map(|v| u8::from(v == pos)).collect())
            }
            None => {
                let (bits, _majority) = binarize_majority_vs_rest(&raw_response)?;
                ResponseData::Binary(bits)
            }
        },
        ResponseType::Count => {
            let mut counts = Vec::with_capacity(raw_response.len());
            for (i, v) in raw_response.iter().enumerate() {
                let c: u64 = v.parse().map_err(|_| {
                    Error::Data(format!(
                        "row {}: response '{v}' is not a non-negative integer",
                        i + 1
                    ))
                })?;
                counts.push(c);
            }
            ResponseData::Count(counts)
        }
    };

    Dataset::new(categorical, continuous, response)
}

/// Writes a dataset back to CSV: predictors in schema order, response last.
/// Binary responses are written as 0/1.
pub fn write_csv(path: impl AsRef<Path>, schema: &Schema, dataset: &Dataset) -> Result<()> {
    dataset.check_against(schema)?;
    let mut out = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = schema.predictors.iter().map(|p| p.name.as_str()).collect();
    header.push(&schema.response.name);
    out.write_record(&header)?;

    // Map each schema predictor to its slot in the dataset's column groups.
    let mut cat_slot = 0usize;
    let mut cont_slot = 0usize;
    let slots: Vec<(bool, usize)> = schema
        .predictors
        .iter()
        .map(|p| {
            if p.kind.is_categorical() {
                cat_slot += 1;
                (true, cat_slot - 1)
            } else {
                cont_slot += 1;
                (false, cont_slot - 1)
            }
        })
        .collect();

    for row in 0..dataset.n_rows {
        let mut cells: Vec<String> = Vec::with_capacity(slots.len() + 1);
        for (p, &(is_cat, slot)) in schema.predictors.iter().zip(&slots) {
            if is_cat {
                let idx = dataset.categorical[slot][row] as usize;
                cells.push(p.categories.as_ref().unwrap()[idx].clone());
            } else {
                cells.push(format!("{}", dataset.continuous[slot][row]));
            }
        }
        match &dataset.response {
            ResponseData::Binary(v) => cells.push(v[row].to_string()),
            ResponseData::Count(v) => cells.push(v[row].to_string()),
        }
        out.write_record(&cells)?;
    }
    out.flush()?;
    Ok(())
}

/// Maps the majority class label to 1 and every other label to 0. Ties on the
/// majority count are broken by lexicographic label order.
pub fn binarize_majority_vs_rest(labels: &[String]) -> Result<(Vec<u8>, String)> {
    if labels.is_empty() {
        return Err(Error::Data("cannot binarize an empty column".into()));
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for l in labels {
        *counts.entry(l.as_str()).or_insert(0) += 1;
    }
    if counts.len() < 2 {
        return Err(Error::Data(
            "degenerate response: a single distinct label cannot be binarized".into(),
        ));
    }
    let majority = counts
        .iter()
        .map(|(&label, &n)| (std::cmp::Reverse(n), label))
        .min()
        .map(|(_, label)| label.to_string())
        .unwrap();
    let bits = labels.iter().map(|l| u8::from(*l == majority)).collect();
    Ok((bits, majority))
}

/// One 70/30-style reshuffle. Deterministic in `(plan.seed, reshuffle_index)`;
/// train rows are the first `round(train_fraction * N)` of a seeded shuffle,
/// and both subsets keep original row order.
pub fn split(
    dataset: &Dataset,
    plan: &SplitPlan,
    reshuffle_index: usize,
) -> Result<(Dataset, Dataset)> {
    if reshuffle_index >= plan.n_reshuffles {
        return Err(Error::Data(format!(
            "reshuffle index {reshuffle_index} out of range (n_reshuffles={})",
            plan.n_reshuffles
        )));
    }
    if !(plan.train_fraction > 0.0 && plan.train_fraction < 1.0) {
        return Err(Error::Data(format!(
            "train_fraction {} not in (0,1)",
            plan.train_fraction
        )));
    }
    let n = dataset.n_rows;
    let n_train = (plan.train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::Data(format!(
            "split of {n} rows at fraction {} leaves an empty train or test set",
            plan.train_fraction
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(plan.seed, Domain::Split, reshuffle_index as u64);
    order.shuffle(&mut rng);
    let mut train_rows = order[..n_train].to_vec();
    let mut test_rows = order[n_train..].to_vec();
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok((dataset.subset(&train_rows), dataset.subset(&test_rows)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn toy_schema() -> Schema {
        Schema::new(
            vec![
                PredictorSpec {
                    name: "color".into(),
                    kind: PredictorKind::Nominal,
                    categories: Some(vec!["a".into(), "b".into()]),
                },
                PredictorSpec {
                    name: "age".into(),
                    kind: PredictorKind::Continuous,
                    categories: None,
                },
            ],
            ResponseSpec {
                name: "y".into(),
                response_type: ResponseType::Binary,
                positive_label: Some("1".into()),
            },
        )
        .unwrap()
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_three_row_file() {
        let f = write_temp("color,age,y\na,1.5,1\nb,2.0,0\na,0.5,1\n");
        let ds = load_csv(f.path(), &toy_schema(), &LoadOptions::default()).unwrap();
        assert_eq!(ds.n_rows, 3);
        assert_eq!(ds.categorical[0], vec![0, 1, 0]);
        assert_eq!(ds.continuous[0], vec![1.5, 2.0, 0.5]);
        assert_eq!(ds.response, ResponseData::Binary(vec![1, 0, 1]));
    }

    #[test]
    fn rejects_unknown_category_naming_it() {
        let f = write_temp("color,age,y\na,1.5,1\nzz,2.0,0\n");
        let err = load_csv(f.path(), &toy_schema(), &LoadOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("zz"), "message was: {msg}");
        assert!(msg.contains("color"), "message was: {msg}");
        assert!(msg.contains("row 2"), "message was: {msg}");
    }

    #[test]
    fn rejects_non_numeric_continuous() {
        let f = write_temp("color,age,y\na,old,1\n");
        let err = load_csv(f.path(), &toy_schema(), &LoadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("age"));
    }

    #[test]
    fn rejects_missing_response() {
        let f = write_temp("color,age,y\na,1.0,\n");
        let err = load_csv(f.path(), &toy_schema(), &LoadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("response"));
    }

    #[test]
    fn missing_cell_maps_to_declared_sentinel() {
        let schema = Schema::new(
            vec![PredictorSpec {
                name: "job".into(),
                kind: PredictorKind::Nominal,
                categories: Some(vec!["x".into(), "Missing".into()]),
            }],
            ResponseSpec {
                name: "y".into(),
                response_type: ResponseType::Binary,
                positive_label: Some("1".into()),
            },
        )
        .unwrap();
        let f = write_temp("job,y\nx,1\n?,0\n,1\n");
        let ds = load_csv(f.path(), &schema, &LoadOptions::default()).unwrap();
        assert_eq!(ds.categorical[0], vec![0, 1, 1]);
    }

    #[test]
    fn majority_binarization() {
        let labels: Vec<String> = std::iter::repeat_n("A".to_string(), 66)
            .chain(std::iter::repeat_n("B".to_string(), 20))
            .chain(std::iter::repeat_n("C".to_string(), 14))
            .collect();
        let (bits, majority) = binarize_majority_vs_rest(&labels).unwrap();
        assert_eq!(majority, "A");
        assert_eq!(bits.iter().map(|&b| b as usize).sum::<usize>(), 66);
    }

    #[test]
    fn majority_tie_breaks_lexicographically() {
        let labels: Vec<String> = std::iter::repeat_n("B".to_string(), 50)
            .chain(std::iter::repeat_n("A".to_string(), 50))
            .collect();
        let (_, majority) = binarize_majority_vs_rest(&labels).unwrap();
        assert_eq!(majority, "A");
    }

    #[test]
    fn single_label_is_degenerate() {
        let labels = vec!["A".to_string(); 5];
        assert!(binarize_majority_vs_rest(&labels).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let ds = Dataset::new(
            vec![vec![0; 10]],
            vec![],
            ResponseData::Binary(vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1]),
        )
        .unwrap();
        let plan = SplitPlan {
            train_fraction: 0.7,
            n_reshuffles: 10,
            seed: 5,
        };
        let (tr, te) = split(&ds, &plan, 0).unwrap();
        assert_eq!(tr.n_rows, 7);
        assert_eq!(te.n_rows, 3);
        let (tr2, te2) = split(&ds, &plan, 0).unwrap();
        assert_eq!(tr, tr2);
        assert_eq!(te, te2);
        let (tr3, _) = split(&ds, &plan, 1).unwrap();
        assert_ne!(tr, tr3);
    }

    #[test]
    fn split_partitions_are_exhaustive_and_disjoint() {
        let n = 100;
        let ds = Dataset::new(
            vec![(0..n as u32).map(|i| i % 3).collect()],
            vec![],
            ResponseData::Count((0..n as u64).collect()),
        )
        .unwrap();
        let plan = SplitPlan {
            train_fraction: 0.7,
            n_reshuffles: 3,
            seed: 11,
        };
        for r in 0..3 {
            let (tr, te) = split(&ds, &plan, r).unwrap();
            let mut all: Vec<u64> = match (&tr.response, &te.response) {
                (ResponseData::Count(a), ResponseData::Count(b)) => {
                    a.iter().chain(b.iter()).copied().collect()
                }
                _ => unreachable!(),
            };
            all.sort_unstable();
            assert_eq!(all, (0..n as u64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn schema_json_round_trip() {
        let schema = toy_schema();
        let text = serde_json::to_string_pretty(&schema).unwrap();
        let back: Schema = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back.predictors.len(), 2);
        assert_eq!(back.response.positive_label.as_deref(), Some("1"));
    }
}

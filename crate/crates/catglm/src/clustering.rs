//! Category orderings, feasible consecutive clusterings, reduced dummy
//! encodings and the relative complexity measure.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::data::{PredictorKind, PredictorSpec, Schema};
use crate::design::Column;
use crate::error::{Error, Result};
use crate::glm::FittedGlm;

/// A permutation of a predictor's category indices. `order[pos]` is the
/// original category index placed at position `pos`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryOrdering {
    pub predictor: String,
    pub order: Vec<u32>,
}

impl CategoryOrdering {
    pub fn identity(predictor: &str, k: usize) -> Self {
        CategoryOrdering {
            predictor: predictor.to_string(),
            order: (0..k as u32).collect(),
        }
    }

    /// Inverse permutation: position of each original category index.
    pub fn positions(&self) -> Vec<u32> {
        let mut pos = vec![0u32; self.order.len()];
        for (p, &cat) in self.order.iter().enumerate() {
            pos[cat as usize] = p as u32;
        }
        pos
    }

    fn validate(&self) -> Result<()> {
        let k = self.order.len();
        let mut seen = vec![false; k];
        for &c in &self.order {
            if (c as usize) >= k || seen[c as usize] {
                return Err(Error::Clustering(format!(
                    "ordering for '{}' is not a permutation of 0..{k}",
                    self.predictor
                )));
            }
            seen[c as usize] = true;
        }
        Ok(())
    }
}

/// An assignment of a predictor's ordered categories into at most `k_prime`
/// consecutive clusters. `assignment[pos]` is the cluster id of the category
/// at ordered position `pos`; ids are non-decreasing and form a prefix
/// `{0, ..., t}` with `t < k_prime` (trailing clusters may be empty).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    pub predictor: String,
    pub k_prime: usize,
    pub assignment: Vec<u32>,
}

impl Clustering {
    pub fn new(predictor: &str, k_prime: usize, assignment: Vec<u32>) -> Result<Self> {
        let c = Clustering {
            predictor: predictor.to_string(),
            k_prime,
            assignment,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.assignment.is_empty() {
            return Err(Error::Clustering(format!(
                "clustering for '{}' has an empty assignment",
                self.predictor
            )));
        }
        if self.assignment[0] != 0 {
            return Err(Error::Clustering(format!(
                "clustering for '{}' must start at cluster 0",
                self.predictor
            )));
        }
        for w in self.assignment.windows(2) {
            if w[1] != w[0] && w[1] != w[0] + 1 {
                return Err(Error::Clustering(format!(
                    "clustering for '{}' is not a non-decreasing prefix assignment",
                    self.predictor
                )));
            }
        }
        let used = self.n_clusters_used();
        if used > self.k_prime {
            return Err(Error::Clustering(format!(
                "clustering for '{}' uses {used} clusters, more than K'={}",
                self.predictor, self.k_prime
            )));
        }
        Ok(())
    }

    /// Number of non-empty clusters (ids are contiguous from 0).
    pub fn n_clusters_used(&self) -> usize {
        *self.assignment.iter().max().unwrap() as usize + 1
    }

    /// True when every category sits in one cluster, which removes the
    /// predictor from the model.
    pub fn is_all_in_one(&self) -> bool {
        self.n_clusters_used() == 1
    }

    /// Cluster id per original category index.
    pub fn clusters_by_category(&self, ordering: &CategoryOrdering) -> Result<Vec<u32>> {
        if ordering.order.len() != self.assignment.len() {
            return Err(Error::Clustering(format!(
                "clustering for '{}' covers {} categories but the ordering has {}",
                self.predictor,
                self.assignment.len(),
                ordering.order.len()
            )));
        }
        let mut by_cat = vec![0u32; self.assignment.len()];
        for (pos, &cat) in ordering.order.iter().enumerate() {
            by_cat[cat as usize] = self.assignment[pos];
        }
        Ok(by_cat)
    }
}

/// Identity ordering for an ordinal predictor: the schema's category list is
/// its natural order.
pub fn order_natural(spec: &PredictorSpec) -> Result<CategoryOrdering> {
    if spec.kind != PredictorKind::Ordinal {
        return Err(Error::Clustering(format!(
            "predictor '{}' is not ordinal; order it by coefficients instead",
            spec.name
        )));
    }
    let k = spec
        .n_categories()
        .ok_or_else(|| Error::Clustering(format!("predictor '{}' has no categories", spec.name)))?;
    Ok(CategoryOrdering::identity(&spec.name, k))
}

/// Orders a nominal predictor's categories by their one-hot coefficients,
/// ascending. The left-out reference category (index 0) participates with
/// value 0; ties break by original category index.
pub fn order_by_coefficients(
    spec: &PredictorSpec,
    one_hot_fit: &FittedGlm,
) -> Result<CategoryOrdering> {
    let k = spec
        .n_categories()
        .ok_or_else(|| Error::Clustering(format!("predictor '{}' has no categories", spec.name)))?;
    let mut coef = vec![0.0f64; k];
    for (cat, slot) in coef.iter_mut().enumerate().skip(1) {
        let col = one_hot_fit
            .columns
            .iter()
            .position(|c| matches!(c, Column::Dummy { predictor, group } if predictor == &spec.name && *group == cat as u32));
        match col {
            Some(i) => *slot = one_hot_fit.coefficients[i],
            None => {
                return Err(Error::Clustering(format!(
                    "one-hot fit is missing the dummy for '{}' category {cat}",
                    spec.name
                )))
            }
        }
    }
    let mut order: Vec<u32> = (0..k as u32).collect();
    order.sort_by(|&a, &b| {
        coef[a as usize]
            .total_cmp(&coef[b as usize])
            .then(a.cmp(&b))
    });
    Ok(CategoryOrdering {
        predictor: spec.name.clone(),
        order,
    })
}

/// All feasible assignments of `k_categories` ordered categories into at most
/// `k_prime` consecutive clusters: every placement of `j` cut points,
/// `0 <= j <= k_prime - 1`, in the `k_categories - 1` gaps. Enumerated by
/// number of cuts, then lexicographic cut positions. The cut-free assignment
/// puts everything in cluster 0, which is equivalent to removing the
/// predictor.
pub fn enumerate_feasible_clusterings(
    k_categories: usize,
    k_prime: usize,
) -> Result<Vec<Vec<u32>>> {
    if k_prime < 2 {
        return Err(Error::Clustering(format!(
            "K'={k_prime} must be at least 2"
        )));
    }
    if k_categories < 2 {
        return Err(Error::Clustering(format!(
            "need at least 2 categories, got {k_categories}"
        )));
    }
    let mut out = Vec::new();
    for n_cuts in 0..k_prime {
        for cuts in (1..k_categories).combinations(n_cuts) {
            let mut assignment = Vec::with_capacity(k_categories);
            let mut cluster = 0u32;
            let mut next_cut = cuts.iter().copied().peekable();
            for pos in 0..k_categories {
                if next_cut.peek() == Some(&pos) {
                    cluster += 1;
                    next_cut.next();
                }
                assignment.push(cluster);
            }
            out.push(assignment);
        }
    }
    Ok(out)
}

/// Emits the reduced dummy representation of a categorical column under a
/// clustering: one 0/1 column per non-empty cluster except the last, which is
/// the contrast. The all-in-one clustering emits no columns.
pub fn apply_clustering(
    column: &[u32],
    ordering: &CategoryOrdering,
    clustering: &Clustering,
) -> Result<Vec<Vec<f64>>> {
    ordering.validate()?;
    clustering.validate()?;
    let by_cat = clustering.clusters_by_category(ordering)?;
    let used = clustering.n_clusters_used();
    let n_dummies = used - 1;
    let mut cols = vec![vec![0.0f64; column.len()]; n_dummies];
    for (row, &cat) in column.iter().enumerate() {
        let cat = cat as usize;
        if cat >= by_cat.len() {
            return Err(Error::Clustering(format!(
                "category index {cat} outside the ordering for '{}'",
                clustering.predictor
            )));
        }
        let cluster = by_cat[cat] as usize;
        if cluster < n_dummies {
            cols[cluster][row] = 1.0;
        }
    }
    Ok(cols)
}

/// Clustered-model categorical coefficient share, in percent:
/// `J / (sum_j K_j - J) * 100` over the schema's categorical predictors.
/// `clustered` names must refer to categorical predictors; the ratio itself
/// is a fixed function of the schema.
pub fn relative_complexity(schema: &Schema, clustered: &[String]) -> Result<f64> {
    let cats = schema.categorical();
    if cats.is_empty() {
        return Err(Error::Clustering(
            "schema has no categorical predictors".into(),
        ));
    }
    for name in clustered {
        if !cats.iter().any(|p| &p.name == name) {
            return Err(Error::Clustering(format!(
                "'{name}' is not a categorical predictor of this schema"
            )));
        }
    }
    let j = cats.len() as f64;
    let total: usize = cats.iter().map(|p| p.n_categories().unwrap()).sum();
    let denom = total as f64 - j;
    if denom <= 0.0 {
        return Err(Error::Clustering(
            "every categorical predictor has a single category".into(),
        ));
    }
    Ok(j / denom * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ResponseSpec, ResponseType};

    fn ordinal(name: &str, k: usize) -> PredictorSpec {
        PredictorSpec {
            name: name.into(),
            kind: PredictorKind::Ordinal,
            categories: Some((0..k).map(|i| format!("c{i}")).collect()),
        }
    }

    #[test]
    fn natural_order_is_identity() {
        let spec = ordinal("edu", 15);
        let ord = order_natural(&spec).unwrap();
        assert_eq!(ord.order, (0..15).collect::<Vec<u32>>());
        let one = ordinal("single", 1);
        assert_eq!(order_natural(&one).unwrap().order, vec![0]);
        assert_eq!(
            order_natural(&ordinal("three", 3)).unwrap().order,
            vec![0, 1, 2]
        );
    }

    #[test]
    fn natural_order_rejects_nominal() {
        let spec = PredictorSpec {
            name: "n".into(),
            kind: PredictorKind::Nominal,
            categories: Some(vec!["a".into(), "b".into()]),
        };
        assert!(order_natural(&spec).is_err());
    }

    #[test]
    fn coefficient_order_uses_reference_zero_and_ties() {
        use crate::design::Column;
        use crate::glm::{Family, FitFlags, FittedGlm};
        // categories a(ref), b, c with coefficients b=+0.5, c=-0.2
        let fit = FittedGlm {
            columns: vec![
                Column::Intercept,
                Column::Dummy {
                    predictor: "p".into(),
                    group: 1,
                },
                Column::Dummy {
                    predictor: "p".into(),
                    group: 2,
                },
            ],
            coefficients: vec![0.1, 0.5, -0.2],
            converged: true,
            n_iterations: 3,
            deviance: 0.0,
            family: Family::BernoulliLogit,
            flags: FitFlags::default(),
            ridge: 0.0,
        };
        let spec = PredictorSpec {
            name: "p".into(),
            kind: PredictorKind::Nominal,
            categories: Some(vec!["a".into(), "b".into(), "c".into()]),
        };
        let ord = order_by_coefficients(&spec, &fit).unwrap();
        assert_eq!(ord.order, vec![2, 0, 1]); // c, a, b

        // all equal -> original index order
        let tied = FittedGlm {
            coefficients: vec![0.1, 0.0, 0.0],
            ..fit.clone()
        };
        let ord = order_by_coefficients(&spec, &tied).unwrap();
        assert_eq!(ord.order, vec![0, 1, 2]);
    }

    #[test]
    fn smallest_enumeration() {
        let cs = enumerate_feasible_clusterings(2, 2).unwrap();
        assert_eq!(cs, vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn five_categories_three_clusters() {
        let cs = enumerate_feasible_clusterings(5, 3).unwrap();
        assert_eq!(cs.len(), 11); // 1 + C(4,1) + C(4,2)
                                  // no duplicates
        let set: std::collections::HashSet<_> = cs.iter().collect();
        assert_eq!(set.len(), cs.len());
    }

    #[test]
    fn two_cluster_count_equals_k() {
        for k in 2..=12 {
            assert_eq!(enumerate_feasible_clusterings(k, 2).unwrap().len(), k);
        }
    }

    #[test]
    fn rejects_small_k_prime() {
        assert!(enumerate_feasible_clusterings(5, 1).is_err());
    }

    /// Independent brute force: all length-k sequences over 0..k_prime that
    /// start at 0 and step by at most one.
    fn brute_force(k: usize, k_prime: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut stack = vec![vec![0u32]];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == k {
                out.push(prefix);
                continue;
            }
            let last = *prefix.last().unwrap();
            for next in [last, last + 1] {
                if (next as usize) < k_prime {
                    let mut p = prefix.clone();
                    p.push(next);
                    stack.push(p);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for k in 2..=8 {
            for k_prime in 2..=4 {
                let mut ours = enumerate_feasible_clusterings(k, k_prime).unwrap();
                ours.sort();
                assert_eq!(ours, brute_force(k, k_prime), "K={k} K'={k_prime}");
            }
        }
    }

    #[test]
    fn apply_emits_contrast_encoding() {
        let ord = CategoryOrdering::identity("edu", 15);
        // first 12 categories in cluster 0, rest in cluster 1
        let mut asg = vec![0u32; 12];
        asg.extend([1, 1, 1]);
        let c = Clustering::new("edu", 2, asg).unwrap();
        // record holds category 12 ("Bachelors" position 13, 0-based 12)
        let cols = apply_clustering(&[12], &ord, &c).unwrap();
        assert_eq!(cols.len(), 1);
        assert_eq!(cols[0], vec![0.0]);
        // record in the first cluster
        let cols = apply_clustering(&[3], &ord, &c).unwrap();
        assert_eq!(cols[0], vec![1.0]);
    }

    #[test]
    fn all_in_one_emits_nothing() {
        let ord = CategoryOrdering::identity("p", 4);
        let c = Clustering::new("p", 2, vec![0, 0, 0, 0]).unwrap();
        let cols = apply_clustering(&[0, 1, 2, 3], &ord, &c).unwrap();
        assert!(cols.is_empty());
    }

    #[test]
    fn cut_after_first_category() {
        let ord = CategoryOrdering::identity("p", 3);
        let c = Clustering::new("p", 2, vec![0, 1, 1]).unwrap();
        let cols = apply_clustering(&[0], &ord, &c).unwrap();
        assert_eq!(cols, vec![vec![1.0]]);
    }

    #[test]
    fn dummy_row_sums_at_most_one_for_two_clusters() {
        let ord = CategoryOrdering::identity("p", 6);
        for asg in enumerate_feasible_clusterings(6, 2).unwrap() {
            let c = Clustering::new("p", 2, asg).unwrap();
            let col: Vec<u32> = (0..6).collect();
            let dummies = apply_clustering(&col, &ord, &c).unwrap();
            for row in 0..6 {
                let s: f64 = dummies.iter().map(|d| d[row]).sum();
                assert!(s <= 1.0);
            }
        }
    }

    #[test]
    fn relative_complexity_formula() {
        let mk = |ks: &[usize]| {
            Schema::new(
                ks.iter()
                    .enumerate()
                    .map(|(i, &k)| ordinal(&format!("p{i}"), k))
                    .collect(),
                ResponseSpec {
                    name: "y".into(),
                    response_type: ResponseType::Binary,
                    positive_label: Some("1".into()),
                },
            )
            .unwrap()
        };
        // J=1, K=5 -> 25%
        let s = mk(&[5]);
        assert!((relative_complexity(&s, &[]).unwrap() - 25.0).abs() < 1e-12);
        // J=7, sum K = 25 -> 38.888...
        let s = mk(&[3, 5, 4, 4, 3, 3, 3]);
        assert!((relative_complexity(&s, &[]).unwrap() - 700.0 / 18.0).abs() < 1e-12);
        // all single-category -> rejected
        let s = mk(&[1, 1]);
        assert!(relative_complexity(&s, &[]).is_err());
        // unknown clustered name -> rejected
        let s = mk(&[3, 4]);
        assert!(relative_complexity(&s, &["nope".to_string()]).is_err());
    }
}

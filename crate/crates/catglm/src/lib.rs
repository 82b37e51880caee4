//! Clustering the categories of categorical predictors in generalized
//! linear models.
//!
//! One-hot encoding spends one coefficient per category, which bloats and
//! obscures models with high-cardinality categorical predictors. This crate
//! reduces each categorical predictor to at most K' groups of consecutive
//! categories (ordinals in their natural order, nominals ordered by their
//! one-hot coefficients), searching the feasible clusterings with a greedy
//! randomized procedure guided by out-of-sample accuracy. The repeated
//! search also yields a proximity measure between categories: the share of
//! clustered models in which two categories land in the same group.
//!
//! The pieces compose as a pipeline:
//!
//! * [`data`] — schemas, CSV ingestion, response binarization, reshuffled
//!   train/test splits
//! * [`design`] / [`glm`] — dummy-encoded design matrices and IRLS fits for
//!   logit and log links, with CCR / RMSE scoring
//! * [`clustering`] — category orderings, feasible consecutive clusterings,
//!   reduced encodings, relative complexity
//! * [`grasp`] — the randomized search returning the best clustered GLM and
//!   the full collection of clustered models
//! * [`proximity`] — co-clustering matrices with DOT and CSV export
//! * [`report`] — the benchmark protocol comparing original and clustered
//!   models over reshuffles
//!
//! See the `examples/` directory for one runnable program per capability and
//! the `catglm` binary for the same pipeline as a command-line tool.

pub mod clustering;
pub mod data;
pub mod design;
pub mod error;
pub mod glm;
pub mod grasp;
pub mod proximity;
pub mod report;
pub mod rng;

pub use clustering::{
    apply_clustering, enumerate_feasible_clusterings, order_by_coefficients, order_natural,
    relative_complexity, CategoryOrdering, Clustering,
};
pub use data::{
    binarize_majority_vs_rest, load_csv, split, write_csv, Dataset, LoadOptions, PredictorKind,
    PredictorSpec, ResponseData, ResponseSpec, ResponseType, Schema, SplitPlan,
};
pub use design::{build_design, one_hot_encodings, CatEncoding, Column, DesignMatrix};
pub use error::{Error, Result};
pub use glm::{
    ccr, fit_irls, predict_mean, rmse, score_residual_inf_norm, Family, FitConfig, FitFlags,
    FittedGlm,
};
pub use grasp::{
    eligible_predictors, evaluate_candidate, grasp_run, grasp_single_pass, GraspConfig,
    GraspOutput, IterationResult, MetricKind, MetricValue, PredictorClustering, RclRule,
};
pub use proximity::{compute_proximity, export_csv, export_dot, ProximityMatrix};
pub use report::{run_benchmark, run_cluster, run_fit, FitReport, ReshuffleRow, RunReport};

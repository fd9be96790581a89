//! Supervised modeling: datasets, resampling, logistic regression, feature
//! ranking, cross-validation and evaluation metrics.

pub mod cv;
pub mod dataset;
pub mod importance;
pub mod logistic;
pub mod metrics;
pub mod smote;
pub mod split;

pub use cv::{cross_validate, CvReport, PipelineSpec, Selection};
pub use dataset::{make_targets, FeatureGroup, LabeledDataset};
pub use importance::{permutation_importance, rank_features, FeatureImportance};
pub use logistic::{fit_logistic, stepwise_select, Criterion, ModelFit};
pub use metrics::{aupr, auroc, tdl, MetricsReport};
pub use smote::{smote, SmoteConfig, SmoteOutput};
pub use split::{stratified_folds, stratified_split};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent RNG stream `stream` derived from a master seed.
pub(crate) fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

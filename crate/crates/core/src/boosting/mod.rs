//! Gradient-boosted regression trees on the additive model's residuals.
//!
//! Trees grow leaf-wise (largest gain first) over equal-frequency histogram
//! bins with squared loss. [`hybrid`] stacks an ensemble on top of an
//! [`crate::additive::AdditiveModel`].

mod features;
mod hybrid;
mod io;
mod tree;

pub use features::{build_feature_frame, feature_names, feature_row};
pub use hybrid::{fit_hybrid, hybrid_forecast, HybridModel};
pub use tree::{find_best_split, fit_booster, BinMapper, BoostConfig, BoostedEnsemble, Node, RegressionTree, Split};

use crate::Result;

impl BoostedEnsemble {
    pub fn save(&self) -> String {
        io::save_ensemble(self)
    }

    pub fn load(text: &str) -> Result<Self> {
        io::load_ensemble(text)
    }
}

impl HybridModel {
    pub fn save(&self) -> String {
        io::save_hybrid(self)
    }

    pub fn load(text: &str) -> Result<Self> {
        io::load_hybrid(text)
    }
}

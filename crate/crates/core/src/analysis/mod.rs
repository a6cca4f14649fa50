//! Derived quantities: chirality and nonreciprocity, ideal routing, spectral
//! features and the symmetry validators.

pub mod contrast;
pub mod features;
pub mod routing;
pub mod symmetry;

pub use contrast::{contrast_in_closed, contrast_ratios, ContrastRatios};
pub use features::{find_features, Extremum, FeatureOptions, SpectrumFeatures};
pub use routing::{classify_routing, routing_targets, IdealCase, RoutingReport};

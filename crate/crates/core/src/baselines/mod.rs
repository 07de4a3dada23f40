//! The comparison methods: static-FC features + linear SVM and dynamic-FC
//! features + linear SVM, with Fisher-score feature selection.

pub mod features;
pub mod runner;
pub mod svm;

pub use features::{
    dfc_features, dfc_schema, fisher_select, sfc_features, sfc_schema, FeatureId, FeatureSchema,
    Standardizer, DFC_DIM, DFC_N_WINDOWS, DFC_STRIDE, DFC_WINDOW, SFC_DIM,
};
pub use runner::{run_baseline, BaselineMethod, BaselineReport};
pub use svm::{hinge_loss, svm_predict, svm_train, LinearSvm};

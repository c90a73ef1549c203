//! Comparison methods: PCA feature extraction and a ridge (l2)
//! self-representation band ranker.
//!
//! The ridge ranker keeps only the self-representation and row-energy core of
//! ISSC; its spectral-clustering stage is not implemented.

pub mod issc;
pub mod linalg;
pub mod pca;

pub use issc::{issc_rank, ridge_self_representation, RidgeSelfRepresentation, DEFAULT_RIDGE_LAMBDA};
pub use pca::{decode_pca, encode_pca, load_pca, pca_fit, pca_project, save_pca, PcaModel};

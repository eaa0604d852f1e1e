//! Variable clustering of mixed data by PCAMIX homogeneity, partition
//! agreement indices and bootstrap stability of the cluster count.

mod ari;
mod hclust;
mod pcamix;
mod stability;

pub use ari::{adjusted_rand_index, rand_index};
pub use hclust::{cut_tree, hierarchical_cluster, Dendrogram, Merge};
pub use pcamix::{dissimilarity, homogeneity, pcamix, pcamix_matrix, ClusterGram, PcamixResult};
pub use stability::{
    stability_curve, stability_select, StabilityConfig, StabilityCurve, MAX_RESAMPLE_RETRIES,
};

//! Multi-dimensional clustering of household heating-load profiles.
//!
//! The crate follows the data through the pipeline:
//!
//! * [`ingest`] parses raw boiler/room sensor CSVs, resamples them onto a
//!   1-minute grid and applies the two outlier rules.
//! * [`profile`] reduces a heating season to one 1440-slot mean daily
//!   profile per [`Dimension`].
//! * [`features`] turns a profile into the engineered feature vector used
//!   with the Euclidean metric.
//! * [`distance`] holds the ED, DTW and derivative-DTW kernels and the
//!   pairwise [`DistanceMatrix`](distance::DistanceMatrix).
//! * [`cluster`] implements distance-generic K-means (means for ED, medoids
//!   for the elastic metrics) and agglomerative clustering.
//! * [`validate`] scores partitions with Silhouette, Davies-Bouldin and
//!   Calinski-Harabasz under the active metric.
//! * [`pca`] projects data to two principal components.
//! * [`crossdim`] compares labelings through contingency tables and label
//!   agreement.
//! * [`synth`] generates sensor datasets with planted cluster structure.

pub mod cluster;
pub mod crossdim;
pub mod distance;
pub mod features;
pub mod ingest;
pub mod pca;
pub mod profile;
pub mod synth;
pub mod validate;

mod dimension;

pub use dimension::Dimension;

/// Number of minute slots in a day.
pub const MINUTES_PER_DAY: usize = 1440;

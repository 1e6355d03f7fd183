//! Blockwise functional DFT, local periodogram inner products and the
//! pairwise similarity estimator.

mod fdft;
mod plan;
mod stats;

pub use self::fdft::{local_fdft, LocalFdftTable};
pub use self::plan::{default_block_count, make_block_plan, BlockPlan};
pub use self::stats::{
    f_stat, hs_lag_terms, similarity, similarity_from_tables, similarity_matrix,
    similarity_matrix_from_tables, FStatBundle, SimilarityMatrix,
};

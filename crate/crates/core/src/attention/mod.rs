//! Forward-only attention maps used to score points.

mod maps;
mod tokens;
mod weights;

pub use maps::{
    carve_global, carve_sam, global_map, insert_sam, local_rows, DenseAttentionMap, LocalRows,
    SamVariant, SparseAttentionMap,
};
pub use tokens::{token_block, token_energies, TokenEnergyMatrix};
pub use weights::{
    init_weights, load_weights, save_weights, Provenance, WeightSet, WEIGHTS_MAGIC, WEIGHTS_VERSION,
};

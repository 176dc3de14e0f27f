//! Graph-shift operators, spectral decomposition, polynomial and spectral
//! graph filters, and the Khatri-Rao design operator.

pub mod design;
pub mod eigen;
pub mod filter;
pub mod graph;
pub mod shift;

pub use design::{khatri_rao_design, unvec_col_major, vec_col_major, DesignMatrix};
pub use eigen::{eig_sym, eig_sym_matrix, SpectralDecomposition};
pub use filter::{
    apply_filter_coeffs, apply_spectral_filter, frequency_response, inverse_response, inverse_response_with_tol,
    is_invertible, vandermonde, FrequencyResponse, GraphFilter,
};
pub use graph::{parse_edge_records, EdgeRecord, Graph};
pub use shift::{build_gso, ShiftKind, ShiftOperator};

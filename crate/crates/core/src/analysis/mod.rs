//! Summability weights, trace engines, spectral-dimension estimates and
//! growth-based order evidence at finite truncation.

pub mod dimension;
pub mod generate;
pub mod order;
pub mod table;
pub mod traces;
pub mod weights;

pub use dimension::{
    analytic_report, default_s_grid, estimate_from_table, estimate_with_engines, finite_rank_report,
    s_grid, spectral_dimension_estimate, DimensionVerdict, StabilizationSpec, TraceLevel, ZetaColumn,
    ZetaReport,
};
pub use generate::{sn_generate, MAX_DEPTH};
pub use order::{
    boundedness, classify_growth, compactness_from_rows, curvature_contraction, order_evidence,
    delta_norms, order_evidence_from_rows, order_norms, ratio_norms, ratio_norms_many, resolvent_comparison, singular_row,
    BoundednessEvidence, CompactnessEvidence, CompactnessSpec, GrowthSpec, OrderEvidence, OrderLevel,
    OrderRow, OrderVerdict, SingularRow, RATIO_NAMES,
};
pub use table::{sort_rows, zeta_rows, TableRow};
pub use traces::{
    heat_trace, line_integral, line_zeta_analytic, line_zeta_constant, line_zeta_fourier,
    mellin_cross_check, zeta_trace, EngineCache, EngineKey, MellinCheck, MellinSpec, SpectralEngine,
};
pub use weights::{p1_upper_bound, phi_weight, phi_with, qn_norm, qn_with, P1Bound, WeightValue};

//! Spectral dualities between Gaudin models and spin chains, and the route
//! from many-body Lax matrices through them.

mod curve;
mod duals;
mod fictitious;

pub use curve::{residue_rank_defect, spectral_poly, spectral_poly_of, BivariatePoly};
pub use duals::{
    compare_curves, dual_of, dual_rational_gaudin, dual_tgaudin_to_xxx, dual_xxz_chain,
    factor_swap_dets, CurveComparison,
};
pub use fictitious::{
    fictitious_gauge, fictitious_lax, fictitious_pole_sum, pq_via_spectral, FictitiousLax,
    PipelineOutcome,
};

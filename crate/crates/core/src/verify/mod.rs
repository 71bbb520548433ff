//! Independent checks: frequency quadrature oracles, pole-residue forms and
//! certificates for the pseudo-optimal reductions.

mod certify;
mod quad;
mod residue;

pub use certify::{
    certify_flpork, certify_flpork_with, certify_oflpork, certify_oflpork_with, certify_pork, energy_terms_gramian,
    energy_terms_quadrature, path_disagreement, verdict, Certificate, EnergyTerms, Verdict, VerifyOptions,
    CONDITION_LIMIT, CROSS_GRAMIAN_TOL, ENERGY_TOL, GRAMIAN_INVERSE_TOL, INTERPOLATION_TOL, MIRROR_TOL,
    PATH_AGREEMENT_TOL, RESIDUE_TOL,
};
pub use quad::{oracle_f, oracle_gramians, oracle_h2w, oracle_h2w_squared, DEFAULT_NODES};
pub use residue::{to_residue_form, ResidueForm};

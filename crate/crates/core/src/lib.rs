//! Hilbert-Kunz functions of trinomial hypersurfaces over `F_p`.
//!
//! * [`oracle`] computes `HK(n)` exactly by sparse elimination.
//! * [`mutation`] decides membership of single monomials through the
//!   mutation conditions and the `{0,1}` linear system they induce.
//! * [`reduced`] builds the reduced combinatorial systems, groups monomials
//!   by their integer invariants and counts unsolvable systems.
//! * [`estimate`] extracts the multiplicity and probes it for rationality.

pub mod error;
pub mod estimate;
pub mod field;
pub mod formats;
pub mod monomial;
pub mod mutation;
pub mod oracle;
pub mod reduced;
pub mod sparse;
pub mod sweep;
pub mod trinomial;

pub use error::{HkError, Result};
pub use estimate::{
    estimate_from_ratios, estimate_multiplicity, rationality_probe, Candidate, Estimate, Probe,
    ProbeVerdict,
};
pub use field::{binom_mod_p, PrimeField};
pub use monomial::{deglex_compare, LaurentMonomial, Monomial};
pub use oracle::{
    build_mult_matrix, colength, colength_with, hk_series, standard_monomials, FrobeniusBox,
    HkPoint, HkSeries, OracleConfig, PivotOrder, DEFAULT_BUDGET,
};
pub use reduced::{
    build_reduced_system, class_key, compute_m_ratio, count_unsolvable, decide_solvability,
    entry_of, ClassKey, ColIndex, ReducedSystem, RowIndex, Solvability, UnsolvableReport,
};
pub use sparse::{rank_fp, SparseFpMatrix};
pub use sweep::{generate_family, run_sweep, SweepSpec};
pub use trinomial::{
    classify_variables, laurent_apply, parse_monomial, parse_trinomial, parse_trinomial_in, Term,
    Trinomial, VariableClassification,
};

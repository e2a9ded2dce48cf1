//! Exact Lucas sequences, Lucanomial coefficients and verifiers for the
//! Wolstenholme-type congruences they satisfy modulo `p^3`, `p^5` and `p^6`.

pub mod arith;
pub mod error;
pub mod lucanomial;
pub mod lucas;
pub mod par;
pub mod rank;
pub mod report;
pub mod sums;
pub mod theorems;

pub use error::{Error, Result};
pub use lucanomial::{
    integrality_sweep, lucanomial_exact, lucanomial_residue, LucanomialValue, ValuedResidue,
};
pub use lucas::{check_identities, check_identities_upto, lucas_range, lucas_term, LucasParams, LucasTerm};
pub use par::Execution;
pub use rank::{euler_criterion_check, find_maximal_rank_primes, legendre, rank_of_appearance, RankInfo};
pub use report::{Claim, CongruenceReport, Format, RankRecord, ReportRecord, SumRecord, Summary};
pub use sums::{compute_sums, verify_lemma_family, verify_lemma_psquare, SumLabel, SumsTable};
pub use theorems::{
    lemma_sweep, sweep, sweep_with, verify_kw, verify_p5, verify_p6, verify_theorem_ljwe, verify_theorem_n,
    crosscheck_exact, verify_viggo, verify_w, verify_w_plus, PrimeContext, SweepSpec,
};

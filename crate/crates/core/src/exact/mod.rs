//! The exact discretized formulation: precedence sets, the integer program,
//! a branch-and-bound solver over the selection variables, a brute-force
//! oracle, and CPLEX-LP export.

mod bnb;
mod lp;
mod mip;
mod oracle;
mod precedence;

pub use bnb::{solve_exact, ExactOutcome, SolveOptions, SolveStatus, MAX_COLUMNS, MAX_SUBSETS};
pub use lp::export_lp;
pub use mip::{build_mip, MipInstance};
pub use oracle::{brute_force_oracle, MAX_ORACLE_SUBSETS};
pub use precedence::{precedence_sets, PrecedenceSets};

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

//! Verification engines for two-term exponential sums `C(m,n,k,h;q)`,
//! Dedekind sums `S(h,q)`, Dirichlet characters and their L-values, and the
//! hybrid power means that mix the two.
//!
//! The crate is organized around one principle: every identity that can be
//! checked exactly is checked in integer or rational arithmetic, and the
//! floating-point paths exist only as cross-checks or for quantities that are
//! genuinely real-valued (means, residuals, envelopes).
//!
//! Module map:
//! - [`arith`] — prime moduli, discrete-log tables, Legendre symbols, the
//!   sawtooth function, exact rationals.
//! - [`characters`] — Dirichlet characters mod p, Gauss sums, exact
//!   pi-normalized `|L(1,chi)|^2` values and the fourth moment of `L(1,chi)`.
//! - [`sums`] — the three primitive objects: `C(m,n,k,h;q)`, `S(h,q)`, and
//!   the alpha constant.
//! - [`moments`] — exact fourth-moment counting engines, closed-form
//!   evaluators, and the quadruple character/Legendre sums.
//! - [`hybrid`] — hybrid power means, theorem residual scans, prime scans.
//! - [`report`] — the record type shared by every verifier plus CSV/JSON
//!   emission and parsing.
//! - [`golden`] — golden-file recording and checking.
//! - [`cli`] — the command-line front end.

pub mod arith;
pub mod characters;
pub mod cli;
pub mod cyclotomic;
pub mod golden;
pub mod hybrid;
pub mod kahan;
pub mod moments;
pub mod report;
pub mod sums;

use thiserror::Error;

/// Crate-wide error type. Every rejected precondition maps to one variant so
/// callers (and the CLI) can report the reason without string matching.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime >= 3")]
    NotOddPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("residue is divisible by the modulus; inverse undefined")]
    ZeroResidue,
    #[error("gcd({h}, {q}) > 1; Dedekind sum requires coprime arguments")]
    NotCoprime { h: i64, q: u64 },
    #[error("modulus must be >= {min}, got {got}")]
    ModulusTooSmall { min: u64, got: u64 },
    #[error("exponents must be >= 1")]
    BadExponent,
    #[error("the principal character is excluded here")]
    PrincipalCharacter,
    #[error("an odd character is required (index must be odd)")]
    EvenCharacter,
    #[error("no fourth-order character exists mod {0} (4 does not divide p-1)")]
    NoFourthOrderCharacter(u64),
    #[error("p = {0} violates p == 3 (mod 4)")]
    NotThreeMod4(u64),
    #[error("p = {0} is excluded (requires p > 3)")]
    PTooSmall(u64),
    #[error("product of the two characters is principal; excluded")]
    PrincipalProduct,
    #[error(
        "Lambda(chi) mod {p} (index {index}) is irrational: its reduced \
         cyclotomic representative is nonconstant (ambient real subfield \
         degree {degree}), so no exact rational value exists"
    )]
    NotRational { p: u64, index: u64, degree: usize },
    #[error("naive mode is capped at p <= {cap}, got p = {p}")]
    NaiveCapExceeded { p: u64, cap: u64 },
    #[error("c_power must be 2 or 4, got {0}")]
    BadCPower(u8),
    #[error("r must be in 1..=8")]
    BadR,
    #[error("invalid record field `{0}`")]
    BadRecordField(String),
    #[error("golden file {0} is missing; run `golden record` first")]
    MissingGolden(String),
    #[error("could not build thread pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Verdict-defining tolerances and envelope constants.
///
/// The first group states the contracts of the exact/float dual paths; the
/// `*_MAX` constants pin the empirically observed maxima of the normalized
/// residuals over the default scan ranges (recorded in `golden/constants.csv`)
/// with roughly 30% headroom, so a regression that pushes a residual past its
/// historical envelope flips the verdict to BOUND_FAIL.
pub mod thresholds {
    /// Absolute bound below which a quadruple character sum counts as zero.
    pub const VANISHING_ABS: f64 = 1e-6;
    /// Relative agreement demanded between float and exact engines.
    pub const FLOAT_EXACT_REL: f64 = 1e-8;
    /// Mean/main ratio window enforced once p is at least
    /// [`RATIO_WINDOW_MIN_P`].
    pub const RATIO_LO: f64 = 0.5;
    pub const RATIO_HI: f64 = 1.5;
    pub const RATIO_WINDOW_MIN_P: u64 = 100;
    /// `|brute - 3p^4| <= 45 p^3` in the 5 | p-1 regime of the (5,1) moment
    /// (observed max 42.93 at p = 41).
    pub const LEMMA22_DEV_OVER_P3_MAX: f64 = 45.0;
    /// Normalized residual of the L(1) fourth moment (observed max 9.5e-5
    /// over 101..997).
    pub const LEMMA26_NORMRES_MAX: f64 = 1.2e-4;
    /// `|quadruple Legendre sum| / p^(5/2)` (observed max 7.17 at p = 29).
    pub const LEMMA27_RATIO_MAX: f64 = 7.5;
    /// Normalized residuals of the theorem-level mean scans over their
    /// default ranges (observed maxima 8.60e-4, 2.04e-4, 5.08e-4, 1.31e-4,
    /// 2.55e-4 respectively).
    pub const T11_NORMRES_MAX_3MOD4: f64 = 1.2e-3;
    pub const T11_NORMRES_MAX_1MOD4: f64 = 3.0e-4;
    pub const T12_NORMRES_MAX: f64 = 7.0e-4;
    pub const WANGPAN31_NORMRES_MAX: f64 = 2.0e-4;
    pub const WANGPAN42_NORMRES_MAX: f64 = 4.0e-4;
}

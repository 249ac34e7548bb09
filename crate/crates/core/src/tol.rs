//! Named numerical tolerances shared by every module.

/// Unit-vector norm check for measurement directions.
pub const UNIT_VECTOR: f64 = 1e-9;
/// Hermiticity check, `max |m - m^†|`.
pub const HERMITIAN: f64 = 1e-10;
/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 64;
/// Eigenvalues above `-PSD_CLAMP` are treated as roundoff and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Eigenvalues below `-PSD_REJECT` are a genuine domain error.
pub const PSD_REJECT: f64 = 1e-8;
/// Radicands above `-SQRT_CLAMP` are clamped to zero before taking a root.
pub const SQRT_CLAMP: f64 = 1e-12;
/// Reduced-state eigenvalues below this do not contribute a decomposition vector.
pub const RANK_FLOOR: f64 = 1e-14;
/// Normalization deviation that raises the warning flag on `from_amplitudes`.
pub const NORM_WARNING: f64 = 1e-6;
/// Accepted deviation of user-supplied squared weights from one before renormalizing.
pub const PARAM_NORM: f64 = 1e-6;
/// Normalization invariant of a constructed state.
pub const STATE_NORM: f64 = 1e-12;
/// Maximum forbidden-amplitude weight for a successful canonical form.
pub const CANONICAL_RESIDUAL: f64 = 1e-8;
/// Imaginary part allowed in a Mermin expectation before it is an error.
pub const EXPECTATION_IMAG: f64 = 1e-10;
/// Slack below which the bound check escalates and then flags a sample.
pub const EB_SLACK: f64 = 1e-6;
/// Relation-chain gaps are accepted down to this negative value.
pub const CHAIN_GAP: f64 = 1e-9;
/// Classical bound of the Mermin inequality.
pub const MERMIN_CLASSICAL_BOUND: f64 = 2.0;

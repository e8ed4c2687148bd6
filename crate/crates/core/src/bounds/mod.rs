//! Certificates for the error bounds, the sequences showing their exponents
//! cannot be improved, and seeded verification sweeps.

mod certificate;
mod sweep;
mod tightness;

pub use certificate::{
    certify_all, check_bound, feasible_distance, regularity_gamma, BoundCertificate, FeasibleDistance,
    TheoremId, MARGIN_TOL,
};
pub use sweep::{run_sweep, CertificateRow, PatternFamily, SamplingRegime, SweepConfig};
pub use tightness::{
    check_tightness, generate_divergence, generate_tightness, TightnessKind, TightnessReport,
    TightnessSequence,
};

//! Continuous-variable teleportation of Gaussian states.
//!
//! The crate models the Braunstein-Kimble protocol: the sender mixes an input
//! mode with one half of a two-mode Gaussian resource on a balanced
//! beamsplitter, measures the commuting pair (q_in - q_1)/sqrt(2) and
//! (p_in + p_1)/sqrt(2), and the receiver displaces the other half by
//! mu = q + ip. Averaged over outcomes the protocol is a Gaussian channel
//! whose entire effect is a convolution with a one-mode "distorting field"
//! determined by the resource's EPR statistics.
//!
//! Modules:
//! - [`gaussian`]: states, symplectic maps, characteristic functions;
//! - [`epr`]: moments of the EPR pair Q = q1 - q2, P = p1 + p2;
//! - [`distortion`]: the distorting field and its quasi-probability,
//!   Fock and photon-counting representations;
//! - [`channel`]: the analytic channel, added noise and fidelity;
//! - [`simulator`]: Monte Carlo simulation of the measure-and-displace
//!   protocol with seeded, reproducible sampling;
//! - [`quadrature`]: Gauss-Hermite rules used by the displacement-average
//!   form of the channel;
//! - [`random`]: random physical states and symplectic maps for tests and
//!   benchmarks.

#![forbid(unsafe_code)]

pub mod channel;
pub mod distortion;
pub mod epr;
mod error;
pub mod gaussian;
pub mod quadrature;
pub mod random;
pub mod simulator;

pub use channel::{
    added_noise, channel_as_displacement_average, fidelity_coherent, state_overlap, teleport,
    teleport_report, ChannelReport,
};
pub use distortion::{distorting_field, DistortingFieldState, FockMatrix};
pub use epr::{epr_moments, epr_uncertainty, exp_neg_delta, EprMoments};
pub use error::{Error, Result};
pub use gaussian::{
    check_physical, symplectic_form, GaussianState, PhysicalityCheck, SymplecticMatrix, C64,
    PHYSICALITY_FLOOR_TOL, SYMMETRY_RTOL, SYMPLECTIC_TOL, VACUUM_VARIANCE,
};
pub use simulator::{
    compare_to_analytic, conditional_b_state, outcome_distribution, run_protocol,
    ComparisonReport, EnsembleEstimate, OutcomeDistribution, ProtocolConfig,
};

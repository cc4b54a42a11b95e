//! Monte Carlo execution of the measure-and-displace protocol.
//!
//! Each sample mixes the input with half of the resource on a balanced
//! beamsplitter, draws the commuting homodyne pair (q, p) from its exact
//! Gaussian law, conditions the receiver mode on the outcome, and displaces
//! it by mu = q + ip (unit gain: the mean shifts by sqrt(2) (q, p)). The
//! ensemble moments estimate the analytic channel output by the law of
//! total covariance, with jackknife standard errors.
//!
//! Sampling is sharded over a fixed number of ChaCha12 substreams derived
//! from (seed, shard index) and reduced in shard order, so results are
//! bitwise reproducible regardless of host parallelism.

use nalgebra::{DVector, Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, SymplecticMatrix};

/// Number of RNG substreams the sample budget is split over.
pub const N_SHARDS: usize = 16;

/// Default |z| bound for [`compare_to_analytic`].
pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

/// Identifier of the sampling scheme stored in every estimate; changing the
/// generator or the sharding layout must change this string.
pub const RNG_ALGORITHM: &str = "chacha12/streams=16/v1";

/// Sample count, seed, and logging switch for one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub record_outcomes: bool,
}

/// Exact Gaussian law of the homodyne outcome pair (q, p).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl OutcomeDistribution {
    /// Probability density at (q, p).
    pub fn pdf(&self, q: f64, p: f64) -> f64 {
        let det = self.cov.determinant();
        let inv = self.cov.try_inverse().expect("measured block is PD");
        let d = Vector2::new(q, p) - self.mean;
        (-0.5 * d.dot(&(inv * d))).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
    }

    /// Draws one outcome by Cholesky transform of two standard normals.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let l = cholesky_2x2(&self.cov).expect("measured block is PD");
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        [
            self.mean[0] + l.0 * z0,
            self.mean[1] + l.1 * z0 + l.2 * z1,
        ]
    }
}

/// Sample mean and covariance of a recorded pair sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

/// Jackknife standard errors matching the estimate shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardErrors {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

/// Moment estimates of the protocol output with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEstimate {
    pub mean_hat: [f64; 2],
    pub cov_hat: [[f64; 2]; 2],
    pub standard_errors: StandardErrors,
    pub n_samples: usize,
    /// Moments of the measured mu = (q, p) themselves.
    pub outcome_moments: SampleMoments,
    pub rng_algorithm: String,
    pub seed: u64,
    /// Raw outcomes, kept only when the config asks for them; not part of
    /// the serialized estimate.
    #[serde(skip)]
    pub outcomes: Option<Vec<[f64; 2]>>,
}

/// Per-entry z-scores of an estimate against an analytic prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub z_mean: [f64; 2],
    pub z_cov: [[f64; 2]; 2],
    pub max_abs_z: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ComparisonReport {
    /// Same z-scores judged against a different threshold.
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.pass = self.max_abs_z < threshold;
        self
    }
}

/// The three-mode state after the sender's beamsplitter, with the measured
/// quadratures at indices 0 (q of the first output) and 3 (p of the second).
fn mixed_state(input: &GaussianState, resource: &GaussianState) -> Result<GaussianState> {
    if input.n_modes() != 1 {
        return Err(Error::ModeCountMismatch {
            expected: 1,
            got: input.n_modes(),
        });
    }
    if resource.n_modes() != 2 {
        return Err(Error::ModeCountMismatch {
            expected: 2,
            got: resource.n_modes(),
        });
    }
    let three = input.tensor(resource);
    let bs = SymplecticMatrix::beamsplitter_50_50(0, 1, 3)?;
    three.apply_symplectic(&bs)
}

const MEASURED: [usize; 2] = [0, 3];
const RECEIVER: [usize; 2] = [4, 5];

/// Everything the sampler needs: the outcome law, the affine conditional
/// mean map, and the outcome-independent conditional covariance.
struct Conditioning {
    law: OutcomeDistribution,
    gain: Matrix2<f64>,
    offset: Vector2<f64>,
    cond_cov: Matrix2<f64>,
}

fn conditioning(input: &GaussianState, resource: &GaussianState) -> Result<Conditioning> {
    let mixed = mixed_state(input, resource)?;
    let v = mixed.cov();
    let pick2 = |rows: [usize; 2], cols: [usize; 2]| {
        Matrix2::new(
            v[(rows[0], cols[0])],
            v[(rows[0], cols[1])],
            v[(rows[1], cols[0])],
            v[(rows[1], cols[1])],
        )
    };
    let v_mm = pick2(MEASURED, MEASURED);
    let v_bm = pick2(RECEIVER, MEASURED);
    let v_bb = pick2(RECEIVER, RECEIVER);
    let det = v_mm.determinant();
    let inv = v_mm.try_inverse().filter(|_| det > 1e-300);
    let Some(inv) = inv else {
        return Err(Error::SingularMeasurement { det });
    };
    let gain = v_bm * inv;
    let cond_cov = v_bb - gain * v_bm.transpose();
    let mean_m = Vector2::new(mixed.mean()[MEASURED[0]], mixed.mean()[MEASURED[1]]);
    let mean_b = Vector2::new(mixed.mean()[RECEIVER[0]], mixed.mean()[RECEIVER[1]]);
    Ok(Conditioning {
        law: OutcomeDistribution {
            mean: mean_m,
            cov: v_mm,
        },
        gain,
        offset: mean_b - gain * mean_m,
        cond_cov: 0.5 * (cond_cov + cond_cov.transpose()),
    })
}

/// Lower-triangular Cholesky factor (l00, l10, l11) of a 2x2 SPD matrix.
fn cholesky_2x2(m: &Matrix2<f64>) -> Option<(f64, f64, f64)> {
    if m[(0, 0)] <= 0.0 {
        return None;
    }
    let l00 = m[(0, 0)].sqrt();
    let l10 = m[(0, 1)] / l00;
    let rem = m[(1, 1)] - l10 * l10;
    if rem <= 0.0 {
        return None;
    }
    Some((l00, l10, rem.sqrt()))
}

/// Exact Gaussian law of the measured pair (q, p).
pub fn outcome_distribution(
    input: &GaussianState,
    resource: &GaussianState,
) -> Result<OutcomeDistribution> {
    Ok(conditioning(input, resource)?.law)
}

/// Receiver-mode state conditioned on the outcome, before the corrective
/// displacement. The covariance does not depend on the outcome.
pub fn conditional_b_state(
    input: &GaussianState,
    resource: &GaussianState,
    outcome: [f64; 2],
) -> Result<GaussianState> {
    let c = conditioning(input, resource)?;
    let mean = c.offset + c.gain * Vector2::new(outcome[0], outcome[1]);
    GaussianState::new(
        DVector::from_vec(vec![mean[0], mean[1]]),
        nalgebra::DMatrix::from_fn(2, 2, |r, col| c.cond_cov[(r, col)]),
    )
}

/// Runs the sampled protocol and estimates the output moments.
///
/// Standard errors are delete-one jackknife values; entries whose jackknife
/// is undefined at tiny n (mean needs 2 samples, covariance 3) are reported
/// as infinite rather than guessed.
pub fn run_protocol(
    input: &GaussianState,
    resource: &GaussianState,
    config: &ProtocolConfig,
) -> Result<EnsembleEstimate> {
    if config.n_samples == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let c = conditioning(input, resource)?;
    let n = config.n_samples;
    let chol = cholesky_2x2(&c.law.cov).ok_or(Error::SingularMeasurement {
        det: c.law.cov.determinant(),
    })?;
    // corrective displacement folded into the affine outcome-to-mean map
    let shift = c.gain + Matrix2::identity() * std::f64::consts::SQRT_2;

    let mut outcomes: Vec<[f64; 2]> = Vec::with_capacity(n);
    let mut b_means: Vec<[f64; 2]> = Vec::with_capacity(n);
    let base = n / N_SHARDS;
    let rem = n % N_SHARDS;
    for shard in 0..N_SHARDS {
        let count = base + usize::from(shard < rem);
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(shard as u64);
        for _ in 0..count {
            let z0: f64 = rng.sample(StandardNormal);
            let z1: f64 = rng.sample(StandardNormal);
            let q = c.law.mean[0] + chol.0 * z0;
            let p = c.law.mean[1] + chol.1 * z0 + chol.2 * z1;
            outcomes.push([q, p]);
            let m = c.offset + shift * Vector2::new(q, p);
            b_means.push([m[0], m[1]]);
        }
    }

    let (mean_hat, cov_means, se) = moments_with_errors(&b_means);
    let (outcome_mean, outcome_cov, _) = moments_with_errors(&outcomes);
    let cov_hat = [
        [
            c.cond_cov[(0, 0)] + cov_means[0][0],
            c.cond_cov[(0, 1)] + cov_means[0][1],
        ],
        [
            c.cond_cov[(1, 0)] + cov_means[1][0],
            c.cond_cov[(1, 1)] + cov_means[1][1],
        ],
    ];
    Ok(EnsembleEstimate {
        mean_hat,
        cov_hat,
        standard_errors: se,
        n_samples: n,
        outcome_moments: SampleMoments {
            mean: outcome_mean,
            cov: outcome_cov,
        },
        rng_algorithm: RNG_ALGORITHM.to_string(),
        seed: config.seed,
        outcomes: config.record_outcomes.then_some(outcomes),
    })
}

/// Sample mean, sample covariance (n - 1 denominator), and jackknife
/// standard errors of both, in one fixed-order pass structure.
#[allow(clippy::type_complexity)]
fn moments_with_errors(data: &[[f64; 2]]) -> ([f64; 2], [[f64; 2]; 2], StandardErrors) {
    let n = data.len();
    let nf = n as f64;
    let mut mean = [0.0f64; 2];
    for x in data {
        mean[0] += x[0];
        mean[1] += x[1];
    }
    mean[0] /= nf;
    mean[1] /= nf;

    // all second-moment work on centered data; covariance is shift-invariant
    let mut s = [[0.0f64; 2]; 2];
    for x in data {
        let c = [x[0] - mean[0], x[1] - mean[1]];
        for j in 0..2 {
            for k in 0..2 {
                s[j][k] += c[j] * c[k];
            }
        }
    }
    let mut cov = [[0.0f64; 2]; 2];
    let mut mean_se = [f64::INFINITY; 2];
    if n >= 2 {
        for j in 0..2 {
            for k in 0..2 {
                cov[j][k] = s[j][k] / (nf - 1.0);
            }
        }
        // the delete-one jackknife of a sample mean is exactly s/sqrt(n)
        mean_se = [
            (cov[0][0] / nf).sqrt(),
            (cov[1][1] / nf).sqrt(),
        ];
    }

    let mut cov_se = [[f64::INFINITY; 2]; 2];
    if n >= 3 {
        for (j, k) in [(0, 0), (0, 1), (1, 1)] {
            cov_se[j][k] = jackknife_cov_se(data, mean, s[j][k], j, k);
        }
        cov_se[1][0] = cov_se[0][1];
    }
    (
        mean,
        cov,
        StandardErrors {
            mean: mean_se,
            cov: cov_se,
        },
    )
}

/// Delete-one jackknife SE of the (j, k) sample covariance entry, using the
/// closed form for leave-one-out sums; deviations from the full-sample value
/// are O(1/n), so they are accumulated directly to avoid cancellation.
fn jackknife_cov_se(data: &[[f64; 2]], mean: [f64; 2], sjk: f64, j: usize, k: usize) -> f64 {
    let n = data.len();
    let nf = n as f64;
    let theta_hat = sjk / (nf - 1.0);
    let mut sum_d = 0.0;
    let mut sum_dd = 0.0;
    for x in data {
        let cj = x[j] - mean[j];
        let ck = x[k] - mean[k];
        // centered leave-one-out sums: S_x and S_y are zero by construction
        let loo = (sjk - cj * ck - (-cj) * (-ck) / (nf - 1.0)) / (nf - 2.0);
        let d = loo - theta_hat;
        sum_d += d;
        sum_dd += d * d;
    }
    let var = (nf - 1.0) / nf * (sum_dd - sum_d * sum_d / nf);
    var.max(0.0).sqrt()
}

/// Per-entry z-scores of the estimate against the moments of `analytic`,
/// judged at the default threshold of 4; exact agreement counts as z = 0
/// even where the standard error vanishes.
pub fn compare_to_analytic(
    estimate: &EnsembleEstimate,
    analytic: &GaussianState,
) -> Result<ComparisonReport> {
    if analytic.n_modes() != 1 {
        return Err(Error::ModeCountMismatch {
            expected: 1,
            got: analytic.n_modes(),
        });
    }
    let z = |diff: f64, se: f64| if diff == 0.0 { 0.0 } else { diff / se };
    let z_mean = [
        z(
            estimate.mean_hat[0] - analytic.mean()[0],
            estimate.standard_errors.mean[0],
        ),
        z(
            estimate.mean_hat[1] - analytic.mean()[1],
            estimate.standard_errors.mean[1],
        ),
    ];
    let mut z_cov = [[0.0f64; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            z_cov[j][k] = z(
                estimate.cov_hat[j][k] - analytic.cov()[(j, k)],
                estimate.standard_errors.cov[j][k],
            );
        }
    }
    let max_abs_z = z_mean
        .iter()
        .chain(z_cov.iter().flatten())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(ComparisonReport {
        z_mean,
        z_cov,
        max_abs_z,
        threshold: DEFAULT_Z_THRESHOLD,
        pass: max_abs_z < DEFAULT_Z_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::teleport;
    use crate::gaussian::C64;
    use crate::quadrature::gauss_legendre;
    use crate::random::{random_state, StateEnsemble};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// The gain convention is the first thing the simulator must get right:
    /// a wrong displacement gain shifts cov_hat by O(1), far outside 4 SE.
    #[test]
    fn gain_convention_reproduces_analytic_channel() {
        let input = GaussianState::coherent(C64::new(1.0, 1.0));
        let resource = GaussianState::two_mode_squeezed_vacuum(1.0).unwrap();
        let config = ProtocolConfig {
            n_samples: 100_000,
            seed: 0xB0B,
            record_outcomes: false,
        };
        let est = run_protocol(&input, &resource, &config).unwrap();
        let analytic = teleport(&input, &resource).unwrap();
        assert_relative_eq!(analytic.mean()[0], std::f64::consts::SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(analytic.mean()[1], std::f64::consts::SQRT_2, epsilon = 1e-12);
        let report = compare_to_analytic(&est, &analytic).unwrap();
        assert!(report.pass, "z-scores {report:?}");
    }

    #[test]
    fn outcome_law_of_vacuum_everything_is_half_unit() {
        let d = outcome_distribution(&GaussianState::coherent(C64::new(0.0, 0.0)), &GaussianState::vacuum(2))
            .unwrap();
        assert_abs_diff_eq!(d.mean.norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.cov[(0, 0)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(d.cov[(1, 1)], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.cov[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn outcome_mean_is_halved_input_mean_for_centered_resources() {
        let alpha = C64::new(0.7, -1.2);
        let input = GaussianState::coherent(alpha);
        for resource in [
            GaussianState::vacuum(2),
            GaussianState::two_mode_squeezed_vacuum(0.8).unwrap(),
        ] {
            let d = outcome_distribution(&input, &resource).unwrap();
            assert_relative_eq!(d.mean[0], alpha.re, epsilon = 1e-12);
            assert_relative_eq!(d.mean[1], alpha.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn outcome_pdf_normalizes() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let input = random_state(1, &StateEnsemble::default(), &mut rng);
        let resource = random_state(2, &StateEnsemble::default(), &mut rng);
        let d = outcome_distribution(&input, &resource).unwrap();
        let spread = d.cov[(0, 0)].max(d.cov[(1, 1)]).sqrt();
        let (xs, ws) = gauss_legendre(80, -8.0 * spread, 8.0 * spread);
        let mut total = 0.0;
        for (x, wx) in xs.iter().zip(&ws) {
            for (y, wy) in xs.iter().zip(&ws) {
                total += wx * wy * d.pdf(x + d.mean[0], y + d.mean[1]);
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn conditional_cm_is_outcome_independent_and_corrected_mean_tracks_input_at_large_r() {
        let input = GaussianState::coherent(C64::new(0.9, -0.4));
        let resource = GaussianState::two_mode_squeezed_vacuum(5.0).unwrap();
        let reference = conditional_b_state(&input, &resource, [0.0, 0.0]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..10 {
            let outcome = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let cond = conditional_b_state(&input, &resource, outcome).unwrap();
            assert_abs_diff_eq!(
                (cond.cov() - reference.cov()).amax(),
                0.0,
                epsilon = 1e-12
            );
            // unit-gain correction: mean + sqrt(2) mu recovers the input mean
            let corrected = [
                cond.mean()[0] + std::f64::consts::SQRT_2 * outcome[0],
                cond.mean()[1] + std::f64::consts::SQRT_2 * outcome[1],
            ];
            assert_abs_diff_eq!(corrected[0], input.mean()[0], epsilon = 1e-3);
            assert_abs_diff_eq!(corrected[1], input.mean()[1], epsilon = 1e-3);
        }
    }

    #[test]
    fn product_resource_decouples_receiver_from_outcome() {
        let input = GaussianState::coherent(C64::new(0.5, 0.5));
        let resource = GaussianState::thermal(0.4)
            .unwrap()
            .tensor(&GaussianState::thermal(1.1).unwrap());
        let a = conditional_b_state(&input, &resource, [1.7, -0.6]).unwrap();
        let b = conditional_b_state(&input, &resource, [-2.0, 0.3]).unwrap();
        assert_eq!(a.mean(), b.mean());
        // conditional state is just the reduced receiver mode
        assert_relative_eq!(a.cov()[(0, 0)], 1.1 + 0.5, epsilon = 1e-12);
        assert_relative_eq!(a.cov()[(1, 1)], 1.1 + 0.5, epsilon = 1e-12);
    }

    #[test]
    fn same_seed_gives_bitwise_identical_estimates() {
        let input = GaussianState::coherent(C64::new(0.3, 0.8));
        let resource = GaussianState::two_mode_squeezed_vacuum(0.6).unwrap();
        let config = ProtocolConfig {
            n_samples: 5000,
            seed: 123,
            record_outcomes: true,
        };
        let a = run_protocol(&input, &resource, &config).unwrap();
        let b = run_protocol(&input, &resource, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.outcomes.as_ref().map(Vec::len), Some(5000));
        assert!(!serde_json::to_string(&a).unwrap().contains("outcomes"));
        assert_eq!(a.rng_algorithm, RNG_ALGORITHM);
    }

    #[test]
    fn zero_entanglement_adds_one_unit_of_noise() {
        let input = GaussianState::coherent(C64::new(-0.7, 0.2));
        let resource = GaussianState::vacuum(2);
        let config = ProtocolConfig {
            n_samples: 50_000,
            seed: 9,
            record_outcomes: false,
        };
        let est = run_protocol(&input, &resource, &config).unwrap();
        let analytic = teleport(&input, &resource).unwrap();
        assert_relative_eq!(analytic.cov()[(0, 0)], 1.5, epsilon = 1e-12);
        let report = compare_to_analytic(&est, &analytic).unwrap();
        assert!(report.pass, "z-scores {report:?}");
    }

    #[test]
    fn standard_errors_shrink_as_inverse_sqrt_n() {
        let input = GaussianState::coherent(C64::new(0.4, 0.0));
        let resource = GaussianState::two_mode_squeezed_vacuum(0.5).unwrap();
        let run = |n: usize| {
            run_protocol(
                &input,
                &resource,
                &ProtocolConfig {
                    n_samples: n,
                    seed: 31,
                    record_outcomes: false,
                },
            )
            .unwrap()
        };
        let small = run(10_000);
        let large = run(40_000);
        for (a, b) in [
            (small.standard_errors.mean[0], large.standard_errors.mean[0]),
            (small.standard_errors.mean[1], large.standard_errors.mean[1]),
            (
                small.standard_errors.cov[0][0],
                large.standard_errors.cov[0][0],
            ),
            (
                small.standard_errors.cov[1][1],
                large.standard_errors.cov[1][1],
            ),
        ] {
            let ratio = a / b;
            assert!(
                (1.6..=2.4).contains(&ratio),
                "SE ratio {ratio} outside 2 +- 20%"
            );
        }
    }

    #[test]
    fn recorded_outcomes_match_their_law() {
        let input = GaussianState::coherent(C64::new(1.1, -0.5));
        let resource = GaussianState::two_mode_squeezed_vacuum(0.7).unwrap();
        let config = ProtocolConfig {
            n_samples: 40_000,
            seed: 4,
            record_outcomes: true,
        };
        let est = run_protocol(&input, &resource, &config).unwrap();
        let law = outcome_distribution(&input, &resource).unwrap();
        let n = est.n_samples as f64;
        for j in 0..2 {
            let se = (law.cov[(j, j)] / n).sqrt();
            assert!((est.outcome_moments.mean[j] - law.mean[j]).abs() < 4.0 * se);
        }
        for j in 0..2 {
            for k in 0..2 {
                // crude normal-theory SE bound for covariance entries
                let se = ((law.cov[(j, j)] * law.cov[(k, k)]
                    + law.cov[(j, k)] * law.cov[(j, k)])
                    / n)
                    .sqrt();
                assert!((est.outcome_moments.cov[j][k] - law.cov[(j, k)]).abs() < 4.0 * se);
            }
        }
    }

    #[test]
    fn comparison_identity_and_sensitivity() {
        let input = GaussianState::coherent(C64::new(0.0, 0.6));
        let resource = GaussianState::two_mode_squeezed_vacuum(0.4).unwrap();
        let config = ProtocolConfig {
            n_samples: 20_000,
            seed: 11,
            record_outcomes: false,
        };
        let est = run_protocol(&input, &resource, &config).unwrap();
        // comparing the estimate against its own moments gives all-zero z
        let self_state = GaussianState::new(
            DVector::from_vec(est.mean_hat.to_vec()),
            nalgebra::DMatrix::from_fn(2, 2, |r, c| est.cov_hat[r][c]),
        )
        .unwrap();
        let identity = compare_to_analytic(&est, &self_state).unwrap();
        assert_eq!(identity.max_abs_z, 0.0);
        assert!(identity.pass);

        // perturbing the analytic mean by 10 SE must fail
        let analytic = teleport(&input, &resource).unwrap();
        let perturbed = analytic
            .displace(&[C64::new(
                10.0 * est.standard_errors.mean[0] / std::f64::consts::SQRT_2,
                0.0,
            )])
            .unwrap();
        let report = compare_to_analytic(&est, &perturbed).unwrap();
        assert!(!report.pass);
        assert!(compare_to_analytic(&est, &analytic).unwrap().pass);
        // threshold override is respected
        assert!(!compare_to_analytic(&est, &analytic)
            .unwrap()
            .with_threshold(0.0)
            .pass);
    }

    #[test]
    fn sample_count_zero_is_rejected() {
        let input = GaussianState::vacuum(1);
        let resource = GaussianState::vacuum(2);
        let config = ProtocolConfig {
            n_samples: 0,
            seed: 1,
            record_outcomes: false,
        };
        assert!(matches!(
            run_protocol(&input, &resource, &config),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn non_gaussian_mode_counts_are_rejected() {
        let err = outcome_distribution(&GaussianState::vacuum(2), &GaussianState::vacuum(2));
        assert!(matches!(err, Err(Error::ModeCountMismatch { .. })));
        let err = outcome_distribution(&GaussianState::vacuum(1), &GaussianState::vacuum(1));
        assert!(matches!(err, Err(Error::ModeCountMismatch { .. })));
    }

    #[test]
    fn tiny_sample_counts_report_infinite_errors_not_garbage() {
        let input = GaussianState::vacuum(1);
        let resource = GaussianState::vacuum(2);
        let est = run_protocol(
            &input,
            &resource,
            &ProtocolConfig {
                n_samples: 2,
                seed: 5,
                record_outcomes: false,
            },
        )
        .unwrap();
        assert!(est.standard_errors.mean.iter().all(|s| s.is_finite()));
        assert!(est
            .standard_errors
            .cov
            .iter()
            .flatten()
            .all(|s| s.is_infinite()));
    }
}

//! Seeded samplers for correlation points and two-qubit realizations.
//!
//! Every sample draws from its own ChaCha stream keyed by
//! `(master seed, sample id)`, so a run is reproducible regardless of how
//! samples are distributed over workers.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ExperimentError;
use crate::bell::{
    branch_condition, correlations_from_realization, criterion_report, guessing_probabilities,
    positivity_product, scaled_correlators, tlm_gap, CorrelationPoint, Realization, ScaleSide,
};

/// Rejection draws allowed for one criterion-1 realization.
pub const MAX_REJECTIONS: usize = 1_000_000;
/// Root-finding starts allowed for one full-criterion realization.
pub const DEFAULT_STARTS: usize = 64;
/// Starts spent on one criterion-1 base before a fresh base is drawn.
pub const STARTS_PER_BASE: usize = 8;
/// Acceptance threshold on the two scaled TLM residuals.
pub const CRIT12_TOL: f64 = 1e-9;

/// Independent random stream for one sample.
#[derive(Debug, Clone)]
pub struct SampleStream {
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64, sample_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample_id);
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn angle(&mut self) -> f64 {
        self.rng.gen_range(-PI..PI)
    }

    /// Uniform on `(0, π/4]`.
    fn schmidt_angle(&mut self) -> f64 {
        FRAC_PI_4 * (1.0 - self.rng.gen::<f64>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizationFilter {
    /// Uniform angles, no condition.
    None,
    /// `sin²2χ` is the larger root for every pair and the positivity product
    /// is nonnegative, so all four `S⁺` coincide.
    Crit1,
    /// Criterion 1 plus both scaled TLM equalities.
    Crit12,
}

/// Eight i.i.d. uniform moments on `[-1, 1]`.
pub fn sample_random_point(stream: &mut SampleStream) -> CorrelationPoint {
    let mut v = [0.0; 8];
    for slot in &mut v {
        *slot = stream.rng.gen_range(-1.0..=1.0);
    }
    CorrelationPoint::from_array(v).expect("uniform draws lie in [-1, 1]")
}

fn base_realization(stream: &mut SampleStream) -> Realization {
    let theta_a = [stream.angle(), stream.angle()];
    let theta_b = [stream.angle(), stream.angle()];
    let chi = stream.schmidt_angle();
    Realization::new(theta_a, theta_b, chi).expect("sampled parameters are in range")
}

fn satisfies_crit1(r: &Realization) -> bool {
    branch_condition(r)
        && positivity_product(&correlations_from_realization(r)).is_ok_and(|v| v >= 0.0)
}

fn crit1_realization(stream: &mut SampleStream) -> Result<Realization, ExperimentError> {
    for _ in 0..MAX_REJECTIONS {
        let r = base_realization(stream);
        if satisfies_crit1(&r) {
            return Ok(r);
        }
    }
    Err(ExperimentError::SamplerExhausted {
        attempts: MAX_REJECTIONS,
    })
}

/// Signed scaled-TLM gaps (by B, by A) as functions of Bob's angles.
fn tlm_gaps(theta_a: [f64; 2], theta_b: [f64; 2], chi: f64) -> Option<Vector2<f64>> {
    let r = Realization::new(theta_a, theta_b, chi).ok()?;
    let p = correlations_from_realization(&r);
    let d = guessing_probabilities(&r);
    let by_b = scaled_correlators(&p, d.d_b, ScaleSide::ByB).ok()?;
    let by_a = scaled_correlators(&p, d.d_a, ScaleSide::ByA).ok()?;
    Some(Vector2::new(tlm_gap(&by_b), tlm_gap(&by_a)))
}

/// Damped Gauss-Newton (Levenberg-Marquardt) on the two gaps over Bob's angles.
fn solve_bob_angles(theta_a: [f64; 2], chi: f64, start: [f64; 2]) -> Option<[f64; 2]> {
    let eval = |t: &Vector2<f64>| tlm_gaps(theta_a, [t[0], t[1]], chi);
    let mut t = Vector2::new(start[0], start[1]);
    let mut r = eval(&t)?;
    let mut damping = 1e-3;
    const H: f64 = 1e-7;
    for _ in 0..200 {
        if r.amax() <= 1e-13 {
            break;
        }
        let mut jac = Matrix2::zeros();
        for k in 0..2 {
            let mut tp = t;
            let mut tm = t;
            tp[k] += H;
            tm[k] -= H;
            let col = (eval(&tp)? - eval(&tm)?) / (2.0 * H);
            jac.set_column(k, &col);
        }
        let jtj = jac.transpose() * jac;
        let jtr = jac.transpose() * r;
        let mut improved = false;
        for _ in 0..30 {
            let damped = jtj + Matrix2::from_diagonal(&jtj.diagonal().map(|v| damping * v.max(1e-12)));
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                damping *= 10.0;
                continue;
            };
            let trial = t + step;
            if let Some(rt) = eval(&trial) {
                if rt.norm() < r.norm() {
                    t = trial;
                    r = rt;
                    damping = (damping / 3.0).max(1e-12);
                    improved = true;
                    break;
                }
            }
            damping *= 4.0;
        }
        if !improved {
            break;
        }
    }
    Some([t[0], t[1]])
}

fn crit12_realization(stream: &mut SampleStream, starts: usize) -> Result<Realization, ExperimentError> {
    let mut base = None;
    for start in 0..starts {
        let initial = if start % STARTS_PER_BASE == 0 {
            let r = crit1_realization(stream)?;
            base = Some(r);
            r.theta_b()
        } else {
            [stream.angle(), stream.angle()]
        };
        let r = base.expect("base drawn on the first start");
        let Some(theta_b) = solve_bob_angles(r.theta_a(), r.chi(), initial) else {
            continue;
        };
        let Ok(candidate) = Realization::new(r.theta_a(), theta_b, r.chi()) else {
            continue;
        };
        if !satisfies_crit1(&candidate) {
            continue;
        }
        if criterion_report(&candidate, CRIT12_TOL).is_ok_and(|rep| rep.satisfied.all()) {
            return Ok(candidate);
        }
    }
    Err(ExperimentError::SamplerExhausted { attempts: starts })
}

pub fn sample_realization(
    stream: &mut SampleStream,
    filter: RealizationFilter,
) -> Result<Realization, ExperimentError> {
    match filter {
        RealizationFilter::None => Ok(base_realization(stream)),
        RealizationFilter::Crit1 => crit1_realization(stream),
        RealizationFilter::Crit12 => crit12_realization(stream, DEFAULT_STARTS),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::criterion_one_residual;

    #[test]
    fn streams_are_reproducible() {
        let a = sample_random_point(&mut SampleStream::new(42, 0));
        let b = sample_random_point(&mut SampleStream::new(42, 0));
        assert_eq!(a, b);
        let c = sample_random_point(&mut SampleStream::new(42, 1));
        assert_ne!(a, c);
    }

    #[test]
    fn random_points_are_centered() {
        let n = 10_000;
        let mut sums = [0.0; 8];
        for id in 0..n {
            let p = sample_random_point(&mut SampleStream::new(7, id));
            for (s, v) in sums.iter_mut().zip(p.to_array()) {
                assert!((-1.0..=1.0).contains(&v));
                *s += v;
            }
        }
        for s in sums {
            assert!((s / n as f64).abs() < 0.05);
        }
    }

    #[test]
    fn crit1_samples_have_equal_s_plus() {
        for id in 0..50 {
            let r = sample_realization(&mut SampleStream::new(3, id), RealizationFilter::Crit1).unwrap();
            let p = correlations_from_realization(&r);
            assert!(criterion_one_residual(&p).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn crit12_samples_satisfy_the_criterion() {
        for id in 0..20 {
            let r = sample_realization(&mut SampleStream::new(5, id), RealizationFilter::Crit12).unwrap();
            let report = criterion_report(&r, 1e-8).unwrap();
            assert!(report.satisfied.all(), "{report:?}");
        }
    }
}

//! Multi-start Nelder-Mead over the five realization parameters.
//!
//! Maximizers of linear functionals over the realization family are exposed
//! points of the quantum set, which gives an extremality oracle that does not
//! go through the analytic criterion.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::Rng;

use super::sampler::SampleStream;
use crate::bell::{bell_value, correlations_from_realization, BellFunctional, Realization};

pub const DEFAULT_RESTARTS: usize = 32;

// smallest Schmidt angle returned; the map below can reach χ = 0 exactly
const MIN_CHI: f64 = 1e-12;

/// Unconstrained parameters `(θᴬ₀, θᴬ₁, θᴮ₀, θᴮ₁, t)` with `χ = (π/4) sin²t`.
fn to_realization(v: &[f64; 5]) -> Realization {
    let chi = (FRAC_PI_4 * v[4].sin().powi(2)).max(MIN_CHI);
    Realization::new([v[0], v[1]], [v[2], v[3]], chi).expect("mapped parameters are in range")
}

#[cfg(test)]
fn from_realization(r: &Realization) -> [f64; 5] {
    let t = (r.chi() / FRAC_PI_4).sqrt().asin();
    let p = r.params();
    [p[0], p[1], p[2], p[3], t]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximizeOutcome {
    pub realization: Realization,
    pub value: f64,
}

struct NelderMead {
    max_evals: usize,
    ftol: f64,
}

impl NelderMead {
    /// Minimizes `f` from `start` with initial simplex edge `step`.
    fn minimize<F: Fn(&[f64; 5]) -> f64>(&self, f: &F, start: [f64; 5], step: f64) -> ([f64; 5], f64) {
        const N: usize = 5;
        let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
        simplex.push((start, f(&start)));
        for i in 0..N {
            let mut v = start;
            v[i] += step;
            simplex.push((v, f(&v)));
        }
        let mut evals = N + 1;
        let combine = |a: &[f64; N], b: &[f64; N], t: f64| -> [f64; N] {
            std::array::from_fn(|k| a[k] + t * (b[k] - a[k]))
        };
        while evals < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[N].1);
            if (worst - best).abs() <= self.ftol * (best.abs() + worst.abs()).max(1e-30) {
                break;
            }
            let centroid: [f64; N] =
                std::array::from_fn(|k| simplex[..N].iter().map(|(v, _)| v[k]).sum::<f64>() / N as f64);
            let worst_v = simplex[N].0;
            let reflected = combine(&centroid, &worst_v, -1.0);
            let fr = f(&reflected);
            evals += 1;
            if fr < simplex[0].1 {
                let expanded = combine(&centroid, &worst_v, -2.0);
                let fe = f(&expanded);
                evals += 1;
                simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            } else if fr < simplex[N - 1].1 {
                simplex[N] = (reflected, fr);
            } else {
                let (contracted, fc) = if fr < worst {
                    let c = combine(&centroid, &worst_v, -0.5);
                    (c, f(&c))
                } else {
                    let c = combine(&centroid, &worst_v, 0.5);
                    (c, f(&c))
                };
                evals += 1;
                if fc < fr.min(worst) {
                    simplex[N] = (contracted, fc);
                } else {
                    let best_v = simplex[0].0;
                    for entry in simplex.iter_mut().skip(1) {
                        let v = combine(&best_v, &entry.0, 0.5);
                        *entry = (v, f(&v));
                    }
                    evals += N;
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        simplex[0]
    }
}

/// Maximizes `f` over the realization family from `restarts` random starts,
/// each polished by repeated restarts of the simplex at its own optimum.
pub fn maximize_functional(
    f: &BellFunctional,
    stream: &mut SampleStream,
    restarts: usize,
) -> MaximizeOutcome {
    let objective = |v: &[f64; 5]| -bell_value(&correlations_from_realization(&to_realization(v)), f);
    let nm = NelderMead {
        max_evals: 4000,
        ftol: 1e-15,
    };
    let mut best: Option<([f64; 5], f64)> = None;
    for _ in 0..restarts.max(1) {
        let rng = stream.rng();
        let start: [f64; 5] = std::array::from_fn(|k| {
            if k < 4 {
                rng.gen_range(-PI..PI)
            } else {
                rng.gen_range(0.0..PI / 2.0)
            }
        });
        let mut current = nm.minimize(&objective, start, 0.5);
        for step in [0.05, 0.005, 5e-4] {
            let polished = nm.minimize(&objective, current.0, step);
            if polished.1 <= current.1 {
                current = polished;
            }
        }
        if best.is_none_or(|b| current.1 < b.1) {
            best = Some(current);
        }
    }
    let (v, neg) = best.expect("at least one restart");
    MaximizeOutcome {
        realization: to_realization(&v),
        value: -neg,
    }
}

/// Random functional with coefficients uniform on `[-1, 1]`.
pub fn random_functional(stream: &mut SampleStream) -> BellFunctional {
    let rng = stream.rng();
    let mut draw = || rng.gen_range(-1.0..=1.0);
    BellFunctional {
        alpha: [draw(), draw()],
        beta: [draw(), draw()],
        gamma: [[draw(), draw()], [draw(), draw()]],
    }
}

/// Draws a random functional and returns it with its best realization.
pub fn extremal_by_maximization(stream: &mut SampleStream) -> (BellFunctional, MaximizeOutcome) {
    let f = random_functional(stream);
    let outcome = maximize_functional(&f, stream, DEFAULT_RESTARTS);
    (f, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::oracle::{qb_functional, Family};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    #[test]
    fn parameter_map_round_trips() {
        let r = Realization::new([0.3, -1.2], [2.0, 0.1], 0.5).unwrap();
        let back = to_realization(&from_realization(&r));
        for (a, b) in r.params().iter().zip(back.params()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn finds_tsirelson_bound() {
        let out = maximize_functional(&BellFunctional::chsh(), &mut SampleStream::new(1, 0), 8);
        assert!(out.value >= 2.0 * SQRT_2 - 1e-6, "{out:?}");
        assert!(out.value <= 2.0 * SQRT_2 + 1e-12);
    }

    #[test]
    fn finds_qb3_classical_branch() {
        let f = qb_functional(Family::Qb3, 1.6);
        let out = maximize_functional(&f, &mut SampleStream::new(2, 0), DEFAULT_RESTARTS);
        assert_abs_diff_eq!(out.value, 3.6, epsilon = 1e-6);
    }
}

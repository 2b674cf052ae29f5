//! Two-qubit realizations of the CHSH scenario and the analytic extremality
//! criterion built on top of them.
//!
//! A realization measures `A_x = cos θᴬₓ σ₁ + sin θᴬₓ σ₃` and
//! `B_y = cos θᴮ_y σ₁ + sin θᴮ_y σ₃` on `cos χ |00⟩ + sin χ |11⟩`.
//! Everything here is a closed-form function of those five angles or of the
//! eight observed moments.

use std::f64::consts::{FRAC_PI_4, PI};

use thiserror::Error;

/// Slack below zero tolerated on `J² − 4K²` before it is treated as an error.
pub const DISCRIMINANT_SLACK: f64 = 1e-10;

/// Slack above one tolerated on a scaled correlator before it is rejected.
pub const SCALE_SLACK: f64 = 1e-12;

/// Default tolerance for the `satisfied` flags of a [`CriterionReport`].
pub const DEFAULT_CRITERION_TOL: f64 = 1e-9;

// roundoff slack for the larger-root test in `branch_condition`
const BRANCH_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    #[error("invalid realization: {0}")]
    InvalidRealization(String),
    #[error("correlation point entry {index} = {value} is outside [-1, 1]")]
    PointOutOfRange { index: usize, value: f64 },
    #[error("negative discriminant {value:e} for setting pair ({x}, {y})")]
    DiscriminantNegative { x: usize, y: usize, value: f64 },
    #[error("scaled correlator {value} for setting pair ({x}, {y}) is outside [-1, 1]")]
    ScaleOutOfRange { x: usize, y: usize, value: f64 },
}

/// Wraps an angle into `[-π, π)`. Angles already inside are returned untouched.
pub fn wrap_angle(theta: f64) -> f64 {
    if (-PI..PI).contains(&theta) {
        theta
    } else {
        let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
        // rem_euclid can land exactly on the excluded endpoint
        if wrapped >= PI {
            wrapped - 2.0 * PI
        } else {
            wrapped
        }
    }
}

/// Measurement angles and Schmidt angle of a two-qubit realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realization {
    theta_a: [f64; 2],
    theta_b: [f64; 2],
    chi: f64,
}

impl Realization {
    /// Builds a realization, wrapping the measurement angles into `[-π, π)`.
    /// `chi` must satisfy `0 < chi <= π/4`.
    pub fn new(theta_a: [f64; 2], theta_b: [f64; 2], chi: f64) -> Result<Self, BellError> {
        if theta_a.iter().chain(&theta_b).any(|t| !t.is_finite()) {
            return Err(BellError::InvalidRealization("non-finite angle".into()));
        }
        if !(chi > 0.0 && chi <= FRAC_PI_4) {
            return Err(BellError::InvalidRealization(format!(
                "chi = {chi} is outside (0, pi/4]"
            )));
        }
        Ok(Self {
            theta_a: theta_a.map(wrap_angle),
            theta_b: theta_b.map(wrap_angle),
            chi,
        })
    }

    /// Parses the `tA0,tA1,tB0,tB1,chi` ordering used on the command line.
    pub fn from_params(params: [f64; 5]) -> Result<Self, BellError> {
        Self::new([params[0], params[1]], [params[2], params[3]], params[4])
    }

    pub fn params(&self) -> [f64; 5] {
        [
            self.theta_a[0],
            self.theta_a[1],
            self.theta_b[0],
            self.theta_b[1],
            self.chi,
        ]
    }

    pub fn theta_a(&self) -> [f64; 2] {
        self.theta_a
    }

    pub fn theta_b(&self) -> [f64; 2] {
        self.theta_b
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// `sin 2χ`, the concurrence of the state.
    pub fn sin_2chi(&self) -> f64 {
        (2.0 * self.chi).sin()
    }
}

/// The eight observed moments `⟨Aₓ⟩`, `⟨B_y⟩`, `⟨AₓB_y⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrelationPoint {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [[f64; 2]; 2],
}

impl CorrelationPoint {
    pub fn new(a: [f64; 2], b: [f64; 2], c: [[f64; 2]; 2]) -> Result<Self, BellError> {
        let p = Self { a, b, c };
        for (index, value) in p.to_array().into_iter().enumerate() {
            if !value.is_finite() || value.abs() > 1.0 {
                return Err(BellError::PointOutOfRange { index, value });
            }
        }
        Ok(p)
    }

    /// Order: `a0, a1, b0, b1, c00, c01, c10, c11`.
    pub fn from_array(v: [f64; 8]) -> Result<Self, BellError> {
        Self::new([v[0], v[1]], [v[2], v[3]], [[v[4], v[5]], [v[6], v[7]]])
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.a[0], self.a[1], self.b[0], self.b[1], self.c[0][0], self.c[0][1], self.c[1][0],
            self.c[1][1],
        ]
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The Popescu-Rohrlich box: unbiased marginals and CHSH value 4.
    pub fn pr_box() -> Self {
        Self {
            a: [0.0; 2],
            b: [0.0; 2],
            c: [[1.0, 1.0], [1.0, -1.0]],
        }
    }
}

/// A linear functional on correlation points.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BellFunctional {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub gamma: [[f64; 2]; 2],
}

impl BellFunctional {
    pub fn chsh() -> Self {
        Self {
            alpha: [0.0; 2],
            beta: [0.0; 2],
            gamma: [[1.0, 1.0], [1.0, -1.0]],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.alpha
            .iter()
            .chain(&self.beta)
            .chain(self.gamma.iter().flatten())
            .all(|v| v.is_finite())
    }
}

/// The two roots `S±` of `t² − J t + K² = 0` for one setting pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SBranch {
    pub j: f64,
    pub k: f64,
    pub s_plus: f64,
    pub s_minus: f64,
}

/// Which guessing probability divides the correlators in the scaled TLM test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleSide {
    /// `C̃ₓ_y = ⟨AₓB_y⟩ / Dᴮₓ`
    ByB,
    /// `C̃ₓ_y = ⟨AₓB_y⟩ / Dᴬ_y`
    ByA,
}

/// Guessing probabilities: `d_b[x]` indexed by Alice's setting, `d_a[y]` by Bob's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuessingProbabilities {
    pub d_b: [f64; 2],
    pub d_a: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriterionFlags {
    /// All four `S⁺` agree.
    pub eq11: bool,
    /// Positivity product is nonnegative.
    pub eq8: bool,
    pub tlm_b: bool,
    pub tlm_a: bool,
}

impl CriterionFlags {
    /// The five criterion equalities (three from `S⁺`, one per TLM scaling).
    pub fn equalities(&self) -> bool {
        self.eq11 && self.tlm_b && self.tlm_a
    }

    pub fn all(&self) -> bool {
        self.equalities() && self.eq8
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionReport {
    pub s_plus: [[f64; 2]; 2],
    pub eq11_residual: f64,
    pub eq8_product: f64,
    pub tlm_scaled_residual_b: f64,
    pub tlm_scaled_residual_a: f64,
    pub d_b: [f64; 2],
    pub d_a: [f64; 2],
    pub tol: f64,
    pub satisfied: CriterionFlags,
}

impl CriterionReport {
    pub fn max_residual(&self) -> f64 {
        self.eq11_residual
            .max(self.tlm_scaled_residual_b)
            .max(self.tlm_scaled_residual_a)
            .max((-self.eq8_product).max(0.0))
    }
}

pub fn correlations_from_realization(r: &Realization) -> CorrelationPoint {
    let s2 = r.sin_2chi();
    let c2 = (2.0 * r.chi).cos();
    let (sa, ca) = (r.theta_a.map(f64::sin), r.theta_a.map(f64::cos));
    let (sb, cb) = (r.theta_b.map(f64::sin), r.theta_b.map(f64::cos));
    let mut c = [[0.0; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            c[x][y] = (sa[x] * sb[y] + ca[x] * cb[y] * s2).clamp(-1.0, 1.0);
        }
    }
    CorrelationPoint {
        a: sa.map(|s| s * c2),
        b: sb.map(|s| s * c2),
        c,
    }
}

fn guessing(theta: f64, s2: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (s * s + c * c * s2 * s2).sqrt().min(1.0)
}

pub fn guessing_probabilities(r: &Realization) -> GuessingProbabilities {
    let s2 = r.sin_2chi();
    GuessingProbabilities {
        d_b: r.theta_a.map(|t| guessing(t, s2)),
        d_a: r.theta_b.map(|t| guessing(t, s2)),
    }
}

pub fn s_parameters(p: &CorrelationPoint, x: usize, y: usize) -> Result<SBranch, BellError> {
    let (a, b, c) = (p.a[x], p.b[y], p.c[x][y]);
    let j = c * c - a * a - b * b + 1.0;
    let k = c - a * b;
    // (J − 2|K|)(J + 2|K|) keeps relative accuracy near a double root
    let mut disc = (j - 2.0 * k.abs()) * (j + 2.0 * k.abs());
    if disc < 0.0 {
        if disc < -DISCRIMINANT_SLACK {
            return Err(BellError::DiscriminantNegative { x, y, value: disc });
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let s_plus = 0.5 * (j + root);
    // Vieta for the smaller root avoids cancellation when K is small
    let s_minus = if s_plus > 0.0 { (k * k / s_plus).min(s_plus) } else { 0.0 };
    Ok(SBranch {
        j,
        k,
        s_plus,
        s_minus,
    })
}

fn all_branches(p: &CorrelationPoint) -> Result<[[SBranch; 2]; 2], BellError> {
    Ok([
        [s_parameters(p, 0, 0)?, s_parameters(p, 0, 1)?],
        [s_parameters(p, 1, 0)?, s_parameters(p, 1, 1)?],
    ])
}

/// `∏ₓ_y {(1 − S⁺ₓ_y) ⟨AₓB_y⟩ − ⟨Aₓ⟩⟨B_y⟩}`; nonnegative for points that
/// admit a two-qubit realization.
#[allow(clippy::needless_range_loop)]
pub fn positivity_product(p: &CorrelationPoint) -> Result<f64, BellError> {
    let branches = all_branches(p)?;
    let mut product = 1.0;
    for x in 0..2 {
        for y in 0..2 {
            product *= (1.0 - branches[x][y].s_plus) * p.c[x][y] - p.a[x] * p.b[y];
        }
    }
    Ok(product)
}

/// Largest deviation of any `S⁺ₓ_y` from `S⁺₀₀`.
pub fn criterion_one_residual(p: &CorrelationPoint) -> Result<f64, BellError> {
    let branches = all_branches(p)?;
    let reference = branches[0][0].s_plus;
    Ok(branches
        .iter()
        .flatten()
        .map(|b| (b.s_plus - reference).abs())
        .fold(0.0, f64::max))
}

/// Signed TLM gap `|c₀₀c₀₁ − c₁₀c₁₁| − √(1−c₀₀²)√(1−c₀₁²) − √(1−c₁₀²)√(1−c₁₁²)`.
/// Correlators must already lie in `[-1, 1]`.
pub fn tlm_gap(c: &[[f64; 2]; 2]) -> f64 {
    let radical = |v: f64| (1.0 - v * v).max(0.0).sqrt();
    (c[0][0] * c[0][1] - c[1][0] * c[1][1]).abs()
        - radical(c[0][0]) * radical(c[0][1])
        - radical(c[1][0]) * radical(c[1][1])
}

/// Correlators divided by the guessing probability of the chosen side.
pub fn scaled_correlators(
    p: &CorrelationPoint,
    d: [f64; 2],
    side: ScaleSide,
) -> Result<[[f64; 2]; 2], BellError> {
    let mut scaled = [[0.0; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            let denom = match side {
                ScaleSide::ByB => d[x],
                ScaleSide::ByA => d[y],
            };
            let value = p.c[x][y] / denom;
            if !(denom > 0.0 && denom <= 1.0 + SCALE_SLACK) || !value.is_finite() {
                return Err(BellError::ScaleOutOfRange { x, y, value });
            }
            if value.abs() > 1.0 + SCALE_SLACK {
                return Err(BellError::ScaleOutOfRange { x, y, value });
            }
            scaled[x][y] = value.clamp(-1.0, 1.0);
        }
    }
    Ok(scaled)
}

/// Distance from equality in the scaled TLM relation; zero exactly when the
/// scaled correlators sit on the TLM boundary.
pub fn scaled_tlm_residual(
    p: &CorrelationPoint,
    d: [f64; 2],
    side: ScaleSide,
) -> Result<f64, BellError> {
    Ok(tlm_gap(&scaled_correlators(p, d, side)?).abs())
}

/// Unscaled TLM inequality, the boundary test for unbiased marginals.
pub fn tlm_unscaled_satisfied(p: &CorrelationPoint, tol: f64) -> bool {
    let c = p.c.map(|row| row.map(|v| v.clamp(-1.0, 1.0)));
    tlm_gap(&c) <= tol
}

pub fn bell_value(p: &CorrelationPoint, f: &BellFunctional) -> f64 {
    let mut value = 0.0;
    for i in 0..2 {
        value += f.alpha[i] * p.a[i] + f.beta[i] * p.b[i];
        for j in 0..2 {
            value += f.gamma[i][j] * p.c[i][j];
        }
    }
    value
}

/// The root of `t² − J t + K²` that is not `sin²2χ`, for pair `(x, y)`.
/// Equals `(sin θᴬₓ sin θᴮ_y sin 2χ + cos θᴬₓ cos θᴮ_y)²`.
pub fn companion_root(r: &Realization, x: usize, y: usize) -> f64 {
    let s2 = r.sin_2chi();
    let (sa, ca) = r.theta_a[x].sin_cos();
    let (sb, cb) = r.theta_b[y].sin_cos();
    let w = sa * sb * s2 + ca * cb;
    w * w
}

/// True when `sin²2χ` is the larger root `S⁺` for all four setting pairs.
pub fn branch_condition(r: &Realization) -> bool {
    let s2sq = r.sin_2chi().powi(2);
    (0..2).all(|x| (0..2).all(|y| s2sq >= companion_root(r, x, y) - BRANCH_SLACK))
}

pub fn criterion_report(r: &Realization, tol: f64) -> Result<CriterionReport, BellError> {
    let p = correlations_from_realization(r);
    let branches = all_branches(&p)?;
    let d = guessing_probabilities(r);
    let eq11_residual = criterion_one_residual(&p)?;
    let eq8_product = positivity_product(&p)?;
    let tlm_b = scaled_tlm_residual(&p, d.d_b, ScaleSide::ByB)?;
    let tlm_a = scaled_tlm_residual(&p, d.d_a, ScaleSide::ByA)?;
    Ok(CriterionReport {
        s_plus: branches.map(|row| row.map(|b| b.s_plus)),
        eq11_residual,
        eq8_product,
        tlm_scaled_residual_b: tlm_b,
        tlm_scaled_residual_a: tlm_a,
        d_b: d.d_b,
        d_a: d.d_a,
        tol,
        satisfied: CriterionFlags {
            eq11: eq11_residual <= tol,
            eq8: eq8_product >= -tol,
            tlm_b: tlm_b <= tol,
            tlm_a: tlm_a <= tol,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, FRAC_PI_8, SQRT_2};

    fn chsh_realization() -> Realization {
        Realization::new([0.0, FRAC_PI_2], [FRAC_PI_4, -FRAC_PI_4], FRAC_PI_4).unwrap()
    }

    fn uniform(theta: f64, chi: f64) -> Realization {
        Realization::new([theta; 2], [theta; 2], chi).unwrap()
    }

    fn assert_point(p: &CorrelationPoint, expected: [f64; 8]) {
        for (got, want) in p.to_array().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn realization_rejects_bad_chi() {
        assert!(Realization::new([0.0; 2], [0.0; 2], 0.0).is_err());
        assert!(Realization::new([0.0; 2], [0.0; 2], 0.8).is_err());
        assert!(Realization::new([f64::NAN, 0.0], [0.0; 2], 0.3).is_err());
        assert!(Realization::new([0.0; 2], [0.0; 2], FRAC_PI_4).is_ok());
    }

    #[test]
    fn angles_are_wrapped() {
        let r = Realization::new([PI, 3.0 * PI + 0.5], [-PI, 0.25], 0.3).unwrap();
        assert_abs_diff_eq!(r.theta_a()[0], -PI, epsilon = 1e-12);
        assert_abs_diff_eq!(r.theta_a()[1], -PI + 0.5, epsilon = 1e-12);
        assert_eq!(r.theta_b(), [-PI, 0.25]);
    }

    #[test]
    fn correlations_examples() {
        let h = SQRT_2 / 2.0;
        assert_point(
            &correlations_from_realization(&chsh_realization()),
            [0.0, 0.0, 0.0, 0.0, h, h, h, -h],
        );
        assert_point(
            &correlations_from_realization(&uniform(FRAC_PI_2, FRAC_PI_4)),
            [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
        );
        assert_point(
            &correlations_from_realization(&uniform(FRAC_PI_2, FRAC_PI_6)),
            [0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0],
        );
    }

    #[test]
    fn guessing_examples() {
        let r = Realization::new([0.0, 1.0], [0.3, 0.4], FRAC_PI_6).unwrap();
        assert_abs_diff_eq!(guessing_probabilities(&r).d_b[0], 3f64.sqrt() / 2.0, epsilon = 1e-12);
        let d = guessing_probabilities(&Realization::new([0.3, -2.0], [1.1, 2.9], FRAC_PI_4).unwrap());
        for v in d.d_a.iter().chain(&d.d_b) {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
        }
        let r = Realization::new([FRAC_PI_2, 0.0], [0.0; 2], FRAC_PI_8).unwrap();
        assert_abs_diff_eq!(guessing_probabilities(&r).d_b[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn s_parameter_examples() {
        let p = correlations_from_realization(&uniform(0.0, FRAC_PI_6));
        let s = s_parameters(&p, 0, 0).unwrap();
        assert_abs_diff_eq!(s.j, 1.75, epsilon = 1e-12);
        assert_abs_diff_eq!(s.k, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.s_plus, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.s_minus, 0.75, epsilon = 1e-12);

        let p = correlations_from_realization(&uniform(FRAC_PI_2, FRAC_PI_4));
        let s = s_parameters(&p, 1, 1).unwrap();
        assert_abs_diff_eq!(s.j, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.s_plus, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.s_minus, 1.0, epsilon = 1e-12);

        let s = s_parameters(&CorrelationPoint::zero(), 0, 1).unwrap();
        assert_eq!((s.j, s.k, s.s_plus, s.s_minus), (1.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn inconsistent_point_has_negative_discriminant() {
        // J = 1 - 1 - 1 + 1 = 0 while K = 0 - 1 = -1
        let p = CorrelationPoint::new([1.0, 0.0], [1.0, 0.0], [[0.0; 2]; 2]).unwrap();
        assert!(matches!(
            s_parameters(&p, 0, 0),
            Err(BellError::DiscriminantNegative { x: 0, y: 0, .. })
        ));
        assert!(positivity_product(&p).is_err());
        assert!(criterion_one_residual(&p).is_err());
    }

    #[test]
    fn positivity_examples() {
        assert_eq!(positivity_product(&CorrelationPoint::zero()).unwrap(), 0.0);
        let chsh = correlations_from_realization(&chsh_realization());
        assert_abs_diff_eq!(positivity_product(&chsh).unwrap(), 0.0, epsilon = 1e-12);
        // J = 3/2, K = 3/4: double root S⁺ = 3/4, so (1 − 3/4)·1 − 1/4 = 0
        let p = correlations_from_realization(&uniform(FRAC_PI_2, FRAC_PI_6));
        assert_abs_diff_eq!(s_parameters(&p, 0, 0).unwrap().s_plus, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(positivity_product(&p).unwrap(), 0.0, epsilon = 1e-12);
        // a strictly positive case: S⁺ = sin²2χ and each factor is cos²2χ·cosθᴬcosθᴮ·sin2χ
        let r = Realization::new([1.3, -1.4], [1.2, 1.5], 0.75).unwrap();
        let p = correlations_from_realization(&r);
        let (s2, c2) = ((1.5f64).sin(), (1.5f64).cos());
        let expected = (c2.powi(2) * s2).powi(4)
            * (1.3f64.cos() * 1.4f64.cos() * 1.2f64.cos() * 1.5f64.cos()).powi(2);
        assert!(branch_condition(&r));
        assert_abs_diff_eq!(positivity_product(&p).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn criterion_one_examples() {
        let chsh = correlations_from_realization(&chsh_realization());
        assert_abs_diff_eq!(criterion_one_residual(&chsh).unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(criterion_one_residual(&CorrelationPoint::zero()).unwrap(), 0.0);
        let half = 3f64.sqrt() / 2.0;
        let p = CorrelationPoint::new([0.0; 2], [0.0; 2], [[half, 0.0], [0.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(criterion_one_residual(&p).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn scaled_tlm_examples() {
        let chsh = correlations_from_realization(&chsh_realization());
        assert_abs_diff_eq!(
            scaled_tlm_residual(&chsh, [1.0; 2], ScaleSide::ByB).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let zero = CorrelationPoint::zero();
        assert_eq!(scaled_tlm_residual(&zero, [1.0; 2], ScaleSide::ByA).unwrap(), 2.0);
        let pr = CorrelationPoint::pr_box();
        assert_eq!(scaled_tlm_residual(&pr, [1.0; 2], ScaleSide::ByB).unwrap(), 2.0);
    }

    #[test]
    fn scaled_tlm_rejects_overflowing_ratio() {
        let p = CorrelationPoint::new([0.0; 2], [0.0; 2], [[0.9, 0.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(
            scaled_tlm_residual(&p, [0.5, 1.0], ScaleSide::ByB),
            Err(BellError::ScaleOutOfRange { x: 0, y: 0, .. })
        ));
        assert!(scaled_tlm_residual(&p, [0.0, 1.0], ScaleSide::ByA).is_err());
        // within the slack the ratio is clamped
        let p = CorrelationPoint::new([0.0; 2], [0.0; 2], [[0.5, 0.0], [0.0, 0.0]]).unwrap();
        assert!(scaled_tlm_residual(&p, [0.5 - 1e-14, 1.0], ScaleSide::ByB).is_ok());
    }

    #[test]
    fn criterion_report_examples() {
        let report = criterion_report(&chsh_realization(), 1e-9).unwrap();
        assert!(report.satisfied.all(), "{report:?}");

        // all C̃ = 1: |1·1 − 1·1| = 0 and every radical vanishes
        let report = criterion_report(&uniform(FRAC_PI_2, FRAC_PI_8), 1e-9).unwrap();
        assert!(report.satisfied.eq11);
        assert_abs_diff_eq!(report.s_plus[1][0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(report.tlm_scaled_residual_b, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(report.tlm_scaled_residual_a, 0.0, epsilon = 1e-9);

        // unbiased case with correlators cos(θᴬ − θᴮ) strictly inside the TLM boundary
        let r = Realization::new([0.0, 0.3], [0.1, 0.2], FRAC_PI_4).unwrap();
        let report = criterion_report(&r, 1e-9).unwrap();
        let expected = 2.0 * 0.1f64.sin() * 0.2f64.sin();
        assert_abs_diff_eq!(report.tlm_scaled_residual_b, expected, epsilon = 1e-12);
        assert!(!report.satisfied.tlm_b && !report.satisfied.tlm_a);

        let r = Realization::new([0.0, 1.2], [0.4, -2.0], 0.3).unwrap();
        let report = criterion_report(&r, 1e-9).unwrap();
        assert!(!report.satisfied.eq11);
        assert!(report.eq11_residual > 1e-3);
    }

    #[test]
    fn bell_value_examples() {
        let chsh = correlations_from_realization(&chsh_realization());
        assert_abs_diff_eq!(bell_value(&chsh, &BellFunctional::chsh()), 2.0 * SQRT_2, epsilon = 1e-12);
        assert_eq!(bell_value(&CorrelationPoint::pr_box(), &BellFunctional::chsh()), 4.0);
        let f = BellFunctional {
            alpha: [0.3, -1.0],
            beta: [2.0, 0.5],
            gamma: [[1.0, -0.2], [0.7, 0.1]],
        };
        assert_eq!(bell_value(&CorrelationPoint::zero(), &f), 0.0);
    }

    #[test]
    fn unscaled_tlm_examples() {
        let chsh = correlations_from_realization(&chsh_realization());
        assert!(tlm_unscaled_satisfied(&chsh, 1e-9));
        assert!(!tlm_unscaled_satisfied(&CorrelationPoint::pr_box(), 1e-9));
        assert!(tlm_unscaled_satisfied(&CorrelationPoint::zero(), 1e-9));
    }

    #[test]
    fn branch_condition_examples() {
        assert!(branch_condition(&chsh_realization()));
        assert!(!branch_condition(&uniform(0.0, FRAC_PI_6)));
        for chi in [0.1, 0.4, FRAC_PI_6, FRAC_PI_4] {
            assert!(branch_condition(&uniform(FRAC_PI_2, chi)));
        }
    }
}

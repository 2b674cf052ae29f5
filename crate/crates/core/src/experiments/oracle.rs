//! Closed-form quantum maxima of the two biased-CHSH families and the
//! functionals they maximize.

use std::fmt;
use std::str::FromStr;

use crate::bell::BellFunctional;

use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `x⟨A₀⟩ + CHSH`
    Qb2,
    /// `x⟨A₀⟩ + x⟨A₁⟩ − x⟨B₀⟩ + CHSH`
    Qb3,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Qb2 => "qb2",
            Family::Qb3 => "qb3",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qb2" => Ok(Family::Qb2),
            "qb3" => Ok(Family::Qb3),
            _ => Err(format!("unknown family '{s}' (expected qb2 or qb3)")),
        }
    }
}

fn check_domain(x: f64) -> Result<(), ExperimentError> {
    if (0.0..=2.0).contains(&x) {
        Ok(())
    } else {
        Err(ExperimentError::Domain(x))
    }
}

/// `√(2x² + 8)` for `0 ≤ x ≤ 2`.
pub fn quantum_value_qb2(x: f64) -> Result<f64, ExperimentError> {
    check_domain(x)?;
    Ok((2.0 * x * x + 8.0).sqrt())
}

/// `(√((2−x²)(4−3x²)) − x²)/(1−x²)` below `x = 1` and `x + 2` from `x = 1` on.
pub fn quantum_value_qb3(x: f64) -> Result<f64, ExperimentError> {
    check_domain(x)?;
    if x < 1.0 {
        let x2 = x * x;
        Ok((((2.0 - x2) * (4.0 - 3.0 * x2)).sqrt() - x2) / (1.0 - x2))
    } else {
        Ok(x + 2.0)
    }
}

pub fn quantum_value(family: Family, x: f64) -> Result<f64, ExperimentError> {
    match family {
        Family::Qb2 => quantum_value_qb2(x),
        Family::Qb3 => quantum_value_qb3(x),
    }
}

pub fn qb_functional(family: Family, x: f64) -> BellFunctional {
    let chsh = BellFunctional::chsh();
    match family {
        Family::Qb2 => BellFunctional {
            alpha: [x, 0.0],
            ..chsh
        },
        Family::Qb3 => BellFunctional {
            alpha: [x, x],
            beta: [-x, 0.0],
            ..chsh
        },
    }
}

use std::collections::BTreeMap;

use super::oracle::{qb_functional, quantum_value, Family};
use super::{max_value, structures, ExperimentError};
use crate::moments::{Level, MomentStructure};

/// Relaxation values of one family member at each requested level.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub x: f64,
    /// Closed-form quantum maximum, when `x` is inside the oracle domain.
    pub quantum: Option<f64>,
    pub value_per_level: BTreeMap<Level, f64>,
    /// First solver failure in this row, if any.
    pub error: Option<String>,
}

impl TableRow {
    /// Values never increase with level and never drop below the quantum value.
    pub fn is_consistent(&self, slack: f64) -> bool {
        let values: Vec<f64> = self.value_per_level.values().copied().collect();
        let monotone = values.windows(2).all(|w| w[1] <= w[0] + slack);
        let bounded = self
            .quantum
            .is_none_or(|q| values.iter().all(|&v| v >= q - slack));
        monotone && bounded
    }
}

pub fn run_table(family: Family, xs: &[f64], levels: &[Level]) -> Vec<TableRow> {
    let structures = structures(levels);
    xs.iter()
        .map(|&x| {
            let f = qb_functional(family, x);
            let mut row = TableRow {
                x,
                quantum: quantum_value(family, x).ok(),
                value_per_level: BTreeMap::new(),
                error: None,
            };
            for s in &structures {
                match max_value(s, &f) {
                    Ok(v) => {
                        row.value_per_level.insert(s.level(), v);
                    }
                    Err(e) => {
                        row.error.get_or_insert_with(|| format!("level {}: {e}", s.level()));
                    }
                }
            }
            row
        })
        .collect()
}

/// `(1+AB relaxation value) − (quantum value)` at `x`.
pub fn deviation_at(
    structure: &MomentStructure,
    family: Family,
    x: f64,
) -> Result<f64, ExperimentError> {
    let value = max_value(structure, &qb_functional(family, x))?;
    Ok(value - quantum_value(family, x)?)
}

/// Lower end of the search bracket for [`deviation_onset`].
pub const ONSET_LO: f64 = 0.6;
/// Upper end of the search bracket for [`deviation_onset`].
pub const ONSET_HI: f64 = 0.8;
/// Width of the final bracket.
pub const ONSET_RESOLUTION: f64 = 5e-4;

/// Smallest `x` in `[0.6, 0.8]` where the 1+AB relaxation exceeds the quantum
/// value by more than `detect_tol`, found by bisection. Returns the upper end
/// of the final bracket.
pub fn deviation_onset(family: Family, detect_tol: f64) -> Result<f64, ExperimentError> {
    if detect_tol.is_nan() || detect_tol < 1e-9 {
        return Err(ExperimentError::InvalidArgument(format!(
            "detection tolerance {detect_tol} is below 1e-9"
        )));
    }
    let s = MomentStructure::build(Level::OnePlusAB);
    let (mut lo, mut hi) = (ONSET_LO, ONSET_HI);
    let not_found = ExperimentError::NotFound { lo, hi };
    if deviation_at(&s, family, lo)? > detect_tol || deviation_at(&s, family, hi)? <= detect_tol {
        return Err(not_found);
    }
    while hi - lo > ONSET_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if deviation_at(&s, family, mid)? > detect_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn chsh_row_matches_tsirelson() {
        let rows = run_table(Family::Qb2, &[0.0], &[Level::One, Level::OnePlusAB]);
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert!(row.error.is_none());
        for v in row.value_per_level.values() {
            assert_abs_diff_eq!(*v, 2.82842712474619, epsilon = 1e-8);
        }
        assert!(row.is_consistent(1e-7));
    }

    #[test]
    fn rows_outside_the_oracle_domain_still_solve() {
        let rows = run_table(Family::Qb2, &[2.5], &[Level::OnePlusAB]);
        assert_eq!(rows[0].quantum, None);
        assert!(rows[0].value_per_level[&Level::OnePlusAB] >= 4.5 - 1e-7);
    }

    #[test]
    fn deviation_examples() {
        let s = MomentStructure::build(Level::OnePlusAB);
        assert!(deviation_at(&s, Family::Qb3, 0.6).unwrap() <= 1e-7);
        // 2.90075597099059 − 2.89417689813970
        assert_abs_diff_eq!(
            deviation_at(&s, Family::Qb3, 0.8).unwrap(),
            6.57907285089e-3,
            epsilon = 1e-6
        );
    }

    #[test]
    fn qb2_has_no_onset() {
        assert!(matches!(
            deviation_onset(Family::Qb2, 1e-7),
            Err(ExperimentError::NotFound { .. })
        ));
        assert!(deviation_onset(Family::Qb3, 1e-12).is_err());
    }
}

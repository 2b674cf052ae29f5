//! Published relaxation table: closed-form quantum value, then the 1+AB and
//! level-2 values.

use npa_core::experiments::{run_table, Family};
use npa_core::Level;

const QB2: [[f64; 4]; 6] = [
    [0.0, 2.82842712474619, 2.82842712474619, 2.82842712474619],
    [0.4, 2.88444102037119, 2.88444102037119, 2.88444102037119],
    [0.8, 3.04630924234556, 3.04630924234556, 3.04630924234556],
    [1.2, 3.29848450049413, 3.29848450049413, 3.29848450049413],
    [1.6, 3.62215405525497, 3.62215405525497, 3.62215405525497],
    [2.0, 4.00000000000000, 4.00000000000000, 4.00000000000000],
];

const QB3: [[f64; 4]; 11] = [
    [0.0, 2.82842712474619, 2.82842712474619, 2.82842712474619],
    [0.2, 2.83091685885720, 2.83091685885720, 2.83091685885720],
    [0.4, 2.83923308963559, 2.83923308963559, 2.83923308963559],
    [0.6, 2.85676984164748, 2.85676984164748, 2.85676984164748],
    [0.8, 2.89417689813970, 2.90075597099059, 2.89417689813970],
    [1.0, 3.00000000000000, 3.01789221335227, 3.00737232088269],
    [1.2, 3.20000000000000, 3.20000000000000, 3.20000000000000],
    [1.4, 3.40000000000000, 3.40000000000000, 3.40000000000000],
    [1.6, 3.60000000000000, 3.60000000000000, 3.60000000000000],
    [1.8, 3.80000000000000, 3.80000000000000, 3.80000000000000],
    [2.0, 4.00000000000000, 4.00000000000000, 4.00000000000000],
];

fn check(family: Family, table: &[[f64; 4]]) {
    let xs: Vec<f64> = table.iter().map(|r| r[0]).collect();
    let rows = run_table(family, &xs, &[Level::OnePlusAB, Level::Two]);
    for (row, want) in rows.iter().zip(table) {
        assert!(row.error.is_none(), "{row:?}");
        assert!((row.quantum.unwrap() - want[1]).abs() < 1e-13, "{row:?}");
        // the two rows where the levels split are only matched to 1e-6
        let tol = if (0.7..=1.0).contains(&row.x) { 1e-6 } else { 1e-7 };
        assert!((row.value_per_level[&Level::OnePlusAB] - want[2]).abs() < tol, "{row:?}");
        assert!((row.value_per_level[&Level::Two] - want[3]).abs() < tol, "{row:?}");
        assert!(row.is_consistent(1e-7), "{row:?}");
    }
}

#[test]
fn qb2_block() {
    check(Family::Qb2, &QB2);
}

#[test]
fn qb3_block() {
    check(Family::Qb3, &QB3);
}

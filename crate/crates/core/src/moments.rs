//! Symbolic NPA moment matrices for the CHSH scenario and the two SDP shapes
//! built from them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::bell::{BellFunctional, CorrelationPoint};
use crate::sdp::SdpProblem;
use crate::words::{adjoint, class_representative, words_up_to, Letter, Word};

/// Supported hierarchy levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    One,
    OnePlusAB,
    Two,
    Three,
    Four,
}

impl Level {
    pub const ALL: [Level; 5] = [
        Level::One,
        Level::OnePlusAB,
        Level::Two,
        Level::Three,
        Level::Four,
    ];

    /// Suffix used in CSV column names (`lambda_1ab`, `value_2`, ...).
    pub fn column_suffix(self) -> &'static str {
        match self {
            Level::One => "1",
            Level::OnePlusAB => "1ab",
            Level::Two => "2",
            Level::Three => "3",
            Level::Four => "4",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Level::One => 5,
            Level::OnePlusAB => 9,
            Level::Two => 13,
            Level::Three => 25,
            Level::Four => 41,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::One => "1",
            Level::OnePlusAB => "1+AB",
            Level::Two => "2",
            Level::Three => "3",
            Level::Four => "4",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown level '{0}' (expected 1, 1+AB, 2, 3 or 4)")]
pub struct ParseLevelError(String);

impl FromStr for Level {
    type Err = ParseLevelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(Level::One),
            "1+ab" | "1ab" => Ok(Level::OnePlusAB),
            "2" => Ok(Level::Two),
            "3" => Ok(Level::Three),
            "4" => Ok(Level::Four),
            _ => Err(ParseLevelError(s.to_string())),
        }
    }
}

/// Ordered basis of monomials indexing the moment matrix at `level`.
pub fn basis_words(level: Level) -> Vec<Word> {
    match level {
        Level::One => words_up_to(1),
        // the first nine words of length <= 2 are 1, A_x, B_y, A_x B_y
        Level::OnePlusAB => words_up_to(2).into_iter().take(9).collect(),
        Level::Two => words_up_to(2),
        Level::Three => words_up_to(3),
        Level::Four => words_up_to(4),
    }
}

/// Indices of the classes whose values are fixed by a correlation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedClasses {
    pub identity: usize,
    pub a: [usize; 2],
    pub b: [usize; 2],
    pub ab: [[usize; 2]; 2],
}

impl FixedClasses {
    pub fn contains(&self, k: usize) -> bool {
        k == self.identity
            || self.a.contains(&k)
            || self.b.contains(&k)
            || self.ab.iter().flatten().any(|&v| v == k)
    }
}

/// Symbolic layout of a moment matrix: which moment class sits in each cell.
#[derive(Debug, Clone)]
pub struct MomentStructure {
    level: Level,
    basis: Vec<Word>,
    /// Representative word of each class, by variable index.
    classes: Vec<Word>,
    index_of: HashMap<Word, usize>,
    /// Row-major `dim × dim` table of class indices.
    cell_class: Vec<usize>,
    /// Cells (both triangles) carrying each class.
    cells: Vec<Vec<(usize, usize)>>,
    fixed: FixedClasses,
}

impl MomentStructure {
    pub fn build(level: Level) -> Self {
        let basis = basis_words(level);
        let dim = basis.len();
        let adjoints: Vec<Word> = basis.iter().map(adjoint).collect();

        let mut classes = Vec::new();
        let mut index_of: HashMap<Word, usize> = HashMap::new();
        let mut cell_class = vec![0; dim * dim];
        let mut cells: Vec<Vec<(usize, usize)>> = Vec::new();
        for (i, ui) in adjoints.iter().enumerate() {
            for (j, vj) in basis.iter().enumerate() {
                let rep = class_representative(&ui.mul(vj));
                let k = *index_of.entry(rep.clone()).or_insert_with(|| {
                    classes.push(rep);
                    cells.push(Vec::new());
                    classes.len() - 1
                });
                cell_class[i * dim + j] = k;
                cells[k].push((i, j));
            }
        }

        let lookup = |letters: &[Letter]| -> usize {
            let w = crate::words::reduce(letters.iter().copied());
            index_of[&class_representative(&w)]
        };
        let fixed = FixedClasses {
            identity: lookup(&[]),
            a: [lookup(&[Letter::a(0)]), lookup(&[Letter::a(1)])],
            b: [lookup(&[Letter::b(0)]), lookup(&[Letter::b(1)])],
            ab: [
                [
                    lookup(&[Letter::a(0), Letter::b(0)]),
                    lookup(&[Letter::a(0), Letter::b(1)]),
                ],
                [
                    lookup(&[Letter::a(1), Letter::b(0)]),
                    lookup(&[Letter::a(1), Letter::b(1)]),
                ],
            ],
        };

        Self {
            level,
            basis,
            classes,
            index_of,
            cell_class,
            cells,
            fixed,
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_word(&self, k: usize) -> &Word {
        &self.classes[k]
    }

    /// Class index of an arbitrary canonical word, if it occurs in the matrix.
    pub fn class_of_word(&self, w: &Word) -> Option<usize> {
        self.index_of.get(&class_representative(w)).copied()
    }

    pub fn class_at(&self, row: usize, col: usize) -> usize {
        self.cell_class[row * self.dim() + col]
    }

    pub fn cells(&self, k: usize) -> &[(usize, usize)] {
        &self.cells[k]
    }

    pub fn fixed_classes(&self) -> &FixedClasses {
        &self.fixed
    }

    /// Class indices not pinned by a correlation point, ascending.
    pub fn free_classes(&self) -> Vec<usize> {
        (0..self.num_classes())
            .filter(|&k| !self.fixed.contains(k))
            .collect()
    }

    /// 0/1 indicator of the cells carrying class `k`.
    pub fn basis_matrix(&self, k: usize) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for &(i, j) in &self.cells[k] {
            m[(i, j)] = 1.0;
        }
        m
    }

    /// Moment matrix for explicit class values.
    pub fn assemble(&self, values: &[f64]) -> DMatrix<f64> {
        assert_eq!(values.len(), self.num_classes());
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| values[self.class_at(i, j)])
    }

    /// Class values fixed by a correlation point; free classes are left at 0.
    pub fn fixed_values(&self, p: &CorrelationPoint) -> Vec<f64> {
        let mut values = vec![0.0; self.num_classes()];
        let f = &self.fixed;
        values[f.identity] = 1.0;
        for x in 0..2 {
            values[f.a[x]] = p.a[x];
            values[f.b[x]] = p.b[x];
            for y in 0..2 {
                values[f.ab[x][y]] = p.c[x][y];
            }
        }
        values
    }
}

/// Maximize `λ` subject to `Γ(y) − λI ⪰ 0` with the observed moments of `p`
/// pinned. Variables are the free classes in ascending order followed by `λ`.
pub fn lambda_problem(s: &MomentStructure, p: &CorrelationPoint) -> SdpProblem {
    let n = s.dim();
    let f0 = s.assemble(&s.fixed_values(p));
    let free = s.free_classes();
    let mut f: Vec<DMatrix<f64>> = free.iter().map(|&k| s.basis_matrix(k)).collect();
    f.push(-DMatrix::identity(n, n));
    let mut objective = vec![0.0; f.len()];
    *objective.last_mut().unwrap() = 1.0;
    SdpProblem::new(f0, f, objective).expect("moment structure yields a well-formed problem")
}

/// Maximize the Bell functional over `Γ(y) ⪰ 0` with only the identity
/// pinned. Variables are all non-identity classes in ascending order.
pub fn value_problem(s: &MomentStructure, func: &BellFunctional) -> SdpProblem {
    let fixed = s.fixed_classes();
    let f0 = s.basis_matrix(fixed.identity);
    let vars: Vec<usize> = (0..s.num_classes())
        .filter(|&k| k != fixed.identity)
        .collect();
    let mut coeff = vec![0.0; s.num_classes()];
    for x in 0..2 {
        coeff[fixed.a[x]] += func.alpha[x];
        coeff[fixed.b[x]] += func.beta[x];
        for y in 0..2 {
            coeff[fixed.ab[x][y]] += func.gamma[x][y];
        }
    }
    let f = vars.iter().map(|&k| s.basis_matrix(k)).collect();
    let objective = vars.iter().map(|&k| coeff[k]).collect();
    SdpProblem::new(f0, f, objective).expect("moment structure yields a well-formed problem")
}

/// Index of the variable holding class `k` in a [`value_problem`].
pub fn value_problem_variable(s: &MomentStructure, k: usize) -> Option<usize> {
    let id = s.fixed_classes().identity;
    match k.cmp(&id) {
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Less => Some(k),
        std::cmp::Ordering::Greater => Some(k - 1),
    }
}

//! Dense primal-dual interior-point solver for small linear matrix
//! inequality problems
//!
//! ```text
//!     maximize   bᵀy
//!     subject to F(y) = F₀ + Σᵢ yᵢ Fᵢ ⪰ 0
//! ```
//!
//! paired with the primal problem `min tr(F₀X)` s.t. `tr(FᵢX) = −bᵢ`, `X ⪰ 0`.
//! The duality gap is `tr(F(y) X) = tr(F₀X) − bᵀy ≥ 0`.
//!
//! Search directions are HKM (`dX = sym(μZ⁻¹ − X − X dZ Z⁻¹)`) with a
//! Mehrotra predictor-corrector. The iteration starts from scaled identities
//! and is infeasible until the first full step in each space.
//!
//! The constraint matrices are stored densely but assembled into the Schur
//! complement through their nonzero pattern, which keeps a 41×41 moment
//! matrix with a few hundred classes cheap.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("no convergence within {iterations} iterations (relative gap {gap:e})")]
    MaxIters { iterations: usize, gap: f64 },
    #[error("numerical failure after {iterations} iterations: {reason}")]
    NumericalFailure { iterations: usize, reason: String },
}

/// `maximize objectiveᵀy` s.t. `f0 + Σ yᵢ f[i] ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    f0: DMatrix<f64>,
    f: Vec<DMatrix<f64>>,
    objective: Vec<f64>,
}

impl SdpProblem {
    pub fn new(
        f0: DMatrix<f64>,
        f: Vec<DMatrix<f64>>,
        objective: Vec<f64>,
    ) -> Result<Self, SdpError> {
        let n = f0.nrows();
        if n == 0 || f0.ncols() != n {
            return Err(SdpError::Malformed("f0 must be square and nonempty".into()));
        }
        if f.len() != objective.len() {
            return Err(SdpError::Malformed(format!(
                "{} constraint matrices but {} objective coefficients",
                f.len(),
                objective.len()
            )));
        }
        let symmetric = |m: &DMatrix<f64>| {
            (0..n).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)]))
                && m.iter().all(|v| v.is_finite())
        };
        if !symmetric(&f0) {
            return Err(SdpError::Malformed("f0 is not symmetric".into()));
        }
        for (i, fi) in f.iter().enumerate() {
            if fi.nrows() != n || fi.ncols() != n {
                return Err(SdpError::Malformed(format!("f[{i}] has the wrong shape")));
            }
            if !symmetric(fi) {
                return Err(SdpError::Malformed(format!("f[{i}] is not symmetric")));
            }
        }
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(SdpError::Malformed("non-finite objective".into()));
        }
        Ok(Self { f0, f, objective })
    }

    pub fn n(&self) -> usize {
        self.f0.nrows()
    }

    pub fn m(&self) -> usize {
        self.f.len()
    }

    pub fn f0(&self) -> &DMatrix<f64> {
        &self.f0
    }

    pub fn f(&self) -> &[DMatrix<f64>] {
        &self.f
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    /// `F₀ + Σ yᵢ Fᵢ`.
    pub fn matrix_at(&self, y: &[f64]) -> DMatrix<f64> {
        let mut out = self.f0.clone();
        for (fi, &yi) in self.f.iter().zip(y) {
            if yi != 0.0 {
                out += fi * yi;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target relative duality gap.
    pub gap_tol: f64,
    /// Target relative primal and dual infeasibility.
    pub feas_tol: f64,
    pub max_iters: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-10,
            feas_tol: 1e-9,
            max_iters: 200,
            step_fraction: 0.98,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIters,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub y: Vec<f64>,
    /// `bᵀy` at the returned iterate.
    pub objective: f64,
    /// `tr(F₀X)`, an upper bound on the optimum when `X` is feasible.
    pub primal_objective: f64,
    /// `|tr(F₀X) − bᵀy| / max(1, (|tr(F₀X)| + |bᵀy|)/2)`.
    pub gap: f64,
    /// Smallest eigenvalue of `F(y)`.
    pub min_eigenvalue: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Primal matrix `X`, the certificate for the upper bound.
    pub x: DMatrix<f64>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Turns a non-optimal status into the matching error.
    pub fn ensure_optimal(self) -> Result<Self, SdpError> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            SolveStatus::MaxIters => Err(SdpError::MaxIters {
                iterations: self.iterations,
                gap: self.gap,
            }),
            SolveStatus::NumericalFailure => Err(SdpError::NumericalFailure {
                iterations: self.iterations,
                reason: format!(
                    "stalled at relative gap {:e}, infeasibility {:e}/{:e}",
                    self.gap, self.primal_infeasibility, self.dual_infeasibility
                ),
            }),
        }
    }
}

/// Nonzero entries of a symmetric matrix, both triangles.
struct SparseSym {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    /// `tr(F Y) = Σ F_ab Y_ba` for arbitrary (not necessarily symmetric) `Y`.
    fn trace_with(&self, y: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(a, b, v)| v * y[(b, a)]).sum()
    }
}

struct Workspace {
    sparse: Vec<SparseSym>,
    b: DVector<f64>,
    n: usize,
    m: usize,
}

fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest `α` with `M + α dM ⪰ 0`, given the Cholesky factor of `M ≻ 0`.
fn max_step(chol: &Cholesky<f64, Dyn>, dm: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let Some(l_inv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let scaled = &l_inv * dm * l_inv.transpose();
    let lmin = min_eigenvalue(&scaled);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

/// Schur complement with its (possibly shifted) Cholesky factor.
struct SchurSystem {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl SchurSystem {
    /// Factors `matrix`, adding a growing diagonal shift when roundoff has made
    /// it numerically indefinite near the optimum.
    fn factor(matrix: DMatrix<f64>) -> Option<Self> {
        if let Some(chol) = Cholesky::new(matrix.clone()) {
            return Some(Self { matrix, chol });
        }
        let scale = matrix.diagonal().amax().max(f64::MIN_POSITIVE);
        let mut shift = 1e-14 * scale;
        for _ in 0..6 {
            let mut shifted = matrix.clone();
            for i in 0..shifted.nrows() {
                shifted[(i, i)] += shift;
            }
            if let Some(chol) = Cholesky::new(shifted) {
                return Some(Self { matrix, chol });
            }
            shift *= 100.0;
        }
        None
    }

    /// Solve with a few rounds of iterative refinement against the unshifted
    /// matrix.
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut sol = self.chol.solve(rhs);
        for _ in 0..3 {
            let residual = rhs - &self.matrix * &sol;
            if residual.amax() <= 1e-15 * rhs.amax() {
                break;
            }
            sol += self.chol.solve(&residual);
        }
        sol
    }
}

impl Workspace {
    fn new(prob: &SdpProblem) -> Self {
        Self {
            sparse: prob.f.iter().map(SparseSym::from_dense).collect(),
            b: DVector::from_column_slice(&prob.objective),
            n: prob.n(),
            m: prob.m(),
        }
    }

    /// Schur complement `M_ij = tr(Fᵢ X Fⱼ W)` with `W = Z⁻¹`.
    fn schur(&self, x: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.m;
        let mut schur = DMatrix::zeros(m, m);
        let xs = x.as_slice();
        let ws = w.as_slice();
        let n = self.n;
        for i in 0..m {
            let ei = &self.sparse[i].entries;
            for j in i..m {
                let ej = &self.sparse[j].entries;
                let mut acc = 0.0;
                for &(a, b, vi) in ei {
                    let mut inner = 0.0;
                    for &(c, d, vj) in ej {
                        // X[b, c] * W[d, a], column-major storage
                        inner += vj * xs[b + c * n] * ws[d + a * n];
                    }
                    acc += vi * inner;
                }
                schur[(i, j)] = acc;
                schur[(j, i)] = acc;
            }
        }
        schur
    }

    fn combine(&self, dy: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (sp, &v) in self.sparse.iter().zip(dy.iter()) {
            if v != 0.0 {
                for &(a, b, f) in &sp.entries {
                    out[(a, b)] += v * f;
                }
            }
        }
        out
    }

    /// Solves for `(dX, dy, dZ)` given the non-symmetric target `T`, where the
    /// linearized complementarity reads `dX = T − X dZ W`.
    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        schur: &SchurSystem,
        x: &DMatrix<f64>,
        w: &DMatrix<f64>,
        xrw: &DMatrix<f64>,
        rp: &DVector<f64>,
        rd: &DMatrix<f64>,
        t: &DMatrix<f64>,
    ) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
        let rhs = DVector::from_fn(self.m, |i, _| {
            self.sparse[i].trace_with(t) - self.sparse[i].trace_with(xrw) - rp[i]
        });
        let dy = schur.solve(&rhs);
        let dz = self.combine(&dy) + rd;
        let dx = symmetrize(&(t - x * &dz * w));
        (dx, dy, dz)
    }
}

pub fn solve(prob: &SdpProblem, opts: &SolverOptions) -> SdpSolution {
    let ws = Workspace::new(prob);
    let (n, m) = (ws.n, ws.m);
    let nf = n as f64;

    let f0_norm = frobenius(&prob.f0);
    let b_norm = ws.b.norm();
    let max_f_norm = prob.f.iter().map(frobenius).fold(0.0, f64::max);
    let xi = prob
        .f
        .iter()
        .zip(&prob.objective)
        .map(|(fi, bi)| nf.sqrt() * (1.0 + bi.abs()) / (1.0 + frobenius(fi)))
        .fold(10.0, f64::max);
    let eta = ((1.0 + f0_norm.max(max_f_norm)) / nf.sqrt()).max(10.0);

    let mut x = DMatrix::<f64>::identity(n, n) * xi;
    let mut z = DMatrix::<f64>::identity(n, n) * eta;
    let mut y = DVector::<f64>::zeros(m);

    let residuals = |x: &DMatrix<f64>, y: &DVector<f64>, z: &DMatrix<f64>| {
        let rp = DVector::from_fn(m, |i, _| -ws.b[i] - ws.sparse[i].trace_with(x));
        let rd = prob.matrix_at(y.as_slice()) - z;
        (rp, rd)
    };

    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0;
    let mut gap;
    let mut pinf;
    let mut dinf;
    loop {
        let (rp, rd) = residuals(&x, &y, &z);
        let pobj = (&prob.f0 * &x).trace();
        let dobj = ws.b.dot(&y);
        gap = (pobj - dobj).abs() / (0.5 * (pobj.abs() + dobj.abs())).max(1.0);
        pinf = rp.norm() / (1.0 + b_norm);
        dinf = frobenius(&rd) / (1.0 + f0_norm);
        let mu = x.dot(&z) / nf;

        if gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
            status = SolveStatus::Optimal;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        iterations += 1;

        let Some(zchol) = Cholesky::new(symmetrize(&z)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let Some(xchol) = Cholesky::new(symmetrize(&x)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let w = symmetrize(&zchol.inverse());
        let Some(schur) = SchurSystem::factor(ws.schur(&x, &w)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let xrw = &x * &rd * &w;

        // predictor: aim at μ = 0
        let t_aff = -&x;
        let (dx_a, _, dz_a) = ws.direction(&schur, &x, &w, &xrw, &rp, &rd, &t_aff);
        let ap = max_step(&xchol, &dx_a).min(1.0);
        let ad = max_step(&zchol, &dz_a).min(1.0);
        let mu_aff = (&x + &dx_a * ap).dot(&(&z + &dz_a * ad)) / nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector with the second-order term
        let t = &w * (sigma * mu) - &x - &dx_a * &dz_a * &w;
        let (dx, dy, dz) = ws.direction(&schur, &x, &w, &xrw, &rp, &rd, &t);
        let ap = (opts.step_fraction * max_step(&xchol, &dx)).min(1.0);
        let ad = (opts.step_fraction * max_step(&zchol, &dz)).min(1.0);
        if !(ap.is_finite() && ad.is_finite()) || (ap < 1e-12 && ad < 1e-12) {
            status = SolveStatus::NumericalFailure;
            break;
        }

        x += &dx * ap;
        y += &dy * ad;
        z += &dz * ad;
        x = symmetrize(&x);
        z = symmetrize(&z);
        if x.iter().chain(z.iter()).chain(y.iter()).any(|v| !v.is_finite()) {
            status = SolveStatus::NumericalFailure;
            break;
        }
    }

    let fy = prob.matrix_at(y.as_slice());
    let min_eig = min_eigenvalue(&fy);
    if status == SolveStatus::Optimal && min_eig < -opts.feas_tol {
        status = SolveStatus::NumericalFailure;
    }
    SdpSolution {
        objective: ws.b.dot(&y),
        primal_objective: (&prob.f0 * &x).trace(),
        y: y.as_slice().to_vec(),
        gap,
        min_eigenvalue: min_eig,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        status,
        iterations,
        x,
    }
}

/// Independent recomputation of a solution's optimality evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Smallest eigenvalue of `F₀ + Σ yᵢFᵢ`.
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue of the primal matrix `X`.
    pub primal_min_eigenvalue: f64,
    /// `max_i |tr(FᵢX) + bᵢ| / (1 + ‖b‖)`.
    pub primal_residual: f64,
    pub objective: f64,
    pub primal_objective: f64,
    pub gap: f64,
    /// `tr(F(y) X)`, the complementarity product.
    pub complementarity: f64,
}

impl Certificate {
    /// Dual iterate is PSD within `feas_tol`, `X` is PSD and primal feasible
    /// within `feas_tol`, and the gap is below `gap_tol`.
    pub fn holds(&self, gap_tol: f64, feas_tol: f64) -> bool {
        self.min_eigenvalue >= -feas_tol
            && self.primal_min_eigenvalue >= -feas_tol
            && self.primal_residual <= feas_tol
            && self.gap <= gap_tol
    }
}

pub fn certify(prob: &SdpProblem, sol: &SdpSolution) -> Certificate {
    let fy = prob.matrix_at(&sol.y);
    let b_norm = prob.objective.iter().map(|v| v * v).sum::<f64>().sqrt();
    let primal_residual = prob
        .f
        .iter()
        .zip(&prob.objective)
        .map(|(fi, bi)| (fi.dot(&sol.x) + bi).abs())
        .fold(0.0, f64::max)
        / (1.0 + b_norm);
    let objective: f64 = prob.objective.iter().zip(&sol.y).map(|(b, y)| b * y).sum();
    let primal_objective = prob.f0.dot(&sol.x);
    let gap = (primal_objective - objective).abs()
        / (0.5 * (primal_objective.abs() + objective.abs())).max(1.0);
    Certificate {
        min_eigenvalue: min_eigenvalue(&fy),
        primal_min_eigenvalue: min_eigenvalue(&sol.x),
        primal_residual,
        objective,
        primal_objective,
        gap,
        complementarity: fy.dot(&sol.x),
    }
}

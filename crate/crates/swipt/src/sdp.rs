//! Dense interior-point solver for small SDPs over block-Hermitian variables.
//!
//! Problem form: minimize `sum_j Re tr(C_j X_j)` over Hermitian PSD blocks
//! `X_j`, subject to trace-linear inequalities `sum_j Re tr(A_ij X_j) >= b_i`.
//!
//! The solver runs an infeasible-start primal-dual path-following iteration
//! with Nesterov-Todd scaling on the real symmetric embedding of each block
//! (see [`crate::hermitian`]); slack variables turn the inequalities into the
//! conic standard form. Problems are internally normalized (per-constraint
//! matrix norms, then the right-hand-side scale) so the iteration always works
//! on O(1) data; results are mapped back to the original units on exit.
//!
//! Primal infeasibility is certified by a Farkas ray: multipliers `y >= 0`
//! with `b^T y > 0` while `sum_i y_i A_ij` has no positive eigenvalue in any
//! block, which makes the constraint set empty.

use crate::hermitian::HermitianMatrix;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("problem must have at least one block")]
    NoBlocks,
    #[error("cost matrix for block {block} has order {found}, expected {expected}")]
    CostOrderMismatch {
        block: usize,
        expected: usize,
        found: usize,
    },
    #[error("constraint {index} has {found} coefficient matrices, expected {expected}")]
    CoefficientCountMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("constraint {index} coefficient for block {block} has order {found}, expected {expected}")]
    CoefficientOrderMismatch {
        index: usize,
        block: usize,
        expected: usize,
        found: usize,
    },
    #[error("constraint {index} right-hand side is not finite")]
    NonFiniteRhs { index: usize },
}

/// One `sum_j Re tr(coefficients[j] X_j) >= rhs` inequality.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    pub coefficients: Vec<HermitianMatrix>,
    pub rhs: f64,
}

/// Block-Hermitian SDP with a common block order and `>=` trace constraints.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    num_blocks: usize,
    block_order: usize,
    costs: Vec<HermitianMatrix>,
    constraints: Vec<SdpConstraint>,
}

impl SdpProblem {
    pub fn new(
        costs: Vec<HermitianMatrix>,
        constraints: Vec<SdpConstraint>,
    ) -> Result<Self, SdpError> {
        let num_blocks = costs.len();
        if num_blocks == 0 {
            return Err(SdpError::NoBlocks);
        }
        let block_order = costs[0].order();
        for (j, c) in costs.iter().enumerate() {
            if c.order() != block_order {
                return Err(SdpError::CostOrderMismatch {
                    block: j,
                    expected: block_order,
                    found: c.order(),
                });
            }
        }
        for (i, con) in constraints.iter().enumerate() {
            if con.coefficients.len() != num_blocks {
                return Err(SdpError::CoefficientCountMismatch {
                    index: i,
                    expected: num_blocks,
                    found: con.coefficients.len(),
                });
            }
            for (j, a) in con.coefficients.iter().enumerate() {
                if a.order() != block_order {
                    return Err(SdpError::CoefficientOrderMismatch {
                        index: i,
                        block: j,
                        expected: block_order,
                        found: a.order(),
                    });
                }
            }
            if !con.rhs.is_finite() {
                return Err(SdpError::NonFiniteRhs { index: i });
            }
        }
        Ok(Self {
            num_blocks,
            block_order,
            costs,
            constraints,
        })
    }

    /// Minimum-trace objective: every cost matrix is the identity.
    pub fn min_trace(
        num_blocks: usize,
        block_order: usize,
        constraints: Vec<SdpConstraint>,
    ) -> Result<Self, SdpError> {
        let costs = (0..num_blocks)
            .map(|_| HermitianMatrix::identity(block_order))
            .collect();
        Self::new(costs, constraints)
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn block_order(&self) -> usize {
        self.block_order
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[SdpConstraint] {
        &self.constraints
    }

    pub fn costs(&self) -> &[HermitianMatrix] {
        &self.costs
    }

    /// Sparse SDPA-like text dump for external cross-checking. Matrix 0 is the
    /// objective, matrices 1..=m the constraints; entries are upper-triangle
    /// nonzeros as `matno block row col re im` with 1-based indices.
    pub fn write_sdpa<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "\" block-Hermitian SDP: minimize sum_j Re tr(C_j X_j), constraints sense >="
        )?;
        writeln!(out, "{}", self.constraints.len())?;
        writeln!(out, "{}", self.num_blocks)?;
        let orders: Vec<String> = (0..self.num_blocks)
            .map(|_| self.block_order.to_string())
            .collect();
        writeln!(out, "{}", orders.join(" "))?;
        let rhs: Vec<String> = self.constraints.iter().map(|c| c.rhs.to_string()).collect();
        writeln!(out, "{}", rhs.join(" "))?;
        let dump_mat = |out: &mut W, matno: usize, blk: usize, m: &HermitianMatrix| {
            let d = m.matrix();
            for row in 0..m.order() {
                for col in row..m.order() {
                    let z = d[(row, col)];
                    if z.re != 0.0 || z.im != 0.0 {
                        writeln!(
                            out,
                            "{} {} {} {} {} {}",
                            matno,
                            blk + 1,
                            row + 1,
                            col + 1,
                            z.re,
                            z.im
                        )?;
                    }
                }
            }
            io::Result::Ok(())
        };
        for (j, c) in self.costs.iter().enumerate() {
            dump_mat(out, 0, j, c)?;
        }
        for (i, con) in self.constraints.iter().enumerate() {
            for (j, a) in con.coefficients.iter().enumerate() {
                dump_mat(out, i + 1, j, a)?;
            }
        }
        Ok(())
    }

    /// Run the interior-point iteration. Never panics on valid problems; the
    /// outcome is carried in [`SdpSolution::status`].
    pub fn solve(&self, opts: &SolveOptions) -> SdpSolution {
        Solver::new(self, opts).run()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Relative duality-gap target; also used for residual tolerances.
    pub gap_tol: f64,
    /// Eigenvalue slack granted when checking returned blocks for PSD-ness.
    pub psd_tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            psd_tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Optimal blocks when status is `Optimal`; zeros on certified
    /// infeasibility; the last iterate otherwise.
    pub blocks: Vec<HermitianMatrix>,
    /// `sum_j Re tr(C_j X_j)` of the returned blocks.
    pub objective: f64,
    /// Dual objective: a lower bound on the optimum when status is `Optimal`;
    /// `+inf` on certified infeasibility.
    pub bound: f64,
    /// Relative duality gap at termination.
    pub gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Pin the iterate to the embedding subspace: equal diagonal blocks, opposite
/// off-diagonal blocks. The average of `M` and `J M J^T` (J the symplectic
/// form) preserves symmetry and positive definiteness.
fn project_embedding(m: &mut DMatrix<f64>) {
    let n = m.nrows() / 2;
    for j in 0..n {
        for i in 0..n {
            let re = 0.5 * (m[(i, j)] + m[(n + i, n + j)]);
            let im = 0.5 * (m[(n + i, j)] - m[(i, n + j)]);
            m[(i, j)] = re;
            m[(n + i, n + j)] = re;
            m[(i, n + j)] = -im;
            m[(n + i, j)] = im;
        }
    }
}

fn eig_sym(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let se = m.clone().symmetric_eigen();
    (se.eigenvectors, se.eigenvalues)
}

fn rebuild(q: &DMatrix<f64>, lam: &DVector<f64>) -> DMatrix<f64> {
    let mut m = q * DMatrix::from_diagonal(lam) * q.transpose();
    symmetrize(&mut m);
    m
}

/// `(m^{1/2}, m^{-1/2}, m^{-1})` with eigenvalues floored away from zero.
fn psd_sqrt_family(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (q, lam) = eig_sym(m);
    let top = lam.iter().fold(0.0f64, |a, &l| a.max(l));
    let floor = (top * 1e-16).max(1e-300);
    let clamped = lam.map(|l| l.max(floor));
    let half = clamped.map(|l| l.sqrt());
    let inv_half = clamped.map(|l| 1.0 / l.sqrt());
    let inv = clamped.map(|l| 1.0 / l);
    (
        rebuild(&q, &half),
        rebuild(&q, &inv_half),
        rebuild(&q, &inv),
    )
}

/// Largest `alpha` with `x + alpha dx` PSD, for positive definite `x`.
fn max_psd_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let (_, inv_half, _) = psd_sqrt_family(x);
    let mut g = &inv_half * dx * &inv_half;
    symmetrize(&mut g);
    let lmin = g
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &l| a.min(l));
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn max_positive_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, &d)| d < 0.0)
        .fold(f64::INFINITY, |a, (&vi, &di)| a.min(-vi / di))
}

/// Cholesky solve with escalating diagonal jitter, LU as a last resort.
fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let scale = m.diagonal().amax().max(1e-300);
    let mut jitter = 0.0f64;
    for _ in 0..6 {
        let probe = if jitter > 0.0 {
            m + DMatrix::identity(m.nrows(), m.ncols()) * jitter
        } else {
            m.clone()
        };
        if let Some(chol) = probe.cholesky() {
            let mut sol = chol.solve(rhs);
            // Iterative refinement against the unperturbed matrix keeps the
            // direction accurate when the system is nearly singular.
            for _ in 0..2 {
                let residual = rhs - m * &sol;
                sol += chol.solve(&residual);
            }
            return sol;
        }
        jitter = if jitter == 0.0 {
            scale * 1e-14
        } else {
            jitter * 100.0
        };
    }
    m.clone()
        .lu()
        .solve(rhs)
        .unwrap_or_else(|| DVector::zeros(rhs.len()))
}

struct Solver<'a> {
    problem: &'a SdpProblem,
    opts: SolveOptions,
    /// Embedded, normalized constraint matrices, indexed `[constraint][block]`.
    a: Vec<Vec<DMatrix<f64>>>,
    /// Embedded cost matrices.
    c: Vec<DMatrix<f64>>,
    /// Normalized embedded right-hand sides.
    b: Vec<f64>,
    /// Undoes the right-hand-side normalization on the primal blocks.
    rhs_scale: f64,
    /// Indices of the original constraints kept after presolve.
    kept: Vec<usize>,
    /// Set when presolve finds a zero-coefficient constraint with positive rhs.
    trivially_infeasible: bool,
}

impl<'a> Solver<'a> {
    fn new(problem: &'a SdpProblem, opts: &SolveOptions) -> Self {
        let mut kept = Vec::new();
        let mut trivially_infeasible = false;
        for (i, con) in problem.constraints.iter().enumerate() {
            let max_norm = con
                .coefficients
                .iter()
                .fold(0.0f64, |a, m| a.max(m.norm()));
            if max_norm == 0.0 {
                // 0 >= rhs: contradictory when rhs is positive, vacuous otherwise.
                if con.rhs > 0.0 {
                    trivially_infeasible = true;
                }
            } else {
                kept.push(i);
            }
        }

        let mut a = Vec::with_capacity(kept.len());
        let mut b = Vec::with_capacity(kept.len());
        for &i in &kept {
            let con = &problem.constraints[i];
            let max_norm = con
                .coefficients
                .iter()
                .fold(0.0f64, |acc, m| acc.max(m.norm()));
            let q = 1.0 / max_norm;
            let row: Vec<DMatrix<f64>> = con
                .coefficients
                .iter()
                .map(|m| m.scale(q).real_embed())
                .collect();
            a.push(row);
            // The embedding doubles trace inner products.
            b.push(2.0 * q * con.rhs);
        }
        let rhs_scale = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
        for v in &mut b {
            *v /= rhs_scale;
        }
        let c = problem.costs.iter().map(|m| m.real_embed()).collect();

        Self {
            problem,
            opts: *opts,
            a,
            c,
            b,
            rhs_scale,
            kept,
            trivially_infeasible,
        }
    }

    fn run(self) -> SdpSolution {
        let p = self.problem.num_blocks;
        let order = self.problem.block_order;
        if self.trivially_infeasible {
            return SdpSolution {
                blocks: (0..p).map(|_| HermitianMatrix::zeros(order)).collect(),
                objective: 0.0,
                bound: f64::INFINITY,
                gap: f64::INFINITY,
                iterations: 0,
                status: SolveStatus::Infeasible,
            };
        }
        let m = self.kept.len();
        if m == 0 {
            // No active constraints: X = 0 is optimal for the PSD costs this
            // crate produces.
            return SdpSolution {
                blocks: (0..p).map(|_| HermitianMatrix::zeros(order)).collect(),
                objective: 0.0,
                bound: 0.0,
                gap: 0.0,
                iterations: 0,
                status: SolveStatus::Optimal,
            };
        }

        let nn = 2 * order;
        let degree = (p * nn + m) as f64;
        let feas_tol = self.opts.gap_tol;
        let b_scale = 1.0 + self.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let c_scale = 1.0 + self.c.iter().fold(0.0f64, |a, m| a.max(m.norm()));

        // Initial point t*I with t = 1 + max |rhs|.
        let tp = b_scale;
        let td = c_scale;
        let mut x: Vec<DMatrix<f64>> = (0..p).map(|_| DMatrix::identity(nn, nn) * tp).collect();
        let mut s_slack = vec![tp; m];
        let mut y = vec![td; m];
        let mut s_dual: Vec<DMatrix<f64>> = (0..p).map(|_| DMatrix::identity(nn, nn) * td).collect();

        let mut status = SolveStatus::MaxIterations;
        let mut iterations = self.opts.max_iter;
        let mut gap = f64::INFINITY;
        let mut pobj = 0.0;
        let mut dobj = 0.0;
        let mut mu0 = 1.0;
        let mut pinf0 = 0.0;
        let mut dinf0 = 0.0;

        for it in 0..self.opts.max_iter {
            // Residuals and objectives.
            let mut rp = vec![0.0f64; m];
            for i in 0..m {
                let mut acc = 0.0;
                for j in 0..p {
                    acc += self.a[i][j].dot(&x[j]);
                }
                rp[i] = self.b[i] - acc + s_slack[i];
            }
            let mut rd: Vec<DMatrix<f64>> = Vec::with_capacity(p);
            for j in 0..p {
                let mut r = self.c[j].clone();
                for i in 0..m {
                    r -= &self.a[i][j] * y[i];
                }
                r -= &s_dual[j];
                symmetrize(&mut r);
                rd.push(r);
            }
            pobj = (0..p).map(|j| self.c[j].dot(&x[j])).sum();
            dobj = (0..m).map(|i| self.b[i] * y[i]).sum();
            let compl: f64 = (0..p).map(|j| x[j].dot(&s_dual[j])).sum::<f64>()
                + s_slack.iter().zip(&y).map(|(s, yy)| s * yy).sum::<f64>();
            // Roundoff can push the inner product slightly negative once the
            // iterates touch the boundary; keep mu usable as a divisor.
            let mu = (compl / degree).max(1e-300);

            gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            let pinf = rp.iter().fold(0.0f64, |a, v| a.max(v.abs())) / b_scale;
            let dinf = rd.iter().fold(0.0f64, |a, r| a.max(r.norm())) / c_scale;
            if it == 0 {
                mu0 = mu;
                pinf0 = pinf;
                dinf0 = dinf;
            }

            if gap <= self.opts.gap_tol && pinf <= feas_tol && dinf <= feas_tol {
                status = SolveStatus::Optimal;
                iterations = it;
                break;
            }
            if pinf > feas_tol && self.certificate_holds(&y, 1e-9) {
                status = SolveStatus::Infeasible;
                iterations = it;
                break;
            }

            // Once the gap and dual side have converged the residual left in
            // the rows is Newton reconstruction noise, not distance to the
            // optimum. A least-norm correction onto the row equations removes
            // it exactly where further interior steps cannot.
            if gap <= self.opts.gap_tol && dinf <= feas_tol && pinf <= 1e-4 {
                let mut gram = DMatrix::zeros(m, m);
                for i in 0..m {
                    for l in i..m {
                        let mut acc = 0.0;
                        for j in 0..p {
                            acc += self.a[i][j].dot(&self.a[l][j]);
                        }
                        gram[(i, l)] = acc;
                        gram[(l, i)] = acc;
                    }
                }
                let lam = solve_spd(&gram, &DVector::from_column_slice(&rp));
                for j in 0..p {
                    for i in 0..m {
                        x[j] += &self.a[i][j] * lam[i];
                    }
                    symmetrize(&mut x[j]);
                    project_embedding(&mut x[j]);
                }
                pobj = (0..p).map(|j| self.c[j].dot(&x[j])).sum();
                gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
                let mut worst = 0.0f64;
                for i in 0..m {
                    let mut acc = 0.0;
                    for j in 0..p {
                        acc += self.a[i][j].dot(&x[j]);
                    }
                    worst = worst.max((self.b[i] - acc + s_slack[i]).abs());
                }
                if gap <= self.opts.gap_tol && worst / b_scale <= feas_tol {
                    status = SolveStatus::Optimal;
                    iterations = it;
                    break;
                }
            }

            // Nesterov-Todd scaling point per block: W S W = X.
            let mut w = Vec::with_capacity(p);
            let mut s_inv = Vec::with_capacity(p);
            for j in 0..p {
                let (s_half, s_inv_half, s_inv_j) = psd_sqrt_family(&s_dual[j]);
                let mut t = &s_half * &x[j] * &s_half;
                symmetrize(&mut t);
                let (th, _, _) = psd_sqrt_family(&t);
                let mut wj = &s_inv_half * th * &s_inv_half;
                symmetrize(&mut wj);
                w.push(wj);
                s_inv.push(s_inv_j);
            }

            // Schur complement M[i][l] = sum_j <A_ij, W_j A_lj W_j> + diag(s/y).
            let mut waw: Vec<Vec<DMatrix<f64>>> = Vec::with_capacity(m);
            for l in 0..m {
                let mut row = Vec::with_capacity(p);
                for j in 0..p {
                    let mut bm = &w[j] * &self.a[l][j] * &w[j];
                    symmetrize(&mut bm);
                    row.push(bm);
                }
                waw.push(row);
            }
            let mut schur = DMatrix::zeros(m, m);
            for i in 0..m {
                for l in i..m {
                    let mut acc = 0.0;
                    for j in 0..p {
                        acc += self.a[i][j].dot(&waw[l][j]);
                    }
                    schur[(i, l)] = acc;
                    schur[(l, i)] = acc;
                }
                schur[(i, i)] += s_slack[i] / y[i];
            }

            // Shared part of the Newton right-hand side.
            let mut w_rd_w: Vec<DMatrix<f64>> = Vec::with_capacity(p);
            for j in 0..p {
                let mut v = &w[j] * &rd[j] * &w[j];
                symmetrize(&mut v);
                w_rd_w.push(v);
            }

            type Direction = (Vec<DMatrix<f64>>, Vec<f64>, DVector<f64>, Vec<DMatrix<f64>>);
            let newton = |solver: &Self, sigma_mu: f64, second_order: Option<&Direction>| {
                // Complementarity targets, with the Mehrotra cross terms of the
                // affine direction folded in on the corrector pass.
                let mut rc_mat: Vec<DMatrix<f64>> = (0..p)
                    .map(|j| {
                        let mut r = &s_inv[j] * sigma_mu - &x[j];
                        symmetrize(&mut r);
                        r
                    })
                    .collect();
                let mut rc_lin: Vec<f64> =
                    (0..m).map(|i| sigma_mu - s_slack[i] * y[i]).collect();
                if let Some((dx_a, ds_slack_a, dy_a, ds_dual_a)) = second_order {
                    for j in 0..p {
                        let cross = &dx_a[j] * &ds_dual_a[j] * &s_inv[j];
                        rc_mat[j] -= (&cross + cross.transpose()) * 0.5;
                        symmetrize(&mut rc_mat[j]);
                    }
                    for i in 0..m {
                        rc_lin[i] -= ds_slack_a[i] * dy_a[i];
                    }
                }
                let mut rhs = DVector::zeros(m);
                for i in 0..m {
                    let mut acc = rp[i] + rc_lin[i] / y[i];
                    for j in 0..p {
                        acc -= solver.a[i][j].dot(&(&rc_mat[j] - &w_rd_w[j]));
                    }
                    rhs[i] = acc;
                }
                let dy = solve_spd(&schur, &rhs);
                let mut ds_dual = Vec::with_capacity(p);
                let mut dx = Vec::with_capacity(p);
                for j in 0..p {
                    let mut dsj = rd[j].clone();
                    for i in 0..m {
                        dsj -= &solver.a[i][j] * dy[i];
                    }
                    symmetrize(&mut dsj);
                    let mut dxj = &rc_mat[j] - &w[j] * &dsj * &w[j];
                    symmetrize(&mut dxj);
                    dx.push(dxj);
                    ds_dual.push(dsj);
                }
                let ds_slack: Vec<f64> = (0..m)
                    .map(|i| (rc_lin[i] - s_slack[i] * dy[i]) / y[i])
                    .collect();
                (dx, ds_slack, dy, ds_dual)
            };

            let step_bounds = |x: &[DMatrix<f64>],
                               s_slack: &[f64],
                               y: &[f64],
                               s_dual: &[DMatrix<f64>],
                               dx: &[DMatrix<f64>],
                               ds_slack: &[f64],
                               dy: &DVector<f64>,
                               ds_dual: &[DMatrix<f64>]| {
                let mut ap = max_positive_step(s_slack, ds_slack);
                for j in 0..x.len() {
                    ap = ap.min(max_psd_step(&x[j], &dx[j]));
                }
                let mut ad = max_positive_step(y, dy.as_slice());
                for j in 0..s_dual.len() {
                    ad = ad.min(max_psd_step(&s_dual[j], &ds_dual[j]));
                }
                (ap, ad)
            };

            // Predictor: pure Newton step toward the boundary.
            let affine = newton(&self, 0.0, None);
            let (dx_a, ds_slack_a, dy_a, ds_dual_a) = &affine;
            let (ap_a, ad_a) =
                step_bounds(&x, &s_slack, &y, &s_dual, dx_a, ds_slack_a, dy_a, ds_dual_a);
            let ap_a = ap_a.min(1.0);
            let ad_a = ad_a.min(1.0);
            let mut compl_aff = 0.0;
            for j in 0..p {
                let xa = &x[j] + &dx_a[j] * ap_a;
                let sa = &s_dual[j] + &ds_dual_a[j] * ad_a;
                compl_aff += xa.dot(&sa);
            }
            for i in 0..m {
                compl_aff += (s_slack[i] + ap_a * ds_slack_a[i]) * (y[i] + ad_a * dy_a[i]);
            }
            let mu_aff = compl_aff / degree;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
            // Infeasible-start safeguard: if complementarity drops far below
            // the residual level, the scaling point degenerates and steps
            // collapse before feasibility is reached. Re-aim it at the
            // residual level so the two descend together.
            let ratio = |r: f64, r0: f64| if r0 > 1e-12 { (r / r0).min(1.0) } else { 0.0 };
            let lag = ratio(pinf, pinf0).max(ratio(dinf, dinf0));
            let mut sigma_mu = sigma * mu;
            // Near feasibility the re-centering itself becomes the dominant
            // perturbation (it is amplified by the inverse of the nearly
            // singular S), so let plain Newton steps finish the residual off.
            if mu < 0.01 * mu0 * lag && pinf.max(dinf) > 1e3 * feas_tol {
                sigma_mu = 0.1 * mu0 * lag;
            }

            // Corrector: recentered step reusing the factor-free Schur solve.
            // When the affine direction is large its cross terms can wreck the
            // corrected direction; fall back to plain centering in that case.
            let mut corrected = newton(&self, sigma_mu, Some(&affine));
            let (cp, cd) = {
                let (dx, ds, dy, dsd) = &corrected;
                step_bounds(&x, &s_slack, &y, &s_dual, dx, ds, dy, dsd)
            };
            let mut reach = cp.min(cd);
            if reach < 0.5 * ap_a.min(ad_a) {
                corrected = newton(&self, sigma_mu, None);
                let (dx, ds, dy, dsd) = &corrected;
                let (rp2, rd2) = step_bounds(&x, &s_slack, &y, &s_dual, dx, ds, dy, dsd);
                reach = rp2.min(rd2);
            }
            let (dx, ds_slack_d, dy, ds_dual) = corrected;
            // A common step length keeps the primal and dual iterates centered
            // together; letting one side race ahead collapses later steps.
            let tau = 0.98;
            let step = (tau * reach).min(1.0);
            let ap = step;
            let ad = step;

            for j in 0..p {
                x[j] += &dx[j] * ap;
                symmetrize(&mut x[j]);
                project_embedding(&mut x[j]);
                s_dual[j] += &ds_dual[j] * ad;
                symmetrize(&mut s_dual[j]);
                project_embedding(&mut s_dual[j]);
            }
            for i in 0..m {
                s_slack[i] += ap * ds_slack_d[i];
                y[i] += ad * dy[i];
            }
        }

        if status == SolveStatus::MaxIterations && self.certificate_holds(&y, 1e-7) {
            status = SolveStatus::Infeasible;
        }

        if status == SolveStatus::Infeasible {
            return SdpSolution {
                blocks: (0..p).map(|_| HermitianMatrix::zeros(order)).collect(),
                objective: 0.0,
                bound: f64::INFINITY,
                gap: f64::INFINITY,
                iterations,
                status,
            };
        }

        let blocks: Vec<HermitianMatrix> = x
            .iter()
            .map(|xh| {
                HermitianMatrix::complex_restore(&(xh * self.rhs_scale))
                    .expect("iterates stay in the embedding subspace")
            })
            .collect();
        let objective: f64 = blocks
            .iter()
            .zip(&self.problem.costs)
            .map(|(w, c)| c.trace_product(w))
            .sum();
        // Embedded objectives double the complex ones; undo both scalings.
        let _ = pobj;
        let bound = dobj * self.rhs_scale / 2.0;
        SdpSolution {
            blocks,
            objective,
            bound,
            gap,
            iterations,
            status,
        }
    }

    /// Farkas ray check on the normalized multipliers: `b^T y > 0` while every
    /// block of `sum_i y_i A_ij` stays below `tol` in largest eigenvalue.
    fn certificate_holds(&self, y: &[f64], tol: f64) -> bool {
        let m = self.kept.len();
        let p = self.problem.num_blocks;
        let by: f64 = (0..m).map(|i| self.b[i] * y[i]).sum();
        if by <= 0.0 {
            return false;
        }
        for j in 0..p {
            let mut ray = DMatrix::zeros(2 * self.problem.block_order, 2 * self.problem.block_order);
            for i in 0..m {
                ray += &self.a[i][j] * (y[i] / by);
            }
            symmetrize(&mut ray);
            let scale = 1.0 + ray.norm();
            let lmax = ray
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(f64::NEG_INFINITY, |a, &l| a.max(l));
            if lmax > tol * scale {
                return false;
            }
        }
        true
    }
}

//! Transmit-power minimization by semidefinite relaxation.
//!
//! The per-user SINR and harvest constraints are quadratic in the beamformers,
//! so lifting each beam to a Hermitian block `W_j = w_j w_j^H` and dropping
//! the rank constraint turns the problem into a minimum-trace SDP with
//! trace-linear inequalities. `build_relaxation` assembles that data,
//! `solve_relaxed` hands it to the solver, and `recover` maps optimal blocks
//! back to beam vectors: an eigendecomposition when a block is numerically
//! rank-one, Gaussian randomization otherwise, followed in both cases by a
//! joint power rescale that restores every constraint exactly.
//!
//! The equivalent 2x2 bordered-matrix form of the scalar constraints is
//! provided for cross-checking (`to_lmi_form`); the solve path uses the
//! scalar form directly.

use crate::hermitian::{C64, HermitianMatrix};
use crate::miso::{feasibility_test, BeamformerSet, MisoChannel, MisoError, UserThresholds};
use crate::random::complex_gaussian;
use crate::sdp::{SdpConstraint, SdpProblem, SdpSolution, SolveOptions, SolveStatus};
use crate::units::watts_to_dbm;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

/// Smallest admissible SINR threshold; keeps every constraint right-hand side
/// strictly positive.
const GAMMA_GUARD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("thresholds fail the rank feasibility test: sum {threshold_sum} exceeds rank {rank}")]
    InfeasibleThresholds { threshold_sum: f64, rank: usize },
    #[error("solver certified the constraint set infeasible")]
    InfeasibleCertified,
    #[error("user {user} has a zero channel but a positive harvest threshold")]
    UnsatisfiableHarvest { user: usize },
    #[error("gamma[{user}] = {value} is below the {GAMMA_GUARD} threshold guard")]
    ThresholdTooSmall { user: usize, value: f64 },
    #[error("channel serves {channel_users} users but thresholds cover {threshold_users}")]
    UserCountMismatch {
        channel_users: usize,
        threshold_users: usize,
    },
    #[error("solver stopped after {iterations} iterations without converging")]
    Stalled { iterations: usize },
    #[error("bordered form requires nonnegative right-hand sides, got {value}")]
    NegativeBorder { value: f64 },
    #[error(transparent)]
    Model(#[from] MisoError),
}

/// Constraint data of the relaxed problem: for each user `k`, a SINR row
/// `sum_j Re tr(M_kj W_j) >= beta_k` with `M_kk = H_k` and `M_kj = -gamma_k
/// H_k` otherwise, and a harvest row `sum_j Re tr(H_k W_j) >= xi_k`.
#[derive(Debug, Clone)]
pub struct RelaxedProblem {
    /// `H_k = h_k h_k^H`, one per user.
    h_outer: Vec<HermitianMatrix>,
    gamma: Vec<f64>,
    /// SINR right-hand sides `gamma_k * sigma_sq`.
    beta: Vec<f64>,
    /// Harvest right-hand sides `2 mu_k / eta`.
    xi: Vec<f64>,
    sigma_sq: f64,
    n_antennas: usize,
}

impl RelaxedProblem {
    pub fn k_users(&self) -> usize {
        self.gamma.len()
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn channel_outer(&self) -> &[HermitianMatrix] {
        &self.h_outer
    }

    /// Coefficient matrices of user `k`'s SINR row.
    pub fn sinr_coefficients(&self, k: usize) -> Vec<HermitianMatrix> {
        (0..self.k_users())
            .map(|j| {
                if j == k {
                    self.h_outer[k].clone()
                } else {
                    self.h_outer[k].scale(-self.gamma[k])
                }
            })
            .collect()
    }

    /// Coefficient matrices of user `k`'s harvest row: `H_k` for every block.
    pub fn eh_coefficients(&self, k: usize) -> Vec<HermitianMatrix> {
        (0..self.k_users()).map(|_| self.h_outer[k].clone()).collect()
    }

    /// Minimum-trace SDP over the lifted blocks: all SINR rows first, then
    /// all harvest rows.
    pub fn to_sdp(&self) -> SdpProblem {
        let k_users = self.k_users();
        let mut constraints = Vec::with_capacity(2 * k_users);
        for k in 0..k_users {
            constraints.push(SdpConstraint {
                coefficients: self.sinr_coefficients(k),
                rhs: self.beta[k],
            });
        }
        for k in 0..k_users {
            constraints.push(SdpConstraint {
                coefficients: self.eh_coefficients(k),
                rhs: self.xi[k],
            });
        }
        SdpProblem::min_trace(k_users, self.n_antennas, constraints)
            .expect("relaxation data is dimensionally consistent")
    }
}

/// Assemble the relaxed constraint data from a channel and thresholds.
pub fn build_relaxation(
    ch: &MisoChannel,
    th: &UserThresholds,
) -> Result<RelaxedProblem, OptimizeError> {
    if ch.k_users() != th.k_users() {
        return Err(OptimizeError::UserCountMismatch {
            channel_users: ch.k_users(),
            threshold_users: th.k_users(),
        });
    }
    for (user, &g) in th.gamma.iter().enumerate() {
        if g < GAMMA_GUARD {
            return Err(OptimizeError::ThresholdTooSmall { user, value: g });
        }
    }
    let xi = th.derive_xi();
    for (user, x) in xi.iter().enumerate() {
        if *x > 0.0 && ch.user_column(user).norm() == 0.0 {
            return Err(OptimizeError::UnsatisfiableHarvest { user });
        }
    }
    let h_outer: Vec<HermitianMatrix> = (0..ch.k_users())
        .map(|k| HermitianMatrix::outer(&ch.user_column(k)))
        .collect();
    let beta: Vec<f64> = th.gamma.iter().map(|&g| g * th.sigma_sq).collect();
    Ok(RelaxedProblem {
        h_outer,
        gamma: th.gamma.clone(),
        beta,
        xi,
        sigma_sq: th.sigma_sq,
        n_antennas: ch.n_antennas(),
    })
}

/// One scalar trace constraint rewritten as a 2x2 PSD condition: the matrix
/// `[[expr, sqrt(rhs)], [sqrt(rhs), 1]]` is PSD exactly when
/// `expr >= rhs` (Schur complement against the positive corner).
#[derive(Debug, Clone)]
pub struct BorderedConstraint {
    coefficients: Vec<HermitianMatrix>,
    border: f64,
}

impl BorderedConstraint {
    fn new(coefficients: Vec<HermitianMatrix>, rhs: f64) -> Result<Self, OptimizeError> {
        if rhs < 0.0 {
            return Err(OptimizeError::NegativeBorder { value: rhs });
        }
        Ok(Self {
            coefficients,
            border: rhs.sqrt(),
        })
    }

    pub fn border(&self) -> f64 {
        self.border
    }

    /// Value of the affine top-left expression at the given blocks.
    pub fn expression(&self, blocks: &[HermitianMatrix]) -> f64 {
        self.coefficients
            .iter()
            .zip(blocks)
            .map(|(a, w)| a.trace_product(w))
            .sum()
    }

    /// The bordered matrix evaluated at the given blocks.
    pub fn evaluate(&self, blocks: &[HermitianMatrix]) -> DMatrix<f64> {
        let e = self.expression(blocks);
        DMatrix::from_row_slice(2, 2, &[e, self.border, self.border, 1.0])
    }

    /// PSD test on the evaluated 2x2 matrix.
    pub fn holds_at(&self, blocks: &[HermitianMatrix], tol: f64) -> bool {
        let m = self.evaluate(blocks);
        let half_tr = 0.5 * (m[(0, 0)] + 1.0);
        let det = m[(0, 0)] - self.border * self.border;
        let disc = (half_tr * half_tr - det).max(0.0).sqrt();
        half_tr - disc >= -tol
    }
}

/// Bordered-matrix rewrite of every constraint: `(A_k, B_k)` pairs carrying
/// the SINR and harvest rows of user `k`.
pub fn to_lmi_form(
    rp: &RelaxedProblem,
) -> Result<Vec<(BorderedConstraint, BorderedConstraint)>, OptimizeError> {
    (0..rp.k_users())
        .map(|k| {
            let a = BorderedConstraint::new(rp.sinr_coefficients(k), rp.beta[k])?;
            let b = BorderedConstraint::new(rp.eh_coefficients(k), rp.xi[k])?;
            Ok((a, b))
        })
        .collect()
}

/// Solve the relaxation with identity costs.
pub fn solve_relaxed(rp: &RelaxedProblem, opts: &SolveOptions) -> SdpSolution {
    rp.to_sdp().solve(opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryMethod {
    Evd,
    Randomization,
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub solve: SolveOptions,
    /// A block counts as rank-one when its second eigenvalue is at most this
    /// fraction of the first.
    pub rank_ratio_tol: f64,
    /// Candidate draws for the randomization fallback.
    pub randomization_draws: usize,
    /// Seed of the randomization draws.
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            rank_ratio_tol: 1e-6,
            randomization_draws: 200,
            seed: 0,
        }
    }
}

/// Beamformers recovered from an optimal relaxation, with the diagnostics
/// needed to judge how tight the relaxation was.
#[derive(Debug, Clone)]
pub struct RecoveredSolution {
    pub beamformers: BeamformerSet,
    pub total_power: f64,
    /// Dual bound of the relaxation: no feasible beam set can use less power.
    pub sdp_bound: f64,
    /// Optimal relaxation objective.
    pub sdp_objective: f64,
    /// Relative duality gap of the solve.
    pub gap: f64,
    pub iterations: usize,
    pub rank_one: Vec<bool>,
    /// Second-to-first eigenvalue ratio per block.
    pub eigen_ratio: Vec<f64>,
    /// Per-user SINR slack, relative to the threshold. Negative values mean
    /// recovery failed to restore feasibility.
    pub sinr_margins: Vec<f64>,
    /// Per-user harvest slack, relative to the threshold when it is positive,
    /// absolute otherwise.
    pub eh_margins: Vec<f64>,
    pub method: RecoveryMethod,
}

impl RecoveredSolution {
    pub fn all_rank_one(&self) -> bool {
        self.rank_one.iter().all(|&b| b)
    }

    pub fn min_margin(&self) -> f64 {
        self.sinr_margins
            .iter()
            .chain(&self.eh_margins)
            .fold(f64::INFINITY, |a, &m| a.min(m))
    }

    /// JSON document with beamformers as re/im arrays and all scalar
    /// diagnostics; key order is stable for byte-identical reruns.
    pub fn to_json(&self) -> serde_json::Value {
        let beams: Vec<serde_json::Value> = self
            .beamformers
            .vectors()
            .iter()
            .map(|v| {
                json!({
                    "re": v.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "im": v.iter().map(|z| z.im).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "beamformers": beams,
            "total_power_w": self.total_power,
            "total_power_dbm": watts_to_dbm(self.total_power),
            "sdp_bound_w": self.sdp_bound,
            "sdp_objective_w": self.sdp_objective,
            "gap": self.gap,
            "iterations": self.iterations,
            "rank_one": self.rank_one,
            "eigen_ratio": self.eigen_ratio,
            "sinr_margins": self.sinr_margins,
            "eh_margins": self.eh_margins,
            "method": match self.method {
                RecoveryMethod::Evd => "evd",
                RecoveryMethod::Randomization => "randomization",
            },
        })
    }
}

/// Quadratic forms `w_j^H H_k w_j` for every user and beam.
fn beam_gains(rp: &RelaxedProblem, beams: &[DVector<C64>]) -> Vec<Vec<f64>> {
    (0..rp.k_users())
        .map(|k| {
            let h = rp.h_outer[k].matrix();
            beams
                .iter()
                .map(|w| {
                    let hw = h * w;
                    let mut acc = 0.0;
                    for (a, b) in w.iter().zip(hw.iter()) {
                        acc += a.re * b.re + a.im * b.im;
                    }
                    acc.max(0.0)
                })
                .collect()
        })
        .collect()
}

/// Smallest power factor `t` so that `sqrt(t) * beams` satisfies every
/// constraint; `None` when some SINR row cannot be met at any scale.
fn joint_rescale_factor(rp: &RelaxedProblem, gains: &[Vec<f64>]) -> Option<f64> {
    let mut t = 0.0f64;
    for k in 0..rp.k_users() {
        let total: f64 = gains[k].iter().sum();
        let own = gains[k][k];
        let interference = total - own;
        let divisor = own - rp.gamma[k] * interference;
        if divisor <= 0.0 {
            return None;
        }
        t = t.max(rp.beta[k] / divisor);
        if rp.xi[k] > 0.0 {
            if total <= 0.0 {
                return None;
            }
            t = t.max(rp.xi[k] / total);
        }
    }
    Some(t)
}

fn margins_at(rp: &RelaxedProblem, gains: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let mut sinr_margins = Vec::with_capacity(rp.k_users());
    let mut eh_margins = Vec::with_capacity(rp.k_users());
    for k in 0..rp.k_users() {
        let total: f64 = gains[k].iter().sum();
        let own = gains[k][k];
        let interference = total - own;
        let sinr = own / (interference + rp.sigma_sq);
        sinr_margins.push((sinr - rp.gamma[k]) / rp.gamma[k]);
        if rp.xi[k] > 0.0 {
            eh_margins.push((total - rp.xi[k]) / rp.xi[k]);
        } else {
            eh_margins.push(total);
        }
    }
    (sinr_margins, eh_margins)
}

/// Rotate so the first significantly nonzero entry is real nonnegative.
fn canonical_phase(w: &mut DVector<C64>) {
    let norm = w.norm();
    if norm == 0.0 {
        return;
    }
    for i in 0..w.len() {
        let z = w[i];
        if z.norm() > 1e-12 * norm {
            let phase = z.conj() / z.norm();
            for entry in w.iter_mut() {
                *entry *= phase;
            }
            return;
        }
    }
}

/// Map optimal relaxation blocks back to beam vectors.
pub fn recover(
    sol: &SdpSolution,
    rp: &RelaxedProblem,
    opts: &OptimizeOptions,
) -> Result<RecoveredSolution, OptimizeError> {
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Err(OptimizeError::InfeasibleCertified),
        SolveStatus::MaxIterations => {
            return Err(OptimizeError::Stalled {
                iterations: sol.iterations,
            })
        }
    }
    let k_users = rp.k_users();
    let decompositions: Vec<_> = sol.blocks.iter().map(|w| w.eig_decompose()).collect();
    let mut rank_one = Vec::with_capacity(k_users);
    let mut eigen_ratio = Vec::with_capacity(k_users);
    let mut top_vectors = Vec::with_capacity(k_users);
    for eig in &decompositions {
        let top = eig.eigenvalues[0].max(0.0);
        let second = eig.eigenvalues.get(1).copied().unwrap_or(0.0).max(0.0);
        let ratio = if top > 0.0 { second / top } else { 0.0 };
        eigen_ratio.push(ratio);
        rank_one.push(ratio <= opts.rank_ratio_tol);
        let v: DVector<C64> = if top > 0.0 {
            eig.eigenvectors.column(0).into_owned() * C64::new(top.sqrt(), 0.0)
        } else {
            DVector::zeros(rp.n_antennas)
        };
        top_vectors.push(v);
    }

    let evd_gains = beam_gains(rp, &top_vectors);
    let evd_choice = joint_rescale_factor(rp, &evd_gains).map(|t| {
        let power: f64 = t * top_vectors.iter().map(|v| v.norm_squared()).sum::<f64>();
        (t, power)
    });

    let all_rank_one = rank_one.iter().all(|&b| b);
    let (mut beams, method) = if all_rank_one && evd_choice.is_some() {
        let (t, _) = evd_choice.unwrap();
        let s = C64::new(t.sqrt(), 0.0);
        (
            top_vectors.iter().map(|v| v * s).collect::<Vec<_>>(),
            RecoveryMethod::Evd,
        )
    } else {
        // Gaussian randomization: redraw only the blocks that failed the
        // rank-one test, jointly rescale, keep the cheapest feasible draw.
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut best: Option<(f64, Vec<DVector<C64>>, f64)> = None;
        for _ in 0..opts.randomization_draws {
            let candidate: Vec<DVector<C64>> = (0..k_users)
                .map(|j| {
                    if rank_one[j] {
                        return top_vectors[j].clone();
                    }
                    let eig = &decompositions[j];
                    let mut v = DVector::zeros(rp.n_antennas);
                    for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
                        if lam <= 0.0 {
                            continue;
                        }
                        let g = complex_gaussian(&mut rng, 1.0);
                        v += eig.eigenvectors.column(idx) * (g * lam.sqrt());
                    }
                    v
                })
                .collect();
            let gains = beam_gains(rp, &candidate);
            if let Some(t) = joint_rescale_factor(rp, &gains) {
                let power: f64 = t * candidate.iter().map(|v| v.norm_squared()).sum::<f64>();
                let better = best.as_ref().map_or(true, |(bp, _, _)| power < *bp);
                if better {
                    best = Some((power, candidate, t));
                }
            }
        }
        match best {
            Some((_, candidate, t)) => {
                let s = C64::new(t.sqrt(), 0.0);
                (
                    candidate.iter().map(|v| v * s).collect::<Vec<_>>(),
                    RecoveryMethod::Randomization,
                )
            }
            None => {
                // Every draw failed; fall back to the eigenvector candidate
                // scaled for the harvest rows only, and let the margins report
                // the SINR shortfall.
                let mut t = 1.0f64;
                for k in 0..k_users {
                    let total: f64 = evd_gains[k].iter().sum();
                    if rp.xi[k] > 0.0 && total > 0.0 {
                        t = t.max(rp.xi[k] / total);
                    }
                }
                let s = C64::new(t.sqrt(), 0.0);
                (
                    top_vectors.iter().map(|v| v * s).collect::<Vec<_>>(),
                    RecoveryMethod::Randomization,
                )
            }
        }
    };

    for w in &mut beams {
        canonical_phase(w);
    }
    let gains = beam_gains(rp, &beams);
    let (sinr_margins, eh_margins) = margins_at(rp, &gains);
    let beamformers = BeamformerSet::new(beams)?;
    let total_power = beamformers.total_power();
    Ok(RecoveredSolution {
        beamformers,
        total_power,
        sdp_bound: sol.bound,
        sdp_objective: sol.objective,
        gap: sol.gap,
        iterations: sol.iterations,
        rank_one,
        eigen_ratio,
        sinr_margins,
        eh_margins,
        method,
    })
}

/// Full pipeline: feasibility test, relaxation, solve, recovery.
pub fn optimize(
    ch: &MisoChannel,
    th: &UserThresholds,
    opts: &OptimizeOptions,
) -> Result<RecoveredSolution, OptimizeError> {
    let report = feasibility_test(ch, th);
    if !report.feasible {
        return Err(OptimizeError::InfeasibleThresholds {
            threshold_sum: report.threshold_sum,
            rank: report.rank,
        });
    }
    let rp = build_relaxation(ch, th)?;
    let sol = solve_relaxed(&rp, &opts.solve);
    recover(&sol, &rp, opts)
}

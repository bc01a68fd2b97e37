//! SINR thresholds are jointly attainable iff `sum_k gamma_k / (gamma_k + 1)`
//! stays within the channel rank. This example runs the predicate on a
//! full-rank channel and on a rank-one channel, then shows the interior-point
//! solver certifying the same verdicts independently.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use swipt::{build_relaxation, feasibility_test, solve_relaxed, MisoChannel, SolveOptions, SolveStatus, UserThresholds};

fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

fn report(name: &str, channel: &MisoChannel, thresholds: &UserThresholds) {
    let predicate = feasibility_test(channel, thresholds);
    println!(
        "{name}: threshold sum {:.3} vs rank {} -> {}",
        predicate.threshold_sum,
        predicate.rank,
        if predicate.feasible { "feasible" } else { "infeasible" }
    );
    let relaxation = build_relaxation(channel, thresholds).expect("valid model");
    let solution = solve_relaxed(&relaxation, &SolveOptions::default());
    let verdict = match solution.status {
        SolveStatus::Infeasible => "certified infeasible",
        SolveStatus::Optimal => "solved to optimality",
        SolveStatus::MaxIterations => "stalled",
    };
    println!("{name}: solver {verdict} (objective {:.4})", solution.objective);
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 4;
    let gamma = vec![1.0; n];
    let mu = vec![1e-3; n];
    let thresholds = UserThresholds::new(gamma, mu, 0.5, 0.01, 0.01).expect("valid thresholds");

    // Four independent columns: rank 4 swallows a threshold sum of 2.
    let cols: Vec<_> = (0..n).map(|_| gaussian_vector(n, &mut rng)).collect();
    let full = MisoChannel::new(DMatrix::from_columns(&cols)).expect("nonzero channel");
    report("full rank", &full, &thresholds);

    // Every user behind the same direction: rank 1 cannot carry sum 2.
    let shared = gaussian_vector(n, &mut rng);
    let repeated = MisoChannel::new(DMatrix::from_columns(&vec![shared; n])).expect("nonzero channel");
    report("rank one", &repeated, &thresholds);
}

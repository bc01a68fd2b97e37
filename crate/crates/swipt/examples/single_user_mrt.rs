//! Single-user transmit beamforming has a closed form: beam along the
//! channel and spend max(gamma * sigma^2, 2 mu / eta) / |h|^2. This example
//! checks the optimizer against it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use swipt::{optimize, MisoChannel, OptimizeOptions, UserThresholds};

fn main() {
    let h = DVector::from_vec(vec![
        Complex64::new(0.8, -0.3),
        Complex64::new(-0.2, 0.55),
        Complex64::new(0.1, 0.9),
        Complex64::new(-0.45, 0.05),
    ]);
    let channel = MisoChannel::new(DMatrix::from_columns(&[h.clone()])).expect("nonzero channel");

    let (gamma, mu, eta, sigma_sq) = (4.0, 0.3, 0.5, 0.05);
    let thresholds =
        UserThresholds::new(vec![gamma], vec![mu], eta, sigma_sq, sigma_sq).expect("valid thresholds");

    let solution = optimize(&channel, &thresholds, &OptimizeOptions::default()).expect("feasible");

    let norm_sq: f64 = h.norm_squared();
    let closed_form = (gamma * sigma_sq).max(2.0 * mu / eta) / norm_sq;

    println!("channel gain |h|^2    {norm_sq:.6}");
    println!("optimizer power       {:.9}", solution.total_power);
    println!("closed-form power     {closed_form:.9}");
    println!(
        "relative error        {:.2e}",
        (solution.total_power - closed_form).abs() / closed_form
    );
    println!("rank one              {}", solution.all_rank_one());
    println!("duality gap           {:.2e}", solution.gap);

    // The recovered beam must point along the channel (maximum ratio
    // transmission); the inner product magnitude equals |w| * |h|.
    let w = &solution.beamformers.vectors()[0];
    let alignment = h.dotc(w).norm() / (w.norm() * h.norm());
    println!("beam alignment        {alignment:.9}  (1 = collinear)");
}

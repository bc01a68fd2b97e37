//! Minimizes transmit power for four users behind a four-antenna array,
//! each with a detection SINR floor and a harvested-power floor, and shows
//! how tight the relaxation was.

use swipt::experiment::{generate_channels, ExperimentConfig, SweepParameter, SweepSpec};
use swipt::units::watts_to_dbm;
use swipt::{optimize, OptimizeOptions};

fn main() {
    // Channel entries average -40 dB of gain; noise figures are link-level.
    let cfg = ExperimentConfig {
        n_antennas: 4,
        k_users: 4,
        pathloss_db: -40.0,
        sigma_a_dbm: -70.0,
        sigma_cov_dbm: -50.0,
        eta: 1.0,
        seed: 2024,
        trials: 1,
        sweep: SweepSpec {
            parameter: SweepParameter::Gamma,
            values: vec![2.0],
            fixed: 1e-6,
        },
    };
    cfg.validate().expect("valid experiment");

    let channel = generate_channels(&cfg, cfg.seed).remove(0);
    let thresholds = cfg.thresholds_at(2.0).expect("valid thresholds");
    let solution =
        optimize(&channel, &thresholds, &OptimizeOptions::default()).expect("feasible instance");

    println!(
        "total power        {:.6e} W = {:.2} dBm",
        solution.total_power,
        watts_to_dbm(solution.total_power)
    );
    println!("relaxation bound   {:.6e} W", solution.sdp_bound);
    println!("duality gap        {:.2e}", solution.gap);
    println!("iterations         {}", solution.iterations);
    println!("all rank one       {}", solution.all_rank_one());
    println!("recovery           {:?}", solution.method);
    for (user, (sinr, eh)) in solution
        .sinr_margins
        .iter()
        .zip(&solution.eh_margins)
        .enumerate()
    {
        println!("user {user}: SINR margin {sinr:+.2e}, harvest margin {eh:+.2e}");
    }
}

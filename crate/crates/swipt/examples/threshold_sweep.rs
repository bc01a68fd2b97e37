//! Sweeps the harvested-power floor at a fixed SINR floor and prints the
//! resulting power curve as CSV. The curve stays flat while the SINR
//! constraints dominate, then rises once harvesting starts to bind.

use swipt::{run_sweep, sweep_csv, ExperimentConfig, SweepParameter, SweepSpec};

fn main() {
    let cfg = ExperimentConfig {
        n_antennas: 4,
        k_users: 4,
        pathloss_db: -40.0,
        sigma_a_dbm: -70.0,
        sigma_cov_dbm: -50.0,
        eta: 1.0,
        seed: 7,
        trials: 10,
        sweep: SweepSpec {
            parameter: SweepParameter::Xi,
            values: vec![1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 3e-4, 1e-3],
            fixed: 2.0,
        },
    };
    let rows = run_sweep(&cfg).expect("sweep runs");
    print!("{}", sweep_csv(&rows));
}

//! Target population over the (J, Ω) plane at finite time: the
//! high-fidelity plateau sits around J ≈ 0.8g…1.5g, collapses at J = 0
//! (where one target transition turns resonant), and freezes at Ω = 0.
//! Runs on the 16-state space; expect a couple of minutes of CPU.
//!
//! ```bash
//! cargo run --release --example hopping_sweep
//! ```

use cavity_cooling::dynamics::IntegratorOpts;
use cavity_cooling::experiments::{sweep_fig4a, SpaceSpec};
use cavity_cooling::model::SystemParams;

fn main() {
    let params = SystemParams::working_point();
    let j_grid = [0.0, 0.4, 0.8, 1.1, 1.5, 2.0];
    let omega_grid = [0.0, 0.015, 0.03, 0.045];
    let spec = SpaceSpec { n_max: 1, e_max: Some(1) };
    let result = sweep_fig4a(
        &j_grid,
        &omega_grid,
        &params,
        1500.0,
        spec,
        &IntegratorOpts::default(),
    );

    print!("{:>6}", "J\\Om");
    for om in &omega_grid {
        print!("{om:>9}");
    }
    println!();
    for (i, j) in j_grid.iter().enumerate() {
        print!("{j:>6.2}");
        for k in 0..omega_grid.len() {
            match result.value_at(&[i, k]) {
                Some(v) => print!("{v:>9.4}"),
                None => print!("{:>9}", "-"),
            }
        }
        println!();
    }

    let plateau = result.plateau(0.85);
    println!(
        "\n{} grid points reach P_T >= 0.85: {:?}",
        plateau.len(),
        plateau
    );
    println!("wall clock: {:.1}s", result.metadata.wall_clock_s);
}

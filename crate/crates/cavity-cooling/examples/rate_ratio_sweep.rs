//! Fidelity versus the decay-rate ratio γ/κ at fixed cooperativity C = 50:
//! the optimum sits near γ = 1.5κ. Runs on the fast 16-state space.
//!
//! ```bash
//! cargo run --release --example rate_ratio_sweep
//! ```

use cavity_cooling::dynamics::IntegratorOpts;
use cavity_cooling::experiments::{cooperativity_to_rates, sweep_fig4b, SpaceSpec};
use cavity_cooling::model::SystemParams;

fn main() {
    let params = SystemParams::working_point();
    let ratios: Vec<f64> = (0..11).map(|i| 0.5 + 0.25 * i as f64).collect();
    let result = sweep_fig4b(
        &ratios,
        50.0,
        &params,
        1500.0,
        SpaceSpec { n_max: 1, e_max: Some(1) },
        &IntegratorOpts::default(),
    );

    println!("{:>12} {:>10} {:>10} {:>10}", "gamma/kappa", "kappa/g", "gamma/g", "P_T");
    for (i, &ratio) in ratios.iter().enumerate() {
        let (kappa, gamma) = cooperativity_to_rates(50.0, ratio, params.g);
        match result.value_at(&[i]) {
            Some(f) => println!("{ratio:>12.2} {kappa:>10.4} {gamma:>10.4} {f:>10.5}"),
            None => println!("{ratio:>12.2} {kappa:>10.4} {gamma:>10.4} {:>10}", "-"),
        }
    }
    if let Some((best, fidelity)) = result.argmax() {
        println!("\noptimum: gamma/kappa = {best} with P_T = {fidelity:.5}");
    }
    println!("wall clock: {:.1}s", result.metadata.wall_clock_s);
}

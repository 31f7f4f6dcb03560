//! The target state is reached from anywhere: three very different initial
//! states end in the same population configuration, and the detector
//! confirms quasi-stationarity. Runs on the fast 16-state space.
//!
//! ```bash
//! cargo run --example steady_state_uniqueness
//! ```

use cavity_cooling::dynamics::{
    steady_state_reach, EvolutionContext, Frame, IntegratorOpts,
    SteadyStateCriterion,
};
use cavity_cooling::experiments::{
    ground_populations, run_fig5, InitialState, SpaceSpec,
};
use cavity_cooling::model::SystemParams;

fn main() {
    let params = SystemParams::working_point();
    let spec = SpaceSpec { n_max: 1, e_max: Some(1) };
    let space = spec.build();

    let starts = [
        InitialState::Vacuum,
        InitialState::Target,
        InitialState::RandomMixed { seed: 42 },
    ];
    let runs = run_fig5(&params, &starts, spec, 1500.0, 25.0, &IntegratorOpts::default())
        .expect("integration succeeds");

    println!("populations at gt = 1500 from three initial states:");
    println!(
        "{:<16} {:>9} {:>9} {:>9} {:>9}",
        "initial", "P_T", "P_S", "P_00", "P_11"
    );
    for (label, traj) in &runs {
        let p = ground_populations(traj.final_state(), &space);
        println!(
            "{label:<16} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            p.p_t, p.p_s, p.p_00, p.p_11
        );
    }

    let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
    let outcome = steady_state_reach(
        &InitialState::Vacuum.materialize(&space),
        &ctx,
        &SteadyStateCriterion::default(),
        &IntegratorOpts::default(),
    )
    .expect("integration succeeds");
    println!(
        "\nsteady-state detector: converged = {} at gt = {:.0} (population drift {:.2e} over the trailing window)",
        outcome.converged, outcome.time, outcome.final_drift
    );
}

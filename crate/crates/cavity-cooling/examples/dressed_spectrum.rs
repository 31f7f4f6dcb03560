//! The closed-form eigensystem of the drive-free Hamiltonian on the
//! ≤1-excitation space, checked state by state against dense
//! diagonalization.
//!
//! ```bash
//! cargo run --example dressed_spectrum
//! ```

use cavity_cooling::model::SystemParams;
use cavity_cooling::spectrum::{analytic_spectrum, numeric_spectrum, verify_spectrum};

fn main() {
    let params = SystemParams::working_point();
    println!(
        "w1 = {}g, w2 = {}g, J = {}g (energies in units of g)\n",
        params.w1, params.w2, params.j
    );

    let analytic = analytic_spectrum(&params);
    let numeric = numeric_spectrum(&analytic.space, &params);
    let report = verify_spectrum(&analytic, &numeric, 1e-10);

    println!("{:<8} {:>14} {:>14} {:>12}", "state", "energy/g", "nearest num.", "residual");
    for entry in &report.entries {
        println!(
            "{:<8} {:>14.8} {:>14.8} {:>12.2e}",
            entry.name, entry.eigenvalue, entry.nearest_numeric, entry.residual
        );
    }
    println!(
        "\nmax residual {:.2e}, orthonormality defect {:.2e}, completeness defect {:.2e}",
        report.max_residual,
        analytic.orthonormality_defect(),
        analytic.completeness_defect()
    );
    println!(
        "normalizations: N_a = {:.6}, N_b = {:.6}, N_d = {:.6}, N_e = {:.6}",
        analytic.constants.n_a,
        analytic.constants.n_b,
        analytic.constants.n_d,
        analytic.constants.n_e
    );
    assert!(report.pass, "verification failed: {:?}", report.failures);
    println!("all sixteen closed forms verified");
}

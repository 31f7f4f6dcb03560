//! The laser-driven transition structure in the dressed basis: which ground
//! states are resonant, how strongly every target-state transition is
//! suppressed, and the coupling constants behind it.
//!
//! ```bash
//! cargo run --example transition_structure
//! ```

use cavity_cooling::model::SystemParams;
use cavity_cooling::transitions::{
    coefficient_overlap_defect, coupling_coefficients, suppression_ratio,
    transition_table,
};

fn main() {
    let params = SystemParams::working_point();
    let c = coupling_coefficients(params.g, params.j);
    println!(
        "coupling constants at J = {}g: L1 = {:.6}, L2 = {:.6}, L3 = {:.6}",
        params.j, c.l1, c.l2, c.l3
    );
    println!(
        "closed forms vs numeric overlaps: max deviation {:.2e}\n",
        coefficient_overlap_defect(&params)
    );

    let freqs = params.resolved_laser_freqs();
    println!(
        "selection rule: wL1 = {:.6}g, wL2 = {:.6}g, wL3 = {:.6}g",
        freqs.wl1, freqs.wl2, freqs.wl3
    );

    let table = transition_table(&params, &freqs);
    println!("\nresonant rows (detuning = 0):");
    for row in table.resonant_rows() {
        println!(
            "  {:<6} -> phi{:<2} via laser {}   effective Rabi {:+.5}g",
            row.ground.name(),
            row.excited,
            row.laser,
            row.rabi
        );
    }

    let report = suppression_ratio(&params);
    println!("\ntarget-state transitions (all far detuned):");
    println!(
        "  {:<7} {:>9} {:>7} {:>12} {:>12} {:>9}",
        "excited", "laser", "label", "Rabi/g", "detuning/g", "|Δ|/|Ω|"
    );
    for row in &report.rows {
        println!(
            "  phi{:<4} {:>9} {:>7} {:>12.5} {:>12.5} {:>9.1}",
            row.excited,
            row.laser,
            row.label.map(String::from).unwrap_or_default(),
            row.rabi,
            row.detuning,
            row.ratio
        );
    }
    println!(
        "\nminimum suppression ratio {:.1} ({} scheme violations)",
        report.min_ratio,
        report.violations.len()
    );
}

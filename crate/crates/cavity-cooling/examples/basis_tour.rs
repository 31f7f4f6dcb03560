//! Tour of the truncated Hilbert space: cutoffs, sector layout, and the
//! action of the elementary operators.
//!
//! ```bash
//! cargo run --example basis_tour
//! ```

use cavity_cooling::hilbert::{annihilator, atom_op, build_space, BasisLabel};

fn main() {
    for (n_max, e_max) in [(1, Some(1)), (2, Some(2)), (2, None)] {
        let space = build_space(n_max, e_max);
        let sectors: Vec<usize> = (0..=space.labels().last().unwrap().n_exc())
            .map(|e| space.labels().iter().filter(|l| l.n_exc() == e).count())
            .collect();
        println!(
            "n_max = {n_max}, e_max = {e_max:?}: dim = {:2}, sector sizes {sectors:?}",
            space.dim()
        );
    }

    println!("\nthe 16-state space (photon cutoff 1, at most one excitation):");
    let space = build_space(1, Some(1));
    for (index, label) in space.labels().iter().enumerate() {
        print!("  {label} [{index:2}]");
        if (index + 1) % 4 == 0 {
            println!();
        }
    }

    println!("\noperator actions:");
    let a1 = annihilator(&space, 1);
    let one_photon = BasisLabel::new(0, 0, 1, 0);
    let vacuum = BasisLabel::new(0, 0, 0, 0);
    println!(
        "  <00,00| a_1 |00,10> = {}",
        a1.element(&vacuum, &one_photon).re
    );

    let lower = atom_op(&space, 2, 0, 2);
    let excited = BasisLabel::new(0, 2, 0, 0);
    println!(
        "  <00,00| |0><2|_2 |02,00> = {}",
        lower.element(&vacuum, &excited).re
    );

    // raising |10,10> -> |20,10> needs two excitations: dropped here
    let raise = atom_op(&space, 1, 2, 1);
    let from = BasisLabel::new(1, 0, 1, 0);
    let norm = raise.apply(&space.basis_vector(&from)).norm();
    println!("  |2><1|_1 on |10,10> in the e_max = 1 space: norm {norm} (dropped at the cutoff)");

    let wide = build_space(1, None);
    let raise = atom_op(&wide, 1, 2, 1);
    let target = BasisLabel::new(2, 0, 1, 0);
    println!(
        "  the same transition without the excitation cutoff: <20,10|...|10,10> = {}",
        raise.element(&target, &from).re
    );
}

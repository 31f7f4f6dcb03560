//! Closed-form eigensystem of the drive-free Hamiltonian restricted to at
//! most one excitation, and its verification against numerical
//! diagonalization.
//!
//! The zero-excitation sector holds the four ground states
//!
//! ```text
//! |φ00⟩ = |00,00⟩            E = 0
//! |T,00⟩ = (|01,00⟩+|10,00⟩)/√2   E = w1
//! |S,00⟩ = (|01,00⟩−|10,00⟩)/√2   E = w1
//! |φ11⟩ = |11,00⟩            E = 2 w1
//! ```
//!
//! and the one-excitation sector the twelve dressed states φ1…φ12 whose
//! energies involve √(J²+g²) and √(J²+4g²). All sixteen are exact
//! eigenvectors; degeneracies (φ1/φ2, φ3/φ4, φ5/φ6, and λ7 = λ8 at J = 0)
//! are handled by comparing invariant subspaces rather than individual
//! vectors.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::hilbert::{build_space, BasisLabel, HilbertSpace};
use crate::model::{h_nl, SystemParams};

/// Degeneracy threshold (in units of g) below which eigenvalues are treated
/// as one invariant subspace during verification.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// The four zero-excitation eigenstates, named.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ground {
    Phi00,
    T,
    S,
    Phi11,
}

impl Ground {
    pub const ALL: [Ground; 4] = [Ground::Phi00, Ground::T, Ground::S, Ground::Phi11];

    pub fn name(&self) -> &'static str {
        match self {
            Ground::Phi00 => "phi00",
            Ground::T => "T00",
            Ground::S => "S00",
            Ground::Phi11 => "phi11",
        }
    }

    pub fn energy(&self, params: &SystemParams) -> f64 {
        match self {
            Ground::Phi00 => 0.0,
            Ground::T | Ground::S => params.w1,
            Ground::Phi11 => 2.0 * params.w1,
        }
    }

    /// State vector on any space containing the atomic ground sector.
    pub fn vector(&self, space: &Arc<HilbertSpace>) -> DVector<C64> {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let one = C64::new(1.0, 0.0);
        let l = BasisLabel::new;
        match self {
            Ground::Phi00 => space.basis_vector(&l(0, 0, 0, 0)),
            Ground::T => {
                space.superposition(&[(s, l(0, 1, 0, 0)), (s, l(1, 0, 0, 0))])
            }
            Ground::S => {
                space.superposition(&[(s, l(0, 1, 0, 0)), (-s, l(1, 0, 0, 0))])
            }
            Ground::Phi11 => space.superposition(&[(one, l(1, 1, 0, 0))]),
        }
    }
}

/// Energy of the one-excitation eigenstate φk (k = 1…12), closed form.
pub fn excited_energy(params: &SystemParams, k: usize) -> f64 {
    let (w1, w2, g, j) = (params.w1, params.w2, params.g, params.j);
    let root1 = (j * j + g * g).sqrt();
    let root4 = (j * j + 4.0 * g * g).sqrt();
    match k {
        1 | 2 => w2 + root1,
        3 | 4 => w2 - root1,
        5 | 6 => w2,
        7 => w2 - w1 - j,
        8 => w2 - w1 + j,
        9 => w1 + w2 - j / 2.0 + root4 / 2.0,
        10 => w1 + w2 - j / 2.0 - root4 / 2.0,
        11 => w1 + w2 + j / 2.0 - root4 / 2.0,
        12 => w1 + w2 + j / 2.0 + root4 / 2.0,
        _ => panic!("excited state index must be 1..=12"),
    }
}

/// Normalization constants of the one-excitation eigenvectors.
#[derive(Debug, Clone, Copy)]
pub struct Normalizations {
    pub n_a: f64,
    /// Diverges at J = 0, where φ5/φ6 are instead given by the normalized
    /// limit vectors.
    pub n_b: f64,
    pub n_c: f64,
    pub n_d: f64,
    pub n_e: f64,
}

pub fn normalizations(g: f64, j: f64) -> Normalizations {
    let root1sq = j * j + g * g;
    let root4 = (j * j + 4.0 * g * g).sqrt();
    Normalizations {
        n_a: (2.0 * root1sq).sqrt() / g,
        n_b: root1sq.sqrt() / j,
        n_c: std::f64::consts::SQRT_2,
        n_d: (j * j + 4.0 * g * g - j * root4).sqrt() / g,
        n_e: (j * j + 4.0 * g * g + j * root4).sqrt() / g,
    }
}

/// One named closed-form eigenpair.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub name: String,
    pub value: f64,
    pub vector: DVector<C64>,
}

/// The sixteen closed-form eigenpairs on the (n_max = 1, e_max = 1) space.
#[derive(Debug, Clone)]
pub struct AnalyticSpectrum {
    pub space: Arc<HilbertSpace>,
    /// Ordered: phi00, T00, S00, phi11, then phi1…phi12.
    pub pairs: Vec<EigenPair>,
    pub constants: Normalizations,
    /// True when J = 0 and φ5/φ6 were replaced by their normalized limits.
    pub j_zero_limit: bool,
}

impl AnalyticSpectrum {
    /// The pair for excited state φk (k = 1…12).
    pub fn excited(&self, k: usize) -> &EigenPair {
        assert!((1..=12).contains(&k));
        &self.pairs[3 + k]
    }

    pub fn ground(&self, which: Ground) -> &EigenPair {
        let i = match which {
            Ground::Phi00 => 0,
            Ground::T => 1,
            Ground::S => 2,
            Ground::Phi11 => 3,
        };
        &self.pairs[i]
    }

    /// max |⟨φi|φj⟩ − δij| over all sixteen pairs.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.pairs.iter().enumerate() {
            for (j, b) in self.pairs.iter().enumerate() {
                let overlap = a.vector.dotc(&b.vector);
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((overlap - C64::new(expected, 0.0)).norm());
            }
        }
        worst
    }

    /// max |Σ_k |φk⟩⟨φk| − 1| over entries: the sixteen states must span the
    /// whole ≤1-excitation space.
    pub fn completeness_defect(&self) -> f64 {
        let dim = self.space.dim();
        let mut proj = DMatrix::<C64>::zeros(dim, dim);
        for pair in &self.pairs {
            proj += &pair.vector * pair.vector.adjoint();
        }
        proj -= DMatrix::<C64>::identity(dim, dim);
        proj.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Instantiate all sixteen closed-form eigenpairs. Requires g > 0; at J = 0
/// the φ5/φ6 vectors are the normalized limits (flagged on the result).
pub fn analytic_spectrum(params: &SystemParams) -> AnalyticSpectrum {
    assert!(params.g > 0.0, "analytic spectrum requires g > 0");
    assert!(params.j >= 0.0, "analytic spectrum requires J >= 0");
    let space = build_space(1, Some(1));
    let (g, j) = (params.g, params.j);
    let root1 = (j * j + g * g).sqrt();
    let root4 = (j * j + 4.0 * g * g).sqrt();
    let l = BasisLabel::new;
    let re = |x: f64| C64::new(x, 0.0);

    let mut pairs = Vec::with_capacity(16);
    let s = std::f64::consts::FRAC_1_SQRT_2;

    pairs.push(EigenPair {
        name: "phi00".into(),
        value: 0.0,
        vector: space.basis_vector(&l(0, 0, 0, 0)),
    });
    pairs.push(EigenPair {
        name: "T00".into(),
        value: params.w1,
        vector: space.superposition(&[(re(s), l(0, 1, 0, 0)), (re(s), l(1, 0, 0, 0))]),
    });
    pairs.push(EigenPair {
        name: "S00".into(),
        value: params.w1,
        vector: space.superposition(&[(re(s), l(0, 1, 0, 0)), (-re(s), l(1, 0, 0, 0))]),
    });
    pairs.push(EigenPair {
        name: "phi11".into(),
        value: 2.0 * params.w1,
        vector: space.basis_vector(&l(1, 1, 0, 0)),
    });

    // φ1…φ4: atom in |1⟩ dressed with a photon and the bare |2⟩ state,
    // written with the overall 1/(g·N_a) = 1/√(2(J²+g²)) normalization
    let na = (2.0 * (j * j + g * g)).sqrt();
    let mut push = |name: &str, value: f64, terms: Vec<(f64, BasisLabel)>| {
        let terms: Vec<(C64, BasisLabel)> =
            terms.into_iter().map(|(a, lab)| (re(a), lab)).collect();
        pairs.push(EigenPair {
            name: name.into(),
            value,
            vector: space.superposition(&terms),
        });
    };

    push(
        "phi1",
        params.w2 + root1,
        vec![
            (root1 / na, l(1, 0, 1, 0)),
            (j / na, l(1, 0, 0, 1)),
            (g / na, l(2, 0, 0, 0)),
        ],
    );
    push(
        "phi2",
        params.w2 + root1,
        vec![
            (j / na, l(0, 1, 1, 0)),
            (root1 / na, l(0, 1, 0, 1)),
            (g / na, l(0, 2, 0, 0)),
        ],
    );
    push(
        "phi3",
        params.w2 - root1,
        vec![
            (j / na, l(1, 0, 0, 1)),
            (-root1 / na, l(1, 0, 1, 0)),
            (g / na, l(2, 0, 0, 0)),
        ],
    );
    push(
        "phi4",
        params.w2 - root1,
        vec![
            (j / na, l(0, 1, 1, 0)),
            (-root1 / na, l(0, 1, 0, 1)),
            (g / na, l(0, 2, 0, 0)),
        ],
    );
    // φ5/φ6 in normalized form (−g|…01⟩ + J|2…⟩)/√(J²+g²): finite at J = 0
    push(
        "phi5",
        params.w2,
        vec![(-g / root1, l(1, 0, 0, 1)), (j / root1, l(2, 0, 0, 0))],
    );
    push(
        "phi6",
        params.w2,
        vec![(-g / root1, l(0, 1, 1, 0)), (j / root1, l(0, 2, 0, 0))],
    );
    push(
        "phi7",
        params.w2 - params.w1 - j,
        vec![(s, l(0, 0, 1, 0)), (-s, l(0, 0, 0, 1))],
    );
    push(
        "phi8",
        params.w2 - params.w1 + j,
        vec![(s, l(0, 0, 1, 0)), (s, l(0, 0, 0, 1))],
    );

    let consts = normalizations(g, j);
    let c_minus = (j - root4) / (2.0 * g);
    let c_plus = (j + root4) / (2.0 * g);
    push(
        "phi9",
        excited_energy(params, 9),
        vec![
            (c_minus / consts.n_d, l(1, 1, 1, 0)),
            (-c_minus / consts.n_d, l(1, 1, 0, 1)),
            (-1.0 / consts.n_d, l(2, 1, 0, 0)),
            (1.0 / consts.n_d, l(1, 2, 0, 0)),
        ],
    );
    push(
        "phi10",
        excited_energy(params, 10),
        vec![
            (c_plus / consts.n_e, l(1, 1, 1, 0)),
            (-c_plus / consts.n_e, l(1, 1, 0, 1)),
            (-1.0 / consts.n_e, l(2, 1, 0, 0)),
            (1.0 / consts.n_e, l(1, 2, 0, 0)),
        ],
    );
    push(
        "phi11",
        excited_energy(params, 11),
        vec![
            (c_minus / consts.n_d, l(1, 1, 1, 0)),
            (c_minus / consts.n_d, l(1, 1, 0, 1)),
            (1.0 / consts.n_d, l(2, 1, 0, 0)),
            (1.0 / consts.n_d, l(1, 2, 0, 0)),
        ],
    );
    push(
        "phi12",
        excited_energy(params, 12),
        vec![
            (c_plus / consts.n_e, l(1, 1, 1, 0)),
            (c_plus / consts.n_e, l(1, 1, 0, 1)),
            (1.0 / consts.n_e, l(2, 1, 0, 0)),
            (1.0 / consts.n_e, l(1, 2, 0, 0)),
        ],
    );

    AnalyticSpectrum {
        space,
        pairs,
        constants: consts,
        j_zero_limit: j == 0.0,
    }
}

/// Numerical eigendecomposition of H_NL restricted to the ≤1-excitation
/// block, eigenvalues ascending. The oracle the closed forms are checked
/// against.
#[derive(Debug, Clone)]
pub struct NumericSpectrum {
    /// The sixteen ≤1-excitation labels, in canonical sector order.
    pub labels: Vec<BasisLabel>,
    pub values: Vec<f64>,
    /// Column k is the eigenvector of `values[k]`.
    pub vectors: DMatrix<C64>,
    /// The Hamiltonian block the decomposition was taken of.
    pub h_block: DMatrix<C64>,
}

pub fn numeric_spectrum(
    space: &Arc<HilbertSpace>,
    params: &SystemParams,
) -> NumericSpectrum {
    assert!(
        space.n_max() >= 1 && space.e_max().is_none_or(|e| e >= 1),
        "space must contain the one-excitation sector"
    );
    let h = h_nl(space, params);
    let canonical = build_space(1, Some(1));
    let indices: Vec<usize> = canonical
        .labels()
        .iter()
        .map(|l| {
            space
                .index_of(l)
                .expect("≤1-excitation label missing from space")
        })
        .collect();
    let dim = indices.len();
    let mut block = DMatrix::<C64>::zeros(dim, dim);
    for (bi, &i) in indices.iter().enumerate() {
        for (bj, &j) in indices.iter().enumerate() {
            block[(bi, bj)] = h.matrix()[(i, j)];
        }
    }
    let eig = SymmetricEigen::new(block.clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<C64>::zeros(dim, dim);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    NumericSpectrum {
        labels: canonical.labels().to_vec(),
        values,
        vectors,
        h_block: block,
    }
}

/// Per-state verification outcome.
#[derive(Debug, Clone)]
pub struct VerifyEntry {
    pub name: String,
    pub eigenvalue: f64,
    pub nearest_numeric: f64,
    /// ‖H v − λ v‖ for the closed-form pair.
    pub residual: f64,
    /// ‖(1 − P) v‖ with P the projector onto the numerically degenerate
    /// subspace matching λ.
    pub subspace_defect: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub entries: Vec<VerifyEntry>,
    pub max_residual: f64,
    pub max_subspace_defect: f64,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Check every closed-form eigenpair against the numerical oracle: the
/// eigenvalue must match a numeric one within `tol`, the eigen-residual must
/// be ≤ `tol`, and the vector must lie in the matching invariant subspace.
pub fn verify_spectrum(
    analytic: &AnalyticSpectrum,
    numeric: &NumericSpectrum,
    tol: f64,
) -> VerifyReport {
    let mut entries = Vec::with_capacity(analytic.pairs.len());
    let mut failures = Vec::new();
    for pair in &analytic.pairs {
        let hv = &numeric.h_block * &pair.vector;
        let residual = (hv - &pair.vector * C64::new(pair.value, 0.0)).norm();

        let nearest_numeric = numeric
            .values
            .iter()
            .copied()
            .min_by(|a, b| {
                (a - pair.value).abs().total_cmp(&(b - pair.value).abs())
            })
            .unwrap_or(f64::NAN);

        // project onto the numerically degenerate subspace around λ
        let mut projected = DVector::<C64>::zeros(pair.vector.len());
        for (k, &val) in numeric.values.iter().enumerate() {
            if (val - pair.value).abs() < DEGENERACY_TOL.max(tol) {
                let u = numeric.vectors.column(k);
                let coeff = u.dotc(&pair.vector);
                projected += u * coeff;
            }
        }
        let subspace_defect = (&pair.vector - projected).norm();

        let ok = residual <= tol
            && subspace_defect <= tol.max(1e3 * f64::EPSILON)
            && (nearest_numeric - pair.value).abs() <= tol;
        if !ok {
            failures.push(pair.name.clone());
        }
        entries.push(VerifyEntry {
            name: pair.name.clone(),
            eigenvalue: pair.value,
            nearest_numeric,
            residual,
            subspace_defect,
        });
    }
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    let max_subspace_defect =
        entries.iter().map(|e| e.subspace_defect).fold(0.0, f64::max);
    let pass = failures.is_empty();
    VerifyReport { entries, max_residual, max_subspace_defect, failures, pass }
}

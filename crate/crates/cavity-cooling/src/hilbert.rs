//! Truncated composite Hilbert space for two three-level atoms coupled to two
//! cavity modes, and the elementary operators acting on it.
//!
//! Basis states are labeled `|AB,CD⟩`: atom 1 (2) in level `A` (`B`) of
//! {0, 1, 2}, and `C` (`D`) photons in cavity 1 (2). The excitation number
//!
//! ```text
//! n_exc = C + D + [A = 2] + [B = 2]
//! ```
//!
//! counts photons plus atoms in the upper level; it is conserved by the
//! drive-free Hamiltonian, so the basis is ordered by excitation sector
//! (then lexicographically within a sector) and sectors occupy contiguous
//! index ranges.
//!
//! Matrix elements that would leave the truncated space are dropped. When
//! composing products of truncated operators, apply the excitation-lowering
//! factor first: `P A P B P = P A B P` only holds along paths that stay
//! inside the space.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// A product basis state `|AB,CD⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    /// Level of atom 1, in {0, 1, 2}.
    pub atom1: u8,
    /// Level of atom 2, in {0, 1, 2}.
    pub atom2: u8,
    /// Photon number in cavity 1.
    pub photons1: u32,
    /// Photon number in cavity 2.
    pub photons2: u32,
}

impl BasisLabel {
    pub fn new(atom1: u8, atom2: u8, photons1: u32, photons2: u32) -> Self {
        assert!(atom1 <= 2 && atom2 <= 2, "atom levels must be in 0..=2");
        Self { atom1, atom2, photons1, photons2 }
    }

    /// Total excitation number: photons plus atoms in level |2⟩.
    pub fn n_exc(&self) -> u32 {
        self.photons1
            + self.photons2
            + u32::from(self.atom1 == 2)
            + u32::from(self.atom2 == 2)
    }

    fn sort_key(&self) -> (u32, u8, u8, u32, u32) {
        (self.n_exc(), self.atom1, self.atom2, self.photons1, self.photons2)
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}{},{}{}⟩",
            self.atom1, self.atom2, self.photons1, self.photons2
        )
    }
}

/// Ordered, truncated tensor-product basis.
#[derive(Debug)]
pub struct HilbertSpace {
    labels: Vec<BasisLabel>,
    index: HashMap<BasisLabel, usize>,
    n_max: u32,
    e_max: Option<u32>,
}

/// Enumerate the basis with photon cutoff `n_max` per cavity and an optional
/// total-excitation cutoff `e_max`, ordered by (excitation sector,
/// lexicographic label).
pub fn build_space(n_max: u32, e_max: Option<u32>) -> Arc<HilbertSpace> {
    let mut labels = Vec::new();
    for atom1 in 0..3u8 {
        for atom2 in 0..3u8 {
            for photons1 in 0..=n_max {
                for photons2 in 0..=n_max {
                    let label = BasisLabel { atom1, atom2, photons1, photons2 };
                    if e_max.is_none_or(|e| label.n_exc() <= e) {
                        labels.push(label);
                    }
                }
            }
        }
    }
    labels.sort_by_key(BasisLabel::sort_key);
    let index = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    Arc::new(HilbertSpace { labels, index, n_max, e_max })
}

impl HilbertSpace {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn e_max(&self) -> Option<u32> {
        self.e_max
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &BasisLabel {
        &self.labels[i]
    }

    /// Index of a label, or `None` if it lies outside the truncation.
    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Basis vector for a label. Panics if the label is not in the space.
    pub fn basis_vector(&self, label: &BasisLabel) -> DVector<C64> {
        let i = self
            .index_of(label)
            .unwrap_or_else(|| panic!("label {label} not in space"));
        let mut v = DVector::zeros(self.dim());
        v[i] = C64::new(1.0, 0.0);
        v
    }

    /// Unit-norm superposition from (amplitude, label) pairs; amplitudes are
    /// taken as given (no renormalization). Unknown labels panic.
    pub fn superposition(&self, terms: &[(C64, BasisLabel)]) -> DVector<C64> {
        let mut v = DVector::zeros(self.dim());
        for (amp, label) in terms {
            let i = self
                .index_of(label)
                .unwrap_or_else(|| panic!("label {label} not in space"));
            v[i] += *amp;
        }
        v
    }
}

/// Dense complex matrix over a [`HilbertSpace`] basis.
#[derive(Debug, Clone)]
pub struct Operator {
    space: Arc<HilbertSpace>,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: Arc<HilbertSpace>, matrix: DMatrix<C64>) -> Self {
        assert_eq!(
            matrix.nrows(),
            space.dim(),
            "operator dimension must match the space"
        );
        assert_eq!(matrix.nrows(), matrix.ncols(), "operator must be square");
        Self { space, matrix }
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        let dim = space.dim();
        Self { space, matrix: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(space: Arc<HilbertSpace>) -> Self {
        let dim = space.dim();
        Self { space, matrix: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    /// max |O − O†| over all entries.
    pub fn herm_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Matrix element ⟨bra|O|ket⟩ for two basis labels.
    pub fn element(&self, bra: &BasisLabel, ket: &BasisLabel) -> C64 {
        match (self.space.index_of(bra), self.space.index_of(ket)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    /// O₁ ∘ O₂ (matrix product; O₂ acts first). Panics on space mismatch.
    pub fn compose(&self, rhs: &Operator) -> Operator {
        assert!(
            Arc::ptr_eq(&self.space, &rhs.space),
            "operators act on different spaces"
        );
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }

    pub fn add(&self, rhs: &Operator) -> Operator {
        assert!(
            Arc::ptr_eq(&self.space, &rhs.space),
            "operators act on different spaces"
        );
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator { space: self.space.clone(), matrix: &self.matrix * c }
    }

    /// self += c · rhs, in place.
    pub fn axpy(&mut self, c: C64, rhs: &Operator) {
        self.matrix.zip_apply(&rhs.matrix, |a, b| *a += c * b);
    }

    /// X + X†, the Hermitian completion of a lowering-ordered product.
    pub fn plus_dagger(&self) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + self.matrix.adjoint(),
        }
    }
}

/// Photon annihilation operator for one cavity: ⟨m−1|a|m⟩ = √m within the
/// truncation; transitions leaving the space are dropped.
pub fn annihilator(space: &Arc<HilbertSpace>, cavity: u8) -> Operator {
    assert!(cavity == 1 || cavity == 2, "cavity index must be 1 or 2");
    let mut m = DMatrix::zeros(space.dim(), space.dim());
    for (j, label) in space.labels().iter().enumerate() {
        let photons = if cavity == 1 { label.photons1 } else { label.photons2 };
        if photons == 0 {
            continue;
        }
        let mut target = *label;
        if cavity == 1 {
            target.photons1 -= 1;
        } else {
            target.photons2 -= 1;
        }
        if let Some(i) = space.index_of(&target) {
            m[(i, j)] = C64::new((photons as f64).sqrt(), 0.0);
        }
    }
    Operator::new(space.clone(), m)
}

/// Atomic transition operator |bra⟩⟨ket| on one atom (identity elsewhere),
/// truncated to the space.
pub fn atom_op(space: &Arc<HilbertSpace>, atom: u8, bra: u8, ket: u8) -> Operator {
    assert!(atom == 1 || atom == 2, "atom index must be 1 or 2");
    assert!(bra <= 2 && ket <= 2, "atom levels must be in 0..=2");
    let mut m = DMatrix::zeros(space.dim(), space.dim());
    for (j, label) in space.labels().iter().enumerate() {
        let level = if atom == 1 { label.atom1 } else { label.atom2 };
        if level != ket {
            continue;
        }
        let mut target = *label;
        if atom == 1 {
            target.atom1 = bra;
        } else {
            target.atom2 = bra;
        }
        if let Some(i) = space.index_of(&target) {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
    }
    Operator::new(space.clone(), m)
}

/// Σ_j |target⟩_j⟨2|: the collective lowering part of a drive on the
/// |target⟩ ↔ |2⟩ transition of both atoms.
pub fn collective_lowering(space: &Arc<HilbertSpace>, target: u8) -> Operator {
    atom_op(space, 1, target, 2).add(&atom_op(space, 2, target, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn l(a1: u8, a2: u8, p1: u32, p2: u32) -> BasisLabel {
        BasisLabel::new(a1, a2, p1, p2)
    }

    #[test]
    fn sixteen_state_space() {
        let space = build_space(1, Some(1));
        assert_eq!(space.dim(), 16);
        let zero_exc: Vec<_> =
            space.labels().iter().filter(|l| l.n_exc() == 0).collect();
        let one_exc: Vec<_> =
            space.labels().iter().filter(|l| l.n_exc() == 1).collect();
        assert_eq!(zero_exc.len(), 4);
        assert_eq!(one_exc.len(), 12);
        // sector ordering: first four indices are the zero-excitation labels
        for i in 0..4 {
            assert_eq!(space.label(i).n_exc(), 0);
        }
        for i in 4..16 {
            assert_eq!(space.label(i).n_exc(), 1);
        }
    }

    #[test]
    fn untruncated_space_dim() {
        assert_eq!(build_space(2, None).dim(), 81);
    }

    #[test]
    fn degenerate_cutoffs() {
        let space = build_space(0, Some(0));
        assert_eq!(space.dim(), 4);
        let expected =
            [l(0, 0, 0, 0), l(0, 1, 0, 0), l(1, 0, 0, 0), l(1, 1, 0, 0)];
        assert_eq!(space.labels(), &expected[..]);
    }

    #[test]
    fn index_is_bijective() {
        let space = build_space(2, Some(2));
        assert_eq!(space.dim(), 37);
        for (i, label) in space.labels().iter().enumerate() {
            assert_eq!(space.index_of(label), Some(i));
        }
    }

    #[test]
    fn annihilator_lowers_single_photon() {
        let space = build_space(1, Some(1));
        let a1 = annihilator(&space, 1);
        let out = a1.apply(&space.basis_vector(&l(0, 0, 1, 0)));
        let expected = space.basis_vector(&l(0, 0, 0, 0));
        assert_abs_diff_eq!((out - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn annihilator_kills_vacuum() {
        let space = build_space(1, Some(1));
        let a2 = annihilator(&space, 2);
        let out = a2.apply(&space.basis_vector(&l(0, 0, 0, 0)));
        assert_abs_diff_eq!(out.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn number_operator_eigenvalue() {
        let space = build_space(2, None);
        let a1 = annihilator(&space, 1);
        let n1 = a1.dagger().compose(&a1);
        let v = space.basis_vector(&l(0, 0, 2, 0));
        let out = n1.apply(&v);
        assert_abs_diff_eq!((out - v * C64::new(2.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn atom_op_ladder_action() {
        // |10,10⟩ → |20,10⟩ has n_exc 1 → 2: present without excitation cut,
        // dropped with e_max = 1.
        let space = build_space(1, None);
        let s = atom_op(&space, 1, 2, 1);
        let out = s.apply(&space.basis_vector(&l(1, 0, 1, 0)));
        let expected = space.basis_vector(&l(2, 0, 1, 0));
        assert_abs_diff_eq!((out - expected).norm(), 0.0, epsilon = 1e-15);

        let truncated = build_space(1, Some(1));
        let s = atom_op(&truncated, 1, 2, 1);
        let out = s.apply(&truncated.basis_vector(&l(1, 0, 1, 0)));
        assert_abs_diff_eq!(out.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn atom_op_lowering() {
        let space = build_space(1, Some(1));
        let s = atom_op(&space, 2, 0, 2);
        let out = s.apply(&space.basis_vector(&l(0, 2, 0, 0)));
        let expected = space.basis_vector(&l(0, 0, 0, 0));
        assert_abs_diff_eq!((out - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn projector_is_idempotent() {
        let space = build_space(1, Some(1));
        let p = atom_op(&space, 1, 2, 2);
        let p2 = p.compose(&p);
        let defect: f64 = (p2.matrix() - p.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(defect, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn commutator_identity_below_cutoff() {
        // [a, a†] = 1 on the photon-number-< n_max block when only the photon
        // cutoff truncates; deviations are confined to the cutoff edge.
        let space = build_space(2, None);
        let a = annihilator(&space, 1);
        let comm = a.compose(&a.dagger()).matrix()
            - a.dagger().compose(&a).matrix();
        for (j, label) in space.labels().iter().enumerate() {
            // identity below the cutoff, a known edge defect of −n_max at it
            let expected = if label.photons1 < 2 { 1.0 } else { -2.0 };
            assert_abs_diff_eq!(comm[(j, j)].re, expected, epsilon = 1e-14);
            // off-diagonals vanish everywhere
            for i in 0..space.dim() {
                if i != j {
                    assert_abs_diff_eq!(comm[(i, j)].norm(), 0.0, epsilon = 1e-14);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn atom_op_dagger_swaps_levels(
            atom in 1u8..=2,
            bra in 0u8..=2,
            ket in 0u8..=2,
            n_max in 0u32..=2,
            e_max in prop::option::of(0u32..=3),
        ) {
            let space = build_space(n_max, e_max);
            let lhs = atom_op(&space, atom, bra, ket).dagger();
            let rhs = atom_op(&space, atom, ket, bra);
            let defect: f64 = (lhs.matrix() - rhs.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            prop_assert!(defect == 0.0);
        }
    }
}

//! Lindblad master-equation dynamics.
//!
//! The state evolves under
//!
//! ```text
//! ρ̇ = −i[H(t), ρ] + κ Σ_j D[a_j]ρ + (γ/2) Σ_j Σ_{k=0,1} D[|k⟩_j⟨2|]ρ,
//! D[L]ρ = LρL† − ½{L†L, ρ},
//! ```
//!
//! i.e. six collapse channels: each cavity decays at κ and each atom's
//! |2⟩ level decays at γ/2 into each of |0⟩ and |1⟩ (total rate γ).
//!
//! Integration uses an adaptive Dormand–Prince 5(4) pair on the full
//! density matrix. The default frame rotates with the bare energies, which
//! leaves the hopping/coupling block static and reduces the laser terms to
//! phases of magnitude O(g); the lab frame is retained as a cross-check.
//! Sampled states are re-Hermitized and trace-renormalized (the applied
//! correction magnitudes are logged); internal steps are left untouched so
//! the step controller sees the honest error.
//!
//! The right-hand side is applied in two interchangeable ways: a plain dense
//! formula ([`lindblad_rhs`]), and a precomputed nonzero-entry walk of the
//! same dense operators used inside the propagator. A test pins them to each
//! other at machine precision.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hilbert::{annihilator, atom_op, HilbertSpace, Operator};
use crate::model::{drive_terms, h_nl, interaction_hamiltonian, SystemParams};
use crate::spectrum::Ground;

/// Hermitian, unit-trace, positive-semidefinite state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// |label⟩⟨label| on the given space.
    pub fn pure_label(
        space: &Arc<HilbertSpace>,
        label: &crate::hilbert::BasisLabel,
    ) -> Self {
        Self::from_pure(&space.basis_vector(label))
    }

    /// |v⟩⟨v| / ⟨v|v⟩.
    pub fn from_pure(v: &DVector<C64>) -> Self {
        let norm_sq = v.norm_squared();
        assert!(norm_sq > 0.0, "cannot form a state from the zero vector");
        let matrix = v * v.adjoint() / C64::new(norm_sq, 0.0);
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let matrix =
            DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        Self { matrix }
    }

    /// Random full-rank mixed state ρ = AA†/tr(AA†) with Gaussian A.
    pub fn random_mixed<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let m = &a * a.adjoint();
        let tr: C64 = m.diagonal().iter().sum();
        Self { matrix: m / tr }
    }

    /// Wrap a matrix after checking the state invariants.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let state = Self { matrix };
        state.validate()?;
        Ok(state)
    }

    pub fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn herm_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// ⟨v|ρ|v⟩ (real part; the defect is bounded by the Hermiticity check).
    pub fn expectation(&self, v: &DVector<C64>) -> f64 {
        v.dotc(&(&self.matrix * v)).re
    }

    /// Hermitian within 1e−10, unit trace within 1e−8, min eigenvalue
    /// ≥ −1e−8.
    pub fn validate(&self) -> Result<()> {
        let herm = self.herm_defect();
        if herm > 1e-10 {
            return Err(Error::config(format!("state not Hermitian: {herm:.3e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::config(format!("state trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-8 {
            return Err(Error::config(format!("state eigenvalue {min:.3e} < 0")));
        }
        Ok(())
    }
}

/// One collapse operator with its rate.
#[derive(Debug, Clone)]
pub struct CollapseChannel {
    pub operator: Operator,
    pub rate: f64,
}

/// The six channels of the master equation: a_1, a_2 at κ and the four
/// atomic branches |k⟩_j⟨2| at γ/2 each.
pub fn dissipators(
    space: &Arc<HilbertSpace>,
    params: &SystemParams,
) -> Vec<CollapseChannel> {
    let mut channels = Vec::with_capacity(6);
    for cavity in [1u8, 2] {
        channels.push(CollapseChannel {
            operator: annihilator(space, cavity),
            rate: params.kappa,
        });
    }
    for atom in [1u8, 2] {
        for target in [0u8, 1] {
            channels.push(CollapseChannel {
                operator: atom_op(space, atom, target, 2),
                rate: params.gamma / 2.0,
            });
        }
    }
    channels
}

/// Which frame the propagator works in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Rotating with the bare energies (default; slow phases only).
    Rotating,
    /// Laboratory frame (optical-frequency phases; cross-check mode).
    Lab,
}

/// Sparse walk data: one matrix entry (row, col, value).
type Triplet = (usize, usize, C64);

fn nonzero_triplets(m: &DMatrix<C64>) -> Vec<Triplet> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != C64::new(0.0, 0.0) {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Column → (target row, amplitude) maps for single-target collapse
/// operators (photon lowering and atomic branch operators map each basis
/// state to at most one state).
struct JumpMap {
    rate: f64,
    entries: Vec<(usize, usize, C64)>, // (source col, target row, amplitude)
}

struct DriveFast {
    omega: f64,
    phase_freq: f64,
    lowering: Vec<Triplet>,
}

/// Everything the propagator needs: the Hamiltonian pieces of the chosen
/// frame, the collapse channels, and their precomputed nonzero walks.
pub struct EvolutionContext {
    space: Arc<HilbertSpace>,
    frame: Frame,
    h_static: Operator,
    drives_fast: Vec<DriveFast>,
    channels: Vec<CollapseChannel>,
    /// h_static − (i/2) Σ rate L†L, as triplets.
    effective_static: Vec<Triplet>,
    jumps: Vec<JumpMap>,
}

impl EvolutionContext {
    pub fn new(
        space: &Arc<HilbertSpace>,
        params: &SystemParams,
        frame: Frame,
    ) -> Self {
        let channels = dissipators(space, params);
        Self::with_channels(space, params, frame, channels)
    }

    pub fn with_channels(
        space: &Arc<HilbertSpace>,
        params: &SystemParams,
        frame: Frame,
        channels: Vec<CollapseChannel>,
    ) -> Self {
        let h_static = match frame {
            Frame::Rotating => interaction_hamiltonian(space, params),
            Frame::Lab => h_nl(space, params),
        };
        let freqs = params.resolved_laser_freqs();
        let drives_fast = drive_terms(space, params)
            .into_iter()
            .map(|term| DriveFast {
                omega: term.omega,
                phase_freq: match frame {
                    Frame::Rotating => term.phase_freq,
                    Frame::Lab => freqs.get(term.laser),
                },
                lowering: nonzero_triplets(term.lowering.matrix()),
            })
            .collect();

        // fold the anticommutator into a non-Hermitian static part:
        // A = H_static − (i/2) Σ rate L†L, so that
        // −i(Aρ − ρA†) = −i[H,ρ] − ½{Σ rate L†L, ρ}
        let dim = space.dim();
        let mut damping = DMatrix::<C64>::zeros(dim, dim);
        for ch in &channels {
            let ldl = ch.operator.dagger().compose(&ch.operator);
            damping += ldl.matrix() * C64::new(ch.rate, 0.0);
        }
        let effective =
            h_static.matrix() + &damping * C64::new(0.0, -0.5);
        let effective_static = nonzero_triplets(&effective);

        let jumps = channels
            .iter()
            .map(|ch| {
                let mut entries = Vec::new();
                let m = ch.operator.matrix();
                for j in 0..dim {
                    let mut found = None;
                    for i in 0..dim {
                        let v = m[(i, j)];
                        if v != C64::new(0.0, 0.0) {
                            assert!(
                                found.is_none(),
                                "collapse operator is not single-target"
                            );
                            found = Some((j, i, v));
                        }
                    }
                    entries.extend(found);
                }
                JumpMap { rate: ch.rate, entries }
            })
            .collect();

        Self {
            space: space.clone(),
            frame,
            h_static,
            drives_fast,
            channels,
            effective_static,
            jumps,
        }
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn channels(&self) -> &[CollapseChannel] {
        &self.channels
    }

    /// Dense Hamiltonian of the chosen frame at time `t`.
    pub fn hamiltonian(&self, t: f64) -> Operator {
        let mut h = self.h_static.clone();
        for drive in &self.drives_fast {
            let c = C64::new(0.0, drive.phase_freq * t).exp() * drive.omega;
            for &(i, j, v) in &drive.lowering {
                h.matrix_mut()[(i, j)] += c * v;
                h.matrix_mut()[(j, i)] += (c * v).conj();
            }
        }
        h
    }

    /// out += ρ̇(t, ρ), via the precomputed nonzero walks.
    fn accumulate_rhs(&self, t: f64, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = rho.nrows();
        let minus_i = C64::new(0.0, -1.0);
        let plus_i = C64::new(0.0, 1.0);

        // −i (A ρ − ρ A†): an entry A_{p,q} = w contributes
        //   out[p, :] += −i w ρ[q, :]   and   out[:, p] += +i w̄ ρ[:, q]
        for &(i, j, v) in &self.effective_static {
            let w = minus_i * v;
            let wc = plus_i * v.conj();
            for c in 0..n {
                out[(i, c)] += w * rho[(j, c)];
            }
            for r in 0..n {
                out[(r, i)] += wc * rho[(r, j)];
            }
        }
        // drives are Hermitian: entries c·B + c̄·B† with B the lowering part
        for drive in &self.drives_fast {
            let c = C64::new(0.0, drive.phase_freq * t).exp() * drive.omega;
            for &(i, j, b) in &drive.lowering {
                for &(p, q, w) in &[(i, j, c * b), (j, i, (c * b).conj())] {
                    let wm = minus_i * w;
                    let wc = plus_i * w.conj();
                    for col in 0..n {
                        out[(p, col)] += wm * rho[(q, col)];
                    }
                    for r in 0..n {
                        out[(r, p)] += wc * rho[(r, q)];
                    }
                }
            }
        }
        // Σ rate L ρ L†
        for jump in &self.jumps {
            let rate = C64::new(jump.rate, 0.0);
            for &(s1, t1, a1) in &jump.entries {
                let w1 = rate * a1;
                for &(s2, t2, a2) in &jump.entries {
                    out[(t1, t2)] += w1 * a2.conj() * rho[(s1, s2)];
                }
            }
        }
    }
}

/// Reference dense evaluation of the master-equation right-hand side:
/// −i[H(t), ρ] + Σ_c rate_c (LρL† − ½{L†L, ρ}).
pub fn lindblad_rhs(
    rho: &DMatrix<C64>,
    t: f64,
    ctx: &EvolutionContext,
) -> DMatrix<C64> {
    assert_eq!(rho.nrows(), ctx.space.dim(), "state dimension mismatch");
    let h = ctx.hamiltonian(t);
    let h = h.matrix();
    let mut out = (h * rho - rho * h) * C64::new(0.0, -1.0);
    for ch in &ctx.channels {
        let l = ch.operator.matrix();
        let ldag = l.adjoint();
        let ldl = &ldag * l;
        let sandwich = l * rho * &ldag;
        let anti = (&ldl * rho + rho * &ldl) * C64::new(0.5, 0.0);
        out += (sandwich - anti) * C64::new(ch.rate, 0.0);
    }
    out
}

/// Step-size and tolerance settings for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

impl Default for IntegratorOpts {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-10, max_step: 1.0 }
    }
}

/// Time series of sampled states with the corrections applied at each
/// sample.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// |tr ρ − 1| before renormalization, per sample.
    pub trace_corrections: Vec<f64>,
    /// max |ρ − ρ†| before re-Hermitization, per sample.
    pub herm_corrections: Vec<f64>,
    /// Set when any pre-correction trace error exceeded 1e−6.
    pub flagged: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory has at least the initial sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial sample")
    }
}

// Dormand–Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a> {
    ctx: &'a EvolutionContext,
    opts: IntegratorOpts,
    k: Vec<DMatrix<C64>>,
    ytmp: DMatrix<C64>,
    yerr: DMatrix<C64>,
    h: f64,
    /// FSAL: k[6] of an accepted step is the next step's k[0].
    fresh_k0: bool,
}

fn scaled_rms(
    opts: &IntegratorOpts,
    y0: &DMatrix<C64>,
    y1: &DMatrix<C64>,
    err: &DMatrix<C64>,
) -> f64 {
    let mut acc = 0.0;
    for ((e, a), b) in err.iter().zip(y0.iter()).zip(y1.iter()) {
        let scale = opts.abs_tol + opts.rel_tol * a.norm().max(b.norm());
        let r = e.norm() / scale;
        acc += r * r;
    }
    (acc / (y0.len() as f64)).sqrt()
}

impl<'a> Stepper<'a> {
    fn new(ctx: &'a EvolutionContext, opts: IntegratorOpts) -> Self {
        let n = ctx.space.dim();
        Self {
            ctx,
            opts,
            k: (0..7).map(|_| DMatrix::zeros(n, n)).collect(),
            ytmp: DMatrix::zeros(n, n),
            yerr: DMatrix::zeros(n, n),
            h: (opts.max_step / 16.0).min(1e-3),
            fresh_k0: false,
        }
    }

    /// Advance `y` in place from `t` to exactly `t_target`.
    fn advance(
        &mut self,
        y: &mut DMatrix<C64>,
        t: &mut f64,
        t_target: f64,
    ) -> Result<()> {
        const MAX_REJECTS: usize = 60;
        let zero = C64::new(0.0, 0.0);
        let Self { ctx, opts, k, ytmp, yerr, h: h_next, fresh_k0 } = self;
        while *t < t_target {
            let mut h = h_next.min(opts.max_step).min(t_target - *t);
            let mut rejects = 0;
            loop {
                if !h.is_finite() || h < 1e-13 * t_target.max(1.0) {
                    return Err(Error::Integration {
                        t: *t,
                        reason: format!("step size underflow (h = {h:.3e})"),
                    });
                }
                if !*fresh_k0 {
                    k[0].fill(zero);
                    ctx.accumulate_rhs(*t, y, &mut k[0]);
                }
                for stage in 1..7 {
                    ytmp.copy_from(y);
                    for (j, &a) in DP_A[stage - 1].iter().enumerate() {
                        if a != 0.0 {
                            let c = C64::new(h * a, 0.0);
                            ytmp.zip_apply(&k[j], |e, kj| *e += c * kj);
                        }
                    }
                    k[stage].fill(zero);
                    let (pre, post) = k.split_at_mut(stage);
                    let _ = pre;
                    ctx.accumulate_rhs(*t + DP_C[stage] * h, ytmp, &mut post[0]);
                }
                // 5th-order solution and embedded error estimate
                ytmp.copy_from(y);
                yerr.fill(zero);
                for j in 0..7 {
                    if DP_B5[j] != 0.0 {
                        let c = C64::new(h * DP_B5[j], 0.0);
                        ytmp.zip_apply(&k[j], |e, kj| *e += c * kj);
                    }
                    let d = DP_B5[j] - DP_B4[j];
                    if d != 0.0 {
                        let c = C64::new(h * d, 0.0);
                        yerr.zip_apply(&k[j], |e, kj| *e += c * kj);
                    }
                }
                let norm = scaled_rms(opts, y, ytmp, yerr);
                if !norm.is_finite() {
                    return Err(Error::Integration {
                        t: *t,
                        reason: "non-finite error estimate".into(),
                    });
                }
                if norm <= 1.0 {
                    *t += h;
                    std::mem::swap(y, ytmp);
                    // FSAL: stage 6 was evaluated at (t + h, y_new)
                    k.swap(0, 6);
                    *fresh_k0 = true;
                    let factor = if norm == 0.0 {
                        5.0
                    } else {
                        (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    *h_next = (h * factor).min(opts.max_step);
                    break;
                }
                rejects += 1;
                if rejects > MAX_REJECTS {
                    return Err(Error::Integration {
                        t: *t,
                        reason: "too many rejected steps".into(),
                    });
                }
                h *= (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
                *fresh_k0 = true; // k[0] still valid at the unchanged (t, y)
            }
        }
        // the last step was clipped to the boundary; snap off the rounding
        *t = t_target;
        Ok(())
    }

    /// The evolving state was modified externally; k[0] must be recomputed.
    fn invalidate(&mut self) {
        self.fresh_k0 = false;
    }
}

/// Integrate the master equation from `rho0` to `t_final`, sampling every
/// `sample_step` (the final time is always sampled). Each sampled state is
/// re-Hermitized and trace-renormalized in place, with the correction
/// magnitudes logged.
pub fn evolve(
    rho0: &DensityMatrix,
    t_final: f64,
    sample_step: f64,
    ctx: &EvolutionContext,
    opts: &IntegratorOpts,
) -> Result<Trajectory> {
    assert!(t_final > 0.0, "t_final must be positive");
    assert!(sample_step > 0.0, "sample_step must be positive");
    let mut y = rho0.matrix().clone();
    let mut t = 0.0;
    let mut stepper = Stepper::new(ctx, *opts);

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut trace_corrections = vec![(rho0.trace() - 1.0).abs()];
    let mut herm_corrections = vec![rho0.herm_defect()];

    let n_samples = (t_final / sample_step).ceil() as usize;
    for s in 1..=n_samples {
        let target = (s as f64 * sample_step).min(t_final);
        stepper.advance(&mut y, &mut t, target)?;

        let trace_err = {
            let tr: f64 = y.diagonal().iter().map(|z| z.re).sum();
            (tr - 1.0).abs()
        };
        let herm_err = {
            let adj = y.adjoint();
            (&y - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
        };
        // re-Hermitize and renormalize the evolving state at the sample
        let herm = (&y + y.adjoint()) * C64::new(0.5, 0.0);
        let tr: f64 = herm.diagonal().iter().map(|z| z.re).sum();
        y = herm / C64::new(tr, 0.0);
        stepper.invalidate();

        times.push(t);
        states.push(DensityMatrix::from_matrix_unchecked(y.clone()));
        trace_corrections.push(trace_err);
        herm_corrections.push(herm_err);

        if t >= t_final {
            break;
        }
    }
    let flagged = trace_corrections.iter().any(|&e| e > 1e-6);
    Ok(Trajectory { times, states, trace_corrections, herm_corrections, flagged })
}

/// Convergence test for [`steady_state_reach`].
///
/// Under the three-tone drive the attractor is quasi-periodic, not
/// constant: at the working point the ground populations keep oscillating
/// with amplitude ~2e-3 indefinitely. An `eps` tighter than that floor
/// reports non-convergence.
#[derive(Debug, Clone, Copy)]
pub struct SteadyStateCriterion {
    /// Bound on both the window-averaged generator norm and the
    /// ground-population drift.
    pub eps: f64,
    /// Trailing window length (units of 1/g).
    pub window: f64,
    /// Give up beyond this time.
    pub time_cap: f64,
}

impl Default for SteadyStateCriterion {
    fn default() -> Self {
        Self { eps: 5e-3, window: 150.0, time_cap: 4000.0 }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyStateOutcome {
    pub state: DensityMatrix,
    pub time: f64,
    pub converged: bool,
    /// max ground-population spread over the trailing window at exit.
    pub final_drift: f64,
    /// ‖ρ(t) − ρ(t − window)‖_max / window at exit: the window-averaged
    /// master-equation norm (the instantaneous norm never vanishes under
    /// the oscillating drive).
    pub final_rhs_norm: f64,
}

/// Evolve until the state is (quasi-)stationary: an exactly stationary
/// initial state returns immediately; otherwise convergence requires both
/// the window-averaged generator norm and the trailing ground-population
/// drift to fall below `criterion.eps`. Exceeding the time cap reports
/// non-convergence rather than failing.
pub fn steady_state_reach(
    rho0: &DensityMatrix,
    ctx: &EvolutionContext,
    criterion: &SteadyStateCriterion,
    opts: &IntegratorOpts,
) -> Result<SteadyStateOutcome> {
    assert!(criterion.eps > 0.0, "eps must be positive");
    // exact stationarity test at t = 0
    let rhs0 = lindblad_rhs(rho0.matrix(), 0.0, ctx);
    let rhs0_norm = rhs0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if rhs0_norm <= criterion.eps {
        return Ok(SteadyStateOutcome {
            state: rho0.clone(),
            time: 0.0,
            converged: true,
            final_drift: 0.0,
            final_rhs_norm: rhs0_norm,
        });
    }

    let ground_vectors: Vec<DVector<C64>> =
        Ground::ALL.iter().map(|gs| gs.vector(ctx.space())).collect();
    let pops = |m: &DMatrix<C64>| -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, v) in out.iter_mut().zip(&ground_vectors) {
            *o = v.dotc(&(m * v)).re;
        }
        out
    };

    let check_step = criterion.window / 4.0;
    let samples_per_window = 4usize;
    let mut window_pops: Vec<[f64; 4]> = vec![pops(rho0.matrix())];
    let mut window_states: Vec<DMatrix<C64>> = vec![rho0.matrix().clone()];

    let mut y = rho0.matrix().clone();
    let mut t = 0.0;
    let mut stepper = Stepper::new(ctx, *opts);
    let mut final_drift = f64::INFINITY;
    let mut final_rhs_norm = f64::INFINITY;

    while t < criterion.time_cap {
        let target = (t + check_step).min(criterion.time_cap);
        stepper.advance(&mut y, &mut t, target)?;
        let herm = (&y + y.adjoint()) * C64::new(0.5, 0.0);
        let tr: f64 = herm.diagonal().iter().map(|z| z.re).sum();
        y = herm / C64::new(tr, 0.0);
        stepper.invalidate();

        window_pops.push(pops(&y));
        window_states.push(y.clone());
        if window_states.len() > samples_per_window + 1 {
            window_pops.remove(0);
            window_states.remove(0);
        }

        if window_states.len() == samples_per_window + 1 {
            let oldest = &window_states[0];
            final_rhs_norm = (&y - oldest)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
                / criterion.window;
            final_drift = (0..4)
                .map(|i| {
                    let lo =
                        window_pops.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
                    let hi = window_pops
                        .iter()
                        .map(|p| p[i])
                        .fold(f64::NEG_INFINITY, f64::max);
                    hi - lo
                })
                .fold(0.0, f64::max);
            if final_rhs_norm <= criterion.eps && final_drift <= criterion.eps {
                return Ok(SteadyStateOutcome {
                    state: DensityMatrix::from_matrix_unchecked(y),
                    time: t,
                    converged: true,
                    final_drift,
                    final_rhs_norm,
                });
            }
        }
    }
    Ok(SteadyStateOutcome {
        state: DensityMatrix::from_matrix_unchecked(y),
        time: t,
        converged: false,
        final_drift,
        final_rhs_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_space, BasisLabel};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l(a1: u8, a2: u8, p1: u32, p2: u32) -> BasisLabel {
        BasisLabel::new(a1, a2, p1, p2)
    }

    fn decay_only_params() -> SystemParams {
        SystemParams {
            w1: 8.0,
            w2: 18.0,
            g: 0.0,
            j: 0.0,
            kappa: 0.1,
            gamma: 0.2,
            omega: [0.0; 3],
            laser_freqs: Some(crate::model::LaserFrequencies {
                wl1: 17.0,
                wl2: 19.0,
                wl3: 9.0,
            }),
        }
    }

    #[test]
    fn six_channels() {
        let space = build_space(1, Some(1));
        let params = SystemParams::working_point();
        assert_eq!(dissipators(&space, &params).len(), 6);
    }

    #[test]
    fn rhs_is_traceless_and_hermiticity_preserving() {
        let space = build_space(1, Some(1));
        let params = SystemParams::working_point();
        let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for t in [0.0, 0.4, 3.3] {
            let rho = DensityMatrix::random_mixed(space.dim(), &mut rng);
            let d = lindblad_rhs(rho.matrix(), t, &ctx);
            let tr: C64 = d.diagonal().iter().sum();
            assert_abs_diff_eq!(tr.norm(), 0.0, epsilon = 1e-13);
            let herm = (&d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert_abs_diff_eq!(herm, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn fast_walk_matches_dense_reference() {
        let space = build_space(2, Some(2));
        let params = SystemParams::working_point();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for frame in [Frame::Rotating, Frame::Lab] {
            let ctx = EvolutionContext::new(&space, &params, frame);
            for t in [0.0, 0.9, 7.7] {
                let rho = DensityMatrix::random_mixed(space.dim(), &mut rng);
                let dense = lindblad_rhs(rho.matrix(), t, &ctx);
                let mut fast = DMatrix::zeros(space.dim(), space.dim());
                ctx.accumulate_rhs(t, rho.matrix(), &mut fast);
                let defect =
                    (&dense - &fast).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(defect < 1e-13, "frame {frame:?}, t = {t}: {defect}");
            }
        }
    }

    #[test]
    fn dark_states_are_stationary() {
        let space = build_space(1, Some(1));
        let mut params = SystemParams::working_point();
        params.omega = [0.0; 3];
        let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
        for state in [
            DensityMatrix::pure_label(&space, &l(0, 0, 0, 0)),
            DensityMatrix::from_pure(&Ground::T.vector(&space)),
        ] {
            let d = lindblad_rhs(state.matrix(), 0.0, &ctx);
            let norm = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert_abs_diff_eq!(norm, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn excited_atom_decays_at_gamma() {
        // with g = Ω = 0 the |2⟩ population decays as e^{−γt}
        let space = build_space(1, Some(1));
        let params = decay_only_params();
        let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
        let rho0 = DensityMatrix::pure_label(&space, &l(2, 0, 0, 0));
        let traj =
            evolve(&rho0, 10.0, 2.5, &ctx, &IntegratorOpts::default()).unwrap();
        let idx = space.index_of(&l(2, 0, 0, 0)).unwrap();
        for (t, state) in traj.times.iter().zip(&traj.states) {
            let p = state.matrix()[(idx, idx)].re;
            assert_abs_diff_eq!(p, (-params.gamma * t).exp(), epsilon = 1e-7);
        }
    }

    #[test]
    fn photon_decays_at_kappa_with_unit_trace() {
        let space = build_space(1, Some(1));
        let params = decay_only_params();
        let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
        let rho0 = DensityMatrix::pure_label(&space, &l(0, 0, 1, 0));
        let traj =
            evolve(&rho0, 40.0, 10.0, &ctx, &IntegratorOpts::default()).unwrap();
        let idx = space.index_of(&l(0, 0, 1, 0)).unwrap();
        let vac = space.index_of(&l(0, 0, 0, 0)).unwrap();
        for (t, state) in traj.times.iter().zip(&traj.states) {
            assert_abs_diff_eq!(state.trace(), 1.0, epsilon = 1e-9);
            let p = state.matrix()[(idx, idx)].re;
            assert_abs_diff_eq!(p, (-params.kappa * t).exp(), epsilon = 1e-6);
        }
        let p_vac = traj.final_state().matrix()[(vac, vac)].re;
        assert!(p_vac > 0.98, "vacuum population {p_vac}");
    }

    #[test]
    fn sampled_states_satisfy_invariants() {
        let space = build_space(1, Some(1));
        let params = SystemParams::working_point();
        let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
        let rho0 = DensityMatrix::pure_label(&space, &l(0, 0, 0, 0));
        let traj =
            evolve(&rho0, 60.0, 15.0, &ctx, &IntegratorOpts::default()).unwrap();
        assert!(!traj.flagged);
        for state in &traj.states {
            state.validate().unwrap();
        }
    }

    #[test]
    fn frames_agree_on_ground_populations() {
        let space = build_space(1, Some(1));
        let params = SystemParams::working_point();
        let rho0 = DensityMatrix::pure_label(&space, &l(0, 0, 0, 0));
        let opts = IntegratorOpts::default();
        let rot = evolve(
            &rho0,
            30.0,
            30.0,
            &EvolutionContext::new(&space, &params, Frame::Rotating),
            &opts,
        )
        .unwrap();
        let lab = evolve(
            &rho0,
            30.0,
            30.0,
            &EvolutionContext::new(&space, &params, Frame::Lab),
            &opts,
        )
        .unwrap();
        for gs in Ground::ALL {
            let v = gs.vector(&space);
            let a = rot.final_state().expectation(&v);
            let b = lab.final_state().expectation(&v);
            assert_abs_diff_eq!(a, b, epsilon = 1e-5);
        }
    }

    #[test]
    fn stationary_state_converges_immediately() {
        let space = build_space(1, Some(1));
        let mut params = SystemParams::working_point();
        params.omega = [0.0; 3];
        let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
        let rho0 = DensityMatrix::from_pure(&Ground::T.vector(&space));
        let out = steady_state_reach(
            &rho0,
            &ctx,
            &SteadyStateCriterion::default(),
            &IntegratorOpts::default(),
        )
        .unwrap();
        assert!(out.converged);
        assert_eq!(out.time, 0.0);
    }

    #[test]
    fn pure_decay_reaches_vacuum_steady_state() {
        let space = build_space(1, Some(1));
        let params = decay_only_params();
        let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
        let rho0 = DensityMatrix::pure_label(&space, &l(0, 0, 1, 0));
        let crit = SteadyStateCriterion { eps: 1e-6, window: 20.0, time_cap: 500.0 };
        let out =
            steady_state_reach(&rho0, &ctx, &crit, &IntegratorOpts::default())
                .unwrap();
        assert!(out.converged);
        let vac = space.index_of(&l(0, 0, 0, 0)).unwrap();
        assert!(out.state.matrix()[(vac, vac)].re > 0.999);
    }

    #[test]
    fn state_validation_catches_bad_inputs() {
        let dim = 4;
        let mut m = DMatrix::<C64>::identity(dim, dim);
        assert!(DensityMatrix::from_matrix(m.clone()).is_err()); // trace 4
        m /= C64::new(dim as f64, 0.0);
        assert!(DensityMatrix::from_matrix(m.clone()).is_ok());
        m[(0, 1)] = C64::new(0.4, 0.2); // not Hermitian
        assert!(DensityMatrix::from_matrix(m).is_err());
    }

    #[test]
    fn random_mixed_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = DensityMatrix::random_mixed(16, &mut rng);
        rho.validate().unwrap();
        assert!(rho.min_eigenvalue() > 0.0);
    }
}

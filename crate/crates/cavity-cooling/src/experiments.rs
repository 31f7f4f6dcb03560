//! Observables and the figure-level experiment harness: ground-state
//! populations, target fidelity, the hopping/drive and γ/κ sweeps, the
//! time-resolved cooling runs, analytic transition scans, and static
//! parameter-fluctuation studies.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    evolve, DensityMatrix, EvolutionContext, Frame, IntegratorOpts, Trajectory,
};
use crate::error::Result;
use crate::hilbert::{build_space, HilbertSpace};
use crate::model::SystemParams;
use crate::spectrum::Ground;
use crate::transitions::{suppression_ratio, target_detunings, SuppressionRow};

/// Basis truncation for production runs: photon cutoff 2 per cavity and at
/// most two total excitations (37 states). `e_max = Some(1)` gives the fast
/// 16-state mode; `e_max = None` the untruncated 81-state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpaceSpec {
    pub n_max: u32,
    pub e_max: Option<u32>,
}

impl Default for SpaceSpec {
    fn default() -> Self {
        Self { n_max: 2, e_max: Some(2) }
    }
}

impl SpaceSpec {
    pub fn build(&self) -> Arc<HilbertSpace> {
        build_space(self.n_max, self.e_max)
    }
}

/// Populations of the four dressed ground states plus everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundPopulations {
    pub p_t: f64,
    pub p_s: f64,
    pub p_00: f64,
    pub p_11: f64,
    pub p_excited: f64,
}

impl GroundPopulations {
    /// |p_T + p_S + p_00 + p_11 + p_excited − 1|, identically 0 by
    /// construction up to the trace error of ρ.
    pub fn closure_defect(&self) -> f64 {
        (self.p_t + self.p_s + self.p_00 + self.p_11 + self.p_excited - 1.0).abs()
    }
}

pub fn ground_populations(
    rho: &DensityMatrix,
    space: &Arc<HilbertSpace>,
) -> GroundPopulations {
    let p = |gs: Ground| rho.expectation(&gs.vector(space));
    let p_t = p(Ground::T);
    let p_s = p(Ground::S);
    let p_00 = p(Ground::Phi00);
    let p_11 = p(Ground::Phi11);
    GroundPopulations {
        p_t,
        p_s,
        p_00,
        p_11,
        p_excited: rho.trace() - p_t - p_s - p_00 - p_11,
    }
}

/// Overlap ⟨T,00|ρ|T,00⟩ with the maximally entangled target.
pub fn fidelity_target(rho: &DensityMatrix, space: &Arc<HilbertSpace>) -> f64 {
    rho.expectation(&Ground::T.vector(space))
}

/// Solve C = g²/(κγ) with γ = ratio·κ for the two rates.
pub fn cooperativity_to_rates(c: f64, gamma_over_kappa: f64, g: f64) -> (f64, f64) {
    assert!(c > 0.0 && gamma_over_kappa > 0.0 && g > 0.0);
    let kappa = g / (c * gamma_over_kappa).sqrt();
    (kappa, gamma_over_kappa * kappa)
}

/// Initial states for the cooling runs.
#[derive(Debug, Clone, Copy)]
pub enum InitialState {
    /// |00,00⟩⟨00,00| (the default start).
    Vacuum,
    /// |T,00⟩⟨T,00| (already the target).
    Target,
    /// Full-rank seeded random mixed state.
    RandomMixed { seed: u64 },
}

impl InitialState {
    pub fn label(&self) -> String {
        match self {
            InitialState::Vacuum => "vacuum".into(),
            InitialState::Target => "target".into(),
            InitialState::RandomMixed { seed } => format!("random_seed{seed}"),
        }
    }

    pub fn materialize(&self, space: &Arc<HilbertSpace>) -> DensityMatrix {
        match self {
            InitialState::Vacuum => {
                DensityMatrix::from_pure(&Ground::Phi00.vector(space))
            }
            InitialState::Target => {
                DensityMatrix::from_pure(&Ground::T.vector(space))
            }
            InitialState::RandomMixed { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                DensityMatrix::random_mixed(space.dim(), &mut rng)
            }
        }
    }
}

/// Parameters, truncation, and integrator settings echoed into every sweep
/// result and manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub w1: f64,
    pub w2: f64,
    pub g: f64,
    pub j: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub wl1: f64,
    pub wl2: f64,
    pub wl3: f64,
    pub n_max: u32,
    pub e_max: Option<u32>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub gt_final: f64,
    pub seed: Option<u64>,
    pub wall_clock_s: f64,
    pub grids: BTreeMap<String, String>,
}

impl RunMetadata {
    pub fn new(
        params: &SystemParams,
        space: SpaceSpec,
        opts: &IntegratorOpts,
        gt_final: f64,
    ) -> Self {
        let freqs = params.resolved_laser_freqs();
        Self {
            w1: params.w1,
            w2: params.w2,
            g: params.g,
            j: params.j,
            kappa: params.kappa,
            gamma: params.gamma,
            omega1: params.omega[0],
            omega2: params.omega[1],
            omega3: params.omega[2],
            wl1: freqs.wl1,
            wl2: freqs.wl2,
            wl3: freqs.wl3,
            n_max: space.n_max,
            e_max: space.e_max,
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            max_step: opts.max_step,
            gt_final,
            seed: None,
            wall_clock_s: 0.0,
            grids: BTreeMap::new(),
        }
    }
}

/// One named sweep axis.
#[derive(Debug, Clone, Serialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Grid-sweep output: `values` is row-major over the axes product, with
/// `None` marking points whose evaluation failed (the failure text is kept
/// in `errors`).
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    pub values: Vec<Option<f64>>,
    pub errors: Vec<(usize, String)>,
    pub metadata: RunMetadata,
}

impl SweepResult {
    pub fn value_at(&self, indices: &[usize]) -> Option<f64> {
        assert_eq!(indices.len(), self.axes.len());
        let mut flat = 0;
        for (i, axis) in indices.iter().zip(&self.axes) {
            assert!(*i < axis.values.len());
            flat = flat * axis.values.len() + i;
        }
        self.values[flat]
    }

    /// Coordinates of the largest value (1-D sweeps).
    pub fn argmax(&self) -> Option<(f64, f64)> {
        assert_eq!(self.axes.len(), 1, "argmax is for 1-D sweeps");
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (self.axes[0].values[i], v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Grid points whose value reaches `threshold` (2-D sweeps).
    pub fn plateau(&self, threshold: f64) -> Vec<(f64, f64)> {
        assert_eq!(self.axes.len(), 2, "plateau is for 2-D sweeps");
        let n1 = self.axes[1].values.len();
        self.values
            .iter()
            .enumerate()
            .filter_map(|(flat, v)| match v {
                Some(v) if *v >= threshold => Some((
                    self.axes[0].values[flat / n1],
                    self.axes[1].values[flat % n1],
                )),
                _ => None,
            })
            .collect()
    }
}

/// Evolve from `initial` and return the target fidelity at `gt_final`.
pub fn final_fidelity(
    params: &SystemParams,
    space_spec: SpaceSpec,
    initial: InitialState,
    gt_final: f64,
    opts: &IntegratorOpts,
) -> Result<f64> {
    params.validate()?;
    let space = space_spec.build();
    let ctx = EvolutionContext::new(&space, params, Frame::Rotating);
    let rho0 = initial.materialize(&space);
    let sample_step = (gt_final / 10.0).max(1.0);
    let traj = evolve(&rho0, gt_final, sample_step, &ctx, opts)?;
    Ok(fidelity_target(traj.final_state(), &space))
}

/// Time-resolved cooling runs: one trajectory per initial state, sampled
/// densely enough to plot populations versus gt.
pub fn run_fig5(
    params: &SystemParams,
    initial_states: &[InitialState],
    space_spec: SpaceSpec,
    gt_final: f64,
    sample_step: f64,
    opts: &IntegratorOpts,
) -> Result<Vec<(String, Trajectory)>> {
    params.validate()?;
    let space = space_spec.build();
    let ctx = EvolutionContext::new(&space, params, Frame::Rotating);
    initial_states
        .par_iter()
        .map(|init| {
            let rho0 = init.materialize(&space);
            let traj = evolve(&rho0, gt_final, sample_step, &ctx, opts)?;
            Ok((init.label(), traj))
        })
        .collect()
}

/// Population of |T,00⟩ at a finite time over a (J, Ω) grid, from vacuum.
/// Per-point failures become holes, never zeros.
pub fn sweep_fig4a(
    j_grid: &[f64],
    omega_grid: &[f64],
    params: &SystemParams,
    gt_final: f64,
    space_spec: SpaceSpec,
    opts: &IntegratorOpts,
) -> SweepResult {
    assert!(!j_grid.is_empty() && !omega_grid.is_empty());
    let start = Instant::now();
    let points: Vec<(usize, f64, f64)> = j_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &j)| {
            omega_grid
                .iter()
                .enumerate()
                .map(move |(k, &om)| (i * omega_grid.len() + k, j, om))
        })
        .collect();
    let outcomes: Vec<(usize, std::result::Result<f64, String>)> = points
        .par_iter()
        .map(|&(flat, j, om)| {
            let mut p = params.clone();
            p.j = j;
            p.omega = [om; 3];
            let r = final_fidelity(&p, space_spec, InitialState::Vacuum, gt_final, opts)
                .map_err(|e| e.to_string());
            (flat, r)
        })
        .collect();

    let mut values = vec![None; points.len()];
    let mut errors = Vec::new();
    for (flat, outcome) in outcomes {
        match outcome {
            Ok(v) => values[flat] = Some(v),
            Err(e) => errors.push((flat, e)),
        }
    }
    let mut metadata = RunMetadata::new(params, space_spec, opts, gt_final);
    metadata.wall_clock_s = start.elapsed().as_secs_f64();
    metadata.grids.insert("j_grid".into(), grid_echo(j_grid));
    metadata.grids.insert("omega_grid".into(), grid_echo(omega_grid));
    SweepResult {
        axes: vec![
            Axis { name: "J_over_g".into(), values: j_grid.to_vec() },
            Axis { name: "Omega_over_g".into(), values: omega_grid.to_vec() },
        ],
        values,
        errors,
        metadata,
    }
}

/// Fidelity of |T,00⟩ versus γ/κ at fixed cooperativity, from vacuum.
pub fn sweep_fig4b(
    ratio_grid: &[f64],
    cooperativity: f64,
    params: &SystemParams,
    gt_final: f64,
    space_spec: SpaceSpec,
    opts: &IntegratorOpts,
) -> SweepResult {
    assert!(!ratio_grid.is_empty());
    let start = Instant::now();
    let outcomes: Vec<std::result::Result<f64, String>> = ratio_grid
        .par_iter()
        .map(|&ratio| {
            let (kappa, gamma) = cooperativity_to_rates(cooperativity, ratio, params.g);
            let mut p = params.clone();
            p.kappa = kappa;
            p.gamma = gamma;
            final_fidelity(&p, space_spec, InitialState::Vacuum, gt_final, opts)
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut values = vec![None; ratio_grid.len()];
    let mut errors = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(v) => values[i] = Some(v),
            Err(e) => errors.push((i, e)),
        }
    }
    let mut metadata = RunMetadata::new(params, space_spec, opts, gt_final);
    metadata.wall_clock_s = start.elapsed().as_secs_f64();
    metadata.grids.insert("ratio_grid".into(), grid_echo(ratio_grid));
    metadata
        .grids
        .insert("cooperativity".into(), format!("{cooperativity}"));
    SweepResult {
        axes: vec![Axis { name: "gamma_over_kappa".into(), values: ratio_grid.to_vec() }],
        values,
        errors,
        metadata,
    }
}

/// Which parameter a fluctuation study perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbTarget {
    /// Photon hopping J. The laser frequencies follow the perturbed J
    /// unless they were pinned explicitly on the input parameters.
    Hopping,
    /// The Rabi frequencies, fluctuating independently per laser.
    Rabi,
}

#[derive(Debug, Clone, Copy)]
pub struct Perturbation {
    pub target: PerturbTarget,
    pub relative_size: f64,
}

#[derive(Debug, Clone)]
pub struct RobustnessVariant {
    pub label: String,
    pub fidelity: f64,
    pub delta_f: f64,
}

#[derive(Debug, Clone)]
pub struct RobustnessReport {
    pub nominal_fidelity: f64,
    pub variants: Vec<RobustnessVariant>,
    /// max |ΔF| over the fluctuation band.
    pub worst_delta: f64,
    /// ΔF of the uniform +relative_size offset (every perturbed component
    /// scaled by 1 + r).
    pub plus_delta: f64,
    pub metadata: RunMetadata,
}

/// Fidelity change under static parameter offsets of ±`relative_size`.
///
/// For J the two endpoint offsets are evaluated. The three Rabi frequencies
/// come from independent sources, so their fluctuation band is the cube of
/// per-laser offsets; the eight sign corners are evaluated and the worst
/// taken. A uniform common-mode Ω rescaling alone largely cancels out of the
/// pump/repump balance and understates the sensitivity.
pub fn robustness(
    params: &SystemParams,
    perturbation: &Perturbation,
    gt_final: f64,
    space_spec: SpaceSpec,
    opts: &IntegratorOpts,
) -> Result<RobustnessReport> {
    assert!(perturbation.relative_size >= 0.0);
    let start = Instant::now();
    let r = perturbation.relative_size;

    let mut cases: Vec<(String, SystemParams)> = Vec::new();
    match perturbation.target {
        PerturbTarget::Hopping => {
            for sign in [1.0, -1.0] {
                let mut p = params.clone();
                p.j = params.j * (1.0 + sign * r);
                let tag = if sign > 0.0 { "+" } else { "-" };
                cases.push((format!("J*(1{tag}{r})"), p));
            }
        }
        PerturbTarget::Rabi => {
            for corner in 0..8u8 {
                let signs = [
                    if corner & 1 == 0 { 1.0 } else { -1.0 },
                    if corner & 2 == 0 { 1.0 } else { -1.0 },
                    if corner & 4 == 0 { 1.0 } else { -1.0 },
                ];
                let mut p = params.clone();
                for (o, s) in p.omega.iter_mut().zip(signs) {
                    *o *= 1.0 + s * r;
                }
                let label = signs
                    .iter()
                    .map(|&s| if s > 0.0 { '+' } else { '-' })
                    .collect::<String>();
                cases.push((format!("Omega*({label})"), p));
            }
        }
    }
    // degenerate offsets collapse onto the nominal point
    if r == 0.0 {
        cases.dedup_by(|a, b| a.1 == b.1);
    }

    let nominal = final_fidelity(params, space_spec, InitialState::Vacuum, gt_final, opts)?;
    let fidelities: Vec<Result<f64>> = cases
        .par_iter()
        .map(|(_, p)| {
            final_fidelity(p, space_spec, InitialState::Vacuum, gt_final, opts)
        })
        .collect();

    let mut variants = Vec::with_capacity(cases.len());
    for ((label, _), fid) in cases.iter().zip(fidelities) {
        let fidelity = fid?;
        variants.push(RobustnessVariant {
            label: label.clone(),
            fidelity,
            delta_f: fidelity - nominal,
        });
    }
    let worst_delta = variants
        .iter()
        .map(|v| v.delta_f.abs())
        .fold(0.0, f64::max);
    let plus_delta = variants
        .iter()
        .find(|v| v.label.starts_with("J*(1+") || v.label.ends_with("(+++)"))
        .map_or(0.0, |v| v.delta_f);

    let mut metadata = RunMetadata::new(params, space_spec, opts, gt_final);
    metadata.wall_clock_s = start.elapsed().as_secs_f64();
    metadata.grids.insert(
        "perturbation".into(),
        format!("{:?} relative_size={r}", perturbation.target),
    );
    Ok(RobustnessReport { nominal_fidelity: nominal, variants, worst_delta, plus_delta, metadata })
}

/// One row of the analytic target-transition scan.
#[derive(Debug, Clone)]
pub struct Fig3Row {
    pub j: f64,
    /// Effective Rabi magnitudes |Ω_x|, labeled a…g.
    pub omega_x: [f64; 7],
    /// Detunings Δ_x, labeled a…g.
    pub delta_x: [f64; 7],
    pub delta1: f64,
    pub delta2: f64,
    pub min_ratio: f64,
}

/// Label-to-transition audit map entry (independent of J).
#[derive(Debug, Clone)]
pub struct Fig3Mapping {
    pub label: char,
    pub excited: usize,
    pub laser: u8,
}

#[derive(Debug, Clone)]
pub struct Fig3Data {
    pub rows: Vec<Fig3Row>,
    pub mapping: Vec<Fig3Mapping>,
    pub metadata: RunMetadata,
}

/// Purely analytic scan of the target-state transition structure versus J:
/// the seven effective Rabi amplitudes, the nine diagram energies, and the
/// suppression ratio. No time evolution.
pub fn sweep_fig3(j_grid: &[f64], params: &SystemParams) -> Fig3Data {
    assert!(!j_grid.is_empty());
    let start = Instant::now();
    let mut rows = Vec::with_capacity(j_grid.len());
    let mut mapping: Vec<Fig3Mapping> = Vec::new();
    for &j in j_grid {
        let mut p = params.clone();
        p.j = j;
        p.laser_freqs = None; // the selection rule follows J
        let diagram = target_detunings(p.g, j);
        let report = suppression_ratio(&p);
        let mut omega_x = [0.0; 7];
        let delta_x = [
            diagram.delta_a,
            diagram.delta_b,
            diagram.delta_c,
            diagram.delta_d,
            diagram.delta_e,
            diagram.delta_f,
            diagram.delta_g,
        ];
        for row in &report.rows {
            if let Some(label) = row.label {
                let idx = (label as u8 - b'a') as usize;
                omega_x[idx] = row.rabi.abs();
            }
        }
        if mapping.is_empty() {
            mapping = audit_mapping(&report.rows);
        }
        rows.push(Fig3Row {
            j,
            omega_x,
            delta_x,
            delta1: diagram.delta1,
            delta2: diagram.delta2,
            min_ratio: report.min_ratio,
        });
    }
    let mut metadata = RunMetadata::new(
        params,
        SpaceSpec { n_max: 1, e_max: Some(1) },
        &IntegratorOpts::default(),
        0.0,
    );
    metadata.wall_clock_s = start.elapsed().as_secs_f64();
    metadata.grids.insert("j_grid".into(), grid_echo(j_grid));
    Fig3Data { rows, mapping, metadata }
}

fn audit_mapping(rows: &[SuppressionRow]) -> Vec<Fig3Mapping> {
    let mut mapping: Vec<Fig3Mapping> = rows
        .iter()
        .filter_map(|r| {
            r.label.map(|label| Fig3Mapping { label, excited: r.excited, laser: r.laser })
        })
        .collect();
    mapping.sort_by_key(|m| (m.label, m.excited, m.laser));
    mapping
}

fn grid_echo(grid: &[f64]) -> String {
    if grid.len() <= 8 {
        format!("{grid:?}")
    } else {
        format!(
            "[{}..{}; {} points]",
            grid.first().unwrap(),
            grid.last().unwrap(),
            grid.len()
        )
    }
}

/// Populations along a trajectory, as (gt, populations, trace correction).
pub fn population_trace(
    traj: &Trajectory,
    space: &Arc<HilbertSpace>,
) -> Vec<(f64, GroundPopulations, f64)> {
    let vectors: Vec<DVector<C64>> =
        Ground::ALL.iter().map(|gs| gs.vector(space)).collect();
    traj.times
        .iter()
        .zip(&traj.states)
        .zip(&traj.trace_corrections)
        .map(|((&t, state), &err)| {
            let p: Vec<f64> = vectors.iter().map(|v| state.expectation(v)).collect();
            let pops = GroundPopulations {
                p_t: p[1],
                p_s: p[2],
                p_00: p[0],
                p_11: p[3],
                p_excited: state.trace() - p.iter().sum::<f64>(),
            };
            (t, pops, err)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::BasisLabel;
    use approx::assert_abs_diff_eq;

    #[test]
    fn populations_of_pure_states() {
        let space = build_space(1, Some(1));
        let target = DensityMatrix::from_pure(&Ground::T.vector(&space));
        let p = ground_populations(&target, &space);
        assert_abs_diff_eq!(p.p_t, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.p_s + p.p_00 + p.p_11 + p.p_excited, 0.0, epsilon = 1e-14);

        // |01,00⟩ splits evenly over T and S
        let bare = DensityMatrix::pure_label(&space, &BasisLabel::new(0, 1, 0, 0));
        let p = ground_populations(&bare, &space);
        assert_abs_diff_eq!(p.p_t, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(p.p_s, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn populations_of_ground_mixture() {
        let space = build_space(1, Some(1));
        let mut m = nalgebra::DMatrix::<C64>::zeros(16, 16);
        for gs in Ground::ALL {
            let v = gs.vector(&space);
            m += &v * v.adjoint() * C64::new(0.25, 0.0);
        }
        let rho = DensityMatrix::from_matrix(m).unwrap();
        let p = ground_populations(&rho, &space);
        for x in [p.p_t, p.p_s, p.p_00, p.p_11] {
            assert_abs_diff_eq!(x, 0.25, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(p.p_excited, 0.0, epsilon = 1e-12);
        assert!(p.closure_defect() < 1e-12);
    }

    #[test]
    fn fidelity_of_named_states() {
        let space = build_space(1, Some(1));
        let singlet = DensityMatrix::from_pure(&Ground::S.vector(&space));
        assert_abs_diff_eq!(fidelity_target(&singlet, &space), 0.0, epsilon = 1e-14);
        let mixed = DensityMatrix::maximally_mixed(16);
        assert_abs_diff_eq!(fidelity_target(&mixed, &space), 1.0 / 16.0, epsilon = 1e-14);
    }

    #[test]
    fn cooperativity_algebra() {
        let (kappa, gamma) = cooperativity_to_rates(50.0, 2.0, 1.0);
        assert_abs_diff_eq!(kappa, 0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(gamma, 0.2, epsilon = 1e-14);
        let (kappa, gamma) = cooperativity_to_rates(50.0, 1.5, 1.0);
        assert_abs_diff_eq!(kappa, 0.11547005383792515, epsilon = 1e-14);
        assert_abs_diff_eq!(gamma, 0.17320508075688773, epsilon = 1e-14);
        // substitute back: C = g²/(κγ)
        assert_abs_diff_eq!(1.0 / (kappa * gamma), 50.0, epsilon = 1e-10);
        // rates vanish as C grows
        let (k1, g1) = cooperativity_to_rates(1e6, 2.0, 1.0);
        assert!(k1 < 1e-2 && g1 < 2e-2);
    }

    #[test]
    fn fig3_scan_identities() {
        let params = SystemParams::working_point();
        let grid: Vec<f64> = (1..=30).map(|i| 0.1 * i as f64).collect();
        let data = sweep_fig3(&grid, &params);
        for row in &data.rows {
            // Δ_e is the straight line −J, exactly
            assert_eq!(row.delta_x[4], -row.j);
            // δ1 δ2 = g²
            assert_abs_diff_eq!(row.delta1 * row.delta2, 1.0, epsilon = 1e-12);
        }
        // suppression holds over the scheme's working range
        for row in data.rows.iter().filter(|r| r.j >= 0.8 && r.j <= 1.5) {
            assert!(row.min_ratio > 10.0, "J = {}: {}", row.j, row.min_ratio);
        }
        // the audit map covers all seven labels
        assert_eq!(data.mapping.iter().map(|m| m.label).collect::<std::collections::BTreeSet<_>>().len(), 7);
    }

    #[test]
    fn fig3_scan_scales_linearly_in_omega() {
        let params = SystemParams::working_point();
        let mut doubled = params.clone();
        for o in doubled.omega.iter_mut() {
            *o *= 2.0;
        }
        let grid = [0.5, 1.1, 2.0];
        let base = sweep_fig3(&grid, &params);
        let twice = sweep_fig3(&grid, &doubled);
        for (a, b) in base.rows.iter().zip(&twice.rows) {
            for (x, y) in a.omega_x.iter().zip(&b.omega_x) {
                assert_abs_diff_eq!(2.0 * x, *y, epsilon = 1e-14);
            }
            for (x, y) in a.delta_x.iter().zip(&b.delta_x) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn sweep_records_failures_as_holes() {
        // a negative Ω is rejected by validation: the point becomes a hole
        let params = SystemParams::working_point();
        let result = sweep_fig4a(
            &[1.1],
            &[-0.01, 0.0],
            &params,
            1.0,
            SpaceSpec { n_max: 1, e_max: Some(1) },
            &IntegratorOpts::default(),
        );
        assert_eq!(result.values.len(), 2);
        assert!(result.values[0].is_none());
        assert_eq!(result.errors.len(), 1);
        assert_eq!(result.errors[0].0, 0);
        // Ω = 0 from vacuum: nothing moves
        assert_abs_diff_eq!(result.values[1].unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn target_start_remains_dominant() {
        // starting in |T,00⟩ the population dips only slightly on the way
        // to the steady configuration
        let params = SystemParams::working_point();
        let spec = SpaceSpec { n_max: 1, e_max: Some(1) };
        let space = spec.build();
        let runs = run_fig5(
            &params,
            &[InitialState::Target],
            spec,
            300.0,
            25.0,
            &IntegratorOpts::default(),
        )
        .unwrap();
        let (_, traj) = &runs[0];
        for (t, pops, _) in population_trace(traj, &space) {
            assert!(pops.p_t > 0.85, "P_T = {} at gt = {t}", pops.p_t);
        }
    }

    #[test]
    fn zero_perturbation_changes_nothing() {
        let params = SystemParams::working_point();
        let report = robustness(
            &params,
            &Perturbation { target: PerturbTarget::Hopping, relative_size: 0.0 },
            2.0,
            SpaceSpec { n_max: 1, e_max: Some(1) },
            &IntegratorOpts::default(),
        )
        .unwrap();
        assert_eq!(report.worst_delta, 0.0);
    }
}

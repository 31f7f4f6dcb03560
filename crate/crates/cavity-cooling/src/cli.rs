//! Command-line front end: config parsing, subcommand dispatch, CSV and
//! manifest output.
//!
//! Exit codes: 0 success, 2 usage/configuration error, 3 physics
//! verification failure, 4 integration failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_grid, RunConfig};
use crate::dynamics::{evolve, EvolutionContext, Frame};
use crate::error::{Error, Result};
use crate::experiments::{
    fidelity_target, population_trace, robustness, run_fig5, sweep_fig3,
    sweep_fig4a, sweep_fig4b, InitialState, Perturbation, PerturbTarget,
    RunMetadata, SweepResult,
};
use crate::hilbert::build_space;
use crate::output::{fmt_g, write_csv, Manifest};
use crate::spectrum::{analytic_spectrum, numeric_spectrum, verify_spectrum};
use crate::transitions::{
    coefficient_overlap_defect, suppression_ratio, transition_table,
};

#[derive(Debug, Parser)]
#[command(
    name = "cavity-cooling",
    version,
    about = "Dissipative preparation of two-atom entanglement in coupled cavities"
)]
pub struct Cli {
    /// Flat TOML config file (defaults apply when omitted).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV and manifest files.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// RNG seed (overrides the config key).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Override a config key, e.g. --set J=0.9 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VAL")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the truncated basis, one `|AB,CD⟩ index n_exc` line each.
    Basis,
    /// Closed-form eigensystem with residuals against diagonalization.
    Spectrum,
    /// Laser-driven transition table with Rabi amplitudes and detunings.
    Transitions,
    /// Single master-equation trajectory with population time series.
    Evolve,
    /// Analytic target-transition scan versus J.
    Fig3,
    /// Target population over a (J, Ω) grid at finite time.
    Fig4a,
    /// Fidelity versus γ/κ at fixed cooperativity.
    Fig4b,
    /// Population time series for several initial states.
    Fig5,
    /// Fidelity change under static J or Rabi-frequency offsets.
    Robustness,
    /// Run the spectrum, resonance, and coefficient self-checks.
    Verify,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Verification(_) => 3,
        Error::Integration { .. } => 4,
        Error::Io(_) => 1,
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        // ignore the error when a pool already exists (tests, repeat calls)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    let config = RunConfig::from_sources(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Basis => cmd_basis(&config),
        Command::Spectrum => cmd_spectrum(&config, &cli.out),
        Command::Transitions => cmd_transitions(&config, &cli.out),
        Command::Evolve => cmd_evolve(&config, &cli.out),
        Command::Fig3 => cmd_fig3(&config, &cli.out),
        Command::Fig4a => cmd_fig4a(&config, &cli.out),
        Command::Fig4b => cmd_fig4b(&config, &cli.out),
        Command::Fig5 => cmd_fig5(&config, &cli.out),
        Command::Robustness => cmd_robustness(&config, &cli.out),
        Command::Verify => cmd_verify(&config),
    }
}

fn metadata_for(
    config: &RunConfig,
    gt_final: f64,
    started: std::time::Instant,
) -> Result<RunMetadata> {
    let params = config.params()?;
    let mut meta =
        RunMetadata::new(&params, config.space(), &config.integrator()?, gt_final);
    meta.seed = Some(config.seed);
    meta.wall_clock_s = started.elapsed().as_secs_f64();
    Ok(meta)
}

fn cmd_basis(config: &RunConfig) -> Result<()> {
    let space = config.space().build();
    for (index, label) in space.labels().iter().enumerate() {
        println!("{label} {index} {}", label.n_exc());
    }
    Ok(())
}

fn cmd_spectrum(config: &RunConfig, out: &Path) -> Result<()> {
    let started = std::time::Instant::now();
    let params = config.params()?;
    let analytic = analytic_spectrum(&params);
    let numeric = numeric_spectrum(&analytic.space, &params);
    let report = verify_spectrum(&analytic, &numeric, 1e-10);
    let path = out.join("spectrum.csv");
    write_csv(
        &path,
        &["name", "eigenvalue", "residual"],
        report.entries.iter().map(|e| {
            vec![e.name.clone(), fmt_g(e.eigenvalue), fmt_g(e.residual)]
        }),
    )?;
    let mut manifest = Manifest::new("spectrum", metadata_for(config, 0.0, started)?)
        .with_output(&path);
    manifest.threads = None;
    manifest.write(out)?;
    println!(
        "spectrum: 16 states, max residual {}, wrote {}",
        fmt_g(report.max_residual),
        path.display()
    );
    if !report.pass {
        return Err(Error::Verification(format!(
            "spectrum residuals exceed tolerance for {:?}",
            report.failures
        )));
    }
    Ok(())
}

fn cmd_transitions(config: &RunConfig, out: &Path) -> Result<()> {
    let started = std::time::Instant::now();
    let params = config.params()?;
    let freqs = params.resolved_laser_freqs();
    let table = transition_table(&params, &freqs);
    let path = out.join("transitions.csv");
    write_csv(
        &path,
        &["ground", "excited", "laser", "rabi_over_g", "detuning_over_g", "ratio"],
        table.rows.iter().map(|r| {
            let ratio = if r.rabi.abs() > 0.0 {
                r.detuning.abs() / r.rabi.abs()
            } else {
                f64::INFINITY
            };
            vec![
                r.ground.name().to_string(),
                format!("phi{}", r.excited),
                r.laser.to_string(),
                fmt_g(r.rabi),
                fmt_g(r.detuning),
                fmt_g(ratio),
            ]
        }),
    )?;
    Manifest::new("transitions", metadata_for(config, 0.0, started)?)
        .with_output(&path)
        .write(out)?;
    println!("transitions: {} rows, wrote {}", table.rows.len(), path.display());
    Ok(())
}

fn trajectory_rows(
    traj: &crate::dynamics::Trajectory,
    space: &std::sync::Arc<crate::hilbert::HilbertSpace>,
) -> Vec<Vec<String>> {
    population_trace(traj, space)
        .into_iter()
        .map(|(t, p, err)| {
            vec![
                fmt_g(t),
                fmt_g(p.p_t),
                fmt_g(p.p_s),
                fmt_g(p.p_00),
                fmt_g(p.p_11),
                fmt_g(p.p_excited),
                fmt_g(err),
            ]
        })
        .collect()
}

const TRAJ_HEADER: [&str; 7] =
    ["gt", "P_T", "P_S", "P_00", "P_11", "P_excited_total", "trace_error"];

fn initial_state_from(config: &RunConfig) -> Result<InitialState> {
    match config.initial.as_str() {
        "vacuum" => Ok(InitialState::Vacuum),
        "target" => Ok(InitialState::Target),
        "random" => Ok(InitialState::RandomMixed { seed: config.seed }),
        other => Err(Error::config(format!(
            "initial state `{other}` is not vacuum|target|random"
        ))),
    }
}

fn cmd_evolve(config: &RunConfig, out: &Path) -> Result<()> {
    let started = std::time::Instant::now();
    let params = config.params()?;
    let (gt_final, sample_step) = config.times()?;
    let space = config.space().build();
    let ctx = EvolutionContext::new(&space, &params, Frame::Rotating);
    let rho0 = initial_state_from(config)?.materialize(&space);
    let traj = evolve(&rho0, gt_final, sample_step, &ctx, &config.integrator()?)?;
    let path = out.join("evolve.csv");
    write_csv(&path, &TRAJ_HEADER, trajectory_rows(&traj, &space))?;
    Manifest::new("evolve", metadata_for(config, gt_final, started)?)
        .with_output(&path)
        .write(out)?;
    let fidelity = fidelity_target(traj.final_state(), &space);
    println!(
        "evolve: gt = {}, final P_T = {}, wrote {}",
        fmt_g(traj.final_time()),
        fmt_g(fidelity),
        path.display()
    );
    Ok(())
}

fn cmd_fig3(config: &RunConfig, out: &Path) -> Result<()> {
    let params = config.params()?;
    let grid = parse_grid(&config.fig3_j_grid)?;
    let data = sweep_fig3(&grid, &params);
    let path = out.join("fig3.csv");
    let labels = ['a', 'b', 'c', 'd', 'e', 'f', 'g'];
    let mut header: Vec<String> = vec!["j_over_g".into()];
    header.extend(labels.iter().map(|c| format!("omega_{c}")));
    header.extend(labels.iter().map(|c| format!("delta_{c}")));
    header.extend(["delta1".into(), "delta2".into(), "min_ratio".into()]);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        &path,
        &header_refs,
        data.rows.iter().map(|r| {
            let mut row = vec![fmt_g(r.j)];
            row.extend(r.omega_x.iter().map(|&x| fmt_g(x)));
            row.extend(r.delta_x.iter().map(|&x| fmt_g(x)));
            row.push(fmt_g(r.delta1));
            row.push(fmt_g(r.delta2));
            row.push(fmt_g(r.min_ratio));
            row
        }),
    )?;
    let map_path = out.join("fig3_mapping.csv");
    write_csv(
        &map_path,
        &["label", "ground", "excited", "laser"],
        data.mapping.iter().map(|m| {
            vec![
                m.label.to_string(),
                "T00".to_string(),
                format!("phi{}", m.excited),
                m.laser.to_string(),
            ]
        }),
    )?;
    let mut meta = data.metadata;
    meta.seed = Some(config.seed);
    Manifest::new("fig3", meta)
        .with_output(&path)
        .with_output(&map_path)
        .write(out)?;
    println!("fig3: {} grid points, wrote {}", grid.len(), path.display());
    Ok(())
}

type DerivedColumn<'a> = (&'a str, Box<dyn Fn(f64) -> String>);

fn write_sweep_1d(
    result: &SweepResult,
    extra_cols: &[DerivedColumn<'_>],
    value_name: &str,
    path: &Path,
) -> Result<()> {
    let axis = &result.axes[0];
    let mut header = vec![axis.name.as_str()];
    for (name, _) in extra_cols {
        header.push(name);
    }
    header.push(value_name);
    write_csv(
        path,
        &header,
        axis.values.iter().zip(&result.values).map(|(&x, v)| {
            let mut row = vec![fmt_g(x)];
            for (_, f) in extra_cols {
                row.push(f(x));
            }
            row.push(v.map(fmt_g).unwrap_or_default());
            row
        }),
    )
}

fn cmd_fig4a(config: &RunConfig, out: &Path) -> Result<()> {
    let params = config.params()?;
    let j_grid = parse_grid(&config.fig4a_j_grid)?;
    let omega_grid = parse_grid(&config.fig4a_omega_grid)?;
    let result = sweep_fig4a(
        &j_grid,
        &omega_grid,
        &params,
        config.times()?.0,
        config.space(),
        &config.integrator()?,
    );
    let path = out.join("fig4a.csv");
    let n_omega = omega_grid.len();
    write_csv(
        &path,
        &["j_over_g", "omega_over_g", "p_T"],
        result.values.iter().enumerate().map(|(flat, v)| {
            vec![
                fmt_g(j_grid[flat / n_omega]),
                fmt_g(omega_grid[flat % n_omega]),
                v.map(fmt_g).unwrap_or_default(),
            ]
        }),
    )?;
    let mut meta = result.metadata.clone();
    meta.seed = Some(config.seed);
    Manifest::new("fig4a", meta).with_output(&path).write(out)?;
    report_sweep_errors("fig4a", &result);
    println!(
        "fig4a: {} points, wrote {}",
        result.values.len(),
        path.display()
    );
    Ok(())
}

fn cmd_fig4b(config: &RunConfig, out: &Path) -> Result<()> {
    let params = config.params()?;
    let ratio_grid = parse_grid(&config.fig4b_ratio_grid)?;
    let c = config.cooperativity;
    let result = sweep_fig4b(
        &ratio_grid,
        c,
        &params,
        config.times()?.0,
        config.space(),
        &config.integrator()?,
    );
    let path = out.join("fig4b.csv");
    let g = params.g;
    let kappa_of =
        move |ratio: f64| fmt_g(crate::experiments::cooperativity_to_rates(c, ratio, g).0);
    let gamma_of =
        move |ratio: f64| fmt_g(crate::experiments::cooperativity_to_rates(c, ratio, g).1);
    write_sweep_1d(
        &result,
        &[
            ("kappa_over_g", Box::new(kappa_of)),
            ("gamma_over_g", Box::new(gamma_of)),
        ],
        "fidelity",
        &path,
    )?;
    let mut meta = result.metadata.clone();
    meta.seed = Some(config.seed);
    Manifest::new("fig4b", meta).with_output(&path).write(out)?;
    report_sweep_errors("fig4b", &result);
    if let Some((ratio, best)) = result.argmax() {
        println!(
            "fig4b: argmax gamma/kappa = {}, fidelity = {}, wrote {}",
            fmt_g(ratio),
            fmt_g(best),
            path.display()
        );
    }
    Ok(())
}

fn cmd_fig5(config: &RunConfig, out: &Path) -> Result<()> {
    let started = std::time::Instant::now();
    let params = config.params()?;
    let space = config.space().build();
    let initial = [
        InitialState::Vacuum,
        InitialState::RandomMixed { seed: config.seed },
    ];
    let (gt_final, sample_step) = config.times()?;
    let runs = run_fig5(
        &params,
        &initial,
        config.space(),
        gt_final,
        sample_step,
        &config.integrator()?,
    )?;
    let mut manifest = Manifest::new("fig5", metadata_for(config, gt_final, started)?);
    for (label, traj) in &runs {
        let path = out.join(format!("fig5_{label}.csv"));
        write_csv(&path, &TRAJ_HEADER, trajectory_rows(traj, &space))?;
        manifest = manifest.with_output(&path);
        let f = fidelity_target(traj.final_state(), &space);
        println!("fig5[{label}]: final P_T = {}", fmt_g(f));
    }
    manifest.write(out)?;
    Ok(())
}

fn cmd_robustness(config: &RunConfig, out: &Path) -> Result<()> {
    let params = config.params()?;
    let target = match config.robust_target.as_str() {
        "J" | "j" => PerturbTarget::Hopping,
        "Omega" | "omega" => PerturbTarget::Rabi,
        other => {
            return Err(Error::config(format!(
                "robust_target `{other}` is not J|Omega"
            )))
        }
    };
    let report = robustness(
        &params,
        &Perturbation { target, relative_size: config.robust_size },
        config.times()?.0,
        config.space(),
        &config.integrator()?,
    )?;
    let path = out.join("robustness.csv");
    let nominal = report.nominal_fidelity;
    write_csv(
        &path,
        &["variant", "fidelity", "delta_f"],
        std::iter::once(vec!["nominal".to_string(), fmt_g(nominal), fmt_g(0.0)])
            .chain(report.variants.iter().map(|v| {
                vec![v.label.clone(), fmt_g(v.fidelity), fmt_g(v.delta_f)]
            })),
    )?;
    let mut meta = report.metadata.clone();
    meta.seed = Some(config.seed);
    Manifest::new("robustness", meta).with_output(&path).write(out)?;
    println!(
        "robustness[{:?}]: nominal = {}, worst |dF| = {}, wrote {}",
        target,
        fmt_g(nominal),
        fmt_g(report.worst_delta),
        path.display()
    );
    Ok(())
}

fn report_sweep_errors(name: &str, result: &SweepResult) {
    for (flat, err) in &result.errors {
        eprintln!("{name}: point {flat} failed: {err}");
    }
}

fn cmd_verify(config: &RunConfig) -> Result<()> {
    let params = config.params()?;
    let mut failures: Vec<String> = Vec::new();

    let analytic = analytic_spectrum(&params);
    let numeric = numeric_spectrum(&analytic.space, &params);
    let spectrum_report = verify_spectrum(&analytic, &numeric, 1e-10);
    println!(
        "spectrum residual max      {}",
        fmt_g(spectrum_report.max_residual)
    );
    println!(
        "orthonormality defect      {}",
        fmt_g(analytic.orthonormality_defect())
    );
    println!(
        "completeness defect        {}",
        fmt_g(analytic.completeness_defect())
    );
    if !spectrum_report.pass {
        failures.push(format!("spectrum: {:?}", spectrum_report.failures));
    }

    let overlap = coefficient_overlap_defect(&params);
    println!("coefficient overlap defect {}", fmt_g(overlap));
    if overlap > 1e-12 {
        failures.push(format!("coefficient overlaps deviate by {overlap:.3e}"));
    }

    // the configured frequencies must realize the selection rule
    let freqs = params.resolved_laser_freqs();
    let table = transition_table(&params, &freqs);
    let want_resonant = [("phi00", 3usize, 1u8), ("S00", 9, 2), ("phi11", 11, 3)];
    for (ground, excited, laser) in want_resonant {
        let row = table
            .rows
            .iter()
            .find(|r| {
                r.ground.name() == ground && r.excited == excited && r.laser == laser
            })
            .expect("resonant row present");
        println!(
            "resonance {ground} -> phi{excited} (laser {laser})  detuning = {}",
            fmt_g(row.detuning)
        );
        if row.detuning.abs() > 1e-12 {
            failures.push(format!(
                "{ground} -> phi{excited} detuning {:.3e} not zero",
                row.detuning
            ));
        }
    }

    let suppression = suppression_ratio(&params);
    println!("min suppression ratio      {}", fmt_g(suppression.min_ratio));
    if !suppression.violations.is_empty() {
        failures.push(format!(
            "{} resonant target-state transitions",
            suppression.violations.len()
        ));
    }

    // basis sector layout sanity
    let space = build_space(1, Some(1));
    if space.dim() != 16 || space.labels()[..4].iter().any(|l| l.n_exc() != 0) {
        failures.push("16-state space layout broken".into());
    }

    if failures.is_empty() {
        println!("verify: all checks passed");
        Ok(())
    } else {
        Err(Error::Verification(failures.join("; ")))
    }
}

//! Subcommand execution: deterministic simulations and harnesses that write
//! CSV/DOT/JSON data files plus a manifest into the run's output directory.

use std::path::{Path, PathBuf};

use trihelix_core::coords::{
    actor_contributions, classify_regime, normalize_th_vector, InstitutionMatrix,
};
use trihelix_core::field_dh::{
    current_dh, energy_dh, field_strength_dh, lorenz_consistent_a0_vel, lorenz_residual, step_dh,
    total_charge, DhInitial, DhParams, DhState,
};
use trihelix_core::field_th::{
    abelian_limit_check, energy_th, field_strength_th, lorenz_consistent_w0_vel,
    lorenz_residual_th, self_interaction_residual, step_th, ThFieldState, ThInitial, ThParams,
};
use trihelix_core::fractal::{grow, seed_tree, tree_stats, HelixMode};
use trihelix_core::symmetry::{compose, rotation_about_axis, Axis, Vec3};
use trihelix_core::waves::{step_wave, VectorWaveState, WaveParams};

use crate::config::{
    CompareConfig, CompareMode,CoordsConfig, DhConfig, FractalConfig, OutputLayout,
    RotateDemoConfig, ThConfig, WaveConfig,
};
use crate::error::CliError;
use crate::harness::dh_superposition_residual;
use crate::init::{eval_complex, eval_scalar, eval_vec3};
use crate::output::{fmt_f64, prepare_output_dir, write_manifest, CsvFile};

const WAVE_COLUMNS: [&str; 4] = ["x", "c_G", "c_B", "c_S"];
const DH_COLUMNS: [&str; 8] = ["x", "re_u", "im_u", "A0", "A1", "j0", "j1", "F01"];
const TH_COLUMNS: [&str; 13] = [
    "x", "u_1", "u_2", "u_3", "W0_1", "W0_2", "W0_3", "W1_1", "W1_2", "W1_3", "W01_1", "W01_2",
    "W01_3",
];

/// Snapshot steps: the initial state, every `stride`-th step, and the final
/// step.
fn emit_now(step: usize, steps: usize, stride: usize) -> bool {
    step == steps || step % stride.max(1) == 0
}

fn snapshot_path(dir: &Path, prefix: &str, step: usize) -> PathBuf {
    dir.join(format!("{prefix}_{step:06}.csv"))
}

pub fn run_wave(config: &WaveConfig, resolved: &toml::Value) -> Result<PathBuf, CliError> {
    let params = config.lattice.build()?;
    let dir = prepare_output_dir(&config.output)?;
    let (field, velocity) = eval_vec3(&config.initial.c, &params)?;
    let mut state = VectorWaveState::from_initial(&params, field, &velocity)?;

    let steps = config.evolution.steps;
    let stride = config.evolution.stride;
    let mut long_file = match config.output.layout {
        OutputLayout::Long => {
            let mut f = CsvFile::create(&dir.join("wave_series.csv"))?;
            let mut cols = vec!["step", "t"];
            cols.extend_from_slice(&WAVE_COLUMNS);
            f.header(&cols)?;
            Some(f)
        }
        OutputLayout::PerSnapshot => None,
    };

    let mut write_snapshot = |state: &VectorWaveState, step: usize| -> Result<(), CliError> {
        match &mut long_file {
            Some(f) => {
                for j in 0..params.nx() {
                    f.row(&[
                        step as f64,
                        step as f64 * params.dt(),
                        params.x(j),
                        state.current[j][0],
                        state.current[j][1],
                        state.current[j][2],
                    ])?;
                }
            }
            None => {
                let mut f = CsvFile::create(&snapshot_path(&dir, "wave", step))?;
                f.header(&WAVE_COLUMNS)?;
                for j in 0..params.nx() {
                    f.row(&[
                        params.x(j),
                        state.current[j][0],
                        state.current[j][1],
                        state.current[j][2],
                    ])?;
                }
            }
        }
        Ok(())
    };

    write_snapshot(&state, 0)?;
    let e0 = trihelix_core::waves::discrete_energy(&state, &params);
    for step in 1..=steps {
        state = step_wave(&state, &params)?;
        if emit_now(step, steps, stride) {
            write_snapshot(&state, step)?;
        }
    }
    let e1 = trihelix_core::waves::discrete_energy(&state, &params);

    write_manifest(
        &dir,
        resolved,
        &[
            ("final_step".into(), steps.to_string()),
            ("initial_energy".into(), fmt_f64(e0)),
            ("final_energy".into(), fmt_f64(e1)),
        ],
    )?;
    Ok(dir)
}

fn dh_initial(config: &DhConfig, params: &DhParams) -> Result<DhInitial, CliError> {
    let lat = params.lattice();
    let (u, u_vel) = eval_complex(&config.initial.u, lat)?;
    let (a1, a1_vel) = eval_scalar(&config.initial.a1, lat)?;
    let mut init = DhInitial::zero(lat.nx());
    init.u = u;
    init.u_vel = u_vel;
    init.a1 = a1;
    init.a1_vel = a1_vel;
    if config.initial.lorenz_consistent {
        init.a0_vel = lorenz_consistent_a0_vel(&init.a1, params);
    }
    Ok(init)
}

fn write_dh_snapshot(
    dir: &Path,
    state: &DhState,
    params: &DhParams,
    step: usize,
) -> Result<(), CliError> {
    let lat = params.lattice();
    let mut f = CsvFile::create(&snapshot_path(dir, "dh", step))?;
    f.metadata("e", fmt_f64(params.e()))?;
    f.metadata("nx", lat.nx())?;
    f.metadata("dx", fmt_f64(lat.dx()))?;
    f.metadata("dt", fmt_f64(lat.dt()))?;
    f.metadata("step", step)?;
    f.metadata("t", fmt_f64(step as f64 * lat.dt()))?;
    f.metadata("lorenz_residual", fmt_f64(lorenz_residual(state, params)))?;
    f.metadata("total_charge", fmt_f64(total_charge(state, params)))?;
    f.metadata("energy", fmt_f64(energy_dh(state, params)))?;
    f.header(&DH_COLUMNS)?;
    let (j0, j1) = current_dh(state, params);
    let f01 = field_strength_dh(state, params);
    for j in 0..lat.nx() {
        f.row(&[
            lat.x(j),
            state.u[j].re,
            state.u[j].im,
            state.a0[j],
            state.a1[j],
            j0[j],
            j1[j],
            f01[j],
        ])?;
    }
    Ok(())
}

pub fn run_dh(config: &DhConfig, resolved: &toml::Value) -> Result<PathBuf, CliError> {
    let lattice = config.lattice.build()?;
    let mut params = DhParams::new(config.coupling.e, lattice)?;
    if let Some(ceiling) = config.coupling.field_ceiling {
        params = params.with_field_ceiling(ceiling);
    }
    let dir = prepare_output_dir(&config.output)?;
    let mut state = DhState::from_initial(&params, dh_initial(config, &params)?)?;

    let steps = config.evolution.steps;
    let stride = config.evolution.stride;
    write_dh_snapshot(&dir, &state, &params, 0)?;
    for step in 1..=steps {
        state = step_dh(&state, &params)?;
        if emit_now(step, steps, stride) {
            write_dh_snapshot(&dir, &state, &params, step)?;
        }
    }

    write_manifest(
        &dir,
        resolved,
        &[
            ("final_step".into(), steps.to_string()),
            (
                "lorenz_residual".into(),
                fmt_f64(lorenz_residual(&state, &params)),
            ),
            ("total_charge".into(), fmt_f64(total_charge(&state, &params))),
            ("energy".into(), fmt_f64(energy_dh(&state, &params))),
        ],
    )?;
    Ok(dir)
}

fn th_initial(
    u_desc: &[crate::init::Descriptor],
    w1_desc: &[crate::init::Descriptor],
    params: &ThParams,
) -> Result<ThInitial, CliError> {
    let lat = params.lattice();
    let (u, u_vel) = eval_vec3(u_desc, lat)?;
    let (w1, w1_vel) = eval_vec3(w1_desc, lat)?;
    let mut init = ThInitial::zero(lat.nx());
    init.u = u;
    init.u_vel = u_vel;
    init.w1 = w1;
    init.w1_vel = w1_vel;
    init.w0_vel = lorenz_consistent_w0_vel(&init.w1, params);
    Ok(init)
}

fn write_th_snapshot(
    dir: &Path,
    state: &ThFieldState,
    params: &ThParams,
    step: usize,
) -> Result<(), CliError> {
    let lat = params.lattice();
    let mut f = CsvFile::create(&snapshot_path(dir, "th", step))?;
    f.metadata("g", fmt_f64(params.g()))?;
    f.metadata("nx", lat.nx())?;
    f.metadata("dx", fmt_f64(lat.dx()))?;
    f.metadata("dt", fmt_f64(lat.dt()))?;
    f.metadata("step", step)?;
    f.metadata("t", fmt_f64(step as f64 * lat.dt()))?;
    f.metadata(
        "lorenz_residual",
        fmt_f64(lorenz_residual_th(state, params)),
    )?;
    f.metadata("energy", fmt_f64(energy_th(state, params)))?;
    f.header(&TH_COLUMNS)?;
    let w01 = field_strength_th(state, params);
    for j in 0..lat.nx() {
        f.row(&[
            lat.x(j),
            state.u[j][0],
            state.u[j][1],
            state.u[j][2],
            state.w0[j][0],
            state.w0[j][1],
            state.w0[j][2],
            state.w1[j][0],
            state.w1[j][1],
            state.w1[j][2],
            w01[j][0],
            w01[j][1],
            w01[j][2],
        ])?;
    }
    Ok(())
}

pub fn run_th(config: &ThConfig, resolved: &toml::Value) -> Result<PathBuf, CliError> {
    let lattice = config.lattice.build()?;
    let mut params = ThParams::new(config.coupling.g, lattice)?;
    if let Some(ceiling) = config.coupling.field_ceiling {
        params = params.with_field_ceiling(ceiling);
    }
    let dir = prepare_output_dir(&config.output)?;
    let init = th_initial(&config.initial.u, &config.initial.w1, &params)?;
    let mut state = ThFieldState::from_initial(&params, init)?;

    let steps = config.evolution.steps;
    let stride = config.evolution.stride;
    write_th_snapshot(&dir, &state, &params, 0)?;
    for step in 1..=steps {
        state = step_th(&state, &params)?;
        if emit_now(step, steps, stride) {
            write_th_snapshot(&dir, &state, &params, step)?;
        }
    }

    write_manifest(
        &dir,
        resolved,
        &[
            ("final_step".into(), steps.to_string()),
            (
                "lorenz_residual".into(),
                fmt_f64(lorenz_residual_th(&state, &params)),
            ),
            ("energy".into(), fmt_f64(energy_th(&state, &params))),
        ],
    )?;
    Ok(dir)
}

/// The rotation-order demonstration: one quarter turn about x and one about
/// y applied to (1, 0, 0) in both orders.
pub fn run_rotate_demo(
    config: &RotateDemoConfig,
    resolved: &toml::Value,
) -> Result<PathBuf, CliError> {
    let dir = prepare_output_dir(&config.output)?;
    let rx = rotation_about_axis(Axis::X, std::f64::consts::FRAC_PI_2);
    let ry = rotation_about_axis(Axis::Y, std::f64::consts::FRAC_PI_2);
    let start = Vec3::new(1.0, 0.0, 0.0);
    let x_then_y = compose(&ry, &rx).apply(&start);
    let y_then_x = compose(&rx, &ry).apply(&start);

    let mut f = CsvFile::create(&dir.join("rotation_order.csv"))?;
    f.header(&["order", "in_x", "in_y", "in_z", "out_x", "out_y", "out_z"])?;
    f.labeled_row(
        "x_then_y",
        &[start.0[0], start.0[1], start.0[2], x_then_y.0[0], x_then_y.0[1], x_then_y.0[2]],
    )?;
    f.labeled_row(
        "y_then_x",
        &[start.0[0], start.0[1], start.0[2], y_then_x.0[0], y_then_x.0[1], y_then_x.0[2]],
    )?;

    println!(
        "rotation order matters: x-then-y sends (1,0,0) to ({:.3}, {:.3}, {:.3}), \
         y-then-x sends it to ({:.3}, {:.3}, {:.3})",
        x_then_y.0[0], x_then_y.0[1], x_then_y.0[2], y_then_x.0[0], y_then_x.0[1], y_then_x.0[2]
    );

    write_manifest(&dir, resolved, &[])?;
    Ok(dir)
}

pub fn run_coords(config: &CoordsConfig, resolved: &toml::Value) -> Result<PathBuf, CliError> {
    let dir = prepare_output_dir(&config.output)?;
    let matrix = InstitutionMatrix { b: config.matrix.b };
    let contributions = actor_contributions(&matrix);
    let normalized = normalize_th_vector(contributions)
        .map_err(|e| CliError::config(format!("coords: {e}")))?;
    let regime = classify_regime(&normalized, config.tolerance_angle)
        .map_err(|e| CliError::config(format!("coords: {e}")))?;

    let mut f = CsvFile::create(&dir.join("coords.csv"))?;
    f.header(&["key", "value"])?;
    f.labeled_row("contribution_g", &[contributions[0]])?;
    f.labeled_row("contribution_s", &[contributions[1]])?;
    f.labeled_row("contribution_b", &[contributions[2]])?;
    f.labeled_row("normalized_g", &[normalized.g])?;
    f.labeled_row("normalized_s", &[normalized.s])?;
    f.labeled_row("normalized_b", &[normalized.b])?;
    f.labeled_row("tolerance_angle", &[config.tolerance_angle])?;
    f.metadata("regime", regime.label())?;

    println!(
        "actor contributions (G, S, B) = ({:.4}, {:.4}, {:.4}); regime {}",
        contributions[0],
        contributions[1],
        contributions[2],
        regime.label()
    );

    write_manifest(
        &dir,
        resolved,
        &[("regime".into(), regime.label().to_owned())],
    )?;
    Ok(dir)
}

pub fn run_fractal(config: &FractalConfig, resolved: &toml::Value) -> Result<PathBuf, CliError> {
    let mode = match config.mode.as_str() {
        "TH" | "th" => HelixMode::Th,
        "DH" | "dh" => HelixMode::Dh,
        other => {
            return Err(CliError::config(format!(
                "fractal mode must be TH or DH (got '{other}')"
            )))
        }
    };
    let dir = prepare_output_dir(&config.output)?;
    let outcome = grow(&seed_tree(mode), config.generations);
    let stats = tree_stats(&outcome.tree);

    for format in &config.formats {
        match format.as_str() {
            "dot" => std::fs::write(dir.join("tree.dot"), outcome.tree.to_dot())
                .map_err(|e| CliError::io(format!("cannot write tree.dot: {e}")))?,
            "json" => std::fs::write(dir.join("tree.json"), outcome.tree.to_json())
                .map_err(|e| CliError::io(format!("cannot write tree.json: {e}")))?,
            other => {
                return Err(CliError::config(format!(
                    "unknown export format '{other}' (expected dot or json)"
                )))
            }
        }
    }

    let mut f = CsvFile::create(&dir.join("stats.csv"))?;
    f.header(&["key", "value"])?;
    f.labeled_row("nodes", &[stats.nodes as f64])?;
    f.labeled_row("open_edges", &[stats.open_edges as f64])?;
    f.labeled_row(
        "branching_factor",
        &[stats.branching_factor.unwrap_or(f64::NAN)],
    )?;
    for (depth, count) in stats.nodes_per_depth.iter().enumerate() {
        f.labeled_row(&format!("nodes_at_depth_{depth}"), &[*count as f64])?;
    }

    println!(
        "{} tree, {} generations requested: {} nodes, {} open edges{}",
        config.mode,
        config.generations,
        stats.nodes,
        stats.open_edges,
        if outcome.no_growth {
            " (no growth: the Abelian field does not self-generate)"
        } else {
            ""
        }
    );

    write_manifest(
        &dir,
        resolved,
        &[("no_growth".into(), outcome.no_growth.to_string())],
    )?;
    Ok(dir)
}

pub fn run_compare(config: &CompareConfig, resolved: &toml::Value) -> Result<PathBuf, CliError> {
    let lattice = config.lattice.build()?;
    let dir = prepare_output_dir(&config.output)?;
    let mut f = CsvFile::create(&dir.join("residuals.csv"))?;
    f.header(&["mode", "coupling", "steps", "residual"])?;

    let mode_label = match config.mode {
        CompareMode::ThSuperposition => "th-superposition",
        CompareMode::DhSuperposition => "dh-superposition",
        CompareMode::AbelianLimit => "abelian-limit",
    };

    let mut worst: f64 = 0.0;
    for &coupling in &config.couplings {
        let residual = match config.mode {
            CompareMode::ThSuperposition => {
                let mut params = ThParams::new(coupling, lattice)?;
                if let Some(c) = config.field_ceiling {
                    params = params.with_field_ceiling(c);
                }
                let a = th_initial(&config.initial_a.u, &config.initial_a.w1, &params)?;
                let b_cfg = config.initial_b.as_ref().ok_or_else(|| {
                    CliError::config("superposition modes need 'initial_b'".to_owned())
                })?;
                let b = th_initial(&b_cfg.u, &b_cfg.w1, &params)?;
                self_interaction_residual(&a, &b, &params, config.steps)?
            }
            CompareMode::DhSuperposition => {
                let mut params = DhParams::new(coupling, lattice)?;
                if let Some(c) = config.field_ceiling {
                    params = params.with_field_ceiling(c);
                }
                let b_cfg = config.initial_b.as_ref().ok_or_else(|| {
                    CliError::config("superposition modes need 'initial_b'".to_owned())
                })?;
                dh_superposition_residual(
                    &config.initial_a,
                    b_cfg,
                    &params,
                    config.steps,
                )?
            }
            CompareMode::AbelianLimit => {
                let mut params = ThParams::new(coupling, lattice)?;
                if let Some(c) = config.field_ceiling {
                    params = params.with_field_ceiling(c);
                }
                let mut init = th_initial(&config.initial_a.u, &config.initial_a.w1, &params)?;
                if let Some(b_cfg) = &config.initial_b {
                    init = init.add(&th_initial(&b_cfg.u, &b_cfg.w1, &params)?);
                }
                abelian_limit_check(&init, &params, config.steps)?
            }
        };
        worst = worst.max(residual);
        f.labeled_row(
            mode_label,
            &[coupling, config.steps as f64, residual],
        )?;
        println!("{mode_label} coupling {coupling}: residual {residual:.6e}");
    }

    write_manifest(
        &dir,
        resolved,
        &[("worst_residual".into(), fmt_f64(worst))],
    )?;

    if let Some(tolerance) = config.tolerance {
        if worst > tolerance {
            return Err(CliError::ToleranceExceeded {
                residual: worst,
                tolerance,
            });
        }
    }
    Ok(dir)
}

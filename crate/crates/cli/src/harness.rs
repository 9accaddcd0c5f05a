//! Run-and-compare helpers shared by the `compare` subcommand and the
//! acceptance suite.

use trihelix_core::field_dh::{run_dh, DhInitial, DhParams, DhState};
use trihelix_core::waves::WaveParams;

use crate::config::ThInitialConfig;
use crate::error::CliError;
use crate::init::{eval_complex, eval_scalar};

/// Builds Abelian initial data from descriptor lists: complex matter from
/// `u`, the spatial potential from `w1` (the shared gauge slot of the
/// compare config), the temporal potential starting at zero with the
/// Lorenz-consistent velocity.
pub fn dh_initial_from_descriptors(
    cfg: &ThInitialConfig,
    params: &DhParams,
) -> Result<DhInitial, CliError> {
    let lat: &WaveParams = params.lattice();
    let (u, u_vel) = eval_complex(&cfg.u, lat)?;
    let (a1, a1_vel) = eval_scalar(&cfg.w1, lat)?;
    let mut init = DhInitial::zero(lat.nx());
    init.u = u;
    init.u_vel = u_vel;
    init.a1 = a1;
    init.a1_vel = a1_vel;
    init.a0_vel = trihelix_core::field_dh::lorenz_consistent_a0_vel(&init.a1, params);
    Ok(init)
}

/// `|| evolve(A+B) - evolve(A) - evolve(B) ||_L2` for the Abelian system
/// after `steps`; the linearity witness of the source-free field.
pub fn dh_superposition_residual(
    cfg_a: &ThInitialConfig,
    cfg_b: &ThInitialConfig,
    params: &DhParams,
    steps: usize,
) -> Result<f64, CliError> {
    let a = dh_initial_from_descriptors(cfg_a, params)?;
    let b = dh_initial_from_descriptors(cfg_b, params)?;
    let sum = a.add(&b);
    let ra = run_dh(&DhState::from_initial(params, a)?, params, steps)?;
    let rb = run_dh(&DhState::from_initial(params, b)?, params, steps)?;
    let rsum = run_dh(&DhState::from_initial(params, sum)?, params, steps)?;

    let lat = params.lattice();
    let mut acc = 0.0;
    for j in 0..lat.nx() {
        acc += (rsum.u[j] - ra.u[j] - rb.u[j]).norm_sqr();
        acc += (rsum.a0[j] - ra.a0[j] - rb.a0[j]).powi(2);
        acc += (rsum.a1[j] - ra.a1[j] - rb.a1[j]).powi(2);
    }
    Ok((acc * lat.dx()).sqrt())
}

//! The Abelian (Double Helix) communication field: a complex matter field
//! `u(x,t)` minimally coupled to a gauge potential `(A_0, A_1)` on the
//! periodic lattice of [`crate::waves`].
//!
//! Conventions: metric signature (+,-) with indices i in {t, x}; covariant
//! derivative `D_i u = (d_i + i e A_i) u`; wave speed fixed to 1.  Evolution
//! is in Lorenz gauge, `d_t A_0 = d_x A_1`, imposed as an evolution
//! equation: both potentials obey
//!
//! `d_t^2 A_i = d_x^2 A_i - j_i`,   `j_i = 2 e Im(u* D_i u)`,
//!
//! and the matter field obeys the gauge-covariant wave equation with the
//! Lorenz-condition term dropped (its discrete residual is tracked by
//! [`lorenz_residual`], not fed back). Current conventions are normalized so
//! the continuity equation `d_t j^0 + d_x j^1 = 0` holds; with the raised
//! index, `j^0 = j_0` and `j^1 = -j_1`.
//!
//! Discretization is non-compact (fields, not link variables) with centered
//! differences; time stepping is leapfrog with the first-derivative coupling
//! term `2 i e A_0 d_t u` time-centered, which makes each site update a
//! single complex division. One step updates `u` first, so that the currents
//! sourcing the potentials can use a time-centered `d_t u`; the scheme is
//! second order overall and reduces bit-exactly to the free leapfrog at
//! `e = 0`.

use num_complex::Complex64;
use thiserror::Error;

use crate::waves::{WaveError, WaveParams};

#[derive(Debug, Error)]
pub enum DhError {
    #[error(transparent)]
    Lattice(#[from] WaveError),
    #[error("gauge modules fix the wave speed to 1 (got a = {a})")]
    UnitSpeedRequired { a: f64 },
    #[error("coupling e must be finite (got {e})")]
    BadCoupling { e: f64 },
    #[error("instability at step {step}: |{field}| reached {magnitude:.3e} (ceiling {ceiling:.3e})")]
    Instability {
        step: u64,
        field: &'static str,
        magnitude: f64,
        ceiling: f64,
    },
    #[error("gauge transform with e = 0 requires a constant profile")]
    GaugeNeedsCoupling,
    #[error("gauge slope {slope} is not periodic on this lattice (k L / 2pi must be an integer)")]
    NonPeriodicGauge { slope: f64 },
    #[error("field length {got} does not match lattice size {expected}")]
    BadDimensions { expected: usize, got: usize },
}

/// Coupling strength plus the shared lattice description (`a` must be 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhParams {
    e: f64,
    lattice: WaveParams,
    field_ceiling: f64,
}

impl DhParams {
    pub fn new(e: f64, lattice: WaveParams) -> Result<Self, DhError> {
        if lattice.a() != 1.0 {
            return Err(DhError::UnitSpeedRequired { a: lattice.a() });
        }
        if !e.is_finite() {
            return Err(DhError::BadCoupling { e });
        }
        Ok(DhParams {
            e,
            lattice,
            field_ceiling: 1e6,
        })
    }

    /// Overrides the instability ceiling (default 1e6).
    pub fn with_field_ceiling(mut self, ceiling: f64) -> Self {
        self.field_ceiling = ceiling;
        self
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn lattice(&self) -> &WaveParams {
        &self.lattice
    }

    pub fn field_ceiling(&self) -> f64 {
        self.field_ceiling
    }
}

/// Two consecutive time levels of the coupled matter + gauge system.
#[derive(Debug, Clone, PartialEq)]
pub struct DhState {
    pub u: Vec<Complex64>,
    pub u_prev: Vec<Complex64>,
    pub a0: Vec<f64>,
    pub a0_prev: Vec<f64>,
    pub a1: Vec<f64>,
    pub a1_prev: Vec<f64>,
    pub time_index: u64,
}

/// Initial field and velocity data for [`DhState::from_initial`].
#[derive(Debug, Clone, PartialEq)]
pub struct DhInitial {
    pub u: Vec<Complex64>,
    pub u_vel: Vec<Complex64>,
    pub a0: Vec<f64>,
    pub a0_vel: Vec<f64>,
    pub a1: Vec<f64>,
    pub a1_vel: Vec<f64>,
}

impl DhInitial {
    pub fn zero(nx: usize) -> Self {
        DhInitial {
            u: vec![Complex64::new(0.0, 0.0); nx],
            u_vel: vec![Complex64::new(0.0, 0.0); nx],
            a0: vec![0.0; nx],
            a0_vel: vec![0.0; nx],
            a1: vec![0.0; nx],
            a1_vel: vec![0.0; nx],
        }
    }

    /// Fieldwise sum, for superposition harnesses.
    pub fn add(&self, other: &DhInitial) -> DhInitial {
        let zip_c = |a: &[Complex64], b: &[Complex64]| {
            a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>()
        };
        let zip_r = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
        DhInitial {
            u: zip_c(&self.u, &other.u),
            u_vel: zip_c(&self.u_vel, &other.u_vel),
            a0: zip_r(&self.a0, &other.a0),
            a0_vel: zip_r(&self.a0_vel, &other.a0_vel),
            a1: zip_r(&self.a1, &other.a1),
            a1_vel: zip_r(&self.a1_vel, &other.a1_vel),
        }
    }
}

fn check_len<T>(v: &[T], nx: usize) -> Result<(), DhError> {
    if v.len() != nx {
        return Err(DhError::BadDimensions {
            expected: nx,
            got: v.len(),
        });
    }
    Ok(())
}

/// Centered spatial derivative of the initial gauge potential; assigning it
/// as the `a0` velocity makes the initial data satisfy the Lorenz condition
/// exactly at the discrete level.
pub fn lorenz_consistent_a0_vel(a1: &[f64], params: &DhParams) -> Vec<f64> {
    let lat = params.lattice();
    let two_dx = 2.0 * lat.dx();
    (0..lat.nx())
        .map(|j| {
            let (jm, jp) = lat.neighbors(j);
            (a1[jp] - a1[jm]) / two_dx
        })
        .collect()
}

impl DhState {
    pub fn zero(params: &DhParams) -> Self {
        let nx = params.lattice().nx();
        DhState {
            u: vec![Complex64::new(0.0, 0.0); nx],
            u_prev: vec![Complex64::new(0.0, 0.0); nx],
            a0: vec![0.0; nx],
            a0_prev: vec![0.0; nx],
            a1: vec![0.0; nx],
            a1_prev: vec![0.0; nx],
            time_index: 0,
        }
    }

    /// Backward-Taylor bootstrap of the pre-initial level from fields and
    /// velocities, using each field's own equation of motion for the
    /// acceleration so the first step stays second order.
    pub fn from_initial(params: &DhParams, init: DhInitial) -> Result<Self, DhError> {
        let lat = params.lattice();
        let nx = lat.nx();
        check_len(&init.u, nx)?;
        check_len(&init.u_vel, nx)?;
        check_len(&init.a0, nx)?;
        check_len(&init.a0_vel, nx)?;
        check_len(&init.a1, nx)?;
        check_len(&init.a1_vel, nx)?;

        let e = params.e();
        let dt = lat.dt();
        let s2 = lat.courant_sq();
        let two_dx = 2.0 * lat.dx();
        let i_unit = Complex64::new(0.0, 1.0);

        let mut u_prev = vec![Complex64::new(0.0, 0.0); nx];
        let mut a0_prev = vec![0.0; nx];
        let mut a1_prev = vec![0.0; nx];
        for j in 0..nx {
            let (jm, jp) = lat.neighbors(j);

            let lap_u = init.u[jp] - init.u[j] * 2.0 + init.u[jm];
            let ux = (init.u[jp] - init.u[jm]) / two_dx;
            // u_tt = u_xx - 2ie(A0 u_t - A1 u_x) + e^2 (A0^2 - A1^2) u,
            // with the spatial second derivative folded into the shared
            // Courant form; `extra` collects the coupling terms only.
            let extra_u = -i_unit * (2.0 * e) * (init.u_vel[j] * init.a0[j] - ux * init.a1[j])
                + init.u[j] * (e * e * (init.a0[j] * init.a0[j] - init.a1[j] * init.a1[j]));
            u_prev[j] =
                init.u[j] - init.u_vel[j] * dt + lap_u * (0.5 * s2) + extra_u * (0.5 * dt * dt);

            let d0u = init.u_vel[j] + i_unit * e * init.a0[j] * init.u[j];
            let d1u = ux + i_unit * e * init.a1[j] * init.u[j];
            let j0 = 2.0 * e * (init.u[j].conj() * d0u).im;
            let j1 = 2.0 * e * (init.u[j].conj() * d1u).im;

            let lap_a0 = init.a0[jp] - 2.0 * init.a0[j] + init.a0[jm];
            a0_prev[j] = init.a0[j] - dt * init.a0_vel[j] + 0.5 * s2 * lap_a0
                - 0.5 * dt * dt * j0;
            let lap_a1 = init.a1[jp] - 2.0 * init.a1[j] + init.a1[jm];
            a1_prev[j] = init.a1[j] - dt * init.a1_vel[j] + 0.5 * s2 * lap_a1
                - 0.5 * dt * dt * j1;
        }

        Ok(DhState {
            u: init.u,
            u_prev,
            a0: init.a0,
            a0_prev,
            a1: init.a1,
            a1_prev,
            time_index: 0,
        })
    }

    pub fn check_dims(&self, params: &DhParams) -> Result<(), DhError> {
        let nx = params.lattice().nx();
        check_len(&self.u, nx)?;
        check_len(&self.u_prev, nx)?;
        check_len(&self.a0, nx)?;
        check_len(&self.a0_prev, nx)?;
        check_len(&self.a1, nx)?;
        check_len(&self.a1_prev, nx)?;
        Ok(())
    }
}

/// Time (`T`) or space (`X`) direction for covariant derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    T,
    X,
}

/// Half-level field average between the two stored layers.
fn mid_c(cur: &[Complex64], prev: &[Complex64], j: usize) -> Complex64 {
    (cur[j] + prev[j]) * 0.5
}

fn mid_r(cur: &[f64], prev: &[f64], j: usize) -> f64 {
    0.5 * (cur[j] + prev[j])
}

/// Covariant derivative `D_i u = (d_i + i e A_i) u`, evaluated per site with
/// centered differences at the half-level between the two stored layers
/// (time direction: level difference over `dt`; space direction: centered
/// difference of the level-averaged field).
pub fn covariant_derivative_dh(
    state: &DhState,
    params: &DhParams,
    direction: Direction,
) -> Vec<Complex64> {
    let lat = params.lattice();
    let nx = lat.nx();
    let e = params.e();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(nx);
    for j in 0..nx {
        let um = mid_c(&state.u, &state.u_prev, j);
        let d = match direction {
            Direction::T => {
                let dudt = (state.u[j] - state.u_prev[j]) / lat.dt();
                let a0 = mid_r(&state.a0, &state.a0_prev, j);
                dudt + i_unit * e * a0 * um
            }
            Direction::X => {
                let (jm, jp) = lat.neighbors(j);
                let dudx = (mid_c(&state.u, &state.u_prev, jp)
                    - mid_c(&state.u, &state.u_prev, jm))
                    / (2.0 * lat.dx());
                let a1 = mid_r(&state.a1, &state.a1_prev, j);
                dudx + i_unit * e * a1 * um
            }
        };
        out.push(d);
    }
    out
}

/// Gauge current `j^i = -ie (u* D^i u - u D^i u*)`, returned as the real
/// pair `(j^0, j^1)` per site. With the (+,-) signature this reduces to
/// `j^0 = 2e Im(u* D_0 u)` and `j^1 = -2e Im(u* D_1 u)`.
pub fn current_dh(state: &DhState, params: &DhParams) -> (Vec<f64>, Vec<f64>) {
    let e = params.e();
    let d0 = covariant_derivative_dh(state, params, Direction::T);
    let d1 = covariant_derivative_dh(state, params, Direction::X);
    let nx = params.lattice().nx();
    let mut j0 = Vec::with_capacity(nx);
    let mut j1 = Vec::with_capacity(nx);
    for j in 0..nx {
        let um = mid_c(&state.u, &state.u_prev, j);
        j0.push(2.0 * e * (um.conj() * d0[j]).im);
        j1.push(-2.0 * e * (um.conj() * d1[j]).im);
    }
    (j0, j1)
}

/// Total charge `Q = sum_j j^0 dx`; conserved by the continuity equation.
pub fn total_charge(state: &DhState, params: &DhParams) -> f64 {
    let (j0, _) = current_dh(state, params);
    j0.iter().sum::<f64>() * params.lattice().dx()
}

/// Field strength `F_01 = d_t A_1 - d_x A_0` per site (half-level values).
pub fn field_strength_dh(state: &DhState, params: &DhParams) -> Vec<f64> {
    let lat = params.lattice();
    let two_dx = 2.0 * lat.dx();
    (0..lat.nx())
        .map(|j| {
            let (jm, jp) = lat.neighbors(j);
            let da1_dt = (state.a1[j] - state.a1_prev[j]) / lat.dt();
            let da0_dx =
                (mid_r(&state.a0, &state.a0_prev, jp) - mid_r(&state.a0, &state.a0_prev, jm))
                    / two_dx;
            da1_dt - da0_dx
        })
        .collect()
}

/// L2 norm of the Lorenz-gauge residual `d_t A_0 - d_x A_1`. A diagnostic:
/// the evolution does not feed it back.
pub fn lorenz_residual(state: &DhState, params: &DhParams) -> f64 {
    let lat = params.lattice();
    let two_dx = 2.0 * lat.dx();
    let mut sum = 0.0;
    for j in 0..lat.nx() {
        let (jm, jp) = lat.neighbors(j);
        let da0_dt = (state.a0[j] - state.a0_prev[j]) / lat.dt();
        let da1_dx = (mid_r(&state.a1, &state.a1_prev, jp)
            - mid_r(&state.a1, &state.a1_prev, jm))
            / two_dx;
        let r = da0_dt - da1_dx;
        sum += r * r;
    }
    (sum * lat.dx()).sqrt()
}

/// Link-covariant forward difference of one stored level,
/// `(e^{+i e dx A_mid} u_{j+1} - u_j) / dx`, with the link phase from the
/// midpoint-averaged potential of the same level. Exactly covariant under
/// constant and linear gauge profiles, and a consistent O(dx^2)
/// discretization of `D_1 u`.
fn forward_covariant(
    u: &[Complex64],
    a1: &[f64],
    e: f64,
    lat: &WaveParams,
    j: usize,
) -> Complex64 {
    let (_, jp) = lat.neighbors(j);
    let phase = Complex64::from_polar(1.0, e * lat.dx() * 0.5 * (a1[j] + a1[jp]));
    (phase * u[jp] - u[j]) / lat.dx()
}

/// Gauge-invariant energy `E = sum_j dx [ |D_0 u|^2/2 + |D_1 u|^2/2 + F_01^2/2 ]`.
///
/// The covariant time derivative lives at the half-level between the stored
/// layers; the spatial term takes the real product of the link-covariant
/// forward differences of the two layers, the combination the leapfrog
/// scheme conserves exactly in the decoupled limit (squaring a single layer
/// instead would oscillate at O(dt^2)). Both building blocks are exactly
/// invariant under constant and linear gauge profiles.
pub fn energy_dh(state: &DhState, params: &DhParams) -> f64 {
    let lat = params.lattice();
    let e = params.e();
    let d0 = covariant_derivative_dh(state, params, Direction::T);
    let f01 = field_strength_dh(state, params);
    let mut total = 0.0;
    for j in 0..lat.nx() {
        let g_cur = forward_covariant(&state.u, &state.a1, e, lat, j);
        let g_prev = forward_covariant(&state.u_prev, &state.a1_prev, e, lat, j);
        let grad = (g_cur * g_prev.conj()).re;
        total += 0.5 * (d0[j].norm_sqr() + grad + f01[j] * f01[j]);
    }
    total * lat.dx()
}

fn guard(
    step: u64,
    field: &'static str,
    magnitude: f64,
    ceiling: f64,
) -> Result<(), DhError> {
    if !magnitude.is_finite() || magnitude > ceiling {
        return Err(DhError::Instability {
            step,
            field,
            magnitude,
            ceiling,
        });
    }
    Ok(())
}

/// One leapfrog step of the coupled system.
///
/// Order within the step: the matter field advances first (implicit complex
/// division for the time-centered `2 i e A_0 d_t u` term), then both gauge
/// potentials advance with their currents evaluated at the now-centered
/// time level.
pub fn step_dh(state: &DhState, params: &DhParams) -> Result<DhState, DhError> {
    state.check_dims(params)?;
    let lat = params.lattice();
    let courant = lat.courant();
    if courant > 1.0 {
        return Err(WaveError::CourantViolation { courant }.into());
    }
    let nx = lat.nx();
    let e = params.e();
    let dt = lat.dt();
    let dt2 = dt * dt;
    let s2 = lat.courant_sq();
    let two_dx = 2.0 * lat.dx();
    let i_unit = Complex64::new(0.0, 1.0);

    // Matter update.
    let mut u_next = Vec::with_capacity(nx);
    for j in 0..nx {
        let (jm, jp) = lat.neighbors(j);
        let cur = state.u[j];
        let lap = state.u[jp] - cur * 2.0 + state.u[jm];
        let ux = (state.u[jp] - state.u[jm]) / two_dx;
        let coupling = i_unit * (2.0 * e * state.a1[j]) * ux
            + cur * (e * e * (state.a0[j] * state.a0[j] - state.a1[j] * state.a1[j]));
        let numerator = cur * 2.0 - state.u_prev[j]
            + lap * s2
            + coupling * dt2
            + i_unit * (e * dt * state.a0[j]) * state.u_prev[j];
        let denominator = Complex64::new(1.0, e * dt * state.a0[j]);
        u_next.push(numerator / denominator);
    }

    // Gauge updates, sourced by the currents at the current level with the
    // matter time derivative now available centered.
    let mut a0_next = Vec::with_capacity(nx);
    let mut a1_next = Vec::with_capacity(nx);
    for j in 0..nx {
        let (jm, jp) = lat.neighbors(j);
        let dudt = (u_next[j] - state.u_prev[j]) / (2.0 * dt);
        let dudx = (state.u[jp] - state.u[jm]) / two_dx;
        let d0u = dudt + i_unit * e * state.a0[j] * state.u[j];
        let d1u = dudx + i_unit * e * state.a1[j] * state.u[j];
        let j0 = 2.0 * e * (state.u[j].conj() * d0u).im;
        let j1 = 2.0 * e * (state.u[j].conj() * d1u).im;

        let lap_a0 = state.a0[jp] - 2.0 * state.a0[j] + state.a0[jm];
        a0_next.push(2.0 * state.a0[j] - state.a0_prev[j] + s2 * lap_a0 - dt2 * j0);
        let lap_a1 = state.a1[jp] - 2.0 * state.a1[j] + state.a1[jm];
        a1_next.push(2.0 * state.a1[j] - state.a1_prev[j] + s2 * lap_a1 - dt2 * j1);
    }

    let step = state.time_index + 1;
    let ceiling = params.field_ceiling();
    let u_max = u_next.iter().map(|z| z.norm()).fold(0.0, f64::max);
    guard(step, "u", u_max, ceiling)?;
    let a0_max = a0_next.iter().map(|v| v.abs()).fold(0.0, f64::max);
    guard(step, "A0", a0_max, ceiling)?;
    let a1_max = a1_next.iter().map(|v| v.abs()).fold(0.0, f64::max);
    guard(step, "A1", a1_max, ceiling)?;

    Ok(DhState {
        u_prev: state.u.clone(),
        u: u_next,
        a0_prev: state.a0.clone(),
        a0: a0_next,
        a1_prev: state.a1.clone(),
        a1: a1_next,
        time_index: step,
    })
}

/// Advances `steps` leapfrog steps, returning the final state.
pub fn run_dh(state: &DhState, params: &DhParams, steps: usize) -> Result<DhState, DhError> {
    let mut s = state.clone();
    for _ in 0..steps {
        s = step_dh(&s, params)?;
    }
    Ok(s)
}

/// A gauge profile `Lambda(x, t) = spatial(x) + time_rate * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialGauge {
    Constant(f64),
    /// `Lambda = slope * x`; the slope must wind an integer number of times
    /// around the periodic domain so that `e^{-i Lambda}` stays single
    /// valued.
    Linear { slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeTransform {
    pub spatial: SpatialGauge,
    pub time_rate: f64,
}

impl GaugeTransform {
    pub fn constant(c: f64) -> Self {
        GaugeTransform {
            spatial: SpatialGauge::Constant(c),
            time_rate: 0.0,
        }
    }

    pub fn linear(slope: f64) -> Self {
        GaugeTransform {
            spatial: SpatialGauge::Linear { slope },
            time_rate: 0.0,
        }
    }

    fn value_at(&self, x: f64, t: f64) -> f64 {
        let spatial = match self.spatial {
            SpatialGauge::Constant(c) => c,
            SpatialGauge::Linear { slope } => slope * x,
        };
        spatial + self.time_rate * t
    }

    fn spatial_derivative(&self) -> f64 {
        match self.spatial {
            SpatialGauge::Constant(_) => 0.0,
            SpatialGauge::Linear { slope } => slope,
        }
    }

    fn is_constant(&self) -> bool {
        self.spatial_derivative() == 0.0 && self.time_rate == 0.0
    }
}

/// Applies `u -> e^{-i Lambda} u`, `A_i -> A_i + (1/e) d_i Lambda` to both
/// stored levels. Gauge-invariant observables (`|u|^2`, `F_01`, the energy)
/// are unchanged.
pub fn gauge_transform_dh(
    state: &DhState,
    params: &DhParams,
    transform: &GaugeTransform,
) -> Result<DhState, DhError> {
    state.check_dims(params)?;
    let lat = params.lattice();
    let e = params.e();
    if e == 0.0 && !transform.is_constant() {
        return Err(DhError::GaugeNeedsCoupling);
    }
    if let SpatialGauge::Linear { slope } = transform.spatial {
        let winding = slope * lat.length() / (2.0 * std::f64::consts::PI);
        if (winding - winding.round()).abs() > 1e-9 {
            return Err(DhError::NonPeriodicGauge { slope });
        }
    }

    let t_cur = state.time_index as f64 * lat.dt();
    let t_prev = t_cur - lat.dt();
    let (da_dx, da_dt) = if e == 0.0 {
        (0.0, 0.0)
    } else {
        (transform.spatial_derivative() / e, transform.time_rate / e)
    };

    let mut out = state.clone();
    for j in 0..lat.nx() {
        let x = lat.x(j);
        out.u[j] *= Complex64::from_polar(1.0, -transform.value_at(x, t_cur));
        out.u_prev[j] *= Complex64::from_polar(1.0, -transform.value_at(x, t_prev));
        out.a0[j] += da_dt;
        out.a0_prev[j] += da_dt;
        out.a1[j] += da_dx;
        out.a1_prev[j] += da_dx;
    }
    Ok(out)
}

/// L2 distance between the current layers of two states, over all fields.
pub fn l2_distance_dh(a: &DhState, b: &DhState, params: &DhParams) -> f64 {
    let mut sum = 0.0;
    for j in 0..params.lattice().nx() {
        sum += (a.u[j] - b.u[j]).norm_sqr();
        sum += (a.a0[j] - b.a0[j]).powi(2);
        sum += (a.a1[j] - b.a1[j]).powi(2);
    }
    (sum * params.lattice().dx()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(e: f64) -> DhParams {
        let lat = WaveParams::new(1.0, 64, 1.0 / 64.0, 0.5 / 64.0).unwrap();
        DhParams::new(e, lat).unwrap()
    }

    #[test]
    fn requires_unit_speed() {
        let lat = WaveParams::new(0.5, 64, 1.0 / 64.0, 0.5 / 64.0).unwrap();
        assert!(matches!(
            DhParams::new(1.0, lat),
            Err(DhError::UnitSpeedRequired { .. })
        ));
    }

    #[test]
    fn covariant_derivative_reduces_to_plain_derivative_at_zero_coupling() {
        let p = params(0.0);
        let nx = p.lattice().nx();
        let mut state = DhState::zero(&p);
        for j in 0..nx {
            let x = p.lattice().x(j);
            let v = Complex64::new((2.0 * std::f64::consts::PI * x).sin(), 0.0);
            state.u[j] = v;
            state.u_prev[j] = v;
            state.a1[j] = 3.0;
            state.a1_prev[j] = 3.0;
        }
        let d1 = covariant_derivative_dh(&state, &p, Direction::X);
        for j in 0..nx {
            let (jm, jp) = p.lattice().neighbors(j);
            let plain = (state.u[jp] - state.u[jm]) / (2.0 * p.lattice().dx());
            assert!((d1[j] - plain).norm() < 1e-15);
        }
    }

    #[test]
    fn covariant_derivative_of_zero_field_is_zero() {
        let p = params(0.7);
        let state = DhState::zero(&p);
        for d in covariant_derivative_dh(&state, &p, Direction::T) {
            assert_eq!(d.norm(), 0.0);
        }
    }

    #[test]
    fn covariant_derivative_constant_field_picks_up_potential() {
        let p = params(0.5);
        let mut state = DhState::zero(&p);
        let a = 1.3;
        for j in 0..p.lattice().nx() {
            state.u[j] = Complex64::new(1.0, 0.0);
            state.u_prev[j] = Complex64::new(1.0, 0.0);
            state.a1[j] = a;
            state.a1_prev[j] = a;
        }
        let d1 = covariant_derivative_dh(&state, &p, Direction::X);
        for d in d1 {
            assert!((d - Complex64::new(0.0, 0.5 * a)).norm() < 1e-15);
        }
    }

    #[test]
    fn current_vanishes_for_zero_and_real_fields() {
        let p = params(1.0);
        let (j0, j1) = current_dh(&DhState::zero(&p), &p);
        assert!(j0.iter().chain(j1.iter()).all(|&v| v == 0.0));

        // Real static u with A = 0: u* du - u du* cancels identically.
        let mut state = DhState::zero(&p);
        for j in 0..p.lattice().nx() {
            let x = p.lattice().x(j);
            let v = Complex64::new((2.0 * std::f64::consts::PI * x).cos(), 0.0);
            state.u[j] = v;
            state.u_prev[j] = v;
        }
        let (j0, j1) = current_dh(&state, &p);
        for v in j0.iter().chain(j1.iter()) {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn plane_wave_current_is_uniform_and_proportional_to_k() {
        let p = params(1.0);
        let lat = p.lattice();
        let k = 2.0 * std::f64::consts::PI * 3.0 / lat.length();
        let mut state = DhState::zero(&p);
        for j in 0..lat.nx() {
            let v = Complex64::from_polar(1.0, k * lat.x(j));
            state.u[j] = v;
            state.u_prev[j] = v;
        }
        let (_, j1) = current_dh(&state, &p);
        // Hand substitution of u = e^{ikx} into the discrete formula:
        // D_1 u = i sin(k dx)/dx u, so j^1 = -2 e sin(k dx)/dx.
        let expect = -2.0 * p.e() * (k * lat.dx()).sin() / lat.dx();
        for v in &j1 {
            assert_abs_diff_eq!(*v, expect, epsilon = 1e-12);
        }
        // Continuum value -2ek within the O((k dx)^2) discretization error.
        assert_abs_diff_eq!(j1[0], -2.0 * p.e() * k, epsilon = 2.0 * k * (k * lat.dx()).powi(2));
    }

    #[test]
    fn gauge_transform_trivial_cases() {
        let p = params(0.5);
        let mut init = DhInitial::zero(p.lattice().nx());
        for j in 0..p.lattice().nx() {
            let x = p.lattice().x(j) - 0.5;
            init.u[j] = Complex64::new((-x * x / 0.01).exp(), 0.3);
            init.a1[j] = 0.2 * (-x * x / 0.02).exp();
        }
        init.a0_vel = lorenz_consistent_a0_vel(&init.a1, &p);
        let state = DhState::from_initial(&p, init).unwrap();

        // Identity profile.
        let id = gauge_transform_dh(&state, &p, &GaugeTransform::constant(0.0)).unwrap();
        assert_eq!(id, state);

        // Constant profile: |u| and the potentials are untouched.
        let shifted = gauge_transform_dh(&state, &p, &GaugeTransform::constant(1.1)).unwrap();
        for j in 0..p.lattice().nx() {
            assert_abs_diff_eq!(shifted.u[j].norm(), state.u[j].norm(), epsilon = 1e-15);
            assert_eq!(shifted.a0[j], state.a0[j]);
            assert_eq!(shifted.a1[j], state.a1[j]);
        }

        // e = 0 with a nonconstant profile is rejected.
        let p0 = params(0.0);
        let z = DhState::zero(&p0);
        assert!(matches!(
            gauge_transform_dh(&z, &p0, &GaugeTransform::linear(2.0 * std::f64::consts::PI)),
            Err(DhError::GaugeNeedsCoupling)
        ));

        // Non-periodic winding rejected.
        assert!(matches!(
            gauge_transform_dh(&state, &p, &GaugeTransform::linear(1.0)),
            Err(DhError::NonPeriodicGauge { .. })
        ));
    }

    #[test]
    fn instability_guard_trips() {
        let p = params(0.0).with_field_ceiling(0.5);
        let mut init = DhInitial::zero(p.lattice().nx());
        for j in 0..p.lattice().nx() {
            let x = p.lattice().x(j) - 0.5;
            init.u[j] = Complex64::new(2.0 * (-x * x / 0.01).exp(), 0.0);
        }
        let state = DhState::from_initial(&p, init).unwrap();
        match step_dh(&state, &p) {
            Err(DhError::Instability { step, field, .. }) => {
                assert_eq!(step, 1);
                assert_eq!(field, "u");
            }
            other => panic!("expected instability, got {other:?}"),
        }
    }
}

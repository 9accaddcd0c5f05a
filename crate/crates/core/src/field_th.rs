//! The non-Abelian (Triple Helix) communication field: a 3-component
//! isovector matter field `u(x,t)` coupled to an SU(2) gauge potential
//! `W_i` (spacetime index i in {t, x}, adjoint internal index a in {1,2,3})
//! on the periodic lattice of [`crate::waves`].
//!
//! Conventions: signature (+,-), `D_i u = d_i u + g W_i x u` (cross product
//! in internal space), field strength
//! `W_01 = d_t W_1 - d_x W_0 + g W_0 x W_1`, wave speed 1.
//!
//! In 1+1 dimensions the temporal gauge would kill the `W_i x W_j`
//! self-interaction identically, so evolution is in a Lorenz-type gauge
//! (`d_t W_0 = d_x W_1` per internal component, imposed as an evolution
//! equation) with both potentials dynamical. Eliminating `W_01` and the
//! gauge condition from the field equation `D^j W_ij = g (D_i u) x u` gives
//!
//! `d_t^2 W_1 = d_x^2 W_1 - g[(d_x W_1) x W_1 - W_0 x d_x W_0
//!              + g W_0 x (W_0 x W_1)] - 2g W_0 x d_t W_1 - g (D_1 u) x u`
//! `d_t^2 W_0 = d_x^2 W_0 - g[d_x(W_0 x W_1) + W_1 x W_01] - g (D_0 u) x u`
//!
//! and the matter field obeys the covariant wave equation with its Lorenz
//! term dropped. Nonlinear terms are explicit at the current level; the
//! first-derivative couplings `W_0 x d_t(.)` are time-centered, which makes
//! each site update one closed-form 3x3 solve. A step advances `u`, then
//! `W_1`, then `W_0`, so every time derivative that feeds a source is
//! available centered; at `g = 0` the update reduces bit-exactly to three
//! decoupled free leapfrogs per field.

use thiserror::Error;

use crate::symmetry::RotationMatrix;
use crate::waves::{WaveError, WaveParams};

#[derive(Debug, Error)]
pub enum ThError {
    #[error(transparent)]
    Lattice(#[from] WaveError),
    #[error("gauge modules fix the wave speed to 1 (got a = {a})")]
    UnitSpeedRequired { a: f64 },
    #[error("coupling g must be finite (got {g})")]
    BadCoupling { g: f64 },
    #[error("instability at step {step}: |{field}| reached {magnitude:.3e} (ceiling {ceiling:.3e})")]
    Instability {
        step: u64,
        field: &'static str,
        magnitude: f64,
        ceiling: f64,
    },
    #[error("field length {got} does not match lattice size {expected}")]
    BadDimensions { expected: usize, got: usize },
}

/// Standard cross product in the 3-dimensional internal space.
pub fn internal_cross(p: [f64; 3], q: [f64; 3]) -> [f64; 3] {
    [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ]
}

fn dot3(p: [f64; 3], q: [f64; 3]) -> f64 {
    p[0] * q[0] + p[1] * q[1] + p[2] * q[2]
}

fn norm3(p: [f64; 3]) -> f64 {
    dot3(p, p).sqrt()
}

/// Non-Abelian coupling plus the shared lattice description (`a` must be 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThParams {
    g: f64,
    lattice: WaveParams,
    field_ceiling: f64,
}

impl ThParams {
    pub fn new(g: f64, lattice: WaveParams) -> Result<Self, ThError> {
        if lattice.a() != 1.0 {
            return Err(ThError::UnitSpeedRequired { a: lattice.a() });
        }
        if !g.is_finite() {
            return Err(ThError::BadCoupling { g });
        }
        Ok(ThParams {
            g,
            lattice,
            field_ceiling: 1e6,
        })
    }

    pub fn with_field_ceiling(mut self, ceiling: f64) -> Self {
        self.field_ceiling = ceiling;
        self
    }

    /// Same lattice and ceiling, different coupling.
    pub fn with_coupling(&self, g: f64) -> Result<Self, ThError> {
        if !g.is_finite() {
            return Err(ThError::BadCoupling { g });
        }
        Ok(ThParams { g, ..*self })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn lattice(&self) -> &WaveParams {
        &self.lattice
    }

    pub fn field_ceiling(&self) -> f64 {
        self.field_ceiling
    }
}

/// Two consecutive time levels of the coupled isovector system.
#[derive(Debug, Clone, PartialEq)]
pub struct ThFieldState {
    pub u: Vec<[f64; 3]>,
    pub u_prev: Vec<[f64; 3]>,
    pub w0: Vec<[f64; 3]>,
    pub w0_prev: Vec<[f64; 3]>,
    pub w1: Vec<[f64; 3]>,
    pub w1_prev: Vec<[f64; 3]>,
    pub time_index: u64,
}

/// Initial field and velocity data for [`ThFieldState::from_initial`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThInitial {
    pub u: Vec<[f64; 3]>,
    pub u_vel: Vec<[f64; 3]>,
    pub w0: Vec<[f64; 3]>,
    pub w0_vel: Vec<[f64; 3]>,
    pub w1: Vec<[f64; 3]>,
    pub w1_vel: Vec<[f64; 3]>,
}

impl ThInitial {
    pub fn zero(nx: usize) -> Self {
        ThInitial {
            u: vec![[0.0; 3]; nx],
            u_vel: vec![[0.0; 3]; nx],
            w0: vec![[0.0; 3]; nx],
            w0_vel: vec![[0.0; 3]; nx],
            w1: vec![[0.0; 3]; nx],
            w1_vel: vec![[0.0; 3]; nx],
        }
    }

    /// Fieldwise sum, for superposition harnesses.
    pub fn add(&self, other: &ThInitial) -> ThInitial {
        let zip = |a: &[[f64; 3]], b: &[[f64; 3]]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| [x[0] + y[0], x[1] + y[1], x[2] + y[2]])
                .collect::<Vec<_>>()
        };
        ThInitial {
            u: zip(&self.u, &other.u),
            u_vel: zip(&self.u_vel, &other.u_vel),
            w0: zip(&self.w0, &other.w0),
            w0_vel: zip(&self.w0_vel, &other.w0_vel),
            w1: zip(&self.w1, &other.w1),
            w1_vel: zip(&self.w1_vel, &other.w1_vel),
        }
    }
}

fn check_len(len: usize, nx: usize) -> Result<(), ThError> {
    if len != nx {
        return Err(ThError::BadDimensions {
            expected: nx,
            got: len,
        });
    }
    Ok(())
}

/// Centered spatial derivative of the initial `w1`; assigning it as the
/// `w0` velocity makes the initial data satisfy the Lorenz-type condition
/// exactly at the discrete level.
///
/// For the condition to also hold to first order in time, the remaining
/// data must satisfy `d_x(w1_vel) = d_t^2 W_0` at t = 0; source-free data
/// with `w0 = 0` and `w1_vel = 0` does so for any coupling.
pub fn lorenz_consistent_w0_vel(w1: &[[f64; 3]], params: &ThParams) -> Vec<[f64; 3]> {
    let lat = params.lattice();
    let two_dx = 2.0 * lat.dx();
    (0..lat.nx())
        .map(|j| {
            let (jm, jp) = lat.neighbors(j);
            [
                (w1[jp][0] - w1[jm][0]) / two_dx,
                (w1[jp][1] - w1[jm][1]) / two_dx,
                (w1[jp][2] - w1[jm][2]) / two_dx,
            ]
        })
        .collect()
}

/// Solves `(I + [w]_x) out = rhs` in closed form,
/// `out = (rhs - w x rhs + w (w . rhs)) / (1 + |w|^2)`.
fn solve_cross_system(w: [f64; 3], rhs: [f64; 3]) -> [f64; 3] {
    let cross = internal_cross(w, rhs);
    let wd = dot3(w, rhs);
    let denom = 1.0 + dot3(w, w);
    [
        (rhs[0] - cross[0] + w[0] * wd) / denom,
        (rhs[1] - cross[1] + w[1] * wd) / denom,
        (rhs[2] - cross[2] + w[2] * wd) / denom,
    ]
}

impl ThFieldState {
    pub fn zero(params: &ThParams) -> Self {
        let nx = params.lattice().nx();
        ThFieldState {
            u: vec![[0.0; 3]; nx],
            u_prev: vec![[0.0; 3]; nx],
            w0: vec![[0.0; 3]; nx],
            w0_prev: vec![[0.0; 3]; nx],
            w1: vec![[0.0; 3]; nx],
            w1_prev: vec![[0.0; 3]; nx],
            time_index: 0,
        }
    }

    /// Backward-Taylor bootstrap of the pre-initial level, using each
    /// field's own equation of motion for the acceleration.
    pub fn from_initial(params: &ThParams, init: ThInitial) -> Result<Self, ThError> {
        let lat = params.lattice();
        let nx = lat.nx();
        check_len(init.u.len(), nx)?;
        check_len(init.u_vel.len(), nx)?;
        check_len(init.w0.len(), nx)?;
        check_len(init.w0_vel.len(), nx)?;
        check_len(init.w1.len(), nx)?;
        check_len(init.w1_vel.len(), nx)?;

        let g = params.g();
        let dt = lat.dt();
        let s2 = lat.courant_sq();
        let two_dx = 2.0 * lat.dx();

        let centered = |f: &[[f64; 3]], jm: usize, jp: usize| {
            [
                (f[jp][0] - f[jm][0]) / two_dx,
                (f[jp][1] - f[jm][1]) / two_dx,
                (f[jp][2] - f[jm][2]) / two_dx,
            ]
        };

        let mut u_prev = vec![[0.0; 3]; nx];
        let mut w0_prev = vec![[0.0; 3]; nx];
        let mut w1_prev = vec![[0.0; 3]; nx];

        // d_x(W_0 x W_1) needs the product field at the neighbors.
        let p_field: Vec<[f64; 3]> = (0..nx)
            .map(|j| internal_cross(init.w0[j], init.w1[j]))
            .collect();

        for j in 0..nx {
            let (jm, jp) = lat.neighbors(j);
            let u = init.u[j];
            let w0 = init.w0[j];
            let w1 = init.w1[j];
            let ux = centered(&init.u, jm, jp);
            let w0x = centered(&init.w0, jm, jp);
            let w1x = centered(&init.w1, jm, jp);

            // u_tt = u_xx + 2g(W1 x u_x - W0 x u_t) + g^2 [W1x(W1xu) - W0x(W0xu)]
            let c1 = internal_cross(w1, ux);
            let c0 = internal_cross(w0, init.u_vel[j]);
            let t1 = internal_cross(w1, internal_cross(w1, u));
            let t0 = internal_cross(w0, internal_cross(w0, u));
            let mut extra_u = [0.0; 3];
            for k in 0..3 {
                extra_u[k] = 2.0 * g * (c1[k] - c0[k]) + g * g * (t1[k] - t0[k]);
            }

            // W1_tt per the gauge-reduced equation; d_t W_1 is the given velocity.
            let d1u = {
                let c = internal_cross(w1, u);
                [ux[0] + g * c[0], ux[1] + g * c[1], ux[2] + g * c[2]]
            };
            let a = internal_cross(w1x, w1);
            let b = internal_cross(w0, w0x);
            let nl = internal_cross(w0, internal_cross(w0, w1));
            let fr = internal_cross(w0, init.w1_vel[j]);
            let src1 = internal_cross(d1u, u);
            let mut extra_w1 = [0.0; 3];
            for k in 0..3 {
                extra_w1[k] =
                    -g * (a[k] - b[k] + g * nl[k]) - 2.0 * g * fr[k] - g * src1[k];
            }

            // W0_tt: W_01 at t = 0 from the given W1 velocity.
            let d0u = {
                let c = internal_cross(w0, u);
                [
                    init.u_vel[j][0] + g * c[0],
                    init.u_vel[j][1] + g * c[1],
                    init.u_vel[j][2] + g * c[2],
                ]
            };
            let w01 = {
                let c = internal_cross(w0, w1);
                [
                    init.w1_vel[j][0] - w0x[0] + g * c[0],
                    init.w1_vel[j][1] - w0x[1] + g * c[1],
                    init.w1_vel[j][2] - w0x[2] + g * c[2],
                ]
            };
            let px = centered(&p_field, jm, jp);
            let wxw01 = internal_cross(w1, w01);
            let src0 = internal_cross(d0u, u);
            let mut extra_w0 = [0.0; 3];
            for k in 0..3 {
                extra_w0[k] = -g * (px[k] + wxw01[k]) - g * src0[k];
            }

            for k in 0..3 {
                let lap_u = init.u[jp][k] - init.u[j][k] * 2.0 + init.u[jm][k];
                u_prev[j][k] = init.u[j][k] - dt * init.u_vel[j][k]
                    + 0.5 * s2 * lap_u
                    + 0.5 * dt * dt * extra_u[k];
                let lap_w0 = init.w0[jp][k] - init.w0[j][k] * 2.0 + init.w0[jm][k];
                w0_prev[j][k] = init.w0[j][k] - dt * init.w0_vel[j][k]
                    + 0.5 * s2 * lap_w0
                    + 0.5 * dt * dt * extra_w0[k];
                let lap_w1 = init.w1[jp][k] - init.w1[j][k] * 2.0 + init.w1[jm][k];
                w1_prev[j][k] = init.w1[j][k] - dt * init.w1_vel[j][k]
                    + 0.5 * s2 * lap_w1
                    + 0.5 * dt * dt * extra_w1[k];
            }
        }

        Ok(ThFieldState {
            u: init.u,
            u_prev,
            w0: init.w0,
            w0_prev,
            w1: init.w1,
            w1_prev,
            time_index: 0,
        })
    }

    pub fn check_dims(&self, params: &ThParams) -> Result<(), ThError> {
        let nx = params.lattice().nx();
        check_len(self.u.len(), nx)?;
        check_len(self.u_prev.len(), nx)?;
        check_len(self.w0.len(), nx)?;
        check_len(self.w0_prev.len(), nx)?;
        check_len(self.w1.len(), nx)?;
        check_len(self.w1_prev.len(), nx)?;
        Ok(())
    }

    /// Applies one global internal rotation to every stored vector; a
    /// symmetry of the dynamics.
    pub fn rotate_internal(&self, r: &RotationMatrix) -> ThFieldState {
        let rot = |field: &[[f64; 3]]| {
            field
                .iter()
                .map(|v| {
                    let rv = r.apply(&crate::symmetry::Vec3(*v));
                    rv.0
                })
                .collect::<Vec<_>>()
        };
        ThFieldState {
            u: rot(&self.u),
            u_prev: rot(&self.u_prev),
            w0: rot(&self.w0),
            w0_prev: rot(&self.w0_prev),
            w1: rot(&self.w1),
            w1_prev: rot(&self.w1_prev),
            time_index: self.time_index,
        }
    }
}

/// Time (`T`) or space (`X`) direction for covariant derivatives.
pub use crate::field_dh::Direction;

fn mid(cur: &[[f64; 3]], prev: &[[f64; 3]], j: usize) -> [f64; 3] {
    [
        0.5 * (cur[j][0] + prev[j][0]),
        0.5 * (cur[j][1] + prev[j][1]),
        0.5 * (cur[j][2] + prev[j][2]),
    ]
}

/// Covariant derivative `D_i u = d_i u + g W_i x u` at the half-level
/// between the two stored layers.
pub fn covariant_derivative_th(
    state: &ThFieldState,
    params: &ThParams,
    direction: Direction,
) -> Vec<[f64; 3]> {
    let lat = params.lattice();
    let g = params.g();
    let mut out = Vec::with_capacity(lat.nx());
    for j in 0..lat.nx() {
        let um = mid(&state.u, &state.u_prev, j);
        let d = match direction {
            Direction::T => {
                let dudt = [
                    (state.u[j][0] - state.u_prev[j][0]) / lat.dt(),
                    (state.u[j][1] - state.u_prev[j][1]) / lat.dt(),
                    (state.u[j][2] - state.u_prev[j][2]) / lat.dt(),
                ];
                let c = internal_cross(mid(&state.w0, &state.w0_prev, j), um);
                [dudt[0] + g * c[0], dudt[1] + g * c[1], dudt[2] + g * c[2]]
            }
            Direction::X => {
                let (jm, jp) = lat.neighbors(j);
                let up = mid(&state.u, &state.u_prev, jp);
                let um_ = mid(&state.u, &state.u_prev, jm);
                let two_dx = 2.0 * lat.dx();
                let dudx = [
                    (up[0] - um_[0]) / two_dx,
                    (up[1] - um_[1]) / two_dx,
                    (up[2] - um_[2]) / two_dx,
                ];
                let c = internal_cross(mid(&state.w1, &state.w1_prev, j), um);
                [dudx[0] + g * c[0], dudx[1] + g * c[1], dudx[2] + g * c[2]]
            }
        };
        out.push(d);
    }
    out
}

/// The single independent field-strength component
/// `W_01 = d_t W_1 - d_x W_0 + g W_0 x W_1`, per site at the half-level.
pub fn field_strength_th(state: &ThFieldState, params: &ThParams) -> Vec<[f64; 3]> {
    let lat = params.lattice();
    let g = params.g();
    let two_dx = 2.0 * lat.dx();
    (0..lat.nx())
        .map(|j| {
            let (jm, jp) = lat.neighbors(j);
            let dw1_dt = [
                (state.w1[j][0] - state.w1_prev[j][0]) / lat.dt(),
                (state.w1[j][1] - state.w1_prev[j][1]) / lat.dt(),
                (state.w1[j][2] - state.w1_prev[j][2]) / lat.dt(),
            ];
            let w0p = mid(&state.w0, &state.w0_prev, jp);
            let w0m = mid(&state.w0, &state.w0_prev, jm);
            let cross = internal_cross(
                mid(&state.w0, &state.w0_prev, j),
                mid(&state.w1, &state.w1_prev, j),
            );
            [
                dw1_dt[0] - (w0p[0] - w0m[0]) / two_dx + g * cross[0],
                dw1_dt[1] - (w0p[1] - w0m[1]) / two_dx + g * cross[1],
                dw1_dt[2] - (w0p[2] - w0m[2]) / two_dx + g * cross[2],
            ]
        })
        .collect()
}

/// L2 norm of the Lorenz-type gauge residual `d_t W_0 - d_x W_1` over sites
/// and internal components. Diagnostic only.
pub fn lorenz_residual_th(state: &ThFieldState, params: &ThParams) -> f64 {
    let lat = params.lattice();
    let two_dx = 2.0 * lat.dx();
    let mut sum = 0.0;
    for j in 0..lat.nx() {
        let (jm, jp) = lat.neighbors(j);
        let w1p = mid(&state.w1, &state.w1_prev, jp);
        let w1m = mid(&state.w1, &state.w1_prev, jm);
        for k in 0..3 {
            let r = (state.w0[j][k] - state.w0_prev[j][k]) / lat.dt()
                - (w1p[k] - w1m[k]) / two_dx;
            sum += r * r;
        }
    }
    (sum * lat.dx()).sqrt()
}

/// Covariant forward difference of one stored level,
/// `(u_{j+1} - u_j)/dx + g W_mid x u_mid` with midpoint-averaged factors.
fn forward_covariant(
    u: &[[f64; 3]],
    w1: &[[f64; 3]],
    g: f64,
    lat: &WaveParams,
    j: usize,
) -> [f64; 3] {
    let (_, jp) = lat.neighbors(j);
    let w_mid = [
        0.5 * (w1[j][0] + w1[jp][0]),
        0.5 * (w1[j][1] + w1[jp][1]),
        0.5 * (w1[j][2] + w1[jp][2]),
    ];
    let u_mid = [
        0.5 * (u[j][0] + u[jp][0]),
        0.5 * (u[j][1] + u[jp][1]),
        0.5 * (u[j][2] + u[jp][2]),
    ];
    let c = internal_cross(w_mid, u_mid);
    [
        (u[jp][0] - u[j][0]) / lat.dx() + g * c[0],
        (u[jp][1] - u[j][1]) / lat.dx() + g * c[1],
        (u[jp][2] - u[j][2]) / lat.dx() + g * c[2],
    ]
}

/// Energy `E = sum_j dx [ |D_0 u|^2/2 + |D_1 u|^2/2 + |W_01|^2/2 ]`,
/// invariant under global internal rotations.
///
/// The covariant time derivative lives at the half-level between the stored
/// layers; the spatial term pairs the covariant forward differences of the
/// two layers, the combination the leapfrog scheme conserves exactly in the
/// decoupled limit (squaring a single layer would oscillate at O(dt^2)).
pub fn energy_th(state: &ThFieldState, params: &ThParams) -> f64 {
    let lat = params.lattice();
    let g = params.g();
    let d0 = covariant_derivative_th(state, params, Direction::T);
    let w01 = field_strength_th(state, params);
    let mut total = 0.0;
    for j in 0..lat.nx() {
        let g_cur = forward_covariant(&state.u, &state.w1, g, lat, j);
        let g_prev = forward_covariant(&state.u_prev, &state.w1_prev, g, lat, j);
        total += 0.5 * (dot3(d0[j], d0[j]) + dot3(g_cur, g_prev) + dot3(w01[j], w01[j]));
    }
    total * lat.dx()
}

fn guard(step: u64, field: &'static str, magnitude: f64, ceiling: f64) -> Result<(), ThError> {
    if !magnitude.is_finite() || magnitude > ceiling {
        return Err(ThError::Instability {
            step,
            field,
            magnitude,
            ceiling,
        });
    }
    Ok(())
}

/// One leapfrog step of the coupled nonlinear system, advancing `u`, then
/// `W_1`, then `W_0`.
pub fn step_th(state: &ThFieldState, params: &ThParams) -> Result<ThFieldState, ThError> {
    state.check_dims(params)?;
    let lat = params.lattice();
    let courant = lat.courant();
    if courant > 1.0 {
        return Err(WaveError::CourantViolation { courant }.into());
    }
    let nx = lat.nx();
    let g = params.g();
    let dt = lat.dt();
    let dt2 = dt * dt;
    let s2 = lat.courant_sq();
    let two_dx = 2.0 * lat.dx();

    let centered = |f: &[[f64; 3]], jm: usize, jp: usize| {
        [
            (f[jp][0] - f[jm][0]) / two_dx,
            (f[jp][1] - f[jm][1]) / two_dx,
            (f[jp][2] - f[jm][2]) / two_dx,
        ]
    };

    // Matter update: (I + g dt [W_0]_x) u+ = linear + dt^2 coupling + g dt W_0 x u-.
    let mut u_next = vec![[0.0; 3]; nx];
    for j in 0..nx {
        let (jm, jp) = lat.neighbors(j);
        let u = state.u[j];
        let w0 = state.w0[j];
        let w1 = state.w1[j];
        let ux = centered(&state.u, jm, jp);
        let c1 = internal_cross(w1, ux);
        let t1 = internal_cross(w1, internal_cross(w1, u));
        let t0 = internal_cross(w0, internal_cross(w0, u));
        let friction = internal_cross(w0, state.u_prev[j]);
        let mut rhs = [0.0; 3];
        for k in 0..3 {
            let lap = state.u[jp][k] - u[k] * 2.0 + state.u[jm][k];
            let coupling = 2.0 * g * c1[k] + g * g * (t1[k] - t0[k]);
            rhs[k] = u[k] * 2.0 - state.u_prev[j][k]
                + s2 * lap
                + dt2 * coupling
                + g * dt * friction[k];
        }
        let w = [g * dt * w0[0], g * dt * w0[1], g * dt * w0[2]];
        u_next[j] = solve_cross_system(w, rhs);
    }

    // W_1 update: same implicit structure in W_0 x d_t W_1.
    let mut w1_next = vec![[0.0; 3]; nx];
    for j in 0..nx {
        let (jm, jp) = lat.neighbors(j);
        let u = state.u[j];
        let w0 = state.w0[j];
        let w1 = state.w1[j];
        let ux = centered(&state.u, jm, jp);
        let w0x = centered(&state.w0, jm, jp);
        let w1x = centered(&state.w1, jm, jp);
        let d1u = {
            let c = internal_cross(w1, u);
            [ux[0] + g * c[0], ux[1] + g * c[1], ux[2] + g * c[2]]
        };
        let a = internal_cross(w1x, w1);
        let b = internal_cross(w0, w0x);
        let nl = internal_cross(w0, internal_cross(w0, w1));
        let src = internal_cross(d1u, u);
        let friction = internal_cross(w0, state.w1_prev[j]);
        let mut rhs = [0.0; 3];
        for k in 0..3 {
            let lap = state.w1[jp][k] - w1[k] * 2.0 + state.w1[jm][k];
            let coupling = -g * (a[k] - b[k] + g * nl[k]) - g * src[k];
            rhs[k] = w1[k] * 2.0 - state.w1_prev[j][k]
                + s2 * lap
                + dt2 * coupling
                + g * dt * friction[k];
        }
        let w = [g * dt * w0[0], g * dt * w0[1], g * dt * w0[2]];
        w1_next[j] = solve_cross_system(w, rhs);
    }

    // W_0 update: fully explicit now that centered d_t W_1 and d_t u exist.
    let p_field: Vec<[f64; 3]> = (0..nx)
        .map(|j| internal_cross(state.w0[j], state.w1[j]))
        .collect();
    let mut w0_next = vec![[0.0; 3]; nx];
    for j in 0..nx {
        let (jm, jp) = lat.neighbors(j);
        let u = state.u[j];
        let w0 = state.w0[j];
        let w1 = state.w1[j];
        let w0x = centered(&state.w0, jm, jp);
        let dudt = [
            (u_next[j][0] - state.u_prev[j][0]) / (2.0 * dt),
            (u_next[j][1] - state.u_prev[j][1]) / (2.0 * dt),
            (u_next[j][2] - state.u_prev[j][2]) / (2.0 * dt),
        ];
        let d0u = {
            let c = internal_cross(w0, u);
            [dudt[0] + g * c[0], dudt[1] + g * c[1], dudt[2] + g * c[2]]
        };
        let w01 = {
            let c = internal_cross(w0, w1);
            [
                (w1_next[j][0] - state.w1_prev[j][0]) / (2.0 * dt) - w0x[0] + g * c[0],
                (w1_next[j][1] - state.w1_prev[j][1]) / (2.0 * dt) - w0x[1] + g * c[1],
                (w1_next[j][2] - state.w1_prev[j][2]) / (2.0 * dt) - w0x[2] + g * c[2],
            ]
        };
        let px = centered(&p_field, jm, jp);
        let wxw01 = internal_cross(w1, w01);
        let src = internal_cross(d0u, u);
        for k in 0..3 {
            let lap = state.w0[jp][k] - w0[k] * 2.0 + state.w0[jm][k];
            let coupling = -g * (px[k] + wxw01[k]) - g * src[k];
            w0_next[j][k] = w0[k] * 2.0 - state.w0_prev[j][k] + s2 * lap + dt2 * coupling;
        }
    }

    let step = state.time_index + 1;
    let ceiling = params.field_ceiling();
    let max_of = |f: &[[f64; 3]]| f.iter().map(|v| norm3(*v)).fold(0.0, f64::max);
    guard(step, "u", max_of(&u_next), ceiling)?;
    guard(step, "W0", max_of(&w0_next), ceiling)?;
    guard(step, "W1", max_of(&w1_next), ceiling)?;

    Ok(ThFieldState {
        u_prev: state.u.clone(),
        u: u_next,
        w0_prev: state.w0.clone(),
        w0: w0_next,
        w1_prev: state.w1.clone(),
        w1: w1_next,
        time_index: step,
    })
}

/// Advances `steps` leapfrog steps, returning the final state.
pub fn run_th(state: &ThFieldState, params: &ThParams, steps: usize) -> Result<ThFieldState, ThError> {
    let mut s = state.clone();
    for _ in 0..steps {
        s = step_th(&s, params)?;
    }
    Ok(s)
}

/// L2 distance between the current layers of two states, over all fields.
pub fn l2_distance_th(a: &ThFieldState, b: &ThFieldState, params: &ThParams) -> f64 {
    let mut sum = 0.0;
    for j in 0..params.lattice().nx() {
        for k in 0..3 {
            sum += (a.u[j][k] - b.u[j][k]).powi(2);
            sum += (a.w0[j][k] - b.w0[j][k]).powi(2);
            sum += (a.w1[j][k] - b.w1[j][k]).powi(2);
        }
    }
    (sum * params.lattice().dx()).sqrt()
}

/// Superposition failure `|| evolve(A+B) - evolve(A) - evolve(B) ||_L2`
/// after `steps`, for source-free initial data (A and B should carry no
/// matter field). Zero for an exactly linear evolution; the non-Abelian
/// self-interaction makes it grow with the coupling.
pub fn self_interaction_residual(
    init_a: &ThInitial,
    init_b: &ThInitial,
    params: &ThParams,
    steps: usize,
) -> Result<f64, ThError> {
    let sum = init_a.add(init_b);
    let run_a = run_th(&ThFieldState::from_initial(params, init_a.clone())?, params, steps)?;
    let run_b = run_th(&ThFieldState::from_initial(params, init_b.clone())?, params, steps)?;
    let run_sum = run_th(&ThFieldState::from_initial(params, sum)?, params, steps)?;

    let lat = params.lattice();
    let mut acc = 0.0;
    for j in 0..lat.nx() {
        for k in 0..3 {
            acc += (run_sum.u[j][k] - run_a.u[j][k] - run_b.u[j][k]).powi(2);
            acc += (run_sum.w0[j][k] - run_a.w0[j][k] - run_b.w0[j][k]).powi(2);
            acc += (run_sum.w1[j][k] - run_a.w1[j][k] - run_b.w1[j][k]).powi(2);
        }
    }
    Ok((acc * lat.dx()).sqrt())
}

/// Maximum L2 distance over `steps` steps between the run at the configured
/// coupling and the component-decoupled linear run (the same initial data at
/// zero coupling, where every internal component is an independent Abelian
/// field). Tends to zero as `g -> 0`.
pub fn abelian_limit_check(
    init: &ThInitial,
    params: &ThParams,
    steps: usize,
) -> Result<f64, ThError> {
    let linear = params.with_coupling(0.0)?;
    let mut s_g = ThFieldState::from_initial(params, init.clone())?;
    let mut s_0 = ThFieldState::from_initial(&linear, init.clone())?;
    let mut worst = l2_distance_th(&s_g, &s_0, params);
    for _ in 0..steps {
        s_g = step_th(&s_g, params)?;
        s_0 = step_th(&s_0, &linear)?;
        worst = worst.max(l2_distance_th(&s_g, &s_0, params));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(g: f64) -> ThParams {
        let lat = WaveParams::new(1.0, 64, 1.0 / 64.0, 0.5 / 64.0).unwrap();
        ThParams::new(g, lat).unwrap()
    }

    #[test]
    fn cross_product_examples() {
        assert_eq!(internal_cross([2.0, -1.0, 0.5], [4.0, -2.0, 1.0]), [0.0, 0.0, 0.0]);
        assert_eq!(
            internal_cross([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
            [0.0, 0.0, 1.0]
        );
        assert_eq!(
            internal_cross([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]),
            [-3.0, 6.0, -3.0]
        );
    }

    #[test]
    fn covariant_derivative_zero_coupling_is_plain() {
        let p = params(0.0);
        let mut state = ThFieldState::zero(&p);
        for j in 0..p.lattice().nx() {
            let x = p.lattice().x(j);
            let v = (2.0 * std::f64::consts::PI * x).sin();
            state.u[j] = [v, 0.0, 0.0];
            state.u_prev[j] = [v, 0.0, 0.0];
            state.w1[j] = [0.0, 5.0, 0.0];
            state.w1_prev[j] = [0.0, 5.0, 0.0];
        }
        let d1 = covariant_derivative_th(&state, &p, Direction::X);
        for j in 0..p.lattice().nx() {
            let (jm, jp) = p.lattice().neighbors(j);
            let plain = (state.u[jp][0] - state.u[jm][0]) / (2.0 * p.lattice().dx());
            assert_abs_diff_eq!(d1[j][0], plain, epsilon = 1e-15);
            assert_eq!(d1[j][1], 0.0);
            assert_eq!(d1[j][2], 0.0);
        }
    }

    #[test]
    fn covariant_derivative_parallel_potential_drops_out() {
        let p = params(1.0);
        let mut state = ThFieldState::zero(&p);
        for j in 0..p.lattice().nx() {
            state.u[j] = [0.7, 0.0, 0.0];
            state.u_prev[j] = [0.7, 0.0, 0.0];
            state.w1[j] = [2.0, 0.0, 0.0]; // parallel to u
            state.w1_prev[j] = [2.0, 0.0, 0.0];
        }
        let d1 = covariant_derivative_th(&state, &p, Direction::X);
        for d in d1 {
            assert_eq!(d, [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn covariant_derivative_cross_term() {
        // constant u = e1, W_1 = e2, g = 1: D_1 u = e2 x e1 = -e3 everywhere.
        let p = params(1.0);
        let mut state = ThFieldState::zero(&p);
        for j in 0..p.lattice().nx() {
            state.u[j] = [1.0, 0.0, 0.0];
            state.u_prev[j] = [1.0, 0.0, 0.0];
            state.w1[j] = [0.0, 1.0, 0.0];
            state.w1_prev[j] = [0.0, 1.0, 0.0];
        }
        for d in covariant_derivative_th(&state, &p, Direction::X) {
            assert_eq!(d, [0.0, 0.0, -1.0]);
        }
    }

    #[test]
    fn field_strength_examples() {
        let p = params(1.0);
        let zero = ThFieldState::zero(&p);
        for w in field_strength_th(&zero, &p) {
            assert_eq!(w, [0.0, 0.0, 0.0]);
        }

        // Constant W_0 = e1, W_1 = e2, g = 1: pure commutator, W_01 = e3.
        let mut state = ThFieldState::zero(&p);
        for j in 0..p.lattice().nx() {
            state.w0[j] = [1.0, 0.0, 0.0];
            state.w0_prev[j] = [1.0, 0.0, 0.0];
            state.w1[j] = [0.0, 1.0, 0.0];
            state.w1_prev[j] = [0.0, 1.0, 0.0];
        }
        for w in field_strength_th(&state, &p) {
            assert_eq!(w, [0.0, 0.0, 1.0]);
        }

        // g = 0 reduces to the Abelian curl per internal component.
        let p0 = params(0.0);
        let mut curl = ThFieldState::zero(&p0);
        for j in 0..p0.lattice().nx() {
            let x = p0.lattice().x(j);
            let v = (2.0 * std::f64::consts::PI * x).sin();
            curl.w0[j] = [v, 0.0, 0.0];
            curl.w0_prev[j] = [v, 0.0, 0.0];
        }
        let ws = field_strength_th(&curl, &p0);
        for j in 0..p0.lattice().nx() {
            let (jm, jp) = p0.lattice().neighbors(j);
            let expect = -(curl.w0[jp][0] - curl.w0[jm][0]) / (2.0 * p0.lattice().dx());
            assert_abs_diff_eq!(ws[j][0], expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn solve_cross_system_inverts() {
        let w = [0.3, -0.2, 0.7];
        let v = [1.0, 2.0, -0.5];
        let solved = solve_cross_system(w, v);
        // Multiply back: (I + [w]_x) solved should reproduce v.
        let back = [
            solved[0] + internal_cross(w, solved)[0],
            solved[1] + internal_cross(w, solved)[1],
            solved[2] + internal_cross(w, solved)[2],
        ];
        for k in 0..3 {
            assert_abs_diff_eq!(back[k], v[k], epsilon = 1e-14);
        }
    }

    #[test]
    fn instability_guard_trips() {
        let p = params(0.0).with_field_ceiling(0.5);
        let mut init = ThInitial::zero(p.lattice().nx());
        for j in 0..p.lattice().nx() {
            let x = p.lattice().x(j) - 0.5;
            init.u[j] = [2.0 * (-x * x / 0.01).exp(), 0.0, 0.0];
        }
        let state = ThFieldState::from_initial(&p, init).unwrap();
        match step_th(&state, &p) {
            Err(ThError::Instability { step, field, .. }) => {
                assert_eq!(step, 1);
                assert_eq!(field, "u");
            }
            other => panic!("expected instability, got {other:?}"),
        }
    }
}

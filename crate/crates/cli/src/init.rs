//! Initial-condition descriptors: composable profiles evaluable at any
//! lattice site, for scalar, complex, and 3-component fields, with optional
//! traveling-wave velocity data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use trihelix_core::waves::WaveParams;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorKind {
    Gaussian,
    PlaneWave,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Traveling {
    /// Velocity data for a profile translating toward negative x.
    Left,
    /// Velocity data for a profile translating toward positive x.
    Right,
}

/// One additive contribution to an initial field.
///
/// `gaussian` needs `center`, `width`, `amplitude`; `plane_wave` needs `k`
/// (which must wind an integer number of times around the domain) and
/// `amplitude`, with optional `phase`. `direction` carries the internal
/// direction for vector fields (3 entries) or the complex direction for the
/// Abelian matter field (2 entries, re/im); scalar fields take no
/// direction. `traveling` adds the velocity profile of the corresponding
/// exact traveling-wave solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    pub kind: DescriptorKind,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub amplitude: Option<f64>,
    pub k: Option<f64>,
    pub phase: Option<f64>,
    pub direction: Option<Vec<f64>>,
    pub traveling: Option<Traveling>,
}

fn wrap_delta(d: f64, length: f64) -> f64 {
    let mut r = d % length;
    if r < -0.5 * length {
        r += length;
    } else if r >= 0.5 * length {
        r -= length;
    }
    r
}

/// Scalar profile value and spatial derivative at `x`.
fn profile(d: &Descriptor, x: f64, length: f64) -> Result<(f64, f64), CliError> {
    match d.kind {
        DescriptorKind::Zero => Ok((0.0, 0.0)),
        DescriptorKind::Gaussian => {
            let center = require(d.center, "gaussian", "center")?;
            let width = require(d.width, "gaussian", "width")?;
            let amplitude = require(d.amplitude, "gaussian", "amplitude")?;
            if !(width > 0.0 && width.is_finite()) {
                return Err(CliError::config(format!(
                    "gaussian width must be positive (got {width})"
                )));
            }
            let delta = wrap_delta(x - center, length);
            let value = amplitude * (-delta * delta / (width * width)).exp();
            Ok((value, value * (-2.0 * delta / (width * width))))
        }
        DescriptorKind::PlaneWave => {
            let k = require(d.k, "plane_wave", "k")?;
            let amplitude = require(d.amplitude, "plane_wave", "amplitude")?;
            let phase = d.phase.unwrap_or(0.0);
            let arg = k * x + phase;
            Ok((amplitude * arg.cos(), -amplitude * k * arg.sin()))
        }
    }
}

fn require(v: Option<f64>, kind: &str, name: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::config(format!("{kind} descriptor needs '{name}'")))
}

fn check_periodicity(d: &Descriptor, lattice: &WaveParams) -> Result<(), CliError> {
    if d.kind == DescriptorKind::PlaneWave {
        let k = require(d.k, "plane_wave", "k")?;
        let winding = k * lattice.length() / (2.0 * std::f64::consts::PI);
        if (winding - winding.round()).abs() > 1e-9 {
            return Err(CliError::config(format!(
                "plane_wave k = {k} does not fit the periodic domain \
                 (k L / 2pi = {winding} is not an integer)"
            )));
        }
    }
    Ok(())
}

fn direction_of(d: &Descriptor, arity: usize) -> Result<Vec<f64>, CliError> {
    match (&d.direction, arity) {
        (None, 1) => Ok(vec![1.0]),
        (None, _) => Err(CliError::config(format!(
            "descriptor needs a {arity}-component 'direction' for this field"
        ))),
        (Some(dir), _) => {
            if dir.len() != arity || dir.iter().any(|v| !v.is_finite()) {
                return Err(CliError::config(format!(
                    "'direction' must hold {arity} finite components (got {dir:?})"
                )));
            }
            Ok(dir.clone())
        }
    }
}

/// Sign of the velocity contribution: a right-mover f(x - a t) has
/// d_t f = -a f'.
fn velocity_sign(t: Option<Traveling>) -> f64 {
    match t {
        Some(Traveling::Right) => -1.0,
        Some(Traveling::Left) => 1.0,
        None => 0.0,
    }
}

/// Evaluates descriptors onto a scalar field and its velocity.
pub fn eval_scalar(
    descriptors: &[Descriptor],
    lattice: &WaveParams,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut field = vec![0.0; lattice.nx()];
    let mut velocity = vec![0.0; lattice.nx()];
    for d in descriptors {
        check_periodicity(d, lattice)?;
        direction_of(d, 1)?;
        let sign = velocity_sign(d.traveling) * lattice.a();
        for j in 0..lattice.nx() {
            let (value, slope) = profile(d, lattice.x(j), lattice.length())?;
            field[j] += value;
            velocity[j] += sign * slope;
        }
    }
    Ok((field, velocity))
}

/// Evaluates descriptors onto a 3-component field and its velocity.
pub fn eval_vec3(
    descriptors: &[Descriptor],
    lattice: &WaveParams,
) -> Result<(Vec<[f64; 3]>, Vec<[f64; 3]>), CliError> {
    let mut field = vec![[0.0; 3]; lattice.nx()];
    let mut velocity = vec![[0.0; 3]; lattice.nx()];
    for d in descriptors {
        check_periodicity(d, lattice)?;
        let dir = direction_of(d, 3)?;
        let sign = velocity_sign(d.traveling) * lattice.a();
        for j in 0..lattice.nx() {
            let (value, slope) = profile(d, lattice.x(j), lattice.length())?;
            for k in 0..3 {
                field[j][k] += value * dir[k];
                velocity[j][k] += sign * slope * dir[k];
            }
        }
    }
    Ok((field, velocity))
}

/// Evaluates descriptors onto a complex field and its velocity. Plane waves
/// are genuinely complex, `amplitude * e^{i(kx + phase)}`; traveling plane
/// waves get the phase-rotation velocity of the exact solution
/// `e^{i k (x -/+ a t)}`.
pub fn eval_complex(
    descriptors: &[Descriptor],
    lattice: &WaveParams,
) -> Result<(Vec<Complex64>, Vec<Complex64>), CliError> {
    let mut field = vec![Complex64::new(0.0, 0.0); lattice.nx()];
    let mut velocity = vec![Complex64::new(0.0, 0.0); lattice.nx()];
    for d in descriptors {
        check_periodicity(d, lattice)?;
        let dir = direction_of(d, 2)?;
        let dir = Complex64::new(dir[0], dir[1]);
        match d.kind {
            DescriptorKind::PlaneWave => {
                let k = require(d.k, "plane_wave", "k")?;
                let amplitude = require(d.amplitude, "plane_wave", "amplitude")?;
                let phase = d.phase.unwrap_or(0.0);
                let vel_factor = Complex64::new(0.0, velocity_sign(d.traveling) * lattice.a() * k);
                for j in 0..lattice.nx() {
                    let value = dir * Complex64::from_polar(amplitude, k * lattice.x(j) + phase);
                    field[j] += value;
                    velocity[j] += vel_factor * value;
                }
            }
            _ => {
                let sign = velocity_sign(d.traveling) * lattice.a();
                for j in 0..lattice.nx() {
                    let (value, slope) = profile(d, lattice.x(j), lattice.length())?;
                    field[j] += dir * value;
                    velocity[j] += dir * (sign * slope);
                }
            }
        }
    }
    Ok((field, velocity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice() -> WaveParams {
        WaveParams::new(1.0, 64, 1.0 / 64.0, 0.5 / 64.0).unwrap()
    }

    fn gaussian(center: f64) -> Descriptor {
        Descriptor {
            kind: DescriptorKind::Gaussian,
            center: Some(center),
            width: Some(0.05),
            amplitude: Some(1.0),
            k: None,
            phase: None,
            direction: None,
            traveling: None,
        }
    }

    #[test]
    fn empty_descriptor_list_is_zero() {
        let (field, velocity) = eval_scalar(&[], &lattice()).unwrap();
        assert!(field.iter().chain(velocity.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn descriptors_compose_additively() {
        let lat = lattice();
        let (one, _) = eval_scalar(&[gaussian(0.3)], &lat).unwrap();
        let (two, _) = eval_scalar(&[gaussian(0.3), gaussian(0.7)], &lat).unwrap();
        let (other, _) = eval_scalar(&[gaussian(0.7)], &lat).unwrap();
        for j in 0..lat.nx() {
            assert!((two[j] - one[j] - other[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn traveling_sets_advection_velocity() {
        let lat = lattice();
        let mut d = gaussian(0.5);
        d.traveling = Some(Traveling::Right);
        let (field, velocity) = eval_scalar(&[d], &lat).unwrap();
        // d_t f = -a f' for a right-mover; check the sign on the leading edge.
        let j = 36; // x > center, f' < 0 there, so velocity must be positive
        assert!(field[j] > 0.0);
        assert!(velocity[j] > 0.0);
    }

    #[test]
    fn plane_wave_must_fit_the_domain() {
        let lat = lattice();
        let bad = Descriptor {
            kind: DescriptorKind::PlaneWave,
            center: None,
            width: None,
            amplitude: Some(1.0),
            k: Some(1.0),
            phase: None,
            direction: None,
            traveling: None,
        };
        assert!(eval_scalar(&[bad], &lat).is_err());
    }

    #[test]
    fn complex_plane_wave_rotates() {
        let lat = lattice();
        let k = 2.0 * std::f64::consts::PI * 2.0 / lat.length();
        let d = Descriptor {
            kind: DescriptorKind::PlaneWave,
            center: None,
            width: None,
            amplitude: Some(0.5),
            k: Some(k),
            phase: None,
            direction: Some(vec![1.0, 0.0]),
            traveling: Some(Traveling::Right),
        };
        let (field, velocity) = eval_complex(&[d], &lat).unwrap();
        for j in 0..lat.nx() {
            assert!((field[j].norm() - 0.5).abs() < 1e-12);
            // u_t = -i k u for the right-mover.
            let expect = Complex64::new(0.0, -k) * field[j];
            assert!((velocity[j] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn vector_fields_need_directions() {
        let lat = lattice();
        assert!(eval_vec3(&[gaussian(0.5)], &lat).is_err());
        let mut d = gaussian(0.5);
        d.direction = Some(vec![0.0, 1.0, 0.0]);
        let (field, _) = eval_vec3(&[d], &lat).unwrap();
        assert_eq!(field[32][0], 0.0);
        assert!(field[32][1] > 0.9);
    }
}

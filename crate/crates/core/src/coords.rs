//! Linear transforms between the institutional coordinate system (G, S, B)
//! and the functional coordinate system (W, N, L), actor-contribution norms,
//! normalization, and helix-regime classification.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoordsError {
    #[error("matrix is singular (|det| = {det:.3e} below 1e-12)")]
    SingularMatrix { det: f64 },
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("vector is not normalized (|v| = {norm})")]
    Unnormalized { norm: f64 },
    #[error("tolerance angle {tol} out of range (0, pi/4)")]
    BadTolerance { tol: f64 },
}

/// Coefficients mapping actor activity (G, S, B) to functional output
/// (W, N, L). Rows ordered (W, N, L), columns ordered (G, S, B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionMatrix {
    pub a: [[f64; 3]; 3],
}

/// Coefficients mapping functional output (W, N, L) to actor activity
/// (G, S, B). Rows ordered (G, S, B), columns ordered (W, N, L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstitutionMatrix {
    pub b: [[f64; 3]; 3],
}

/// A vector along the institutional axes (G, S, B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThVector {
    pub g: f64,
    pub s: f64,
    pub b: f64,
}

impl ThVector {
    pub fn norm(&self) -> f64 {
        (self.g * self.g + self.s * self.s + self.b * self.b).sqrt()
    }
}

/// Shares of an event along the functional axes (W, N, L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventVector {
    pub w: f64,
    pub n: f64,
    pub l: f64,
}

fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, row) in m.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

/// `(W, N, L) = a * (G, S, B)`.
pub fn functions_from_actors(m: &FunctionMatrix, actors: [f64; 3]) -> [f64; 3] {
    mat_vec(&m.a, actors)
}

/// `(G, S, B) = b * (W, N, L)`.
pub fn actors_from_functions(m: &InstitutionMatrix, functions: [f64; 3]) -> [f64; 3] {
    mat_vec(&m.b, functions)
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverts the actor-to-function transform. Fails when |det| <= 1e-12.
pub fn invert_transform(m: &FunctionMatrix) -> Result<InstitutionMatrix, CoordsError> {
    let a = &m.a;
    let det = det3(a);
    if det.abs() <= 1e-12 {
        return Err(CoordsError::SingularMatrix { det });
    }
    // Adjugate over determinant.
    let inv_det = 1.0 / det;
    let mut b = [[0.0; 3]; 3];
    b[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * inv_det;
    b[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * inv_det;
    b[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * inv_det;
    b[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * inv_det;
    b[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * inv_det;
    b[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * inv_det;
    b[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * inv_det;
    b[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * inv_det;
    b[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * inv_det;
    Ok(InstitutionMatrix { b })
}

/// Euclidean norms of the institution-matrix rows: each actor's aggregate
/// contribution across the three functions.
pub fn actor_contributions(m: &InstitutionMatrix) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, row) in m.b.iter().enumerate() {
        out[i] = (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
    }
    out
}

/// Scales a contribution triple to unit Euclidean norm, preserving direction.
pub fn normalize_th_vector(v: [f64; 3]) -> Result<ThVector, CoordsError> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(CoordsError::ZeroVector);
    }
    Ok(ThVector {
        g: v[0] / norm,
        s: v[1] / norm,
        b: v[2] / norm,
    })
}

/// Helix regime of a normalized actor vector.
///
/// `ThI/ThII/ThIII`: aligned with the G/B/S axis respectively.
/// `DhSg/DhBg/DhSb`: lying in the named coordinate plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    ThI,
    ThII,
    ThIII,
    DhSg,
    DhBg,
    DhSb,
    Mixed,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::ThI => "TH_I",
            Regime::ThII => "TH_II",
            Regime::ThIII => "TH_III",
            Regime::DhSg => "DH_SG",
            Regime::DhBg => "DH_BG",
            Regime::DhSb => "DH_SB",
            Regime::Mixed => "MIXED",
        }
    }
}

/// Classifies a unit vector by its angular distance to the coordinate axes
/// and planes.
///
/// Axes are treated as lines (both directions count as aligned). Axis checks
/// take precedence over plane checks since an axis lies in two planes; when
/// two planes are within tolerance and no axis is, the closer plane wins,
/// with ties broken in the order SG, BG, SB.
pub fn classify_regime(v: &ThVector, tol_angle: f64) -> Result<Regime, CoordsError> {
    if !(tol_angle > 0.0 && tol_angle < std::f64::consts::FRAC_PI_4) {
        return Err(CoordsError::BadTolerance { tol: tol_angle });
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(CoordsError::Unnormalized { norm });
    }

    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    // Angle to an axis line: acos(|component|).
    let axis_angles = [
        (Regime::ThI, clamp(v.g.abs()).acos()),
        (Regime::ThII, clamp(v.b.abs()).acos()),
        (Regime::ThIII, clamp(v.s.abs()).acos()),
    ];
    for (regime, angle) in axis_angles {
        if angle < tol_angle {
            return Ok(regime);
        }
    }

    // Angle to a plane: asin(|component along its normal|).
    // SG-plane normal is B, BG-plane normal is S, SB-plane normal is G.
    let plane_angles = [
        (Regime::DhSg, clamp(v.b.abs()).asin()),
        (Regime::DhBg, clamp(v.s.abs()).asin()),
        (Regime::DhSb, clamp(v.g.abs()).asin()),
    ];
    let mut best: Option<(Regime, f64)> = None;
    for (regime, angle) in plane_angles {
        if angle < tol_angle && best.map_or(true, |(_, a)| angle < a) {
            best = Some((regime, angle));
        }
    }
    Ok(best.map_or(Regime::Mixed, |(r, _)| r))
}

/// Splits an event into its three axis-aligned parts; their componentwise
/// sum reproduces the input exactly.
pub fn decompose_event(p: &EventVector) -> [EventVector; 3] {
    [
        EventVector { w: p.w, n: 0.0, l: 0.0 },
        EventVector { w: 0.0, n: p.n, l: 0.0 },
        EventVector { w: 0.0, n: 0.0, l: p.l },
    ]
}

/// The worked-example institution matrix: Government generates 5% of Wealth,
/// 10% of Novelty, 85% of Normative control; University 15%/60%/5%; Industry
/// 80%/30%/10%.
pub const WORKED_EXAMPLE_B: InstitutionMatrix = InstitutionMatrix {
    b: [[0.05, 0.1, 0.85], [0.15, 0.6, 0.05], [0.8, 0.3, 0.1]],
};

//! Classical-field toolkit for Triple Helix innovation models: rotation
//! algebra on the actor space, institutional/functional coordinate
//! transforms, innovation-wave propagation, Abelian (Double Helix) and
//! non-Abelian Yang-Mills (Triple Helix) communication fields on a periodic
//! 1D lattice, and the fractal self-generation trees of the communication
//! structure.

pub mod coords;
pub mod field_dh;
pub mod field_th;
pub mod fractal;
pub mod symmetry;
pub mod waves;

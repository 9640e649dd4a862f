//! Quantum mechanics of a particle confined to a surface of revolution.
//!
//! * [`geometry`]: metric, curvature and geometric potential of a surface
//!   generated by a radius profile `f(z)`.
//! * [`axial`]: hard-wall bound states on a truncated cone.
//! * [`transport`]: coherent transmission through a cone-like junction between
//!   two cylinders, with open (transmitting) boundaries.
//! * [`experiments`]: scripted parameter sweeps that write tabular data.
//! * [`verify`]: the acceptance checks, shared by the test suite and the CLI.
//!
//! Lengths are in nm and energies in meV unless a dimensionless
//! [`KineticScale`] is used.

pub mod axial;
pub mod bessel;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod ode;
pub mod scalar;
pub mod transport;
pub mod units;
pub mod verify;

pub use scalar::Scalar;
pub use units::KineticScale;

pub type Generatrix64 = geometry::Generatrix<f64>;
pub type Generatrix32 = geometry::Generatrix<f32>;
pub type JunctionGeometry64 = geometry::JunctionGeometry<f64>;
pub type JunctionGeometry32 = geometry::JunctionGeometry<f32>;
pub type ConeGeometry64 = axial::ConeGeometry<f64>;
pub type ConeGeometry32 = axial::ConeGeometry<f32>;
pub type AxialMode64 = axial::AxialMode<f64>;
pub type ScatterConfig64 = transport::ScatterConfig<f64>;
pub type ScatteringSolution64 = transport::ScatteringSolution<f64>;

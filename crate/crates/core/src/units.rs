//! Unit conventions: lengths in nm, energies in meV.

use crate::scalar::Scalar;

/// ħ²/(2 m_e) in meV·nm².
pub const HBAR2_OVER_2ME: f64 = 38.0998;

/// Effective mass of conduction electrons in GaAs, in units of m_e.
pub const GAAS_MASS_RATIO: f64 = 0.067;

/// Effective mass used for the junction transport calculations, in units of m_e.
pub const JUNCTION_MASS_RATIO: f64 = 0.173;

/// CODATA 2018 values, used to cross-check [`HBAR2_OVER_2ME`].
pub mod codata {
    /// Reduced Planck constant in J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Electron rest mass in kg.
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    /// Elementary charge in C (J per eV).
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

    /// ħ²/(2 m_e) in meV·nm², recomputed from the SI constants.
    pub fn hbar2_over_2me() -> f64 {
        let joule_m2 = HBAR * HBAR / (2.0 * ELECTRON_MASS);
        joule_m2 / ELEMENTARY_CHARGE * 1e3 * 1e18
    }
}

/// The kinetic prefactor ħ²/(2m) of the Hamiltonian, in energy × length².
///
/// In physical mode this is meV·nm². [`KineticScale::dimensionless`] sets it to
/// one, which together with lengths measured in units of a reference radius ρ
/// puts energies in units of ħ²/(2mρ²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticScale<T>(pub T);

impl<T: Scalar> KineticScale<T> {
    /// ħ²/(2m) for an effective mass `mass_ratio · m_e`.
    pub fn from_mass_ratio(mass_ratio: T) -> Self {
        Self::from_mass_ratio_with(mass_ratio, T::lit(HBAR2_OVER_2ME))
    }

    /// Same as [`from_mass_ratio`](Self::from_mass_ratio) with an explicit
    /// ħ²/(2 m_e) value.
    pub fn from_mass_ratio_with(mass_ratio: T, hbar2_over_2me: T) -> Self {
        KineticScale(hbar2_over_2me / mass_ratio)
    }

    pub fn dimensionless() -> Self {
        KineticScale(T::one())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}
